#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "rwcrdc/crh_vector.hpp"
#include "rwcrdc/types.hpp"
#include "rwcrdc/wire.hpp"

namespace rwcrdc {

// ---------------------------------------------------------------------------
// Basic design: remove histories as tag sets, causal delivery required.
// ---------------------------------------------------------------------------

struct BasicAddEffect {
  ElementId element = 0;
  std::set<UniqueTag> history;  // tags of every remove on `element` seen by the initiator
  ReplicaId initiator = 0;

  friend bool operator==(const BasicAddEffect&, const BasicAddEffect&) = default;
};

struct BasicRmvEffect {
  ElementId element = 0;
  UniqueTag tag;

  friend bool operator==(const BasicRmvEffect&, const BasicRmvEffect&) = default;
};

/// One replica of the tag-based remove-win set.
class BasicRwset {
 public:
  explicit BasicRwset(ReplicaId self) : self_(self) {}

  ReplicaId self() const noexcept { return self_; }

  /// Rejected (nullopt) when the element is already present.
  std::optional<BasicAddEffect> prepare_add(ElementId e) const;
  /// Rejected when the element is absent. Consumes one tag sequence number.
  std::optional<BasicRmvEffect> prepare_rmv(ElementId e);

  /// Throws CausalDeliveryViolation when the carried history is not a subset
  /// of the local remove history.
  void apply(const BasicAddEffect& eff);
  void apply(const BasicRmvEffect& eff);

  bool lookup(ElementId e) const { return elements_.contains(e); }
  const std::set<ElementId>& elements() const noexcept { return elements_; }
  /// Remove tags recorded for `e` (empty when none).
  const std::set<UniqueTag>& removes(ElementId e) const;
  std::size_t tag_count() const noexcept;

  /// Canonical dump of (E, T).
  std::string fingerprint() const;

 private:
  ReplicaId self_;
  std::uint64_t next_seq_ = 1;
  std::set<ElementId> elements_;
  std::map<ElementId, std::set<UniqueTag>> removes_;
};

EffectMessage to_wire(const BasicAddEffect& eff);
EffectMessage to_wire(const BasicRmvEffect& eff);
BasicAddEffect basic_add_from_wire(const EffectMessage& msg);
BasicRmvEffect basic_rmv_from_wire(const EffectMessage& msg);

// ---------------------------------------------------------------------------
// Optimized design: crh-vectors, no delivery-order assumption.
// ---------------------------------------------------------------------------

struct OptAddEffect {
  ElementId element = 0;
  CrhVector crh;
  ReplicaId initiator = 0;

  friend bool operator==(const OptAddEffect&, const OptAddEffect&) = default;
};

struct OptRmvEffect {
  ElementId element = 0;
  CrhVector crh;
  ReplicaId initiator = 0;

  friend bool operator==(const OptRmvEffect&, const OptRmvEffect&) = default;
};

/// Shared remove-history bookkeeping of the optimized set and the skeleton:
/// the T payload, a per-element crh-vector with zero for absent entries.
class RemoveHistory {
 public:
  explicit RemoveHistory(std::size_t replicas) : zero_(CrhVector::zero(replicas)) {}

  std::size_t replicas() const noexcept { return zero_.size(); }
  const CrhVector& of(ElementId e) const;

  /// Absorbs `incoming` into T[e]. Returns true when it carried an unseen
  /// remove, which means the caller must evict the element.
  bool absorb(ElementId e, const CrhVector& incoming);

  const std::map<ElementId, CrhVector>& entries() const noexcept { return entries_; }

 private:
  CrhVector zero_;
  std::map<ElementId, CrhVector> entries_;
};

/// One replica of the crh-vector remove-win set.
class OptRwset {
 public:
  OptRwset(ReplicaId self, std::size_t replicas);

  ReplicaId self() const noexcept { return self_; }
  std::size_t replicas() const noexcept { return history_.replicas(); }

  std::optional<OptAddEffect> prepare_add(ElementId e) const;
  std::optional<OptRmvEffect> prepare_rmv(ElementId e) const;

  void apply(const OptAddEffect& eff);
  void apply(const OptRmvEffect& eff);

  bool lookup(ElementId e) const { return elements_.contains(e); }
  const std::set<ElementId>& elements() const noexcept { return elements_; }
  const CrhVector& remove_history(ElementId e) const { return history_.of(e); }
  const RemoveHistory& history() const noexcept { return history_; }

  std::string fingerprint() const;

 private:
  void apply_remove(ElementId e, const CrhVector& crh);

  ReplicaId self_;
  RemoveHistory history_;
  std::set<ElementId> elements_;
};

EffectMessage to_wire(const OptAddEffect& eff);
EffectMessage to_wire(const OptRmvEffect& eff);
OptAddEffect opt_add_from_wire(const EffectMessage& msg);
OptRmvEffect opt_rmv_from_wire(const EffectMessage& msg);

}  // namespace rwcrdc
