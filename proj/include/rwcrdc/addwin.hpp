#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rwcrdc/crpq.hpp"
#include "rwcrdc/types.hpp"
#include "rwcrdc/wire.hpp"

namespace rwcrdc {

// Add-win priority queue built on the observed-remove set: every add creates
// a fresh instance tag, a remove cancels exactly the tags it observed.
//
// This is a reconstruction used as a comparison baseline. The value rules
// are ours:
//  - each live tag carries its own innate value and acquired sum;
//  - an inc adds its amount to every tag it observed that is still live;
//  - the exposed priority is innate + acquired of the largest live tag,
//    tags ordered by (initiator, sequence).
// When every tag of an element dies the acquired value goes with them, so a
// re-added element starts from its new innate value.

struct AwAddEffect {
  ElementId element = 0;
  Priority value = 0;
  UniqueTag tag;

  friend bool operator==(const AwAddEffect&, const AwAddEffect&) = default;
};

struct AwRmvEffect {
  ElementId element = 0;
  std::vector<UniqueTag> observed;
  ReplicaId initiator = 0;

  friend bool operator==(const AwRmvEffect&, const AwRmvEffect&) = default;
};

struct AwIncEffect {
  ElementId element = 0;
  Priority amount = 0;
  std::vector<UniqueTag> observed;
  ReplicaId initiator = 0;

  friend bool operator==(const AwIncEffect&, const AwIncEffect&) = default;
};

class AddWinPq {
 public:
  struct Instance {
    Priority innate = 0;
    Priority acquired = 0;

    friend bool operator==(const Instance&, const Instance&) = default;
  };

  explicit AddWinPq(ReplicaId self) : self_(self) {}

  ReplicaId self() const noexcept { return self_; }

  /// Consumes one tag sequence number on success.
  std::optional<AwAddEffect> prepare_add(ElementId e, Priority x);
  std::optional<AwIncEffect> prepare_inc(ElementId e, Priority delta) const;
  std::optional<AwRmvEffect> prepare_rmv(ElementId e) const;

  void apply(const AwAddEffect& eff);
  void apply(const AwIncEffect& eff);
  void apply(const AwRmvEffect& eff);
  void apply_message(const EffectMessage& msg);

  bool empty() const noexcept { return live_.empty(); }
  bool lookup(ElementId e) const { return live_.contains(e); }
  std::optional<Priority> get_pri(ElementId e) const;
  /// Ties go to the smallest element id, as in Crpq.
  std::optional<MaxEntry> get_max() const;

  std::size_t size() const noexcept { return live_.size(); }
  /// Live instance tags of `e`, empty map when absent.
  const std::map<UniqueTag, Instance>& instances(ElementId e) const;
  bool is_cancelled(ElementId e, const UniqueTag& tag) const;

  std::size_t live_tag_count() const noexcept;
  std::size_t cancelled_count() const noexcept;

  std::string fingerprint() const;

 private:
  std::vector<UniqueTag> observed(ElementId e) const;

  ReplicaId self_;
  std::uint64_t next_seq_ = 1;
  std::map<ElementId, std::map<UniqueTag, Instance>> live_;
  std::map<ElementId, std::set<UniqueTag>> cancelled_;
  // Increments that reached this replica before the add of their tag.
  std::map<UniqueTag, Priority> early_increments_;
};

EffectMessage to_wire(const AwAddEffect& eff);
EffectMessage to_wire(const AwRmvEffect& eff);
EffectMessage to_wire(const AwIncEffect& eff);

}  // namespace rwcrdc
