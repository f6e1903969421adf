#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "rwcrdc/rwskeleton.hpp"

namespace rwcrdc {

using Priority = std::int64_t;

/// Signed addition that throws std::overflow_error instead of wrapping.
Priority checked_add(Priority a, Priority b);

/// Priority-queue stubs: larger replica id wins add-add, increments add up,
/// and the exposed priority is innate + acquired.
struct CrpqResolver {
  using Innate = Priority;
  using Acquired = Priority;
  using Update = Priority;
  using Value = Priority;

  InnateClaim<Priority> resolve_add(const std::optional<InnateClaim<Priority>>& current,
                                    const InnateClaim<Priority>& incoming) const {
    // Strict: a re-delivered add from the current winner changes nothing.
    if (!current || incoming.origin > current->origin) return incoming;
    return *current;
  }

  Priority apply_update(Priority acquired, Priority delta, ReplicaId) const { return checked_add(acquired, delta); }
  Priority fresh_acquired() const { return 0; }
  Priority neutral_innate() const { return 0; }
  Priority interpret(Priority innate, Priority acquired) const { return checked_add(innate, acquired); }

  void encode_innate(Priority v, ByteWriter& w) const { w.i64(v); }
  void encode_acquired(Priority v, ByteWriter& w) const { w.i64(v); }
  void encode_update(Priority v, ByteWriter& w) const { w.i64(v); }
  Priority decode_innate(ByteReader& r) const { return r.i64(); }
  Priority decode_update(ByteReader& r) const { return r.i64(); }
};

struct MaxEntry {
  ElementId element = 0;
  Priority priority = 0;

  friend bool operator==(const MaxEntry&, const MaxEntry&) = default;
};

/// Remove-win conflict-free replicated priority queue (one replica).
class Crpq {
 public:
  using Skeleton = RwSkeleton<CrpqResolver>;
  using AddEffect = Skeleton::AddEffect;
  using IncEffect = Skeleton::UpdEffect;
  using RmvEffect = Skeleton::RmvEffect;

  Crpq(ReplicaId self, std::size_t replicas) : skeleton_(self, replicas) {}

  std::optional<AddEffect> prepare_add(ElementId e, Priority x) const { return skeleton_.prepare_add(e, x); }
  /// Negative `delta` decreases the priority.
  std::optional<IncEffect> prepare_inc(ElementId e, Priority delta) const { return skeleton_.prepare_upd(e, delta); }
  std::optional<RmvEffect> prepare_rmv(ElementId e) const { return skeleton_.prepare_rmv(e); }

  void apply(const AddEffect& eff) { skeleton_.apply(eff); }
  void apply(const IncEffect& eff) { skeleton_.apply(eff); }
  void apply(const RmvEffect& eff) { skeleton_.apply(eff); }
  void apply_message(const EffectMessage& msg) { skeleton_.apply_message(msg); }

  template <class Effect>
  EffectMessage to_wire(const Effect& eff) const {
    return skeleton_.to_wire(eff);
  }

  bool empty() const noexcept { return skeleton_.elements().empty(); }
  bool lookup(ElementId e) const { return skeleton_.contains(e); }
  /// nullopt for an absent element.
  std::optional<Priority> get_pri(ElementId e) const { return skeleton_.value(e); }
  /// Highest priority; ties go to the smallest element id. nullopt when empty.
  std::optional<MaxEntry> get_max() const;

  std::size_t size() const noexcept { return skeleton_.elements().size(); }
  const Skeleton& skeleton() const noexcept { return skeleton_; }
  std::string fingerprint() const { return skeleton_.fingerprint(); }

 private:
  Skeleton skeleton_;
};

}  // namespace rwcrdc
