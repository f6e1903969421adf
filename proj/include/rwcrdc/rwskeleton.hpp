#pragma once

#include <concepts>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "rwcrdc/crh_vector.hpp"
#include "rwcrdc/rwset.hpp"
#include "rwcrdc/types.hpp"
#include "rwcrdc/wire.hpp"

namespace rwcrdc {

/// An add's claim on the innate value of an element.
template <class Innate>
struct InnateClaim {
  ReplicaId origin = 0;
  Innate value{};

  friend bool operator==(const InnateClaim&, const InnateClaim&) = default;
};

/// The user-supplied conflict resolution for values within one phase.
///
///  - resolve_add(current, incoming): the add-add rule. Must depend on its
///    arguments only and pick the same winner for any fold order.
///  - apply_update(acquired, payload, initiator): the upd-upd rule. Concurrent
///    applications must commute.
///  - fresh_acquired / neutral_innate: values used before any upd resp. add
///    of the current phase has arrived.
///  - interpret(innate, acquired): the read-side combination.
///  - encode_*/decode_*: codec for value payloads inside EffectMessage.
template <class R>
concept SkeletonResolver =
    std::equality_comparable<typename R::Innate> && std::equality_comparable<typename R::Acquired> &&
    requires(const R& r, std::optional<InnateClaim<typename R::Innate>> current,
             InnateClaim<typename R::Innate> incoming, typename R::Innate innate, typename R::Acquired acquired,
             typename R::Update update, ReplicaId origin, ByteWriter& out, ByteReader& in) {
      { r.resolve_add(current, incoming) } -> std::same_as<InnateClaim<typename R::Innate>>;
      { r.apply_update(acquired, update, origin) } -> std::same_as<typename R::Acquired>;
      { r.fresh_acquired() } -> std::same_as<typename R::Acquired>;
      { r.neutral_innate() } -> std::same_as<typename R::Innate>;
      { r.interpret(innate, acquired) } -> std::same_as<typename R::Value>;
      r.encode_innate(innate, out);
      r.encode_acquired(acquired, out);
      r.encode_update(update, out);
      { r.decode_innate(in) } -> std::same_as<typename R::Innate>;
      { r.decode_update(in) } -> std::same_as<typename R::Update>;
    };

class HookContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// One replica of the remove-win skeleton: the optimized set extended with
/// an innate value set by adds and an acquired value modified by upds.
template <SkeletonResolver R>
class RwSkeleton {
 public:
  using Resolver = R;
  using Innate = typename R::Innate;
  using Acquired = typename R::Acquired;
  using Update = typename R::Update;
  using Value = typename R::Value;

  struct AddEffect {
    ElementId element = 0;
    Innate value{};
    ReplicaId initiator = 0;
    CrhVector crh;
  };

  struct UpdEffect {
    ElementId element = 0;
    Update payload{};
    ReplicaId initiator = 0;
    CrhVector crh;
  };

  struct RmvEffect {
    ElementId element = 0;
    ReplicaId initiator = 0;
    CrhVector crh;
  };

  struct Slot {
    Innate innate{};
    Acquired acquired{};

    friend bool operator==(const Slot&, const Slot&) = default;
  };

  RwSkeleton(ReplicaId self, std::size_t replicas, R resolver = R{})
      : self_(self), resolver_(std::move(resolver)), history_(replicas) {
    if (self >= replicas) throw std::invalid_argument("replica id outside the replica set");
  }

  ReplicaId self() const noexcept { return self_; }
  std::size_t replicas() const noexcept { return history_.replicas(); }
  const R& resolver() const noexcept { return resolver_; }

  std::optional<AddEffect> prepare_add(ElementId e, Innate value) const {
    if (contains(e)) return std::nullopt;
    return AddEffect{e, std::move(value), self_, history_.of(e)};
  }

  std::optional<UpdEffect> prepare_upd(ElementId e, Update payload) const {
    if (!contains(e)) return std::nullopt;
    return UpdEffect{e, std::move(payload), self_, history_.of(e)};
  }

  std::optional<RmvEffect> prepare_rmv(ElementId e) const {
    if (!contains(e)) return std::nullopt;
    return RmvEffect{e, self_, history_.of(e).incremented(self_)};
  }

  void apply(const AddEffect& eff) {
    if (!same_phase(eff.element, eff.crh)) return;
    std::optional<InnateClaim<Innate>> current;
    auto at = origins_.find(eff.element);
    auto slot = values_.find(eff.element);
    if (at != origins_.end()) current = InnateClaim<Innate>{at->second, slot->second.innate};
    auto winner = resolver_.resolve_add(current, InnateClaim<Innate>{eff.initiator, eff.value});
    origins_[eff.element] = winner.origin;
    if (slot == values_.end()) {
      values_.emplace(eff.element, Slot{std::move(winner.value), resolver_.fresh_acquired()});
    } else {
      slot->second.innate = std::move(winner.value);
    }
  }

  // No membership check: an upd of the current phase may arrive before the
  // add that created the element, in which case the slot starts neutral.
  void apply(const UpdEffect& eff) {
    if (!same_phase(eff.element, eff.crh)) return;
    auto slot = values_.find(eff.element);
    if (slot == values_.end()) {
      slot = values_.emplace(eff.element, Slot{resolver_.neutral_innate(), resolver_.fresh_acquired()}).first;
    }
    slot->second.acquired = resolver_.apply_update(slot->second.acquired, eff.payload, eff.initiator);
  }

  void apply(const RmvEffect& eff) { apply_remove(eff.element, eff.crh); }

  bool contains(ElementId e) const { return origins_.contains(e); }

  std::optional<ReplicaId> origin(ElementId e) const {
    auto it = origins_.find(e);
    if (it == origins_.end()) return std::nullopt;
    return it->second;
  }

  /// Value slot of `e`; may exist for an absent element (upd before add).
  const Slot* slot(ElementId e) const {
    auto it = values_.find(e);
    return it == values_.end() ? nullptr : &it->second;
  }

  std::optional<Value> value(ElementId e) const {
    if (!contains(e)) return std::nullopt;
    const auto& s = values_.at(e);
    return resolver_.interpret(s.innate, s.acquired);
  }

  const std::map<ElementId, ReplicaId>& elements() const noexcept { return origins_; }
  const std::map<ElementId, Slot>& values() const noexcept { return values_; }
  const RemoveHistory& history() const noexcept { return history_; }

  // --- wire -------------------------------------------------------------------

  EffectMessage to_wire(const AddEffect& eff) const {
    ByteWriter w;
    resolver_.encode_innate(eff.value, w);
    return EffectMessage{OpKind::add, eff.element, eff.initiator, eff.crh, {}, std::move(w).take()};
  }

  EffectMessage to_wire(const UpdEffect& eff) const {
    ByteWriter w;
    resolver_.encode_update(eff.payload, w);
    return EffectMessage{OpKind::upd, eff.element, eff.initiator, eff.crh, {}, std::move(w).take()};
  }

  EffectMessage to_wire(const RmvEffect& eff) const {
    return EffectMessage{OpKind::rmv, eff.element, eff.initiator, eff.crh, {}, {}};
  }

  /// Decodes and applies one broadcast.
  void apply_message(const EffectMessage& msg) {
    if (!msg.crh) throw WireFormatError("skeleton message lacks a crh-vector");
    switch (msg.kind) {
      case OpKind::add: {
        ByteReader r(msg.value);
        auto v = resolver_.decode_innate(r);
        r.expect_done();
        apply(AddEffect{msg.element, std::move(v), msg.initiator, *msg.crh});
        return;
      }
      case OpKind::upd: {
        ByteReader r(msg.value);
        auto u = resolver_.decode_update(r);
        r.expect_done();
        apply(UpdEffect{msg.element, std::move(u), msg.initiator, *msg.crh});
        return;
      }
      case OpKind::rmv:
        apply(RmvEffect{msg.element, msg.initiator, *msg.crh});
        return;
    }
  }

  /// Canonical dump of (E, T, V); equal strings mean equal payloads.
  std::string fingerprint() const {
    std::ostringstream os;
    os << "E{";
    for (const auto& [e, p] : origins_) os << e << '@' << p << ';';
    os << "}T{";
    for (const auto& [e, t] : history_.entries()) os << e << ':' << t.to_string() << ';';
    os << "}V{";
    for (const auto& [e, s] : values_) {
      ByteWriter w;
      resolver_.encode_innate(s.innate, w);
      os << e << ':' << hex(w.bytes()) << '/';
      ByteWriter a;
      resolver_.encode_acquired(s.acquired, a);
      os << hex(a.bytes()) << ';';
    }
    os << '}';
    return os.str();
  }

  friend bool same_payload(const RwSkeleton& a, const RwSkeleton& b) {
    return a.origins_ == b.origins_ && a.history_.entries() == b.history_.entries() && a.values_ == b.values_;
  }

 private:
  static std::string hex(const std::vector<std::uint8_t>& bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (auto b : bytes) {
      out.push_back(kDigits[b >> 4]);
      out.push_back(kDigits[b & 0xf]);
    }
    return out;
  }

  void apply_remove(ElementId e, const CrhVector& crh) {
    if (history_.absorb(e, crh)) {
      origins_.erase(e);
      values_.erase(e);
    }
  }

  // Executes any remove the message has seen but this replica has not, then
  // reports whether the replica and the operation share a phase.
  bool same_phase(ElementId e, const CrhVector& crh) {
    apply_remove(e, crh);
    return equals(crh, history_.of(e));
  }

  ReplicaId self_;
  R resolver_;
  RemoveHistory history_;
  std::map<ElementId, ReplicaId> origins_;
  std::map<ElementId, Slot> values_;
};

/// Checks the upd-upd obligation on sample data: for every base value and
/// every pair of updates, both application orders must agree. Throws
/// HookContractViolation naming the hook on the first counterexample.
template <SkeletonResolver R>
void verify_update_commutativity(const R& resolver, std::span<const typename R::Acquired> bases,
                                 std::span<const std::pair<typename R::Update, ReplicaId>> updates) {
  for (std::size_t b = 0; b < bases.size(); ++b) {
    for (std::size_t i = 0; i < updates.size(); ++i) {
      for (std::size_t j = i + 1; j < updates.size(); ++j) {
        const auto& [ua, pa] = updates[i];
        const auto& [ub, pb] = updates[j];
        auto ab = resolver.apply_update(resolver.apply_update(bases[b], ua, pa), ub, pb);
        auto ba = resolver.apply_update(resolver.apply_update(bases[b], ub, pb), ua, pa);
        if (!(ab == ba)) {
          throw HookContractViolation("resolver hook apply_update does not commute (base sample " +
                                      std::to_string(b) + ", update samples " + std::to_string(i) + " and " +
                                      std::to_string(j) + ")");
        }
      }
    }
  }
}

}  // namespace rwcrdc
