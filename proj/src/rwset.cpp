#include "rwcrdc/rwset.hpp"

#include <algorithm>
#include <sstream>

namespace rwcrdc {

namespace {

const std::set<UniqueTag> kNoTags;

void require_kind(const EffectMessage& msg, OpKind kind) {
  if (msg.kind != kind) {
    throw WireFormatError(std::string("expected ") + to_string(kind) + " message, got " + to_string(msg.kind));
  }
}

const CrhVector& require_crh(const EffectMessage& msg) {
  if (!msg.crh) throw WireFormatError("message lacks a crh-vector");
  return *msg.crh;
}

}  // namespace

// --- basic ------------------------------------------------------------------

std::optional<BasicAddEffect> BasicRwset::prepare_add(ElementId e) const {
  if (lookup(e)) return std::nullopt;
  return BasicAddEffect{e, removes(e), self_};
}

std::optional<BasicRmvEffect> BasicRwset::prepare_rmv(ElementId e) {
  if (!lookup(e)) return std::nullopt;
  return BasicRmvEffect{e, UniqueTag{self_, next_seq_++}};
}

void BasicRwset::apply(const BasicAddEffect& eff) {
  const auto& local = removes(eff.element);
  if (!std::includes(local.begin(), local.end(), eff.history.begin(), eff.history.end())) {
    throw CausalDeliveryViolation("replica " + std::to_string(self_) + " received add of element " +
                                  std::to_string(eff.element) +
                                  " before a remove in its history; causal delivery was violated");
  }
  if (local == eff.history) elements_.insert(eff.element);
}

void BasicRwset::apply(const BasicRmvEffect& eff) {
  removes_[eff.element].insert(eff.tag);
  elements_.erase(eff.element);
}

const std::set<UniqueTag>& BasicRwset::removes(ElementId e) const {
  auto it = removes_.find(e);
  return it == removes_.end() ? kNoTags : it->second;
}

std::size_t BasicRwset::tag_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [e, tags] : removes_) n += tags.size();
  return n;
}

std::string BasicRwset::fingerprint() const {
  std::ostringstream os;
  os << "E{";
  for (auto e : elements_) os << e << ';';
  os << "}T{";
  for (const auto& [e, tags] : removes_) {
    os << e << ':';
    for (const auto& t : tags) os << t.replica << '.' << t.seq << ',';
    os << ';';
  }
  os << '}';
  return os.str();
}

EffectMessage to_wire(const BasicAddEffect& eff) {
  EffectMessage msg;
  msg.kind = OpKind::add;
  msg.element = eff.element;
  msg.initiator = eff.initiator;
  msg.tags.assign(eff.history.begin(), eff.history.end());
  return msg;
}

EffectMessage to_wire(const BasicRmvEffect& eff) {
  EffectMessage msg;
  msg.kind = OpKind::rmv;
  msg.element = eff.element;
  msg.initiator = eff.tag.replica;
  msg.tags = {eff.tag};
  return msg;
}

BasicAddEffect basic_add_from_wire(const EffectMessage& msg) {
  require_kind(msg, OpKind::add);
  return BasicAddEffect{msg.element, std::set<UniqueTag>(msg.tags.begin(), msg.tags.end()), msg.initiator};
}

BasicRmvEffect basic_rmv_from_wire(const EffectMessage& msg) {
  require_kind(msg, OpKind::rmv);
  if (msg.tags.size() != 1) throw WireFormatError("basic rmv carries exactly one tag");
  return BasicRmvEffect{msg.element, msg.tags.front()};
}

// --- remove history -----------------------------------------------------------

const CrhVector& RemoveHistory::of(ElementId e) const {
  auto it = entries_.find(e);
  return it == entries_.end() ? zero_ : it->second;
}

bool RemoveHistory::absorb(ElementId e, const CrhVector& incoming) {
  auto it = entries_.find(e);
  const CrhVector& local = it == entries_.end() ? zero_ : it->second;
  if (!has_unseen(local, incoming)) return false;
  CrhVector merged = merge(local, incoming);
  if (it == entries_.end()) {
    entries_.emplace(e, std::move(merged));
  } else {
    it->second = std::move(merged);
  }
  return true;
}

// --- optimized ----------------------------------------------------------------

OptRwset::OptRwset(ReplicaId self, std::size_t replicas) : self_(self), history_(replicas) {
  if (self >= replicas) throw std::invalid_argument("replica id outside the replica set");
}

std::optional<OptAddEffect> OptRwset::prepare_add(ElementId e) const {
  if (lookup(e)) return std::nullopt;
  return OptAddEffect{e, history_.of(e), self_};
}

std::optional<OptRmvEffect> OptRwset::prepare_rmv(ElementId e) const {
  if (!lookup(e)) return std::nullopt;
  return OptRmvEffect{e, history_.of(e).incremented(self_), self_};
}

void OptRwset::apply_remove(ElementId e, const CrhVector& crh) {
  if (history_.absorb(e, crh)) elements_.erase(e);
}

void OptRwset::apply(const OptAddEffect& eff) {
  apply_remove(eff.element, eff.crh);
  if (equals(eff.crh, history_.of(eff.element))) elements_.insert(eff.element);
}

void OptRwset::apply(const OptRmvEffect& eff) { apply_remove(eff.element, eff.crh); }

std::string OptRwset::fingerprint() const {
  std::ostringstream os;
  os << "E{";
  for (auto e : elements_) os << e << ';';
  os << "}T{";
  for (const auto& [e, t] : history_.entries()) os << e << ':' << t.to_string() << ';';
  os << '}';
  return os.str();
}

EffectMessage to_wire(const OptAddEffect& eff) {
  EffectMessage msg;
  msg.kind = OpKind::add;
  msg.element = eff.element;
  msg.initiator = eff.initiator;
  msg.crh = eff.crh;
  return msg;
}

EffectMessage to_wire(const OptRmvEffect& eff) {
  EffectMessage msg;
  msg.kind = OpKind::rmv;
  msg.element = eff.element;
  msg.initiator = eff.initiator;
  msg.crh = eff.crh;
  return msg;
}

OptAddEffect opt_add_from_wire(const EffectMessage& msg) {
  require_kind(msg, OpKind::add);
  return OptAddEffect{msg.element, require_crh(msg), msg.initiator};
}

OptRmvEffect opt_rmv_from_wire(const EffectMessage& msg) {
  require_kind(msg, OpKind::rmv);
  return OptRmvEffect{msg.element, require_crh(msg), msg.initiator};
}

}  // namespace rwcrdc
