#include "rwcrdc/addwin.hpp"

#include <sstream>

namespace rwcrdc {

namespace {

const std::map<UniqueTag, AddWinPq::Instance> kNoInstances;

}  // namespace

std::optional<AwAddEffect> AddWinPq::prepare_add(ElementId e, Priority x) {
  if (lookup(e)) return std::nullopt;
  return AwAddEffect{e, x, UniqueTag{self_, next_seq_++}};
}

std::optional<AwIncEffect> AddWinPq::prepare_inc(ElementId e, Priority delta) const {
  if (!lookup(e)) return std::nullopt;
  return AwIncEffect{e, delta, observed(e), self_};
}

std::optional<AwRmvEffect> AddWinPq::prepare_rmv(ElementId e) const {
  if (!lookup(e)) return std::nullopt;
  return AwRmvEffect{e, observed(e), self_};
}

std::vector<UniqueTag> AddWinPq::observed(ElementId e) const {
  std::vector<UniqueTag> out;
  for (const auto& [tag, inst] : instances(e)) out.push_back(tag);
  return out;
}

void AddWinPq::apply(const AwAddEffect& eff) {
  if (is_cancelled(eff.element, eff.tag)) return;
  auto& tags = live_[eff.element];
  if (tags.contains(eff.tag)) return;
  Priority acquired = 0;
  if (auto early = early_increments_.extract(eff.tag)) acquired = early.mapped();
  tags.emplace(eff.tag, Instance{eff.value, acquired});
}

void AddWinPq::apply(const AwIncEffect& eff) {
  auto live = live_.find(eff.element);
  for (const auto& tag : eff.observed) {
    if (is_cancelled(eff.element, tag)) continue;
    if (live != live_.end()) {
      if (auto it = live->second.find(tag); it != live->second.end()) {
        it->second.acquired = checked_add(it->second.acquired, eff.amount);
        continue;
      }
    }
    auto& early = early_increments_[tag];
    early = checked_add(early, eff.amount);
  }
}

void AddWinPq::apply(const AwRmvEffect& eff) {
  auto& dead = cancelled_[eff.element];
  auto live = live_.find(eff.element);
  for (const auto& tag : eff.observed) {
    dead.insert(tag);
    early_increments_.erase(tag);
    if (live != live_.end()) live->second.erase(tag);
  }
  if (live != live_.end() && live->second.empty()) live_.erase(live);
}

void AddWinPq::apply_message(const EffectMessage& msg) {
  switch (msg.kind) {
    case OpKind::add:
      if (msg.tags.size() != 1) throw WireFormatError("add-win add carries exactly one tag");
      apply(AwAddEffect{msg.element, decode_i64(msg.value), msg.tags.front()});
      return;
    case OpKind::upd:
      apply(AwIncEffect{msg.element, decode_i64(msg.value), msg.tags, msg.initiator});
      return;
    case OpKind::rmv:
      apply(AwRmvEffect{msg.element, msg.tags, msg.initiator});
      return;
  }
}

std::optional<Priority> AddWinPq::get_pri(ElementId e) const {
  auto it = live_.find(e);
  if (it == live_.end()) return std::nullopt;
  const auto& winner = it->second.rbegin()->second;
  return checked_add(winner.innate, winner.acquired);
}

std::optional<MaxEntry> AddWinPq::get_max() const {
  std::optional<MaxEntry> best;
  for (const auto& [e, tags] : live_) {
    const auto& winner = tags.rbegin()->second;
    const Priority p = checked_add(winner.innate, winner.acquired);
    if (!best || p > best->priority) best = MaxEntry{e, p};
  }
  return best;
}

const std::map<UniqueTag, AddWinPq::Instance>& AddWinPq::instances(ElementId e) const {
  auto it = live_.find(e);
  return it == live_.end() ? kNoInstances : it->second;
}

bool AddWinPq::is_cancelled(ElementId e, const UniqueTag& tag) const {
  auto it = cancelled_.find(e);
  return it != cancelled_.end() && it->second.contains(tag);
}

std::size_t AddWinPq::live_tag_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [e, tags] : live_) n += tags.size();
  return n;
}

std::size_t AddWinPq::cancelled_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [e, tags] : cancelled_) n += tags.size();
  return n;
}

std::string AddWinPq::fingerprint() const {
  std::ostringstream os;
  os << "A{";
  for (const auto& [e, tags] : live_) {
    os << e << ':';
    for (const auto& [t, inst] : tags) os << t.replica << '.' << t.seq << '=' << inst.innate << '+' << inst.acquired << ',';
    os << ';';
  }
  os << "}X{";
  for (const auto& [e, tags] : cancelled_) {
    os << e << ':';
    for (const auto& t : tags) os << t.replica << '.' << t.seq << ',';
    os << ';';
  }
  os << "}P{";
  for (const auto& [t, amount] : early_increments_) os << t.replica << '.' << t.seq << '=' << amount << ';';
  os << '}';
  return os.str();
}

EffectMessage to_wire(const AwAddEffect& eff) {
  return EffectMessage{OpKind::add, eff.element, eff.tag.replica, std::nullopt, {eff.tag}, encode_i64(eff.value)};
}

EffectMessage to_wire(const AwRmvEffect& eff) {
  return EffectMessage{OpKind::rmv, eff.element, eff.initiator, std::nullopt, eff.observed, {}};
}

EffectMessage to_wire(const AwIncEffect& eff) {
  return EffectMessage{OpKind::upd, eff.element, eff.initiator, std::nullopt, eff.observed, encode_i64(eff.amount)};
}

}  // namespace rwcrdc
