#include "rwcrdc/workload.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rwcrdc {

std::string_view to_string(Pattern p) {
  return p == Pattern::inc_dominant ? "inc_dominant" : "add_rmv_dominant";
}

std::optional<Pattern> parse_pattern(std::string_view name) {
  if (name == "inc_dominant" || name == "inc") return Pattern::inc_dominant;
  if (name == "add_rmv_dominant" || name == "add_rmv") return Pattern::add_rmv_dominant;
  return std::nullopt;
}

OpMix mix_of(Pattern p) {
  if (p == Pattern::inc_dominant) return OpMix{0.11, 0.09, 0.80};
  return OpMix{0.41, 0.39, 0.20};
}

void WorkloadConfig::validate() const {
  if (rate <= 0 || !std::isfinite(rate)) throw std::invalid_argument("rate must be positive");
  if (key_space == 0) throw std::invalid_argument("key space must be non-empty");
  if (init_lo > init_hi) throw std::invalid_argument("initial value range is empty");
  if (inc_lo > inc_hi) throw std::invalid_argument("increment range is empty");
  if (conflict_window_ms < 0) throw std::invalid_argument("conflict window must be non-negative");
  if (conflict_probability < 0 || conflict_probability > 1) throw std::invalid_argument("conflict probability outside [0,1]");
  if (query_mix < 0 || !std::isfinite(query_mix)) throw std::invalid_argument("query mix must be non-negative");
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
}

void LiveView::insert(ElementId e) {
  if (pos_.try_emplace(e, keys_.size()).second) keys_.push_back(e);
}

void LiveView::erase(ElementId e) {
  auto it = pos_.find(e);
  if (it == pos_.end()) return;
  const std::size_t i = it->second;
  pos_.erase(it);
  if (i + 1 != keys_.size()) {
    keys_[i] = keys_.back();
    pos_[keys_[i]] = i;
  }
  keys_.pop_back();
}

ElementId LiveView::pick(std::mt19937_64& rng) const {
  if (keys_.empty()) throw std::logic_error("pick from an empty view");
  return keys_[std::uniform_int_distribution<std::size_t>(0, keys_.size() - 1)(rng)];
}

WorkloadGenerator::WorkloadGenerator(const WorkloadConfig& config) : config_(config), rng_(config.seed) {
  config_.validate();
  next_update_ms_ = std::exponential_distribution<double>(config_.rate / 1000.0)(rng_);
  next_probe_ms_ = config_.query_mix > 0
                       ? std::exponential_distribution<double>(config_.query_mix * config_.rate / 1000.0)(rng_)
                       : INFINITY;
}

OpKind WorkloadGenerator::draw_kind() {
  const OpMix m = mix_of(config_.pattern);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  if (u < m.add) return OpKind::add;
  if (u < m.add + m.rmv) return OpKind::rmv;
  return OpKind::upd;
}

std::optional<ElementId> WorkloadGenerator::unused_key(const LiveView& view) {
  std::uniform_int_distribution<std::uint64_t> key(0, config_.key_space - 1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const ElementId e = key(rng_);
    if (!view.contains(e)) return e;
  }
  if (view.size() >= config_.key_space) return std::nullopt;
  const ElementId start = key(rng_);
  for (std::uint64_t i = 0; i < config_.key_space; ++i) {
    const ElementId e = (start + i) % config_.key_space;
    if (!view.contains(e)) return e;
  }
  return std::nullopt;
}

ReplicaId WorkloadGenerator::pick_replica_except(ReplicaId avoid) {
  if (config_.replicas == 1) return 0;
  auto r = static_cast<ReplicaId>(std::uniform_int_distribution<std::size_t>(0, config_.replicas - 2)(rng_));
  return r >= avoid ? static_cast<ReplicaId>(r + 1) : r;
}

TimedOp WorkloadGenerator::make_update(const LiveView& view) {
  TimedOp out;
  out.at_ms = next_update_ms_;
  out.replica = static_cast<ReplicaId>(std::uniform_int_distribution<std::size_t>(0, config_.replicas - 1)(rng_));
  out.drawn = draw_kind();
  switch (out.drawn) {
    case OpKind::add: ++stats_.drawn_add; break;
    case OpKind::rmv: ++stats_.drawn_rmv; break;
    case OpKind::upd: ++stats_.drawn_inc; break;
  }

  OpKind kind = out.drawn;
  if (kind != OpKind::add && view.empty()) {
    kind = OpKind::add;
    out.substituted = true;
    ++stats_.substituted_to_add;
  }

  while (!recent_.empty() && recent_.front().at_ms < out.at_ms - config_.conflict_window_ms) recent_.pop_front();

  if (kind == OpKind::add) {
    std::optional<ElementId> key;
    if (!recent_.empty()) {
      ++stats_.pair_candidates;
      if (std::bernoulli_distribution(config_.conflict_probability)(rng_)) {
        const auto& partner = recent_[std::uniform_int_distribution<std::size_t>(0, recent_.size() - 1)(rng_)];
        key = partner.key;
        out.replica = pick_replica_except(partner.replica);
        out.paired = true;
        ++stats_.paired;
        if (partner.kind == OpKind::add) ++stats_.paired_onto_add;
      }
    }
    if (!key) key = unused_key(view);
    if (key) {
      const Priority x = std::uniform_int_distribution<Priority>(config_.init_lo, config_.init_hi)(rng_);
      out.op = ClientOp{OpKind::add, *key, x};
    } else {
      // Every key is live: remove one instead.
      kind = OpKind::rmv;
      out.substituted = true;
      ++stats_.substituted_from_add;
    }
  }
  if (kind == OpKind::rmv) {
    out.op = ClientOp{OpKind::rmv, view.pick(rng_), 0};
  } else if (kind == OpKind::upd) {
    const ElementId e = view.pick(rng_);
    out.op = ClientOp{OpKind::upd, e, std::uniform_int_distribution<Priority>(config_.inc_lo, config_.inc_hi)(rng_)};
  }
  if (out.op.kind != OpKind::upd) recent_.push_back(Recent{out.at_ms, out.op.element, out.op.kind, out.replica});

  ++stats_.updates;
  next_update_ms_ += std::exponential_distribution<double>(config_.rate / 1000.0)(rng_);
  return out;
}

std::optional<TimedOp> WorkloadGenerator::next(const LiveView& view) {
  if (stats_.updates >= config_.total_ops) return std::nullopt;
  if (next_probe_ms_ < next_update_ms_) {
    TimedOp probe;
    probe.at_ms = next_probe_ms_;
    probe.is_probe = true;
    probe.replica = static_cast<ReplicaId>(std::uniform_int_distribution<std::size_t>(0, config_.replicas - 1)(rng_));
    ++stats_.probes;
    next_probe_ms_ += std::exponential_distribution<double>(config_.query_mix * config_.rate / 1000.0)(rng_);
    return probe;
  }
  return make_update(view);
}

std::string to_script(const std::vector<TimedOp>& ops, std::size_t dcs, std::size_t replicas_per_dc) {
  std::ostringstream os;
  os.precision(17);
  os << "replicas " << dcs << ' ' << replicas_per_dc << '\n';
  for (const auto& t : ops) {
    os << t.at_ms << ' ' << t.replica << ' ';
    if (t.is_probe) {
      os << "get_max\n";
      continue;
    }
    switch (t.op.kind) {
      case OpKind::add: os << "add " << t.op.element << ' ' << t.op.value << '\n'; break;
      case OpKind::rmv: os << "rmv " << t.op.element << '\n'; break;
      case OpKind::upd: os << "inc " << t.op.element << ' ' << t.op.value << '\n'; break;
    }
  }
  return os.str();
}

}  // namespace rwcrdc
