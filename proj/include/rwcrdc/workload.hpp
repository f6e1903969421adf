#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rwcrdc/replica.hpp"

namespace rwcrdc {

enum class Pattern { inc_dominant, add_rmv_dominant };

std::string_view to_string(Pattern p);
std::optional<Pattern> parse_pattern(std::string_view name);

/// Operation mix as fractions of update draws.
struct OpMix {
  double add = 0.0;
  double rmv = 0.0;
  double inc = 0.0;
};

OpMix mix_of(Pattern p);

struct WorkloadConfig {
  Pattern pattern = Pattern::inc_dominant;
  std::size_t total_ops = 100000;   // updates, probes not counted
  double rate = 10000.0;            // updates per simulated second
  std::uint64_t key_space = 200000;
  Priority init_lo = 0;
  Priority init_hi = 100;
  Priority inc_lo = -50;
  Priority inc_hi = 50;
  double conflict_window_ms = 10.0;  // mu; the mean intra-DC delay
  double conflict_probability = 0.15;
  double query_mix = 0.1;            // get_max probes per update
  std::size_t replicas = 9;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on an inconsistent config.
  void validate() const;
};

/// Keys the client log believes present. O(1) insert, erase and uniform pick.
class LiveView {
 public:
  bool contains(ElementId e) const { return pos_.contains(e); }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }
  void insert(ElementId e);
  void erase(ElementId e);
  ElementId pick(std::mt19937_64& rng) const;
  const std::vector<ElementId>& keys() const noexcept { return keys_; }

 private:
  std::vector<ElementId> keys_;
  std::unordered_map<ElementId, std::size_t> pos_;
};

struct TimedOp {
  double at_ms = 0.0;
  ReplicaId replica = 0;
  bool is_probe = false;
  ClientOp op;           // updates
  OpKind drawn = OpKind::add;  // type drawn from the mix, before any substitution
  bool substituted = false;
  bool paired = false;   // add re-targeted onto a recent add/rmv key
};

struct WorkloadStats {
  std::size_t updates = 0;
  std::size_t probes = 0;
  std::size_t drawn_add = 0;
  std::size_t drawn_rmv = 0;
  std::size_t drawn_inc = 0;
  std::size_t pair_candidates = 0;  // adds with at least one add/rmv inside the window
  std::size_t paired = 0;
  std::size_t paired_onto_add = 0;
  std::size_t substituted_to_add = 0;     // inc/rmv drawn with an empty view
  std::size_t substituted_from_add = 0;   // add drawn with every key live
};

/// Open-loop generator of the client stream. Updates arrive as a Poisson
/// process of the configured rate; get_max probes as an independent Poisson
/// process of rate query_mix * rate. The caller keeps the live view in sync
/// with acknowledged ops.
class WorkloadGenerator {
 public:
  explicit WorkloadGenerator(const WorkloadConfig& config);

  /// Next op, or nullopt once total_ops updates were emitted.
  std::optional<TimedOp> next(const LiveView& view);

  const WorkloadStats& stats() const noexcept { return stats_; }
  const WorkloadConfig& config() const noexcept { return config_; }

 private:
  struct Recent {
    double at_ms;
    ElementId key;
    OpKind kind;
    ReplicaId replica;
  };

  OpKind draw_kind();
  std::optional<ElementId> unused_key(const LiveView& view);
  ReplicaId pick_replica_except(ReplicaId avoid);
  TimedOp make_update(const LiveView& view);

  WorkloadConfig config_;
  std::mt19937_64 rng_;
  double next_update_ms_ = 0.0;
  double next_probe_ms_ = 0.0;
  std::deque<Recent> recent_;
  WorkloadStats stats_;
};

/// Renders ops in the scripted-schedule format accepted by parse_script.
std::string to_script(const std::vector<TimedOp>& ops, std::size_t dcs, std::size_t replicas_per_dc);

}  // namespace rwcrdc
