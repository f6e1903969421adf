#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rwcrdc/metrics.hpp"
#include "rwcrdc/simnet.hpp"
#include "rwcrdc/workload.hpp"

namespace rwcrdc {

/// Operation count of the original evaluation; CSV headers record ops / this.
inline constexpr std::size_t kReferenceOps = 20000000;

/// One simulation run: one system, one parameter point, one seed.
struct TrialSpec {
  CrdcKind system = CrdcKind::rw_crpq;
  Pattern pattern = Pattern::inc_dominant;
  double rate = 10000.0;
  NormalDelay inter_dc{50.0, 10.0};
  NormalDelay intra_dc{10.0, 2.0};
  std::size_t dcs = 3;
  std::size_t replicas_per_dc = 3;
  std::size_t ops = 100000;
  std::uint64_t keys = 200000;
  double query_mix = 0.1;
  double conflict_probability = 0.15;
  DeliveryMode delivery = DeliveryMode::causal;
  std::size_t overhead_samples = 100;
  /// Replicas tried per update before giving up; 0 tries all of them. An op
  /// refused by every replica corrects the client view: an inc/rmv drops the
  /// key (the element is absent everywhere, since an initiator applies its own
  /// add at once), an add marks it live (present everywhere).
  std::size_t max_attempts = 0;
  std::uint64_t seed = 1;
  bool keep_trace = false;
};

struct TrialResult {
  TrialSpec spec;
  MetricsReport report;
  std::vector<OverheadPoint> overhead;
  WorkloadStats workload;
  std::size_t accepted = 0;
  std::size_t rejected_attempts = 0;
  std::size_t failed_updates = 0;  // rejected at every replica tried
  std::uint64_t messages = 0;
  std::uint64_t causal_inversions = 0;
  bool converged = false;
  std::vector<TimedOp> trace;  // ops as submitted, when keep_trace
};

/// Runs the workload against a fresh simulation, drains it and scores it.
/// Throws std::logic_error if the replicas fail to converge.
TrialResult run_trial(const TrialSpec& spec);

double mean_overhead(const std::vector<OverheadPoint>& series);

enum class SweepKnob { rate, inter_delay, replicas_per_dc, dcs, ops, query_mix };

std::string_view to_string(SweepKnob k);
std::optional<SweepKnob> parse_knob(std::string_view name);

struct SweepSpec {
  SweepKnob knob = SweepKnob::rate;
  std::vector<double> values;
};

/// Parses "knob=v1,v2,...". Throws std::invalid_argument.
SweepSpec parse_sweep(std::string_view text);

struct ExperimentConfig {
  std::vector<CrdcKind> systems{CrdcKind::rw_crpq, CrdcKind::aw_crpq};
  TrialSpec base;
  std::size_t trials = 1;
  std::optional<SweepSpec> sweep;
  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Applies one sweep value to a trial. The inter-delay knob sets the inter-DC
/// mean, keeps a 5:1 mean:stddev ratio and scales the intra-DC delay to one
/// fifth of the inter-DC one.
TrialSpec at_point(TrialSpec base, SweepKnob knob, double value);

struct PointSummary {
  std::string knob;
  double value = 0.0;
  CrdcKind system = CrdcKind::rw_crpq;
  std::size_t trials = 0;
  double mean_error = 0.0;
  double error_ratio = 0.0;
  double overhead_mean = 0.0;
  double overhead_final = 0.0;
  double tombstone_final = 0.0;
  double failed_updates = 0.0;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;  // point-major, then system, then trial
  std::vector<PointSummary> points;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes summary.csv, aggregate.csv and per-point detail CSVs (trial 0).
void write_experiment(const ExperimentConfig& config, const ExperimentResult& result,
                      const std::filesystem::path& dir);

}  // namespace rwcrdc
