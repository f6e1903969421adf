#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rwcrdc/replica.hpp"

namespace rwcrdc {

/// One client-visible event, in the order the client logged it.
struct LogRecord {
  enum class Type : std::uint8_t { update, probe };

  Type type = Type::update;
  std::size_t index = 0;  // position in the log
  double at_ms = 0.0;
  ReplicaId replica = 0;
  // update
  ClientOp op;
  bool accepted = false;
  // probe: nullopt when the replica rejected get_max (it saw an empty queue)
  std::optional<MaxEntry> returned;
};

class ClientLog {
 public:
  void log_update(double at_ms, ReplicaId replica, const ClientOp& op, bool accepted);
  void log_probe(double at_ms, ReplicaId replica, std::optional<MaxEntry> returned);

  const std::vector<LogRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<LogRecord> records_;
};

/// True max at one probe; nullopt when the sequential queue is empty.
struct ProbeTruth {
  std::size_t log_index = 0;
  std::optional<MaxEntry> truth;
};

/// Folds the accepted updates into a sequential priority queue in log order
/// and records the true maximum at every probe.
///
/// Sequential rules: add of an absent element inserts it with innate x and
/// acquired 0; add of a present element replaces the innate part and keeps
/// the acquired part; inc adds to a present element; rmv deletes. An inc or
/// rmv of an absent element, possible after replica lag, changes nothing.
/// Throws std::invalid_argument on a malformed log (indices out of order).
std::vector<ProbeTruth> replay_oracle(const ClientLog& log);

struct ProbeScore {
  std::size_t probe_index = 0;
  ReplicaId replica = 0;
  Priority returned = 0;
  Priority truth = 0;
  Priority abs_err = 0;
};

struct MetricsReport {
  double mean_error = 0.0;   // x-bar
  double error_ratio = 0.0;  // f
  std::size_t probes = 0;    // scored probes
  std::size_t excluded_empty_truth = 0;
  std::size_t excluded_rejected = 0;
  bool empty = true;         // no scored probe
  std::vector<ProbeScore> detail;
};

/// x-bar is the mean |returned - true| over scored probes; f is the fraction
/// whose returned priority differs from the truth (ids are not compared).
/// Probes with an empty truth or a rejected get_max are counted, not scored.
MetricsReport score(const ClientLog& log, const std::vector<ProbeTruth>& truth);

struct OverheadPoint {
  double t_ms = 0.0;
  double per_element = 0.0;
  std::size_t units = 0;
  std::size_t elements = 0;
  std::size_t tombstone_units = 0;
  bool empty = false;  // no element present; per_element reported as 0
};

/// Meta-data units over every replica divided by present elements over every replica.
OverheadPoint measure_overhead(const std::vector<MetadataSample>& samples, double t_ms);

void write_probe_csv(std::ostream& os, const std::vector<ProbeScore>& detail);
void write_overhead_csv(std::ostream& os, const std::string& system, const std::vector<OverheadPoint>& series);

}  // namespace rwcrdc
