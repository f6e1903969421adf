#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rwcrdc/replica.hpp"

namespace rwcrdc {

struct NormalDelay {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;

  friend bool operator==(const NormalDelay&, const NormalDelay&) = default;
};

/// Message delays: one normal distribution between data centers, one inside.
/// Samples are clamped below at kFloorMs, so every delay is positive.
struct DelayModel {
  static constexpr double kFloorMs = 0.1;

  NormalDelay inter_dc{50.0, 10.0};
  NormalDelay intra_dc{10.0, 2.0};
  std::vector<std::size_t> topology;  // replica id -> data center id

  static DelayModel grid(std::size_t dcs, std::size_t replicas_per_dc, NormalDelay inter, NormalDelay intra);

  double sample(ReplicaId from, ReplicaId to, std::mt19937_64& rng) const;
};

enum class DeliveryMode { causal, arbitrary };

struct SimConfig {
  std::size_t dcs = 3;
  std::size_t replicas_per_dc = 3;
  NormalDelay inter_dc{50.0, 10.0};
  NormalDelay intra_dc{10.0, 2.0};
  std::uint64_t seed = 1;
  CrdcKind crdc = CrdcKind::rw_crpq;
  DeliveryMode delivery = DeliveryMode::arbitrary;
  bool record_log = false;
};

struct Rejection {
  std::string reason;
};

/// Per-target delay overrides for one submission, in ms.
using DelayOverrides = std::map<ReplicaId, double>;

/// Pending delivery of a broadcast at one replica.
struct SimEvent {
  double delivery_ms = 0.0;
  std::uint64_t sequence = 0;
  ReplicaId target = 0;
  std::uint64_t message = 0;
};

struct LogEntry {
  enum class Kind : std::uint8_t { submit, reject, deliver, buffer, query };
  double at_ms = 0.0;
  Kind kind = Kind::submit;
  ReplicaId replica = 0;
  std::uint64_t message = 0;  // message id, or query index

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

/// Deterministic discrete-event network hosting n replicas of one CRDC.
///
/// The initiating replica applies its own effect inside submit(); every
/// other replica receives the broadcast after a sampled delay. In causal
/// mode each broadcast carries a vector timestamp and is buffered at the
/// receiver until all of its causal predecessors were applied there.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);

  std::size_t replica_count() const noexcept { return replicas_.size(); }
  double now() const noexcept { return now_; }
  const SimConfig& config() const noexcept { return config_; }
  const DelayModel& delays() const noexcept { return delays_; }

  /// Prepares `op` at `replica` after processing every event up to `at_ms`.
  /// On success the effect is applied locally and one delivery per remote
  /// replica is scheduled. A failed precondition is returned, nothing is sent.
  std::optional<Rejection> submit(ReplicaId replica, const ClientOp& op, double at_ms,
                                  const DelayOverrides& overrides = {});

  /// Runs the query against the replica state as of `at_ms`.
  QueryResult query(ReplicaId replica, const QueryOp& q, double at_ms);

  void run_until(double t_ms);
  /// Applies every outstanding delivery. Throws std::logic_error if a
  /// message stays buffered.
  void run_to_quiescence();

  bool quiescent() const noexcept;
  /// True iff every replica has the same payload.
  bool converged() const;

  const ReplicaHost& replica(ReplicaId id) const { return *replicas_.at(id); }
  std::vector<std::string> fingerprints() const;

  std::uint64_t messages_sent() const noexcept { return messages_.size(); }
  std::uint64_t deliveries() const noexcept { return deliveries_; }
  std::uint64_t rejections() const noexcept { return rejections_; }
  /// Deliveries applied before one of their causal predecessors (arbitrary
  /// mode only; always 0 in causal mode).
  std::uint64_t causal_inversions() const noexcept { return causal_inversions_; }
  std::size_t buffered() const noexcept;

  const std::vector<LogEntry>& log() const noexcept { return log_; }
  /// Text rendering of the log, one entry per line.
  std::string log_text() const;

 private:
  struct Message {
    ReplicaId origin = 0;
    std::uint64_t origin_seq = 0;
    std::vector<std::uint64_t> stamp;  // per-origin count of broadcasts applied at the sender
    std::vector<std::uint8_t> bytes;
    std::size_t pending = 0;  // deliveries not yet applied
  };

  struct EventOrder {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.delivery_ms != b.delivery_ms) return a.delivery_ms > b.delivery_ms;
      return a.sequence > b.sequence;
    }
  };

  void process(const SimEvent& ev);
  bool deliverable(ReplicaId target, const Message& m) const;
  void deliver(ReplicaId target, std::uint64_t id);
  void drain_buffer(ReplicaId target);
  void record(LogEntry::Kind kind, ReplicaId replica, std::uint64_t id);

  SimConfig config_;
  DelayModel delays_;
  std::mt19937_64 rng_;
  std::vector<std::unique_ptr<ReplicaHost>> replicas_;
  std::vector<std::vector<std::uint64_t>> applied_;  // [replica][origin] broadcasts applied, contiguous prefix
  std::vector<std::vector<std::set<std::uint64_t>>> ahead_;  // [replica][origin] applied past a gap
  std::vector<std::vector<std::map<std::uint64_t, std::uint64_t>>> buffer_;  // [replica][origin] seq -> message id
  std::vector<std::size_t> buffered_;  // per replica
  std::vector<Message> messages_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> events_;
  double now_ = 0.0;
  std::uint64_t sequence_ = 0;
  std::uint64_t deliveries_ = 0;
  std::uint64_t rejections_ = 0;
  std::uint64_t causal_inversions_ = 0;
  std::uint64_t queries_ = 0;
  std::vector<LogEntry> log_;
};

// ---------------------------------------------------------------------------
// Scripted schedules
// ---------------------------------------------------------------------------

class ScriptError : public std::runtime_error {
 public:
  ScriptError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ScriptStep {
  std::size_t line = 0;
  double at_ms = 0.0;
  ReplicaId replica = 0;
  bool is_query = false;
  ClientOp op;
  QueryOp query;
  DelayOverrides delays;
};

/// Parsed schedule. Format, one item per line, '#' starts a comment:
///
///   replicas <dcs> <per_dc>           optional topology directive
///   <time_ms> <replica> add <elem> [x]
///   <time_ms> <replica> inc <elem> <delta>      (alias: upd)
///   <time_ms> <replica> rmv <elem>
///   <time_ms> <replica> empty | lookup <elem> | get_pri <elem> | get_max
///   delay <from> <to> <ms>
///
/// A delay line overrides the delay of the message that the nearest
/// preceding update of replica <from> sends to <to>. Times must not
/// decrease. Decimal element tokens name themselves; any other token is
/// interned to an id at or above 2^63 in order of first use.
struct Script {
  std::optional<std::pair<std::size_t, std::size_t>> topology;
  std::vector<ScriptStep> steps;
  std::map<std::string, ElementId> names;

  ElementId id(const std::string& name) const;
};

Script parse_script(std::string_view text);

struct ScriptOutcome {
  std::vector<bool> accepted;                            // per update step, in order
  std::vector<std::pair<std::size_t, QueryResult>> queries;  // (script line, result)
};

/// Feeds every step into `sim`; does not run to quiescence.
ScriptOutcome run_script(Simulation& sim, const Script& script);

}  // namespace rwcrdc
