#include "rwcrdc/simnet.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rwcrdc {

DelayModel DelayModel::grid(std::size_t dcs, std::size_t replicas_per_dc, NormalDelay inter, NormalDelay intra) {
  if (dcs == 0 || replicas_per_dc == 0) throw std::invalid_argument("replica counts must be at least 1");
  if (dcs * replicas_per_dc > std::numeric_limits<ReplicaId>::max()) throw std::invalid_argument("too many replicas");
  if (inter.stddev_ms < 0 || intra.stddev_ms < 0) throw std::invalid_argument("negative delay stddev");
  DelayModel m;
  m.inter_dc = inter;
  m.intra_dc = intra;
  for (std::size_t dc = 0; dc < dcs; ++dc) {
    for (std::size_t k = 0; k < replicas_per_dc; ++k) m.topology.push_back(dc);
  }
  return m;
}

double DelayModel::sample(ReplicaId from, ReplicaId to, std::mt19937_64& rng) const {
  const NormalDelay& d = topology.at(from) == topology.at(to) ? intra_dc : inter_dc;
  double v = d.mean_ms;
  if (d.stddev_ms > 0) v = std::normal_distribution<double>(d.mean_ms, d.stddev_ms)(rng);
  return std::max(v, kFloorMs);
}

Simulation::Simulation(const SimConfig& config)
    : config_(config),
      delays_(DelayModel::grid(config.dcs, config.replicas_per_dc, config.inter_dc, config.intra_dc)),
      rng_(config.seed) {
  const std::size_t n = delays_.topology.size();
  for (std::size_t i = 0; i < n; ++i) replicas_.push_back(make_replica(config.crdc, static_cast<ReplicaId>(i), n));
  applied_.assign(n, std::vector<std::uint64_t>(n, 0));
  ahead_.assign(n, std::vector<std::set<std::uint64_t>>(n));
  buffer_.assign(n, std::vector<std::map<std::uint64_t, std::uint64_t>>(n));
  buffered_.assign(n, 0);
}

void Simulation::record(LogEntry::Kind kind, ReplicaId replica, std::uint64_t id) {
  if (config_.record_log) log_.push_back(LogEntry{now_, kind, replica, id});
}

std::optional<Rejection> Simulation::submit(ReplicaId replica, const ClientOp& op, double at_ms,
                                            const DelayOverrides& overrides) {
  if (replica >= replicas_.size()) throw std::out_of_range("no such replica");
  run_until(at_ms);
  auto msg = replicas_[replica]->prepare(op);
  if (!msg) {
    ++rejections_;
    record(LogEntry::Kind::reject, replica, messages_.size());
    return Rejection{std::string("precondition failed: ") + to_string(op.kind) + " " + std::to_string(op.element)};
  }

  const std::uint64_t id = messages_.size();
  record(LogEntry::Kind::submit, replica, id);
  replicas_[replica]->apply(*msg);
  ++applied_[replica][replica];

  Message m;
  m.origin = replica;
  m.origin_seq = applied_[replica][replica];
  m.stamp = applied_[replica];
  m.bytes = encode(*msg);
  m.pending = replicas_.size() - 1;
  if (m.pending == 0) m.bytes.clear();
  messages_.push_back(std::move(m));

  for (std::size_t t = 0; t < replicas_.size(); ++t) {
    if (t == replica) continue;
    const auto target = static_cast<ReplicaId>(t);
    const auto it = overrides.find(target);
    const double delay = it != overrides.end() ? std::max(it->second, DelayModel::kFloorMs)
                                               : delays_.sample(replica, target, rng_);
    events_.push(SimEvent{now_ + delay, sequence_++, target, id});
  }
  return std::nullopt;
}

QueryResult Simulation::query(ReplicaId replica, const QueryOp& q, double at_ms) {
  if (replica >= replicas_.size()) throw std::out_of_range("no such replica");
  run_until(at_ms);
  record(LogEntry::Kind::query, replica, queries_++);
  return replicas_[replica]->query(q);
}

void Simulation::run_until(double t_ms) {
  if (t_ms < now_) throw std::invalid_argument("simulated time cannot go backwards");
  while (!events_.empty() && events_.top().delivery_ms <= t_ms) {
    const SimEvent ev = events_.top();
    events_.pop();
    now_ = ev.delivery_ms;
    process(ev);
  }
  now_ = t_ms;
}

void Simulation::run_to_quiescence() {
  while (!events_.empty()) {
    const SimEvent ev = events_.top();
    events_.pop();
    now_ = ev.delivery_ms;
    process(ev);
  }
  if (buffered() != 0) throw std::logic_error("messages buffered forever: causal predecessor never arrived");
}

bool Simulation::quiescent() const noexcept { return events_.empty() && buffered() == 0; }

std::size_t Simulation::buffered() const noexcept {
  std::size_t n = 0;
  for (std::size_t b : buffered_) n += b;
  return n;
}

bool Simulation::deliverable(ReplicaId target, const Message& m) const {
  const auto& have = applied_[target];
  for (std::size_t k = 0; k < have.size(); ++k) {
    if (k == m.origin) {
      if (have[k] + 1 != m.stamp[k]) return false;
    } else if (have[k] < m.stamp[k]) {
      return false;
    }
  }
  return true;
}

void Simulation::process(const SimEvent& ev) {
  const Message& m = messages_[ev.message];
  if (config_.delivery == DeliveryMode::causal) {
    if (!deliverable(ev.target, m)) {
      buffer_[ev.target][m.origin].emplace(m.origin_seq, ev.message);
      ++buffered_[ev.target];
      record(LogEntry::Kind::buffer, ev.target, ev.message);
      return;
    }
    deliver(ev.target, ev.message);
    drain_buffer(ev.target);
    return;
  }
  if (!deliverable(ev.target, m)) ++causal_inversions_;
  deliver(ev.target, ev.message);
}

void Simulation::deliver(ReplicaId target, std::uint64_t id) {
  Message& m = messages_[id];
  replicas_[target]->apply(decode(m.bytes));
  // applied_ holds the contiguous prefix per origin; out-of-order arrivals
  // (arbitrary mode) wait in ahead_ until the gap closes.
  auto& prefix = applied_[target][m.origin];
  auto& ahead = ahead_[target][m.origin];
  if (m.origin_seq == prefix + 1) {
    ++prefix;
    while (!ahead.empty() && *ahead.begin() == prefix + 1) {
      ahead.erase(ahead.begin());
      ++prefix;
    }
  } else {
    ahead.insert(m.origin_seq);
  }
  ++deliveries_;
  record(LogEntry::Kind::deliver, target, id);
  if (--m.pending == 0) {
    m.bytes.clear();
    m.bytes.shrink_to_fit();
  }
}

void Simulation::drain_buffer(ReplicaId target) {
  // Only the next sequence number of each origin can become deliverable.
  auto& queues = buffer_[target];
  bool progress = buffered_[target] != 0;
  while (progress) {
    progress = false;
    for (std::size_t origin = 0; origin < queues.size(); ++origin) {
      auto& q = queues[origin];
      while (!q.empty() && q.begin()->first == applied_[target][origin] + 1 &&
             deliverable(target, messages_[q.begin()->second])) {
        const std::uint64_t id = q.begin()->second;
        q.erase(q.begin());
        --buffered_[target];
        deliver(target, id);
        progress = true;
      }
    }
  }
}

bool Simulation::converged() const {
  for (std::size_t i = 1; i < replicas_.size(); ++i) {
    if (replicas_[i]->fingerprint() != replicas_[0]->fingerprint()) return false;
  }
  return true;
}

std::vector<std::string> Simulation::fingerprints() const {
  std::vector<std::string> out;
  for (const auto& r : replicas_) out.push_back(r->fingerprint());
  return out;
}

std::string Simulation::log_text() const {
  static constexpr const char* kNames[] = {"submit", "reject", "deliver", "buffer", "query"};
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  for (const auto& e : log_) {
    os << e.at_ms << ' ' << kNames[static_cast<int>(e.kind)] << ' ' << e.replica << ' ' << e.message << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

constexpr ElementId kNamedBase = ElementId{1} << 63;

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

template <class T>
T parse_number(const std::string& tok, std::size_t line, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) throw ScriptError(line, std::string("bad ") + what + " '" + tok + "'");
  return v;
}

double parse_time(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || v < 0) throw ScriptError(line, "bad time '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ScriptError(line, "bad time '" + tok + "'");
  }
}

bool is_decimal(const std::string& tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

ElementId Script::id(const std::string& name) const {
  if (is_decimal(name)) return std::stoull(name);
  return names.at(name);
}

Script parse_script(std::string_view text) {
  Script s;
  std::size_t line_no = 0;
  double last_time = 0.0;
  std::map<ReplicaId, std::size_t> last_update;  // replica -> index in s.steps

  auto element = [&](const std::string& tok) -> ElementId {
    if (is_decimal(tok)) return parse_number<ElementId>(tok, line_no, "element");
    auto [it, fresh] = s.names.try_emplace(tok, kNamedBase + s.names.size());
    return it->second;
  };
  auto arity = [&](const std::vector<std::string>& t, std::size_t lo, std::size_t hi) {
    if (t.size() < lo || t.size() > hi) throw ScriptError(line_no, "wrong number of arguments for '" + t[2] + "'");
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split(line);
    if (tok.empty()) continue;

    if (tok[0] == "replicas") {
      if (tok.size() != 3) throw ScriptError(line_no, "usage: replicas <dcs> <per_dc>");
      if (!s.steps.empty()) throw ScriptError(line_no, "replicas must precede the first step");
      s.topology = std::pair{parse_number<std::size_t>(tok[1], line_no, "count"),
                             parse_number<std::size_t>(tok[2], line_no, "count")};
      continue;
    }
    if (tok[0] == "delay") {
      if (tok.size() != 4) throw ScriptError(line_no, "usage: delay <from> <to> <ms>");
      const auto from = parse_number<ReplicaId>(tok[1], line_no, "replica");
      const auto to = parse_number<ReplicaId>(tok[2], line_no, "replica");
      const double ms = parse_time(tok[3], line_no);
      auto it = last_update.find(from);
      if (it == last_update.end()) throw ScriptError(line_no, "no earlier update from replica " + tok[1]);
      s.steps[it->second].delays[to] = ms;
      continue;
    }
    if (tok.size() < 3) throw ScriptError(line_no, "expected '<time> <replica> <op> ...'");

    ScriptStep step;
    step.line = line_no;
    step.at_ms = parse_time(tok[0], line_no);
    step.replica = parse_number<ReplicaId>(tok[1], line_no, "replica");
    if (step.at_ms < last_time) throw ScriptError(line_no, "time goes backwards");
    last_time = step.at_ms;

    const std::string& op = tok[2];
    if (op == "add") {
      arity(tok, 4, 5);
      step.op = ClientOp{OpKind::add, element(tok[3]), tok.size() == 5 ? parse_number<Priority>(tok[4], line_no, "value") : 0};
    } else if (op == "inc" || op == "upd") {
      arity(tok, 5, 5);
      step.op = ClientOp{OpKind::upd, element(tok[3]), parse_number<Priority>(tok[4], line_no, "value")};
    } else if (op == "rmv") {
      arity(tok, 4, 4);
      step.op = ClientOp{OpKind::rmv, element(tok[3]), 0};
    } else if (op == "empty" || op == "get_max") {
      arity(tok, 3, 3);
      step.is_query = true;
      step.query = QueryOp{op == "empty" ? QueryKind::empty : QueryKind::get_max, 0};
    } else if (op == "lookup" || op == "get_pri") {
      arity(tok, 4, 4);
      step.is_query = true;
      step.query = QueryOp{op == "lookup" ? QueryKind::lookup : QueryKind::get_pri, element(tok[3])};
    } else {
      throw ScriptError(line_no, "unknown op '" + op + "'");
    }
    if (!step.is_query) last_update[step.replica] = s.steps.size();
    s.steps.push_back(std::move(step));
  }
  return s;
}

ScriptOutcome run_script(Simulation& sim, const Script& script) {
  ScriptOutcome out;
  for (const auto& step : script.steps) {
    if (step.replica >= sim.replica_count()) throw ScriptError(step.line, "no such replica");
    if (step.is_query) {
      out.queries.emplace_back(step.line, sim.query(step.replica, step.query, step.at_ms));
    } else {
      out.accepted.push_back(!sim.submit(step.replica, step.op, step.at_ms, step.delays));
    }
  }
  return out;
}

}  // namespace rwcrdc
