#include "rwcrdc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rwcrdc {

TrialResult run_trial(const TrialSpec& spec) {
  TrialResult res;
  res.spec = spec;

  SimConfig sc;
  sc.dcs = spec.dcs;
  sc.replicas_per_dc = spec.replicas_per_dc;
  sc.inter_dc = spec.inter_dc;
  sc.intra_dc = spec.intra_dc;
  sc.seed = spec.seed ^ 0x9E3779B97F4A7C15ULL;
  sc.crdc = spec.system;
  sc.delivery = spec.delivery;
  Simulation sim(sc);
  const std::size_t n = sim.replica_count();

  WorkloadConfig wc;
  wc.pattern = spec.pattern;
  wc.total_ops = spec.ops;
  wc.rate = spec.rate;
  wc.key_space = spec.keys;
  wc.conflict_window_ms = spec.intra_dc.mean_ms;
  wc.conflict_probability = spec.conflict_probability;
  wc.query_mix = spec.query_mix;
  wc.replicas = n;
  wc.seed = spec.seed;
  WorkloadGenerator gen(wc);

  const double horizon_ms = static_cast<double>(spec.ops) * 1000.0 / spec.rate;
  const double sample_every = spec.overhead_samples ? horizon_ms / static_cast<double>(spec.overhead_samples) : 0.0;
  std::size_t taken = 0;
  auto next_sample = [&] { return sample_every * static_cast<double>(taken + 1); };

  auto sample = [&](double t) {
    std::vector<MetadataSample> s;
    s.reserve(n);
    for (std::size_t r = 0; r < n; ++r) s.push_back(sim.replica(static_cast<ReplicaId>(r)).metadata());
    res.overhead.push_back(measure_overhead(s, t));
  };

  ClientLog log;
  LiveView view;
  while (auto op = gen.next(view)) {
    while (taken < spec.overhead_samples && next_sample() <= op->at_ms) {
      sim.run_until(next_sample());
      sample(next_sample());
      ++taken;
    }
    if (op->is_probe) {
      const QueryResult q = sim.query(op->replica, QueryOp{QueryKind::get_max, 0}, op->at_ms);
      log.log_probe(op->at_ms, op->replica, q.accepted ? q.entry : std::nullopt);
      if (spec.keep_trace) res.trace.push_back(*op);
      continue;
    }

    // A replica that lags behind the client view rejects; try the next ones.
    ReplicaId target = op->replica;
    bool accepted = false;
    const std::size_t attempts = spec.max_attempts ? std::min(spec.max_attempts, n) : n;
    for (std::size_t a = 0; a < attempts; ++a) {
      target = static_cast<ReplicaId>((op->replica + a) % n);
      if (!sim.submit(target, op->op, op->at_ms)) {
        accepted = true;
        break;
      }
      ++res.rejected_attempts;
    }
    log.log_update(op->at_ms, target, op->op, accepted);
    if (spec.keep_trace) {
      TimedOp t = *op;
      t.replica = target;
      res.trace.push_back(t);
    }
    if (accepted) {
      ++res.accepted;
      if (op->op.kind == OpKind::add) view.insert(op->op.element);
      if (op->op.kind == OpKind::rmv) view.erase(op->op.element);
    } else {
      ++res.failed_updates;
      // Refused everywhere: every replica agrees on presence, so the view follows.
      if (attempts == n) {
        if (op->op.kind == OpKind::add) {
          view.insert(op->op.element);
        } else {
          view.erase(op->op.element);
        }
      }
    }
  }
  for (; taken < spec.overhead_samples; ++taken) {
    sim.run_until(std::max(next_sample(), sim.now()));
    sample(sim.now());
  }

  sim.run_to_quiescence();
  res.converged = sim.converged();
  if (!res.converged) throw std::logic_error("replicas diverged after quiescence (seed " + std::to_string(spec.seed) + ")");
  res.messages = sim.messages_sent();
  res.causal_inversions = sim.causal_inversions();
  res.workload = gen.stats();
  res.report = score(log, replay_oracle(log));
  return res;
}

double mean_overhead(const std::vector<OverheadPoint>& series) {
  double sum = 0.0;
  std::size_t k = 0;
  for (const auto& p : series) {
    if (p.empty) continue;
    sum += p.per_element;
    ++k;
  }
  return k ? sum / static_cast<double>(k) : 0.0;
}

std::string_view to_string(SweepKnob k) {
  switch (k) {
    case SweepKnob::rate: return "rate";
    case SweepKnob::inter_delay: return "inter_delay";
    case SweepKnob::replicas_per_dc: return "replicas_per_dc";
    case SweepKnob::dcs: return "dcs";
    case SweepKnob::ops: return "ops";
    case SweepKnob::query_mix: return "query_mix";
  }
  return "?";
}

std::optional<SweepKnob> parse_knob(std::string_view name) {
  for (SweepKnob k : {SweepKnob::rate, SweepKnob::inter_delay, SweepKnob::replicas_per_dc, SweepKnob::dcs,
                      SweepKnob::ops, SweepKnob::query_mix}) {
    if (to_string(k) == name) return k;
  }
  if (name == "replicas-per-dc") return SweepKnob::replicas_per_dc;
  if (name == "inter-delay" || name == "delay") return SweepKnob::inter_delay;
  return std::nullopt;
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("sweep must look like knob=v1,v2,...");
  auto knob = parse_knob(text.substr(0, eq));
  if (!knob) throw std::invalid_argument("unknown sweep knob '" + std::string(text.substr(0, eq)) + "'");
  SweepSpec s{*knob, {}};
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string tok(rest.substr(0, comma));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw std::invalid_argument("bad sweep value '" + tok + "'");
    s.values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
    if (rest.empty()) throw std::invalid_argument("sweep ends with a comma");
  }
  if (s.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  return s;
}

TrialSpec at_point(TrialSpec base, SweepKnob knob, double value) {
  auto whole = [&](const char* what) {
    if (value < 1 || value != static_cast<double>(static_cast<std::size_t>(value))) {
      throw std::invalid_argument(std::string(what) + " must be a positive integer");
    }
    return static_cast<std::size_t>(value);
  };
  switch (knob) {
    case SweepKnob::rate:
      if (value <= 0) throw std::invalid_argument("rate must be positive");
      base.rate = value;
      break;
    case SweepKnob::inter_delay:
      if (value <= 0) throw std::invalid_argument("delay must be positive");
      base.inter_dc = NormalDelay{value, value / 5.0};
      base.intra_dc = NormalDelay{value / 5.0, value / 25.0};
      break;
    case SweepKnob::replicas_per_dc:
      base.replicas_per_dc = whole("replicas_per_dc");
      break;
    case SweepKnob::dcs:
      base.dcs = whole("dcs");
      break;
    case SweepKnob::ops:
      base.ops = whole("ops");
      break;
    case SweepKnob::query_mix:
      if (value < 0) throw std::invalid_argument("query_mix must be non-negative");
      base.query_mix = value;
      break;
  }
  return base;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.systems.empty()) throw std::invalid_argument("no system selected");
  if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");

  std::vector<std::pair<std::string, double>> points;
  std::vector<TrialSpec> bases;
  if (config.sweep) {
    for (double v : config.sweep->values) {
      points.emplace_back(std::string(to_string(config.sweep->knob)), v);
      bases.push_back(at_point(config.base, config.sweep->knob, v));
    }
  } else {
    points.emplace_back("none", 0.0);
    bases.push_back(config.base);
  }

  std::vector<TrialSpec> jobs;
  for (const auto& b : bases) {
    for (CrdcKind sys : config.systems) {
      for (std::size_t i = 0; i < config.trials; ++i) {
        TrialSpec t = b;
        t.system = sys;
        t.seed = config.base.seed + i;
        jobs.push_back(t);
      }
    }
  }

  ExperimentResult out;
  out.trials.resize(jobs.size());
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        out.trials[j] = run_trial(jobs[j]);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t j = 0;
  for (const auto& [knob, value] : points) {
    for (CrdcKind sys : config.systems) {
      PointSummary p;
      p.knob = knob;
      p.value = value;
      p.system = sys;
      p.trials = config.trials;
      for (std::size_t i = 0; i < config.trials; ++i, ++j) {
        const TrialResult& r = out.trials[j];
        p.mean_error += r.report.mean_error;
        p.error_ratio += r.report.error_ratio;
        p.overhead_mean += mean_overhead(r.overhead);
        if (!r.overhead.empty()) {
          const auto& last = r.overhead.back();
          p.overhead_final += last.per_element;
          p.tombstone_final += last.elements ? double(last.tombstone_units) / double(last.elements) : 0.0;
        }
        p.failed_updates += static_cast<double>(r.failed_updates);
      }
      const double k = static_cast<double>(config.trials);
      p.mean_error /= k;
      p.error_ratio /= k;
      p.overhead_mean /= k;
      p.overhead_final /= k;
      p.tombstone_final /= k;
      p.failed_updates /= k;
      out.points.push_back(p);
    }
  }
  return out;
}

namespace {

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string header(const ExperimentConfig& c) {
  const TrialSpec& b = c.base;
  std::ostringstream os;
  os << "# scale_factor=" << fmt(double(b.ops) / double(kReferenceOps), 6) << " ops=" << b.ops
     << " reference_ops=" << kReferenceOps << " pattern=" << to_string(b.pattern) << " rate=" << fmt(b.rate, 1)
     << " inter=" << fmt(b.inter_dc.mean_ms, 2) << ',' << fmt(b.inter_dc.stddev_ms, 2)
     << " intra=" << fmt(b.intra_dc.mean_ms, 2) << ',' << fmt(b.intra_dc.stddev_ms, 2) << " replicas=" << b.dcs
     << 'x' << b.replicas_per_dc << " keys=" << b.keys << " query_mix=" << fmt(b.query_mix, 3)
     << " delivery=" << (b.delivery == DeliveryMode::causal ? "causal" : "arbitrary") << " trials=" << c.trials
     << " seed=" << b.seed;
  if (c.sweep) os << " sweep=" << to_string(c.sweep->knob);
  os << '\n';
  return os.str();
}

std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

void write_experiment(const ExperimentConfig& config, const ExperimentResult& result,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string head = header(config);

  {
    auto f = open_csv(dir / "summary.csv");
    f << head;
    f << "knob,value,system,trial,seed,mean_error,error_ratio,probes,excluded_empty,excluded_rejected,"
         "overhead_mean,overhead_final,accepted,failed_updates,rejected_attempts,messages,pair_candidates,paired\n";
    std::size_t j = 0;
    for (const auto& p : result.points) {
      for (std::size_t i = 0; i < p.trials; ++i, ++j) {
        const TrialResult& r = result.trials[j];
        f << p.knob << ',' << fmt(p.value, 3) << ',' << to_string(p.system) << ',' << i << ',' << r.spec.seed << ','
          << fmt(r.report.mean_error) << ',' << fmt(r.report.error_ratio) << ',' << r.report.probes << ','
          << r.report.excluded_empty_truth << ',' << r.report.excluded_rejected << ','
          << fmt(mean_overhead(r.overhead)) << ','
          << fmt(r.overhead.empty() ? 0.0 : r.overhead.back().per_element) << ',' << r.accepted << ','
          << r.failed_updates << ',' << r.rejected_attempts << ',' << r.messages << ','
          << r.workload.pair_candidates << ',' << r.workload.paired << '\n';
      }
    }
  }
  {
    auto f = open_csv(dir / "aggregate.csv");
    f << head;
    f << "knob,value,system,trials,mean_error,error_ratio,overhead_mean,overhead_final,tombstone_final,failed_updates\n";
    for (const auto& p : result.points) {
      f << p.knob << ',' << fmt(p.value, 3) << ',' << to_string(p.system) << ',' << p.trials << ','
        << fmt(p.mean_error) << ',' << fmt(p.error_ratio) << ',' << fmt(p.overhead_mean) << ','
        << fmt(p.overhead_final) << ',' << fmt(p.tombstone_final) << ',' << fmt(p.failed_updates, 3) << '\n';
    }
  }

  std::size_t j = 0;
  std::size_t point = 0;
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const PointSummary& p = result.points[k];
    const TrialResult& r = result.trials[j];
    const std::string tag = std::string(to_string(p.system)) + "_p" + std::to_string(point);
    {
      auto f = open_csv(dir / ("probes_" + tag + ".csv"));
      f << head;
      write_probe_csv(f, r.report.detail);
    }
    {
      auto f = open_csv(dir / ("overhead_" + tag + ".csv"));
      f << head;
      write_overhead_csv(f, std::string(to_string(p.system)), r.overhead);
    }
    j += p.trials;
    if ((k + 1) % config.systems.size() == 0) ++point;
  }
}

}  // namespace rwcrdc
