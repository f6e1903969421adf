// rwsim: experiment driver for the remove-win and add-win priority queues.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rwcrdc/experiment.hpp"
#include "rwcrdc/figures.hpp"

using namespace rwcrdc;

namespace {

NormalDelay parse_delay(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("delay: expected MEAN,STD");
  try {
    NormalDelay d{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    if (d.mean_ms > 0 && d.stddev_ms >= 0) return d;
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("delay: expected MEAN,STD with MEAN > 0 and STD >= 0, got '" + text + "'");
}

int run_figures() {
  int failed = 0;
  for (const auto& r : run_figure_cases()) {
    std::printf("%s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str());
    for (const auto& f : r.failures) std::printf("  %s\n", f.c_str());
    failed += r.passed ? 0 : 1;
  }
  return failed ? 1 : 0;
}

// Flat key=value file as `run` arguments; a key names a flag of the same name
// (underscores read as dashes).
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::vector<std::string> out;
  for (const auto& item : CLI::ConfigINI().from_config(f)) {
    if (item.name == "++" || item.name == "--") continue;
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    out.push_back("--" + name + "=" + value);
  }
  return out;
}

void print_points(const ExperimentResult& res) {
  std::printf("%-16s %10s %-8s %10s %8s %10s %10s\n", "knob", "value", "system", "x_bar", "f", "ovh_mean", "ovh_final");
  for (const auto& p : res.points) {
    std::printf("%-16s %10.3f %-8s %10.4f %8.4f %10.3f %10.3f\n", p.knob.c_str(), p.value,
                std::string(to_string(p.system)).c_str(), p.mean_error, p.error_ratio, p.overhead_mean,
                p.overhead_final);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated replicated priority queues: remove-win vs add-win"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run experiments and write CSV reports");
  run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  run->add_option("--config", config_path, "flat key=value file; flags given on the command line win");

  std::string crdc = "both";
  std::string pattern = "inc_dominant";
  std::string inter = "50,10";
  std::string intra = "10,2";
  std::string sweep;
  std::string out = "results";
  std::string delivery = "causal";
  std::string trace_path;
  bool figures = false;
  TrialSpec base;
  std::size_t trials = 1;
  std::size_t threads = 0;

  run->add_option("--crdc", crdc, "rmv_win | add_win | both")->check(CLI::IsMember({"rmv_win", "add_win", "both"}));
  run->add_option("--pattern", pattern, "inc_dominant | add_rmv_dominant")
      ->check(CLI::IsMember({"inc_dominant", "add_rmv_dominant"}));
  run->add_option("--rate", base.rate, "updates per simulated second")->check(CLI::PositiveNumber);
  run->add_option("--ops", base.ops, "updates per trial")->check(CLI::PositiveNumber);
  run->add_option("--dcs", base.dcs, "data centers")->check(CLI::PositiveNumber);
  run->add_option("--replicas-per-dc", base.replicas_per_dc, "replicas in each data center")->check(CLI::PositiveNumber);
  run->add_option("--inter-delay", inter, "inter-DC delay MEAN,STD in ms");
  run->add_option("--intra-delay", intra, "intra-DC delay MEAN,STD in ms");
  run->add_option("--trials", trials, "trials per point; trial i uses seed+i")->check(CLI::PositiveNumber);
  run->add_option("--seed", base.seed, "base seed");
  run->add_option("--sweep", sweep, "KNOB=v1,v2,... (rate, inter_delay, replicas_per_dc, dcs, ops, query_mix)");
  run->add_flag("--figures", figures, "replay the scripted scenarios and check their end states");
  run->add_option("--out", out, "output directory");
  run->add_option("--keys", base.keys, "key space size")->check(CLI::PositiveNumber);
  run->add_option("--query-mix", base.query_mix, "get_max probes per update")->check(CLI::NonNegativeNumber);
  run->add_option("--conflict-probability", base.conflict_probability, "add re-targeting probability")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--delivery", delivery, "causal | arbitrary")->check(CLI::IsMember({"causal", "arbitrary"}));
  run->add_option("--threads", threads, "worker threads, 0 = all cores");
  run->add_option("--dump-trace", trace_path, "write the first trial's submitted ops as a script");

  auto* replay = app.add_subcommand("replay", "run a scripted schedule and print query answers and end states");
  std::string script_path;
  std::string replay_crdc = "rmv_win";
  std::string replay_delivery = "arbitrary";
  replay->add_option("script", script_path, "schedule file")->required()->check(CLI::ExistingFile);
  replay->add_option("--crdc", replay_crdc, "basic_rwset | opt_rwset | rmv_win | add_win");
  replay->add_option("--delivery", replay_delivery, "causal | arbitrary")->check(CLI::IsMember({"causal", "arbitrary"}));

  CLI11_PARSE(app, argc, argv);
  if (*run && !config_path.empty()) {
    // Reparse with the file's settings ahead of the command line.
    std::vector<std::string> args;
    try {
      args = config_args(config_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
    args.insert(args.begin(), "run");
    for (int i = 1; i < argc; ++i) {
      if (std::string(argv[i]) != "run") args.emplace_back(argv[i]);
    }
    std::reverse(args.begin(), args.end());
    app.clear();
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }
  }

  try {
    if (*run) {
      if (figures) return run_figures();

      ExperimentConfig cfg;
      base.pattern = *parse_pattern(pattern);
      base.inter_dc = parse_delay(inter);
      base.intra_dc = parse_delay(intra);
      base.delivery = delivery == "causal" ? DeliveryMode::causal : DeliveryMode::arbitrary;
      cfg.base = base;
      cfg.trials = trials;
      cfg.threads = threads;
      if (crdc == "rmv_win") cfg.systems = {CrdcKind::rw_crpq};
      if (crdc == "add_win") cfg.systems = {CrdcKind::aw_crpq};
      if (!sweep.empty()) cfg.sweep = parse_sweep(sweep);

      cfg.base.keep_trace = !trace_path.empty();
      const ExperimentResult res = run_experiment(cfg);
      write_experiment(cfg, res, out);
      if (!trace_path.empty()) {
        std::ofstream f(trace_path);
        f << to_script(res.trials.front().trace, cfg.base.dcs, cfg.base.replicas_per_dc);
      }
      print_points(res);
      return 0;
    }

    if (*replay) {
      std::ifstream f(script_path);
      std::stringstream text;
      text << f.rdbuf();
      const Script s = parse_script(text.str());
      SimConfig sc;
      if (s.topology) {
        sc.dcs = s.topology->first;
        sc.replicas_per_dc = s.topology->second;
      }
      auto kind = parse_crdc_kind(replay_crdc);
      if (!kind) throw std::invalid_argument("unknown crdc '" + replay_crdc + "'");
      sc.crdc = *kind;
      sc.delivery = replay_delivery == "causal" ? DeliveryMode::causal : DeliveryMode::arbitrary;
      Simulation sim(sc);
      const ScriptOutcome outcome = run_script(sim, s);
      for (const auto& [line, q] : outcome.queries) {
        std::printf("line %zu: ", line);
        if (!q.accepted) {
          std::printf("rejected\n");
        } else if (q.entry) {
          std::printf("(%llu, %lld)\n", static_cast<unsigned long long>(q.entry->element),
                      static_cast<long long>(q.entry->priority));
        } else {
          std::printf("%s\n", q.flag ? "true" : "false");
        }
      }
      sim.run_to_quiescence();
      const auto prints = sim.fingerprints();
      for (std::size_t r = 0; r < prints.size(); ++r) std::printf("p%zu %s\n", r, prints[r].c_str());
      std::printf("converged %s\n", sim.converged() ? "yes" : "no");
      return sim.converged() ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 3;
  }
  return 0;
}
