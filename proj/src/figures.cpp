#include "rwcrdc/figures.hpp"

#include <sstream>

#include "rwcrdc/simnet.hpp"

namespace rwcrdc {

namespace {

// p1 owns e and removes it; p0 adds and increments e before hearing of
// either, so its add and inc share crh [0,0] with p1's add.
constexpr std::string_view kConcurrentRemove = R"(replicas 1 2
0 1 add e 10
delay 1 0 50
1 1 rmv e
delay 1 0 50
2 0 add e 5
delay 0 1 5
3 0 inc e 4
delay 0 1 5
)";

constexpr std::string_view kSamePhaseAdd = R"(replicas 1 2
0 0 add e 10
delay 0 1 10
0 1 add e 20
delay 1 0 10
5 0 get_pri e
5 1 get_pri e
100 0 inc e 3
delay 0 1 10
100 1 inc e 4
delay 1 0 10
)";

// p0 removes e; p1 hears of it at once and re-adds e, p2 sees p1's add (and
// so T[e]=[1,0,0]) long before p0's rmv arrives, then increments e.
constexpr std::string_view kLateRemove = R"(replicas 1 3
0 0 add e 10
delay 0 1 1
delay 0 2 1
10 0 rmv e
delay 0 1 1
delay 0 2 100
12 1 add e 30
delay 1 0 5
delay 1 2 1
20 2 inc e 5
delay 2 0 5
delay 2 1 5
)";

class Checker {
 public:
  explicit Checker(std::string name) { result_.name = std::move(name); }

  template <class A, class B>
  void eq(const std::string& what, const A& got, const B& want) {
    if (got == want) return;
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want;
    result_.failures.push_back(os.str());
  }
  void truth(const std::string& what, bool ok) {
    if (!ok) result_.failures.push_back(what);
  }

  FigureResult done() {
    result_.passed = result_.failures.empty();
    return std::move(result_);
  }

 private:
  FigureResult result_;
};

Simulation spawn(const Script& s) {
  SimConfig cfg;
  cfg.dcs = s.topology->first;
  cfg.replicas_per_dc = s.topology->second;
  cfg.crdc = CrdcKind::rw_crpq;
  cfg.delivery = DeliveryMode::arbitrary;
  return Simulation(cfg);
}

}  // namespace

const std::vector<FigureCase>& figure_scripts() {
  static const std::vector<FigureCase> cases{
      {"concurrent_remove", kConcurrentRemove},
      {"same_phase_add", kSamePhaseAdd},
      {"late_remove", kLateRemove},
  };
  return cases;
}

FigureResult run_concurrent_remove_case() {
  Checker c("concurrent_remove");
  const Script s = parse_script(kConcurrentRemove);
  Simulation sim = spawn(s);
  const ElementId e = s.id("e");
  const auto out = run_script(sim, s);
  c.eq("accepted updates", out.accepted.size(), 4u);
  for (bool ok : out.accepted) c.truth("every scripted update accepted", ok);

  sim.run_until(10);
  const std::string p1_after_rmv = sim.replica(1).fingerprint();
  c.truth("p1 ignores the stale add/inc", !sim.replica(1).as_crpq()->lookup(e));
  sim.run_to_quiescence();
  c.eq("p1 payload untouched by p0's ops", sim.replica(1).fingerprint(), p1_after_rmv);

  for (ReplicaId r = 0; r < 2; ++r) {
    const Crpq& pq = *sim.replica(r).as_crpq();
    const std::string who = "p" + std::to_string(r);
    c.truth(who + ": e absent", !pq.lookup(e));
    c.eq(who + ": T[e]", pq.skeleton().history().of(e).to_string(), std::string("[0,1]"));
  }
  c.truth("converged", sim.converged());
  return c.done();
}

FigureResult run_same_phase_add_case() {
  Checker c("same_phase_add");
  const Script s = parse_script(kSamePhaseAdd);
  Simulation sim = spawn(s);
  const ElementId e = s.id("e");
  const auto out = run_script(sim, s);
  for (bool ok : out.accepted) c.truth("every scripted update accepted", ok);

  // Before the adds cross, each replica shows its own innate value.
  c.eq("p0 get_pri before exchange", out.queries.at(0).second.entry->priority, 10);
  c.eq("p1 get_pri before exchange", out.queries.at(1).second.entry->priority, 20);

  sim.run_to_quiescence();
  for (ReplicaId r = 0; r < 2; ++r) {
    const Crpq& pq = *sim.replica(r).as_crpq();
    const std::string who = "p" + std::to_string(r);
    c.eq(who + ": origin of e", pq.skeleton().origin(e).value_or(99), 1);
    c.eq(who + ": priority of e", pq.get_pri(e).value_or(-1), 27);
    c.eq(who + ": acquired of e", pq.skeleton().slot(e) ? pq.skeleton().slot(e)->acquired : -1, 7);
    c.eq(who + ": T[e]", pq.skeleton().history().of(e).to_string(), std::string("[0,0]"));
  }
  c.truth("converged", sim.converged());
  return c.done();
}

FigureResult run_late_remove_case() {
  Checker c("late_remove");
  const Script s = parse_script(kLateRemove);
  Simulation sim = spawn(s);
  const ElementId e = s.id("e");
  const auto out = run_script(sim, s);
  for (bool ok : out.accepted) c.truth("every scripted update accepted", ok);

  sim.run_until(100);
  const std::string p2_before = sim.replica(2).fingerprint();
  c.eq("p2 T[e] before the late rmv", sim.replica(2).as_crpq()->skeleton().history().of(e).to_string(),
       std::string("[1,0,0]"));
  sim.run_to_quiescence();
  c.eq("late rmv leaves p2 unchanged", sim.replica(2).fingerprint(), p2_before);
  c.truth("the late rmv overtook a dependent message", sim.causal_inversions() >= 1);

  for (ReplicaId r = 0; r < 3; ++r) {
    const Crpq& pq = *sim.replica(r).as_crpq();
    const std::string who = "p" + std::to_string(r);
    c.truth(who + ": e present", pq.lookup(e));
    c.eq(who + ": origin of e", pq.skeleton().origin(e).value_or(99), 1);
    c.eq(who + ": priority of e", pq.get_pri(e).value_or(-1), 35);
    c.eq(who + ": T[e]", pq.skeleton().history().of(e).to_string(), std::string("[1,0,0]"));
  }
  c.truth("converged", sim.converged());
  return c.done();
}

std::vector<FigureResult> run_figure_cases() {
  return {run_concurrent_remove_case(), run_same_phase_add_case(), run_late_remove_case()};
}

}  // namespace rwcrdc
