#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rwcrdc/experiment.hpp"
#include "rwcrdc/figures.hpp"
#include "rwcrdc/rwset.hpp"

namespace py = pybind11;
using namespace rwcrdc;

namespace {

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

OpKind op_kind(const std::string& name) {
  if (name == "add") return OpKind::add;
  if (name == "rmv") return OpKind::rmv;
  if (name == "inc" || name == "upd") return OpKind::upd;
  throw py::value_error("op must be add, rmv or inc");
}

CrdcKind crdc_kind(const std::string& name) {
  if (auto k = parse_crdc_kind(name)) return *k;
  throw py::value_error("unknown crdc '" + name + "'");
}

py::object query_value(const QueryResult& q, QueryKind kind) {
  if (!q.accepted) return py::none();
  if (kind == QueryKind::empty || kind == QueryKind::lookup) return py::bool_(q.flag);
  if (kind == QueryKind::get_pri) return py::int_(q.entry->priority);
  return py::make_tuple(q.entry->element, q.entry->priority);
}

QueryKind query_kind(const std::string& name) {
  if (name == "empty") return QueryKind::empty;
  if (name == "lookup") return QueryKind::lookup;
  if (name == "get_pri") return QueryKind::get_pri;
  if (name == "get_max") return QueryKind::get_max;
  throw py::value_error("query must be empty, lookup, get_pri or get_max");
}

class PyReplica {
 public:
  PyReplica(const std::string& kind, ReplicaId self, std::size_t n) : host_(make_replica(crdc_kind(kind), self, n)) {}

  py::object prepare(const std::string& op, ElementId e, Priority value) {
    auto msg = host_->prepare(ClientOp{op_kind(op), e, value});
    if (!msg) return py::none();
    return to_bytes(encode(*msg));
  }
  void apply(const py::bytes& b) { host_->apply(decode(from_bytes(b))); }
  py::object query(const std::string& q, ElementId e) const {
    const QueryKind k = query_kind(q);
    return query_value(host_->query(QueryOp{k, e}), k);
  }
  std::string fingerprint() const { return host_->fingerprint(); }
  py::object remove_history(ElementId e) const {
    if (const Crpq* pq = host_->as_crpq()) {
      auto c = pq->skeleton().history().of(e).counters();
      return py::cast(std::vector<std::uint64_t>(c.begin(), c.end()));
    }
    if (const OptRwset* s = host_->as_opt_rwset()) {
      auto c = s->remove_history(e).counters();
      return py::cast(std::vector<std::uint64_t>(c.begin(), c.end()));
    }
    return py::none();
  }
  py::tuple metadata() const {
    const auto m = host_->metadata();
    return py::make_tuple(m.units, m.elements, m.tombstone_units);
  }

 private:
  std::unique_ptr<ReplicaHost> host_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Remove-win replicated collections and their network simulator";

  m.def("merge", [](std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
    const CrhVector r = merge(CrhVector(std::move(a)), CrhVector(std::move(b)));
    return std::vector<std::uint64_t>(r.counters().begin(), r.counters().end());
  });
  m.def("has_unseen", [](std::vector<std::uint64_t> local, std::vector<std::uint64_t> incoming) {
    return has_unseen(CrhVector(std::move(local)), CrhVector(std::move(incoming)));
  });

  py::register_exception<CausalDeliveryViolation>(m, "CausalDeliveryViolation");
  py::register_exception<WireFormatError>(m, "WireFormatError");
  py::register_exception<ScriptError>(m, "ScriptError");

  py::class_<PyReplica>(m, "Replica", "One replica of basic_rwset, opt_rwset, rmv_win or add_win")
      .def(py::init<const std::string&, ReplicaId, std::size_t>(), py::arg("kind"), py::arg("replica"),
           py::arg("replicas"))
      .def("prepare", &PyReplica::prepare, py::arg("op"), py::arg("element"), py::arg("value") = 0,
           "Runs the prepare part; returns the effect message bytes, or None when the precondition fails")
      .def("apply", &PyReplica::apply, py::arg("message"))
      .def("query", &PyReplica::query, py::arg("query"), py::arg("element") = 0)
      .def("fingerprint", &PyReplica::fingerprint)
      .def("remove_history", &PyReplica::remove_history, py::arg("element"))
      .def("metadata", &PyReplica::metadata);

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const std::string& kind, std::size_t dcs, std::size_t per_dc, std::uint64_t seed, bool causal,
                       std::pair<double, double> inter, std::pair<double, double> intra) {
             SimConfig c;
             c.crdc = crdc_kind(kind);
             c.dcs = dcs;
             c.replicas_per_dc = per_dc;
             c.seed = seed;
             c.delivery = causal ? DeliveryMode::causal : DeliveryMode::arbitrary;
             c.inter_dc = NormalDelay{inter.first, inter.second};
             c.intra_dc = NormalDelay{intra.first, intra.second};
             return Simulation(c);
           }),
           py::arg("kind") = "rmv_win", py::arg("dcs") = 3, py::arg("replicas_per_dc") = 3, py::arg("seed") = 1,
           py::arg("causal") = false, py::arg("inter") = std::pair{50.0, 10.0}, py::arg("intra") = std::pair{10.0, 2.0})
      .def_property_readonly("replicas", &Simulation::replica_count)
      .def_property_readonly("now", &Simulation::now)
      .def(
          "submit",
          [](Simulation& s, ReplicaId r, const std::string& op, ElementId e, Priority v, double at) {
            auto rej = s.submit(r, ClientOp{op_kind(op), e, v}, at);
            return rej ? py::object(py::str(rej->reason)) : py::object(py::none());
          },
          py::arg("replica"), py::arg("op"), py::arg("element"), py::arg("value") = 0, py::arg("at_ms") = 0.0,
          "Returns None on success or the rejection reason")
      .def(
          "query",
          [](Simulation& s, ReplicaId r, const std::string& q, ElementId e, double at) {
            const QueryKind k = query_kind(q);
            return query_value(s.query(r, QueryOp{k, e}, at), k);
          },
          py::arg("replica"), py::arg("query"), py::arg("element") = 0, py::arg("at_ms") = 0.0)
      .def("run_until", &Simulation::run_until)
      .def("run_to_quiescence", &Simulation::run_to_quiescence)
      .def("converged", &Simulation::converged)
      .def("fingerprints", &Simulation::fingerprints)
      .def_property_readonly("causal_inversions", &Simulation::causal_inversions)
      .def_property_readonly("messages_sent", &Simulation::messages_sent);

  m.def(
      "replay_script",
      [](const std::string& text, const std::string& kind, bool causal) {
        const Script s = parse_script(text);
        SimConfig c;
        if (s.topology) {
          c.dcs = s.topology->first;
          c.replicas_per_dc = s.topology->second;
        }
        c.crdc = crdc_kind(kind);
        c.delivery = causal ? DeliveryMode::causal : DeliveryMode::arbitrary;
        Simulation sim(c);
        const auto out = run_script(sim, s);
        sim.run_to_quiescence();
        py::list answers;
        for (std::size_t i = 0, q = 0; i < s.steps.size(); ++i) {
          if (!s.steps[i].is_query) continue;
          answers.append(query_value(out.queries[q++].second, s.steps[i].query.kind));
        }
        return py::make_tuple(answers, sim.fingerprints());
      },
      py::arg("script"), py::arg("kind") = "rmv_win", py::arg("causal") = false,
      "Runs a scripted schedule to quiescence; returns (query answers, final fingerprints)");

  m.def("run_figures", [] {
    py::dict d;
    for (const auto& r : run_figure_cases()) d[py::str(r.name)] = r.failures;
    return d;
  });

  m.def(
      "run_trial",
      [](const std::string& kind, const std::string& pattern, std::size_t ops, double rate, std::size_t dcs,
         std::size_t per_dc, std::uint64_t seed, std::uint64_t keys) {
        TrialSpec t;
        t.system = crdc_kind(kind);
        auto p = parse_pattern(pattern);
        if (!p) throw py::value_error("unknown pattern");
        t.pattern = *p;
        t.ops = ops;
        t.rate = rate;
        t.dcs = dcs;
        t.replicas_per_dc = per_dc;
        t.seed = seed;
        t.keys = keys;
        TrialResult r;
        {
          py::gil_scoped_release release;
          r = run_trial(t);
        }
        py::dict d;
        d["mean_error"] = r.report.mean_error;
        d["error_ratio"] = r.report.error_ratio;
        d["probes"] = r.report.probes;
        d["overhead"] = mean_overhead(r.overhead);
        d["accepted"] = r.accepted;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("kind") = "rmv_win", py::arg("pattern") = "inc_dominant", py::arg("ops") = 1000,
      py::arg("rate") = 10000.0, py::arg("dcs") = 3, py::arg("replicas_per_dc") = 3, py::arg("seed") = 1,
      py::arg("keys") = 200000);
}
