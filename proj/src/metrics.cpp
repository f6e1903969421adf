#include "rwcrdc/metrics.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace rwcrdc {

void ClientLog::log_update(double at_ms, ReplicaId replica, const ClientOp& op, bool accepted) {
  LogRecord r;
  r.type = LogRecord::Type::update;
  r.index = records_.size();
  r.at_ms = at_ms;
  r.replica = replica;
  r.op = op;
  r.accepted = accepted;
  records_.push_back(r);
}

void ClientLog::log_probe(double at_ms, ReplicaId replica, std::optional<MaxEntry> returned) {
  LogRecord r;
  r.type = LogRecord::Type::probe;
  r.index = records_.size();
  r.at_ms = at_ms;
  r.replica = replica;
  r.returned = returned;
  records_.push_back(r);
}

namespace {

class SequentialPq {
 public:
  void add(ElementId e, Priority x) {
    auto [it, fresh] = values_.try_emplace(e, Slot{x, 0});
    if (!fresh) {
      order_.erase({-total(it->second), e});
      it->second.innate = x;
    }
    order_.insert({-total(it->second), e});
  }

  void inc(ElementId e, Priority d) {
    auto it = values_.find(e);
    if (it == values_.end()) return;
    order_.erase({-total(it->second), e});
    it->second.acquired = checked_add(it->second.acquired, d);
    order_.insert({-total(it->second), e});
  }

  void rmv(ElementId e) {
    auto it = values_.find(e);
    if (it == values_.end()) return;
    order_.erase({-total(it->second), e});
    values_.erase(it);
  }

  std::optional<MaxEntry> max() const {
    if (order_.empty()) return std::nullopt;
    const auto& [neg, e] = *order_.begin();
    return MaxEntry{e, -neg};
  }

 private:
  struct Slot {
    Priority innate;
    Priority acquired;
  };
  static Priority total(const Slot& s) { return checked_add(s.innate, s.acquired); }

  std::map<ElementId, Slot> values_;
  std::set<std::pair<Priority, ElementId>> order_;  // (-priority, id): begin() is the max, smallest id first
};

}  // namespace

std::vector<ProbeTruth> replay_oracle(const ClientLog& log) {
  SequentialPq pq;
  std::vector<ProbeTruth> out;
  for (std::size_t i = 0; i < log.records().size(); ++i) {
    const LogRecord& r = log.records()[i];
    if (r.index != i) throw std::invalid_argument("client log indices out of order");
    if (r.type == LogRecord::Type::probe) {
      out.push_back(ProbeTruth{i, pq.max()});
      continue;
    }
    if (!r.accepted) continue;
    switch (r.op.kind) {
      case OpKind::add: pq.add(r.op.element, r.op.value); break;
      case OpKind::upd: pq.inc(r.op.element, r.op.value); break;
      case OpKind::rmv: pq.rmv(r.op.element); break;
    }
  }
  return out;
}

MetricsReport score(const ClientLog& log, const std::vector<ProbeTruth>& truth) {
  MetricsReport rep;
  double err_sum = 0.0;
  std::size_t wrong = 0;
  for (const auto& t : truth) {
    if (t.log_index >= log.size() || log.records()[t.log_index].type != LogRecord::Type::probe) {
      throw std::invalid_argument("truth not aligned with a probe");
    }
    const LogRecord& r = log.records()[t.log_index];
    if (!t.truth) {
      ++rep.excluded_empty_truth;
      continue;
    }
    if (!r.returned) {
      ++rep.excluded_rejected;
      continue;
    }
    const Priority diff = r.returned->priority - t.truth->priority;
    const Priority abs_err = diff < 0 ? -diff : diff;
    rep.detail.push_back(ProbeScore{rep.probes, r.replica, r.returned->priority, t.truth->priority, abs_err});
    ++rep.probes;
    err_sum += static_cast<double>(abs_err);
    if (abs_err != 0) ++wrong;
  }
  rep.empty = rep.probes == 0;
  if (!rep.empty) {
    rep.mean_error = err_sum / static_cast<double>(rep.probes);
    rep.error_ratio = static_cast<double>(wrong) / static_cast<double>(rep.probes);
  }
  return rep;
}

OverheadPoint measure_overhead(const std::vector<MetadataSample>& samples, double t_ms) {
  OverheadPoint p;
  p.t_ms = t_ms;
  for (const auto& s : samples) {
    p.units += s.units;
    p.elements += s.elements;
    p.tombstone_units += s.tombstone_units;
  }
  p.empty = p.elements == 0;
  p.per_element = p.empty ? 0.0 : static_cast<double>(p.units) / static_cast<double>(p.elements);
  return p;
}

void write_probe_csv(std::ostream& os, const std::vector<ProbeScore>& detail) {
  os << "probe_index,replica,returned_pri,true_pri,abs_err\n";
  for (const auto& d : detail) {
    os << d.probe_index << ',' << d.replica << ',' << d.returned << ',' << d.truth << ',' << d.abs_err << '\n';
  }
}

void write_overhead_csv(std::ostream& os, const std::string& system, const std::vector<OverheadPoint>& series) {
  os << "t_ms,system,overhead_per_element\n";
  char buf[64];
  for (const auto& p : series) {
    std::snprintf(buf, sizeof buf, "%.3f", p.t_ms);
    os << buf << ',' << system << ',';
    std::snprintf(buf, sizeof buf, "%.6f", p.per_element);
    os << buf << '\n';
  }
}

}  // namespace rwcrdc
