#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "rwcrdc/metrics.hpp"

namespace rwcrdc {
namespace {

ClientOp add(ElementId e, Priority x) { return {OpKind::add, e, x}; }
ClientOp inc(ElementId e, Priority d) { return {OpKind::upd, e, d}; }
ClientOp rmv(ElementId e) { return {OpKind::rmv, e, 0}; }

TEST(Oracle, MaxAfterTwoAdds) {
  ClientLog log;
  log.log_update(0, 0, add(1, 5), true);
  log.log_update(1, 0, add(2, 9), true);
  log.log_probe(2, 0, MaxEntry{2, 9});
  const auto truth = replay_oracle(log);
  ASSERT_EQ(truth.size(), 1U);
  EXPECT_EQ(truth[0].log_index, 2U);
  EXPECT_EQ(truth[0].truth, (MaxEntry{2, 9}));
  const auto rep = score(log, truth);
  EXPECT_EQ(rep.probes, 1U);
  EXPECT_DOUBLE_EQ(rep.mean_error, 0.0);
  EXPECT_FALSE(rep.empty);
}

TEST(Oracle, EmptyTruthIsExcluded) {
  ClientLog log;
  log.log_update(0, 0, add(1, 5), true);
  log.log_update(1, 0, rmv(1), true);
  log.log_probe(2, 3, MaxEntry{1, 5});
  const auto truth = replay_oracle(log);
  ASSERT_EQ(truth.size(), 1U);
  EXPECT_FALSE(truth[0].truth);
  const auto rep = score(log, truth);
  EXPECT_EQ(rep.probes, 0U);
  EXPECT_EQ(rep.excluded_empty_truth, 1U);
  EXPECT_TRUE(rep.empty);
  EXPECT_DOUBLE_EQ(rep.mean_error, 0.0);
}

TEST(Oracle, RejectedProbesAreCountedNotScored) {
  ClientLog log;
  log.log_update(0, 0, add(1, 5), true);
  log.log_probe(1, 1, std::nullopt);
  const auto rep = score(log, replay_oracle(log));
  EXPECT_EQ(rep.excluded_rejected, 1U);
  EXPECT_TRUE(rep.empty);
}

TEST(Score, MeanErrorAndRatio) {
  ClientLog log;
  log.log_update(0, 0, add(1, 9), true);
  log.log_probe(1, 0, MaxEntry{1, 7});
  log.log_update(2, 0, rmv(1), true);
  log.log_update(3, 0, add(2, 5), true);
  log.log_probe(4, 1, MaxEntry{2, 5});
  const auto rep = score(log, replay_oracle(log));
  ASSERT_EQ(rep.probes, 2U);
  EXPECT_DOUBLE_EQ(rep.mean_error, 1.0);
  EXPECT_DOUBLE_EQ(rep.error_ratio, 0.5);
  ASSERT_EQ(rep.detail.size(), 2U);
  EXPECT_EQ(rep.detail[0].abs_err, 2);
  EXPECT_EQ(rep.detail[1].replica, 1U);
}

TEST(Score, OnlyPrioritiesAreCompared) {
  ClientLog log;
  log.log_update(0, 0, add(1, 9), true);
  log.log_update(0, 0, add(2, 9), true);
  log.log_probe(1, 0, MaxEntry{2, 9});
  log.log_probe(1, 0, MaxEntry{1, 9});
  const auto rep = score(log, replay_oracle(log));
  EXPECT_DOUBLE_EQ(rep.error_ratio, 0.0);
}

TEST(Oracle, SequentialRules) {
  ClientLog log;
  log.log_update(0, 0, add(1, 5), true);
  log.log_update(0, 0, inc(1, 3), true);
  log.log_update(0, 0, add(1, 10), true);  // replaces innate, keeps acquired
  log.log_probe(0, 0, std::nullopt);
  log.log_update(0, 0, inc(4, 100), true);  // absent: no effect
  log.log_update(0, 0, rmv(4), true);
  log.log_update(0, 0, add(2, 50), false);  // rejected: ignored
  log.log_probe(0, 0, std::nullopt);
  const auto t = replay_oracle(log);
  ASSERT_EQ(t.size(), 2U);
  EXPECT_EQ(t[0].truth, (MaxEntry{1, 13}));
  EXPECT_EQ(t[1].truth, (MaxEntry{1, 13}));
}

TEST(Oracle, RejectsMisalignedInput) {
  ClientLog log;
  log.log_update(0, 0, add(1, 5), true);
  EXPECT_THROW(score(log, {ProbeTruth{0, MaxEntry{1, 5}}}), std::invalid_argument);
  EXPECT_THROW(score(log, {ProbeTruth{9, MaxEntry{1, 5}}}), std::invalid_argument);
}

// Recomputes the maximum from scratch at every probe.
std::vector<std::optional<Priority>> naive_truth(const ClientLog& log) {
  std::map<ElementId, std::pair<Priority, Priority>> q;
  std::vector<std::optional<Priority>> out;
  for (const auto& r : log.records()) {
    if (r.type == LogRecord::Type::probe) {
      std::optional<Priority> best;
      for (const auto& [e, s] : q) {
        const Priority p = s.first + s.second;
        if (!best || p > *best) best = p;
      }
      out.push_back(best);
      continue;
    }
    if (!r.accepted) continue;
    const ElementId e = r.op.element;
    if (r.op.kind == OpKind::add) {
      q[e].first = r.op.value;
    } else if (r.op.kind == OpKind::upd) {
      if (q.contains(e)) q[e].second += r.op.value;
    } else {
      q.erase(e);
    }
  }
  return out;
}

TEST(Oracle, MatchesANaiveFold) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    ClientLog log;
    for (int i = 0; i < 50; ++i) {
      const ElementId e = rng() % 6;
      switch (rng() % 5) {
        case 0: log.log_probe(i, 0, MaxEntry{e, static_cast<Priority>(rng() % 100)}); break;
        case 1: log.log_update(i, 0, add(e, static_cast<Priority>(rng() % 101)), rng() % 8 != 0); break;
        case 2: log.log_update(i, 0, rmv(e), true); break;
        default: log.log_update(i, 0, inc(e, static_cast<Priority>(rng() % 101) - 50), true); break;
      }
    }
    const auto fast = replay_oracle(log);
    const auto slow = naive_truth(log);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      ASSERT_EQ(fast[i].truth.has_value(), slow[i].has_value());
      if (slow[i]) EXPECT_EQ(fast[i].truth->priority, *slow[i]);
    }
  }
}

TEST(Overhead, SumsOverReplicas) {
  const auto p = measure_overhead({{18, 2, 9}, {27, 3, 0}}, 5.0);
  EXPECT_EQ(p.units, 45U);
  EXPECT_EQ(p.elements, 5U);
  EXPECT_EQ(p.tombstone_units, 9U);
  EXPECT_DOUBLE_EQ(p.per_element, 9.0);
  EXPECT_FALSE(p.empty);
  const auto none = measure_overhead({{0, 0, 3}}, 1.0);
  EXPECT_TRUE(none.empty);
  EXPECT_DOUBLE_EQ(none.per_element, 0.0);
}

TEST(Overhead, RemoveWinCostsOneCoordinatePerReplica) {
  for (std::size_t n : {1U, 3U, 9U}) {
    auto host = make_replica(CrdcKind::rw_crpq, 0, n);
    for (ElementId e = 0; e < 10; ++e) host->apply(*host->prepare(add(e, 1)));
    host->apply(*host->prepare(rmv(3)));
    const auto m = host->metadata();
    EXPECT_EQ(m.elements, 9U);
    EXPECT_EQ(m.units, 9 * n);
    EXPECT_EQ(m.tombstone_units, n);
    EXPECT_DOUBLE_EQ(measure_overhead({m}, 0).per_element, static_cast<double>(n));
  }
}

TEST(Overhead, AddWinGrowsWithRemoves) {
  auto host = make_replica(CrdcKind::aw_crpq, 0, 3);
  host->apply(*host->prepare(add(100, 1)));
  double last = measure_overhead({host->metadata()}, 0).per_element;
  for (int i = 0; i < 10; ++i) {
    host->apply(*host->prepare(add(1, 1)));
    host->apply(*host->prepare(rmv(1)));
    const double now = measure_overhead({host->metadata()}, 0).per_element;
    EXPECT_GT(now, last);
    last = now;
  }
}

TEST(Csv, ProbeAndOverheadFormats) {
  std::ostringstream probes;
  write_probe_csv(probes, {ProbeScore{0, 2, 7, 9, 2}});
  EXPECT_EQ(probes.str(), "probe_index,replica,returned_pri,true_pri,abs_err\n0,2,7,9,2\n");
  std::ostringstream ovh;
  OverheadPoint p;
  p.t_ms = 12.5;
  p.per_element = 9;
  write_overhead_csv(ovh, "rmv_win", {p});
  EXPECT_EQ(ovh.str(), "t_ms,system,overhead_per_element\n12.500,rmv_win,9.000000\n");
}

}  // namespace
}  // namespace rwcrdc
