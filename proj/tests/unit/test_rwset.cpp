#include <gtest/gtest.h>

#include <random>

#include "history_oracle.hpp"
#include "rwcrdc/rwset.hpp"
#include "test_net.hpp"

namespace rwcrdc {
namespace {

using testing::TestNet;

constexpr ElementId x = 11;

CrhVector v(std::vector<CrhVector::Counter> c) { return CrhVector(std::move(c)); }

// ---- basic design -----------------------------------------------------------

TEST(BasicRwset, AddCarriesRecordedRemoves) {
  BasicRwset p0(0);
  auto first = p0.prepare_add(x);
  ASSERT_TRUE(first);
  EXPECT_TRUE(first->history.empty());

  p0.apply(*first);
  auto rmv = p0.prepare_rmv(x);
  ASSERT_TRUE(rmv);
  p0.apply(*rmv);
  auto again = p0.prepare_add(x);
  ASSERT_TRUE(again);
  EXPECT_EQ(again->history, (std::set<UniqueTag>{UniqueTag{0, 1}}));

  p0.apply(*again);
  EXPECT_FALSE(p0.prepare_add(x));
}

TEST(BasicRwset, ConcurrentRemoveWipesAdd) {
  // p1's rmv is concurrent with p0's add of x: the add's history misses it.
  const BasicRmvEffect rmv{x, UniqueTag{1, 1}};
  BasicRwset a(0);
  a.apply(BasicAddEffect{x, {}, 0});
  a.apply(rmv);
  a.apply(BasicAddEffect{x, {}, 0});
  EXPECT_FALSE(a.lookup(x));

  // A re-add after both saw the rmv.
  a.apply(BasicAddEffect{x, {rmv.tag}, 0});
  EXPECT_TRUE(a.lookup(x));
}

TEST(BasicRwset, AddBeforeItsRemovesIsACausalityViolation) {
  BasicRwset p(0);
  EXPECT_THROW(p.apply(BasicAddEffect{x, {UniqueTag{1, 1}}, 1}), CausalDeliveryViolation);
}

TEST(BasicRwset, RemoveTagsAreSequential) {
  BasicRwset p0(0);
  EXPECT_FALSE(p0.prepare_rmv(x));
  p0.apply(*p0.prepare_add(x));
  auto r1 = *p0.prepare_rmv(x);
  EXPECT_EQ(r1.tag, (UniqueTag{0, 1}));
  p0.apply(r1);
  p0.apply(*p0.prepare_add(x));
  EXPECT_EQ(p0.prepare_rmv(x)->tag, (UniqueTag{0, 2}));
}

TEST(BasicRwset, RemoveEffect) {
  BasicRwset p(0);
  p.apply(BasicAddEffect{x, {}, 0});
  p.apply(BasicRmvEffect{x, UniqueTag{1, 1}});
  EXPECT_FALSE(p.lookup(x));
  EXPECT_EQ(p.removes(x).size(), 1U);

  p.apply(BasicRmvEffect{x, UniqueTag{1, 2}});  // already absent
  EXPECT_EQ(p.removes(x).size(), 2U);
  const auto before = p.fingerprint();
  p.apply(BasicRmvEffect{x, UniqueTag{1, 2}});
  EXPECT_EQ(p.fingerprint(), before);
  EXPECT_EQ(p.tag_count(), 2U);
}

// ---- optimized design ---------------------------------------------------------

TEST(OptRwset, AddCarriesCurrentVector) {
  OptRwset p0(0, 2), p1(1, 2);
  EXPECT_EQ(p0.prepare_add(x)->crh, v({0, 0}));

  p1.apply(*p1.prepare_add(x));
  p1.apply(*p1.prepare_rmv(x));
  EXPECT_EQ(p1.prepare_add(x)->crh, v({0, 1}));

  OptRwset p2(0, 2);
  p2.apply(OptRmvEffect{x, v({3, 1}), 0});
  EXPECT_EQ(p2.prepare_add(x)->crh, v({3, 1}));

  p0.apply(*p0.prepare_add(x));
  EXPECT_FALSE(p0.prepare_add(x));
}

TEST(OptRwset, AddEffectGate) {
  OptRwset stale(0, 2);
  stale.apply(OptRmvEffect{x, v({0, 1}), 1});
  const auto before = stale.fingerprint();
  stale.apply(OptAddEffect{x, v({0, 0}), 0});
  EXPECT_EQ(stale.fingerprint(), before);
  EXPECT_FALSE(stale.lookup(x));

  OptRwset fresh(0, 2);
  fresh.apply(OptAddEffect{x, v({0, 0}), 1});
  EXPECT_TRUE(fresh.lookup(x));

  // The add saw a remove this replica missed: the remove runs first.
  OptRwset behind(2, 3);
  behind.apply(OptAddEffect{x, v({0, 0, 0}), 0});
  ASSERT_TRUE(behind.lookup(x));
  behind.apply(OptAddEffect{x, v({1, 0, 0}), 1});
  EXPECT_TRUE(behind.lookup(x));
  EXPECT_EQ(behind.remove_history(x), v({1, 0, 0}));
}

TEST(OptRwset, RemovePrepareIncrementsOwnCoordinate) {
  OptRwset p1(1, 2);
  p1.apply(OptAddEffect{x, v({0, 0}), 0});
  EXPECT_EQ(p1.prepare_rmv(x)->crh, v({0, 1}));

  OptRwset q0(0, 3);
  q0.apply(OptAddEffect{x, v({0, 0, 0}), 0});
  EXPECT_EQ(q0.prepare_rmv(x)->crh, v({1, 0, 0}));

  OptRwset r0(0, 2);
  r0.apply(OptRmvEffect{x, v({2, 0}), 0});
  r0.apply(OptAddEffect{x, v({2, 0}), 1});
  EXPECT_EQ(r0.prepare_rmv(x)->crh, v({3, 0}));

  EXPECT_FALSE(OptRwset(0, 2).prepare_rmv(x));
}

TEST(OptRwset, RemoveEffect) {
  OptRwset p2(2, 3);
  p2.apply(OptRmvEffect{x, v({1, 0, 0}), 0});
  p2.apply(OptAddEffect{x, v({1, 0, 0}), 1});
  const auto before = p2.fingerprint();
  p2.apply(OptRmvEffect{x, v({1, 0, 0}), 0});  // late duplicate
  EXPECT_EQ(p2.fingerprint(), before);
  EXPECT_TRUE(p2.lookup(x));

  OptRwset p0(0, 2);
  p0.apply(OptAddEffect{x, v({0, 0}), 0});
  p0.apply(OptRmvEffect{x, v({0, 1}), 1});
  EXPECT_FALSE(p0.lookup(x));
  EXPECT_EQ(p0.remove_history(x), v({0, 1}));
}

TEST(OptRwset, Lookup) {
  OptRwset p(0, 2);
  EXPECT_FALSE(p.lookup(x));
  p.apply(OptAddEffect{x, v({0, 0}), 1});
  EXPECT_TRUE(p.lookup(x));
  p.apply(OptRmvEffect{x, v({1, 0}), 0});
  EXPECT_FALSE(p.lookup(x));
}

TEST(OptRwset, WireRoundTrip) {
  const OptAddEffect add{x, v({1, 2}), 1};
  const OptRmvEffect rmv{x, v({2, 2}), 0};
  EXPECT_EQ(opt_add_from_wire(to_wire(add)), add);
  EXPECT_EQ(opt_rmv_from_wire(to_wire(rmv)), rmv);
  const BasicAddEffect badd{x, {UniqueTag{1, 3}}, 1};
  const BasicRmvEffect brmv{x, UniqueTag{0, 4}};
  EXPECT_EQ(basic_add_from_wire(to_wire(badd)), badd);
  EXPECT_EQ(basic_rmv_from_wire(to_wire(brmv)), brmv);
}

// ---- properties over random small histories -------------------------------

TEST(RwsetProperties, OptimizedMembershipMatchesPhaseOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 3;
    TestNet net(CrdcKind::opt_rwset, n);
    testing::random_run(net, rng, 30, 3, /*causal=*/false, /*with_inc=*/false);
    ASSERT_TRUE(net.converged()) << "trial " << trial;
    for (ElementId e = 0; e < 3; ++e) {
      const auto truth = testing::remove_win_truth(net.graph(), e);
      const auto& set = *net.host(0).as_opt_rwset();
      EXPECT_EQ(set.lookup(e), truth.present) << "trial " << trial << " element " << e;
      EXPECT_EQ(set.remove_history(e).total(), truth.removes);
    }
  }
}

TEST(RwsetProperties, CausalRunsNeedNoCrossElementHistory) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    TestNet net(CrdcKind::opt_rwset, 2 + trial % 3);
    testing::random_run(net, rng, 30, 3, /*causal=*/true, /*with_inc=*/false);
    for (ElementId e = 0; e < 3; ++e) {
      const auto local = testing::remove_win_truth(net.graph(), e, true);
      const auto global = testing::remove_win_truth(net.graph(), e, false);
      EXPECT_EQ(local.present, global.present) << "trial " << trial;
      EXPECT_EQ(local.final_phase_adds, global.final_phase_adds) << "trial " << trial;
      EXPECT_EQ(net.host(0).as_opt_rwset()->lookup(e), global.present) << "trial " << trial;
    }
  }
}

// Without causal delivery, an op can see a remove of x only through an op on
// another element; x's history cannot carry it.
TEST(RwsetProperties, CrossElementVisibilityIsNotTracked) {
  TestNet net(CrdcKind::opt_rwset, 3);
  net.submit(2, {OpKind::add, 1, 0});  // 0
  net.submit(2, {OpKind::rmv, 1, 0});  // 1
  net.submit(2, {OpKind::add, 2, 0});  // 2
  // p1 receives only the add of 2, then adds 1.
  for (std::size_t i = 0; i < net.pending().size(); ++i) {
    if (net.pending()[i].op == 2 && net.pending()[i].target == 1) {
      net.deliver(i);
      break;
    }
  }
  net.submit(1, {OpKind::add, 1, 0});  // 3
  std::mt19937_64 rng(1);
  net.drain(rng, false);
  ASSERT_TRUE(net.converged());
  EXPECT_TRUE(net.graph().causally_sees(3, 1));
  EXPECT_TRUE(testing::remove_win_truth(net.graph(), 1, false).present);
  EXPECT_FALSE(testing::remove_win_truth(net.graph(), 1, true).present);
  EXPECT_FALSE(net.host(0).as_opt_rwset()->lookup(1));
}

TEST(RwsetProperties, BasicAgreesWithOptimizedUnderCausalDelivery) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::size_t n = 2 + seed % 3;
    TestNet basic(CrdcKind::basic_rwset, n);
    TestNet opt(CrdcKind::opt_rwset, n);
    std::mt19937_64 rb(seed), ro(seed);
    testing::random_run(basic, rb, 40, 2, true, false);
    testing::random_run(opt, ro, 40, 2, true, false);
    ASSERT_EQ(basic.graph().size(), opt.graph().size()) << "seed " << seed;
    for (std::size_t r = 0; r < n; ++r) {
      for (ElementId e = 0; e < 2; ++e) {
        auto id = static_cast<ReplicaId>(r);
        EXPECT_EQ(basic.host(id).query({QueryKind::lookup, e}), opt.host(id).query({QueryKind::lookup, e}))
            << "seed " << seed;
      }
    }
    EXPECT_TRUE(basic.converged());
  }
}

}  // namespace
}  // namespace rwcrdc
