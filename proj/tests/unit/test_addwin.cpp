#include <gtest/gtest.h>

#include <random>

#include "history_oracle.hpp"
#include "rwcrdc/addwin.hpp"
#include "test_net.hpp"

namespace rwcrdc {
namespace {

constexpr ElementId e = 4;

TEST(AddWin, AddMakesPresent) {
  AddWinPq p(0);
  auto add = p.prepare_add(e, 10);
  ASSERT_TRUE(add);
  EXPECT_EQ(add->tag, (UniqueTag{0, 1}));
  p.apply(*add);
  EXPECT_TRUE(p.lookup(e));
  EXPECT_EQ(p.get_pri(e), 10);
  EXPECT_FALSE(p.prepare_add(e, 1));
  EXPECT_EQ(p.prepare_add(e + 1, 1)->tag, (UniqueTag{0, 2}));
}

TEST(AddWin, UnobservedAddSurvivesConcurrentRemove) {
  AddWinPq p0(0), p1(1);
  auto a = *p0.prepare_add(e, 1);
  p0.apply(a);
  p1.apply(a);
  auto rmv = *p1.prepare_rmv(e);
  p1.apply(rmv);
  // p0 re-adds before the rmv arrives: a new tag the rmv never saw.
  auto rmv0 = *p0.prepare_rmv(e);
  p0.apply(rmv0);
  auto b = *p0.prepare_add(e, 7);
  p0.apply(b);

  p0.apply(rmv);
  p1.apply(rmv0);
  p1.apply(b);
  EXPECT_TRUE(p0.lookup(e));
  EXPECT_TRUE(p1.lookup(e));
  EXPECT_EQ(p1.get_pri(e), 7);
  EXPECT_EQ(p0.fingerprint(), p1.fingerprint());
}

TEST(AddWin, CancelledTagStaysDead) {
  AddWinPq p(0);
  const AwAddEffect add{e, 3, UniqueTag{1, 1}};
  p.apply(AwRmvEffect{e, {UniqueTag{1, 1}}, 2});
  p.apply(add);
  EXPECT_FALSE(p.lookup(e));
  EXPECT_TRUE(p.is_cancelled(e, UniqueTag{1, 1}));
}

TEST(AddWin, RemoveCancelsObservedTags) {
  AddWinPq p0(0), p1(1);
  auto a = *p0.prepare_add(e, 2);
  p0.apply(a);
  p1.apply(a);
  auto rmv = *p1.prepare_rmv(e);
  EXPECT_EQ(rmv.observed, (std::vector<UniqueTag>{a.tag}));
  p1.apply(rmv);
  p0.apply(rmv);
  EXPECT_FALSE(p0.lookup(e));
  EXPECT_FALSE(p1.lookup(e));
  const auto before = p0.fingerprint();
  p0.apply(rmv);
  EXPECT_EQ(p0.fingerprint(), before);
  EXPECT_FALSE(p0.prepare_rmv(e));
}

TEST(AddWin, Values) {
  AddWinPq p(0);
  p.apply(*p.prepare_add(e, 10));
  p.apply(*p.prepare_inc(e, 5));
  EXPECT_EQ(p.get_pri(e), 15);

  AddWinPq q(2);
  q.apply(AwAddEffect{e, 3, UniqueTag{0, 1}});
  q.apply(AwAddEffect{e, 8, UniqueTag{1, 1}});
  EXPECT_EQ(q.get_pri(e), 8);
  EXPECT_EQ(q.instances(e).size(), 2U);

  q.apply(*q.prepare_rmv(e));
  q.apply(*q.prepare_add(e, 2));
  EXPECT_EQ(q.get_pri(e), 2);
  EXPECT_EQ(q.get_max(), (MaxEntry{e, 2}));
}

TEST(AddWin, IncrementBeforeItsAdd) {
  AddWinPq p(0);
  const UniqueTag t{1, 1};
  p.apply(AwIncEffect{e, 6, {t}, 2});
  EXPECT_FALSE(p.lookup(e));
  p.apply(AwAddEffect{e, 10, t});
  EXPECT_EQ(p.get_pri(e), 16);
}

TEST(AddWin, MetadataGrowsWithRemoves) {
  auto host = make_replica(CrdcKind::aw_crpq, 0, 1);
  std::size_t last = host->metadata().units;
  for (ElementId k = 0; k < 20; ++k) {
    host->apply(*host->prepare({OpKind::add, k, 1}));
    host->apply(*host->prepare({OpKind::rmv, k, 0}));
    const auto now = host->metadata().units;
    EXPECT_GT(now, last);
    last = now;
  }
  EXPECT_EQ(host->as_add_win()->cancelled_count(), 20U);
}

TEST(AddWinProperties, MatchesObservedRemoveOracleUnderCausalDelivery) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 400; ++trial) {
    testing::TestNet net(CrdcKind::aw_crpq, 2 + trial % 3);
    testing::random_run(net, rng, 50, 3, /*causal=*/true, /*with_inc=*/true);
    ASSERT_TRUE(net.converged()) << "trial " << trial;
    for (ElementId k = 0; k < 3; ++k) {
      const auto truth = testing::add_win_truth(net.graph(), k);
      const auto got = net.host(0).query({QueryKind::get_pri, k});
      ASSERT_EQ(got.accepted, truth.present) << "trial " << trial << " element " << k;
      if (truth.present) EXPECT_EQ(got.entry->priority, truth.priority) << "trial " << trial;
      EXPECT_EQ(net.host(0).as_add_win()->instances(k).size(), truth.live_tags);
    }
  }
}

}  // namespace
}  // namespace rwcrdc
