// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "harmsum/memory.hpp"
#include "harmsum/touch_map.hpp"
#include "oracle.hpp"

using namespace harmsum;

TEST(GlobalStore, CountsLoads) {
  GlobalStore g(4, 8);
  EXPECT_EQ(g.load_count(), 0u);
  g.load(0, 0);
  g.load(0, 0);
  EXPECT_EQ(g.load_count(), 2u);
}

TEST(GlobalStore, FullSweep) {
  GlobalStore g(4, 8);
  for (std::uint32_t i = 0; i < 4; ++i)
    for (std::uint64_t j = 0; j < 8; ++j) g.load(i, j);
  EXPECT_EQ(g.load_count(), 32u);
  EXPECT_EQ(g.store_count(), 0u);
}

TEST(GlobalStore, StoresOverwrite) {
  GlobalStore g(4, 8);
  g.store(1, 2, 3.0f);
  EXPECT_EQ(g.store_count(), 1u);
  g.store(1, 2, 5.0f);
  EXPECT_EQ(g.store_count(), 2u);
  EXPECT_EQ(g.peek(1, 2), 5.0f);
}

TEST(GlobalStore, ResetClearsCounters) {
  GlobalStore g(2, 2);
  g.load(0, 0);
  g.store(0, 0, 1.0f);
  g.reset_counters();
  EXPECT_EQ(g.load_count(), 0u);
  EXPECT_EQ(g.store_count(), 0u);
}

TEST(GlobalStore, ForkSharesDataWithFreshCounters) {
  GlobalStore g(2, 4);
  g.store(0, 1, 7.0f);
  auto w = g.fork();
  EXPECT_EQ(w.load_count(), 0u);
  EXPECT_EQ(w.store_count(), 0u);
  EXPECT_EQ(w.load(0, 1), 7.0f);
  g.absorb(w);
  EXPECT_EQ(g.load_count(), 1u);
  EXPECT_EQ(g.store_count(), 1u);
}

TEST(GlobalStore, HistogramTracksCells) {
  GlobalStore g(2, 2);
  g.enable_load_histogram();
  g.load(1, 1);
  g.load(1, 1);
  g.load(0, 1);
  const auto& h = *g.load_histogram();
  EXPECT_EQ(h[3], 2u);
  EXPECT_EQ(h[1], 1u);
  EXPECT_EQ(h[0], 0u);
}

TEST(LocalStore, EmptyPreload) {
  GlobalStore g(4, 8);
  LocalStore l(10);
  l.preload({}, g);
  EXPECT_EQ(l.resident_count(), 0u);
  EXPECT_EQ(g.load_count(), 0u);
}

TEST(LocalStore, PreloadCountsGlobalLoads) {
  GlobalStore g(4, 8);
  LocalStore l(3);
  const std::vector<PointIndex> pts{{0, 0}, {1, 2}, {3, 7}};
  l.preload(pts, g);
  EXPECT_EQ(g.load_count(), 3u);
  EXPECT_EQ(l.resident_count(), 3u);
}

TEST(LocalStore, OverCapacityRejected) {
  GlobalStore g(4, 8);
  LocalStore l(1);
  const std::vector<PointIndex> pts{{0, 0}, {1, 2}};
  EXPECT_THROW(l.preload(pts, g), std::length_error);
}

TEST(LocalStore, HitsDoNotReachGlobal) {
  GlobalStore g(4, 8);
  g.store(1, 2, 9.0f);
  LocalStore l(1);
  const std::vector<PointIndex> pts{{1, 2}};
  l.preload(pts, g);
  const auto before = g.load_count();
  for (int n = 0; n < 10; ++n) EXPECT_EQ(l.cached_load(g, 1, 2), 9.0f);
  EXPECT_EQ(l.hit_count(), 10u);
  EXPECT_EQ(g.load_count(), before);
}

TEST(LocalStore, MissLoadsFromGlobal) {
  GlobalStore g(4, 8);
  LocalStore l(0);
  l.cached_load(g, 2, 3);
  EXPECT_EQ(l.miss_count(), 1u);
  EXPECT_EQ(g.load_count(), 1u);
}

TEST(LocalStore, ResidentValuesAreSnapshotAtPreload) {
  GlobalStore g(1, 2);
  g.store(0, 0, 1.0f);
  LocalStore l(1);
  const std::vector<PointIndex> pts{{0, 0}};
  l.preload(pts, g);
  g.store(0, 0, 2.0f);
  EXPECT_EQ(l.cached_load(g, 0, 0), 1.0f);
}

TEST(LocalStore, TopTouchedPreloadOfFortyThousandPoints) {
  // Same preload size as the best reported H configuration, on a desk-size plane.
  const HsParams p{42, 1u << 12, 8, 200};
  const auto touch = compute_touch_map(p);
  GlobalStore g(p.n_rows, p.n_chan);
  LocalStore l(5u << 13);
  const auto pts = touch.top_points(5u << 13);
  l.preload(pts, g);
  EXPECT_EQ(l.resident_count(), 40960u);
  EXPECT_EQ(g.load_count(), 40960u);
}

TEST(AccessStats, RatioAndSum) {
  AccessStats a{10, 5, 1, 2, 0, 15};
  EXPECT_DOUBLE_EQ(a.ratio(), 1.0);
  AccessStats b{1, 1, 1, 1, 1, 15};
  a += b;
  EXPECT_EQ(a.global_loads, 11u);
  EXPECT_EQ(a.preload_loads, 1u);
  EXPECT_EQ(a.compute_loads(), 10u);
  EXPECT_EQ(AccessStats{}.ratio(), 0.0);
}
