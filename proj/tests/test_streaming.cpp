#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "kcoreset/offline.hpp"
#include "kcoreset/streaming.hpp"
#include "kcoreset/validate.hpp"
#include "oracles.hpp"

using namespace kcoreset;

namespace {
const Metric LINF = Metric::linf();
}

TEST(StreamInit, Thresholds) {
  EXPECT_EQ(InsertionStream<>(1, 0, 1.0, 1, LINF).threshold(), 16);
  EXPECT_EQ(InsertionStream<>(2, 3, 1.0, 1, LINF).threshold(), 35);
  EXPECT_EQ(InsertionStream<>(1, 0, 0.5, 2, LINF).threshold(), 1024);
  EXPECT_THROW(InsertionStream<>(1, 0, 0.0, 1, LINF), InputError);
  EXPECT_THROW(InsertionStream<>(1, 0, 1e-6, 8, LINF), InputError);
}

TEST(StreamArrival, HandSimulatedExample) {
  InsertionStream<> s(1, 0, 1.0, 1, LINF);
  EXPECT_TRUE(s.report().empty());
  s.handle_arrival({0});
  s.handle_arrival({10});
  EXPECT_EQ(s.radius(), 5.0);
  EXPECT_EQ(s.report(), (PointSet{{{0}, 1}, {{10}, 1}}));
  s.handle_arrival({12});
  EXPECT_EQ(s.report(), (PointSet{{{0}, 1}, {{10}, 2}}));
  s.handle_arrival({12});
  EXPECT_EQ(s.report(), (PointSet{{{0}, 1}, {{10}, 3}}));
}

TEST(StreamArrival, ZeroRadiusOnlyMergesDuplicates) {
  InsertionStream<> s(3, 2, 1.0, 1, LINF);
  for (double x : {1.0, 2.0, 2.0, 5.0}) s.handle_arrival({x});
  EXPECT_EQ(s.radius(), 0.0);
  EXPECT_EQ(s.report(), (PointSet{{{1}, 1}, {{2}, 2}, {{5}, 1}}));
}

TEST(StreamArrival, DimensionMismatch) {
  InsertionStream<> s(1, 0, 1.0, 1, LINF);
  s.handle_arrival({1, 2});
  EXPECT_THROW(s.handle_arrival({1}), InputError);
}

namespace {
void check_invariants(std::vector<Point> stream, int k, Weight z, double eps, int d) {
  InsertionStream<true> s(k, z, eps, d, LINF);
  PointSet seen;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    s.handle_arrival(stream[i]);
    seen.push_back({stream[i], 1});
    const auto& c = s.report();
    ASSERT_LT(static_cast<std::int64_t>(c.size()), s.threshold());
    ASSERT_EQ(total_weight(c), static_cast<Weight>(i + 1));
    if (s.radius() > 0) {
      for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = a + 1; b < c.size(); ++b) ASSERT_GT(LINF(c[a].point, c[b].point), eps / 2 * s.radius());
    }
    ASSERT_LE(s.max_representative_distance(), eps * s.radius() * (1 + 1e-9));
    if (i % 5 == 4 || i + 1 == stream.size()) {
      const double opt = brute_force_opt(seen, k, z, LINF, CenterUniverse::input_points()).radius;
      ASSERT_LE(s.radius(), opt * (1 + 1e-9));
    }
  }
}
}  // namespace

TEST(StreamInvariants, RandomSortedAndReversedOrders) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const int d = 1 + t % 2;
    auto pts = oracle::random_points(rng, 40, d, 1, 60);
    std::vector<Point> stream;
    for (auto& p : pts) stream.push_back(p.point);
    const int k = 1 + t % 2;
    const Weight z = t % 3;
    // Small eps keeps the threshold out of reach in 2-D, so use eps=1 there to exercise doubling.
    const double eps = 1.0;
    check_invariants(stream, k, z, eps, d);
    std::sort(stream.begin(), stream.end());
    check_invariants(stream, k, z, eps, d);
    std::reverse(stream.begin(), stream.end());
    check_invariants(stream, k, z, eps, d);
  }
}

TEST(StreamInvariants, ThresholdIsReachedInOneDimension) {
  // 1-D with k=1, z=0, eps=1 gives threshold 16; 40 well-separated points force doubling.
  InsertionStream<true> s(1, 0, 1.0, 1, LINF);
  for (int i = 0; i < 40; ++i) s.handle_arrival({static_cast<double>(i * i)});
  EXPECT_LT(static_cast<std::int64_t>(s.report().size()), 16);
  EXPECT_GT(s.radius(), 0.0);
  EXPECT_LE(s.max_representative_distance(), s.radius() * (1 + 1e-9));
}

TEST(StreamCoreset, PassesCoresetCheck) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 20; ++t) {
    auto pts = oracle::random_points(rng, 60, 1, 1, 30);
    const int k = 1 + t % 3;
    const Weight z = t % 3;
    const double eps = (t % 2) ? 1.0 : 0.5;
    InsertionStream<> s(k, z, eps, 1, LINF);
    for (auto& p : pts) s.handle_arrival(p.point);
    auto r = check_coreset(pts, s.report(), k, z, eps, LINF, CenterUniverse::midpoint_grid());
    EXPECT_TRUE(r.passed) << r.witness;
  }
}
