#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kcoreset/mpc.hpp"
#include "kcoreset/validate.hpp"
#include "oracles.hpp"

using namespace kcoreset;

namespace {
const Metric LINF = Metric::linf();
}

TEST(Distribute, RoundRobinAdversarialRandom) {
  std::mt19937_64 rng(1);
  auto pts = oracle::random_points(rng, 6, 1, 0, 10);
  auto rr = distribute(pts, {3, Distribution::round_robin()});
  for (const auto& p : rr) EXPECT_EQ(p.size(), 2u);
  auto adv = distribute(pts, {3, Distribution::adversarial(std::vector<int>(6, 2))});
  EXPECT_EQ(adv[0].size(), 0u);
  EXPECT_EQ(adv[1].size(), 6u);
  EXPECT_EQ(adv[2].size(), 0u);
  EXPECT_EQ(assign_machines(50, {4, Distribution::random(9)}), assign_machines(50, {4, Distribution::random(9)}));
  EXPECT_THROW(distribute(pts, {3, Distribution::adversarial({1, 2})}), InputError);
  EXPECT_THROW(distribute(pts, {3, Distribution::adversarial({1, 2, 3, 4, 1, 1})}), InputError);
}

TEST(OutlierVector, LengthAndMonotone) {
  EXPECT_EQ(outlier_vector_length(0), 1);
  EXPECT_EQ(outlier_vector_length(1), 2);
  EXPECT_EQ(outlier_vector_length(3), 3);
  EXPECT_EQ(outlier_vector_length(4), 4);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    auto pts = oracle::random_points(rng, 20, 2, 0, 30);
    auto v = outlier_vector(pts, 2, 7, LINF);
    ASSERT_EQ(v.size(), 4u);
    for (std::size_t j = 1; j < v.size(); ++j) EXPECT_LE(v[j], v[j - 1]);
  }
  EXPECT_EQ(outlier_vector(PointSet{}, 2, 3, LINF), (std::vector<double>{0, 0, 0}));
}

TEST(RHat, HandEvaluatedExample) {
  auto est = compute_r_hat({{5, 2}, {4, 1}}, 1);
  EXPECT_EQ(est.r_hat, 2.0);
  EXPECT_EQ(est.j_hat, (std::vector<int>{1, 1}));
}

TEST(TwoRound, AllPointsOnOneMachine) {
  std::mt19937_64 rng(3);
  auto pts = oracle::random_points(rng, 14, 1, 1, 20);
  MpcConfig cfg{2, Distribution::adversarial(std::vector<int>(14, 2))};
  auto run = run_two_round(pts, 2, 1, 0.5, cfg, LINF);
  EXPECT_EQ(run.rounds_used, 2);
  EXPECT_EQ(run.outlier_vectors[0], (std::vector<double>{0, 0}));
  auto r = check_coreset(pts, run.coreset, 2, 1, 1.5, LINF, CenterUniverse::midpoint_grid());
  EXPECT_TRUE(r.passed) << r.witness;
}

TEST(TwoRound, SinglePoint) {
  PointSet one{{{4, 4}, 1}};
  auto run = run_two_round(one, 1, 0, 1.0, {2, Distribution::round_robin()}, LINF);
  EXPECT_EQ(run.coreset, one);
}

TEST(TwoRound, InvariantsOnRandomInstances) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 25; ++t) {
    const int d = 1 + t % 2;
    auto pts = oracle::random_points(rng, 16, d, 1, 12);
    const int k = 1 + t % 2;
    const Weight z = t % 4;
    const double eps = 0.5;
    const int m = 2 + t % 3;
    MpcConfig cfg{m, Distribution::round_robin()};
    auto run = run_two_round(pts, k, z, eps, cfg, LINF);
    const double opt = brute_force_opt(pts, k, z, LINF, CenterUniverse::input_points()).radius;
    EXPECT_LE(run.r_hat / 3, opt * (1 + 1e-9));
    Weight budget = 0;
    for (int j : run.j_hat) budget += (Weight{1} << j) - 1;
    EXPECT_LE(budget, 2 * z);
    EXPECT_TRUE(check_mini_ball_covering(pts, run.coordinator_union, eps * opt, LINF).passed);
    EXPECT_LE(static_cast<double>(run.coordinator_peak_words),
              two_round_coordinator_bound(k, z, eps, d, static_cast<std::size_t>(d), run.j_hat));
    for (const auto& e : run.transcript) EXPECT_EQ(e.read_round, e.send_round + 1);
    EXPECT_EQ(run.messages_per_round.size(), 2u);
    EXPECT_EQ(total_weight(run.coreset), total_weight(pts));
  }
}

TEST(TwoRound, Deterministic) {
  std::mt19937_64 rng(5);
  auto pts = oracle::random_points(rng, 40, 2, 1, 30);
  MpcConfig cfg{3, Distribution::random(77)};
  auto a = run_two_round(pts, 2, 2, 0.5, cfg, LINF);
  auto b = run_two_round(pts, 2, 2, 0.5, cfg, LINF);
  EXPECT_EQ(a.coreset, b.coreset);
  EXPECT_EQ(a.transcript, b.transcript);
  EXPECT_EQ(a.per_machine_peak_words, b.per_machine_peak_words);
}

TEST(TwoRound, RejectsSingleMachine) {
  PointSet one{{{1}, 1}};
  EXPECT_THROW(run_two_round(one, 1, 0, 1.0, {1, Distribution::round_robin()}, LINF), InputError);
}

TEST(OneRound, Budgets) {
  EXPECT_EQ(one_round_budget(0, 4, 200), 0);
  EXPECT_EQ(one_round_budget(5, 1, 200), 5);
  EXPECT_EQ(one_round_budget(100, 4, 16), 100);
  EXPECT_EQ(one_round_budget(100, 50, 2), 15);
  EXPECT_EQ(one_round_budget(1000, 10, 8), 609);
}

TEST(OneRound, RequiresRandomDistributionAndUsesOneRound) {
  std::mt19937_64 rng(6);
  auto pts = oracle::random_points(rng, 30, 2, 1, 20);
  EXPECT_THROW(run_one_round_randomized(pts, 2, 1, 0.5, {3, Distribution::round_robin()}, LINF), InputError);
  auto run = run_one_round_randomized(pts, 2, 1, 0.5, {3, Distribution::random(1)}, LINF);
  EXPECT_EQ(run.rounds_used, 1);
  EXPECT_EQ(total_weight(run.coreset), 30);
  auto z0 = run_one_round_randomized(pts, 2, 0, 0.5, {3, Distribution::random(1)}, LINF);
  EXPECT_EQ(z0.z_prime, 0);
}

TEST(RRound, FanInArithmetic) {
  EXPECT_EQ(fan_in(9, 2), 3);
  EXPECT_EQ(fan_in(8, 3), 2);
  EXPECT_EQ(fan_in(4, 2), 2);
  EXPECT_EQ(fan_in(10, 2), 4);
  EXPECT_EQ(fan_in(1, 3), 1);
  std::mt19937_64 rng(7);
  auto pts = oracle::random_points(rng, 30, 1, 1, 40);
  auto run = run_r_round(pts, 2, 1, 0.5, 2, {9, Distribution::round_robin()}, LINF);
  EXPECT_EQ(run.active_per_round, (std::vector<int>{9, 3, 1}));
  EXPECT_EQ(run.rounds_used, 2);
}

TEST(RRound, QualityOnSmallInstances) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    auto pts = oracle::random_points(rng, 24, 1, 1, 30);
    const double eps = 0.5;
    for (int rounds : {1, 2}) {
      auto run = run_r_round(pts, 2, 2, eps, rounds, {4, Distribution::random(static_cast<std::uint64_t>(t))}, LINF);
      EXPECT_EQ(run.rounds_used, rounds);
      const double q = std::pow(1 + eps, rounds) - 1;
      auto r = check_coreset(pts, run.coreset, 2, 2, q, LINF, CenterUniverse::midpoint_grid());
      EXPECT_TRUE(r.passed) << r.witness;
    }
  }
}
