#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"

namespace kcoreset {

inline void require_parameters(int k, Weight z, double epsilon) {
  if (k < 1) throw InputError("k must be at least 1");
  if (z < 0) throw InputError("z must be nonnegative");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InputError("epsilon must lie in (0, 1]");
}

/// Smallest r such that the weight farther than r from every center is at most z.
inline double evaluate_cost(std::span<const WeightedPoint> points, std::span<const Point> centers, Weight z,
                            const Metric& m) {
  if (centers.empty()) throw InputError("evaluate_cost needs at least one center");
  std::vector<std::pair<double, Weight>> nearest;
  nearest.reserve(points.size());
  for (const auto& p : points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, m(p.point, c));
    nearest.emplace_back(best, p.weight);
  }
  std::sort(nearest.begin(), nearest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  Weight peeled = 0;
  for (const auto& [dist, w] : nearest) {
    peeled += w;
    if (peeled > z) return dist;
  }
  return 0.0;
}

struct Solution {
  double radius = 0.0;
  std::vector<Point> centers;
  Weight outlier_weight = 0;
};

namespace detail {

/// Cost of a center set given each point's nearest-center distance; `scratch`
/// is reused between calls.
inline double cost_from_nearest(std::span<const double> nearest, std::span<const WeightedPoint> points, Weight z,
                                std::vector<std::pair<double, Weight>>& scratch) {
  scratch.clear();
  for (std::size_t i = 0; i < points.size(); ++i) scratch.emplace_back(nearest[i], points[i].weight);
  std::sort(scratch.begin(), scratch.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  Weight peeled = 0;
  for (const auto& [dist, w] : scratch) {
    peeled += w;
    if (peeled > z) return dist;
  }
  return 0.0;
}

inline Weight weight_beyond(std::span<const double> nearest, std::span<const WeightedPoint> points, double r) {
  Weight w = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (nearest[i] > r) w += points[i].weight;
  return w;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

/// Visits every k-subset of {0..n-1} in lexicographic order. `on_assign(level, c)`
/// fires whenever position `level` takes value c, so callers can keep per-level
/// prefix state; `on_leaf(idx)` fires on complete subsets.
template <class OnAssign, class OnLeaf>
void for_each_subset(std::size_t n, std::size_t k, OnAssign&& on_assign, OnLeaf&& on_leaf) {
  if (k == 0 || k > n) return;
  std::vector<std::size_t> idx(k);
  auto rec = [&](auto&& self, std::size_t level, std::size_t start) -> void {
    for (std::size_t c = start; c + (k - 1 - level) < n; ++c) {
      idx[level] = c;
      on_assign(level, c);
      if (level + 1 == k) {
        on_leaf(std::span<const std::size_t>(idx));
      } else {
        self(self, level + 1, c + 1);
      }
    }
  };
  rec(rec, 0, 0);
}

}  // namespace detail

inline constexpr double kDefaultSubsetCap = 2e6;

/// Exact optimum over k-subsets of a finite center universe. Returns the
/// lexicographically first optimal center set.
inline Solution brute_force_opt(std::span<const WeightedPoint> input, int k, Weight z, const Metric& m,
                                const CenterUniverse& universe, double subset_cap = kDefaultSubsetCap) {
  if (k < 1) throw InputError("k must be at least 1");
  if (z < 0) throw InputError("z must be nonnegative");
  require_positive_weights(input);
  const PointSet points = merge_duplicates(input);
  const Weight total = total_weight(points);
  Solution sol;
  if (total <= z) {
    sol.outlier_weight = total;
    return sol;
  }
  const std::vector<Point> cand = materialize_universe(points, universe);
  const std::size_t u = cand.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), u);
  if (detail::binomial(u, kk) > subset_cap) {
    throw CapacityError("brute-force enumeration of " + std::to_string(u) + " choose " + std::to_string(kk) +
                        " center sets exceeds cap");
  }
  const std::size_t n = points.size();
  std::vector<std::vector<double>> dist(u, std::vector<double>(n));
  for (std::size_t c = 0; c < u; ++c)
    for (std::size_t i = 0; i < n; ++i) dist[c][i] = m(points[i].point, cand[c]);

  std::vector<std::vector<double>> prefix(kk, std::vector<double>(n));
  std::vector<std::pair<double, Weight>> scratch;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_idx;
  detail::for_each_subset(
      u, kk,
      [&](std::size_t level, std::size_t c) {
        for (std::size_t i = 0; i < n; ++i)
          prefix[level][i] = level == 0 ? dist[c][i] : std::min(prefix[level - 1][i], dist[c][i]);
      },
      [&](std::span<const std::size_t> idx) {
        const auto& near = prefix[kk - 1];
        // cost < best forces all weight at distance >= best to be outliers
        if (std::isfinite(best)) {
          Weight w = 0;
          for (std::size_t i = 0; i < n; ++i)
            if (near[i] >= best) w += points[i].weight;
          if (w > z) return;
        }
        const double c = detail::cost_from_nearest(near, points, z, scratch);
        if (c < best) {
          best = c;
          best_idx.assign(idx.begin(), idx.end());
        }
      });
  sol.radius = best;
  for (std::size_t c : best_idx) sol.centers.push_back(cand[c]);
  std::vector<double> near(n, std::numeric_limits<double>::infinity());
  for (std::size_t c : best_idx)
    for (std::size_t i = 0; i < n; ++i) near[i] = std::min(near[i], dist[c][i]);
  sol.outlier_weight = detail::weight_beyond(near, points, best);
  return sol;
}

struct GreedyResult {
  double radius = 0.0;              // ball radius, three times the feasibility radius
  double feasibility_radius = 0.0;  // smallest candidate radius at which the greedy test succeeds
  std::vector<Ball> balls;
  Weight uncovered_weight = 0;
  bool vacuous = false;             // total weight <= z
};

namespace detail {

class DistanceTable {
 public:
  DistanceTable(std::span<const WeightedPoint> pts, const Metric& m) : pts_(pts), m_(m) {
    const std::size_t n = pts.size();
    if (n <= kMaxCached) {
      table_.resize(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) table_[i * n + j] = table_[j * n + i] = m(pts[i].point, pts[j].point);
    }
  }
  double operator()(std::size_t i, std::size_t j) const {
    if (!table_.empty()) return table_[i * pts_.size() + j];
    return m_(pts_[i].point, pts_[j].point);
  }

 private:
  static constexpr std::size_t kMaxCached = 3000;
  std::span<const WeightedPoint> pts_;
  const Metric& m_;
  std::vector<double> table_;
};

struct GreedyAttempt {
  bool feasible = false;
  std::vector<std::size_t> centers;
  Weight uncovered = 0;
};

inline GreedyAttempt greedy_attempt(std::span<const WeightedPoint> pts, const DistanceTable& dist, int k, Weight z,
                                    double r) {
  const std::size_t n = pts.size();
  std::vector<char> covered(n, 0);
  Weight uncovered = total_weight(pts);
  GreedyAttempt out;
  for (int round = 0; round < k && uncovered > 0; ++round) {
    Weight best_w = -1;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Weight w = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (!covered[j] && within_radius(dist(i, j), r)) w += pts[j].weight;
      if (w > best_w) {
        best_w = w;
        best_i = i;
      }
    }
    out.centers.push_back(best_i);
    for (std::size_t j = 0; j < n; ++j) {
      if (!covered[j] && within_radius(dist(best_i, j), 3.0 * r)) {
        covered[j] = 1;
        uncovered -= pts[j].weight;
      }
    }
  }
  out.uncovered = uncovered;
  out.feasible = uncovered <= z;
  return out;
}

}  // namespace detail

/// Weighted greedy 3-approximation with centers restricted to input points.
/// Binary-searches the sorted candidate radii {0, d(p,q), d(p,q)/2} for the
/// smallest one passing the greedy feasibility test.
inline GreedyResult greedy(std::span<const WeightedPoint> pts, int k, Weight z, const Metric& m) {
  if (k < 1) throw InputError("k must be at least 1");
  if (z < 0) throw InputError("z must be nonnegative");
  require_positive_weights(pts);
  GreedyResult res;
  const Weight total = total_weight(pts);
  if (total <= z) {
    res.vacuous = true;
    res.uncovered_weight = total;
    return res;
  }
  const std::size_t n = pts.size();
  detail::DistanceTable dist(pts, m);
  std::vector<double> radii{0.0};
  radii.reserve(n * (n - 1) + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      radii.push_back(d);
      radii.push_back(d / 2.0);
    }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  // The largest candidate (the diameter) is always feasible: one ball covers everything.
  std::size_t lo = 0, hi = radii.size() - 1;
  detail::GreedyAttempt best = detail::greedy_attempt(pts, dist, k, z, radii[hi]);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    auto attempt = detail::greedy_attempt(pts, dist, k, z, radii[mid]);
    if (attempt.feasible) {
      hi = mid;
      best = std::move(attempt);
    } else {
      lo = mid + 1;
    }
  }
  res.feasibility_radius = radii[hi];
  res.radius = 3.0 * radii[hi];
  res.uncovered_weight = best.uncovered;
  for (std::size_t c : best.centers) res.balls.push_back({pts[c].point, res.radius});
  return res;
}

struct MiniBallCovering {
  PointSet representatives;
  std::vector<std::size_t> assignment;  // input index -> representative index
  double covering_radius = 0.0;         // every point lies within this of its representative
  double greedy_radius = 0.0;
};

namespace detail {

/// Greedy net in input order: the first remaining point absorbs every
/// remaining point within `radius`.
inline MiniBallCovering greedy_net(std::span<const WeightedPoint> pts, double radius, const Metric& m) {
  if (radius < 0.0 || std::isnan(radius)) throw InputError("net radius must be nonnegative");
  MiniBallCovering out;
  out.covering_radius = radius;
  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  out.assignment.assign(pts.size(), kUnassigned);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (out.assignment[i] != kUnassigned) continue;
    const std::size_t rep = out.representatives.size();
    out.representatives.push_back({pts[i].point, 0});
    for (std::size_t j = i; j < pts.size(); ++j) {
      if (out.assignment[j] == kUnassigned && within_radius(m(pts[i].point, pts[j].point), radius)) {
        out.assignment[j] = rep;
        out.representatives[rep].weight += pts[j].weight;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Merges every point within `delta` of an earlier surviving point into it.
inline PointSet update_coreset(std::span<const WeightedPoint> pts, double delta, const Metric& m) {
  return detail::greedy_net(pts, delta, m).representatives;
}

/// Mini-ball covering of radius epsilon * R / 3 where R is the greedy radius,
/// hence within epsilon * opt of every point.
inline MiniBallCovering mbc_construction(std::span<const WeightedPoint> pts, int k, Weight z, double epsilon,
                                         const Metric& m) {
  require_parameters(k, z, epsilon);
  const GreedyResult g = greedy(pts, k, z, m);
  MiniBallCovering out = detail::greedy_net(pts, epsilon * g.radius / 3.0, m);
  out.greedy_radius = g.radius;
  return out;
}

/// Size bound k(12/eps)^d + z on a mini-ball covering.
inline double mbc_size_bound(int k, Weight z, double epsilon, int d) {
  return k * std::pow(12.0 / epsilon, d) + static_cast<double>(z);
}

}  // namespace kcoreset
