#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kcoreset/errors.hpp"

namespace kcoreset {

/// Relative tolerance applied to every "distance <= radius" test.
inline constexpr double kRadiusTolerance = 1e-9;

/// True when `dist` lies within `radius` up to the relative tolerance.
inline bool within_radius(double dist, double radius) {
  return dist <= radius + kRadiusTolerance * radius;
}

/// A location in R^d (or an index into an explicit distance table).
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  std::size_t dimension() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point& a, const Point& b) {
    return std::lexicographical_compare_three_way(a.coords.begin(), a.coords.end(),
                                                  b.coords.begin(), b.coords.end(),
                                                  std::compare_weak_order_fallback);
  }
};

using Weight = std::int64_t;

struct WeightedPoint {
  Point point;
  Weight weight = 1;

  friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
};

using PointSet = std::vector<WeightedPoint>;

inline Weight total_weight(std::span<const WeightedPoint> points) {
  Weight w = 0;
  for (const auto& p : points) w += p.weight;
  return w;
}

inline PointSet with_unit_weights(std::span<const Point> points) {
  PointSet out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p, 1});
  return out;
}

inline void require_positive_weights(std::span<const WeightedPoint> points) {
  for (const auto& p : points) {
    if (p.weight < 1) throw InputError("point weights must be positive integers");
  }
}

struct Ball {
  Point center;
  double radius = 0.0;
};

enum class MetricKind { L2, Linf, ExplicitMatrix };

/// Distance function over points. Explicit metrics treat a 1-coordinate point
/// as an index into a symmetric table.
class Metric {
 public:
  static Metric l2() { return Metric(MetricKind::L2); }
  static Metric linf() { return Metric(MetricKind::Linf); }

  /// Validates symmetry, a zero diagonal, positive off-diagonal entries, and
  /// the triangle inequality (exhaustively up to 40 points, sampled beyond).
  static Metric explicit_matrix(std::vector<std::vector<double>> table,
                                std::uint64_t spot_check_seed = 0x5eed) {
    const std::size_t n = table.size();
    for (const auto& row : table) {
      if (row.size() != n) throw InputError("distance table must be square");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (table[i][i] != 0.0) throw InputError("distance table diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        const double v = table[i][j];
        if (!std::isfinite(v) || v < 0.0) throw InputError("distance table entries must be finite and nonnegative");
        if (v != table[j][i]) throw InputError("distance table must be symmetric");
        if (i != j && v == 0.0) throw InputError("distinct indices must have positive distance");
      }
    }
    auto violates = [&](std::size_t a, std::size_t b, std::size_t c) {
      return table[a][c] > (table[a][b] + table[b][c]) * (1.0 + kRadiusTolerance);
    };
    if (n <= 40) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            if (violates(a, b, c)) throw InputError("distance table violates the triangle inequality");
    } else {
      std::mt19937_64 rng(spot_check_seed);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (int s = 0; s < 100000; ++s) {
        if (violates(pick(rng), pick(rng), pick(rng))) {
          throw InputError("distance table violates the triangle inequality");
        }
      }
    }
    Metric m(MetricKind::ExplicitMatrix);
    m.table_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(table));
    return m;
  }

  MetricKind kind() const { return kind_; }

  std::size_t table_size() const { return table_ ? table_->size() : 0; }

  double operator()(const Point& p, const Point& q) const {
    if (p.dimension() != q.dimension()) {
      throw InputError("dimension mismatch: " + std::to_string(p.dimension()) + " vs " +
                       std::to_string(q.dimension()));
    }
    switch (kind_) {
      case MetricKind::L2: {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.dimension(); ++i) {
          const double t = p[i] - q[i];
          acc += t * t;
        }
        return std::sqrt(acc);
      }
      case MetricKind::Linf: {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.dimension(); ++i) acc = std::max(acc, std::abs(p[i] - q[i]));
        return acc;
      }
      case MetricKind::ExplicitMatrix:
        return (*table_)[index_of(p)][index_of(q)];
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind_) {
      case MetricKind::L2: return "l2";
      case MetricKind::Linf: return "linf";
      case MetricKind::ExplicitMatrix: return "explicit";
    }
    return "?";
  }

 private:
  explicit Metric(MetricKind k) : kind_(k) {}

  std::size_t index_of(const Point& p) const {
    if (p.dimension() != 1) throw InputError("explicit-metric points carry exactly one index coordinate");
    const double v = p[0];
    if (v < 0 || v != std::floor(v) || static_cast<std::size_t>(v) >= table_->size()) {
      throw InputError("explicit-metric index out of range");
    }
    return static_cast<std::size_t>(v);
  }

  MetricKind kind_;
  std::shared_ptr<const std::vector<std::vector<double>>> table_;
};

inline double distance(const Point& p, const Point& q, const Metric& m) { return m(p, q); }

/// Smallest positive distance between two points of `points`; coinciding
/// points are ignored.
inline double min_pairwise_distance(std::span<const Point> points, const Metric& m) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = m(points[i], points[j]);
      if (d > 0.0 && d < best) best = d;
    }
  }
  if (!std::isfinite(best)) throw DegenerateSetError("need at least two distinct locations");
  return best;
}

inline double min_pairwise_distance(std::span<const WeightedPoint> points, const Metric& m) {
  std::vector<Point> locs;
  locs.reserve(points.size());
  for (const auto& p : points) locs.push_back(p.point);
  return min_pairwise_distance(std::span<const Point>(locs), m);
}

/// Sorted distinct locations.
inline std::vector<Point> distinct_locations(std::span<const WeightedPoint> points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.point);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Merges coinciding locations, summing weights; output is sorted by location.
inline PointSet merge_duplicates(std::span<const WeightedPoint> points) {
  PointSet sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const WeightedPoint& a, const WeightedPoint& b) { return a.point < b.point; });
  PointSet out;
  for (auto& p : sorted) {
    if (!out.empty() && out.back().point == p.point) {
      out.back().weight += p.weight;
    } else {
      out.push_back(std::move(p));
    }
  }
  return out;
}

enum class UniverseKind { InputPoints, LinfMidpointGrid, ExplicitList };

/// Finite stand-in for the center space. The midpoint grid is exact for L∞
/// k-center: an optimal cluster center is the componentwise midpoint of the
/// cluster's extremes.
struct CenterUniverse {
  UniverseKind kind = UniverseKind::InputPoints;
  std::vector<Point> points;  // ExplicitList only

  static CenterUniverse input_points() { return {UniverseKind::InputPoints, {}}; }
  static CenterUniverse midpoint_grid() { return {UniverseKind::LinfMidpointGrid, {}}; }
  static CenterUniverse explicit_list(std::vector<Point> pts) {
    return {UniverseKind::ExplicitList, std::move(pts)};
  }
};

inline constexpr std::size_t kDefaultUniverseCap = 1'000'000;

/// Size the universe would have, without materializing it.
inline double universe_size(std::span<const WeightedPoint> points, const CenterUniverse& u) {
  switch (u.kind) {
    case UniverseKind::InputPoints: return static_cast<double>(distinct_locations(points).size());
    case UniverseKind::ExplicitList: return static_cast<double>(u.points.size());
    case UniverseKind::LinfMidpointGrid: {
      if (points.empty()) return 0.0;
      const std::size_t d = points.front().point.dimension();
      double total = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> xs;
        for (const auto& p : points) xs.push_back(p.point[j]);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        const double m = static_cast<double>(xs.size());
        total *= m + m * (m - 1) / 2.0;  // upper bound; midpoints may collide
      }
      return total;
    }
  }
  return 0.0;
}

/// Materializes the candidate center set as sorted distinct points.
inline std::vector<Point> materialize_universe(std::span<const WeightedPoint> points,
                                               const CenterUniverse& u,
                                               std::size_t cap = kDefaultUniverseCap) {
  if (points.empty() && u.kind != UniverseKind::ExplicitList) {
    throw InputError("cannot build a center universe from an empty point set");
  }
  std::vector<Point> out;
  switch (u.kind) {
    case UniverseKind::InputPoints:
      out = distinct_locations(points);
      break;
    case UniverseKind::ExplicitList:
      out = u.points;
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    case UniverseKind::LinfMidpointGrid: {
      const std::size_t d = points.front().point.dimension();
      std::vector<std::vector<double>> axis(d);
      double total = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> xs;
        for (const auto& p : points) {
          if (p.point.dimension() != d) throw InputError("dimension mismatch in point set");
          xs.push_back(p.point[j]);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::vector<double> vals = xs;
        for (std::size_t a = 0; a < xs.size(); ++a)
          for (std::size_t b = a + 1; b < xs.size(); ++b) vals.push_back((xs[a] + xs[b]) / 2.0);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        total *= static_cast<double>(vals.size());
        if (total > static_cast<double>(cap)) {
          throw CapacityError("midpoint-grid universe exceeds cap of " + std::to_string(cap));
        }
        axis[j] = std::move(vals);
      }
      out.reserve(static_cast<std::size_t>(total));
      std::vector<std::size_t> idx(d, 0);
      while (true) {
        Point p;
        p.coords.resize(d);
        for (std::size_t j = 0; j < d; ++j) p[j] = axis[j][idx[j]];
        out.push_back(std::move(p));
        std::size_t j = d;
        while (j > 0) {
          --j;
          if (++idx[j] < axis[j].size()) break;
          idx[j] = 0;
          if (j == 0) return out;
        }
        if (d == 0) return out;
      }
    }
  }
  if (out.size() > cap) throw CapacityError("center universe exceeds cap of " + std::to_string(cap));
  return out;
}

}  // namespace kcoreset
