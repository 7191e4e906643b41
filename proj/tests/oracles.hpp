#pragma once

// Slow, independent reference implementations used to derive expected values.
// They deliberately share no code paths with the library beyond Point/Metric.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "kcoreset/metric.hpp"

namespace oracle {

using kcoreset::Metric;
using kcoreset::Point;
using kcoreset::PointSet;
using kcoreset::Weight;

inline double nearest(const Point& p, const std::vector<Point>& centers, const Metric& m) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : centers) best = std::min(best, m(p, c));
  return best;
}

inline Weight uncovered(const PointSet& pts, const std::vector<Point>& centers, double r, const Metric& m) {
  Weight w = 0;
  for (const auto& p : pts)
    if (nearest(p.point, centers, m) > r * (1 + 1e-9)) w += p.weight;
  return w;
}

/// Scans every candidate threshold (0 and each nearest-center distance) and
/// keeps the smallest one leaving at most z weight uncovered.
inline double cost(const PointSet& pts, const std::vector<Point>& centers, Weight z, const Metric& m) {
  std::vector<double> cands{0.0};
  for (const auto& p : pts) cands.push_back(nearest(p.point, centers, m));
  double best = std::numeric_limits<double>::infinity();
  for (double r : cands) {
    Weight w = 0;
    for (const auto& p : pts)
      if (nearest(p.point, centers, m) > r) w += p.weight;
    if (w <= z) best = std::min(best, r);
  }
  return best;
}

/// Every k-tuple of universe indices (with repetition), odometer order.
inline void for_each_tuple(std::size_t u, int k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> t(static_cast<std::size_t>(k), 0);
  while (true) {
    f(t);
    int i = k - 1;
    while (i >= 0 && ++t[static_cast<std::size_t>(i)] == u) t[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

inline double opt(const PointSet& pts, int k, Weight z, const std::vector<Point>& universe, const Metric& m) {
  Weight total = 0;
  for (const auto& p : pts) total += p.weight;
  if (total <= z) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for_each_tuple(universe.size(), k, [&](const std::vector<std::size_t>& t) {
    std::vector<Point> c;
    for (auto i : t) c.push_back(universe[i]);
    best = std::min(best, cost(pts, c, z, m));
  });
  return best;
}

inline std::vector<Point> locations(const PointSet& pts) {
  std::vector<Point> out;
  for (const auto& p : pts)
    if (std::find(out.begin(), out.end(), p.point) == out.end()) out.push_back(p.point);
  return out;
}

/// L-infinity midpoint candidates per axis, combined by Cartesian product.
inline std::vector<Point> midpoint_grid(const PointSet& pts) {
  const std::size_t d = pts.front().point.dimension();
  std::vector<std::vector<double>> axis(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& a : pts)
      for (const auto& b : pts) {
        const double v = (a.point[j] + b.point[j]) / 2;
        if (std::find(axis[j].begin(), axis[j].end(), v) == axis[j].end()) axis[j].push_back(v);
      }
  }
  std::vector<Point> out{Point{}};
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Point> next;
    for (const auto& p : out)
      for (double v : axis[j]) {
        Point q = p;
        q.coords.push_back(v);
        next.push_back(q);
      }
    out = std::move(next);
  }
  return out;
}

/// Expands weights into unit points and tries every assignment to a
/// representative within `bound`, checking that each representative receives
/// exactly its weight.
inline bool covering_exists(const PointSet& P, const PointSet& Pstar, double bound, const Metric& m) {
  std::vector<Point> units;
  for (const auto& p : P)
    for (Weight i = 0; i < p.weight; ++i) units.push_back(p.point);
  std::vector<Weight> load(Pstar.size(), 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == units.size()) {
      for (std::size_t j = 0; j < Pstar.size(); ++j)
        if (load[j] != Pstar[j].weight) return false;
      return true;
    }
    for (std::size_t j = 0; j < Pstar.size(); ++j) {
      if (load[j] < Pstar[j].weight && m(units[i], Pstar[j].point) <= bound * (1 + 1e-9)) {
        ++load[j];
        if (rec(i + 1)) return true;
        --load[j];
      }
    }
    return false;
  };
  return rec(0);
}

/// Literal coreset definition over a finite universe: every k-tuple of
/// centers and every candidate radius where Pstar's uncovered weight can change.
inline bool is_coreset(const PointSet& P, const PointSet& Pstar, int k, Weight z, double eps,
                       const std::vector<Point>& universe, const Metric& m) {
  Weight wp = 0, ws = 0;
  for (const auto& p : P) wp += p.weight;
  for (const auto& p : Pstar) ws += p.weight;
  if (ws > wp) return false;
  const double o = opt(P, k, z, universe, m);
  const double os = opt(Pstar, k, z, universe, m);
  if (os < (1 - eps) * o * (1 - 1e-9) || os > (1 + eps) * o * (1 + 1e-9)) return false;
  std::vector<double> radii{0.0};
  for (const auto& c : universe)
    for (const auto& p : Pstar) radii.push_back(m(c, p.point));
  bool ok = true;
  for_each_tuple(universe.size(), k, [&](const std::vector<std::size_t>& t) {
    if (!ok) return;
    std::vector<Point> c;
    for (auto i : t) c.push_back(universe[i]);
    for (double r : radii) {
      if (uncovered(Pstar, c, r, m) <= z && uncovered(P, c, r + eps * o, m) > z) {
        ok = false;
        return;
      }
    }
  });
  return ok;
}

inline PointSet random_points(std::mt19937_64& rng, int n, int d, int lo, int hi, bool weighted = false) {
  std::uniform_int_distribution<int> coord(lo, hi);
  std::uniform_int_distribution<int> wt(1, 3);
  PointSet out;
  for (int i = 0; i < n; ++i) {
    Point p;
    for (int j = 0; j < d; ++j) p.coords.push_back(coord(rng));
    out.push_back({p, weighted ? wt(rng) : 1});
  }
  return out;
}

}  // namespace oracle
