#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcoreset/dynamic.hpp"
#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"

namespace kcoreset {

/// Side lambda = 1/(4 d eps) of the cluster grids, with h = d(lambda+2)/2 and
/// r = sqrt(h^2 - 2h + d).
struct LbGeometry {
  double epsilon = 0;
  int d = 1;
  int lambda = 0;
  double h = 0;
  double r = 0;
};

inline LbGeometry lb_geometry(double epsilon, int d) {
  if (d < 1) throw InputError("dimension must be at least 1");
  if (!(epsilon > 0) || epsilon > 1.0 / (8.0 * d) * (1 + 1e-12)) throw InputError("need 0 < eps <= 1/(8d)");
  const double raw = 1.0 / (4.0 * d * epsilon);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9 * raw) {
    throw InputError("1/(4 d eps) = " + std::to_string(raw) + " is not an integer");
  }
  LbGeometry g;
  g.epsilon = epsilon;
  g.d = d;
  g.lambda = static_cast<int>(rounded);
  g.h = d * (g.lambda + 2) / 2.0;
  g.r = std::sqrt(g.h * g.h - 2 * g.h + d);
  if (!(g.r < (1 - epsilon) * (g.r + g.h) / 2)) throw std::logic_error("r < (1-eps)(r+h)/2 does not hold");
  return g;
}

namespace detail {

/// {0..side}^d in lexicographic order, first coordinate most significant.
inline std::vector<std::vector<std::int64_t>> integer_grid(int side, int d) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(static_cast<std::size_t>(d), 0);
  while (true) {
    out.push_back(x);
    int j = d - 1;
    while (j >= 0 && x[static_cast<std::size_t>(j)] == side) x[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) return out;
    ++x[static_cast<std::size_t>(j)];
  }
}

inline Point axis_offset(const Point& p, int axis, double delta) {
  Point q = p;
  q.coords[static_cast<std::size_t>(axis)] += delta;
  return q;
}

}  // namespace detail

struct InsertionProbe {
  int cluster = 1;        // 1-based cluster index
  std::size_t point = 0;  // lexicographic index inside the cluster grid
};

struct InsertionLbInstance {
  LbGeometry geometry;
  std::vector<Point> stream;    // arrival order: outliers, clusters, then probes
  std::size_t base_size = 0;    // arrivals before the probe points
  std::optional<Point> probe;   // p*, when a probe was requested
  std::vector<Point> witness;   // k+z+1 points pairwise at least h+r apart (probe only)
  std::vector<Ball> dashed;     // 2d balls of radius r at p* +- h e_j (probe only)
  std::vector<Point> probe_cluster;
};

/// Outliers, then k-2d+1 integer grids of side lambda spaced lambda + 4(h+r)
/// apart; with a probe, the 2d points p* +- (h+r) e_j, each arriving twice.
inline InsertionLbInstance gen_insertion_lb(int k, Weight z, double epsilon, int d,
                                            std::optional<InsertionProbe> probe = std::nullopt) {
  if (z < 0) throw InputError("z must be nonnegative");
  if (k < 2 * d) throw InputError("need k >= 2d");
  InsertionLbInstance out;
  out.geometry = lb_geometry(epsilon, d);
  const auto& g = out.geometry;
  const double gap = 4 * (g.h + g.r);
  const int clusters = k - 2 * d + 1;
  const auto grid = detail::integer_grid(g.lambda, d);

  std::vector<Point> outliers;
  for (Weight i = 1; i <= z; ++i) {
    Point o;
    o.coords.assign(static_cast<std::size_t>(d), 0.0);
    o.coords[0] = -gap * static_cast<double>(i);
    outliers.push_back(o);
  }
  out.stream = outliers;
  std::vector<std::vector<Point>> cluster_points(static_cast<std::size_t>(clusters));
  for (int i = 0; i < clusters; ++i) {
    const double shift = i * (g.lambda + gap);
    for (const auto& x : grid) {
      Point p;
      for (auto v : x) p.coords.push_back(static_cast<double>(v));
      p.coords[0] += shift;
      cluster_points[static_cast<std::size_t>(i)].push_back(p);
      out.stream.push_back(p);
    }
  }
  out.base_size = out.stream.size();
  if (!probe) return out;

  if (probe->cluster < 1 || probe->cluster > clusters || probe->point >= grid.size()) {
    throw InputError("probe index out of range");
  }
  const auto& home = cluster_points[static_cast<std::size_t>(probe->cluster - 1)];
  const Point pstar = home[probe->point];
  out.probe = pstar;
  out.probe_cluster = home;
  std::vector<Point> probes;
  for (double s : {1.0, -1.0})
    for (int j = 0; j < d; ++j) probes.push_back(detail::axis_offset(pstar, j, s * (g.h + g.r)));
  for (const auto& p : probes) {
    out.stream.push_back(p);
    out.stream.push_back(p);
  }
  for (int i = 0; i < clusters; ++i)
    if (i != probe->cluster - 1) out.witness.push_back(cluster_points[static_cast<std::size_t>(i)].front());
  out.witness.push_back(pstar);
  out.witness.insert(out.witness.end(), probes.begin(), probes.end());
  out.witness.insert(out.witness.end(), outliers.begin(), outliers.end());
  for (double s : {1.0, -1.0})
    for (int j = 0; j < d; ++j) out.dashed.push_back({detail::axis_offset(pstar, j, s * g.h), g.r});
  return out;
}

/// Points 1..k+z on a line; with next, also k+z+1.
inline std::vector<Point> gen_one_dim_lb(int k, Weight z, bool next = false) {
  if (k < 1) throw InputError("k must be at least 1");
  if (z < 0) throw InputError("z must be nonnegative");
  std::vector<Point> out;
  const Weight n = k + z + (next ? 1 : 0);
  for (Weight i = 1; i <= n; ++i) out.push_back({static_cast<double>(i)});
  return out;
}

struct DynamicProbe {
  int cluster = 1;        // 1-based
  int group = 1;          // m*, 1-based
  std::size_t point = 0;  // index inside the group, in emission order
};

struct DynamicLbInstance {
  LbGeometry geometry;
  std::int64_t delta = 0;
  int groups = 0;                  // g = floor(log2(Delta)/2) - 2
  std::vector<GridUpdate> updates; // inserts of P(t), then the scenario tail
  std::size_t base_size = 0;
  std::int64_t extent = 0;         // largest coordinate after the shift into [1, Delta]
  std::optional<Point> probe;
};

inline std::size_t dynamic_group_size(int lambda, int d) {
  return static_cast<std::size_t>(std::llround(std::pow(lambda + 1.0, d) - std::pow(lambda / 2 + 1.0, d)));
}

/// Clusters of g nested groups; group m is 2^m {0..lambda}^d without the
/// lexicographically smallest octant. Clusters and outliers sit
/// ceil(2^(g+2)(h+r)) apart, and everything is shifted into [1, Delta]^d.
/// The probe tail deletes groups m > m* in every cluster and then inserts
/// p* +- round(2^m* (h+r)) e_j twice each.
inline DynamicLbInstance gen_dynamic_lb(int k, Weight z, double epsilon, int d, std::int64_t delta,
                                        std::optional<DynamicProbe> probe = std::nullopt) {
  if (z < 0) throw InputError("z must be nonnegative");
  if (k < 2 * d) throw InputError("need k >= 2d");
  DynamicLbInstance out;
  out.geometry = lb_geometry(epsilon, d);
  const auto& geo = out.geometry;
  if (geo.lambda % 2 != 0) throw InputError("lambda/2 must be an integer");
  const double need = std::pow((2.0 * k + static_cast<double>(z)) * (1 / (4 * epsilon) + d), 2);
  if (static_cast<double>(delta) < need) {
    throw InputError("Delta must be at least ((2k+z)(1/(4 eps)+d))^2 = " + std::to_string(need));
  }
  out.delta = delta;
  out.groups = static_cast<int>(std::floor(std::log2(static_cast<double>(delta)) / 2)) - 2;
  if (out.groups < 1) throw InputError("Delta too small for one group");
  const int g = out.groups;
  const double hr = geo.h + geo.r;
  const double gap = std::ceil(std::ldexp(hr, g + 2));
  const double side = std::ldexp(static_cast<double>(geo.lambda), g);
  const int clusters = k - 2 * d + 1;
  const auto grid = detail::integer_grid(geo.lambda, d);
  const int half = geo.lambda / 2;

  std::vector<Point> pts;
  for (Weight i = 1; i <= z; ++i) {
    Point o;
    o.coords.assign(static_cast<std::size_t>(d), 0.0);
    o.coords[0] = -gap * static_cast<double>(i);
    pts.push_back(o);
  }
  // group_of[c][m-1] lists the emitted points of group m in cluster c
  std::vector<std::vector<std::vector<Point>>> group_of(static_cast<std::size_t>(clusters));
  for (int c = 0; c < clusters; ++c) {
    const double shift = c * (side + gap);
    for (int m = 1; m <= g; ++m) {
      std::vector<Point> grp;
      for (const auto& x : grid) {
        if (std::all_of(x.begin(), x.end(), [&](std::int64_t v) { return v <= half; })) continue;
        Point p;
        for (auto v : x) p.coords.push_back(std::ldexp(static_cast<double>(v), m));
        p.coords[0] += shift;
        grp.push_back(p);
        pts.push_back(p);
      }
      group_of[static_cast<std::size_t>(c)].push_back(std::move(grp));
    }
  }
  std::vector<GridUpdate> ups;
  for (const auto& p : pts) ups.push_back({p, 1});
  out.base_size = ups.size();

  if (probe) {
    if (probe->cluster < 1 || probe->cluster > clusters || probe->group < 1 || probe->group > g) {
      throw InputError("probe index out of range");
    }
    const auto& grp = group_of[static_cast<std::size_t>(probe->cluster - 1)][static_cast<std::size_t>(probe->group - 1)];
    if (probe->point >= grp.size()) throw InputError("probe index out of range");
    const Point pstar = grp[probe->point];
    for (const auto& cl : group_of)
      for (int m = probe->group + 1; m <= g; ++m)
        for (const auto& p : cl[static_cast<std::size_t>(m - 1)]) ups.push_back({p, -1});
    const double off = std::round(std::ldexp(hr, probe->group));
    for (double s : {1.0, -1.0})
      for (int j = 0; j < d; ++j) {
        const Point q = detail::axis_offset(pstar, j, s * off);
        ups.push_back({q, 1});
        ups.push_back({q, 1});
      }
    out.probe = pstar;
  }

  std::vector<double> lo(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  for (const auto& u : ups)
    for (int j = 0; j < d; ++j) lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], u.point.coords[static_cast<std::size_t>(j)]);
  double hi = 1;
  for (auto& u : ups)
    for (int j = 0; j < d; ++j) {
      auto& x = u.point.coords[static_cast<std::size_t>(j)];
      x = x - lo[static_cast<std::size_t>(j)] + 1;
      hi = std::max(hi, x);
    }
  if (out.probe)
    for (int j = 0; j < d; ++j) out.probe->coords[static_cast<std::size_t>(j)] += 1 - lo[static_cast<std::size_t>(j)];
  if (hi > static_cast<double>(delta)) throw std::logic_error("construction does not fit in [1, Delta]^d");
  out.extent = static_cast<std::int64_t>(hi);
  out.updates = std::move(ups);
  return out;
}

}  // namespace kcoreset
