#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/offline.hpp"

namespace kcoreset {

enum class Violation {
  WeightMismatch,
  CoveringDistance,
  RadiusBandLow,
  RadiusBandHigh,
  ExpandedCoverFails,
  WeightRestriction,
};

inline const char* to_string(Violation v) {
  switch (v) {
    case Violation::WeightMismatch: return "WeightMismatch";
    case Violation::CoveringDistance: return "CoveringDistance";
    case Violation::RadiusBandLow: return "RadiusBandLow";
    case Violation::RadiusBandHigh: return "RadiusBandHigh";
    case Violation::ExpandedCoverFails: return "ExpandedCoverFails";
    case Violation::WeightRestriction: return "WeightRestriction";
  }
  return "?";
}

struct ValidationReport {
  bool passed = true;
  std::optional<Violation> violated_condition;
  std::string witness;
  // Filled by check_coreset only.
  double opt_full = 0.0;
  double opt_coreset = 0.0;

  static ValidationReport fail(Violation v, std::string w) {
    ValidationReport r;
    r.passed = false;
    r.violated_condition = v;
    r.witness = std::move(w);
    return r;
  }
};

namespace detail {

/// Dinic max-flow over int64 capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : adj_(n), level_(n), it_(n) {}

  void add_edge(std::size_t u, std::size_t v, std::int64_t cap) {
    adj_[u].push_back({v, adj_[v].size(), cap});
    adj_[v].push_back({u, adj_[u].size() - 1, 0});
  }

  std::int64_t run(std::size_t s, std::size_t t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) flow += f;
    }
    return flow;
  }

 private:
  struct Edge {
    std::size_t to, rev;
    std::int64_t cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (const auto& e : adj_[u]) {
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t u, std::size_t t, std::int64_t pushed) {
    if (u == t) return pushed;
    for (std::size_t& i = it_[u]; i < adj_[u].size(); ++i) {
      Edge& e = adj_[u][i];
      if (e.cap <= 0 || level_[e.to] != level_[u] + 1) continue;
      if (std::int64_t f = dfs(e.to, t, std::min(pushed, e.cap))) {
        e.cap -= f;
        adj_[e.to][e.rev].cap += f;
        return f;
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

inline std::string describe(const Point& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.dimension(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

}  // namespace detail

inline constexpr Weight kFlowWeightCap = 1'000'000;

/// Decides whether P can be split into parts, one per representative, each
/// carrying the representative's weight and lying within `bound` of it.
/// Weighted points behave as multisets of unit points, so a point's weight may
/// be split across representatives.
inline ValidationReport check_mini_ball_covering(std::span<const WeightedPoint> P, std::span<const WeightedPoint> Pstar,
                                                 double bound, const Metric& m,
                                                 Weight weight_cap = kFlowWeightCap) {
  if (bound < 0.0) throw InputError("bound must be nonnegative");
  require_positive_weights(P);
  require_positive_weights(Pstar);
  const PointSet src = merge_duplicates(P);
  const PointSet dst = merge_duplicates(Pstar);
  for (const auto& q : dst) {
    if (!std::binary_search(src.begin(), src.end(), q,
                            [](const WeightedPoint& a, const WeightedPoint& b) { return a.point < b.point; })) {
      throw InputError("representative " + detail::describe(q.point) + " is not an input location");
    }
  }
  const Weight wp = total_weight(src), ws = total_weight(dst);
  if (wp != ws) {
    return ValidationReport::fail(Violation::WeightMismatch,
                                  "total weight " + std::to_string(ws) + " vs input " + std::to_string(wp));
  }
  if (wp > weight_cap) throw CapacityError("flow validation weight exceeds cap");

  const std::size_t a = src.size(), b = dst.size();
  const std::size_t s = a + b, t = a + b + 1;
  detail::MaxFlow flow(a + b + 2);
  for (std::size_t i = 0; i < a; ++i) {
    flow.add_edge(s, i, src[i].weight);
    bool reachable = false;
    for (std::size_t j = 0; j < b; ++j) {
      if (within_radius(m(src[i].point, dst[j].point), bound)) {
        flow.add_edge(i, a + j, wp);
        reachable = true;
      }
    }
    if (!reachable) {
      return ValidationReport::fail(Violation::CoveringDistance,
                                    "point " + detail::describe(src[i].point) + " has no representative within bound");
    }
  }
  for (std::size_t j = 0; j < b; ++j) flow.add_edge(a + j, t, dst[j].weight);
  const std::int64_t f = flow.run(s, t);
  if (f != wp) {
    return ValidationReport::fail(Violation::WeightMismatch, "max flow " + std::to_string(f) + " of " +
                                                                 std::to_string(wp) + " weight");
  }
  return {};
}

inline constexpr double kDefaultCoresetCheckCap = 5e6;

/// Checks both coreset conditions over every center set of size 1..k drawn
/// from the universe.
///
/// Condition 2 quantifies over (centers C, radius r): whenever C leaves at most
/// z weight of Pstar outside radius r, C must leave at most z weight of P
/// outside r + eps*opt(P). Feasibility in r is monotone, so for a fixed C the
/// binding r is cost_Pstar(C), and the condition reduces to
/// cost_P(C) <= cost_Pstar(C) + eps*opt(P).
inline ValidationReport check_coreset(std::span<const WeightedPoint> P, std::span<const WeightedPoint> Pstar, int k,
                                      Weight z, double epsilon, const Metric& m, const CenterUniverse& universe,
                                      double cap = kDefaultCoresetCheckCap) {
  // epsilon may exceed 1 here: composed guarantees such as 3*eps are checked too
  require_parameters(k, z, 1.0);
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  require_positive_weights(P);
  require_positive_weights(Pstar);
  const Weight wp = total_weight(P), ws = total_weight(Pstar);
  if (ws > wp) {
    return ValidationReport::fail(Violation::WeightRestriction,
                                  "coreset weight " + std::to_string(ws) + " exceeds input weight " + std::to_string(wp));
  }
  const PointSet full = merge_duplicates(P);
  const PointSet core = merge_duplicates(Pstar);
  PointSet both = full;
  both.insert(both.end(), core.begin(), core.end());
  if (both.empty()) return {};
  const std::vector<Point> cand = materialize_universe(both, universe);
  const std::size_t u = cand.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), u);
  double combos = 0.0;
  for (std::size_t j = 1; j <= kk; ++j) combos += detail::binomial(u, j);
  if (combos > cap) throw CapacityError("coreset check would enumerate " + std::to_string(combos) + " center sets");

  auto table = [&](const PointSet& pts) {
    std::vector<std::vector<double>> d(u, std::vector<double>(pts.size()));
    for (std::size_t c = 0; c < u; ++c)
      for (std::size_t i = 0; i < pts.size(); ++i) d[c][i] = m(pts[i].point, cand[c]);
    return d;
  };
  const auto dfull = table(full);
  const auto dcore = table(core);

  double opt_full = std::numeric_limits<double>::infinity();
  double opt_core = std::numeric_limits<double>::infinity();
  struct Gap {
    double cost_full, cost_core;
    std::vector<std::size_t> centers;
  };
  double worst_excess = -std::numeric_limits<double>::infinity();
  Gap worst{};

  std::vector<std::pair<double, Weight>> scratch;
  for (std::size_t j = 1; j <= kk; ++j) {
    std::vector<std::vector<double>> pf(j, std::vector<double>(full.size()));
    std::vector<std::vector<double>> pc(j, std::vector<double>(core.size()));
    detail::for_each_subset(
        u, j,
        [&](std::size_t level, std::size_t c) {
          for (std::size_t i = 0; i < full.size(); ++i)
            pf[level][i] = level == 0 ? dfull[c][i] : std::min(pf[level - 1][i], dfull[c][i]);
          for (std::size_t i = 0; i < core.size(); ++i)
            pc[level][i] = level == 0 ? dcore[c][i] : std::min(pc[level - 1][i], dcore[c][i]);
        },
        [&](std::span<const std::size_t> idx) {
          const double cf = detail::cost_from_nearest(pf[j - 1], full, z, scratch);
          const double cc = detail::cost_from_nearest(pc[j - 1], core, z, scratch);
          opt_full = std::min(opt_full, cf);
          opt_core = std::min(opt_core, cc);
          if (cf - cc > worst_excess) {
            worst_excess = cf - cc;
            worst = {cf, cc, std::vector<std::size_t>(idx.begin(), idx.end())};
          }
        });
  }

  ValidationReport rep;
  rep.opt_full = opt_full;
  rep.opt_coreset = opt_core;
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  const double lo = (1.0 - epsilon) * opt_full;
  const double hi = (1.0 + epsilon) * opt_full;
  if (!within_radius(lo, opt_core)) {
    auto r = ValidationReport::fail(Violation::RadiusBandLow,
                                    "opt(coreset)=" + fmt(opt_core) + " < (1-eps)*opt=" + fmt(lo));
    r.opt_full = opt_full;
    r.opt_coreset = opt_core;
    return r;
  }
  if (!within_radius(opt_core, hi)) {
    auto r = ValidationReport::fail(Violation::RadiusBandHigh,
                                    "opt(coreset)=" + fmt(opt_core) + " > (1+eps)*opt=" + fmt(hi));
    r.opt_full = opt_full;
    r.opt_coreset = opt_core;
    return r;
  }
  if (!within_radius(worst.cost_full, worst.cost_core + epsilon * opt_full)) {
    std::string centers;
    for (std::size_t c : worst.centers) centers += detail::describe(cand[c]);
    auto r = ValidationReport::fail(Violation::ExpandedCoverFails,
                                    "centers " + centers + " radius " + fmt(worst.cost_core) +
                                        " cover the coreset but the input needs " + fmt(worst.cost_full) +
                                        " > r + eps*opt = " + fmt(worst.cost_core + epsilon * opt_full));
    r.opt_full = opt_full;
    r.opt_coreset = opt_core;
    return r;
  }
  return rep;
}

}  // namespace kcoreset
