#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/offline.hpp"
#include "kcoreset/sketch.hpp"

namespace kcoreset {

/// Nested grids over [1, Delta]^d; level i has cells of side 2^i.
class GridConfig {
 public:
  GridConfig(std::int64_t delta, int d) : declared_(delta), d_(d) {
    if (delta < 1) throw InputError("Delta must be at least 1");
    if (d < 1) throw InputError("dimension must be at least 1");
    delta_ = std::bit_ceil(static_cast<std::uint64_t>(delta));
    levels_ = std::countr_zero(delta_) + 1;
    if (static_cast<double>(levels_ - 1) * d >= 61.0) throw InputError("Delta^d must stay below 2^61");
  }

  std::int64_t declared_delta() const { return declared_; }
  std::uint64_t delta() const { return delta_; }
  int dimension() const { return d_; }
  int levels() const { return levels_; }
  std::uint64_t cells_per_axis(int level) const { return delta_ >> level; }

 private:
  std::int64_t declared_;
  std::uint64_t delta_;
  int d_;
  int levels_;
};

struct CellId {
  int level = 0;
  std::vector<std::uint64_t> index;
  friend bool operator==(const CellId&, const CellId&) = default;
};

inline void require_grid_point(const Point& p, const GridConfig& g) {
  if (p.dimension() != static_cast<std::size_t>(g.dimension())) {
    throw InputError("dimension mismatch: expected " + std::to_string(g.dimension()) + ", got " +
                     std::to_string(p.dimension()));
  }
  for (double x : p.coords) {
    if (x != std::floor(x) || x < 1 || x > static_cast<double>(g.declared_delta())) {
      throw InputError("grid coordinates must be integers in [1, Delta]");
    }
  }
}

inline CellId cell_of(const Point& p, int level, const GridConfig& g) {
  require_grid_point(p, g);
  if (level < 0 || level >= g.levels()) throw InputError("grid level out of range");
  CellId c{level, {}};
  for (double x : p.coords) c.index.push_back((static_cast<std::uint64_t>(x) - 1) >> level);
  return c;
}

/// Mixed-radix id of a cell within its level.
inline std::uint64_t cell_key(const CellId& c, const GridConfig& g) {
  const std::uint64_t side = g.cells_per_axis(c.level);
  std::uint64_t key = 0;
  for (std::size_t j = c.index.size(); j-- > 0;) key = key * side + c.index[j];
  return key;
}

inline CellId cell_from_key(std::uint64_t key, int level, const GridConfig& g) {
  const std::uint64_t side = g.cells_per_axis(level);
  CellId c{level, {}};
  for (int j = 0; j < g.dimension(); ++j) {
    c.index.push_back(key % side);
    key /= side;
  }
  return c;
}

/// Fixed point inside the cell: v*2^i + (2^i + 1)/2 per axis.
inline Point cell_center(const CellId& c) {
  const double side = std::ldexp(1.0, c.level);
  Point p;
  for (auto v : c.index) p.coords.push_back(static_cast<double>(v) * side + (side + 1.0) / 2.0);
  return p;
}

/// Cell budget k(4 sqrt(d)/eps)^d + z.
inline std::int64_t dynamic_cell_budget(int k, Weight z, double epsilon, int d) {
  const double base = k * std::pow(4.0 * std::sqrt(static_cast<double>(d)) / epsilon, d);
  if (!(base < 9007199254740992.0)) throw InputError("cell budget exceeds 2^53; use a larger epsilon");
  return static_cast<std::int64_t>(std::floor(base + 1e-9)) + z;
}

/// One turnstile operation: sign +1 inserts the point, -1 deletes it.
struct GridUpdate {
  Point point;
  int sign = 1;
  friend bool operator==(const GridUpdate&, const GridUpdate&) = default;
};

struct DynamicOptions {
  bool sketches = true;      // maintain recovery and distinct-count sketches
  bool exact_shadow = false; // maintain exact per-level cell counts
  double delta = 0.1;        // overall failure probability
  std::uint64_t seed = 1;
  std::size_t max_sketch_bytes = std::size_t{1} << 30;
};

struct DynamicReport {
  PointSet coreset;  // cell centers weighted by cell counts
  int level = 0;
  bool from_sketch = false;
};

/// Turnstile coreset over [Delta]^d: every update touches one cell per grid
/// level; a report returns the finest level with at most s nonempty cells.
class DynamicCoreset {
 public:
  DynamicCoreset(std::int64_t delta, int d, int k, Weight z, double epsilon, DynamicOptions opt = {})
      : grid_(delta, d), k_(k), z_(z), eps_(epsilon), opt_(opt) {
    require_parameters(k, z, epsilon);
    if (!opt.sketches && !opt.exact_shadow) throw InputError("enable sketches, the exact shadow, or both");
    s_ = dynamic_cell_budget(k, z, epsilon, d);
    const int levels = grid_.levels();
    // union bound over levels and up to Delta^(3d) queries
    per_query_delta_ = opt.delta / (levels * std::pow(static_cast<double>(grid_.delta()), 3.0 * d));
    if (!(opt.delta > 0 && opt.delta < 1)) throw InputError("failure probability must lie in (0, 1)");
    if (opt.sketches) {
      const int f0_levels = static_cast<int>(std::ceil(std::log2(static_cast<double>(grid_.delta())) * d)) + 1;
      const double rows = std::ceil(std::log2(static_cast<double>(s_) / per_query_delta_));
      const double est = levels * (rows * 2.0 * static_cast<double>(s_) * 24.0 +
                                   std::ceil(std::log2(1.0 / per_query_delta_) + 1) * (f0_levels + 1) * 288.0 * 8.0);
      if (est > static_cast<double>(opt.max_sketch_bytes)) {
        throw CapacityError("sketches would need about " + std::to_string(static_cast<long long>(est)) +
                            " bytes; use exact mode or larger epsilon");
      }
      for (int l = 0; l < levels; ++l) {
        const std::uint64_t base = opt.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(l) * 2;
        sr_.emplace_back(static_cast<std::size_t>(s_), per_query_delta_, base);
        f0_.emplace_back(kF0Accuracy, per_query_delta_, base + 1, std::min(f0_levels, 60));
      }
    }
    if (opt.exact_shadow) shadow_.resize(static_cast<std::size_t>(levels));
  }

  static constexpr double kF0Accuracy = 1.0 / 3.0;

  void update(const Point& p, int sign) {
    if (sign != 1 && sign != -1) throw InputError("update sign must be +1 or -1");
    require_grid_point(p, grid_);
    if (opt_.exact_shadow) {
      std::vector<std::int64_t> loc(p.coords.begin(), p.coords.end());
      auto& c = locations_[loc];
      if (c + sign < 0) {
        if (c == 0) locations_.erase(loc);
        throw InputError("deletion of a point that is not present");
      }
      c += sign;
      if (c == 0) locations_.erase(loc);
    }
    ++ops_;
    live_ += sign;
    for (int l = 0; l < grid_.levels(); ++l) {
      const std::uint64_t key = cell_key(cell_of(p, l, grid_), grid_);
      if (opt_.sketches) {
        sr_[static_cast<std::size_t>(l)].update(key, sign);
        f0_[static_cast<std::size_t>(l)].update(key, sign);
      }
      if (opt_.exact_shadow) {
        auto& m = shadow_[static_cast<std::size_t>(l)];
        if ((m[key] += sign) == 0) m.erase(key);
      }
    }
  }

  void update(const GridUpdate& u) { update(u.point, u.sign); }
  void insert(const Point& p) { update(p, 1); }
  void erase(const Point& p) { update(p, -1); }

  /// Uses the sketches when enabled (checking them against the shadow if it
  /// is kept too); otherwise reads the shadow.
  DynamicReport report() const {
    if (live_ <= 0) throw InputError("report needs at least one live point");
    if (!opt_.sketches) return report_exact();
    DynamicReport r = report_sketch();
    if (opt_.exact_shadow) {
      const auto& m = shadow_[static_cast<std::size_t>(r.level)];
      if (build(m, r.level).coreset != r.coreset) throw std::logic_error("sketch answer disagrees with exact counts");
    }
    return r;
  }

  DynamicReport report_exact() const {
    if (!opt_.exact_shadow) throw InputError("exact report needs the exact shadow");
    if (live_ <= 0) throw InputError("report needs at least one live point");
    for (int l = 0; l < grid_.levels(); ++l) {
      const auto& m = shadow_[static_cast<std::size_t>(l)];
      if (static_cast<std::int64_t>(m.size()) <= s_) return build(m, l);
    }
    throw std::logic_error("top grid level holds more than s cells");
  }

  /// Scans levels from finest to coarsest, skipping levels whose distinct-cell
  /// estimate exceeds (1 + 1/3)s or whose recovery does not verify.
  DynamicReport report_sketch() const {
    if (!opt_.sketches) throw InputError("sketches are disabled");
    if (live_ <= 0) throw InputError("report needs at least one live point");
    for (int l = 0; l < grid_.levels(); ++l) {
      const auto i = static_cast<std::size_t>(l);
      if (f0_[i].query() > (1.0 + kF0Accuracy) * static_cast<double>(s_)) continue;
      const RecoveryResult rec = sr_[i].query();
      if (!rec.complete || static_cast<std::int64_t>(rec.items.size()) > s_) continue;
      std::map<std::uint64_t, std::int64_t> cells;
      for (const auto& it : rec.items) cells[it.id] = it.count;
      DynamicReport r = build(cells, l);
      r.from_sketch = true;
      return r;
    }
    throw SketchFailure("no grid level produced a verified recovery");
  }

  /// Exact nonempty-cell count at a level (shadow only).
  std::size_t nonempty_cells(int level) const {
    if (!opt_.exact_shadow) throw InputError("exact counts need the exact shadow");
    return shadow_.at(static_cast<std::size_t>(level)).size();
  }

  const std::map<std::uint64_t, std::int64_t>& shadow_level(int level) const {
    if (!opt_.exact_shadow) throw InputError("exact counts need the exact shadow");
    return shadow_.at(static_cast<std::size_t>(level));
  }

  /// Live points by location (shadow only).
  PointSet live_points() const {
    if (!opt_.exact_shadow) throw InputError("live points need the exact shadow");
    PointSet out;
    for (const auto& [loc, c] : locations_) {
      Point p;
      for (auto x : loc) p.coords.push_back(static_cast<double>(x));
      out.push_back({p, c});
    }
    return out;
  }

  std::size_t sketch_bytes() const {
    std::size_t b = 0;
    for (const auto& s : sr_) b += s.bytes();
    for (const auto& f : f0_) b += f.bytes();
    return b;
  }

  const SparseRecoverySketch& recovery_sketch(int level) const { return sr_.at(static_cast<std::size_t>(level)); }
  const F0Sketch& distinct_sketch(int level) const { return f0_.at(static_cast<std::size_t>(level)); }

  const GridConfig& grid() const { return grid_; }
  std::int64_t cell_budget() const { return s_; }
  std::int64_t live_count() const { return live_; }
  std::uint64_t ops() const { return ops_; }
  double per_query_delta() const { return per_query_delta_; }

 private:
  DynamicReport build(const std::map<std::uint64_t, std::int64_t>& cells, int level) const {
    DynamicReport r;
    r.level = level;
    for (const auto& [key, count] : cells) r.coreset.push_back({cell_center(cell_from_key(key, level, grid_)), count});
    return r;
  }

  GridConfig grid_;
  int k_;
  Weight z_;
  double eps_;
  DynamicOptions opt_;
  std::int64_t s_ = 0;
  double per_query_delta_ = 0;
  std::vector<SparseRecoverySketch> sr_;
  std::vector<F0Sketch> f0_;
  std::vector<std::map<std::uint64_t, std::int64_t>> shadow_;
  std::map<std::vector<std::int64_t>, std::int64_t> locations_;
  std::int64_t live_ = 0;
  std::uint64_t ops_ = 0;
};

}  // namespace kcoreset
