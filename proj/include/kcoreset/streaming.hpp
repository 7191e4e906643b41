#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/offline.hpp"

namespace kcoreset {

/// Size threshold k(16/eps)^d + z at which the insertion-only coreset coarsens.
inline std::int64_t stream_threshold(int k, Weight z, double epsilon, int d) {
  const double base = k * std::pow(16.0 / epsilon, d);
  if (!(base < 9007199254740992.0)) throw InputError("size threshold exceeds 2^53; use a larger epsilon");
  return static_cast<std::int64_t>(std::floor(base * (1.0 + 1e-12))) + z;
}

/// One-pass insertion-only coreset. Each arrival joins the first representative
/// within (eps/2)r or becomes a representative itself; once the representative
/// count reaches the threshold, r doubles and the set is re-netted at (eps/2)r.
///
/// With RecordHistory, every arrival's current representative is tracked
/// through the re-netting so the eps*r covering distance can be audited.
template <bool RecordHistory = false>
class InsertionStream {
 public:
  InsertionStream(int k, Weight z, double epsilon, int d, Metric metric)
      : k_(k), z_(z), eps_(epsilon), d_(d), metric_(std::move(metric)) {
    require_parameters(k, z, epsilon);
    if (d < 1) throw InputError("doubling dimension must be at least 1");
    threshold_ = stream_threshold(k, z, epsilon, d);
  }

  void handle_arrival(const Point& p) {
    if (dim_ == 0) {
      if (p.dimension() == 0) throw InputError("points need at least one coordinate");
      dim_ = p.dimension();
    } else if (p.dimension() != dim_) {
      throw InputError("dimension mismatch: expected " + std::to_string(dim_) + ", got " +
                       std::to_string(p.dimension()));
    }
    ++arrivals_;
    const double join = (eps_ / 2.0) * r_;
    std::size_t rep = coreset_.size();
    for (std::size_t i = 0; i < coreset_.size(); ++i) {
      if (within_radius(metric_(coreset_[i].point, p), join)) {
        rep = i;
        break;
      }
    }
    if (rep == coreset_.size()) {
      coreset_.push_back({p, 1});
    } else {
      ++coreset_[rep].weight;
    }
    if constexpr (RecordHistory) {
      history_.push_back(p);
      rep_of_.push_back(rep);
    }
    if (r_ == 0.0 && static_cast<Weight>(coreset_.size()) >= k_ + z_ + 1) {
      r_ = min_pairwise_distance(std::span<const WeightedPoint>(coreset_), metric_) / 2.0;
    }
    while (static_cast<std::int64_t>(coreset_.size()) >= threshold_) {
      r_ *= 2.0;
      auto net = detail::greedy_net(coreset_, (eps_ / 2.0) * r_, metric_);
      if constexpr (RecordHistory) {
        for (auto& idx : rep_of_) idx = net.assignment[idx];
      }
      coreset_ = std::move(net.representatives);
    }
  }

  const PointSet& report() const { return coreset_; }
  double radius() const { return r_; }
  std::int64_t threshold() const { return threshold_; }
  std::size_t arrivals() const { return arrivals_; }
  int k() const { return k_; }
  int doubling_dimension() const { return d_; }
  Weight z() const { return z_; }
  double epsilon() const { return eps_; }

  /// Largest distance from an arrival to its current representative.
  double max_representative_distance() const
    requires RecordHistory
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < history_.size(); ++i)
      worst = std::max(worst, metric_(history_[i], coreset_[rep_of_[i]].point));
    return worst;
  }

  const std::vector<Point>& history() const
    requires RecordHistory
  {
    return history_;
  }

 private:
  int k_;
  Weight z_;
  double eps_;
  int d_;
  Metric metric_;
  std::int64_t threshold_ = 0;
  std::size_t dim_ = 0;
  std::size_t arrivals_ = 0;
  double r_ = 0.0;
  PointSet coreset_;
  std::vector<Point> history_;
  std::vector<std::size_t> rep_of_;
};

}  // namespace kcoreset
