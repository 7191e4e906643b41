#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/offline.hpp"

namespace kcoreset {

enum class DistributionKind { Adversarial, RoundRobin, Random };

/// How input points are spread over machines 1..m.
struct Distribution {
  DistributionKind kind = DistributionKind::RoundRobin;
  std::vector<int> assignment;  // Adversarial: machine (1-based) of each input point
  std::uint64_t seed = 0;       // Random

  static Distribution round_robin() { return {DistributionKind::RoundRobin, {}, 0}; }
  static Distribution random(std::uint64_t seed) { return {DistributionKind::Random, {}, seed}; }
  static Distribution adversarial(std::vector<int> a) { return {DistributionKind::Adversarial, std::move(a), 0}; }
};

struct MpcConfig {
  int machines = 2;
  Distribution distribution;
};

/// Machine (1-based) of every input point.
inline std::vector<int> assign_machines(std::size_t n, const MpcConfig& cfg) {
  if (cfg.machines < 1) throw InputError("need at least one machine");
  std::vector<int> out(n);
  switch (cfg.distribution.kind) {
    case DistributionKind::RoundRobin:
      for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<int>(j % static_cast<std::size_t>(cfg.machines)) + 1;
      break;
    case DistributionKind::Random: {
      std::mt19937_64 rng(cfg.distribution.seed);
      std::uniform_int_distribution<int> pick(1, cfg.machines);
      for (auto& a : out) a = pick(rng);
      break;
    }
    case DistributionKind::Adversarial:
      if (cfg.distribution.assignment.size() != n) {
        throw InputError("assignment lists " + std::to_string(cfg.distribution.assignment.size()) +
                         " machines for " + std::to_string(n) + " points");
      }
      for (std::size_t j = 0; j < n; ++j) {
        const int a = cfg.distribution.assignment[j];
        if (a < 1 || a > cfg.machines) throw InputError("assignment names machine " + std::to_string(a));
        out[j] = a;
      }
      break;
  }
  return out;
}

/// Parts indexed by machine - 1.
inline std::vector<PointSet> distribute(std::span<const WeightedPoint> P, const MpcConfig& cfg) {
  const auto a = assign_machines(P.size(), cfg);
  std::vector<PointSet> parts(static_cast<std::size_t>(cfg.machines));
  for (std::size_t j = 0; j < P.size(); ++j) parts[static_cast<std::size_t>(a[j] - 1)].push_back(P[j]);
  return parts;
}

struct TranscriptEntry {
  int send_round = 0;
  int read_round = 0;
  int from = 0;
  int to = 0;
  std::string kind;
  std::size_t words = 0;
  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct Message {
  int from = 0;
  std::string kind;
  PointSet points;
  std::vector<double> values;
};

/// Synchronous rounds: messages sent in round t become readable in round t+1,
/// delivered in sender order. Storage is metered per machine by the protocol.
class Simulator {
 public:
  Simulator(int machines, std::size_t point_words) : m_(machines), point_words_(point_words),
        outbox_(static_cast<std::size_t>(machines)), inbox_(static_cast<std::size_t>(machines)),
        peak_(static_cast<std::size_t>(machines), 0) {}

  int round() const { return round_; }

  void begin_round() {
    ++round_;
    for (auto& box : inbox_) box.clear();
    for (std::size_t i = 0; i < outbox_.size(); ++i) {
      std::stable_sort(outbox_[i].begin(), outbox_[i].end(),
                       [](const Message& a, const Message& b) { return a.from < b.from; });
      inbox_[i] = std::move(outbox_[i]);
      outbox_[i].clear();
    }
    for (auto& e : transcript_)
      if (e.read_round == 0) e.read_round = round_;
    volume_.push_back(0);
  }

  void send(int from, int to, Message msg) {
    msg.from = from;
    const std::size_t w = words(msg);
    transcript_.push_back({round_, 0, from, to, msg.kind, w});
    volume_.back() += w;
    outbox_.at(static_cast<std::size_t>(to - 1)).push_back(std::move(msg));
  }

  const std::vector<Message>& inbox(int machine) const { return inbox_.at(static_cast<std::size_t>(machine - 1)); }

  std::size_t words(const Message& msg) const { return msg.points.size() * point_words_ + msg.values.size(); }
  std::size_t words(const PointSet& pts) const { return pts.size() * point_words_; }

  void meter(int machine, std::size_t words) {
    auto& p = peak_.at(static_cast<std::size_t>(machine - 1));
    p = std::max(p, words);
  }

  /// Rounds in which at least one message was sent.
  int communication_rounds() const {
    int r = 0;
    for (const auto& e : transcript_) r = std::max(r, e.send_round);
    return r;
  }

  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  const std::vector<std::size_t>& peaks() const { return peak_; }
  const std::vector<std::size_t>& volume_per_round() const { return volume_; }

 private:
  int m_;
  std::size_t point_words_;
  int round_ = 0;
  std::vector<std::vector<Message>> outbox_, inbox_;
  std::vector<std::size_t> peak_;
  std::vector<TranscriptEntry> transcript_;
  std::vector<std::size_t> volume_;
};

struct MpcRun {
  int rounds_used = 0;
  std::vector<std::size_t> per_machine_peak_words;
  std::size_t coordinator_peak_words = 0;  // while acting as coordinator
  std::vector<std::size_t> messages_per_round;  // words sent in each round
  PointSet coreset;
  std::vector<TranscriptEntry> transcript;
  std::vector<int> assignment;

  // two-round protocol
  std::vector<std::vector<double>> outlier_vectors;
  double r_hat = 0.0;
  std::vector<int> j_hat;
  PointSet coordinator_union;

  // one-round protocol
  Weight z_prime = 0;

  // R-round protocol
  int beta = 0;
  std::vector<int> active_per_round;
};

/// Entries of the outlier vector: ceil(log2(z+1)) + 1.
inline int outlier_vector_length(Weight z) {
  int bits = 0;
  while ((Weight{1} << bits) < z + 1) ++bits;
  return bits + 1;
}

/// V[j] = greedy radius with 2^j - 1 outliers allowed.
inline std::vector<double> outlier_vector(std::span<const WeightedPoint> part, int k, Weight z, const Metric& m) {
  const int len = outlier_vector_length(z);
  std::vector<double> v;
  for (int j = 0; j < len; ++j) v.push_back(greedy(part, k, (Weight{1} << j) - 1, m).radius);
  return v;
}

struct RadiusEstimate {
  double r_hat = 0.0;
  std::vector<int> j_hat;
};

/// Smallest reported radius r at which the per-machine outlier budgets
/// 2^{j_l} - 1, with j_l = min{j : V_l[j] <= r}, sum to at most 2z. A radius
/// where some machine has no entry <= r is excluded.
inline RadiusEstimate compute_r_hat(const std::vector<std::vector<double>>& vectors, Weight z) {
  std::vector<double> radii;
  for (const auto& v : vectors) radii.insert(radii.end(), v.begin(), v.end());
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  for (double r : radii) {
    RadiusEstimate est{r, {}};
    Weight budget = 0;
    bool ok = true;
    for (const auto& v : vectors) {
      auto it = std::find_if(v.begin(), v.end(), [&](double x) { return x <= r; });
      if (it == v.end()) {
        ok = false;
        break;
      }
      const int j = static_cast<int>(it - v.begin());
      est.j_hat.push_back(j);
      budget += (Weight{1} << j) - 1;
    }
    if (ok && budget <= 2 * z) return est;
  }
  throw InputError("no feasible radius among the outlier vectors");
}

namespace detail {

inline std::size_t point_words(std::span<const WeightedPoint> P) {
  return (P.empty() ? 1 : P.front().point.dimension()) + 1;
}

inline PointSet gather(const std::vector<Message>& inbox) {
  PointSet out;
  for (const auto& msg : inbox) out.insert(out.end(), msg.points.begin(), msg.points.end());
  return out;
}

inline std::size_t inbox_words(const Simulator& sim, int machine) {
  std::size_t w = 0;
  for (const auto& msg : sim.inbox(machine)) w += sim.words(msg);
  return w;
}

}  // namespace detail

/// Two communication rounds: machines broadcast outlier vectors, agree on r_hat
/// and per-machine outlier budgets, then ship budgeted coverings to machine 1,
/// which reduces their union with the global budget z.
inline MpcRun run_two_round(std::span<const WeightedPoint> P, int k, Weight z, double epsilon, const MpcConfig& cfg,
                            const Metric& metric) {
  require_parameters(k, z, epsilon);
  if (cfg.machines < 2) throw InputError("the two-round protocol needs at least two machines");
  const int m = cfg.machines;
  MpcRun run;
  run.assignment = assign_machines(P.size(), cfg);
  const auto parts = distribute(P, cfg);
  Simulator sim(m, detail::point_words(P));
  const std::size_t len = static_cast<std::size_t>(outlier_vector_length(z));

  sim.begin_round();
  run.outlier_vectors.resize(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    const auto& part = parts[static_cast<std::size_t>(i - 1)];
    auto v = outlier_vector(part, k, z, metric);
    sim.meter(i, sim.words(part) + len);
    for (int to = 1; to <= m; ++to)
      if (to != i) sim.send(i, to, {0, "outlier_vector", {}, v});
    run.outlier_vectors[static_cast<std::size_t>(i - 1)] = std::move(v);
  }

  sim.begin_round();
  run.j_hat.resize(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    const auto& part = parts[static_cast<std::size_t>(i - 1)];
    std::vector<std::vector<double>> vectors(static_cast<std::size_t>(m));
    vectors[static_cast<std::size_t>(i - 1)] = run.outlier_vectors[static_cast<std::size_t>(i - 1)];
    for (const auto& msg : sim.inbox(i)) vectors[static_cast<std::size_t>(msg.from - 1)] = msg.values;
    const auto est = compute_r_hat(vectors, z);
    const int j = est.j_hat[static_cast<std::size_t>(i - 1)];
    if (i == 1) run.r_hat = est.r_hat;
    run.j_hat[static_cast<std::size_t>(i - 1)] = j;
    auto cov = mbc_construction(part, k, (Weight{1} << j) - 1, epsilon, metric).representatives;
    sim.meter(i, sim.words(part) + static_cast<std::size_t>(m) * len + sim.words(cov));
    sim.send(i, 1, {0, "covering", std::move(cov), {}});
  }

  // Machine 1 reads the coverings; its own part is no longer needed.
  sim.begin_round();
  run.coordinator_union = detail::gather(sim.inbox(1));
  run.coordinator_peak_words = static_cast<std::size_t>(m) * len + detail::inbox_words(sim, 1);
  sim.meter(1, run.coordinator_peak_words);
  run.coreset = mbc_construction(run.coordinator_union, k, z, epsilon, metric).representatives;

  run.rounds_used = sim.communication_rounds();
  run.per_machine_peak_words = sim.peaks();
  run.messages_per_round = sim.volume_per_round();
  run.messages_per_round.pop_back();  // the read-only final round
  run.transcript = sim.transcript();
  return run;
}

/// Outlier budget min(ceil(6z/m + 3 log2 n), z) used on each machine.
inline Weight one_round_budget(Weight z, int machines, std::size_t n) {
  if (n == 0) return 0;
  const double b = 6.0 * static_cast<double>(z) / machines + 3.0 * std::log2(static_cast<double>(n));
  return std::min(static_cast<Weight>(std::ceil(b - 1e-12)), z);
}

/// One communication round under a random distribution: every machine ships a
/// covering built with the reduced budget z' to machine 1.
inline MpcRun run_one_round_randomized(std::span<const WeightedPoint> P, int k, Weight z, double epsilon,
                                       const MpcConfig& cfg, const Metric& metric) {
  require_parameters(k, z, epsilon);
  if (cfg.distribution.kind != DistributionKind::Random) {
    throw InputError("the one-round protocol needs a random distribution");
  }
  const int m = cfg.machines;
  MpcRun run;
  run.assignment = assign_machines(P.size(), cfg);
  const auto parts = distribute(P, cfg);
  run.z_prime = one_round_budget(z, m, P.size());
  Simulator sim(m, detail::point_words(P));

  sim.begin_round();
  for (int i = 1; i <= m; ++i) {
    const auto& part = parts[static_cast<std::size_t>(i - 1)];
    auto cov = mbc_construction(part, k, run.z_prime, epsilon, metric).representatives;
    sim.meter(i, sim.words(part) + sim.words(cov));
    sim.send(i, 1, {0, "covering", std::move(cov), {}});
  }

  sim.begin_round();
  run.coordinator_union = detail::gather(sim.inbox(1));
  run.coordinator_peak_words = detail::inbox_words(sim, 1);
  sim.meter(1, run.coordinator_peak_words);
  run.coreset = mbc_construction(run.coordinator_union, k, z, epsilon, metric).representatives;

  run.rounds_used = sim.communication_rounds();
  run.per_machine_peak_words = sim.peaks();
  run.messages_per_round = sim.volume_per_round();
  run.messages_per_round.pop_back();
  run.transcript = sim.transcript();
  return run;
}

/// Smallest integer beta with beta^R >= m.
inline int fan_in(int machines, int rounds) {
  if (machines < 1 || rounds < 1) throw InputError("need at least one machine and one round");
  for (int beta = 1;; ++beta) {
    double p = 1.0;
    for (int t = 0; t < rounds; ++t) p *= beta;
    if (p >= machines) return beta;
  }
}

/// R rounds of beta-way fan-in: in round t the first ceil(m / beta^(t-1))
/// machines build a covering of what they hold and send it to machine
/// ceil(i / beta). Machine 1 ends with the union it receives in round R.
inline MpcRun run_r_round(std::span<const WeightedPoint> P, int k, Weight z, double epsilon, int rounds,
                          const MpcConfig& cfg, const Metric& metric) {
  require_parameters(k, z, epsilon);
  const int m = cfg.machines;
  MpcRun run;
  run.beta = fan_in(m, rounds);
  run.assignment = assign_machines(P.size(), cfg);
  const auto parts = distribute(P, cfg);
  Simulator sim(m, detail::point_words(P));

  int active = m;
  for (int t = 1; t <= rounds; ++t) {
    sim.begin_round();
    run.active_per_round.push_back(active);
    for (int i = 1; i <= active; ++i) {
      const PointSet held = t == 1 ? parts[static_cast<std::size_t>(i - 1)] : detail::gather(sim.inbox(i));
      auto cov = mbc_construction(held, k, z, epsilon, metric).representatives;
      sim.meter(i, sim.words(held) + sim.words(cov));
      sim.send(i, (i + run.beta - 1) / run.beta, {0, "covering", std::move(cov), {}});
    }
    active = (active + run.beta - 1) / run.beta;
  }
  sim.begin_round();
  run.active_per_round.push_back(active);
  run.coreset = detail::gather(sim.inbox(1));
  run.coordinator_union = run.coreset;
  run.coordinator_peak_words = detail::inbox_words(sim, 1);
  sim.meter(1, run.coordinator_peak_words);

  run.rounds_used = sim.communication_rounds();
  run.per_machine_peak_words = sim.peaks();
  run.messages_per_round = sim.volume_per_round();
  run.messages_per_round.pop_back();
  run.transcript = sim.transcript();
  return run;
}

/// Input weight per machine lying outside every ball of radius `radius`
/// around `centers`.
inline std::vector<Weight> outliers_per_machine(std::span<const WeightedPoint> P, const std::vector<int>& assignment,
                                                int machines, const std::vector<Point>& centers, double radius,
                                                const Metric& metric) {
  std::vector<Weight> out(static_cast<std::size_t>(machines), 0);
  for (std::size_t j = 0; j < P.size(); ++j) {
    bool covered = false;
    for (const auto& c : centers) covered = covered || within_radius(metric(P[j].point, c), radius);
    if (!covered) out[static_cast<std::size_t>(assignment[j] - 1)] += P[j].weight;
  }
  return out;
}

/// Storage bound for machine 1 in the two-round protocol:
/// sum_i (k(12/eps)^d + 2^{j_i} - 1)(d+1) + m(ceil(log2(z+1)) + 1).
inline double two_round_coordinator_bound(int k, Weight z, double epsilon, int d, std::size_t point_dim,
                                          const std::vector<int>& j_hat) {
  double total = 0.0;
  for (int j : j_hat)
    total += (k * std::pow(12.0 / epsilon, d) + static_cast<double>((Weight{1} << j) - 1)) *
             static_cast<double>(point_dim + 1);
  return total + static_cast<double>(j_hat.size()) * outlier_vector_length(z);
}

}  // namespace kcoreset
