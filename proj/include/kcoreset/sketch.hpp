#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "kcoreset/errors.hpp"

namespace kcoreset {

/// Arithmetic in the prime field of order 2^61 - 1.
namespace field {

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t reduce(unsigned __int128 x) {
  std::uint64_t lo = static_cast<std::uint64_t>(x & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  std::uint64_t r = lo + hi;
  if (r >= kPrime) r -= kPrime;
  if (r >= kPrime) r -= kPrime;
  return r;
}

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r >= kPrime ? r - kPrime : r;
}

inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  return reduce(static_cast<unsigned __int128>(a) * b);
}

inline std::uint64_t pow(std::uint64_t base, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t inverse(std::uint64_t a) { return pow(a, kPrime - 2); }

/// Field image of a signed integer.
inline std::uint64_t from_signed(std::int64_t v) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % kPrime;
  return sub(0, static_cast<std::uint64_t>(-(v + 1)) % kPrime + 1);
}

}  // namespace field

/// h(x) = (a x + b) mod p, a pairwise-independent family.
struct PairwiseHash {
  std::uint64_t a = 1, b = 0;

  static PairwiseHash draw(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> nonzero(1, field::kPrime - 1), any(0, field::kPrime - 1);
    return {nonzero(rng), any(rng)};
  }
  std::uint64_t operator()(std::uint64_t x) const { return field::add(field::mul(a, x), b); }
  friend bool operator==(const PairwiseHash&, const PairwiseHash&) = default;
};

inline void require_sketch_id(std::uint64_t id) {
  if (id >= field::kPrime) throw InputError("sketch item ids must be below 2^61 - 1");
}

struct RecoveredItem {
  std::uint64_t id;
  std::int64_t count;
  friend bool operator==(const RecoveredItem&, const RecoveredItem&) = default;
};

struct RecoveryResult {
  bool complete = false;              // every bucket emptied by peeling
  std::vector<RecoveredItem> items;   // verified items, sorted by id
};

/// Linear s-sparse recovery sketch. Each of `rows` repetitions hashes ids into
/// 2s buckets holding (count, sum of ids, sum of z^id) with a per-row random z;
/// queries peel buckets whose three sums are consistent with a single id.
class SparseRecoverySketch {
 public:
  SparseRecoverySketch(std::size_t s, double delta, std::uint64_t seed) : s_(std::max<std::size_t>(s, 1)) {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("failure probability must lie in (0, 1)");
    rows_ = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(static_cast<double>(s_) / delta))));
    width_ = 2 * s_;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> base(2, field::kPrime - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
      hashes_.push_back(PairwiseHash::draw(rng));
      bases_.push_back(base(rng));
    }
    buckets_.assign(rows_ * width_, Bucket{});
  }

  void update(std::uint64_t id, std::int64_t delta) {
    require_sketch_id(id);
    const std::uint64_t fd = field::from_signed(delta);
    const std::uint64_t fid = field::mul(fd, id);
    for (std::size_t r = 0; r < rows_; ++r) {
      Bucket& b = buckets_[r * width_ + slot(r, id)];
      b.count += delta;
      b.id_sum = field::add(b.id_sum, fid);
      b.fingerprint = field::add(b.fingerprint, field::mul(fd, field::pow(bases_[r], id)));
    }
  }

  RecoveryResult query() const {
    std::vector<Bucket> work = buckets_;
    RecoveryResult out;
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) {
          const Bucket& b = work[r * width_ + c];
          if (b.count == 0) continue;
          std::uint64_t id = 0;
          if (!pure(r, c, b, id)) continue;
          if (b.count < 0) return out;  // strict turnstile violated; nothing more is trustworthy
          const std::int64_t cnt = b.count;
          out.items.push_back({id, cnt});
          const std::uint64_t fd = field::from_signed(-cnt);
          const std::uint64_t fid = field::mul(fd, id);
          for (std::size_t rr = 0; rr < rows_; ++rr) {
            Bucket& t = work[rr * width_ + slot(rr, id)];
            t.count -= cnt;
            t.id_sum = field::add(t.id_sum, fid);
            t.fingerprint = field::add(t.fingerprint, field::mul(fd, field::pow(bases_[rr], id)));
          }
          progress = true;
        }
      }
    }
    out.complete = std::all_of(work.begin(), work.end(), [](const Bucket& b) {
      return b.count == 0 && b.id_sum == 0 && b.fingerprint == 0;
    });
    std::sort(out.items.begin(), out.items.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
  }

  void merge(const SparseRecoverySketch& o) {
    if (o.hashes_ != hashes_ || o.bases_ != bases_ || o.width_ != width_) {
      throw InputError("cannot merge sketches with different parameters or seeds");
    }
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
      buckets_[i].count += o.buckets_[i].count;
      buckets_[i].id_sum = field::add(buckets_[i].id_sum, o.buckets_[i].id_sum);
      buckets_[i].fingerprint = field::add(buckets_[i].fingerprint, o.buckets_[i].fingerprint);
    }
  }

  bool empty() const {
    return std::all_of(buckets_.begin(), buckets_.end(), [](const Bucket& b) { return b == Bucket{}; });
  }

  std::size_t sparsity() const { return s_; }
  std::size_t rows() const { return rows_; }
  std::size_t width() const { return width_; }
  std::size_t bytes() const { return buckets_.size() * sizeof(Bucket); }

  friend bool operator==(const SparseRecoverySketch& a, const SparseRecoverySketch& b) {
    return a.hashes_ == b.hashes_ && a.bases_ == b.bases_ && a.buckets_ == b.buckets_;
  }

 private:
  struct Bucket {
    std::int64_t count = 0;
    std::uint64_t id_sum = 0;
    std::uint64_t fingerprint = 0;
    friend bool operator==(const Bucket&, const Bucket&) = default;
  };

  std::size_t slot(std::size_t row, std::uint64_t id) const { return hashes_[row](id) % width_; }

  bool pure(std::size_t r, std::size_t c, const Bucket& b, std::uint64_t& id) const {
    const std::uint64_t fc = field::from_signed(b.count);
    id = field::mul(b.id_sum, field::inverse(fc));
    if (slot(r, id) != c) return false;
    return b.fingerprint == field::mul(fc, field::pow(bases_[r], id));
  }

  std::size_t s_, rows_ = 0, width_ = 0;
  std::vector<PairwiseHash> hashes_;
  std::vector<std::uint64_t> bases_;
  std::vector<Bucket> buckets_;
};

/// Linear distinct-count estimator. Each repetition samples ids at geometric
/// rates (level l keeps ids whose level hash has at least l trailing zeros) and
/// hashes the survivors of each level into B buckets holding a random linear
/// combination of frequencies; nonzero buckets are counted and inverted by the
/// balls-into-bins occupancy formula. The answer is the median over repetitions.
class F0Sketch {
 public:
  F0Sketch(double eps_est, double delta, std::uint64_t seed, int levels = 32) : levels_(levels) {
    if (!(eps_est > 0.0 && eps_est < 1.0)) throw InputError("estimator accuracy must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("failure probability must lie in (0, 1)");
    if (levels < 1 || levels > 60) throw InputError("level count must lie in [1, 60]");
    width_ = static_cast<std::size_t>(std::ceil(32.0 / (eps_est * eps_est)));
    reps_ = static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta)));
    if (reps_ % 2 == 0) ++reps_;
    std::mt19937_64 rng(seed);
    for (std::size_t r = 0; r < reps_; ++r) {
      level_hash_.push_back(PairwiseHash::draw(rng));
      for (int l = 0; l <= levels_; ++l) {
        bucket_hash_.push_back(PairwiseHash::draw(rng));
        value_hash_.push_back(PairwiseHash::draw(rng));
      }
    }
    cells_.assign(reps_ * static_cast<std::size_t>(levels_ + 1) * width_, 0);
  }

  void update(std::uint64_t id, std::int64_t delta) {
    require_sketch_id(id);
    const std::uint64_t fd = field::from_signed(delta);
    for (std::size_t r = 0; r < reps_; ++r) {
      const int top = level_of(r, id);
      for (int l = 0; l <= top; ++l) {
        const std::size_t t = table(r, l);
        std::uint64_t& cell = cells_[t * width_ + bucket_hash_[t](id) % width_];
        // value hash is nonzero except with probability 1/p
        cell = field::add(cell, field::mul(fd, value_hash_[t](id)));
      }
    }
  }

  double query() const {
    std::vector<double> est;
    for (std::size_t r = 0; r < reps_; ++r) est.push_back(estimate_rep(r));
    std::nth_element(est.begin(), est.begin() + static_cast<std::ptrdiff_t>(est.size() / 2), est.end());
    return est[est.size() / 2];
  }

  void merge(const F0Sketch& o) {
    if (o.level_hash_ != level_hash_ || o.bucket_hash_ != bucket_hash_ || o.value_hash_ != value_hash_) {
      throw InputError("cannot merge sketches with different parameters or seeds");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] = field::add(cells_[i], o.cells_[i]);
  }

  bool empty() const {
    return std::all_of(cells_.begin(), cells_.end(), [](std::uint64_t c) { return c == 0; });
  }

  std::size_t repetitions() const { return reps_; }
  std::size_t width() const { return width_; }
  std::size_t bytes() const { return cells_.size() * sizeof(std::uint64_t); }

  friend bool operator==(const F0Sketch& a, const F0Sketch& b) {
    return a.level_hash_ == b.level_hash_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t table(std::size_t rep, int level) const {
    return rep * static_cast<std::size_t>(levels_ + 1) + static_cast<std::size_t>(level);
  }

  int level_of(std::size_t rep, std::uint64_t id) const {
    const std::uint64_t h = level_hash_[rep](id);
    if (h == 0) return levels_;
    return std::min(levels_, std::countr_zero(h));
  }

  double estimate_rep(std::size_t r) const {
    const double b = static_cast<double>(width_);
    for (int l = 0; l <= levels_; ++l) {
      const std::size_t t = table(r, l);
      std::size_t nonzero = 0;
      for (std::size_t c = 0; c < width_; ++c) nonzero += cells_[t * width_ + c] != 0;
      if (nonzero == 0 && l == 0) return 0.0;
      if (2 * nonzero <= width_ || l == levels_) {
        const double x = std::min(static_cast<double>(nonzero), b - 1.0);
        const double occupied = std::log(1.0 - x / b) / std::log(1.0 - 1.0 / b);
        return std::ldexp(occupied, l);
      }
    }
    return 0.0;
  }

  int levels_;
  std::size_t width_ = 0, reps_ = 0;
  std::vector<PairwiseHash> level_hash_, bucket_hash_, value_hash_;
  std::vector<std::uint64_t> cells_;
};

}  // namespace kcoreset
