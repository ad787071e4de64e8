#pragma once

#include <cmath>
#include <cstddef>
#include <future>
#include <span>
#include <thread>
#include <vector>

namespace bellising {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

inline constexpr std::size_t kPairwiseBlock = 256;

inline double pairwise_sum_serial(std::span<const double> xs) {
  if (xs.size() <= kPairwiseBlock) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum_serial(xs.first(half)) + pairwise_sum_serial(xs.subspan(half));
}

inline double pairwise_sum_parallel(std::span<const double> xs, unsigned depth) {
  if (depth == 0 || xs.size() <= kPairwiseBlock) return pairwise_sum_serial(xs);
  const std::size_t half = xs.size() / 2;
  auto left = std::async(std::launch::async, [xs, half, depth] {
    return pairwise_sum_parallel(xs.first(half), depth - 1);
  });
  const double right = pairwise_sum_parallel(xs.subspan(half), depth - 1);
  return left.get() + right;
}

}  // namespace detail

/// Pairwise sum with a fixed split tree. The tree does not depend on the
/// number of threads, so serial and parallel results are bit-identical.
inline double pairwise_sum(std::span<const double> xs, unsigned threads = 1) {
  unsigned depth = 0;
  while ((1u << (depth + 1)) <= threads && depth < 6) ++depth;
  return detail::pairwise_sum_parallel(xs, depth);
}

}  // namespace bellising
