#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace fpdot {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Compensated (Kahan) summation. Keeps mass sums accurate and independent
/// of how callers might later chunk the data.
inline double kahan_sum(std::span<const double> xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// Max-shifted log(sum(exp(xs))). Entries of -inf drop out; an all(-inf)
/// input yields -inf without producing NaN.
inline double logsumexp(std::span<const double> xs) {
  double max_val = kNegInf;
  for (double x : xs) {
    if (x > max_val) max_val = x;
  }
  if (max_val == kNegInf) return kNegInf;
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    double y = std::exp(x - max_val) - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return max_val + std::log(sum);
}

/// Uniform draw in [0, 1) from the top 53 bits of the generator output.
/// Used instead of std::uniform_real_distribution so that seeded sequences
/// are identical across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fpdot
