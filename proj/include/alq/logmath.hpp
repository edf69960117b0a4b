#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace alq {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum exp(x_i)); -inf for an empty span or all -inf entries.
inline double log_sum_exp(std::span<const double> xs) {
  double peak = kNegInf;
  for (double x : xs) peak = std::max(peak, x);
  if (peak == kNegInf) return kNegInf;
  if (peak == std::numeric_limits<double>::infinity()) return peak;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

/// log(sum exp(scale * x_i)) without materialising the scaled vector.
inline double log_sum_exp_scaled(std::span<const double> xs, double scale) {
  double peak = kNegInf;
  for (double x : xs)
    if (x != kNegInf) peak = std::max(peak, scale * x);
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs)
    if (x != kNegInf) acc += std::exp(scale * x - peak);
  return peak + std::log(acc);
}

}  // namespace alq
