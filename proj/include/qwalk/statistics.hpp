#pragma once

#include <cmath>
#include <span>

namespace qwalk {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and standard error of the mean (n−1 normalization).
inline MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  long double s = 0.0L;
  for (double x : xs) s += x;
  const long double mean = s / static_cast<long double>(xs.size());
  out.mean = static_cast<double>(mean);
  if (xs.size() < 2) return out;
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const long double var = ss / static_cast<long double>(xs.size() - 1);
  out.stderr_ = static_cast<double>(std::sqrt(var / static_cast<long double>(xs.size())));
  return out;
}

}  // namespace qwalk
