// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vampdiff/error.hpp"

namespace vampdiff::signal {

namespace {
void require_nonempty(std::span<const double> x, const char* what) {
  if (x.empty()) throw DomainError(std::string(what) + " of an empty sequence");
}
}  // namespace

double mean(std::span<const double> x) {
  require_nonempty(x, "mean");
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double pstdev(std::span<const double> x) {
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double percentile(std::span<const double> x, double q) {
  require_nonempty(x, "percentile");
  if (q < 0.0 || q > 100.0) throw ParameterError("percentile q must lie in [0, 100]");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> x) { return percentile(x, 50.0); }

double peak_to_peak(std::span<const double> x) {
  require_nonempty(x, "peak_to_peak");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

}  // namespace vampdiff::signal
