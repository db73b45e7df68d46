// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/window.hpp"

#include <cmath>

#include "vampdiff/error.hpp"

namespace vampdiff::signal {

void NormStats::validate() const {
  if (!(sigma_train > 0.0) || !std::isfinite(sigma_train) || !std::isfinite(mu_train)) {
    throw ParameterError("sigma_train must be positive and finite, got " + std::to_string(sigma_train));
  }
}

NormStats fit_norm_stats(const std::vector<std::vector<double>>& windows) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& w : windows) {
    for (double v : w) sum += v;
    count += w.size();
  }
  if (count == 0) throw ParameterError("cannot fit normalization statistics on an empty set");
  const double mu = sum / static_cast<double>(count);
  double ss = 0.0;
  for (const auto& w : windows) {
    for (double v : w) ss += (v - mu) * (v - mu);
  }
  NormStats stats{mu, std::sqrt(ss / static_cast<double>(count))};
  stats.validate();
  return stats;
}

void SignalWindow::validate() const {
  if (samples.empty()) throw ParameterError("signal window is empty");
  if (!(fs > 0.0)) throw ParameterError("sample rate must be positive");
  if (normalized && !stats) throw ParameterError("normalized window without statistics");
  if (stats) stats->validate();
}

SignalWindow normalize(const SignalWindow& window, const NormStats& stats) {
  stats.validate();
  SignalWindow out = window;
  for (auto& v : out.samples) v = (v - stats.mu_train) / stats.sigma_train;
  out.normalized = true;
  out.stats = stats;
  return out;
}

SignalWindow denormalize(const SignalWindow& window, const NormStats& stats) {
  stats.validate();
  SignalWindow out = window;
  for (auto& v : out.samples) v = v * stats.sigma_train + stats.mu_train;
  out.normalized = false;
  out.stats.reset();
  return out;
}

}  // namespace vampdiff::signal
