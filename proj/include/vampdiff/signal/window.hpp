// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vampdiff::signal {

struct NormStats {
  double mu_train = 0.0;
  double sigma_train = 1.0;

  void validate() const;
};

// Training-set statistics pooled over every sample of every window.
NormStats fit_norm_stats(const std::vector<std::vector<double>>& windows);

struct SignalWindow {
  std::vector<double> samples;
  double fs = 0.0;
  bool normalized = false;
  std::optional<NormStats> stats;  // set iff normalized
  std::string source_id;
  std::size_t start_index = 0;

  std::size_t length() const { return samples.size(); }
  void validate() const;
};

SignalWindow normalize(const SignalWindow& window, const NormStats& stats);
SignalWindow denormalize(const SignalWindow& window, const NormStats& stats);

}  // namespace vampdiff::signal
