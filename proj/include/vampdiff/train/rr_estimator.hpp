// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vampdiff/rng.hpp"
#include "vampdiff/signal/window.hpp"
#include "vampdiff/vamp/layers.hpp"

namespace vampdiff::train {

namespace nc = vampdiff::nc;
using vamp::ParamList;

// 1D ResNet regressing respiratory rate from a PPG window: stride-2 stem,
// four pre-activation residual stages, global average pooling, MLP head.
class RrEstimator {
 public:
  static constexpr std::array<std::size_t, 4> kStageWidths{32, 64, 128, 128};
  static constexpr std::array<std::size_t, 4> kStageDilations{1, 2, 4, 8};

  RrEstimator() = default;
  RrEstimator(double width_factor, std::uint64_t seed);

  // x: [B, 1, L] -> normalized prediction [B].
  nc::Tensor forward(const nc::Tensor& x) const;
  // Breaths per minute for each window.
  std::vector<double> predict(const std::vector<signal::SignalWindow>& windows) const;
  ParamList params() const;

  struct Block {
    vamp::GroupNorm norm1;
    vamp::Conv1d conv1;
    vamp::GroupNorm norm2;
    vamp::Conv1d conv2;
    bool has_projection = false;
    vamp::Conv1d projection;
  };

  double width_factor = 0.125;
  vamp::Conv1d stem;
  std::vector<Block> blocks;
  vamp::Linear head1;
  vamp::Linear head2;
  // Label standardization used for the regression target.
  double label_mean = 0.0;
  double label_std = 1.0;
};

struct RrTrainConfig {
  double width_factor = 0.125;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double clip_norm = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// MSE on standardized labels. windows must be normalized.
RrEstimator train_rr_estimator(const std::vector<signal::SignalWindow>& windows, const std::vector<double>& rr_bpm,
                               const RrTrainConfig& config);

}  // namespace vampdiff::train
