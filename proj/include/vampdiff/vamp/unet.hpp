// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vampdiff/numcore/tensor.hpp"
#include "vampdiff/rng.hpp"
#include "vampdiff/vamp/config.hpp"
#include "vampdiff/vamp/layers.hpp"

namespace vampdiff::vamp {

// Sinusoidal embedding [B, dim] of integer timesteps.
nc::Tensor timestep_embedding(const std::vector<std::size_t>& t, std::size_t dim);

// Three-level 1-D U-Net predicting x0. The latent enters every level through
// FiLM: gamma, beta = split(conv1x1(resample(z, level length))).
class UNet {
 public:
  UNet() = default;
  UNet(const ModelConfig& config, Rng& rng);

  // x_t: [B, 1, L]; t: B timesteps; z: [B, C_z, any length].
  nc::Tensor predict_x0(const nc::Tensor& x_t, const std::vector<std::size_t>& t, const nc::Tensor& z) const;
  ParamList params() const;

  struct ResBlock {
    GroupNorm norm1;
    Conv1d conv1;
    Linear time_proj;
    GroupNorm norm2;
    Conv1d conv2;
  };

  std::size_t time_dim = 128;
  std::array<std::size_t, 3> channels{};
  Linear time_mlp1;
  Linear time_mlp2;
  Conv1d in_conv;
  std::array<std::vector<ResBlock>, 3> down_blocks;  // level 2 is the bottleneck
  std::array<std::vector<ResBlock>, 2> up_blocks;
  std::array<Conv1d, 3> film;
  std::array<Conv1d, 2> downsample;
  std::array<Conv1d, 2> upsample;
  GroupNorm out_norm;
  Conv1d out_conv;
};

}  // namespace vampdiff::vamp
