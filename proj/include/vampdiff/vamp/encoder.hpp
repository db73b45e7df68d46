// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "vampdiff/numcore/tensor.hpp"
#include "vampdiff/rng.hpp"
#include "vampdiff/vamp/config.hpp"
#include "vampdiff/vamp/layers.hpp"

namespace vampdiff::vamp {

struct LatentPosterior {
  nc::Tensor mu;      // [B, C_z, T_z]
  nc::Tensor logvar;  // [B, C_z, T_z], clamped to [-10, 10]
};

inline constexpr double kLogvarMin = -10.0;
inline constexpr double kLogvarMax = 10.0;

// Five-layer convolutional stack with two stride-2 stages (T_z = L/4) and
// separate mean / log-variance heads.
class Encoder {
 public:
  Encoder() = default;
  Encoder(const ModelConfig& config, Rng& rng);

  // x0: [B, 1, L] with L divisible by 4.
  LatentPosterior encode(const nc::Tensor& x0) const;
  ParamList params() const;

  Conv1d stem;
  Conv1d down1;
  Conv1d mid1;
  Conv1d down2;
  Conv1d mid2;
  Conv1d head_mu;
  Conv1d head_logvar;
};

// z = mu + exp(logvar / 2) * noise.
nc::Tensor reparameterize(const LatentPosterior& post, const nc::Tensor& noise);

// Non-overlapping temporal mean over blocks of T / pooled_len samples.
nc::Tensor pool(const nc::Tensor& z, std::size_t pooled_len);

}  // namespace vampdiff::vamp
