// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace vampdiff::vamp {

// How the pooled Gaussian's variance is formed from the temporal one.
enum class PooledVariance {
  kPooledParameters,  // mean of variances
  kPushforward,       // variance of the mean: mean of variances / pool width
};

enum class PriorKind { kVamp, kStandardNormal };

// Decoder conditioning: the full temporal latent or its pooled summary.
enum class Conditioning { kFull, kPooled };

std::string_view to_string(PooledVariance v);
std::string_view to_string(PriorKind v);
std::string_view to_string(Conditioning v);
PooledVariance pooled_variance_from_string(std::string_view s);
PriorKind prior_kind_from_string(std::string_view s);
Conditioning conditioning_from_string(std::string_view s);

struct ModelConfig {
  std::size_t window_len = 768;
  std::size_t latent_channels = 32;
  std::size_t pooled_len = 8;
  std::size_t num_pseudo = 16;
  std::size_t diffusion_steps = 50;
  double width_factor = 0.125;
  std::size_t time_dim = 128;
  std::size_t blocks_per_level = 2;
  double logvar_bias_init = 0.0;
  // Linear schedule endpoints quoted for a 1000-step chain; rescaled by 1000/T.
  double beta_start_ref = 1e-4;
  double beta_end_ref = 0.02;
  PooledVariance pooled_variance = PooledVariance::kPooledParameters;
  PriorKind prior = PriorKind::kVamp;
  Conditioning conditioning = Conditioning::kFull;

  std::size_t latent_len() const { return window_len / 4; }
  // Hidden widths (64, 128, 256) scaled by width_factor.
  std::array<std::size_t, 3> widths() const;
  void validate() const;
};

}  // namespace vampdiff::vamp
