// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vampdiff/error.hpp"

namespace vampdiff::vamp {

std::string_view to_string(PooledVariance v) {
  return v == PooledVariance::kPooledParameters ? "pooled_parameters" : "pushforward";
}
std::string_view to_string(PriorKind v) { return v == PriorKind::kVamp ? "vamp" : "standard_normal"; }
std::string_view to_string(Conditioning v) { return v == Conditioning::kFull ? "full" : "pooled"; }

PooledVariance pooled_variance_from_string(std::string_view s) {
  if (s == "pooled_parameters") return PooledVariance::kPooledParameters;
  if (s == "pushforward") return PooledVariance::kPushforward;
  throw ConfigError("unknown pooled_variance '" + std::string(s) + "'");
}

PriorKind prior_kind_from_string(std::string_view s) {
  if (s == "vamp") return PriorKind::kVamp;
  if (s == "standard_normal") return PriorKind::kStandardNormal;
  throw ConfigError("unknown prior '" + std::string(s) + "'");
}

Conditioning conditioning_from_string(std::string_view s) {
  if (s == "full") return Conditioning::kFull;
  if (s == "pooled") return Conditioning::kPooled;
  throw ConfigError("unknown conditioning '" + std::string(s) + "'");
}

std::array<std::size_t, 3> ModelConfig::widths() const {
  std::array<std::size_t, 3> out{};
  const double base[3] = {64.0, 128.0, 256.0};
  for (int i = 0; i < 3; ++i) out[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(base[i] * width_factor)));
  return out;
}

void ModelConfig::validate() const {
  if (window_len < 8 || window_len % 4 != 0) {
    throw ConfigError("window_len must be a positive multiple of 4, got " + std::to_string(window_len));
  }
  if (latent_channels == 0) throw ConfigError("latent_channels must be positive");
  if (pooled_len == 0 || latent_len() % pooled_len != 0) {
    throw ConfigError("pooled_len must divide the latent length " + std::to_string(latent_len()));
  }
  if (num_pseudo == 0) throw ConfigError("num_pseudo must be positive");
  if (diffusion_steps < 2) throw ConfigError("diffusion_steps must be >= 2");
  if (!(width_factor > 0.0)) throw ConfigError("width_factor must be positive");
  if (time_dim < 2 || time_dim % 2 != 0) throw ConfigError("time_dim must be even and >= 2");
  if (blocks_per_level == 0) throw ConfigError("blocks_per_level must be positive");
  if (!(beta_start_ref > 0.0 && beta_start_ref < beta_end_ref)) throw ConfigError("need 0 < beta_start_ref < beta_end_ref");
  if (beta_end_ref * 1000.0 / static_cast<double>(diffusion_steps) >= 1.0) {
    throw ConfigError("scaled beta_end must stay below 1");
  }
}

}  // namespace vampdiff::vamp
