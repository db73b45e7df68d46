// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/corrupt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vampdiff/error.hpp"
#include "vampdiff/rng.hpp"
#include "vampdiff/signal/stats.hpp"

namespace vampdiff::signal {

std::string_view to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kNoise:
      return "noise";
    case CorruptionKind::kBaseline:
      return "baseline";
    case CorruptionKind::kClip:
      return "clip";
    case CorruptionKind::kFlatline:
      return "flatline";
  }
  return "unknown";
}

CorruptionKind corruption_kind_from_string(std::string_view name) {
  for (auto k : {CorruptionKind::kNoise, CorruptionKind::kBaseline, CorruptionKind::kClip, CorruptionKind::kFlatline}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown corruption kind '" + std::string(name) + "'");
}

void CorruptionSpec::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  switch (kind) {
    case CorruptionKind::kNoise:
      if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be non-negative");
      break;
    case CorruptionKind::kBaseline:
      if (!(wander_amplitude >= 0.0)) throw ParameterError("wander amplitude must be non-negative");
      if (!(wander_freq_lo > 0.0 && wander_freq_lo <= wander_freq_hi)) {
        throw ParameterError("wander frequency range must satisfy 0 < lo <= hi");
      }
      break;
    case CorruptionKind::kClip:
      if (!in_unit(clip_fraction)) throw ParameterError("clip fraction must lie in (0, 1]");
      break;
    case CorruptionKind::kFlatline:
      if (!in_unit(flat_duration)) throw ParameterError("flatline duration must lie in (0, 1]");
      if (!(flat_start >= 0.0 && flat_start + flat_duration <= 1.0 + 1e-12)) {
        throw ParameterError("flatline segment must lie inside the window");
      }
      break;
  }
}

SignalWindow corrupt(const SignalWindow& window, const CorruptionSpec& spec, std::uint64_t seed) {
  spec.validate();
  window.validate();
  SignalWindow out = window;
  auto& x = out.samples;
  const std::size_t n = x.size();
  Rng rng(seed);
  switch (spec.kind) {
    case CorruptionKind::kNoise:
      if (spec.noise_sigma > 0.0) {
        for (auto& v : x) v += spec.noise_sigma * rng.normal();
      }
      break;
    case CorruptionKind::kBaseline: {
      const double freq = rng.uniform(spec.wander_freq_lo, spec.wander_freq_hi);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / window.fs;
        x[i] += spec.wander_amplitude * std::sin(2.0 * std::numbers::pi * freq * t + phase);
      }
      break;
    }
    case CorruptionKind::kClip: {
      const double med = median(window.samples);
      const auto [mn, mx] = std::minmax_element(window.samples.begin(), window.samples.end());
      const double lo = *mn + (1.0 - spec.clip_fraction) * (med - *mn);
      const double hi = *mx - (1.0 - spec.clip_fraction) * (*mx - med);
      for (auto& v : x) v = std::clamp(v, lo, hi);
      break;
    }
    case CorruptionKind::kFlatline: {
      const auto begin = static_cast<std::size_t>(std::floor(spec.flat_start * static_cast<double>(n)));
      const auto end = std::min(
          n, static_cast<std::size_t>(std::floor((spec.flat_start + spec.flat_duration) * static_cast<double>(n))));
      if (begin < n) std::fill(x.begin() + static_cast<std::ptrdiff_t>(begin), x.begin() + static_cast<std::ptrdiff_t>(end), x[begin]);
      break;
    }
  }
  return out;
}

}  // namespace vampdiff::signal
