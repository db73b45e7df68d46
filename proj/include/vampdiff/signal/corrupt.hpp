// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "vampdiff/signal/window.hpp"

namespace vampdiff::signal {

enum class CorruptionKind { kNoise, kBaseline, kClip, kFlatline };

std::string_view to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(std::string_view name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kNoise;
  double noise_sigma = 0.5;
  double wander_amplitude = 1.0;
  double wander_freq_lo = 0.05;  // wander frequency is drawn from [lo, hi]
  double wander_freq_hi = 0.3;
  double clip_fraction = 0.5;  // of the range on each side of the median
  double flat_start = 0.5;     // fraction of the window
  double flat_duration = 0.25;

  void validate() const;
};

SignalWindow corrupt(const SignalWindow& window, const CorruptionSpec& spec, std::uint64_t seed);

}  // namespace vampdiff::signal
