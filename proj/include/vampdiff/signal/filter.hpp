// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "vampdiff/signal/window.hpp"

namespace vampdiff::signal {

struct Band {
  double lo_hz = 0.7;
  double hi_hz = 3.0;
};

// Zero-phase brick-wall filter: DFT bins with frequency f*fs/L outside
// [lo_hz, hi_hz] are zeroed before the inverse transform.
std::vector<double> bandpass(std::span<const double> samples, double fs, double lo_hz, double hi_hz);
SignalWindow bandpass(const SignalWindow& window, double lo_hz, double hi_hz);

}  // namespace vampdiff::signal
