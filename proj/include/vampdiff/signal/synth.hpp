// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace vampdiff::signal {

// Two-Gaussian beat template (systolic plus a dicrotic bump at 0.35 relative
// amplitude, 0.4 cycles late) with respiratory amplitude modulation and
// baseline at rr_bpm, and +-2% jitter on beat intervals.
std::vector<double> synth_ppg(double fs, double duration_s, double hr_bpm, double rr_bpm, double amp,
                              std::uint64_t seed);

// Capnogram-like waveform in percent CO2 with one plateau per breath.
std::vector<double> synth_co2(double fs, double duration_s, double rr_bpm, std::uint64_t seed);

}  // namespace vampdiff::signal
