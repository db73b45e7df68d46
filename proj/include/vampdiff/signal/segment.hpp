// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vampdiff/signal/peaks.hpp"
#include "vampdiff/signal/window.hpp"

namespace vampdiff::signal {

struct SegmentOptions {
  std::size_t window_len = 768;
  double overlap_frac = 0.5;
  std::size_t quality_min_peaks = 2;  // 0 disables the quality check
  Band band;
  PeakParams peaks;
};

std::size_t segment_stride(std::size_t window_len, double overlap_frac);

// Windows keep the unfiltered samples; filtering is only used for the
// quality check.
std::vector<SignalWindow> segment(std::span<const double> recording, double fs, const SegmentOptions& options,
                                  const std::string& source_id = "");

}  // namespace vampdiff::signal
