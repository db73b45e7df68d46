// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/segment.hpp"

#include <cmath>

#include "vampdiff/error.hpp"

namespace vampdiff::signal {

std::size_t segment_stride(std::size_t window_len, double overlap_frac) {
  if (!(overlap_frac >= 0.0 && overlap_frac < 1.0)) throw ParameterError("overlap fraction must lie in [0, 1)");
  const double stride = std::round(static_cast<double>(window_len) * (1.0 - overlap_frac));
  return std::max<std::size_t>(1, static_cast<std::size_t>(stride));
}

std::vector<SignalWindow> segment(std::span<const double> recording, double fs, const SegmentOptions& options,
                                  const std::string& source_id) {
  if (!(fs > 0.0)) throw ParameterError("segment: sample rate must be positive");
  if (options.window_len == 0 || options.window_len > recording.size()) {
    throw ParameterError("segment: window length " + std::to_string(options.window_len) +
                         " exceeds recording length " + std::to_string(recording.size()));
  }
  const std::size_t stride = segment_stride(options.window_len, options.overlap_frac);
  std::vector<SignalWindow> out;
  for (std::size_t start = 0; start + options.window_len <= recording.size(); start += stride) {
    auto samples = recording.subspan(start, options.window_len);
    if (options.quality_min_peaks > 0) {
      const auto m = measure_hr(samples, fs, options.band, options.peaks);
      if (m.peaks.indices.size() < options.quality_min_peaks) continue;
    }
    SignalWindow w;
    w.samples.assign(samples.begin(), samples.end());
    w.fs = fs;
    w.source_id = source_id;
    w.start_index = start;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace vampdiff::signal
