// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vampdiff/signal/filter.hpp"
#include "vampdiff/signal/window.hpp"

namespace vampdiff::signal {

struct PeakParams {
  double min_distance_s = 0.35;
  double prominence_frac = 0.1;     // times the std of the filtered window
  double height_percentile = 60.0;  // of the filtered samples
};

struct PeakSet {
  std::vector<std::size_t> indices;  // strictly increasing
  PeakParams params;
  double fs = 0.0;
};

// Local maxima filtered in order by height, minimum distance (the higher
// peak survives, earlier on ties) and topographic prominence. Plateaus
// report their middle sample. Endpoints are never peaks.
std::vector<std::size_t> find_peaks(std::span<const double> x, std::size_t min_distance,
                                    std::optional<double> min_height, double min_prominence);

// Prominence of each peak: height above the higher of the two minima found
// scanning outward until a strictly higher sample or the window edge.
std::vector<double> peak_prominences(std::span<const double> x, std::span<const std::size_t> peaks);

PeakSet detect_peaks(const SignalWindow& window, const PeakParams& params = {});

struct HeartRate {
  double hr_bpm = 0.0;
  double mean_ibi_s = 0.0;
};

// InsufficientPeaksError with fewer than two peaks.
HeartRate estimate_hr(const PeakSet& peaks, double fs);

// bandpass -> detect_peaks -> estimate_hr on a raw waveform.
struct HrMeasurement {
  PeakSet peaks;
  std::optional<HeartRate> hr;  // empty when fewer than two peaks
};
HrMeasurement measure_hr(std::span<const double> samples, double fs, const Band& band = {},
                         const PeakParams& params = {});

// Breaths per minute from a capnogram, or empty when fewer than two breaths
// are found or the rate falls outside [6, 35].
std::optional<double> rr_from_co2(std::span<const double> co2, double fs);

// Centered moving average whose window shrinks at the edges.
std::vector<double> moving_average(std::span<const double> x, std::size_t width);

}  // namespace vampdiff::signal
