// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vampdiff/error.hpp"
#include "vampdiff/signal/stats.hpp"

namespace vampdiff::signal {

namespace {

std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> peaks;
  if (x.size() < 3) return peaks;
  const std::size_t last = x.size() - 1;
  std::size_t i = 1;
  while (i < last) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead < last && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

std::vector<std::size_t> select_by_distance(std::span<const double> x, const std::vector<std::size_t>& peaks,
                                            std::size_t distance) {
  if (distance <= 1 || peaks.size() < 2) return peaks;
  std::vector<std::size_t> order(peaks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[peaks[a]] > x[peaks[b]]; });
  std::vector<bool> keep(peaks.size(), true);
  for (std::size_t j : order) {
    if (!keep[j]) continue;
    for (std::size_t k = j; k-- > 0 && peaks[j] - peaks[k] < distance;) keep[k] = false;
    for (std::size_t k = j + 1; k < peaks.size() && peaks[k] - peaks[j] < distance; ++k) keep[k] = false;
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < peaks.size(); ++j) {
    if (keep[j]) out.push_back(peaks[j]);
  }
  return out;
}

}  // namespace

std::vector<double> peak_prominences(std::span<const double> x, std::span<const std::size_t> peaks) {
  std::vector<double> out;
  out.reserve(peaks.size());
  for (std::size_t p : peaks) {
    const double h = x[p];
    double left_min = h;
    for (std::size_t i = p + 1; i-- > 0;) {
      if (x[i] > h) break;
      left_min = std::min(left_min, x[i]);
    }
    double right_min = h;
    for (std::size_t i = p; i < x.size(); ++i) {
      if (x[i] > h) break;
      right_min = std::min(right_min, x[i]);
    }
    out.push_back(h - std::max(left_min, right_min));
  }
  return out;
}

std::vector<std::size_t> find_peaks(std::span<const double> x, std::size_t min_distance,
                                    std::optional<double> min_height, double min_prominence) {
  std::vector<std::size_t> peaks = local_maxima(x);
  if (min_height) {
    std::erase_if(peaks, [&](std::size_t p) { return x[p] < *min_height; });
  }
  peaks = select_by_distance(x, peaks, min_distance);
  const auto prom = peak_prominences(x, peaks);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < peaks.size(); ++j) {
    if (prom[j] >= min_prominence) out.push_back(peaks[j]);
  }
  return out;
}

PeakSet detect_peaks(const SignalWindow& window, const PeakParams& params) {
  window.validate();
  if (!(params.min_distance_s > 0.0) || !(params.prominence_frac > 0.0) || !(params.height_percentile > 0.0)) {
    throw ParameterError("detect_peaks parameters must be positive");
  }
  PeakSet set;
  set.params = params;
  set.fs = window.fs;
  const auto& x = window.samples;
  const double height = percentile(x, params.height_percentile);
  const double prominence = params.prominence_frac * pstdev(x);
  const auto distance = static_cast<std::size_t>(std::max(1.0, std::round(params.min_distance_s * window.fs)));
  set.indices = find_peaks(x, distance, height, prominence);
  return set;
}

HeartRate estimate_hr(const PeakSet& peaks, double fs) {
  if (!(fs > 0.0)) throw ParameterError("estimate_hr: sample rate must be positive");
  const auto& idx = peaks.indices;
  if (idx.size() < 2) {
    throw InsufficientPeaksError("estimate_hr needs at least 2 peaks, got " + std::to_string(idx.size()));
  }
  const double span = static_cast<double>(idx.back() - idx.front());
  HeartRate hr;
  hr.mean_ibi_s = span / static_cast<double>(idx.size() - 1) / fs;
  hr.hr_bpm = 60.0 / hr.mean_ibi_s;
  return hr;
}

HrMeasurement measure_hr(std::span<const double> samples, double fs, const Band& band, const PeakParams& params) {
  SignalWindow w;
  w.samples = bandpass(samples, fs, band.lo_hz, band.hi_hz);
  w.fs = fs;
  HrMeasurement m;
  // A window with no in-band energy beyond round-off has no beats.
  double energy = 0.0;
  for (double v : samples) energy += v * v;
  const double rms = std::sqrt(energy / static_cast<double>(samples.size()));
  if (pstdev(w.samples) <= 1e-9 * rms) {
    m.peaks.params = params;
    m.peaks.fs = fs;
    return m;
  }
  m.peaks = detect_peaks(w, params);
  if (m.peaks.indices.size() >= 2) m.hr = estimate_hr(m.peaks, fs);
  return m;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t width) {
  if (width == 0) throw ParameterError("moving_average width must be >= 1");
  const std::size_t half = width / 2;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + (width - half));
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += x[j];
    out[i] = acc / static_cast<double>(hi - lo);
  }
  return out;
}

std::optional<double> rr_from_co2(std::span<const double> co2, double fs) {
  if (!(fs > 0.0)) throw ParameterError("rr_from_co2: sample rate must be positive");
  if (static_cast<double>(co2.size()) < 2.0 * fs) {
    throw ParameterError("rr_from_co2 needs at least 2 s of signal, got " + std::to_string(co2.size()) + " samples");
  }
  const auto smooth = moving_average(co2, 5);
  const auto distance = static_cast<std::size_t>(std::max(1.0, std::round(fs)));
  const auto peaks = find_peaks(smooth, distance, std::nullopt, 0.05);
  if (peaks.size() < 2) return std::nullopt;
  const double mean_gap = static_cast<double>(peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
  const double rr = 60.0 * fs / mean_gap;
  if (rr < 6.0 || rr > 35.0) return std::nullopt;
  return rr;
}

}  // namespace vampdiff::signal
