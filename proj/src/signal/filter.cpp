// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/filter.hpp"

#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/dft.hpp"

namespace vampdiff::signal {

std::vector<double> bandpass(std::span<const double> samples, double fs, double lo_hz, double hi_hz) {
  if (!(fs > 0.0)) throw ParameterError("bandpass: sample rate must be positive");
  if (!(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < fs / 2.0)) {
    throw ParameterError("bandpass: need 0 < lo < hi < fs/2, got lo=" + std::to_string(lo_hz) +
                         " hi=" + std::to_string(hi_hz) + " fs=" + std::to_string(fs));
  }
  const std::size_t length = samples.size();
  if (length < 2) throw ParameterError("bandpass: window needs at least 2 samples");
  const std::size_t bins = nc::dft::num_bins(length);
  std::vector<double> re(bins);
  std::vector<double> im(bins);
  nc::dft::forward_real(samples, re, im);
  for (std::size_t f = 0; f < bins; ++f) {
    const double hz = static_cast<double>(f) * fs / static_cast<double>(length);
    if (hz < lo_hz || hz > hi_hz) {
      re[f] = 0.0;
      im[f] = 0.0;
    }
  }
  return nc::dft::inverse_real(re, im, length);
}

SignalWindow bandpass(const SignalWindow& window, double lo_hz, double hi_hz) {
  SignalWindow out = window;
  out.samples = bandpass(window.samples, window.fs, lo_hz, hi_hz);
  return out;
}

}  // namespace vampdiff::signal
