// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/signal/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/rng.hpp"

namespace vampdiff::signal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSystolicWidth = 0.13;  // Gaussian sigma in cycles
constexpr double kDicroticWidth = 0.4;
constexpr double kDicroticAmp = 0.35;
constexpr double kDicroticDelay = 0.4;
constexpr double kJitter = 0.02;
constexpr double kModDepth = 0.15;
constexpr double kBaselineDepth = 0.1;

void check_common(double fs, double duration_s) {
  if (!(fs > 0.0)) throw ParameterError("synth: fs must be positive");
  if (!(duration_s > 0.0)) throw ParameterError("synth: duration must be positive");
}

void check_rr(double rr_bpm) {
  if (!(rr_bpm >= 6.0 && rr_bpm <= 35.0)) throw RangeError("synth: rr_bpm must lie in [6, 35], got " + std::to_string(rr_bpm));
}

std::size_t sample_count(double fs, double duration_s) {
  return static_cast<std::size_t>(std::llround(fs * duration_s));
}

}  // namespace

std::vector<double> synth_ppg(double fs, double duration_s, double hr_bpm, double rr_bpm, double amp,
                              std::uint64_t seed) {
  check_common(fs, duration_s);
  if (!(hr_bpm >= 40.0 && hr_bpm <= 180.0)) {
    throw RangeError("synth: hr_bpm must lie in [40, 180], got " + std::to_string(hr_bpm));
  }
  check_rr(rr_bpm);
  if (!(amp >= 0.0)) throw ParameterError("synth: amplitude must be non-negative");

  Rng rng(seed);
  const double cycle = 60.0 / hr_bpm;
  const double resp_phase = rng.uniform(0.0, kTwoPi);
  struct Beat {
    double onset;
    double cycle;
  };
  std::vector<Beat> beats;
  double t = -cycle + rng.uniform(0.0, cycle);
  while (t < duration_s + cycle) {
    const double c = cycle * (1.0 + rng.uniform(-kJitter, kJitter));
    beats.push_back({t, c});
    t += c;
  }

  const std::size_t n = sample_count(fs, duration_s);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) / fs;
    double pulse = 0.0;
    for (const auto& b : beats) {
      const double ds = (ti - b.onset) / (kSystolicWidth * b.cycle);
      const double dd = (ti - b.onset - kDicroticDelay * b.cycle) / (kDicroticWidth * b.cycle);
      if (std::abs(ds) < 8.0) pulse += std::exp(-0.5 * ds * ds);
      if (std::abs(dd) < 8.0) pulse += kDicroticAmp * std::exp(-0.5 * dd * dd);
    }
    const double resp = std::sin(kTwoPi * rr_bpm * ti / 60.0 + resp_phase);
    out[i] = amp * (1.0 + kModDepth * resp) * pulse + kBaselineDepth * amp * resp;
  }
  return out;
}

std::vector<double> synth_co2(double fs, double duration_s, double rr_bpm, std::uint64_t seed) {
  check_common(fs, duration_s);
  check_rr(rr_bpm);
  Rng rng(seed);
  const double phase = rng.uniform(0.0, kTwoPi);
  const std::size_t n = sample_count(fs, duration_s);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) / fs;
    out[i] = 2.5 * (1.0 + std::tanh(3.0 * std::sin(kTwoPi * rr_bpm * ti / 60.0 + phase)));
  }
  return out;
}

}  // namespace vampdiff::signal
