// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vampdiff/signal/peaks.hpp"
#include "vampdiff/signal/window.hpp"
#include "vampdiff/vamp/config.hpp"
#include "vampdiff/vamp/encoder.hpp"
#include "vampdiff/vamp/sampler.hpp"
#include "vampdiff/vamp/schedule.hpp"
#include "vampdiff/vamp/unet.hpp"
#include "vampdiff/vamp/vampprior.hpp"

namespace vampdiff::vamp {

class VampDiff {
 public:
  VampDiff() = default;
  VampDiff(const ModelConfig& config, std::uint64_t seed);

  ModelConfig config;
  Encoder encoder;
  UNet unet;
  PseudoInputs pseudo;
  DiffusionSchedule schedule;
  signal::NormStats norm;

  ParamList encoder_params() const;
  ParamList decoder_params() const;
  ParamList pseudo_params() const;
  ParamList all_params() const;

  // Decoder conditioning derived from a full-resolution latent.
  nc::Tensor condition(const nc::Tensor& z) const;
  // f_theta with the configured conditioning applied to z.
  nc::Tensor predict_x0(const nc::Tensor& x_t, const std::vector<std::size_t>& t, const nc::Tensor& z) const;
  X0Predictor predictor() const;
};

// [B, 1, L] tensor from normalized windows.
nc::Tensor stack_windows(const std::vector<signal::SignalWindow>& windows);
nc::Tensor standard_normal(Rng& rng, nc::Shape shape);

// Posterior-mean latents [B, C_z, T_z] for normalized windows.
nc::Tensor encode_means(const VampDiff& model, const std::vector<signal::SignalWindow>& windows);

// Decode latents with one seeded x_T per element; returns normalized
// samples per element.
std::vector<std::vector<double>> decode(const VampDiff& model, const nc::Tensor& z,
                                        const std::vector<std::uint64_t>& x_T_seeds, std::size_t n_steps);

// z = mu(x0), x_T from a standard normal seeded by x_T_seed, DDIM decode,
// denormalize.
signal::SignalWindow reconstruct(const VampDiff& model, const signal::SignalWindow& x0, std::size_t n_steps,
                                 std::uint64_t x_T_seed);
std::vector<signal::SignalWindow> reconstruct_many(const VampDiff& model, const std::vector<signal::SignalWindow>& x0,
                                                   std::size_t n_steps, const std::vector<std::uint64_t>& x_T_seeds);

struct GeneratedSample {
  signal::SignalWindow window;
  std::size_t component = 0;
};

// k ~ Unif{0..K-1}, z = mu(u_k) + sigma(u_k) eps at full resolution, DDIM
// decode, denormalize.
GeneratedSample generate(const VampDiff& model, std::size_t n_steps, std::uint64_t seed, double fs);
// Sample i uses seed derived from (seed, i).
std::vector<GeneratedSample> generate_many(const VampDiff& model, std::size_t count, std::size_t n_steps,
                                           std::uint64_t seed, double fs);

// Fills the pseudo-inputs with real training windows chosen by heart-rate
// and amplitude stratification. windows are normalized.
void stratified_init(PseudoInputs& pseudo, const std::vector<signal::SignalWindow>& windows, std::uint64_t seed,
                     const signal::Band& band = {}, const signal::PeakParams& peaks = {});

}  // namespace vampdiff::vamp
