// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

#include "vampdiff/numcore/tensor.hpp"
#include "vampdiff/rng.hpp"
#include "vampdiff/vamp/config.hpp"
#include "vampdiff/vamp/encoder.hpp"

namespace vampdiff::vamp {

struct PseudoInputs {
  nc::Tensor u;  // [K, L], learnable

  static PseudoInputs zeros(std::size_t count, std::size_t length);
  std::size_t count() const { return u.dim(0); }
  std::size_t length() const { return u.dim(1); }
};

// Flattened diagonal Gaussians, one per row: mean and variance [N, D].
struct DiagGaussians {
  nc::Tensor mean;
  nc::Tensor var;
};

// log N(z; mean, diag var) per row; z, mean, var all [B, D].
nc::Tensor diag_gauss_logpdf(const nc::Tensor& z, const nc::Tensor& mean, const nc::Tensor& var);

// log (1/K) sum_k N(z; mean_k, diag var_k) per row of z [B, D]; comps [K, D].
nc::Tensor mixture_logpdf(const nc::Tensor& z, const DiagGaussians& comps);

// Standard normal log density per row.
nc::Tensor standard_normal_logpdf(const nc::Tensor& z);

// Pooled Gaussian of a temporal posterior, flattened to [B, C_z * T_c].
DiagGaussians pooled_posterior(const LatentPosterior& post, std::size_t pooled_len, PooledVariance mode);

// Encoder posteriors of the pseudo-inputs, pooled and flattened: [K, D].
DiagGaussians prior_components(const PseudoInputs& pseudo, const Encoder& enc, std::size_t pooled_len,
                               PooledVariance mode);

// z_tilde: [B, C_z, T_c].
nc::Tensor vampprior_logpdf(const nc::Tensor& z_tilde, const PseudoInputs& pseudo, const Encoder& enc,
                            PooledVariance mode = PooledVariance::kPooledParameters);

using LogDensity = std::function<nc::Tensor(const nc::Tensor&)>;

// (1/S) sum_s mean_b [log q(z_s) - log p(z_s)] for samples z_s [B, D].
nc::Tensor kl_monte_carlo(const DiagGaussians& q, const std::vector<nc::Tensor>& samples, const LogDensity& log_p);

struct KlOptions {
  std::size_t pooled_len = 8;
  std::size_t mc_samples = 1;
  PooledVariance mode = PooledVariance::kPooledParameters;
  PriorKind prior = PriorKind::kVamp;
};

// With one sample the estimate uses pool(z_sample); more samples are drawn
// from the pooled posterior with rng.
nc::Tensor kl_pooled(const LatentPosterior& post, const nc::Tensor& z_sample, const PseudoInputs& pseudo,
                     const Encoder& enc, const KlOptions& options, Rng* rng = nullptr);

// Closed-form KL between diagonal Gaussians, summed over D, per row.
std::vector<double> diag_gauss_kl(const DiagGaussians& q, const DiagGaussians& p);

}  // namespace vampdiff::vamp
