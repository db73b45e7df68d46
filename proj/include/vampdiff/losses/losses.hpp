// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vampdiff/numcore/tensor.hpp"

namespace vampdiff::losses {

namespace nc = vampdiff::nc;

struct LossWeights {
  double diff = 1.0;
  double recon = 5.0;
  double spec = 0.1;
  double deriv = 0.1;
  double amp = 2.0;
  double ptp = 1.0;

  void validate() const;
};

// KL weight: zero while the encoder is frozen, a small floor, then a linear
// ramp to the target.
struct BetaSchedule {
  int freeze_epochs = 20;
  double floor_value = 1e-8;
  int floor_until = 50;
  int ramp_until = 130;
  double ramp_target = 5e-8;

  void validate() const;
};

double beta_at(int epoch, const BetaSchedule& sched);

// All losses accept [B, L] or [B, 1, L] and average over the batch.
nc::Tensor smooth_l1(const nc::Tensor& a, const nc::Tensor& b);
nc::Tensor spectral_loss(const nc::Tensor& x0, const nc::Tensor& xhat);
nc::Tensor deriv_loss(const nc::Tensor& x0, const nc::Tensor& xhat);
nc::Tensor amp_loss(const nc::Tensor& x0, const nc::Tensor& xhat);
nc::Tensor ptp_loss(const nc::Tensor& x0, const nc::Tensor& xhat);
nc::Tensor mse(const nc::Tensor& a, const nc::Tensor& b);

// Unweighted term values.
struct LossBreakdown {
  double diff = 0.0;
  double kl = 0.0;
  double recon = 0.0;
  double spec = 0.0;
  double deriv = 0.0;
  double amp = 0.0;
  double ptp = 0.0;
  double beta = 0.0;
  double total = 0.0;
};

double weighted_sum(const LossBreakdown& b, const LossWeights& w);

struct LossResult {
  nc::Tensor total;
  LossBreakdown breakdown;
};

// kl may be undefined, which counts as zero. Terms with zero weight are not
// built into the graph.
LossResult total_loss(const nc::Tensor& x0, const nc::Tensor& xhat, const nc::Tensor& kl, double beta,
                      const LossWeights& w);

}  // namespace vampdiff::losses
