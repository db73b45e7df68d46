// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "vampdiff/numcore/tensor.hpp"

namespace vampdiff::vamp {

// Tables indexed by timestep t = 1..T; alpha_bar(0) is 1.
class DiffusionSchedule {
 public:
  DiffusionSchedule() = default;
  // beta linear from beta_start_ref to beta_end_ref, both scaled by 1000/T.
  static DiffusionSchedule linear(std::size_t steps, double beta_start_ref = 1e-4, double beta_end_ref = 0.02);

  std::size_t steps() const { return beta_.size(); }
  double beta(std::size_t t) const;
  double alpha(std::size_t t) const;
  double alpha_bar(std::size_t t) const;  // t = 0 allowed
  // Posterior q(x_{t-1} | x_t, x0) for t >= 2.
  double beta_tilde(std::size_t t) const;
  double coef_x0(std::size_t t) const;
  double coef_xt(std::size_t t) const;
  // Weight turning the equal-variance Gaussian KL into a squared error.
  double kl_weight(std::size_t t) const;

 private:
  void check_t(std::size_t t, std::size_t lo) const;
  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
};

// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps, one t per batch element.
nc::Tensor forward_diffuse(const nc::Tensor& x0, const std::vector<std::size_t>& t, const nc::Tensor& eps,
                           const DiffusionSchedule& sched);
nc::Tensor forward_diffuse(const nc::Tensor& x0, std::size_t t, const nc::Tensor& eps, const DiffusionSchedule& sched);

nc::Tensor posterior_mean_exact(const nc::Tensor& x_t, const nc::Tensor& x0, std::size_t t,
                                const DiffusionSchedule& sched);
double kl_weight(std::size_t t, const DiffusionSchedule& sched);

}  // namespace vampdiff::vamp
