// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/schedule.hpp"

#include <cmath>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::vamp {

DiffusionSchedule DiffusionSchedule::linear(std::size_t steps, double beta_start_ref, double beta_end_ref) {
  if (steps < 2) throw ParameterError("diffusion schedule needs at least 2 steps");
  const double scale = 1000.0 / static_cast<double>(steps);
  const double b1 = beta_start_ref * scale;
  const double bt = beta_end_ref * scale;
  if (!(b1 > 0.0 && b1 < bt && bt < 1.0)) throw ParameterError("linear schedule needs 0 < beta_1 < beta_T < 1");
  DiffusionSchedule s;
  s.beta_.resize(steps);
  s.alpha_.resize(steps);
  s.alpha_bar_.resize(steps);
  double prod = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(steps - 1);
    s.beta_[i] = b1 + (bt - b1) * frac;
    s.alpha_[i] = 1.0 - s.beta_[i];
    prod *= s.alpha_[i];
    s.alpha_bar_[i] = prod;
  }
  return s;
}

void DiffusionSchedule::check_t(std::size_t t, std::size_t lo) const {
  if (t < lo || t > steps()) {
    throw RangeError("timestep " + std::to_string(t) + " outside [" + std::to_string(lo) + ", " +
                     std::to_string(steps()) + "]");
  }
}

double DiffusionSchedule::beta(std::size_t t) const {
  check_t(t, 1);
  return beta_[t - 1];
}

double DiffusionSchedule::alpha(std::size_t t) const {
  check_t(t, 1);
  return alpha_[t - 1];
}

double DiffusionSchedule::alpha_bar(std::size_t t) const {
  if (t == 0) return 1.0;
  check_t(t, 1);
  return alpha_bar_[t - 1];
}

double DiffusionSchedule::beta_tilde(std::size_t t) const {
  check_t(t, 2);
  return (1.0 - alpha_bar(t - 1)) * beta(t) / (1.0 - alpha_bar(t));
}

double DiffusionSchedule::coef_x0(std::size_t t) const {
  check_t(t, 2);
  return std::sqrt(alpha_bar(t - 1)) * beta(t) / (1.0 - alpha_bar(t));
}

double DiffusionSchedule::coef_xt(std::size_t t) const {
  check_t(t, 2);
  return std::sqrt(alpha(t)) * (1.0 - alpha_bar(t - 1)) / (1.0 - alpha_bar(t));
}

double DiffusionSchedule::kl_weight(std::size_t t) const {
  check_t(t, 2);
  const double one_minus = 1.0 - alpha_bar(t);
  return alpha_bar(t - 1) * beta(t) * beta(t) / (2.0 * beta_tilde(t) * one_minus * one_minus);
}

nc::Tensor forward_diffuse(const nc::Tensor& x0, const std::vector<std::size_t>& t, const nc::Tensor& eps,
                           const DiffusionSchedule& sched) {
  if (x0.shape() != eps.shape()) {
    throw DimensionError("forward_diffuse: eps " + nc::shape_str(eps.shape()) + " vs x0 " + nc::shape_str(x0.shape()));
  }
  const std::size_t batch = x0.dim(0);
  if (t.size() != batch) throw DimensionError("forward_diffuse: need one timestep per batch element");
  nc::Shape coef_shape(x0.rank(), 1);
  coef_shape[0] = batch;
  std::vector<double> a(batch);
  std::vector<double> b(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    if (t[i] < 1 || t[i] > sched.steps()) {
      throw RangeError("forward_diffuse: timestep " + std::to_string(t[i]) + " outside [1, " +
                       std::to_string(sched.steps()) + "]");
    }
    const double ab = sched.alpha_bar(t[i]);
    a[i] = std::sqrt(ab);
    b[i] = std::sqrt(1.0 - ab);
  }
  return nc::add(nc::mul(x0, nc::Tensor::from_vector(coef_shape, a)),
                 nc::mul(eps, nc::Tensor::from_vector(coef_shape, b)));
}

nc::Tensor forward_diffuse(const nc::Tensor& x0, std::size_t t, const nc::Tensor& eps, const DiffusionSchedule& sched) {
  return forward_diffuse(x0, std::vector<std::size_t>(x0.dim(0), t), eps, sched);
}

nc::Tensor posterior_mean_exact(const nc::Tensor& x_t, const nc::Tensor& x0, std::size_t t,
                                const DiffusionSchedule& sched) {
  if (t < 2) throw RangeError("posterior mean needs t >= 2, got " + std::to_string(t));
  return nc::add(nc::scale(x0, sched.coef_x0(t)), nc::scale(x_t, sched.coef_xt(t)));
}

double kl_weight(std::size_t t, const DiffusionSchedule& sched) {
  if (t < 2) throw RangeError("kl weight needs t >= 2, got " + std::to_string(t));
  return sched.kl_weight(t);
}

}  // namespace vampdiff::vamp
