// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/sampler.hpp"

#include <cmath>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::vamp {

std::vector<std::size_t> ddim_timesteps(std::size_t steps, std::size_t n) {
  if (n < 1 || n > steps) {
    throw RangeError("ddim steps must lie in [1, " + std::to_string(steps) + "], got " + std::to_string(n));
  }
  std::vector<std::size_t> out(n);
  if (n == 1) {
    out[0] = steps;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(steps) -
                       static_cast<double>(i) * static_cast<double>(steps - 1) / static_cast<double>(n - 1);
    out[i] = static_cast<std::size_t>(std::llround(pos));
  }
  return out;
}

nc::Tensor ddim_sample(const nc::Tensor& z, const nc::Tensor& x_T, const X0Predictor& predict,
                       const DiffusionSchedule& sched, std::size_t n_steps) {
  const auto ts = ddim_timesteps(sched.steps(), n_steps);
  nc::NoGradGuard no_grad;
  const std::size_t batch = x_T.dim(0);
  nc::Tensor x = x_T.detach();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::size_t t = ts[i];
    const std::size_t t_prev = i + 1 < ts.size() ? ts[i + 1] : 0;
    auto x0_hat = predict(x, std::vector<std::size_t>(batch, t), z);
    const double ab = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t_prev);
    if (t_prev == 0) {
      x = x0_hat;
      break;
    }
    auto eps_hat = nc::scale(nc::sub(x, nc::scale(x0_hat, std::sqrt(ab))), 1.0 / std::sqrt(1.0 - ab));
    x = nc::add(nc::scale(x0_hat, std::sqrt(ab_prev)), nc::scale(eps_hat, std::sqrt(1.0 - ab_prev)));
  }
  return x;
}

std::vector<nc::Tensor> interpolate_latent(const nc::Tensor& z1, const nc::Tensor& z2, const std::vector<double>& alphas) {
  if (z1.shape() != z2.shape()) {
    throw DimensionError("interpolate_latent: " + nc::shape_str(z1.shape()) + " vs " + nc::shape_str(z2.shape()));
  }
  std::vector<nc::Tensor> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("interpolation alpha must lie in [0, 1]");
    out.push_back(nc::add(nc::scale(z1, 1.0 - a), nc::scale(z2, a)));
  }
  return out;
}

}  // namespace vampdiff::vamp
