// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "vampdiff/numcore/tensor.hpp"
#include "vampdiff/vamp/schedule.hpp"

namespace vampdiff::vamp {

using X0Predictor =
    std::function<nc::Tensor(const nc::Tensor& x_t, const std::vector<std::size_t>& t, const nc::Tensor& z)>;

// round(linspace(T, 1, n)), strictly decreasing.
std::vector<std::size_t> ddim_timesteps(std::size_t steps, std::size_t n);

// Deterministic DDIM (eta = 0) from x_T; the last update lands on x0-hat.
nc::Tensor ddim_sample(const nc::Tensor& z, const nc::Tensor& x_T, const X0Predictor& predict,
                       const DiffusionSchedule& sched, std::size_t n_steps);

std::vector<nc::Tensor> interpolate_latent(const nc::Tensor& z1, const nc::Tensor& z2, const std::vector<double>& alphas);

}  // namespace vampdiff::vamp
