// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vampdiff/numcore/ops.hpp"
#include "vampdiff/numcore/tensor.hpp"
#include "vampdiff/rng.hpp"

namespace vampdiff::check {

inline nc::Tensor random_tensor(Rng& rng, nc::Shape shape, double lo = -2.0, double hi = 2.0,
                                bool requires_grad = true) {
  std::vector<double> v(nc::shape_numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return nc::Tensor::from_vector(std::move(shape), std::move(v), requires_grad);
}

// Contract an arbitrary output to a scalar with fixed random weights so no
// gradient component cancels by symmetry.
inline nc::Tensor project(const nc::Tensor& out, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(out.numel());
  for (auto& x : w) x = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  return nc::sum(nc::mul(out, nc::Tensor::from_vector(out.shape(), std::move(w))));
}

struct GradCheckResult {
  double max_rel = 0.0;
  double max_abs = 0.0;
};

// Compares analytic gradients of fn(leaves) against central differences for
// every leaf entry. Relative error uses max(|a|, |n|, floor) as denominator.
inline GradCheckResult gradcheck(const std::function<nc::Tensor(const std::vector<nc::Tensor>&)>& fn,
                                 std::vector<nc::Tensor> leaves, double h = 1e-5, double floor = 1e-6) {
  for (auto& t : leaves) t.zero_grad();
  nc::backward(fn(leaves));
  std::vector<std::vector<double>> analytic;
  for (auto& t : leaves) {
    analytic.emplace_back(t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                                       : std::vector<double>(t.numel(), 0.0));
  }
  GradCheckResult res;
  nc::NoGradGuard guard;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    auto data = leaves[li].mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + h;
      const double fp = fn(leaves).item();
      data[i] = saved - h;
      const double fm = fn(leaves).item();
      data[i] = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[li][i];
      const double err = std::abs(a - numeric);
      res.max_abs = std::max(res.max_abs, err);
      res.max_rel = std::max(res.max_rel, err / std::max({std::abs(a), std::abs(numeric), floor}));
    }
  }
  return res;
}

}  // namespace vampdiff::check
