// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/layers.hpp"

#include <algorithm>
#include <cmath>

namespace vampdiff::vamp {

namespace {

nc::Tensor uniform_param(Rng& rng, nc::Shape shape, double bound) {
  std::vector<double> v(nc::shape_numel(shape));
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return nc::Tensor::from_vector(std::move(shape), std::move(v), true);
}

}  // namespace

void append(ParamList& out, const ParamList& more) { out.insert(out.end(), more.begin(), more.end()); }

Conv1d Conv1d::create(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel, nc::Conv1dOptions options) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(c_in * kernel));
  Conv1d c;
  c.weight = uniform_param(rng, {c_out, c_in, kernel}, bound);
  c.bias = uniform_param(rng, {c_out}, bound);
  c.options = options;
  return c;
}

Conv1d Conv1d::same(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel, std::size_t stride,
                    std::size_t dilation) {
  return create(rng, c_in, c_out, kernel, {stride, dilation, (kernel - 1) / 2 * dilation});
}

void Conv1d::collect(ParamList& out, const std::string& prefix) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

Linear Linear::create(Rng& rng, std::size_t n_in, std::size_t n_out) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
  Linear l;
  l.weight = uniform_param(rng, {n_out, n_in}, bound);
  l.bias = uniform_param(rng, {n_out}, bound);
  return l;
}

void Linear::collect(ParamList& out, const std::string& prefix) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

GroupNorm GroupNorm::create(std::size_t channels) {
  GroupNorm g;
  g.gamma = nc::Tensor::full({channels}, 1.0, true);
  g.beta = nc::Tensor::zeros({channels}, true);
  g.groups = default_groups(channels);
  return g;
}

void GroupNorm::collect(ParamList& out, const std::string& prefix) const {
  out.emplace_back(prefix + ".gamma", gamma);
  out.emplace_back(prefix + ".beta", beta);
}

std::size_t default_groups(std::size_t channels) {
  for (std::size_t g = std::min<std::size_t>(8, channels / 2); g > 1; --g) {
    if (channels % g == 0) return g;
  }
  return 1;
}

void zero_fill(nc::Tensor& t) {
  auto d = t.mutable_data();
  std::fill(d.begin(), d.end(), 0.0);
}

}  // namespace vampdiff::vamp
