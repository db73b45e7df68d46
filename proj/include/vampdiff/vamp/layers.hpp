// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vampdiff/numcore/ops.hpp"
#include "vampdiff/numcore/tensor.hpp"
#include "vampdiff/rng.hpp"

namespace vampdiff::vamp {

// Named parameter handles; tensors are shared with the owning layer.
using ParamList = std::vector<std::pair<std::string, nc::Tensor>>;

void append(ParamList& out, const ParamList& more);

struct Conv1d {
  nc::Tensor weight;  // [Cout, Cin, K]
  nc::Tensor bias;    // [Cout]
  nc::Conv1dOptions options;

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and bias.
  static Conv1d create(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel,
                       nc::Conv1dOptions options = {});
  // Padding (k-1)/2 * dilation keeps the length at stride 1.
  static Conv1d same(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel, std::size_t stride = 1,
                     std::size_t dilation = 1);

  nc::Tensor operator()(const nc::Tensor& x) const { return nc::conv1d(x, weight, bias, options); }
  void collect(ParamList& out, const std::string& prefix) const;
};

struct Linear {
  nc::Tensor weight;  // [M, N]
  nc::Tensor bias;    // [M]

  static Linear create(Rng& rng, std::size_t n_in, std::size_t n_out);
  nc::Tensor operator()(const nc::Tensor& x) const { return nc::linear(x, weight, bias); }
  void collect(ParamList& out, const std::string& prefix) const;
};

struct GroupNorm {
  nc::Tensor gamma;
  nc::Tensor beta;
  std::size_t groups = 1;

  static GroupNorm create(std::size_t channels);
  nc::Tensor operator()(const nc::Tensor& x) const { return nc::groupnorm(x, groups, gamma, beta); }
  void collect(ParamList& out, const std::string& prefix) const;
};

// Largest divisor of channels that is <= 8 and leaves >= 2 channels per group.
std::size_t default_groups(std::size_t channels);

// Replaces every entry in place; weights become zero.
void zero_fill(nc::Tensor& t);

}  // namespace vampdiff::vamp
