// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "vampdiff/numcore/tensor.hpp"

namespace vampdiff::nc {

// Binary elementwise operations broadcast numpy-style over right-aligned
// axes where each extent is equal or 1.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);
Tensor neg(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);  // DomainError on negative input
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);    // DomainError on non-positive input
Tensor log1p(const Tensor& a);  // DomainError on input < -1
Tensor silu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
// Smooth L1 with transition at |x| = 1: 0.5 x^2 inside, |x| - 0.5 outside.
Tensor smooth_l1_elem(const Tensor& a);
// Clamp; gradient passes only where the input is strictly inside [lo, hi].
Tensor clamp(const Tensor& a, double lo, double hi);

// Reductions. An empty axis list reduces over every axis.
Tensor sum(const Tensor& a, std::vector<std::size_t> axes = {}, bool keepdims = false);
Tensor mean(const Tensor& a, std::vector<std::size_t> axes = {}, bool keepdims = false);
// Gradient goes to the first maximal (minimal) element in flat order.
Tensor max(const Tensor& a, std::vector<std::size_t> axes = {}, bool keepdims = false);
Tensor min(const Tensor& a, std::vector<std::size_t> axes = {}, bool keepdims = false);
// Population standard deviation; gradient is zero where the deviation is 0.
Tensor std_dev(const Tensor& a, std::vector<std::size_t> axes = {}, bool keepdims = false);
Tensor logsumexp(const Tensor& a, std::size_t axis, bool keepdims = false);

Tensor reshape(const Tensor& a, Shape shape);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);

struct Conv1dOptions {
  std::size_t stride = 1;
  std::size_t dilation = 1;
  std::size_t padding = 0;
};

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, const Conv1dOptions& opt);

// Cross-correlation. input [B,Cin,L], kernel [Cout,Cin,K], bias [Cout] or
// undefined for no bias.
Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias, const Conv1dOptions& opt = {});

// input [B,N], weight [M,N], bias [M] -> [B,M].
Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias);

// input [B,C,L], gamma/beta [C]; statistics per (batch, group).
Tensor groupnorm(const Tensor& input, std::size_t groups, const Tensor& gamma, const Tensor& beta,
                 double eps = 1e-5);

struct Spectrum {
  Tensor real;  // [B,F]
  Tensor imag;  // [B,F]
};

// Real-input DFT over the last axis of [B,L]; F = L/2 + 1.
Spectrum rdft(const Tensor& input);

// Endpoint-aligned linear interpolation over the last axis of [B,C,T].
Tensor resample_linear(const Tensor& input, std::size_t out_len);

}  // namespace vampdiff::nc
