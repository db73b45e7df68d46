// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vampdiff::nc::dft {

inline std::size_t num_bins(std::size_t length) { return length / 2 + 1; }

// X_f = sum_n x_n exp(-2 pi i f n / L) for f in [0, L/2].
void forward_real(std::span<const double> x, std::span<double> re, std::span<double> im);

// Adjoint of forward_real: accumulates into gx.
void adjoint_real(std::span<const double> grad_re, std::span<const double> grad_im, std::span<double> gx);

// Inverse of forward_real for a length-L real signal.
std::vector<double> inverse_real(std::span<const double> re, std::span<const double> im, std::size_t length);

}  // namespace vampdiff::nc::dft
