// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

namespace vampdiff::signal {

double mean(std::span<const double> x);
// Population standard deviation.
double pstdev(std::span<const double> x);
// Linear-interpolated percentile (numpy default), q in [0, 100].
double percentile(std::span<const double> x, double q);
double median(std::span<const double> x);
double peak_to_peak(std::span<const double> x);

}  // namespace vampdiff::signal
