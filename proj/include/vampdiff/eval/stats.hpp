// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace vampdiff::eval {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

Summary summarize(std::span<const double> x);

// DomainError when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> x);

// Largest |ECDF_a - ECDF_b| over the pooled sample points.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Higher score means more anomalous; labels are 0 (negative) or 1 (positive).
double auroc(std::span<const double> scores, std::span<const int> labels);
// Sum over distinct thresholds of (recall gain) x precision.
double auprc(std::span<const double> scores, std::span<const int> labels);
// Best TPR over thresholds (score >= threshold flags positive) whose FPR
// does not exceed fpr.
double tpr_at_fpr(std::span<const double> scores, std::span<const int> labels, double fpr);

double spearman(std::span<const double> a, std::span<const double> b);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
  std::size_t outside = 0;  // values outside [lo, hi]
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  // counts / (total inside x bin width)
  std::vector<double> density() const;
};

// bins equal-width bins over [lo, hi]; the last bin is closed.
Histogram histogram(std::span<const double> x, double lo, double hi, std::size_t bins);

}  // namespace vampdiff::eval
