// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vampdiff/eval/stats.hpp"
#include "vampdiff/signal/corrupt.hpp"
#include "vampdiff/signal/filter.hpp"
#include "vampdiff/signal/peaks.hpp"
#include "vampdiff/signal/window.hpp"
#include "vampdiff/train/rr_estimator.hpp"
#include "vampdiff/vamp/model.hpp"

namespace vampdiff::eval {

using signal::SignalWindow;

struct EvalOptions {
  std::size_t ddim_steps = 25;
  signal::Band band;
  signal::PeakParams peaks;
};

// Samples in signal units; normalized windows are denormalized with their own
// statistics.
std::vector<double> raw_samples(const SignalWindow& w);

// ---------------------------------------------------------------- reconstruction

struct ReconRecord {
  std::string source_id;
  std::size_t start_index = 0;
  double mae = 0.0;
  double rmse = 0.0;
  double pearson = 0.0;
  bool hr_valid = false;  // both sides have at least two peaks
  double hr_true = 0.0;
  double hr_recon = 0.0;
  double hr_abs_err = 0.0;
  double ibi_abs_err = 0.0;  // |mean IBI difference| in seconds
};

ReconRecord recon_metrics(const SignalWindow& x0, const SignalWindow& xhat, const EvalOptions& options = {});

struct ReconReport {
  std::vector<ReconRecord> records;
  Summary mae;
  Summary rmse;
  Summary pearson;
  Summary hr_abs_err;  // over hr_valid records
  Summary ibi_abs_err;
  std::size_t hr_excluded = 0;
};

ReconReport summarize_recon(std::vector<ReconRecord> records);

// Posterior-mean reconstructions; window i uses x_T seed derived from (seed, i).
ReconReport reconstruction_report(const vamp::VampDiff& model, const std::vector<SignalWindow>& windows,
                                  std::uint64_t seed, const EvalOptions& options = {});

// ---------------------------------------------------------------- latent sensitivity

// Mean absolute difference between the two decodes over the range of the
// posterior-mean decode. DomainError when that range is zero.
double sensitivity_ratio(std::span<const double> from_mean, std::span<const double> from_random);

// Both decodes share one seeded x_T per window; z_rand ~ N(0, I) at full
// latent resolution.
std::vector<double> sensitivity_ratios(const vamp::VampDiff& model, const std::vector<SignalWindow>& windows,
                                       std::uint64_t seed, const EvalOptions& options = {});
double sensitivity_ratio(const SignalWindow& x0, const vamp::VampDiff& model, std::uint64_t seed,
                         const EvalOptions& options = {});

// ---------------------------------------------------------------- corruption detection

struct AnomalyScores {
  double mae_score = 0.0;
  double corr_score = 0.0;  // 1 - Pearson
};

AnomalyScores anomaly_scores(std::span<const double> x0, std::span<const double> xhat);
AnomalyScores anomaly_scores(const SignalWindow& x0, const vamp::VampDiff& model, std::uint64_t seed,
                             const EvalOptions& options = {});

struct BenchmarkItem {
  SignalWindow clean;  // signal units
  SignalWindow input;  // equal to clean unless corrupted
  std::optional<signal::CorruptionKind> kind;
};

struct BenchmarkOptions {
  double anomalous_fraction = 0.25;
  // Corruptions are assigned round-robin in this order.
  std::vector<signal::CorruptionSpec> corruptions = default_corruptions();
  static std::vector<signal::CorruptionSpec> default_corruptions();
};

// A seeded subset of round(fraction * n) windows is corrupted, the rest stay
// clean. Items keep the input order.
std::vector<BenchmarkItem> corruption_benchmark(const std::vector<SignalWindow>& windows,
                                                const BenchmarkOptions& options, std::uint64_t seed);

struct DetectionMetrics {
  std::string group;  // corruption name or "overall"
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double auroc = 0.0;
  double auprc = 0.0;
  double tpr_at_5fpr = 0.0;
};

struct AnomalyReport {
  std::vector<AnomalyScores> scores;  // reconstruction side, per item
  std::vector<double> input_scores;   // MAE(input, clean), per item
  std::vector<int> labels;
  std::vector<std::string> kinds;  // "clean" or the corruption name
  std::vector<DetectionMetrics> by_mae;
  std::vector<DetectionMetrics> by_corr;
  double spearman_input_vs_recon = 0.0;  // NaN when undefined
};

AnomalyReport anomaly_report(const std::vector<BenchmarkItem>& items, const std::vector<AnomalyScores>& scores);
AnomalyReport anomaly_report(const vamp::VampDiff& model, const std::vector<BenchmarkItem>& items, std::uint64_t seed,
                             const EvalOptions& options = {});

// ---------------------------------------------------------------- generation

struct SignalStats {
  std::optional<double> hr_bpm;
  std::optional<double> ibi_s;
  std::size_t peak_count = 0;
  double ptp = 0.0;
  double std = 0.0;
};

SignalStats signal_stats(const SignalWindow& w, const EvalOptions& options = {});

struct GenReport {
  std::vector<SignalStats> generated;
  double peak_fraction = 0.0;  // share with at least two peaks
  Summary hr;
  Summary ibi;
  Summary ptp;
  Summary std;
  double reference_hr_mean = 0.0;
  double hr_gap = 0.0;  // NaN when either side has no detectable HR
  std::size_t pairs = 0;
  double mean_pairwise_l2 = 0.0;
  double ks_hr = 0.0;
  double ks_ptp = 0.0;
  double ks_std = 0.0;
};

inline constexpr std::size_t kMaxDistancePairs = 200;

GenReport generation_report(const std::vector<SignalWindow>& generated, const std::vector<SignalWindow>& reference,
                            std::uint64_t seed, const EvalOptions& options = {});
GenReport generation_report(const vamp::VampDiff& model, std::size_t n, const std::vector<SignalWindow>& reference,
                            std::uint64_t seed, const EvalOptions& options = {});

// ---------------------------------------------------------------- respiratory rate

struct RrRecording {
  std::string id;
  std::vector<SignalWindow> windows;
  std::optional<double> rr_etco2;
};

struct RrRow {
  std::string id;
  std::size_t windows = 0;
  double rr_etco2 = 0.0;
  double pred_real = 0.0;  // mean over the recording's windows
  double pred_recon = 0.0;
  double abs_delta = 0.0;
};

struct RrExclusion {
  std::string id;
  std::string reason;
};

struct RrReport {
  std::vector<RrRow> rows;
  std::vector<RrExclusion> excluded;
  double mean_abs_delta = 0.0;
  double mae_real = 0.0;
  double mae_recon = 0.0;
  double mae_delta = 0.0;  // mae_recon - mae_real
};

// reconstructions[i] pairs element-wise with recordings[i].windows. Windows
// not yet normalized are normalized with norm before prediction.
RrReport rr_consistency(const std::vector<RrRecording>& recordings,
                        const std::vector<std::vector<SignalWindow>>& reconstructions,
                        const train::RrEstimator& estimator, const signal::NormStats& norm);
RrReport rr_consistency(const std::vector<RrRecording>& recordings, const vamp::VampDiff& model,
                        const train::RrEstimator& estimator, std::uint64_t seed, const EvalOptions& options = {});

// ---------------------------------------------------------------- interpolation

struct InterpPoint {
  double alpha = 0.0;
  std::optional<double> hr_bpm;
  SignalWindow window;  // signal units
};

struct InterpSweep {
  double hr_lo = 0.0;
  double hr_hi = 0.0;
  std::vector<InterpPoint> points;  // ascending alpha
};

// InsufficientPeaksError when an endpoint has no detectable HR.
InterpSweep interpolation_sweep(const SignalWindow& x_lo, const SignalWindow& x_hi, const vamp::VampDiff& model,
                                std::vector<double> alphas, std::uint64_t seed, const EvalOptions& options = {});

}  // namespace vampdiff::eval
