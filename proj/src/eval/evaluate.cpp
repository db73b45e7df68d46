// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"
#include "vampdiff/signal/stats.hpp"
#include "vampdiff/vamp/sampler.hpp"

namespace vampdiff::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": lengths differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DimensionError(std::string(what) + ": empty signals");
}

double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

std::vector<std::uint64_t> seeds_for(std::uint64_t seed, std::size_t n, std::uint64_t offset = 0) {
  std::vector<std::uint64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = Rng::derive(seed, offset + i).next_u64();
  return out;
}

SignalWindow normalized_for(const vamp::VampDiff& model, const SignalWindow& w) {
  if (w.length() != model.config.window_len) {
    throw DimensionError("window length " + std::to_string(w.length()) + " does not match model length " +
                         std::to_string(model.config.window_len));
  }
  return w.normalized ? w : signal::normalize(w, model.norm);
}

std::vector<SignalWindow> normalized_for(const vamp::VampDiff& model, const std::vector<SignalWindow>& ws) {
  std::vector<SignalWindow> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(normalized_for(model, w));
  return out;
}

SignalWindow from_normalized(const vamp::VampDiff& model, const SignalWindow& like, std::vector<double> samples) {
  SignalWindow w;
  w.samples = std::move(samples);
  w.fs = like.fs;
  w.normalized = true;
  w.stats = model.norm;
  w.source_id = like.source_id;
  w.start_index = like.start_index;
  return signal::denormalize(w, model.norm);
}

DetectionMetrics detection(const std::string& group, const std::vector<double>& scores, const std::vector<int>& labels) {
  DetectionMetrics m;
  m.group = group;
  for (int l : labels) (l == 1 ? m.positives : m.negatives) += 1;
  m.auroc = auroc(scores, labels);
  m.auprc = auprc(scores, labels);
  m.tpr_at_5fpr = tpr_at_fpr(scores, labels, 0.05);
  return m;
}

std::vector<double> present(const std::vector<SignalStats>& stats, std::optional<double> SignalStats::*field) {
  std::vector<double> out;
  for (const auto& s : stats) {
    if (s.*field) out.push_back(*(s.*field));
  }
  return out;
}

}  // namespace

std::vector<double> raw_samples(const SignalWindow& w) {
  if (!w.normalized) return w.samples;
  if (!w.stats) throw UsageError("normalized window carries no statistics");
  return signal::denormalize(w, *w.stats).samples;
}

// ---------------------------------------------------------------- reconstruction

ReconRecord recon_metrics(const SignalWindow& x0, const SignalWindow& xhat, const EvalOptions& options) {
  const auto a = raw_samples(x0);
  const auto b = raw_samples(xhat);
  require_same_length(a, b, "recon_metrics");
  if (!(x0.fs > 0.0)) throw ParameterError("recon_metrics: sample rate must be positive");
  ReconRecord r;
  r.source_id = x0.source_id;
  r.start_index = x0.start_index;
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) se += (a[i] - b[i]) * (a[i] - b[i]);
  r.mae = mean_abs_diff(a, b);
  r.rmse = std::sqrt(se / static_cast<double>(a.size()));
  r.pearson = pearson(a, b);
  const auto ha = signal::measure_hr(a, x0.fs, options.band, options.peaks);
  const auto hb = signal::measure_hr(b, x0.fs, options.band, options.peaks);
  if (ha.hr && hb.hr) {
    r.hr_valid = true;
    r.hr_true = ha.hr->hr_bpm;
    r.hr_recon = hb.hr->hr_bpm;
    r.hr_abs_err = std::abs(r.hr_true - r.hr_recon);
    r.ibi_abs_err = std::abs(ha.hr->mean_ibi_s - hb.hr->mean_ibi_s);
  }
  return r;
}

ReconReport summarize_recon(std::vector<ReconRecord> records) {
  ReconReport rep;
  std::vector<double> mae, rmse, r, hr, ibi;
  for (const auto& rec : records) {
    mae.push_back(rec.mae);
    rmse.push_back(rec.rmse);
    r.push_back(rec.pearson);
    if (rec.hr_valid) {
      hr.push_back(rec.hr_abs_err);
      ibi.push_back(rec.ibi_abs_err);
    } else {
      ++rep.hr_excluded;
    }
  }
  rep.mae = summarize(mae);
  rep.rmse = summarize(rmse);
  rep.pearson = summarize(r);
  rep.hr_abs_err = summarize(hr);
  rep.ibi_abs_err = summarize(ibi);
  rep.records = std::move(records);
  return rep;
}

ReconReport reconstruction_report(const vamp::VampDiff& model, const std::vector<SignalWindow>& windows,
                                  std::uint64_t seed, const EvalOptions& options) {
  const auto recon = vamp::reconstruct_many(model, windows, options.ddim_steps, seeds_for(seed, windows.size()));
  std::vector<ReconRecord> records;
  records.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) records.push_back(recon_metrics(windows[i], recon[i], options));
  return summarize_recon(std::move(records));
}

// ---------------------------------------------------------------- latent sensitivity

double sensitivity_ratio(std::span<const double> from_mean, std::span<const double> from_random) {
  require_same_length(from_mean, from_random, "sensitivity_ratio");
  const double range = signal::peak_to_peak(from_mean);
  if (!(range > 0.0)) throw DomainError("sensitivity ratio undefined: posterior-mean decode has zero range");
  return mean_abs_diff(from_mean, from_random) / range;
}

std::vector<double> sensitivity_ratios(const vamp::VampDiff& model, const std::vector<SignalWindow>& windows,
                                       std::uint64_t seed, const EvalOptions& options) {
  if (windows.empty()) return {};
  const auto z_mu = vamp::encode_means(model, normalized_for(model, windows));
  Rng rng(Rng::derive(seed, 0).next_u64());
  const auto z_rand = vamp::standard_normal(rng, z_mu.shape());
  const auto x_T = seeds_for(seed, windows.size(), 1);
  const auto a = vamp::decode(model, z_mu, x_T, options.ddim_steps);
  const auto b = vamp::decode(model, z_rand, x_T, options.ddim_steps);
  std::vector<double> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) out.push_back(sensitivity_ratio(a[i], b[i]));
  return out;
}

double sensitivity_ratio(const SignalWindow& x0, const vamp::VampDiff& model, std::uint64_t seed,
                         const EvalOptions& options) {
  return sensitivity_ratios(model, {x0}, seed, options).front();
}

// ---------------------------------------------------------------- corruption detection

AnomalyScores anomaly_scores(std::span<const double> x0, std::span<const double> xhat) {
  require_same_length(x0, xhat, "anomaly_scores");
  return {mean_abs_diff(x0, xhat), 1.0 - pearson(x0, xhat)};
}

AnomalyScores anomaly_scores(const SignalWindow& x0, const vamp::VampDiff& model, std::uint64_t seed,
                             const EvalOptions& options) {
  const auto xhat = vamp::reconstruct(model, x0, options.ddim_steps, seed);
  return anomaly_scores(raw_samples(x0), xhat.samples);
}

std::vector<signal::CorruptionSpec> BenchmarkOptions::default_corruptions() {
  std::vector<signal::CorruptionSpec> out;
  for (auto kind : {signal::CorruptionKind::kNoise, signal::CorruptionKind::kBaseline, signal::CorruptionKind::kClip,
                    signal::CorruptionKind::kFlatline}) {
    signal::CorruptionSpec s;
    s.kind = kind;
    out.push_back(s);
  }
  return out;
}

std::vector<BenchmarkItem> corruption_benchmark(const std::vector<SignalWindow>& windows,
                                                const BenchmarkOptions& options, std::uint64_t seed) {
  if (!(options.anomalous_fraction >= 0.0 && options.anomalous_fraction <= 1.0)) {
    throw ParameterError("anomalous fraction must lie in [0, 1]");
  }
  if (options.corruptions.empty()) throw ParameterError("corruption benchmark needs at least one corruption");
  for (const auto& c : options.corruptions) c.validate();
  std::vector<BenchmarkItem> items;
  items.reserve(windows.size());
  for (const auto& w : windows) {
    SignalWindow clean = w;
    clean.samples = raw_samples(w);
    clean.normalized = false;
    clean.stats.reset();
    items.push_back({clean, clean, std::nullopt});
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_anom = static_cast<std::size_t>(std::llround(options.anomalous_fraction * static_cast<double>(items.size())));
  for (std::size_t j = 0; j < n_anom; ++j) {
    auto& item = items[order[j]];
    const auto& spec = options.corruptions[j % options.corruptions.size()];
    item.input = signal::corrupt(item.clean, spec, Rng::derive(seed, 1 + j).next_u64());
    item.kind = spec.kind;
  }
  return items;
}

AnomalyReport anomaly_report(const std::vector<BenchmarkItem>& items, const std::vector<AnomalyScores>& scores) {
  if (items.size() != scores.size()) throw DimensionError("anomaly_report: one score pair per item required");
  AnomalyReport rep;
  rep.scores = scores;
  std::vector<std::string> groups;
  for (const auto& item : items) {
    rep.labels.push_back(item.kind ? 1 : 0);
    const std::string k = item.kind ? std::string(signal::to_string(*item.kind)) : "clean";
    rep.kinds.push_back(k);
    if (item.kind && std::find(groups.begin(), groups.end(), k) == groups.end()) groups.push_back(k);
    const auto a = item.clean.samples;
    const auto b = raw_samples(item.input);
    require_same_length(a, b, "anomaly_report");
    rep.input_scores.push_back(mean_abs_diff(a, b));
  }
  std::vector<double> mae;
  std::vector<double> corr;
  for (const auto& s : scores) {
    mae.push_back(s.mae_score);
    corr.push_back(s.corr_score);
  }
  rep.by_mae.push_back(detection("overall", mae, rep.labels));
  rep.by_corr.push_back(detection("overall", corr, rep.labels));
  for (const auto& g : groups) {
    std::vector<double> m;
    std::vector<double> c;
    std::vector<int> l;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (rep.kinds[i] != "clean" && rep.kinds[i] != g) continue;
      m.push_back(mae[i]);
      c.push_back(corr[i]);
      l.push_back(rep.labels[i]);
    }
    rep.by_mae.push_back(detection(g, m, l));
    rep.by_corr.push_back(detection(g, c, l));
  }
  try {
    rep.spearman_input_vs_recon = spearman(rep.input_scores, mae);
  } catch (const DomainError&) {
    rep.spearman_input_vs_recon = kNaN;
  }
  return rep;
}

AnomalyReport anomaly_report(const vamp::VampDiff& model, const std::vector<BenchmarkItem>& items, std::uint64_t seed,
                             const EvalOptions& options) {
  std::vector<SignalWindow> inputs;
  inputs.reserve(items.size());
  for (const auto& item : items) inputs.push_back(item.input);
  const auto recon = vamp::reconstruct_many(model, inputs, options.ddim_steps, seeds_for(seed, inputs.size()));
  std::vector<AnomalyScores> scores;
  scores.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) scores.push_back(anomaly_scores(raw_samples(inputs[i]), recon[i].samples));
  return anomaly_report(items, scores);
}

// ---------------------------------------------------------------- generation

SignalStats signal_stats(const SignalWindow& w, const EvalOptions& options) {
  const auto x = raw_samples(w);
  if (x.empty()) throw DimensionError("signal_stats of an empty window");
  SignalStats s;
  const auto m = signal::measure_hr(x, w.fs, options.band, options.peaks);
  s.peak_count = m.peaks.indices.size();
  if (m.hr) {
    s.hr_bpm = m.hr->hr_bpm;
    s.ibi_s = m.hr->mean_ibi_s;
  }
  s.ptp = signal::peak_to_peak(x);
  s.std = signal::pstdev(x);
  return s;
}

GenReport generation_report(const std::vector<SignalWindow>& generated, const std::vector<SignalWindow>& reference,
                            std::uint64_t seed, const EvalOptions& options) {
  if (generated.size() < 2) throw ParameterError("generation_report needs at least 2 generated signals");
  if (reference.empty()) throw ParameterError("generation_report needs a nonempty reference set");
  GenReport rep;
  std::vector<std::vector<double>> raw;
  std::vector<double> peaks_n;
  std::size_t with_peaks = 0;
  for (const auto& w : generated) {
    rep.generated.push_back(signal_stats(w, options));
    raw.push_back(raw_samples(w));
    if (raw.back().size() != raw.front().size()) throw DimensionError("generated signals differ in length");
    if (rep.generated.back().peak_count >= 2) ++with_peaks;
  }
  std::vector<SignalStats> ref;
  for (const auto& w : reference) ref.push_back(signal_stats(w, options));
  rep.peak_fraction = static_cast<double>(with_peaks) / static_cast<double>(generated.size());

  const auto gen_hr = present(rep.generated, &SignalStats::hr_bpm);
  const auto ref_hr = present(ref, &SignalStats::hr_bpm);
  std::vector<double> gen_ptp, gen_std, ref_ptp, ref_std;
  for (const auto& s : rep.generated) {
    gen_ptp.push_back(s.ptp);
    gen_std.push_back(s.std);
  }
  for (const auto& s : ref) {
    ref_ptp.push_back(s.ptp);
    ref_std.push_back(s.std);
  }
  rep.hr = summarize(gen_hr);
  rep.ibi = summarize(present(rep.generated, &SignalStats::ibi_s));
  rep.ptp = summarize(gen_ptp);
  rep.std = summarize(gen_std);
  rep.reference_hr_mean = ref_hr.empty() ? kNaN : summarize(ref_hr).mean;
  const bool hr_both = !gen_hr.empty() && !ref_hr.empty();
  rep.hr_gap = hr_both ? std::abs(rep.hr.mean - rep.reference_hr_mean) : kNaN;
  rep.ks_hr = hr_both ? ks_statistic(gen_hr, ref_hr) : kNaN;
  rep.ks_ptp = ks_statistic(gen_ptp, ref_ptp);
  rep.ks_std = ks_statistic(gen_std, ref_std);

  const std::size_t n = generated.size();
  const std::size_t total_pairs = n * (n - 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (total_pairs <= kMaxDistancePairs) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else {
    Rng rng(seed);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    while (pairs.size() < kMaxDistancePairs) {
      std::size_t i = rng.index(n);
      std::size_t j = rng.index(n);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (seen.insert({i, j}).second) pairs.emplace_back(i, j);
    }
  }
  double acc = 0.0;
  for (auto [i, j] : pairs) {
    double ss = 0.0;
    for (std::size_t s = 0; s < raw[i].size(); ++s) ss += (raw[i][s] - raw[j][s]) * (raw[i][s] - raw[j][s]);
    acc += std::sqrt(ss);
  }
  rep.pairs = pairs.size();
  rep.mean_pairwise_l2 = acc / static_cast<double>(pairs.size());
  return rep;
}

GenReport generation_report(const vamp::VampDiff& model, std::size_t n, const std::vector<SignalWindow>& reference,
                            std::uint64_t seed, const EvalOptions& options) {
  if (n < 2) throw ParameterError("generation_report needs at least 2 generated signals");
  if (reference.empty()) throw ParameterError("generation_report needs a nonempty reference set");
  const auto samples = vamp::generate_many(model, n, options.ddim_steps, Rng::derive(seed, 0).next_u64(), reference.front().fs);
  std::vector<SignalWindow> gen;
  gen.reserve(n);
  for (const auto& s : samples) gen.push_back(s.window);
  return generation_report(gen, reference, Rng::derive(seed, 1).next_u64(), options);
}

// ---------------------------------------------------------------- respiratory rate

RrReport rr_consistency(const std::vector<RrRecording>& recordings,
                        const std::vector<std::vector<SignalWindow>>& reconstructions,
                        const train::RrEstimator& estimator, const signal::NormStats& norm) {
  if (recordings.size() != reconstructions.size()) {
    throw DimensionError("rr_consistency: one reconstruction list per recording required");
  }
  auto prep = [&](const std::vector<SignalWindow>& ws) {
    std::vector<SignalWindow> out;
    for (const auto& w : ws) out.push_back(w.normalized ? w : signal::normalize(w, norm));
    return out;
  };
  auto mean_of = [](const std::vector<double>& v) { return summarize(v).mean; };
  RrReport rep;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    const auto& rec = recordings[r];
    if (!rec.rr_etco2) {
      rep.excluded.push_back({rec.id, "no capnography reference rate"});
      continue;
    }
    if (rec.windows.empty()) {
      rep.excluded.push_back({rec.id, "no windows"});
      continue;
    }
    if (reconstructions[r].size() != rec.windows.size()) {
      throw DimensionError("rr_consistency: recording " + rec.id + " has mismatched reconstruction count");
    }
    RrRow row;
    row.id = rec.id;
    row.windows = rec.windows.size();
    row.rr_etco2 = *rec.rr_etco2;
    row.pred_real = mean_of(estimator.predict(prep(rec.windows)));
    row.pred_recon = mean_of(estimator.predict(prep(reconstructions[r])));
    row.abs_delta = std::abs(row.pred_real - row.pred_recon);
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) {
    rep.mean_abs_delta = rep.mae_real = rep.mae_recon = rep.mae_delta = kNaN;
    return rep;
  }
  std::vector<double> d, er, ec;
  for (const auto& row : rep.rows) {
    d.push_back(row.abs_delta);
    er.push_back(std::abs(row.pred_real - row.rr_etco2));
    ec.push_back(std::abs(row.pred_recon - row.rr_etco2));
  }
  rep.mean_abs_delta = mean_of(d);
  rep.mae_real = mean_of(er);
  rep.mae_recon = mean_of(ec);
  rep.mae_delta = rep.mae_recon - rep.mae_real;
  return rep;
}

RrReport rr_consistency(const std::vector<RrRecording>& recordings, const vamp::VampDiff& model,
                        const train::RrEstimator& estimator, std::uint64_t seed, const EvalOptions& options) {
  std::vector<std::vector<SignalWindow>> recon;
  std::uint64_t offset = 0;
  for (const auto& rec : recordings) {
    if (!rec.rr_etco2 || rec.windows.empty()) {
      recon.emplace_back();
    } else {
      recon.push_back(
          vamp::reconstruct_many(model, rec.windows, options.ddim_steps, seeds_for(seed, rec.windows.size(), offset)));
    }
    offset += rec.windows.size();
  }
  return rr_consistency(recordings, recon, estimator, model.norm);
}

// ---------------------------------------------------------------- interpolation

InterpSweep interpolation_sweep(const SignalWindow& x_lo, const SignalWindow& x_hi, const vamp::VampDiff& model,
                                std::vector<double> alphas, std::uint64_t seed, const EvalOptions& options) {
  if (alphas.empty()) throw ParameterError("interpolation_sweep needs at least one alpha");
  InterpSweep sweep;
  const auto lo = signal_stats(x_lo, options);
  const auto hi = signal_stats(x_hi, options);
  if (!lo.hr_bpm || !hi.hr_bpm) {
    throw InsufficientPeaksError(std::string("interpolation endpoint has no detectable heart rate (") +
                                 (lo.hr_bpm ? "high" : "low") + " window)");
  }
  sweep.hr_lo = *lo.hr_bpm;
  sweep.hr_hi = *hi.hr_bpm;
  std::stable_sort(alphas.begin(), alphas.end());
  const auto z = vamp::encode_means(model, {normalized_for(model, x_lo), normalized_for(model, x_hi)});
  const std::size_t c = z.dim(1);
  const std::size_t t = z.dim(2);
  const auto z_lo = nc::slice(z, 0, 0, 1);
  const auto z_hi = nc::slice(z, 0, 1, 2);
  const auto zs = vamp::interpolate_latent(z_lo, z_hi, alphas);
  std::vector<double> flat;
  flat.reserve(alphas.size() * c * t);
  for (const auto& zi : zs) {
    const auto v = zi.to_vector();
    flat.insert(flat.end(), v.begin(), v.end());
  }
  const auto batch = nc::Tensor::from_vector({alphas.size(), c, t}, std::move(flat));
  const auto decoded = vamp::decode(model, batch, std::vector<std::uint64_t>(alphas.size(), seed), options.ddim_steps);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    InterpPoint p;
    p.alpha = alphas[i];
    p.window = from_normalized(model, x_lo, decoded[i]);
    p.window.source_id = "interp";
    p.hr_bpm = signal_stats(p.window, options).hr_bpm;
    sweep.points.push_back(std::move(p));
  }
  return sweep;
}

}  // namespace vampdiff::eval
