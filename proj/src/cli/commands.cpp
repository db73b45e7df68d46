// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vampdiff/cli/checkpoint.hpp"
#include "vampdiff/cli/data.hpp"
#include "vampdiff/error.hpp"
#include "vampdiff/eval/report.hpp"
#include "vampdiff/signal/stats.hpp"
#include "vampdiff/train/trainer.hpp"

namespace vampdiff::cli {

namespace {

void say(const Logger& logger, const std::string& msg) {
  if (logger) logger(msg);
}

std::vector<Recording> load_split(const Path& data, const std::string& split, const RunConfig& config) {
  const auto dir = split_dir(data, split);
  auto recs = ingest_dir(dir, config.fs);
  for (const auto& r : recs) {
    if (r.fs != config.fs) {
      throw ConfigError("recording " + r.id + " has fs=" + eval::format_number(r.fs) + " but the configuration expects " +
                        eval::format_number(config.fs));
    }
  }
  if (recs.empty()) throw IngestError(dir.string() + ": no .csv recordings");
  return recs;
}

eval::EvalOptions eval_options(const RunConfig& c) {
  eval::EvalOptions o;
  o.ddim_steps = c.ddim_steps;
  o.band = c.band;
  o.peaks = c.peaks;
  return o;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) { return Rng::derive(seed, stream).next_u64(); }

signal::SignalWindow window_spec(const std::string& spec, const RunConfig& config) {
  std::string file = spec;
  std::size_t start = 0;
  if (const auto colon = spec.rfind(':'); colon != std::string::npos && colon + 1 < spec.size()) {
    const auto tail = spec.substr(colon + 1);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (ec == std::errc() && p == tail.data() + tail.size()) {
      file = spec.substr(0, colon);
      start = v;
    }
  }
  const auto rec = ingest_csv(file, config.fs);
  const std::size_t len = config.model.window_len;
  if (start + len > rec.ppg.size()) {
    throw UsageError(file + ": window at " + std::to_string(start) + " of length " + std::to_string(len) +
                     " exceeds the recording (" + std::to_string(rec.ppg.size()) + " samples)");
  }
  signal::SignalWindow w;
  w.samples.assign(rec.ppg.begin() + static_cast<std::ptrdiff_t>(start),
                   rec.ppg.begin() + static_cast<std::ptrdiff_t>(start + len));
  w.fs = rec.fs;
  w.source_id = rec.id;
  w.start_index = start;
  return w;
}

signal::CorruptionSpec corruption_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("corruption entries must be JSON objects");
  signal::CorruptionSpec s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    auto num = [&]() {
      if (!v.is_number()) throw ConfigError("corruption key " + k + " must be a number");
      return v.get<double>();
    };
    if (k == "kind") {
      if (!v.is_string()) throw ConfigError("corruption kind must be a string");
      try {
        s.kind = signal::corruption_kind_from_string(v.get<std::string>());
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    } else if (k == "noise_sigma") {
      s.noise_sigma = num();
    } else if (k == "wander_amplitude") {
      s.wander_amplitude = num();
    } else if (k == "wander_freq_lo") {
      s.wander_freq_lo = num();
    } else if (k == "wander_freq_hi") {
      s.wander_freq_hi = num();
    } else if (k == "clip_fraction") {
      s.clip_fraction = num();
    } else if (k == "flat_start") {
      s.flat_start = num();
    } else if (k == "flat_duration") {
      s.flat_duration = num();
    } else {
      throw ConfigError("unknown corruption key \"" + k + "\"");
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::string histogram_text(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
  return eval::histogram_csv(eval::histogram(values, lo, hi, bins));
}

}  // namespace

// ---------------------------------------------------------------- train

TrainResult run_train(const TrainArgs& args, const Logger& logger) {
  const auto& config = args.config;
  config.validate();
  const auto recs = load_split(args.data, "train", config);
  const auto windows = windows_of(recs, config);
  if (windows.empty()) throw IngestError(args.data.string() + ": no windows survived segmentation");
  std::vector<std::vector<double>> raw;
  raw.reserve(windows.size());
  for (const auto& w : windows) raw.push_back(w.samples);
  const auto norm = signal::fit_norm_stats(raw);
  std::vector<signal::SignalWindow> train_windows;
  train_windows.reserve(windows.size());
  for (const auto& w : windows) train_windows.push_back(signal::normalize(w, norm));
  say(logger, "training on " + std::to_string(train_windows.size()) + " windows from " + std::to_string(recs.size()) +
                  " recordings");

  vamp::VampDiff model(config.model, sub_seed(config.seed, 0));
  model.norm = norm;
  auto tc = config.train;
  tc.seed = sub_seed(config.seed, 1);

  TrainResult result;
  result.windows = train_windows.size();
  result.log = args.log ? *args.log : Path(args.out.string() + ".log.csv");
  std::string log = train::log_header() + "\n";
  eval::write_text(result.log, log);
  train::FitHooks hooks;
  hooks.on_epoch = [&](const train::EpochLog& e) {
    log += train::log_row(e) + "\n";
    eval::write_text(result.log, log);
    say(logger, train::log_row(e));
  };
  hooks.on_checkpoint = [&](int epoch, const vamp::VampDiff& m) {
    save_checkpoint(args.out, config, m);
    say(logger, "checkpoint at epoch " + std::to_string(epoch));
  };
  train::fit(model, train_windows, tc, hooks);

  std::optional<train::RrEstimator> rr;
  if (args.rr_estimator) {
    std::vector<signal::SignalWindow> rr_windows;
    std::vector<double> labels;
    for (const auto& rec : rr_recordings_of(recs, config)) {
      if (!rec.rr_etco2) continue;
      for (const auto& w : rec.windows) {
        rr_windows.push_back(signal::normalize(w, norm));
        labels.push_back(*rec.rr_etco2);
      }
    }
    if (rr_windows.empty()) throw IngestError("no training recording has a usable co2 channel for the RR estimator");
    auto rc = config.rr;
    rc.seed = sub_seed(config.seed, 2);
    say(logger, "training RR estimator on " + std::to_string(rr_windows.size()) + " windows");
    rr = train::train_rr_estimator(rr_windows, labels, rc);
    result.rr_windows = rr_windows.size();
  }
  save_checkpoint(args.out, config, model, rr ? &*rr : nullptr);
  return result;
}

// ---------------------------------------------------------------- generate

void run_generate(const GenerateArgs& args, const Logger& logger) {
  if (args.num == 0) throw UsageError("generate: --num must be at least 1");
  const auto ck = load_checkpoint(args.ckpt);
  ck.config.validate();
  const auto samples = vamp::generate_many(ck.model, args.num, ck.config.ddim_steps, args.seed, ck.config.fs);
  std::vector<signal::SignalWindow> ws;
  std::vector<std::size_t> comps;
  for (const auto& s : samples) {
    ws.push_back(s.window);
    comps.push_back(s.component);
  }
  const std::vector<std::string> meta{"vampdiff generate", "num=" + std::to_string(args.num),
                                      "seed=" + std::to_string(args.seed),
                                      "ddim_steps=" + std::to_string(ck.config.ddim_steps),
                                      "fs=" + eval::format_number(ck.config.fs)};
  eval::write_text(args.out, windows_csv(ws, meta, comps));
  say(logger, "wrote " + std::to_string(args.num) + " samples to " + args.out.string());
}

// ---------------------------------------------------------------- reconstruct

void run_reconstruct(const ReconstructArgs& args, const Logger& logger) {
  const auto ck = load_checkpoint(args.ckpt);
  const auto& config = ck.config;
  config.validate();
  const auto windows = windows_of(load_split(args.data, "test", config), config);
  const std::uint64_t seed = args.seed.value_or(config.seed);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < windows.size(); ++i) seeds.push_back(Rng::derive(seed, i).next_u64());
  const auto recon = vamp::reconstruct_many(ck.model, windows, config.ddim_steps, seeds);
  const auto opts = eval_options(config);
  std::ostringstream os;
  os << "source_id,start_index,mae,rmse,pearson,hr_valid,hr_true,hr_recon,hr_abs_err,ibi_abs_err";
  for (std::size_t i = 0; i < config.model.window_len; ++i) os << ",s" << i;
  os << '\n';
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto rec = eval::recon_metrics(windows[i], recon[i], opts);
    std::string row = eval::recon_csv(eval::summarize_recon({rec}));
    row = row.substr(row.find('\n') + 1);
    row.pop_back();
    os << row;
    for (double v : recon[i].samples) os << ',' << eval::format_number(v);
    os << '\n';
  }
  eval::write_text(args.out, os.str());
  say(logger, "reconstructed " + std::to_string(windows.size()) + " windows");
}

// ---------------------------------------------------------------- evaluate

std::vector<std::string> run_evaluate(const EvaluateArgs& args, const Logger& logger) {
  const auto ck = load_checkpoint(args.ckpt);
  const auto& config = ck.config;
  config.validate();
  const std::uint64_t seed = args.seed.value_or(config.seed);
  const auto opts = eval_options(config);
  const auto test_recs = load_split(args.data, "test", config);
  const auto test = windows_of(test_recs, config);
  const auto reference = windows_of(load_split(args.data, "train", config), config);
  if (test.empty()) throw IngestError(args.data.string() + ": no evaluation windows");
  if (reference.empty()) throw IngestError(args.data.string() + ": no reference windows");
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    eval::write_text(args.report / name, text);
    written.push_back(name);
  };

  say(logger, "reconstruction report over " + std::to_string(test.size()) + " windows");
  const auto recon = eval::reconstruction_report(ck.model, test, sub_seed(seed, 1), opts);
  emit("recon.csv", eval::recon_csv(recon));
  emit("recon_summary.csv", eval::recon_summary_csv(recon));

  eval::GenReport gen;
  if (args.generated) {
    const auto ws = read_windows_csv(*args.generated, config.fs);
    say(logger, "generation report over " + std::to_string(ws.size()) + " supplied windows");
    gen = eval::generation_report(ws, reference, sub_seed(seed, 2), opts);
  } else {
    const std::size_t n = args.gen_n.value_or(config.gen_n);
    say(logger, "generation report over " + std::to_string(n) + " samples");
    gen = eval::generation_report(ck.model, n, reference, sub_seed(seed, 2), opts);
  }
  emit("gen_signals.csv", eval::gen_signals_csv(gen));
  emit("gen_summary.csv", eval::gen_summary_csv(gen));

  say(logger, "corruption benchmark");
  eval::BenchmarkOptions bo;
  bo.anomalous_fraction = config.anomalous_fraction;
  const auto items = eval::corruption_benchmark(test, bo, sub_seed(seed, 3));
  const auto anomaly = eval::anomaly_report(ck.model, items, sub_seed(seed, 4), opts);
  emit("anomaly.csv", eval::anomaly_csv(anomaly));
  emit("anomaly_scores.csv", eval::anomaly_scores_csv(anomaly));

  say(logger, "latent sensitivity");
  const std::size_t n_sens = std::min(config.sensitivity_windows, test.size());
  const std::vector<signal::SignalWindow> sens_windows(test.begin(), test.begin() + static_cast<std::ptrdiff_t>(n_sens));
  const auto rho = eval::sensitivity_ratios(ck.model, sens_windows, sub_seed(seed, 5), opts);
  {
    std::ostringstream os;
    os << "source_id,start_index,rho\n";
    for (std::size_t i = 0; i < rho.size(); ++i) {
      os << sens_windows[i].source_id << ',' << sens_windows[i].start_index << ',' << eval::format_number(rho[i]) << '\n';
    }
    os << "# mean_rho=" << eval::format_number(eval::summarize(rho).mean) << '\n';
    emit("sensitivity.csv", os.str());
  }

  std::vector<double> hr_ref;
  for (const auto& w : reference) {
    if (auto s = eval::signal_stats(w, opts); s.hr_bpm) hr_ref.push_back(*s.hr_bpm);
  }
  std::vector<double> hr_gen;
  for (const auto& s : gen.generated) {
    if (s.hr_bpm) hr_gen.push_back(*s.hr_bpm);
  }
  emit("hist_hr_reference.csv", histogram_text(hr_ref, 30.0, 210.0, 36));
  emit("hist_hr_generated.csv", histogram_text(hr_gen, 30.0, 210.0, 36));

  const auto rr_recs = rr_recordings_of(test_recs, config);
  std::vector<double> rr_true;
  for (const auto& r : rr_recs) {
    if (r.rr_etco2) rr_true.push_back(*r.rr_etco2);
  }
  emit("hist_rr_etco2.csv", histogram_text(rr_true, 0.0, 40.0, 20));
  if (ck.rr) {
    say(logger, "respiratory-rate consistency");
    const auto rr = eval::rr_consistency(rr_recs, ck.model, *ck.rr, sub_seed(seed, 6), opts);
    emit("rr_consistency.csv", eval::rr_csv(rr));
    std::vector<double> pred;
    for (const auto& row : rr.rows) pred.push_back(row.pred_real);
    emit("hist_rr_pred.csv", histogram_text(pred, 0.0, 40.0, 20));
  } else {
    emit("rr_consistency.csv",
         "recording,windows,rr_etco2,pred_real,pred_recon,abs_delta\n# no RR estimator in checkpoint\n");
  }

  {
    std::ostringstream os;
    os << "key,value\n";
    os << "recon_pearson_mean," << eval::format_number(recon.pearson.mean) << '\n';
    os << "recon_hr_abs_err_mean," << eval::format_number(recon.hr_abs_err.mean) << '\n';
    os << "gen_peak_fraction," << eval::format_number(gen.peak_fraction) << '\n';
    os << "gen_hr_gap," << eval::format_number(gen.hr_gap) << '\n';
    os << "sensitivity_mean," << eval::format_number(eval::summarize(rho).mean) << '\n';
    os << "anomaly_auroc_mae," << eval::format_number(anomaly.by_mae.front().auroc) << '\n';
    emit("summary.csv", os.str());
  }
  return written;
}

// ---------------------------------------------------------------- corrupt

void run_corrupt(const CorruptArgs& args, const Logger& logger) {
  args.config.validate();
  Json spec;
  try {
    spec = Json::parse(read_file(args.spec));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(args.spec.string() + ": invalid JSON: " + e.what());
  }
  eval::BenchmarkOptions bo;
  bo.anomalous_fraction = args.config.anomalous_fraction;
  auto parse_list = [&](const Json& list) {
    bo.corruptions.clear();
    for (const auto& c : list) bo.corruptions.push_back(corruption_from_json(c));
  };
  if (spec.is_array()) {
    parse_list(spec);
  } else if (spec.is_object() && (spec.contains("corruptions") || spec.contains("anomalous_fraction"))) {
    for (auto it = spec.begin(); it != spec.end(); ++it) {
      if (it.key() == "corruptions") {
        if (!it->is_array()) throw ConfigError("corruptions must be an array");
        parse_list(*it);
      } else if (it.key() == "anomalous_fraction") {
        if (!it->is_number()) throw ConfigError("anomalous_fraction must be a number");
        bo.anomalous_fraction = it->get<double>();
      } else {
        throw ConfigError("unknown corruption spec key \"" + it.key() + "\"");
      }
    }
  } else {
    bo.corruptions = {corruption_from_json(spec)};
  }
  const auto windows = windows_of(load_split(args.data, "test", args.config), args.config);
  const auto items = eval::corruption_benchmark(windows, bo, args.seed);
  std::ostringstream os;
  os << "# vampdiff corrupt seed=" << args.seed << '\n';
  os << "index,source_id,start_index,kind,label";
  const std::size_t len = args.config.model.window_len;
  for (std::size_t i = 0; i < len; ++i) os << ",s" << i;
  os << '\n';
  std::size_t anomalous = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    os << i << ',' << it.clean.source_id << ',' << it.clean.start_index << ','
       << (it.kind ? std::string(signal::to_string(*it.kind)) : "clean") << ',' << (it.kind ? 1 : 0);
    for (double v : it.input.samples) os << ',' << eval::format_number(v);
    os << '\n';
    if (it.kind) ++anomalous;
  }
  eval::write_text(args.out / "benchmark.csv", os.str());
  say(logger, "wrote " + std::to_string(items.size()) + " windows (" + std::to_string(anomalous) + " corrupted)");
}

// ---------------------------------------------------------------- interpolate

void run_interpolate(const InterpolateArgs& args, const Logger& logger) {
  const auto ck = load_checkpoint(args.ckpt);
  ck.config.validate();
  const auto lo = window_spec(args.lo, ck.config);
  const auto hi = window_spec(args.hi, ck.config);
  const auto sweep = eval::interpolation_sweep(lo, hi, ck.model, args.alphas, args.seed.value_or(ck.config.seed),
                                               eval_options(ck.config));
  eval::write_text(args.out, eval::interpolation_csv(sweep));
  say(logger, "endpoints " + eval::format_number(sweep.hr_lo) + " and " + eval::format_number(sweep.hr_hi) + " bpm");
}

// ---------------------------------------------------------------- synth

void run_synth(const SynthArgs& args, const Logger& logger) {
  const auto s = write_synthetic_dataset(args.out, args.config);
  say(logger, "wrote " + std::to_string(s.train) + " train, " + std::to_string(s.val) + " val and " +
                  std::to_string(s.test) + " test recordings to " + args.out.string());
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw ConfigError("empty entry in alpha list \"" + text + "\"");
    const auto cell = item.substr(b, e - b + 1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || p != cell.data() + cell.size()) throw ConfigError("invalid alpha \"" + cell + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("alpha list is empty");
  return out;
}

}  // namespace vampdiff::cli
