// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/cli/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "vampdiff/error.hpp"

namespace vampdiff::cli {

namespace {

struct Field {
  std::string key;
  std::function<Json(const RunConfig&)> get;
  std::function<void(RunConfig&, const Json&)> set;
};

template <typename T>
T as(const Json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(key + " must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(key + " must be a number");
      return v.get<T>();
    } else {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError(key + " must be a non-negative integer");
      }
      return v.get<T>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

// Accessor lambdas for nested members.
#define VD_FIELD(T, key, expr)                                                               \
  Field {                                                                                    \
    key, [](const RunConfig& c) { return Json(c.expr); },                                   \
        [](RunConfig& c, const Json& v) { c.expr = as<T>(v, key); }                         \
  }

#define VD_ENUM(key, expr, to_str, from_str)                                                 \
  Field {                                                                                    \
    key, [](const RunConfig& c) { return Json(std::string(to_str(c.expr))); },              \
        [](RunConfig& c, const Json& v) {                                                    \
          try {                                                                              \
            c.expr = from_str(as<std::string>(v, key));                                      \
          } catch (const ConfigError&) {                                                     \
            throw;                                                                           \
          } catch (const Error& e) {                                                         \
            throw ConfigError(std::string(key) + ": " + e.what());                           \
          }                                                                                  \
        }                                                                                    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      // profile is handled separately: it selects the defaults
      VD_FIELD(std::uint64_t, "seed", seed),
      VD_FIELD(double, "fs", fs),
      VD_FIELD(std::size_t, "window_len", model.window_len),
      VD_FIELD(double, "overlap", overlap),
      VD_FIELD(std::size_t, "quality_min_peaks", quality_min_peaks),
      VD_FIELD(double, "band_lo_hz", band.lo_hz),
      VD_FIELD(double, "band_hi_hz", band.hi_hz),
      VD_FIELD(double, "peak_min_distance_s", peaks.min_distance_s),
      VD_FIELD(double, "peak_prominence_frac", peaks.prominence_frac),
      VD_FIELD(double, "peak_height_percentile", peaks.height_percentile),
      VD_FIELD(std::size_t, "latent_channels", model.latent_channels),
      VD_FIELD(std::size_t, "pooled_len", model.pooled_len),
      VD_FIELD(std::size_t, "num_pseudo", model.num_pseudo),
      VD_FIELD(std::size_t, "diffusion_steps", model.diffusion_steps),
      VD_FIELD(double, "width_factor", model.width_factor),
      VD_FIELD(std::size_t, "time_dim", model.time_dim),
      VD_FIELD(std::size_t, "blocks_per_level", model.blocks_per_level),
      VD_FIELD(double, "logvar_bias_init", model.logvar_bias_init),
      VD_FIELD(double, "beta_start_ref", model.beta_start_ref),
      VD_FIELD(double, "beta_end_ref", model.beta_end_ref),
      VD_ENUM("pooled_variance", model.pooled_variance, vamp::to_string, vamp::pooled_variance_from_string),
      VD_ENUM("prior", model.prior, vamp::to_string, vamp::prior_kind_from_string),
      VD_ENUM("conditioning", model.conditioning, vamp::to_string, vamp::conditioning_from_string),
      VD_FIELD(std::size_t, "epochs", train.epochs),
      VD_FIELD(std::size_t, "batch_size", train.batch_size),
      VD_FIELD(double, "lr_decoder", train.lr_decoder),
      VD_FIELD(double, "lr_encoder", train.lr_encoder),
      VD_FIELD(double, "lr_pseudo", train.lr_pseudo),
      VD_FIELD(double, "weight_decay", train.weight_decay),
      VD_FIELD(double, "clip_norm", train.clip_norm),
      VD_FIELD(std::size_t, "mc_samples", train.mc_samples),
      VD_FIELD(double, "freeze_beta", train.freeze_beta),
      VD_FIELD(std::size_t, "checkpoint_every", train.checkpoint_every),
      VD_FIELD(std::size_t, "freeze_epochs", train.beta.freeze_epochs),
      VD_FIELD(double, "beta_floor", train.beta.floor_value),
      VD_FIELD(std::size_t, "floor_until", train.beta.floor_until),
      VD_FIELD(std::size_t, "ramp_until", train.beta.ramp_until),
      VD_FIELD(double, "beta_ramp_target", train.beta.ramp_target),
      VD_FIELD(double, "lambda_diff", train.weights.diff),
      VD_FIELD(double, "lambda_recon", train.weights.recon),
      VD_FIELD(double, "lambda_spec", train.weights.spec),
      VD_FIELD(double, "lambda_deriv", train.weights.deriv),
      VD_FIELD(double, "lambda_amp", train.weights.amp),
      VD_FIELD(double, "lambda_ptp", train.weights.ptp),
      VD_FIELD(std::size_t, "ddim_steps", ddim_steps),
      VD_FIELD(std::size_t, "gen_n", gen_n),
      VD_FIELD(double, "anomalous_fraction", anomalous_fraction),
      VD_FIELD(std::size_t, "sensitivity_windows", sensitivity_windows),
      VD_FIELD(double, "rr_width_factor", rr.width_factor),
      VD_FIELD(std::size_t, "rr_epochs", rr.epochs),
      VD_FIELD(std::size_t, "rr_batch_size", rr.batch_size),
      VD_FIELD(double, "rr_lr", rr.lr),
      VD_FIELD(double, "rr_weight_decay", rr.weight_decay),
      VD_FIELD(std::size_t, "synth_patients", synth.patients),
      VD_FIELD(double, "synth_duration_s", synth.duration_s),
      VD_FIELD(double, "synth_hr_lo", synth.hr_lo),
      VD_FIELD(double, "synth_hr_hi", synth.hr_hi),
      VD_FIELD(double, "synth_rr_lo", synth.rr_lo),
      VD_FIELD(double, "synth_rr_hi", synth.rr_hi),
      VD_FIELD(double, "synth_amp_lo", synth.amp_lo),
      VD_FIELD(double, "synth_amp_hi", synth.amp_hi),
      VD_FIELD(double, "synth_val_fraction", synth.val_fraction),
      VD_FIELD(double, "synth_test_fraction", synth.test_fraction),
      VD_FIELD(std::string, "data_dir", data_dir),
      VD_FIELD(std::string, "out_dir", out_dir),
  };
  return table;
}

#undef VD_FIELD
#undef VD_ENUM

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <typename F>
void rethrow_as_config(const char* what, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Profile p) { return p == Profile::kFull ? "full" : "desk"; }

Profile profile_from_string(std::string_view s) {
  if (s == "full") return Profile::kFull;
  if (s == "desk") return Profile::kDesk;
  throw ConfigError("profile must be \"full\" or \"desk\", got \"" + std::string(s) + "\"");
}

RunConfig RunConfig::defaults(Profile profile) {
  RunConfig c;
  c.profile = profile;
  if (profile == Profile::kFull) {
    c.fs = 300.0;
    c.model.window_len = 3072;
    c.model.latent_channels = 256;
    c.model.pooled_len = 8;
    c.model.num_pseudo = 100;
    c.model.diffusion_steps = 100;
    c.model.width_factor = 1.0;
    c.ddim_steps = 50;
    c.gen_n = 5000;
    c.rr.width_factor = 1.0;
    c.train = train::TrainConfig{};
    c.train.epochs = 200;
    c.train.batch_size = 32;
    c.sensitivity_windows = 500;
    return c;
  }
  c.fs = 75.0;
  c.model.window_len = 768;
  c.model.latent_channels = 32;
  c.model.pooled_len = 8;
  c.model.num_pseudo = 16;
  c.model.diffusion_steps = 50;
  c.model.width_factor = 0.125;
  c.ddim_steps = 25;
  c.gen_n = 200;
  c.train.epochs = 60;
  c.train.batch_size = 16;
  c.train.lr_decoder = 1e-3;
  c.train.lr_encoder = 5e-4;
  c.train.lr_pseudo = 2e-3;
  c.train.checkpoint_every = 20;
  c.train.beta.freeze_epochs = 6;
  c.train.beta.floor_until = 15;
  c.train.beta.ramp_until = 40;
  c.rr.width_factor = 0.125;
  return c;
}

signal::SegmentOptions RunConfig::segment_options() const {
  signal::SegmentOptions s;
  s.window_len = model.window_len;
  s.overlap_frac = overlap;
  s.quality_min_peaks = quality_min_peaks;
  s.band = band;
  s.peaks = peaks;
  return s;
}

void RunConfig::validate() const {
  require(fs > 0.0, "fs must be positive");
  require(overlap >= 0.0 && overlap < 1.0, "overlap must lie in [0, 1)");
  require(band.lo_hz > 0.0 && band.lo_hz < band.hi_hz && band.hi_hz < fs / 2.0,
          "band edges must satisfy 0 < band_lo_hz < band_hi_hz < fs/2");
  require(peaks.min_distance_s > 0.0, "peak_min_distance_s must be positive");
  require(peaks.prominence_frac > 0.0, "peak_prominence_frac must be positive");
  require(peaks.height_percentile > 0.0 && peaks.height_percentile <= 100.0,
          "peak_height_percentile must lie in (0, 100]");
  rethrow_as_config("model", [&] { model.validate(); });
  rethrow_as_config("train", [&] { train.validate(); });
  rethrow_as_config("rr", [&] { rr.validate(); });
  require(ddim_steps >= 1 && ddim_steps <= model.diffusion_steps, "ddim_steps must lie in [1, diffusion_steps]");
  require(gen_n >= 2, "gen_n must be at least 2");
  require(anomalous_fraction > 0.0 && anomalous_fraction < 1.0, "anomalous_fraction must lie in (0, 1)");
  require(sensitivity_windows >= 1, "sensitivity_windows must be at least 1");
  require(synth.patients >= 3, "synth_patients must be at least 3");
  require(synth.duration_s * fs >= static_cast<double>(model.window_len),
          "synth_duration_s must cover at least one window");
  require(synth.hr_lo > 0.0 && synth.hr_lo <= synth.hr_hi, "synth HR range must satisfy 0 < lo <= hi");
  require(synth.rr_lo > 0.0 && synth.rr_lo <= synth.rr_hi, "synth RR range must satisfy 0 < lo <= hi");
  require(synth.amp_lo > 0.0 && synth.amp_lo <= synth.amp_hi, "synth amplitude range must satisfy 0 < lo <= hi");
  require(synth.val_fraction >= 0.0 && synth.test_fraction > 0.0 && synth.val_fraction + synth.test_fraction < 1.0,
          "synth split fractions must leave a nonempty training share");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out{"profile"};
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

Json to_json(const RunConfig& config) {
  Json j;
  j["profile"] = std::string(to_string(config.profile));
  for (const auto& f : fields()) j[f.key] = f.get(config);
  return j;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  Profile profile = Profile::kDesk;
  if (auto it = j.find("profile"); it != j.end()) profile = profile_from_string(as<std::string>(*it, "profile"));
  RunConfig c = RunConfig::defaults(profile);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "profile") continue;
    const auto& table = fields();
    auto f = std::find_if(table.begin(), table.end(), [&](const Field& x) { return x.key == it.key(); });
    if (f == table.end()) throw ConfigError("unknown configuration key \"" + it.key() + "\"");
    f->set(c, it.value());
  }
  return c;
}

std::string dump_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace vampdiff::cli
