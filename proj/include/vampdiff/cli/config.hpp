// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vampdiff/signal/filter.hpp"
#include "vampdiff/signal/peaks.hpp"
#include "vampdiff/signal/segment.hpp"
#include "vampdiff/train/rr_estimator.hpp"
#include "vampdiff/train/trainer.hpp"
#include "vampdiff/vamp/config.hpp"

namespace vampdiff::cli {

using Json = nlohmann::ordered_json;

enum class Profile { kFull, kDesk };

std::string_view to_string(Profile p);
Profile profile_from_string(std::string_view s);

struct SynthConfig {
  std::size_t patients = 80;
  double duration_s = 60.0;
  double hr_lo = 60.0;
  double hr_hi = 130.0;
  double rr_lo = 8.0;
  double rr_hi = 24.0;
  double amp_lo = 0.6;
  double amp_hi = 1.4;
  double val_fraction = 0.1;
  double test_fraction = 0.15;
};

struct RunConfig {
  Profile profile = Profile::kDesk;
  std::uint64_t seed = 0;

  double fs = 75.0;
  double overlap = 0.5;
  std::size_t quality_min_peaks = 2;
  signal::Band band;
  signal::PeakParams peaks;

  vamp::ModelConfig model;
  train::TrainConfig train;
  train::RrTrainConfig rr;

  std::size_t ddim_steps = 25;
  std::size_t gen_n = 200;
  double anomalous_fraction = 0.25;
  std::size_t sensitivity_windows = 64;

  SynthConfig synth;

  std::string data_dir;
  std::string out_dir;

  static RunConfig defaults(Profile profile);

  signal::SegmentOptions segment_options() const;
  // ConfigError naming the offending key.
  void validate() const;
};

// Every key of the flat configuration, in emission order.
std::vector<std::string> config_keys();

Json to_json(const RunConfig& config);
// Starts from the defaults of the "profile" key (desk when absent), then
// applies every other key. Unknown keys and ill-typed values are ConfigError.
RunConfig config_from_json(const Json& j);

std::string dump_config(const RunConfig& config);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace vampdiff::cli
