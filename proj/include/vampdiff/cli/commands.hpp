// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vampdiff/cli/config.hpp"

namespace vampdiff::cli {

using Path = std::filesystem::path;
// Progress lines for the user; may be empty.
using Logger = std::function<void(const std::string&)>;

struct TrainArgs {
  RunConfig config;
  Path data;
  Path out;                // checkpoint
  std::optional<Path> log; // defaults to <out>.log.csv
  bool rr_estimator = false;
};
struct TrainResult {
  std::size_t windows = 0;
  std::size_t rr_windows = 0;
  Path log;
};
TrainResult run_train(const TrainArgs& args, const Logger& logger = {});

struct GenerateArgs {
  Path ckpt;
  std::size_t num = 1;
  std::uint64_t seed = 0;
  Path out;
};
void run_generate(const GenerateArgs& args, const Logger& logger = {});

struct ReconstructArgs {
  Path ckpt;
  Path data;
  Path out;
  std::optional<std::uint64_t> seed;
};
void run_reconstruct(const ReconstructArgs& args, const Logger& logger = {});

struct EvaluateArgs {
  Path ckpt;
  Path data;
  Path report;
  std::optional<std::size_t> gen_n;
  std::optional<std::uint64_t> seed;
  // Score these windows instead of sampling the model.
  std::optional<Path> generated;
};
// Files written into the report directory.
std::vector<std::string> run_evaluate(const EvaluateArgs& args, const Logger& logger = {});

struct CorruptArgs {
  RunConfig config;
  Path data;
  Path spec;  // JSON: {"anomalous_fraction": f, "corruptions": [{"kind": ..., ...}]}
  std::uint64_t seed = 0;
  Path out;
};
void run_corrupt(const CorruptArgs& args, const Logger& logger = {});

struct InterpolateArgs {
  Path ckpt;
  std::string lo;  // FILE[:START]
  std::string hi;
  std::vector<double> alphas;
  std::optional<std::uint64_t> seed;
  Path out;
};
void run_interpolate(const InterpolateArgs& args, const Logger& logger = {});

struct SynthArgs {
  RunConfig config;
  Path out;
};
void run_synth(const SynthArgs& args, const Logger& logger = {});

// "0,0.25,1" -> {0, 0.25, 1}; ConfigError on malformed lists.
std::vector<double> parse_alphas(const std::string& text);

}  // namespace vampdiff::cli
