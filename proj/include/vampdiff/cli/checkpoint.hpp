// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "vampdiff/cli/config.hpp"
#include "vampdiff/train/rr_estimator.hpp"
#include "vampdiff/vamp/model.hpp"

namespace vampdiff::cli {

// Container layout: 8-byte magic "VAMPDIF1", u64 little-endian manifest
// length, UTF-8 JSON manifest, then every tensor as contiguous little-endian
// float32 in manifest order.
inline constexpr char kCheckpointMagic[8] = {'V', 'A', 'M', 'P', 'D', 'I', 'F', '1'};
inline constexpr int kCheckpointSchema = 1;

struct Checkpoint {
  RunConfig config;
  vamp::VampDiff model;
  std::optional<train::RrEstimator> rr;
};

std::string serialize_checkpoint(const RunConfig& config, const vamp::VampDiff& model,
                                 const train::RrEstimator* rr = nullptr);
// source names the origin in error messages.
Checkpoint parse_checkpoint(const std::string& bytes, const std::string& source = "<memory>");

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config, const vamp::VampDiff& model,
                     const train::RrEstimator* rr = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace vampdiff::cli
