// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vampdiff/cli/config.hpp"
#include "vampdiff/eval/evaluate.hpp"
#include "vampdiff/signal/window.hpp"

namespace vampdiff::cli {

struct Recording {
  std::string id;  // file stem
  double fs = 0.0;
  std::vector<double> ppg;
  std::optional<std::vector<double>> co2;
};

// CSV with a header naming a `ppg` column and optionally `co2`; other columns
// are ignored. A first line `# fs=<hz>` overrides fs. IngestError naming the
// file (and line, for malformed rows).
Recording ingest_csv(const std::filesystem::path& path, std::optional<double> fs = std::nullopt);
// Every *.csv directly inside dir, sorted by file name.
std::vector<Recording> ingest_dir(const std::filesystem::path& dir, std::optional<double> fs = std::nullopt);

// `# fs=<hz>` line, header, one row per sample at %.17g.
std::string recording_csv(const Recording& rec);
void write_recording(const std::filesystem::path& path, const Recording& rec);

// Writes train/, val/ and test/ subdirectories with one recording per
// synthetic patient; patients are assigned to splits as a whole.
struct SynthSummary {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};
SynthSummary write_synthetic_dataset(const std::filesystem::path& out, const RunConfig& config);

// DIR/<split> when that directory exists, otherwise DIR itself.
std::filesystem::path split_dir(const std::filesystem::path& dir, const std::string& split);

// Segmented windows (signal units) of every recording.
std::vector<signal::SignalWindow> windows_of(const std::vector<Recording>& recs, const RunConfig& config);
// RR recordings: windows grouped per recording with the capnography rate.
std::vector<eval::RrRecording> rr_recordings_of(const std::vector<Recording>& recs, const RunConfig& config);

// Rows of `index,component,source_id,s0,...`; comment lines start with '#'.
std::string windows_csv(const std::vector<signal::SignalWindow>& windows, const std::vector<std::string>& meta,
                        const std::vector<std::size_t>& components = {});
std::vector<signal::SignalWindow> read_windows_csv(const std::filesystem::path& path, double fs);

}  // namespace vampdiff::cli
