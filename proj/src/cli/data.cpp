// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/cli/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vampdiff/error.hpp"
#include "vampdiff/eval/report.hpp"
#include "vampdiff/rng.hpp"
#include "vampdiff/signal/peaks.hpp"
#include "vampdiff/signal/segment.hpp"
#include "vampdiff/signal/synth.hpp"

namespace vampdiff::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(const std::string& cell) {
  double v = 0.0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Recording ingest_csv(const fs::path& path, std::optional<double> fs_hz) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string() + ": cannot open");
  Recording rec;
  rec.id = path.stem().string();
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::vector<std::string>> header;
  std::size_t ppg_col = 0;
  std::optional<std::size_t> co2_col;
  std::vector<double> co2;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto pos = t.find("fs=");
      if (line_no == 1 && pos != std::string::npos) {
        const auto v = parse_double(trim(t.substr(pos + 3)));
        if (!v || !(*v > 0.0)) throw IngestError(path.string() + ":1: invalid sample rate comment");
        fs_hz = *v;
      }
      continue;
    }
    if (!header) {
      header = split_csv(t);
      auto it = std::find(header->begin(), header->end(), "ppg");
      if (it == header->end()) throw IngestError(path.string() + ": header has no \"ppg\" column");
      ppg_col = static_cast<std::size_t>(it - header->begin());
      auto c = std::find(header->begin(), header->end(), "co2");
      if (c != header->end()) co2_col = static_cast<std::size_t>(c - header->begin());
      continue;
    }
    const auto cells = split_csv(t);
    if (cells.size() != header->size()) {
      throw IngestError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(header->size()) +
                        " cells, got " + std::to_string(cells.size()));
    }
    const auto p = parse_double(cells[ppg_col]);
    if (!p) throw IngestError(path.string() + ":" + std::to_string(line_no) + ": non-numeric ppg cell \"" + cells[ppg_col] + "\"");
    rec.ppg.push_back(*p);
    if (co2_col) {
      const auto c = parse_double(cells[*co2_col]);
      if (!c) throw IngestError(path.string() + ":" + std::to_string(line_no) + ": non-numeric co2 cell \"" + cells[*co2_col] + "\"");
      co2.push_back(*c);
    }
  }
  if (!header) throw IngestError(path.string() + ": header has no \"ppg\" column");
  if (!fs_hz) throw IngestError(path.string() + ": sample rate absent (no config fs and no \"# fs=\" line)");
  if (!(*fs_hz > 0.0)) throw IngestError(path.string() + ": sample rate must be positive");
  rec.fs = *fs_hz;
  if (co2_col) rec.co2 = std::move(co2);
  return rec;
}

std::vector<Recording> ingest_dir(const fs::path& dir, std::optional<double> fs_hz) {
  if (!fs::is_directory(dir)) throw IngestError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Recording> out;
  for (const auto& f : files) out.push_back(ingest_csv(f, fs_hz));
  return out;
}

std::string recording_csv(const Recording& rec) {
  std::ostringstream os;
  os << "# fs=" << eval::format_number(rec.fs) << '\n';
  os << (rec.co2 ? "ppg,co2\n" : "ppg\n");
  for (std::size_t i = 0; i < rec.ppg.size(); ++i) {
    os << eval::format_number(rec.ppg[i]);
    if (rec.co2) os << ',' << eval::format_number((*rec.co2)[i]);
    os << '\n';
  }
  return os.str();
}

void write_recording(const fs::path& path, const Recording& rec) { eval::write_text(path, recording_csv(rec)); }

SynthSummary write_synthetic_dataset(const fs::path& out, const RunConfig& config) {
  config.validate();
  const auto& s = config.synth;
  std::vector<std::size_t> order(s.patients);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng(Rng::derive(config.seed, 20).next_u64());
  split_rng.shuffle(order);
  const auto n = static_cast<double>(s.patients);
  const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s.test_fraction * n)));
  const auto n_val = static_cast<std::size_t>(std::llround(s.val_fraction * n));
  SynthSummary summary;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t p = order[rank];
    Rng prng(Rng::derive(config.seed, 1000 + p).next_u64());
    const double hr = prng.uniform(s.hr_lo, s.hr_hi);
    const double rr = prng.uniform(s.rr_lo, s.rr_hi);
    const double amp = prng.uniform(s.amp_lo, s.amp_hi);
    Recording rec;
    char id[32];
    std::snprintf(id, sizeof id, "patient%03zu", p);
    rec.id = id;
    rec.fs = config.fs;
    rec.ppg = signal::synth_ppg(config.fs, s.duration_s, hr, rr, amp, prng.next_u64());
    rec.co2 = signal::synth_co2(config.fs, s.duration_s, rr, prng.next_u64());
    std::string split = "train";
    if (rank < n_test) {
      split = "test";
      ++summary.test;
    } else if (rank < n_test + n_val) {
      split = "val";
      ++summary.val;
    } else {
      ++summary.train;
    }
    write_recording(out / split / (rec.id + ".csv"), rec);
  }
  return summary;
}

fs::path split_dir(const fs::path& dir, const std::string& split) {
  const auto sub = dir / split;
  return fs::is_directory(sub) ? sub : dir;
}

std::vector<signal::SignalWindow> windows_of(const std::vector<Recording>& recs, const RunConfig& config) {
  std::vector<signal::SignalWindow> out;
  const auto opts = config.segment_options();
  for (const auto& r : recs) {
    if (r.ppg.size() < opts.window_len) continue;
    auto ws = signal::segment(r.ppg, r.fs, opts, r.id);
    out.insert(out.end(), std::make_move_iterator(ws.begin()), std::make_move_iterator(ws.end()));
  }
  return out;
}

std::vector<eval::RrRecording> rr_recordings_of(const std::vector<Recording>& recs, const RunConfig& config) {
  std::vector<eval::RrRecording> out;
  const auto opts = config.segment_options();
  for (const auto& r : recs) {
    eval::RrRecording rr;
    rr.id = r.id;
    if (r.ppg.size() >= opts.window_len) rr.windows = signal::segment(r.ppg, r.fs, opts, r.id);
    if (r.co2 && static_cast<double>(r.co2->size()) >= 2.0 * r.fs) rr.rr_etco2 = signal::rr_from_co2(*r.co2, r.fs);
    out.push_back(std::move(rr));
  }
  return out;
}

std::string windows_csv(const std::vector<signal::SignalWindow>& windows, const std::vector<std::string>& meta,
                        const std::vector<std::size_t>& components) {
  std::ostringstream os;
  for (const auto& m : meta) os << "# " << m << '\n';
  os << "index,component,source_id";
  const std::size_t len = windows.empty() ? 0 : windows.front().length();
  for (std::size_t i = 0; i < len; ++i) os << ",s" << i;
  os << '\n';
  for (std::size_t w = 0; w < windows.size(); ++w) {
    os << w << ',';
    if (!components.empty()) os << components[w];
    os << ',' << windows[w].source_id;
    for (double v : eval::raw_samples(windows[w])) os << ',' << eval::format_number(v);
    os << '\n';
  }
  return os.str();
}

std::vector<signal::SignalWindow> read_windows_csv(const fs::path& path, double fs_hz) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string() + ": cannot open");
  std::vector<signal::SignalWindow> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto cells = split_csv(t);
    if (cells.size() < 4) throw IngestError(path.string() + ":" + std::to_string(line_no) + ": window row too short");
    signal::SignalWindow w;
    w.fs = fs_hz;
    w.source_id = cells[2];
    for (std::size_t i = 3; i < cells.size(); ++i) {
      const auto v = parse_double(cells[i]);
      if (!v) throw IngestError(path.string() + ":" + std::to_string(line_no) + ": non-numeric sample \"" + cells[i] + "\"");
      w.samples.push_back(*v);
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace vampdiff::cli
