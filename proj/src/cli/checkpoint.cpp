// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/cli/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "vampdiff/error.hpp"
#include "vampdiff/eval/report.hpp"

namespace vampdiff::cli {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

vamp::ParamList all_tensors(const vamp::VampDiff& model, const train::RrEstimator* rr) {
  auto params = model.all_params();
  if (rr) vamp::append(params, rr->params());
  return params;
}

Json shape_json(const nc::Tensor& t) {
  Json s = Json::array();
  for (auto d : t.shape()) s.push_back(d);
  return s;
}

}  // namespace

std::string serialize_checkpoint(const RunConfig& config, const vamp::VampDiff& model, const train::RrEstimator* rr) {
  const auto tensors = all_tensors(model, rr);
  Json manifest;
  manifest["schema_version"] = kCheckpointSchema;
  manifest["profile"] = std::string(to_string(config.profile));
  manifest["config"] = to_json(config);
  manifest["norm"] = {{"mu_train", model.norm.mu_train}, {"sigma_train", model.norm.sigma_train}};
  manifest["schedule"] = {{"kind", "linear"},
                          {"steps", model.config.diffusion_steps},
                          {"beta_start_ref", model.config.beta_start_ref},
                          {"beta_end_ref", model.config.beta_end_ref}};
  if (rr) {
    manifest["rr_estimator"] = {
        {"width_factor", rr->width_factor}, {"label_mean", rr->label_mean}, {"label_std", rr->label_std}};
  }
  Json dir = Json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    dir.push_back({{"name", name}, {"shape", shape_json(t)}, {"dtype", "float32"}, {"offset", offset}});
    offset += 4 * t.numel();
  }
  manifest["tensors"] = dir;
  manifest["payload_bytes"] = offset;
  const std::string text = manifest.dump();

  std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
  append_u64(out, text.size());
  out += text;
  out.reserve(out.size() + offset);
  for (const auto& [name, t] : tensors) {
    for (double v : t.data()) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes, const std::string& source) {
  auto fail = [&](const std::string& msg) -> IoError { return IoError(source + ": " + msg); };
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw fail("not a checkpoint (missing VAMPDIF1 magic)");
  }
  const std::uint64_t len = read_u64(bytes, 8);
  if (len > bytes.size() - 16) throw fail("truncated manifest");
  Json manifest;
  try {
    manifest = Json::parse(bytes.substr(16, len));
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("manifest is not valid JSON: ") + e.what());
  }
  const std::size_t payload_at = 16 + len;
  try {
    if (manifest.at("schema_version").get<int>() != kCheckpointSchema) {
      throw fail("unsupported schema version " + manifest.at("schema_version").dump());
    }
    Checkpoint ck;
    try {
      ck.config = config_from_json(manifest.at("config"));
    } catch (const ConfigError& e) {
      throw fail(std::string("embedded config: ") + e.what());
    }
    ck.model = vamp::VampDiff(ck.config.model, 0);
    ck.model.norm = {manifest.at("norm").at("mu_train").get<double>(), manifest.at("norm").at("sigma_train").get<double>()};
    if (manifest.contains("rr_estimator")) {
      const auto& r = manifest["rr_estimator"];
      train::RrEstimator est(r.at("width_factor").get<double>(), 0);
      est.label_mean = r.at("label_mean").get<double>();
      est.label_std = r.at("label_std").get<double>();
      ck.rr = std::move(est);
    }
    const std::uint64_t payload = manifest.at("payload_bytes").get<std::uint64_t>();
    if (bytes.size() - payload_at != payload) {
      throw fail("payload holds " + std::to_string(bytes.size() - payload_at) + " bytes, manifest says " +
                 std::to_string(payload));
    }
    std::map<std::string, nc::Tensor> slots;
    for (const auto& [name, t] : all_tensors(ck.model, ck.rr ? &*ck.rr : nullptr)) slots.emplace(name, t);
    const auto& dir = manifest.at("tensors");
    if (dir.size() != slots.size()) {
      throw fail("manifest lists " + std::to_string(dir.size()) + " tensors, model expects " +
                 std::to_string(slots.size()));
    }
    for (const auto& entry : dir) {
      const auto name = entry.at("name").get<std::string>();
      auto it = slots.find(name);
      if (it == slots.end()) throw fail("unexpected tensor " + name);
      if (entry.at("dtype").get<std::string>() != "float32") throw fail("tensor " + name + " is not float32");
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      if (shape != it->second.shape()) {
        throw fail("tensor " + name + " has shape " + nc::shape_str(shape) + ", model expects " +
                   nc::shape_str(it->second.shape()));
      }
      const std::uint64_t off = entry.at("offset").get<std::uint64_t>();
      const std::size_t n = it->second.numel();
      if (off + 4 * n > payload) throw fail("tensor " + name + " extends past the payload");
      auto data = it->second.mutable_data();
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        const std::size_t at = payload_at + off + 4 * i;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + b])) << (8 * b);
        data[i] = static_cast<double>(std::bit_cast<float>(bits));
      }
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed manifest: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config, const vamp::VampDiff& model,
                     const train::RrEstimator* rr) {
  eval::write_text(path, serialize_checkpoint(config, model, rr));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_file(path), path.string()); }

}  // namespace vampdiff::cli
