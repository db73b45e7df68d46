// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"
#include "vampdiff/signal/stats.hpp"

namespace vampdiff::vamp {

VampDiff::VampDiff(const ModelConfig& cfg, std::uint64_t seed) : config(cfg) {
  config.validate();
  Rng enc_rng = Rng::derive(seed, 1);
  Rng unet_rng = Rng::derive(seed, 2);
  encoder = Encoder(config, enc_rng);
  unet = UNet(config, unet_rng);
  pseudo = PseudoInputs::zeros(config.num_pseudo, config.window_len);
  schedule = DiffusionSchedule::linear(config.diffusion_steps, config.beta_start_ref, config.beta_end_ref);
}

ParamList VampDiff::encoder_params() const { return encoder.params(); }
ParamList VampDiff::decoder_params() const { return unet.params(); }
ParamList VampDiff::pseudo_params() const { return {{"pseudo.u", pseudo.u}}; }

ParamList VampDiff::all_params() const {
  ParamList out = encoder_params();
  append(out, decoder_params());
  append(out, pseudo_params());
  return out;
}

nc::Tensor VampDiff::condition(const nc::Tensor& z) const {
  if (config.conditioning == Conditioning::kPooled) return pool(z, config.pooled_len);
  return z;
}

nc::Tensor VampDiff::predict_x0(const nc::Tensor& x_t, const std::vector<std::size_t>& t, const nc::Tensor& z) const {
  return unet.predict_x0(x_t, t, condition(z));
}

X0Predictor VampDiff::predictor() const {
  return [this](const nc::Tensor& x_t, const std::vector<std::size_t>& t, const nc::Tensor& z) {
    return predict_x0(x_t, t, z);
  };
}

nc::Tensor stack_windows(const std::vector<signal::SignalWindow>& windows) {
  if (windows.empty()) throw DimensionError("stack_windows: no windows");
  const std::size_t len = windows.front().length();
  std::vector<double> data;
  data.reserve(windows.size() * len);
  for (const auto& w : windows) {
    if (w.length() != len) throw DimensionError("stack_windows: windows differ in length");
    data.insert(data.end(), w.samples.begin(), w.samples.end());
  }
  return nc::Tensor::from_vector({windows.size(), 1, len}, std::move(data));
}

nc::Tensor standard_normal(Rng& rng, nc::Shape shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return nc::Tensor::from_vector(std::move(shape), rng.normals(n));
}

nc::Tensor encode_means(const VampDiff& model, const std::vector<signal::SignalWindow>& windows) {
  nc::NoGradGuard no_grad;
  return model.encoder.encode(stack_windows(windows)).mu;
}

std::vector<std::vector<double>> decode(const VampDiff& model, const nc::Tensor& z,
                                        const std::vector<std::uint64_t>& x_T_seeds, std::size_t n_steps) {
  const std::size_t batch = z.dim(0);
  if (x_T_seeds.size() != batch) throw DimensionError("decode: need one x_T seed per latent");
  const std::size_t len = model.config.window_len;
  std::vector<double> noise;
  noise.reserve(batch * len);
  for (auto s : x_T_seeds) {
    Rng rng(s);
    auto v = rng.normals(len);
    noise.insert(noise.end(), v.begin(), v.end());
  }
  auto x_T = nc::Tensor::from_vector({batch, 1, len}, std::move(noise));
  auto x0 = ddim_sample(z, x_T, model.predictor(), model.schedule, n_steps);
  std::vector<std::vector<double>> out(batch);
  const auto data = x0.data();
  for (std::size_t b = 0; b < batch; ++b) out[b].assign(data.begin() + b * len, data.begin() + (b + 1) * len);
  return out;
}

namespace {

signal::SignalWindow as_normalized(const VampDiff& model, const signal::SignalWindow& w) {
  if (w.length() != model.config.window_len) {
    throw DimensionError("window length " + std::to_string(w.length()) + " does not match model length " +
                         std::to_string(model.config.window_len));
  }
  return w.normalized ? w : signal::normalize(w, model.norm);
}

signal::SignalWindow restore(const VampDiff& model, const signal::SignalWindow& like, std::vector<double> samples) {
  signal::SignalWindow w;
  w.samples = std::move(samples);
  w.fs = like.fs;
  w.normalized = true;
  w.stats = model.norm;
  w.source_id = like.source_id;
  w.start_index = like.start_index;
  return signal::denormalize(w, model.norm);
}

}  // namespace

std::vector<signal::SignalWindow> reconstruct_many(const VampDiff& model, const std::vector<signal::SignalWindow>& x0,
                                                   std::size_t n_steps, const std::vector<std::uint64_t>& x_T_seeds) {
  std::vector<signal::SignalWindow> norm;
  norm.reserve(x0.size());
  for (const auto& w : x0) norm.push_back(as_normalized(model, w));
  auto z = encode_means(model, norm);
  auto samples = decode(model, z, x_T_seeds, n_steps);
  std::vector<signal::SignalWindow> out;
  out.reserve(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out.push_back(restore(model, x0[i], std::move(samples[i])));
  return out;
}

signal::SignalWindow reconstruct(const VampDiff& model, const signal::SignalWindow& x0, std::size_t n_steps,
                                 std::uint64_t x_T_seed) {
  return reconstruct_many(model, {x0}, n_steps, {x_T_seed}).front();
}

GeneratedSample generate(const VampDiff& model, std::size_t n_steps, std::uint64_t seed, double fs) {
  nc::NoGradGuard no_grad;
  Rng rng(seed);
  const std::size_t k = rng.index(model.pseudo.count());
  const std::size_t len = model.config.window_len;
  auto u_k = nc::reshape(nc::slice(model.pseudo.u, 0, k, k + 1), {1, 1, len});
  auto post = model.encoder.encode(u_k);
  auto eps = standard_normal(rng, post.mu.shape());
  auto z = reparameterize(post, eps);
  auto x_T = standard_normal(rng, {1, 1, len});
  auto x0 = ddim_sample(z, x_T, model.predictor(), model.schedule, n_steps);

  signal::SignalWindow like;
  like.fs = fs;
  like.source_id = "generated";
  GeneratedSample out;
  out.window = restore(model, like, x0.to_vector());
  out.component = k;
  return out;
}

std::vector<GeneratedSample> generate_many(const VampDiff& model, std::size_t count, std::size_t n_steps,
                                           std::uint64_t seed, double fs) {
  std::vector<GeneratedSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng child = Rng::derive(seed, i);
    out.push_back(generate(model, n_steps, child.next_u64(), fs));
    out.back().window.start_index = i;
  }
  return out;
}

namespace {

// Quantile bin from the count of strictly smaller values, so ties share a bin.
std::vector<std::size_t> quantile_bins(const std::vector<double>& values, std::size_t nbins) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = values.size();
  std::vector<std::size_t> bins(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto rank = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    bins[i] = rank * nbins / n;
  }
  return bins;
}

}  // namespace

void stratified_init(PseudoInputs& pseudo, const std::vector<signal::SignalWindow>& windows, std::uint64_t seed,
                     const signal::Band& band, const signal::PeakParams& peaks) {
  const std::size_t k = pseudo.count();
  const std::size_t len = pseudo.length();
  std::vector<std::size_t> eligible;
  std::vector<double> hr;
  std::vector<double> amp;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.length() != len) {
      throw DimensionError("stratified_init: window " + std::to_string(i) + " has length " + std::to_string(w.length()));
    }
    auto m = signal::measure_hr(w.samples, w.fs, band, peaks);
    if (!m.hr) continue;
    eligible.push_back(i);
    hr.push_back(m.hr->hr_bpm);
    amp.push_back(signal::peak_to_peak(w.samples));
  }
  if (eligible.size() < k) {
    throw InitError("stratified_init needs " + std::to_string(k) + " windows with a heart rate, found " +
                    std::to_string(eligible.size()));
  }
  const auto hr_bins_n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k))));
  const std::size_t amp_bins_n = (k + hr_bins_n - 1) / hr_bins_n;
  const auto hb = quantile_bins(hr, hr_bins_n);
  const auto ab = quantile_bins(amp, amp_bins_n);

  std::vector<std::vector<std::size_t>> cells(hr_bins_n * amp_bins_n);
  for (std::size_t j = 0; j < eligible.size(); ++j) cells[hb[j] * amp_bins_n + ab[j]].push_back(eligible[j]);
  Rng rng(seed);
  for (auto& c : cells) rng.shuffle(c);

  std::vector<std::size_t> chosen;
  for (std::size_t round = 0; chosen.size() < k; ++round) {
    for (const auto& c : cells) {
      if (round < c.size() && chosen.size() < k) chosen.push_back(c[round]);
    }
  }
  auto u = pseudo.u.mutable_data();
  for (std::size_t r = 0; r < k; ++r) {
    const auto& s = windows[chosen[r]].samples;
    std::copy(s.begin(), s.end(), u.begin() + r * len);
  }
}

}  // namespace vampdiff::vamp
