// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/train/rr_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"
#include "vampdiff/signal/stats.hpp"
#include "vampdiff/train/optim.hpp"
#include "vampdiff/vamp/model.hpp"

namespace vampdiff::train {

namespace {

std::size_t scaled(std::size_t width, double factor) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(static_cast<double>(width) * factor)));
}

nc::Tensor run_block(const RrEstimator::Block& b, const nc::Tensor& x) {
  auto h = b.conv1(nc::silu(b.norm1(x)));
  h = b.conv2(nc::silu(b.norm2(h)));
  auto skip = b.has_projection ? b.projection(x) : x;
  return nc::add(skip, h);
}

}  // namespace

RrEstimator::RrEstimator(double wf, std::uint64_t seed) : width_factor(wf) {
  if (!(wf > 0.0)) throw ConfigError("rr estimator width factor must be positive");
  Rng rng(seed);
  const std::size_t c0 = scaled(kStageWidths[0], wf);
  stem = vamp::Conv1d::same(rng, 1, c0, 11, 2);
  std::size_t c_in = c0;
  for (std::size_t s = 0; s < 4; ++s) {
    const std::size_t c = scaled(kStageWidths[s], wf);
    const std::size_t stride = s == 0 ? 1 : 2;
    Block b;
    b.norm1 = vamp::GroupNorm::create(c_in);
    b.conv1 = vamp::Conv1d::same(rng, c_in, c, 5, stride, kStageDilations[s]);
    b.norm2 = vamp::GroupNorm::create(c);
    b.conv2 = vamp::Conv1d::same(rng, c, c, 5, 1, kStageDilations[s]);
    b.has_projection = c != c_in || stride != 1;
    if (b.has_projection) b.projection = vamp::Conv1d::create(rng, c_in, c, 1, {stride, 1, 0});
    blocks.push_back(std::move(b));
    c_in = c;
  }
  head1 = vamp::Linear::create(rng, c_in, c_in);
  head2 = vamp::Linear::create(rng, c_in, 1);
}

nc::Tensor RrEstimator::forward(const nc::Tensor& x) const {
  if (x.rank() != 3 || x.dim(1) != 1) throw DimensionError("rr estimator expects [B,1,L], got " + nc::shape_str(x.shape()));
  auto h = stem(x);
  for (const auto& b : blocks) h = run_block(b, h);
  auto pooled = nc::mean(nc::silu(h), {2});
  auto out = head2(nc::silu(head1(pooled)));
  return nc::reshape(out, {x.dim(0)});
}

std::vector<double> RrEstimator::predict(const std::vector<signal::SignalWindow>& windows) const {
  nc::NoGradGuard guard;
  auto y = forward(vamp::stack_windows(windows));
  std::vector<double> out(y.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = label_mean + label_std * y.at(i);
  return out;
}

ParamList RrEstimator::params() const {
  ParamList out;
  stem.collect(out, "rr.stem");
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const auto p = "rr.stage" + std::to_string(s);
    blocks[s].norm1.collect(out, p + ".norm1");
    blocks[s].conv1.collect(out, p + ".conv1");
    blocks[s].norm2.collect(out, p + ".norm2");
    blocks[s].conv2.collect(out, p + ".conv2");
    if (blocks[s].has_projection) blocks[s].projection.collect(out, p + ".projection");
  }
  head1.collect(out, "rr.head1");
  head2.collect(out, "rr.head2");
  return out;
}

void RrTrainConfig::validate() const {
  if (!(width_factor > 0.0)) throw ConfigError("rr width_factor must be positive");
  if (batch_size == 0) throw ConfigError("rr batch_size must be >= 1");
  if (!(lr >= 0.0) || !(weight_decay >= 0.0) || !(clip_norm > 0.0)) throw ConfigError("invalid rr optimizer settings");
}

RrEstimator train_rr_estimator(const std::vector<signal::SignalWindow>& windows, const std::vector<double>& rr_bpm,
                               const RrTrainConfig& config) {
  config.validate();
  if (windows.empty()) throw UsageError("train_rr_estimator: empty dataset");
  if (windows.size() != rr_bpm.size()) throw DimensionError("train_rr_estimator: one label per window");
  RrEstimator model(config.width_factor, Rng::derive(config.seed, 1).next_u64());
  model.label_mean = signal::mean(rr_bpm);
  model.label_std = std::max(1e-6, signal::pstdev(rr_bpm));

  AdamW opt({{"rr", model.params(), config.lr, config.weight_decay}});
  const auto params = model.params();
  Rng rng = Rng::derive(config.seed, 2);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<signal::SignalWindow> chunk;
      std::vector<double> target;
      for (std::size_t i = start; i < end; ++i) {
        chunk.push_back(windows[order[i]]);
        target.push_back((rr_bpm[order[i]] - model.label_mean) / model.label_std);
      }
      const std::size_t n = target.size();
      auto y = nc::Tensor::from_vector({n}, std::move(target));
      auto loss = nc::mean(nc::square(nc::sub(model.forward(vamp::stack_windows(chunk)), y)));
      if (!std::isfinite(loss.item())) throw NumericError("rr estimator loss is not finite");
      nc::backward(loss);
      clip_global_norm(params, config.clip_norm);
      opt.step();
      clear_grads(params);
    }
  }
  return model;
}

}  // namespace vampdiff::train
