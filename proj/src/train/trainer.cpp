// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::train {

namespace {

void set_requires_grad(const ParamList& params, bool flag) {
  for (const auto& [name, p] : params) {
    auto t = p;
    t.set_requires_grad(flag);
  }
}

std::string describe(const losses::LossBreakdown& b) {
  std::ostringstream os;
  os.precision(6);
  os << "total=" << b.total << " diff=" << b.diff << " kl=" << b.kl << " beta=" << b.beta << " recon=" << b.recon
     << " spec=" << b.spec << " deriv=" << b.deriv << " amp=" << b.amp << " ptp=" << b.ptp;
  return os.str();
}

// Restores encoder trainability however the step exits.
struct EncoderGradScope {
  const ParamList& params;
  ~EncoderGradScope() { set_requires_grad(params, true); }
};

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lr_decoder >= 0.0 && lr_encoder >= 0.0 && lr_pseudo >= 0.0)) throw ConfigError("learning rates must be >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
  if (mc_samples == 0) throw ConfigError("mc_samples must be >= 1");
  if (!(freeze_beta >= 0.0)) throw ConfigError("freeze_beta must be >= 0");
  if (checkpoint_every == 0) throw ConfigError("checkpoint_every must be >= 1");
  weights.validate();
  beta.validate();
  if (epochs > 0 && static_cast<std::size_t>(beta.freeze_epochs) >= epochs) {
    throw ConfigError("freeze_epochs must be smaller than epochs");
  }
}

AdamW make_optimizer(const vamp::VampDiff& model, const TrainConfig& config) {
  std::vector<ParamGroup> groups{
      {"decoder", model.decoder_params(), config.lr_decoder, config.weight_decay},
      {"encoder", model.encoder_params(), config.lr_encoder, config.weight_decay},
      {"pseudo", model.pseudo_params(), config.lr_pseudo, config.weight_decay},
  };
  return AdamW(std::move(groups));
}

Trainer::Trainer(vamp::VampDiff& model, const TrainConfig& config)
    : model_(model), config_(config), opt_(make_optimizer(model, config)) {
  config_.weights.validate();
  config_.beta.validate();
}

StepReport Trainer::step(const nc::Tensor& batch, int epoch, Rng& rng) {
  const auto& cfg = model_.config;
  if (batch.rank() != 3 || batch.dim(1) != 1 || batch.dim(2) != cfg.window_len) {
    throw DimensionError("train batch must be [B,1," + std::to_string(cfg.window_len) + "], got " +
                         nc::shape_str(batch.shape()));
  }
  StepReport report;
  report.encoder_frozen = epoch <= config_.beta.freeze_epochs;
  const double beta = report.encoder_frozen ? config_.freeze_beta : losses::beta_at(epoch, config_.beta);
  report.kl_active = beta > 0.0;

  const auto encoder_params = model_.encoder_params();
  const auto all_params = model_.all_params();
  clear_grads(all_params);
  EncoderGradScope scope{encoder_params};
  if (report.encoder_frozen) set_requires_grad(encoder_params, false);

  const std::size_t b = batch.dim(0);
  auto post = model_.encoder.encode(batch);
  auto z = vamp::reparameterize(post, vamp::standard_normal(rng, post.mu.shape()));
  std::vector<std::size_t> t(b);
  for (auto& ti : t) ti = 1 + rng.index(model_.schedule.steps());
  auto eps = vamp::standard_normal(rng, batch.shape());

  nc::Tensor kl;
  if (report.kl_active) {
    vamp::KlOptions opt{cfg.pooled_len, config_.mc_samples, cfg.pooled_variance, cfg.prior};
    kl = vamp::kl_pooled(post, z, model_.pseudo, model_.encoder, opt, &rng);
  }
  auto x_t = vamp::forward_diffuse(batch, t, eps, model_.schedule);
  auto xhat = model_.predict_x0(x_t, t, z);
  auto loss = losses::total_loss(batch, xhat, kl, beta, config_.weights);
  report.losses = loss.breakdown;
  if (!std::isfinite(loss.breakdown.total)) {
    throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ": " + describe(loss.breakdown));
  }
  nc::backward(loss.total);

  if (report.encoder_frozen) {
    for (const auto& [name, p] : encoder_params) {
      if (!p.has_grad()) continue;
      for (double g : p.grad()) {
        if (g != 0.0) throw Error("train", "encoder parameter '" + name + "' received a gradient while frozen");
      }
    }
  }
  const bool pseudo_active = report.kl_active && cfg.prior == vamp::PriorKind::kVamp;
  const std::vector<bool> active{true, !report.encoder_frozen, pseudo_active};
  ParamList stepped;
  for (std::size_t g = 0; g < active.size(); ++g) {
    if (active[g]) vamp::append(stepped, opt_.groups()[g].params);
  }
  report.grad_norm = clip_global_norm(stepped, config_.clip_norm);
  opt_.step(active);
  clear_grads(all_params);
  return report;
}

std::string log_header() { return "epoch,steps,total,diff,kl,beta,recon,spec,deriv,amp,ptp,grad_norm"; }

std::string log_row(const EpochLog& l) {
  const auto& m = l.mean;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%d,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", l.epoch, l.steps, m.total,
                m.diff, m.kl, m.beta, m.recon, m.spec, m.deriv, m.amp, m.ptp, l.grad_norm);
  return buf;
}

void fit(vamp::VampDiff& model, const std::vector<signal::SignalWindow>& train, const TrainConfig& config,
         const FitHooks& hooks) {
  config.validate();
  if (config.epochs == 0) {
    if (hooks.on_checkpoint) hooks.on_checkpoint(0, model);
    return;
  }
  if (train.empty()) throw UsageError("fit: empty training set");
  for (const auto& w : train) {
    if (!w.normalized) throw UsageError("fit: training windows must be normalized");
  }
  vamp::stratified_init(model.pseudo, train, Rng::derive(config.seed, 10).next_u64());
  Trainer trainer(model, config);
  Rng shuffle_rng = Rng::derive(config.seed, 11);
  Rng step_rng = Rng::derive(config.seed, 12);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t e = 1; e <= config.epochs; ++e) {
    const int epoch = static_cast<int>(e);
    shuffle_rng.shuffle(order);
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<signal::SignalWindow> chunk;
      for (std::size_t i = start; i < end; ++i) chunk.push_back(train[order[i]]);
      const auto r = trainer.step(vamp::stack_windows(chunk), epoch, step_rng);
      auto& m = log.mean;
      m.total += r.losses.total;
      m.diff += r.losses.diff;
      m.kl += r.losses.kl;
      m.beta = r.losses.beta;
      m.recon += r.losses.recon;
      m.spec += r.losses.spec;
      m.deriv += r.losses.deriv;
      m.amp += r.losses.amp;
      m.ptp += r.losses.ptp;
      log.grad_norm += r.grad_norm;
      ++log.steps;
    }
    const double n = static_cast<double>(log.steps);
    for (double* v : {&log.mean.total, &log.mean.diff, &log.mean.kl, &log.mean.recon, &log.mean.spec, &log.mean.deriv,
                      &log.mean.amp, &log.mean.ptp, &log.grad_norm}) {
      *v /= n;
    }
    if (hooks.on_epoch) hooks.on_epoch(log);
    if (hooks.on_checkpoint && (e % config.checkpoint_every == 0 || e == config.epochs)) hooks.on_checkpoint(epoch, model);
  }
}

}  // namespace vampdiff::train
