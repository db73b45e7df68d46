// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vampdiff/losses/losses.hpp"
#include "vampdiff/rng.hpp"
#include "vampdiff/signal/window.hpp"
#include "vampdiff/train/optim.hpp"
#include "vampdiff/vamp/model.hpp"

namespace vampdiff::train {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double lr_decoder = 2e-5;
  double lr_encoder = 5e-6;
  double lr_pseudo = 2e-3;
  double weight_decay = 1e-4;
  double clip_norm = 1.0;
  std::size_t mc_samples = 1;
  // KL weight used while the encoder is frozen; 0 skips the KL term there.
  double freeze_beta = 0.0;
  std::size_t checkpoint_every = 25;
  std::uint64_t seed = 0;
  losses::LossWeights weights;
  losses::BetaSchedule beta;

  void validate() const;
};

struct StepReport {
  losses::LossBreakdown losses;
  double grad_norm = 0.0;
  bool encoder_frozen = false;
  bool kl_active = false;
};

// Parameter groups are "decoder", "encoder", "pseudo" in that order.
AdamW make_optimizer(const vamp::VampDiff& model, const TrainConfig& config);

class Trainer {
 public:
  Trainer(vamp::VampDiff& model, const TrainConfig& config);

  // One optimizer step on a normalized batch [B, 1, L]. Draws, in order,
  // eps_z, one timestep per element, eps, then any extra KL samples.
  StepReport step(const nc::Tensor& batch, int epoch, Rng& rng);

  const AdamW& optimizer() const { return opt_; }
  const TrainConfig& config() const { return config_; }

 private:
  vamp::VampDiff& model_;
  TrainConfig config_;
  AdamW opt_;
};

struct EpochLog {
  int epoch = 0;
  losses::LossBreakdown mean;
  double grad_norm = 0.0;
  std::size_t steps = 0;
};

std::string log_header();
std::string log_row(const EpochLog& log);

struct FitHooks {
  std::function<void(const EpochLog&)> on_epoch;
  // Called every checkpoint_every epochs and after the last epoch.
  std::function<void(int, const vamp::VampDiff&)> on_checkpoint;
};

// Trains on normalized windows. Pseudo-inputs are stratified-initialized
// before epoch 1; with zero epochs the model is left as constructed.
void fit(vamp::VampDiff& model, const std::vector<signal::SignalWindow>& train, const TrainConfig& config,
         const FitHooks& hooks = {});

}  // namespace vampdiff::train
