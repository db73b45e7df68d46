// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vampdiff/vamp/layers.hpp"

namespace vampdiff::train {

namespace nc = vampdiff::nc;
using vamp::ParamList;

struct ParamGroup {
  std::string name;
  ParamList params;
  double lr = 1e-3;
  double weight_decay = 0.0;
};

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// AdamW with decoupled weight decay and per-parameter step counts.
class AdamW {
 public:
  AdamW() = default;
  explicit AdamW(std::vector<ParamGroup> groups, AdamWOptions options = {});

  // Updates the groups flagged active; every parameter in an active group
  // must hold a gradient.
  void step(const std::vector<bool>& active);
  void step();

  const std::vector<ParamGroup>& groups() const { return groups_; }
  std::size_t group_index(const std::string& name) const;
  std::size_t step_count(std::size_t group, std::size_t param) const { return state_[group][param].steps; }

 private:
  struct Slot {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t steps = 0;
  };
  std::vector<ParamGroup> groups_;
  std::vector<std::vector<Slot>> state_;
  AdamWOptions options_;
};

// L2 norm over all gradients present in params.
double global_grad_norm(const ParamList& params);
// Rescales gradients so their global norm is at most max_norm; returns the
// norm before clipping.
double clip_global_norm(const ParamList& params, double max_norm);

// Frees every gradient buffer.
void clear_grads(const ParamList& params);

}  // namespace vampdiff::train
