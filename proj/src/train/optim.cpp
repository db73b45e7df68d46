// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/train/optim.hpp"

#include <cmath>

#include "vampdiff/error.hpp"

namespace vampdiff::train {

AdamW::AdamW(std::vector<ParamGroup> groups, AdamWOptions options)
    : groups_(std::move(groups)), options_(options) {
  for (const auto& g : groups_) {
    if (!(g.lr >= 0.0) || !(g.weight_decay >= 0.0)) {
      throw ParameterError("parameter group '" + g.name + "' needs nonnegative lr and weight decay");
    }
    std::vector<Slot> slots(g.params.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      slots[i].m.assign(g.params[i].second.numel(), 0.0);
      slots[i].v.assign(g.params[i].second.numel(), 0.0);
    }
    state_.push_back(std::move(slots));
  }
}

std::size_t AdamW::group_index(const std::string& name) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].name == name) return i;
  }
  throw UsageError("no parameter group named '" + name + "'");
}

void AdamW::step() { step(std::vector<bool>(groups_.size(), true)); }

void AdamW::step(const std::vector<bool>& active) {
  if (active.size() != groups_.size()) throw UsageError("AdamW::step: one flag per parameter group");
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    if (!active[gi]) continue;
    for (const auto& [name, p] : groups_[gi].params) {
      if (!p.has_grad()) throw UsageError("AdamW::step: parameter '" + name + "' has no gradient");
    }
  }
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    if (!active[gi]) continue;
    const auto& g = groups_[gi];
    for (std::size_t pi = 0; pi < g.params.size(); ++pi) {
      auto p = g.params[pi].second;
      auto& s = state_[gi][pi];
      ++s.steps;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(s.steps));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(s.steps));
      auto theta = p.mutable_data();
      const auto grad = p.grad();
      for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] -= g.lr * g.weight_decay * theta[i];
        s.m[i] = b1 * s.m[i] + (1.0 - b1) * grad[i];
        s.v[i] = b2 * s.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double m_hat = s.m[i] / c1;
        const double v_hat = s.v[i] / c2;
        theta[i] -= g.lr * m_hat / (std::sqrt(v_hat) + options_.eps);
      }
    }
  }
}

double global_grad_norm(const ParamList& params) {
  double sq = 0.0;
  for (const auto& [name, p] : params) {
    if (!p.has_grad()) continue;
    for (double g : p.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_global_norm(const ParamList& params, double max_norm) {
  if (!(max_norm > 0.0)) throw ParameterError("clip_global_norm: max_norm must be positive");
  const double norm = global_grad_norm(params);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (const auto& [name, p] : params) {
      if (!p.has_grad()) continue;
      auto t = p;
      for (double& g : t.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

void clear_grads(const ParamList& params) {
  for (const auto& [name, p] : params) {
    auto t = p;
    t.clear_grad();
  }
}

}  // namespace vampdiff::train
