// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/losses/losses.hpp"

#include <cmath>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::losses {

namespace {

constexpr double kMagnitudeDelta = 1e-12;

nc::Tensor rows(const nc::Tensor& x) {
  if (x.rank() == 2) return x;
  if (x.rank() == 3 && x.dim(1) == 1) return nc::reshape(x, {x.dim(0), x.dim(2)});
  throw DimensionError("loss inputs must be [B,L] or [B,1,L], got " + nc::shape_str(x.shape()));
}

void check_pair(const nc::Tensor& a, const nc::Tensor& b, const char* name) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(name) + ": " + nc::shape_str(a.shape()) + " vs " + nc::shape_str(b.shape()));
  }
}

nc::Tensor magnitude(const nc::Spectrum& s) {
  auto power = nc::add(nc::square(s.real), nc::square(s.imag));
  return nc::sqrt(nc::add_scalar(power, kMagnitudeDelta * kMagnitudeDelta));
}

nc::Tensor first_difference(const nc::Tensor& x) {
  const std::size_t len = x.dim(1);
  return nc::sub(nc::slice(x, 1, 1, len), nc::slice(x, 1, 0, len - 1));
}

nc::Tensor range(const nc::Tensor& x) { return nc::sub(nc::max(x, {1}), nc::min(x, {1})); }

}  // namespace

void LossWeights::validate() const {
  for (double v : {diff, recon, spec, deriv, amp, ptp}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("loss weights must be finite and nonnegative");
  }
}

void BetaSchedule::validate() const {
  if (freeze_epochs < 0 || !(freeze_epochs < floor_until && floor_until < ramp_until)) {
    throw ConfigError("beta schedule needs 0 <= freeze_epochs < floor_until < ramp_until");
  }
  if (!(floor_value >= 0.0) || !(ramp_target >= floor_value)) {
    throw ConfigError("beta schedule needs 0 <= floor_value <= ramp_target");
  }
}

double beta_at(int epoch, const BetaSchedule& s) {
  if (epoch < 1) throw RangeError("beta_at: epochs start at 1, got " + std::to_string(epoch));
  if (epoch <= s.freeze_epochs) return 0.0;
  if (epoch <= s.floor_until) return s.floor_value;
  if (epoch >= s.ramp_until) return s.ramp_target;
  const double start = s.floor_until + 1;
  const double frac = (epoch - start) / (s.ramp_until - start);
  return s.floor_value + (s.ramp_target - s.floor_value) * frac;
}

nc::Tensor smooth_l1(const nc::Tensor& a, const nc::Tensor& b) {
  check_pair(a, b, "smooth_l1");
  return nc::mean(nc::smooth_l1_elem(nc::sub(a, b)));
}

nc::Tensor mse(const nc::Tensor& a, const nc::Tensor& b) {
  check_pair(a, b, "mse");
  return nc::mean(nc::square(nc::sub(a, b)));
}

nc::Tensor spectral_loss(const nc::Tensor& x0, const nc::Tensor& xhat) {
  check_pair(x0, xhat, "spectral_loss");
  auto target = nc::log1p(magnitude(nc::rdft(rows(x0))));
  auto pred = nc::log1p(magnitude(nc::rdft(rows(xhat))));
  return smooth_l1(pred, target);
}

nc::Tensor deriv_loss(const nc::Tensor& x0, const nc::Tensor& xhat) {
  check_pair(x0, xhat, "deriv_loss");
  auto a = rows(x0);
  if (a.dim(1) < 2) throw DimensionError("deriv_loss needs length >= 2");
  return smooth_l1(first_difference(rows(xhat)), first_difference(a));
}

nc::Tensor amp_loss(const nc::Tensor& x0, const nc::Tensor& xhat) {
  check_pair(x0, xhat, "amp_loss");
  auto a = rows(x0);
  if (a.dim(1) < 2) throw DimensionError("amp_loss needs length >= 2");
  return nc::mean(nc::square(nc::sub(nc::std_dev(rows(xhat), {1}), nc::std_dev(a, {1}))));
}

nc::Tensor ptp_loss(const nc::Tensor& x0, const nc::Tensor& xhat) {
  check_pair(x0, xhat, "ptp_loss");
  return nc::mean(nc::square(nc::sub(range(rows(xhat)), range(rows(x0)))));
}

double weighted_sum(const LossBreakdown& b, const LossWeights& w) {
  return w.diff * b.diff + b.beta * b.kl + w.recon * b.recon + w.spec * b.spec + w.deriv * b.deriv + w.amp * b.amp +
         w.ptp * b.ptp;
}

LossResult total_loss(const nc::Tensor& x0, const nc::Tensor& xhat, const nc::Tensor& kl, double beta,
                      const LossWeights& w) {
  w.validate();
  check_pair(x0, xhat, "total_loss");
  LossResult r;
  r.breakdown.beta = beta;
  nc::Tensor total;
  auto add_term = [&](double weight, const nc::Tensor& term, double& slot) {
    slot = term.item();
    if (weight == 0.0) return;
    auto scaled = nc::scale(term, weight);
    total = total.defined() ? nc::add(total, scaled) : scaled;
  };
  add_term(w.diff, mse(x0, xhat), r.breakdown.diff);
  if (kl.defined()) add_term(beta, kl, r.breakdown.kl);
  if (w.recon != 0.0) add_term(w.recon, smooth_l1(xhat, x0), r.breakdown.recon);
  if (w.spec != 0.0) add_term(w.spec, spectral_loss(x0, xhat), r.breakdown.spec);
  if (w.deriv != 0.0) add_term(w.deriv, deriv_loss(x0, xhat), r.breakdown.deriv);
  if (w.amp != 0.0) add_term(w.amp, amp_loss(x0, xhat), r.breakdown.amp);
  if (w.ptp != 0.0) add_term(w.ptp, ptp_loss(x0, xhat), r.breakdown.ptp);
  if (!total.defined()) total = nc::Tensor::scalar(0.0);
  r.total = total;
  r.breakdown.total = total.item();
  return r;
}

}  // namespace vampdiff::losses
