// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/vampprior.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::vamp {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_rows(const nc::Tensor& t, const char* what) {
  if (t.rank() != 2) throw DimensionError(std::string(what) + " must be [N,D], got " + nc::shape_str(t.shape()));
}

nc::Tensor flatten_rows(const nc::Tensor& t) { return nc::reshape(t, {t.dim(0), t.numel() / t.dim(0)}); }

// -0.5 * (log 2pi + log var + (z - m)^2 / var), broadcast, summed over axis.
nc::Tensor gauss_terms(const nc::Tensor& z, const nc::Tensor& mean, const nc::Tensor& var, std::size_t axis) {
  auto sq = nc::div(nc::square(nc::sub(z, mean)), var);
  auto terms = nc::add(nc::add_scalar(nc::log(var), kLog2Pi), sq);
  return nc::scale(nc::sum(terms, {axis}), -0.5);
}

}  // namespace

PseudoInputs PseudoInputs::zeros(std::size_t count, std::size_t length) {
  return {nc::Tensor::zeros({count, length}, true)};
}

nc::Tensor diag_gauss_logpdf(const nc::Tensor& z, const nc::Tensor& mean, const nc::Tensor& var) {
  check_rows(z, "z");
  return gauss_terms(z, mean, var, 1);
}

nc::Tensor mixture_logpdf(const nc::Tensor& z, const DiagGaussians& comps) {
  check_rows(z, "z");
  check_rows(comps.mean, "component means");
  const std::size_t batch = z.dim(0);
  const std::size_t dim = z.dim(1);
  const std::size_t k = comps.mean.dim(0);
  if (comps.mean.dim(1) != dim || comps.var.shape() != comps.mean.shape()) {
    throw DimensionError("mixture_logpdf: components " + nc::shape_str(comps.mean.shape()) + " vs z " +
                         nc::shape_str(z.shape()));
  }
  auto per = gauss_terms(nc::reshape(z, {batch, 1, dim}), nc::reshape(comps.mean, {1, k, dim}),
                         nc::reshape(comps.var, {1, k, dim}), 2);
  return nc::add_scalar(nc::logsumexp(per, 1), -std::log(static_cast<double>(k)));
}

nc::Tensor standard_normal_logpdf(const nc::Tensor& z) {
  check_rows(z, "z");
  const double d = static_cast<double>(z.dim(1));
  return nc::add_scalar(nc::scale(nc::sum(nc::square(z), {1}), -0.5), -0.5 * d * kLog2Pi);
}

DiagGaussians pooled_posterior(const LatentPosterior& post, std::size_t pooled_len, PooledVariance mode) {
  auto mean = pool(post.mu, pooled_len);
  auto var = pool(nc::exp(post.logvar), pooled_len);
  if (mode == PooledVariance::kPushforward) {
    var = nc::scale(var, static_cast<double>(pooled_len) / static_cast<double>(post.mu.dim(2)));
  }
  return {flatten_rows(mean), flatten_rows(var)};
}

DiagGaussians prior_components(const PseudoInputs& pseudo, const Encoder& enc, std::size_t pooled_len,
                               PooledVariance mode) {
  auto x = nc::reshape(pseudo.u, {pseudo.count(), 1, pseudo.length()});
  return pooled_posterior(enc.encode(x), pooled_len, mode);
}

nc::Tensor vampprior_logpdf(const nc::Tensor& z_tilde, const PseudoInputs& pseudo, const Encoder& enc,
                            PooledVariance mode) {
  if (z_tilde.rank() != 3) throw DimensionError("vampprior_logpdf expects [B,C,T_c]");
  return mixture_logpdf(flatten_rows(z_tilde), prior_components(pseudo, enc, z_tilde.dim(2), mode));
}

nc::Tensor kl_monte_carlo(const DiagGaussians& q, const std::vector<nc::Tensor>& samples, const LogDensity& log_p) {
  if (samples.empty()) throw ParameterError("kl_monte_carlo needs at least one sample");
  nc::Tensor total;
  for (const auto& z : samples) {
    auto term = nc::mean(nc::sub(diag_gauss_logpdf(z, q.mean, q.var), log_p(z)));
    total = total.defined() ? nc::add(total, term) : term;
  }
  return nc::scale(total, 1.0 / static_cast<double>(samples.size()));
}

nc::Tensor kl_pooled(const LatentPosterior& post, const nc::Tensor& z_sample, const PseudoInputs& pseudo,
                     const Encoder& enc, const KlOptions& options, Rng* rng) {
  if (options.mc_samples == 0) throw ParameterError("kl_pooled: mc_samples must be >= 1");
  const auto q = pooled_posterior(post, options.pooled_len, options.mode);
  std::vector<nc::Tensor> samples;
  if (options.mc_samples == 1 && z_sample.defined()) {
    samples.push_back(flatten_rows(pool(z_sample, options.pooled_len)));
  } else {
    if (rng == nullptr) throw UsageError("kl_pooled: drawing samples needs an rng");
    auto sd = nc::sqrt(q.var);
    for (std::size_t s = 0; s < options.mc_samples; ++s) {
      auto eps = nc::Tensor::from_vector(q.mean.shape(), rng->normals(q.mean.numel()));
      samples.push_back(nc::add(q.mean, nc::mul(sd, eps)));
    }
  }
  LogDensity log_p;
  if (options.prior == PriorKind::kStandardNormal) {
    log_p = [](const nc::Tensor& z) { return standard_normal_logpdf(z); };
  } else {
    auto comps = prior_components(pseudo, enc, options.pooled_len, options.mode);
    log_p = [comps](const nc::Tensor& z) { return mixture_logpdf(z, comps); };
  }
  return kl_monte_carlo(q, samples, log_p);
}

std::vector<double> diag_gauss_kl(const DiagGaussians& q, const DiagGaussians& p) {
  check_rows(q.mean, "q mean");
  if (p.mean.shape() != q.mean.shape()) throw DimensionError("diag_gauss_kl: shape mismatch");
  const std::size_t rows = q.mean.dim(0);
  const std::size_t dim = q.mean.dim(1);
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t i = r * dim + d;
      const double vq = q.var.at(i);
      const double vp = p.var.at(i);
      const double dm = p.mean.at(i) - q.mean.at(i);
      out[r] += 0.5 * (vq / vp + dm * dm / vp - 1.0 + std::log(vp) - std::log(vq));
    }
  }
  return out;
}

}  // namespace vampdiff::vamp
