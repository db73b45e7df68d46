// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "gradcheck.hpp"
#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"
#include "vampdiff/signal/stats.hpp"
#include "vampdiff/signal/synth.hpp"
#include "vampdiff/vamp/model.hpp"

namespace {

using namespace vampdiff;
using namespace vampdiff::vamp;
using nc::Tensor;
using check::gradcheck;
using check::project;
using check::random_tensor;

ModelConfig tiny_config() {
  ModelConfig c;
  c.window_len = 32;
  c.latent_channels = 3;
  c.pooled_len = 2;
  c.num_pseudo = 3;
  c.diffusion_steps = 40;
  c.width_factor = 0.0625;
  c.time_dim = 8;
  c.blocks_per_level = 1;
  return c;
}

struct MomentStats {
  double mean = 0.0;
  double var = 0.0;
};

MomentStats moments(std::span<const double> v) {
  MomentStats m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

// Mean within 3 SE and variance within 3 SE of the sample variance.
void expect_gaussian_moments(std::span<const double> v, double mean, double var) {
  const double n = static_cast<double>(v.size());
  const auto m = moments(v);
  EXPECT_LE(std::abs(m.mean - mean), 3.0 * std::sqrt(var / n));
  EXPECT_LE(std::abs(m.var - var), 3.0 * var * std::sqrt(2.0 / (n - 1.0)));
}

bool any_nonzero(std::span<const double> v) {
  for (double x : v) {
    if (x != 0.0) return true;
  }
  return false;
}

signal::SignalWindow ppg_window(double hr, std::size_t len, std::uint64_t seed, double fs = 75.0) {
  auto x = signal::synth_ppg(fs, static_cast<double>(len) / fs + 1.0, hr, 12.0, 1.0, seed);
  x.resize(len);
  signal::NormStats stats{signal::mean(x), signal::pstdev(x)};
  signal::SignalWindow w;
  w.samples = x;
  w.fs = fs;
  return signal::normalize(w, stats);
}

// ---------------------------------------------------------------- encoder

TEST(Encode, ZeroInputZeroHeads) {
  VampDiff m(tiny_config(), 1);
  for (auto* t : {&m.encoder.head_mu.weight, &m.encoder.head_mu.bias, &m.encoder.head_logvar.weight,
                  &m.encoder.head_logvar.bias}) {
    zero_fill(*t);
  }
  auto post = m.encoder.encode(Tensor::zeros({1, 1, 32}));
  for (double v : post.mu.data()) EXPECT_EQ(v, 0.0);
  for (double v : post.logvar.data()) EXPECT_EQ(v, 0.0);
}

TEST(Encode, ShapeContract) {
  for (std::size_t len : {8u, 32u, 96u}) {
    auto cfg = tiny_config();
    cfg.window_len = len;
    cfg.pooled_len = 1;
    VampDiff m(cfg, 2);
    Rng rng(3);
    auto post = m.encoder.encode(random_tensor(rng, {2, 1, len}, -1, 1, false));
    EXPECT_EQ(post.mu.shape(), (nc::Shape{2, 3, len / 4}));
    EXPECT_EQ(post.logvar.shape(), post.mu.shape());
  }
}

TEST(Encode, RejectsBadLength) {
  VampDiff m(tiny_config(), 1);
  EXPECT_THROW(m.encoder.encode(Tensor::zeros({1, 1, 30})), DimensionError);
  EXPECT_THROW(m.encoder.encode(Tensor::zeros({1, 2, 32})), DimensionError);
}

TEST(Encode, LogvarClamped) {
  VampDiff m(tiny_config(), 1);
  zero_fill(m.encoder.head_logvar.weight);
  auto b = m.encoder.head_logvar.bias.mutable_data();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = i % 2 == 0 ? 50.0 : -50.0;
  auto post = m.encoder.encode(Tensor::zeros({1, 1, 32}));
  for (double v : post.logvar.data()) EXPECT_TRUE(v == kLogvarMax || v == kLogvarMin);
}

TEST(Encode, GradientReachesEveryWeight) {
  VampDiff m(tiny_config(), 4);
  Rng rng(5);
  auto x = random_tensor(rng, {2, 1, 32}, -1, 1, false);
  auto post = m.encoder.encode(x);
  nc::backward(nc::add(nc::sum(post.mu), nc::sum(post.logvar)));
  for (const auto& [name, p] : m.encoder_params()) {
    ASSERT_TRUE(p.has_grad()) << name;
    EXPECT_TRUE(any_nonzero(p.grad())) << name;
  }
}

TEST(Encode, MuGradientReachesMuPath) {
  VampDiff m(tiny_config(), 4);
  Rng rng(6);
  nc::backward(nc::sum(m.encoder.encode(random_tensor(rng, {2, 1, 32}, -1, 1, false)).mu));
  for (const auto& [name, p] : m.encoder_params()) {
    if (name.find("head_logvar") != std::string::npos) continue;
    ASSERT_TRUE(p.has_grad()) << name;
    EXPECT_TRUE(any_nonzero(p.grad())) << name;
  }
}

// ---------------------------------------------------------------- reparameterize / pool

TEST(Reparameterize, ZeroNoiseGivesMean) {
  Rng rng(1);
  LatentPosterior post{random_tensor(rng, {1, 2, 3}), random_tensor(rng, {1, 2, 3})};
  auto z = reparameterize(post, Tensor::zeros({1, 2, 3}));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(z.at(i), post.mu.at(i));
}

TEST(Reparameterize, UnitVarianceAddsNoise) {
  Rng rng(2);
  LatentPosterior post{random_tensor(rng, {1, 2, 3}), Tensor::zeros({1, 2, 3})};
  auto n = random_tensor(rng, {1, 2, 3});
  auto z = reparameterize(post, n);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(z.at(i), post.mu.at(i) + n.at(i));
}

TEST(Reparameterize, MonteCarloMoments) {
  const std::size_t n = 100000;
  auto mu = Tensor::full({n, 1, 1}, 0.7);
  auto logvar = Tensor::full({n, 1, 1}, std::log(2.5));
  Rng rng(3);
  auto z = reparameterize({mu, logvar}, standard_normal(rng, {n, 1, 1}));
  expect_gaussian_moments(z.data(), 0.7, 2.5);
}

TEST(Reparameterize, ShapeMismatch) {
  LatentPosterior post{Tensor::zeros({1, 2, 3}), Tensor::zeros({1, 2, 3})};
  EXPECT_THROW(reparameterize(post, Tensor::zeros({1, 3, 2})), DimensionError);
}

TEST(Reparameterize, Gradient) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto mu = random_tensor(rng, {2, 2, 3});
    auto lv = random_tensor(rng, {2, 2, 3});
    auto noise = random_tensor(rng, {2, 2, 3}, -2, 2, false);
    auto r = gradcheck([&](const std::vector<Tensor>& l) { return project(reparameterize({l[0], l[1]}, noise), 9); },
                       {mu, lv});
    EXPECT_LE(r.max_rel, 1e-4);
  }
}

TEST(Pool, Identity) {
  Rng rng(1);
  auto z = random_tensor(rng, {2, 3, 4}, -1, 1, false);
  auto p = pool(z, 4);
  for (std::size_t i = 0; i < z.numel(); ++i) EXPECT_EQ(p.at(i), z.at(i));
}

TEST(Pool, BlockMeans) {
  auto p = pool(Tensor::from_vector({1, 1, 4}, {1, 2, 3, 4}), 2);
  EXPECT_EQ(p.shape(), (nc::Shape{1, 1, 2}));
  EXPECT_DOUBLE_EQ(p.at(0), 1.5);
  EXPECT_DOUBLE_EQ(p.at(1), 3.5);
}

TEST(Pool, ConstantInTime) {
  auto p = pool(Tensor::full({2, 3, 12}, -0.3), 3);
  for (double v : p.data()) EXPECT_NEAR(v, -0.3, 1e-15);
}

TEST(Pool, RejectsIndivisible) { EXPECT_THROW(pool(Tensor::zeros({1, 1, 6}), 4), DimensionError); }

// ---------------------------------------------------------------- densities

DiagGaussians random_comps(Rng& rng, std::size_t k, std::size_t d) {
  return {random_tensor(rng, {k, d}, -1.5, 1.5, false), random_tensor(rng, {k, d}, 0.2, 2.0, false)};
}

TEST(MixtureLogpdf, SingleComponentAtMean) {
  Rng rng(1);
  auto comps = random_comps(rng, 1, 5);
  auto lp = mixture_logpdf(comps.mean, comps).item();
  double want = -2.5 * std::log(2.0 * std::numbers::pi);
  for (double v : comps.var.data()) want -= 0.5 * std::log(v);
  EXPECT_NEAR(lp, want, 1e-12);
}

TEST(MixtureLogpdf, DuplicateComponentsCancel) {
  Rng rng(2);
  auto one = random_comps(rng, 1, 4);
  auto mean2 = Tensor::from_vector({2, 4}, [&] {
    auto v = one.mean.to_vector();
    v.insert(v.end(), v.begin(), v.end());
    return v;
  }());
  auto var2 = Tensor::from_vector({2, 4}, [&] {
    auto v = one.var.to_vector();
    v.insert(v.end(), v.begin(), v.end());
    return v;
  }());
  auto z = random_tensor(rng, {3, 4}, -1, 1, false);
  auto a = mixture_logpdf(z, one);
  auto b = mixture_logpdf(z, {mean2, var2});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.at(i), b.at(i), 1e-12);
}

double direct_mixture(const std::vector<double>& z, const DiagGaussians& c) {
  const std::size_t k = c.mean.dim(0);
  const std::size_t d = c.mean.dim(1);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double pdf = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double v = c.var.at(j * d + i);
      const double diff = z[i] - c.mean.at(j * d + i);
      pdf *= std::exp(-0.5 * diff * diff / v) / std::sqrt(2.0 * std::numbers::pi * v);
    }
    total += pdf;
  }
  return std::log(total / static_cast<double>(k));
}

TEST(MixtureLogpdf, DirectSumOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.index(5);
    const std::size_t d = 1 + rng.index(8);
    auto comps = random_comps(rng, k, d);
    auto z = random_tensor(rng, {4, d}, -2, 2, false);
    auto lp = mixture_logpdf(z, comps);
    for (std::size_t b = 0; b < 4; ++b) {
      std::vector<double> row(z.data().begin() + b * d, z.data().begin() + (b + 1) * d);
      EXPECT_NEAR(lp.at(b), direct_mixture(row, comps), 1e-10);
    }
  }
}

TEST(MixtureLogpdf, StableFarFromComponents) {
  DiagGaussians c{Tensor::zeros({2, 1}), Tensor::full({2, 1}, 1e-3)};
  auto lp = mixture_logpdf(Tensor::full({1, 1}, 10.0), c).item();
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_NEAR(lp, -0.5 * std::log(2.0 * std::numbers::pi * 1e-3) - 0.5 * 100.0 / 1e-3, 1e-6);
}

TEST(MixtureLogpdf, Gradient) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto z = random_tensor(rng, {3, 4}, -1, 1);
    auto mean = random_tensor(rng, {2, 4}, -1, 1);
    auto var = random_tensor(rng, {2, 4}, 0.5, 2.0);
    auto r = gradcheck([](const std::vector<Tensor>& l) { return project(mixture_logpdf(l[0], {l[1], l[2]}), 5); },
                       {z, mean, var});
    EXPECT_LE(r.max_rel, 1e-4);
  }
}

TEST(VampPriorLogpdf, MatchesComponentMixture) {
  VampDiff m(tiny_config(), 7);
  Rng rng(8);
  m.pseudo.u = random_tensor(rng, {3, 32}, -1, 1);
  auto z = random_tensor(rng, {2, 3, 2}, -1, 1, false);
  auto comps = prior_components(m.pseudo, m.encoder, 2, PooledVariance::kPooledParameters);
  auto lp = vampprior_logpdf(z, m.pseudo, m.encoder);
  for (std::size_t b = 0; b < 2; ++b) {
    std::vector<double> row(z.data().begin() + b * 6, z.data().begin() + (b + 1) * 6);
    EXPECT_NEAR(lp.at(b), direct_mixture(row, comps), 1e-10);
  }
}

TEST(PooledPosterior, PushforwardShrinksByWidth) {
  Rng rng(9);
  LatentPosterior post{random_tensor(rng, {1, 2, 8}, -1, 1, false), random_tensor(rng, {1, 2, 8}, -1, 1, false)};
  auto a = pooled_posterior(post, 2, PooledVariance::kPooledParameters);
  auto b = pooled_posterior(post, 2, PooledVariance::kPushforward);
  EXPECT_EQ(a.mean.shape(), (nc::Shape{1, 4}));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(a.mean.at(i), b.mean.at(i));
    EXPECT_NEAR(b.var.at(i), a.var.at(i) / 4.0, 1e-15);
  }
}

// ---------------------------------------------------------------- kl_pooled

struct KlSetup {
  VampDiff model;
  LatentPosterior post;  // n identical rows
  Tensor z;
};

KlSetup kl_setup(std::size_t n, std::size_t k, std::uint64_t seed, bool pseudo_is_data) {
  auto cfg = tiny_config();
  cfg.num_pseudo = k;
  KlSetup s{VampDiff(cfg, seed), {}, {}};
  Rng rng(seed + 100);
  auto x = random_tensor(rng, {1, 1, 32}, -1, 1, false);
  s.model.pseudo.u = pseudo_is_data ? nc::reshape(x, {1, 32}).detach() : random_tensor(rng, {k, 32}, -1, 1, false);
  nc::NoGradGuard guard;
  auto one = s.model.encoder.encode(x);
  std::vector<double> mu;
  std::vector<double> lv;
  for (std::size_t i = 0; i < n; ++i) {
    mu.insert(mu.end(), one.mu.data().begin(), one.mu.data().end());
    lv.insert(lv.end(), one.logvar.data().begin(), one.logvar.data().end());
  }
  s.post = {Tensor::from_vector({n, 3, 8}, mu), Tensor::from_vector({n, 3, 8}, lv)};
  s.z = reparameterize(s.post, standard_normal(rng, {n, 3, 8}));
  return s;
}

struct PerSample {
  double estimate = 0.0;
  double mean = 0.0;
  double se = 0.0;
};

// Per-sample log q - log p for one draw per row from the pooled posterior,
// alongside the kl_pooled estimate made from the same draws.
PerSample kl_per_sample(const KlSetup& s, std::uint64_t seed) {
  nc::NoGradGuard guard;
  KlOptions opt;
  opt.pooled_len = 2;
  PerSample r;
  Rng rng(seed);
  r.estimate = kl_pooled(s.post, Tensor(), s.model.pseudo, s.model.encoder, opt, &rng).item();
  auto q = pooled_posterior(s.post, 2, opt.mode);
  Rng replay(seed);
  auto eps = Tensor::from_vector(q.mean.shape(), replay.normals(q.mean.numel()));
  auto zt = nc::add(q.mean, nc::mul(nc::sqrt(q.var), eps));
  auto comps = prior_components(s.model.pseudo, s.model.encoder, 2, opt.mode);
  auto diff = nc::sub(diag_gauss_logpdf(zt, q.mean, q.var), mixture_logpdf(zt, comps));
  const auto m = moments(diff.data());
  r.mean = m.mean;
  r.se = std::sqrt(m.var / static_cast<double>(diff.numel()));
  return r;
}

TEST(KlPooled, SelfPriorIsZero) {
  auto s = kl_setup(10000, 1, 11, true);
  auto r = kl_per_sample(s, 1);
  EXPECT_NEAR(r.estimate, r.mean, 1e-12);
  EXPECT_LE(std::abs(r.estimate), 3.0 * r.se + 1e-12);
}

TEST(KlPooled, SingleComponentMatchesClosedForm) {
  auto s = kl_setup(100000, 1, 12, false);
  auto r = kl_per_sample(s, 2);
  EXPECT_NEAR(r.estimate, r.mean, 1e-9);
  nc::NoGradGuard guard;
  auto q = pooled_posterior(s.post, 2, PooledVariance::kPooledParameters);
  auto p = prior_components(s.model.pseudo, s.model.encoder, 2, PooledVariance::kPooledParameters);
  DiagGaussians q1{nc::slice(q.mean, 0, 0, 1), nc::slice(q.var, 0, 0, 1)};
  const double closed = diag_gauss_kl(q1, p).front();
  EXPECT_GT(closed, 0.0);
  EXPECT_LE(std::abs(r.mean - closed), 3.0 * r.se);
}

TEST(KlPooled, MixtureEstimateNonNegative) {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    auto s = kl_setup(10000, 4, seed, false);
    auto r = kl_per_sample(s, seed);
    EXPECT_GE(r.mean, -5.0 * r.se);
  }
}

TEST(KlPooled, SingleSampleUsesPooledLatent) {
  auto s = kl_setup(3, 2, 25, false);
  KlOptions opt;
  opt.pooled_len = 2;
  nc::NoGradGuard guard;
  const double est = kl_pooled(s.post, s.z, s.model.pseudo, s.model.encoder, opt).item();
  auto q = pooled_posterior(s.post, 2, opt.mode);
  auto zt = nc::reshape(pool(s.z, 2), {3, 6});
  auto comps = prior_components(s.model.pseudo, s.model.encoder, 2, opt.mode);
  EXPECT_NEAR(est, nc::mean(nc::sub(diag_gauss_logpdf(zt, q.mean, q.var), mixture_logpdf(zt, comps))).item(), 1e-12);
}

TEST(KlPooled, DrawnSamplesMatchClosedForm) {
  auto s = kl_setup(1, 1, 13, false);
  KlOptions opt;
  opt.pooled_len = 2;
  opt.mc_samples = 20000;
  Rng rng(14);
  nc::NoGradGuard guard;
  const double est = kl_pooled(s.post, Tensor(), s.model.pseudo, s.model.encoder, opt, &rng).item();
  auto q = pooled_posterior(s.post, 2, opt.mode);
  auto p = prior_components(s.model.pseudo, s.model.encoder, 2, opt.mode);
  const double closed = diag_gauss_kl(q, p).front();
  EXPECT_NEAR(est, closed, 0.05 * closed + 0.05);
}

TEST(KlPooled, StandardNormalPrior) {
  auto s = kl_setup(1, 1, 15, false);
  KlOptions opt;
  opt.pooled_len = 2;
  opt.prior = PriorKind::kStandardNormal;
  nc::NoGradGuard guard;
  const double est = kl_pooled(s.post, s.z, s.model.pseudo, s.model.encoder, opt).item();
  auto q = pooled_posterior(s.post, 2, opt.mode);
  auto zt = nc::reshape(pool(s.z, 2), {1, 6});
  EXPECT_NEAR(est, (diag_gauss_logpdf(zt, q.mean, q.var).item() - standard_normal_logpdf(zt).item()), 1e-12);
}

TEST(KlPooled, RejectsZeroSamples) {
  auto s = kl_setup(1, 1, 16, false);
  KlOptions opt;
  opt.pooled_len = 2;
  opt.mc_samples = 0;
  EXPECT_THROW(kl_pooled(s.post, s.z, s.model.pseudo, s.model.encoder, opt), ParameterError);
}

TEST(KlPooled, GradientThroughPosteriorAndPseudoInputs) {
  auto cfg = tiny_config();
  cfg.num_pseudo = 2;
  VampDiff m(cfg, 17);
  Rng rng(18);
  KlOptions opt;
  opt.pooled_len = 2;
  for (int trial = 0; trial < 50; ++trial) {
    auto mu = random_tensor(rng, {2, 3, 8}, -1, 1);
    auto lv = random_tensor(rng, {2, 3, 8}, -1, 1);
    auto u = random_tensor(rng, {2, 32}, -1, 1);
    auto noise = random_tensor(rng, {2, 3, 8}, -1, 1, false);
    auto r = gradcheck(
        [&](const std::vector<Tensor>& l) {
          LatentPosterior post{l[0], l[1]};
          PseudoInputs pseudo{l[2]};
          return kl_pooled(post, reparameterize(post, noise), pseudo, m.encoder, opt);
        },
        {mu, lv, u});
    EXPECT_LE(r.max_rel, 1e-4) << "trial " << trial;
  }
}

TEST(DiagGaussKl, ZeroForEqual) {
  Rng rng(19);
  auto q = random_comps(rng, 3, 4);
  for (double v : diag_gauss_kl(q, q)) EXPECT_NEAR(v, 0.0, 1e-15);
}

// ---------------------------------------------------------------- schedule

TEST(Schedule, DefaultEndsNearNoise) {
  for (std::size_t steps : {50u, 100u}) {
    auto s = DiffusionSchedule::linear(steps);
    EXPECT_LT(s.alpha_bar(steps), 0.05);
    EXPECT_EQ(s.alpha_bar(0), 1.0);
    for (std::size_t t = 1; t <= steps; ++t) EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
    EXPECT_NEAR(s.beta(1), 1e-4 * 1000.0 / static_cast<double>(steps), 1e-15);
    EXPECT_NEAR(s.beta(steps), 0.02 * 1000.0 / static_cast<double>(steps), 1e-15);
  }
}

TEST(Schedule, RangeChecks) {
  auto s = DiffusionSchedule::linear(10, 1e-5, 0.005);
  EXPECT_THROW(s.beta(0), RangeError);
  EXPECT_THROW(s.beta(11), RangeError);
  EXPECT_THROW(s.beta_tilde(1), RangeError);
  EXPECT_THROW(DiffusionSchedule::linear(1), ParameterError);
  EXPECT_THROW(DiffusionSchedule::linear(10, 1e-4, 0.2), ParameterError);
}

TEST(ForwardDiffuse, ZeroNoise) {
  auto s = DiffusionSchedule::linear(50);
  Rng rng(1);
  auto x0 = random_tensor(rng, {2, 1, 5}, -1, 1, false);
  auto xt = forward_diffuse(x0, 20, Tensor::zeros({2, 1, 5}), s);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(xt.at(i), std::sqrt(s.alpha_bar(20)) * x0.at(i));
}

TEST(ForwardDiffuse, ZeroSignal) {
  auto s = DiffusionSchedule::linear(50);
  Rng rng(2);
  auto eps = random_tensor(rng, {2, 1, 5}, -1, 1, false);
  auto xt = forward_diffuse(Tensor::zeros({2, 1, 5}), 7, eps, s);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(xt.at(i), std::sqrt(1.0 - s.alpha_bar(7)) * eps.at(i));
}

TEST(ForwardDiffuse, PerElementTimesteps) {
  auto s = DiffusionSchedule::linear(50);
  auto xt = forward_diffuse(Tensor::full({2, 1, 1}, 1.0), std::vector<std::size_t>{1, 50}, Tensor::zeros({2, 1, 1}), s);
  EXPECT_DOUBLE_EQ(xt.at(0), std::sqrt(s.alpha_bar(1)));
  EXPECT_DOUBLE_EQ(xt.at(1), std::sqrt(s.alpha_bar(50)));
}

TEST(ForwardDiffuse, MonteCarloMarginal) {
  auto s = DiffusionSchedule::linear(100);
  const std::size_t n = 100000;
  Rng rng(3);
  for (std::size_t t : {1u, 50u, 100u}) {
    auto xt = forward_diffuse(Tensor::full({n, 1}, 1.3), t, standard_normal(rng, {n, 1}), s);
    expect_gaussian_moments(xt.data(), std::sqrt(s.alpha_bar(t)) * 1.3, 1.0 - s.alpha_bar(t));
  }
}

TEST(ForwardDiffuse, Errors) {
  auto s = DiffusionSchedule::linear(50);
  EXPECT_THROW(forward_diffuse(Tensor::zeros({1, 1, 4}), 0, Tensor::zeros({1, 1, 4}), s), RangeError);
  EXPECT_THROW(forward_diffuse(Tensor::zeros({1, 1, 4}), 51, Tensor::zeros({1, 1, 4}), s), RangeError);
  EXPECT_THROW(forward_diffuse(Tensor::zeros({1, 1, 4}), 3, Tensor::zeros({1, 1, 5}), s), DimensionError);
}

TEST(PosteriorMean, ZeroInputs) {
  auto s = DiffusionSchedule::linear(50);
  auto m = posterior_mean_exact(Tensor::zeros({3}), Tensor::zeros({3}), 10, s);
  for (double v : m.data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(posterior_mean_exact(Tensor::zeros({3}), Tensor::zeros({3}), 1, s), RangeError);
}

TEST(PosteriorMean, ConstantInputsMatchFormula) {
  auto s = DiffusionSchedule::linear(100);
  const double c = 0.8;
  for (std::size_t t = 2; t <= 100; ++t) {
    const double ab = s.alpha_bar(t);
    const double abp = s.alpha_bar(t - 1);
    const double want = c * (std::sqrt(abp) * s.beta(t) + std::sqrt(s.alpha(t)) * (1.0 - abp)) / (1.0 - ab);
    auto m = posterior_mean_exact(Tensor::full({2}, c), Tensor::full({2}, c), t, s);
    EXPECT_NEAR(m.at(0), want, 1e-14);
  }
}

TEST(PosteriorMean, GaussianKlIdentity) {
  Rng rng(4);
  for (std::size_t steps : {50u, 100u}) {
    auto s = DiffusionSchedule::linear(steps);
    for (int trial = 0; trial < 100; ++trial) {
      auto x0 = random_tensor(rng, {16}, -2, 2, false);
      auto xhat = random_tensor(rng, {16}, -2, 2, false);
      auto xt = random_tensor(rng, {16}, -2, 2, false);
      double sq = 0.0;
      for (std::size_t i = 0; i < 16; ++i) sq += (x0.at(i) - xhat.at(i)) * (x0.at(i) - xhat.at(i));
      for (std::size_t t = 2; t <= steps; ++t) {
        auto m1 = posterior_mean_exact(xt, x0, t, s);
        auto m2 = posterior_mean_exact(xt, xhat, t, s);
        double kl = 0.0;
        for (std::size_t i = 0; i < 16; ++i) kl += (m1.at(i) - m2.at(i)) * (m1.at(i) - m2.at(i));
        kl /= 2.0 * s.beta_tilde(t);
        EXPECT_NEAR(kl - kl_weight(t, s) * sq, 0.0, 1e-10) << "t=" << t;
      }
    }
  }
}

// ---------------------------------------------------------------- U-Net

TEST(TimestepEmbedding, SinCosHalves) {
  auto e = timestep_embedding({0, 3}, 8);
  EXPECT_EQ(e.shape(), (nc::Shape{2, 8}));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(e.at(i), 0.0);
    EXPECT_EQ(e.at(4 + i), 1.0);
  }
  EXPECT_DOUBLE_EQ(e.at(8), std::sin(3.0));
  EXPECT_DOUBLE_EQ(e.at(12), std::cos(3.0));
}

TEST(PredictX0, DeskShapeContract) {
  ModelConfig cfg;
  VampDiff m(cfg, 1);
  Rng rng(2);
  auto xt = random_tensor(rng, {2, 1, 768}, -1, 1, false);
  auto z = random_tensor(rng, {2, cfg.latent_channels, 192}, -1, 1, false);
  nc::NoGradGuard guard;
  auto out = m.predict_x0(xt, {5, 40}, z);
  EXPECT_EQ(out.shape(), xt.shape());
  for (double v : out.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(PredictX0, LatentChangesOutput) {
  VampDiff m(tiny_config(), 3);
  Rng rng(4);
  auto xt = random_tensor(rng, {2, 1, 32}, -1, 1, false);
  auto z1 = standard_normal(rng, {2, 3, 8});
  auto z2 = standard_normal(rng, {2, 3, 8});
  auto a = m.predict_x0(xt, {3, 9}, z1);
  auto b = m.predict_x0(xt, {3, 9}, z2);
  double mad = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) mad += std::abs(a.at(i) - b.at(i));
  EXPECT_GT(mad / static_cast<double>(a.numel()), 0.0);
}

TEST(PredictX0, ShapeErrors) {
  VampDiff m(tiny_config(), 3);
  EXPECT_THROW(m.predict_x0(Tensor::zeros({2, 1, 32}), {1}, Tensor::zeros({2, 3, 8})), DimensionError);
  EXPECT_THROW(m.predict_x0(Tensor::zeros({2, 1, 32}), {1, 1}, Tensor::zeros({2, 4, 8})), DimensionError);
  EXPECT_THROW(m.predict_x0(Tensor::zeros({2, 1, 30}), {1, 1}, Tensor::zeros({2, 3, 8})), DimensionError);
}

TEST(PredictX0, ReconstructionGradientReachesEncoder) {
  VampDiff m(tiny_config(), 5);
  Rng rng(6);
  auto x0 = random_tensor(rng, {2, 1, 32}, -1, 1, false);
  auto post = m.encoder.encode(x0);
  auto z = reparameterize(post, standard_normal(rng, {2, 3, 8}));
  auto xt = forward_diffuse(x0, std::vector<std::size_t>{4, 30}, standard_normal(rng, {2, 1, 32}), m.schedule);
  nc::backward(nc::sum(nc::square(nc::sub(x0, m.predict_x0(xt, {4, 30}, z)))));
  for (const auto& [name, p] : m.all_params()) {
    if (name == "pseudo.u") continue;
    ASSERT_TRUE(p.has_grad()) << name;
    EXPECT_TRUE(any_nonzero(p.grad())) << name;
  }
}

TEST(PredictX0, DecoderGradientMatchesFiniteDifferences) {
  auto cfg = tiny_config();
  cfg.window_len = 16;
  cfg.pooled_len = 1;
  VampDiff m(cfg, 7);
  Rng rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    auto xt = random_tensor(rng, {2, 1, 16}, -1, 1);
    auto z = random_tensor(rng, {2, 3, 4}, -1, 1);
    auto r = gradcheck([&](const std::vector<Tensor>& l) { return project(m.predict_x0(l[0], {2, 11}, l[1]), 3); },
                       {xt, z});
    EXPECT_LE(r.max_rel, 1e-3);
  }
}

// Encoder parameters receive the gradient of reconstruction error plus KL.
TEST(Composite, EncoderLossGradient) {
  auto cfg = tiny_config();
  cfg.window_len = 16;
  cfg.pooled_len = 2;
  cfg.num_pseudo = 2;
  VampDiff m(cfg, 9);
  Rng rng(10);
  m.pseudo.u = random_tensor(rng, {2, 16}, -1, 1);
  auto x0 = random_tensor(rng, {2, 1, 16}, -1, 1, false);
  auto ez = standard_normal(rng, {2, 3, 4});
  auto eps = standard_normal(rng, {2, 1, 16});
  const std::vector<std::size_t> t{3, 25};
  KlOptions opt;
  opt.pooled_len = 2;
  std::vector<Tensor> leaves{m.encoder.mid2.weight, m.encoder.head_mu.weight, m.encoder.head_logvar.bias,
                             m.pseudo.u};
  auto loss = [&](const std::vector<Tensor>&) {
    auto post = m.encoder.encode(x0);
    auto z = reparameterize(post, ez);
    auto xt = forward_diffuse(x0, t, eps, m.schedule);
    auto rec = nc::mean(nc::square(nc::sub(x0, m.predict_x0(xt, t, z))));
    return nc::add(rec, nc::scale(kl_pooled(post, z, m.pseudo, m.encoder, opt), 0.1));
  };
  auto r = gradcheck(loss, leaves);
  EXPECT_LE(r.max_rel, 1e-3);
}

// ---------------------------------------------------------------- DDIM

TEST(DdimTimesteps, UniformStride) {
  EXPECT_EQ(ddim_timesteps(50, 1), (std::vector<std::size_t>{50}));
  EXPECT_EQ(ddim_timesteps(50, 2), (std::vector<std::size_t>{50, 1}));
  EXPECT_EQ(ddim_timesteps(10, 4), (std::vector<std::size_t>{10, 7, 4, 1}));
  auto all = ddim_timesteps(20, 20);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(all[i], 20 - i);
  auto half = ddim_timesteps(100, 50);
  EXPECT_EQ(half.front(), 100u);
  EXPECT_EQ(half.back(), 1u);
  for (std::size_t i = 1; i < half.size(); ++i) EXPECT_LT(half[i], half[i - 1]);
  EXPECT_THROW(ddim_timesteps(50, 0), RangeError);
  EXPECT_THROW(ddim_timesteps(50, 51), RangeError);
}

TEST(DdimSample, SingleStepIsOnePrediction) {
  VampDiff m(tiny_config(), 11);
  Rng rng(12);
  auto z = standard_normal(rng, {2, 3, 8});
  auto xT = standard_normal(rng, {2, 1, 32});
  auto out = ddim_sample(z, xT, m.predictor(), m.schedule, 1);
  auto direct = m.predict_x0(xT, {40, 40}, z);
  for (std::size_t i = 0; i < out.numel(); ++i) EXPECT_EQ(out.at(i), direct.at(i));
}

TEST(DdimSample, ConstantOracleFixedPoint) {
  auto s = DiffusionSchedule::linear(50);
  X0Predictor oracle = [](const Tensor& x, const std::vector<std::size_t>&, const Tensor&) {
    return Tensor::full(x.shape(), 0.37);
  };
  Rng rng(13);
  auto xT = standard_normal(rng, {2, 1, 8});
  for (std::size_t n : {1u, 2u, 7u, 25u, 50u}) {
    auto out = ddim_sample(Tensor::zeros({2, 1, 1}), xT, oracle, s, n);
    for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-12);
  }
}

TEST(DdimSample, Deterministic) {
  VampDiff m(tiny_config(), 14);
  Rng rng(15);
  auto z = standard_normal(rng, {1, 3, 8});
  auto xT = standard_normal(rng, {1, 1, 32});
  auto a = ddim_sample(z, xT, m.predictor(), m.schedule, 8);
  auto b = ddim_sample(z, xT, m.predictor(), m.schedule, 8);
  EXPECT_EQ(a.to_vector(), b.to_vector());
}

TEST(DdimSample, StepCountError) {
  VampDiff m(tiny_config(), 14);
  EXPECT_THROW(ddim_sample(Tensor::zeros({1, 3, 8}), Tensor::zeros({1, 1, 32}), m.predictor(), m.schedule, 0),
               RangeError);
  EXPECT_THROW(ddim_sample(Tensor::zeros({1, 3, 8}), Tensor::zeros({1, 1, 32}), m.predictor(), m.schedule, 41),
               RangeError);
}

// ---------------------------------------------------------------- reconstruct / generate

TEST(Reconstruct, SeededAndFinite) {
  VampDiff m(tiny_config(), 16);
  auto w = ppg_window(80, 32, 1, 25.0);
  auto a = reconstruct(m, w, 5, 99);
  auto b = reconstruct(m, w, 5, 99);
  auto c = reconstruct(m, w, 5, 100);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  ASSERT_EQ(a.length(), 32u);
  EXPECT_FALSE(a.normalized);
  for (double v : a.samples) EXPECT_TRUE(std::isfinite(v));
}

TEST(Reconstruct, BatchMatchesSingle) {
  VampDiff m(tiny_config(), 17);
  std::vector<signal::SignalWindow> ws{ppg_window(70, 32, 2, 25.0), ppg_window(110, 32, 3, 25.0)};
  auto many = reconstruct_many(m, ws, 4, {5, 6});
  for (std::size_t i = 0; i < 2; ++i) {
    auto one = reconstruct(m, ws[i], 4, 5 + i);
    for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(many[i].samples[j], one.samples[j], 1e-12);
  }
}

TEST(Reconstruct, DenormalizesWithModelStats) {
  VampDiff m(tiny_config(), 18);
  m.norm = {2.0, 3.0};
  auto w = ppg_window(80, 32, 4, 25.0);
  auto r = reconstruct(m, w, 3, 1);
  nc::NoGradGuard guard;
  auto z = encode_means(m, {w});
  auto raw = decode(m, z, {1}, 3).front();
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(r.samples[i], 2.0 + 3.0 * raw[i], 1e-12);
}

TEST(Generate, Deterministic) {
  VampDiff m(tiny_config(), 19);
  Rng rng(20);
  m.pseudo.u = random_tensor(rng, {3, 32}, -1, 1);
  auto a = generate(m, 5, 7, 25.0);
  auto b = generate(m, 5, 7, 25.0);
  EXPECT_EQ(a.window.samples, b.window.samples);
  EXPECT_EQ(a.component, b.component);
  auto many = generate_many(m, 4, 5, 7, 25.0);
  EXPECT_EQ(many.size(), 4u);
  EXPECT_NE(many[0].window.samples, many[1].window.samples);
}

TEST(Generate, SingleComponent) {
  auto cfg = tiny_config();
  cfg.num_pseudo = 1;
  VampDiff m(cfg, 21);
  for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_EQ(generate(m, 2, seed, 25.0).component, 0u);
}

TEST(Generate, ComponentsCoverMixture) {
  VampDiff m(tiny_config(), 22);
  std::set<std::size_t> seen;
  for (const auto& g : generate_many(m, 30, 1, 3, 25.0)) seen.insert(g.component);
  EXPECT_EQ(seen.size(), 3u);
}

TEST(Generate, PooledConditioningDiffers) {
  auto cfg = tiny_config();
  VampDiff full(cfg, 23);
  Rng rng(24);
  full.pseudo.u = random_tensor(rng, {3, 32}, -1, 1);
  VampDiff pooled = full;
  pooled.config.conditioning = Conditioning::kPooled;
  auto a = generate(full, 5, 8, 25.0);
  auto b = generate(pooled, 5, 8, 25.0);
  EXPECT_EQ(a.component, b.component);
  EXPECT_NE(a.window.samples, b.window.samples);
}

// ---------------------------------------------------------------- interpolation

TEST(InterpolateLatent, EndpointsAndMidpoint) {
  Rng rng(1);
  auto z = random_tensor(rng, {1, 2, 3}, -1, 1, false);
  auto zs = interpolate_latent(z, nc::neg(z), {0.0, 0.5, 1.0});
  ASSERT_EQ(zs.size(), 3u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(zs[0].at(i), z.at(i));
    EXPECT_NEAR(zs[1].at(i), 0.0, 1e-15);
    EXPECT_EQ(zs[2].at(i), -z.at(i));
  }
}

TEST(InterpolateLatent, Errors) {
  EXPECT_THROW(interpolate_latent(Tensor::zeros({1, 2}), Tensor::zeros({2, 1}), {0.5}), DimensionError);
  EXPECT_THROW(interpolate_latent(Tensor::zeros({1, 2}), Tensor::zeros({1, 2}), {1.5}), ParameterError);
}

// ---------------------------------------------------------------- stratified init

TEST(StratifiedInit, SingleComponentCopiesAWindow) {
  std::vector<signal::SignalWindow> ws;
  for (int i = 0; i < 5; ++i) ws.push_back(ppg_window(60.0 + 10.0 * i, 768, 30 + i));
  auto pseudo = PseudoInputs::zeros(1, 768);
  stratified_init(pseudo, ws, 1);
  bool found = false;
  for (const auto& w : ws) found = found || std::vector<double>(pseudo.u.data().begin(), pseudo.u.data().end()) == w.samples;
  EXPECT_TRUE(found);
}

TEST(StratifiedInit, IdenticalWindows) {
  auto w = ppg_window(75, 768, 40);
  std::vector<signal::SignalWindow> ws(6, w);
  auto pseudo = PseudoInputs::zeros(4, 768);
  stratified_init(pseudo, ws, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < 768; ++i) ASSERT_EQ(pseudo.u.at(k * 768 + i), w.samples[i]);
  }
}

std::vector<double> chosen_hrs(const PseudoInputs& p, const std::vector<signal::SignalWindow>& ws,
                               const std::vector<double>& hrs) {
  std::vector<double> out;
  const std::size_t len = p.length();
  for (std::size_t k = 0; k < p.count(); ++k) {
    std::vector<double> row(p.u.data().begin() + k * len, p.u.data().begin() + (k + 1) * len);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (ws[i].samples == row) out.push_back(hrs[i]);
    }
  }
  return out;
}

TEST(StratifiedInit, OnePerHeartRateQuartile) {
  const std::vector<double> hrs{60, 80, 100, 120};
  std::vector<signal::SignalWindow> ws;
  for (std::size_t i = 0; i < hrs.size(); ++i) {
    auto w = ppg_window(hrs[i], 768, 50 + i);
    const double ptp = signal::peak_to_peak(w.samples);
    for (auto& v : w.samples) v *= 4.0 / ptp;
    ws.push_back(w);
  }
  auto pseudo = PseudoInputs::zeros(4, 768);
  stratified_init(pseudo, ws, 3);
  auto got = chosen_hrs(pseudo, ws, hrs);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, hrs);
}

TEST(StratifiedInit, SpreadsAcrossHeartRateBins) {
  // Eight windows at 60-70 bpm and eight at 110-120 bpm; K=4 must draw from both.
  std::vector<double> hrs;
  std::vector<signal::SignalWindow> ws;
  for (int i = 0; i < 8; ++i) {
    for (double base : {60.0, 110.0}) {
      hrs.push_back(base + i);
      ws.push_back(ppg_window(base + i, 768, 60 + ws.size()));
    }
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto pseudo = PseudoInputs::zeros(4, 768);
    stratified_init(pseudo, ws, seed);
    auto got = chosen_hrs(pseudo, ws, hrs);
    ASSERT_EQ(got.size(), 4u);
    EXPECT_EQ(std::set<double>(got.begin(), got.end()).size(), 4u);
    EXPECT_EQ(std::count_if(got.begin(), got.end(), [](double h) { return h < 90; }), 2);
  }
}

TEST(StratifiedInit, InsufficientWindows) {
  std::vector<signal::SignalWindow> ws{ppg_window(70, 768, 1), ppg_window(90, 768, 2)};
  signal::SignalWindow flat;
  flat.samples.assign(768, 0.0);
  flat.fs = 75.0;
  ws.push_back(flat);
  auto pseudo = PseudoInputs::zeros(3, 768);
  EXPECT_THROW(stratified_init(pseudo, ws, 1), InitError);
}

// ---------------------------------------------------------------- model plumbing

TEST(VampDiff, ParameterGroupsPartition) {
  VampDiff m(tiny_config(), 1);
  const auto all = m.all_params();
  EXPECT_EQ(all.size(), m.encoder_params().size() + m.decoder_params().size() + 1);
  std::set<std::string> names;
  for (const auto& [name, p] : all) {
    EXPECT_TRUE(p.requires_grad()) << name;
    names.insert(name);
  }
  EXPECT_EQ(names.size(), all.size());
}

TEST(VampDiff, SeedDeterminesParameters) {
  VampDiff a(tiny_config(), 5);
  VampDiff b(tiny_config(), 5);
  VampDiff c(tiny_config(), 6);
  auto pa = a.all_params();
  auto pb = b.all_params();
  auto pc = c.all_params();
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].second.to_vector(), pb[i].second.to_vector());
    differs = differs || pa[i].second.to_vector() != pc[i].second.to_vector();
  }
  EXPECT_TRUE(differs);
}

}  // namespace
