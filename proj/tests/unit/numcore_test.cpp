// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "gradcheck.hpp"
#include "vampdiff/error.hpp"
#include "vampdiff/numcore/dft.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace {

using namespace vampdiff;
using nc::Tensor;
using check::gradcheck;
using check::project;
using check::random_tensor;

constexpr int kTrials = 50;
constexpr double kTol = 1e-4;

Tensor vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor::from_vector({n}, std::move(v));
}

void expect_values(const Tensor& t, const std::vector<double>& want, double tol = 1e-12) {
  ASSERT_EQ(t.numel(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(t.at(i), want[i], tol) << "index " << i;
}

// ---------------------------------------------------------------- conv1d

TEST(Conv1d, IdentityKernel) {
  auto x = Tensor::from_vector({1, 1, 3}, {1, 2, 3});
  auto k = Tensor::from_vector({1, 1, 1}, {1});
  expect_values(nc::conv1d(x, k, Tensor()), {1, 2, 3});
}

TEST(Conv1d, BoxSumStrideTwo) {
  auto x = Tensor::from_vector({1, 1, 4}, {1, 1, 1, 1});
  auto k = Tensor::from_vector({1, 1, 2}, {1, 1});
  auto y = nc::conv1d(x, k, Tensor(), {.stride = 2});
  EXPECT_EQ(y.shape(), (nc::Shape{1, 1, 2}));
  expect_values(y, {2, 2});
}

TEST(Conv1d, OutputLengthFormula) {
  for (std::size_t len : {5, 8, 17}) {
    for (std::size_t k : {1, 3, 5}) {
      for (std::size_t s : {1, 2, 3}) {
        for (std::size_t d : {1, 2}) {
          for (std::size_t p : {0, 1, 2}) {
            if (len + 2 * p < d * (k - 1) + 1) continue;
            const std::size_t want = (len + 2 * p - d * (k - 1) - 1) / s + 1;
            EXPECT_EQ(nc::conv1d_output_length(len, k, {s, d, p}), want);
          }
        }
      }
    }
  }
}

TEST(Conv1d, MatchesDirectSum) {
  Rng rng(11);
  auto x = random_tensor(rng, {2, 3, 13}, -2, 2, false);
  auto w = random_tensor(rng, {4, 3, 3}, -2, 2, false);
  auto b = random_tensor(rng, {4}, -2, 2, false);
  const nc::Conv1dOptions opt{2, 2, 3};
  auto y = nc::conv1d(x, w, b, opt);
  const std::size_t out_len = y.dim(2);
  for (std::size_t bi = 0; bi < 2; ++bi) {
    for (std::size_t co = 0; co < 4; ++co) {
      for (std::size_t o = 0; o < out_len; ++o) {
        double acc = b.at(co);
        for (std::size_t ci = 0; ci < 3; ++ci) {
          for (std::size_t k = 0; k < 3; ++k) {
            const long pos = static_cast<long>(o * 2 + k * 2) - 3;
            if (pos < 0 || pos >= 13) continue;
            acc += w.at((co * 3 + ci) * 3 + k) * x.at((bi * 3 + ci) * 13 + static_cast<std::size_t>(pos));
          }
        }
        EXPECT_NEAR(y.at((bi * 4 + co) * out_len + o), acc, 1e-12);
      }
    }
  }
}

TEST(Conv1d, ChannelMismatchNamesAxis) {
  auto x = Tensor::zeros({1, 2, 8});
  auto k = Tensor::zeros({1, 3, 3});
  try {
    nc::conv1d(x, k, Tensor());
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("axis 1"), std::string::npos);
  }
}

TEST(Conv1d, GradientMatchesFiniteDifferences) {
  const nc::Conv1dOptions options[] = {{1, 2, 0}, {2, 1, 2}, {1, 1, 2}, {2, 2, 3}};
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(100 + trial);
    const auto& opt = options[trial % 4];
    auto x = random_tensor(rng, {2, 3, 16});
    auto w = random_tensor(rng, {2, 3, 5});
    auto b = random_tensor(rng, {2});
    auto res = gradcheck(
        [&](const std::vector<Tensor>& v) { return project(nc::conv1d(v[0], v[1], v[2], opt), 7); }, {x, w, b});
    EXPECT_LT(res.max_rel, kTol) << "trial " << trial;
  }
}

// ---------------------------------------------------------------- linear

TEST(Linear, IdentityWeight) {
  auto x = Tensor::from_vector({2, 3}, {1, 2, 3, 4, 5, 6});
  auto w = Tensor::from_vector({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  auto b = Tensor::zeros({3});
  expect_values(nc::linear(x, w, b), x.to_vector());
}

TEST(Linear, HandComputation) {
  auto y = nc::linear(Tensor::from_vector({1, 2}, {1, 2}), Tensor::from_vector({1, 2}, {3, 4}), vec({5}));
  expect_values(y, {16});
}

TEST(Linear, InnerMismatch) {
  EXPECT_THROW(nc::linear(Tensor::zeros({1, 3}), Tensor::zeros({2, 4}), Tensor::zeros({2})), DimensionError);
}

TEST(Linear, GradientMatchesFiniteDifferences) {
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(200 + trial);
    auto x = random_tensor(rng, {4, 8});
    auto w = random_tensor(rng, {3, 8});
    auto b = random_tensor(rng, {3});
    auto res = gradcheck([](const std::vector<Tensor>& v) { return project(nc::linear(v[0], v[1], v[2]), 3); },
                         {x, w, b});
    EXPECT_LT(res.max_rel, kTol) << "trial " << trial;
  }
}

// ----------------------------------------------------------- elementwise

TEST(Elementwise, SiluAtZero) { EXPECT_EQ(nc::silu(vec({0.0})).item(), 0.0); }

TEST(Elementwise, Log1pOfEMinusOne) { EXPECT_NEAR(nc::log1p(vec({std::numbers::e - 1})).item(), 1.0, 1e-15); }

TEST(Elementwise, DomainErrors) {
  EXPECT_THROW(nc::log1p(vec({-1.5})), DomainError);
  EXPECT_THROW(nc::sqrt(vec({-0.1})), DomainError);
  EXPECT_THROW(nc::log(vec({0.0})), DomainError);
}

TEST(Elementwise, Broadcasting) {
  auto a = Tensor::from_vector({2, 3}, {1, 2, 3, 4, 5, 6});
  expect_values(nc::add(a, vec({10, 20, 30})), {11, 22, 33, 14, 25, 36});
  expect_values(nc::mul(a, Tensor::from_vector({2, 1}, {2, 3})), {2, 4, 6, 12, 15, 18});
  EXPECT_THROW(nc::add(a, vec({1, 2})), DimensionError);
}

struct UnaryCase {
  const char* name;
  std::function<Tensor(const Tensor&)> fn;
  double lo;
  double hi;
};

TEST(Elementwise, UnaryGradients) {
  const std::vector<UnaryCase> cases = {
      {"silu", [](const Tensor& t) { return nc::silu(t); }, -2, 2},
      {"exp", [](const Tensor& t) { return nc::exp(t); }, -2, 2},
      {"log1p", [](const Tensor& t) { return nc::log1p(t); }, -0.9, 2},
      {"square", [](const Tensor& t) { return nc::square(t); }, -2, 2},
      {"sqrt", [](const Tensor& t) { return nc::sqrt(t); }, 0.1, 2},
      {"negate", [](const Tensor& t) { return nc::neg(t); }, -2, 2},
      {"scale", [](const Tensor& t) { return nc::scale(t, -1.7); }, -2, 2},
      {"sigmoid", [](const Tensor& t) { return nc::sigmoid(t); }, -2, 2},
      {"log", [](const Tensor& t) { return nc::log(t); }, 0.1, 2},
      {"smooth_l1", [](const Tensor& t) { return nc::smooth_l1_elem(t); }, -2, 2},
  };
  for (const auto& c : cases) {
    for (int trial = 0; trial < kTrials; ++trial) {
      Rng rng(300 + trial);
      auto x = random_tensor(rng, {2, 7}, c.lo, c.hi);
      auto res = gradcheck([&](const std::vector<Tensor>& v) { return project(c.fn(v[0]), 5); }, {x});
      EXPECT_LT(res.max_rel, kTol) << c.name << " trial " << trial;
    }
  }
}

TEST(Elementwise, BinaryGradientsWithBroadcast) {
  using Bin = std::function<Tensor(const Tensor&, const Tensor&)>;
  const std::vector<std::pair<const char*, Bin>> cases = {
      {"add", [](const Tensor& a, const Tensor& b) { return nc::add(a, b); }},
      {"sub", [](const Tensor& a, const Tensor& b) { return nc::sub(a, b); }},
      {"mul", [](const Tensor& a, const Tensor& b) { return nc::mul(a, b); }},
      {"div", [](const Tensor& a, const Tensor& b) { return nc::div(a, nc::add_scalar(nc::square(b), 0.5)); }},
  };
  const std::vector<std::pair<nc::Shape, nc::Shape>> shapes = {
      {{2, 7}, {2, 7}}, {{2, 7}, {7}}, {{2, 7}, {2, 1}}, {{3, 1, 4}, {2, 4}}};
  for (const auto& [name, fn] : cases) {
    for (int trial = 0; trial < kTrials; ++trial) {
      Rng rng(400 + trial);
      const auto& [sa, sb] = shapes[trial % shapes.size()];
      auto a = random_tensor(rng, sa);
      auto b = random_tensor(rng, sb);
      auto res = gradcheck([&](const std::vector<Tensor>& v) { return project(fn(v[0], v[1]), 9); }, {a, b});
      EXPECT_LT(res.max_rel, kTol) << name << " trial " << trial;
    }
  }
}

TEST(Elementwise, ClampGradientInsideOnly) {
  auto x = Tensor::from_vector({4}, {-3.0, -0.5, 0.5, 3.0}, true);
  nc::backward(nc::sum(nc::clamp(x, -1.0, 1.0)));
  expect_values(Tensor::from_vector({4}, std::vector<double>(x.grad().begin(), x.grad().end())), {0, 1, 1, 0});
}

// ------------------------------------------------------------ reductions

TEST(Reduce, StdConstantIsZero) { EXPECT_EQ(nc::std_dev(vec({1, 1, 1, 1})).item(), 0.0); }

TEST(Reduce, StdPopulation) { EXPECT_DOUBLE_EQ(nc::std_dev(vec({0, 2})).item(), 1.0); }

TEST(Reduce, StdZeroGradientAtZeroVariance) {
  auto x = Tensor::from_vector({3}, {2, 2, 2}, true);
  nc::backward(nc::std_dev(x));
  for (double g : x.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Reduce, MaxMinTieRoutesToFirstIndex) {
  auto x = Tensor::from_vector({3}, {3, 1, 3}, true);
  nc::backward(nc::max(x));
  EXPECT_EQ(std::vector<double>(x.grad().begin(), x.grad().end()), (std::vector<double>{1, 0, 0}));
  auto y = Tensor::from_vector({3}, {1, 3, 1}, true);
  nc::backward(nc::min(y));
  EXPECT_EQ(std::vector<double>(y.grad().begin(), y.grad().end()), (std::vector<double>{1, 0, 0}));
}

TEST(Reduce, MaxGradientIsOneHotOfFirstMaximum) {
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(500 + trial);
    std::vector<double> v(9);
    for (auto& e : v) e = static_cast<double>(rng.index(4));
    auto x = Tensor::from_vector({9}, v, true);
    nc::backward(nc::max(x));
    const auto first = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(x.grad()[i], i == first ? 1.0 : 0.0);
  }
}

TEST(Reduce, AxesAndKeepdims) {
  auto a = Tensor::from_vector({2, 3}, {1, 2, 3, 4, 5, 6});
  auto s0 = nc::sum(a, {0});
  EXPECT_EQ(s0.shape(), (nc::Shape{3}));
  expect_values(s0, {5, 7, 9});
  auto m1 = nc::mean(a, {1}, true);
  EXPECT_EQ(m1.shape(), (nc::Shape{2, 1}));
  expect_values(m1, {2, 5});
  expect_values(nc::max(a, {1}), {3, 6});
  expect_values(nc::min(a, {0}), {1, 2, 3});
  EXPECT_THROW(nc::sum(a, {2}), DimensionError);
}

TEST(Reduce, LogsumexpIsStable) {
  auto x = Tensor::from_vector({1, 3}, {1000.0, 1000.0, 1000.0});
  EXPECT_NEAR(nc::logsumexp(x, 1).item(), 1000.0 + std::log(3.0), 1e-9);
}

TEST(Reduce, Gradients) {
  using Red = std::function<Tensor(const Tensor&)>;
  const std::vector<std::pair<const char*, Red>> cases = {
      {"sum", [](const Tensor& t) { return nc::sum(t, {1}); }},
      {"mean", [](const Tensor& t) { return nc::mean(t, {0, 2}, true); }},
      {"max", [](const Tensor& t) { return nc::max(t, {2}); }},
      {"min", [](const Tensor& t) { return nc::min(t); }},
      {"std", [](const Tensor& t) { return nc::std_dev(t, {2}); }},
      {"logsumexp", [](const Tensor& t) { return nc::logsumexp(t, 1); }},
  };
  for (const auto& [name, fn] : cases) {
    for (int trial = 0; trial < kTrials; ++trial) {
      Rng rng(600 + trial);
      auto x = random_tensor(rng, {2, 3, 5});
      auto res = gradcheck([&](const std::vector<Tensor>& v) { return project(fn(v[0]), 13); }, {x});
      EXPECT_LT(res.max_rel, kTol) << name << " trial " << trial;
    }
  }
}

// ------------------------------------------------------------- groupnorm

TEST(GroupNorm, ConstantInputGivesZeros) {
  auto y = nc::groupnorm(Tensor::full({2, 4, 6}, 3.5), 2, Tensor::full({4}, 1.0), Tensor::zeros({4}));
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(GroupNorm, GroupStatistics) {
  Rng rng(7);
  auto x = random_tensor(rng, {2, 6, 10}, -2, 2, false);
  const double eps = 1e-5;
  auto y = nc::groupnorm(x, 3, Tensor::full({6}, 1.0), Tensor::zeros({6}), eps);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t g = 0; g < 3; ++g) {
      double mu = 0.0;
      double var_x = 0.0;
      double mu_x = 0.0;
      for (std::size_t i = 0; i < 20; ++i) {
        mu += y.at(b * 60 + g * 20 + i);
        mu_x += x.at(b * 60 + g * 20 + i);
      }
      mu /= 20;
      mu_x /= 20;
      double var = 0.0;
      for (std::size_t i = 0; i < 20; ++i) {
        var += std::pow(y.at(b * 60 + g * 20 + i) - mu, 2);
        var_x += std::pow(x.at(b * 60 + g * 20 + i) - mu_x, 2);
      }
      var /= 20;
      var_x /= 20;
      EXPECT_LT(std::abs(mu), 1e-10);
      EXPECT_NEAR(var, var_x / (var_x + eps), 1e-12);
    }
  }
}

TEST(GroupNorm, Divisibility) {
  EXPECT_THROW(nc::groupnorm(Tensor::zeros({1, 6, 4}), 4, Tensor::zeros({6}), Tensor::zeros({6})), ParameterError);
}

TEST(GroupNorm, GradientMatchesFiniteDifferences) {
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(700 + trial);
    auto x = random_tensor(rng, {2, 4, 6});
    auto g = random_tensor(rng, {4});
    auto b = random_tensor(rng, {4});
    auto res = gradcheck(
        [](const std::vector<Tensor>& v) { return project(nc::groupnorm(v[0], 2, v[1], v[2]), 17); }, {x, g, b});
    EXPECT_LT(res.max_rel, kTol) << "trial " << trial;
  }
}

// ------------------------------------------------------------------ rdft

TEST(Rdft, OnesIsDcOnly) {
  auto s = nc::rdft(Tensor::full({1, 8}, 1.0));
  expect_values(s.real, {8, 0, 0, 0, 0}, 1e-12);
  expect_values(s.imag, {0, 0, 0, 0, 0}, 1e-12);
}

TEST(Rdft, SingleBinCosine) {
  std::vector<double> x(8);
  for (std::size_t n = 0; n < 8; ++n) x[n] = std::cos(2 * std::numbers::pi * static_cast<double>(n) / 8.0);
  auto s = nc::rdft(Tensor::from_vector({1, 8}, x));
  expect_values(s.real, {0, 4, 0, 0, 0}, 1e-12);
  expect_values(s.imag, {0, 0, 0, 0, 0}, 1e-12);
}

TEST(Rdft, MatchesBasisMatrix) {
  for (std::size_t len : {4, 8, 31, 32, 257, 1024}) {
    Rng rng(len);
    auto x = random_tensor(rng, {2, len}, -2, 2, false);
    auto s = nc::rdft(x);
    const std::size_t bins = len / 2 + 1;
    double worst = 0.0;
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t f = 0; f < bins; ++f) {
        std::complex<double> acc = 0.0;
        for (std::size_t n = 0; n < len; ++n) {
          const double angle = -2.0 * std::numbers::pi * static_cast<double>(f * n) / static_cast<double>(len);
          acc += x.at(b * len + n) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        worst = std::max(worst, std::abs(acc.real() - s.real.at(b * bins + f)));
        worst = std::max(worst, std::abs(acc.imag() - s.imag.at(b * bins + f)));
      }
    }
    EXPECT_LT(worst, 1e-8) << "L=" << len;
  }
}

TEST(Rdft, InverseRoundTrip) {
  for (std::size_t len : {7, 16}) {
    Rng rng(len);
    std::vector<double> x(len);
    for (auto& v : x) v = rng.uniform(-1, 1);
    std::vector<double> re(len / 2 + 1);
    std::vector<double> im(len / 2 + 1);
    nc::dft::forward_real(x, re, im);
    auto back = nc::dft::inverse_real(re, im, len);
    for (std::size_t i = 0; i < len; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  }
}

TEST(Rdft, GradientThroughLogMagnitude) {
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(800 + trial);
    const std::size_t len = trial % 2 ? 31 : 32;
    auto x = random_tensor(rng, {2, len});
    auto res = gradcheck(
        [](const std::vector<Tensor>& v) {
          auto s = nc::rdft(v[0]);
          auto mag = nc::sqrt(nc::add_scalar(nc::add(nc::square(s.real), nc::square(s.imag)), 1e-24));
          return project(nc::log1p(mag), 19);
        },
        {x});
    EXPECT_LT(res.max_rel, kTol) << "trial " << trial;
  }
}

// ------------------------------------------------------- resample_linear

TEST(Resample, IdentityIsBitExact) {
  Rng rng(3);
  auto x = random_tensor(rng, {2, 3, 9}, -2, 2, false);
  EXPECT_EQ(nc::resample_linear(x, 9).to_vector(), x.to_vector());
}

TEST(Resample, Midpoint) { expect_values(nc::resample_linear(Tensor::from_vector({1, 1, 2}, {0, 2}), 3), {0, 1, 2}); }

TEST(Resample, SingleSampleInput) {
  expect_values(nc::resample_linear(Tensor::from_vector({1, 1, 1}, {4}), 3), {4, 4, 4});
}

TEST(Resample, GradientMatchesFiniteDifferences) {
  const std::size_t targets[] = {3, 17, 5, 24, 1};
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(900 + trial);
    auto x = random_tensor(rng, {2, 3, 8});
    const std::size_t out_len = targets[trial % 5];
    auto res = gradcheck([&](const std::vector<Tensor>& v) { return project(nc::resample_linear(v[0], out_len), 23); },
                         {x});
    EXPECT_LT(res.max_rel, kTol) << "trial " << trial;
  }
}

// ------------------------------------------------------------- shape ops

TEST(Shape, SliceAndReshapeGradients) {
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(1000 + trial);
    auto x = random_tensor(rng, {3, 4, 5});
    auto res = gradcheck(
        [](const std::vector<Tensor>& v) { return project(nc::reshape(nc::slice(v[0], 1, 1, 3), {6, 5}), 29); }, {x});
    EXPECT_LT(res.max_rel, kTol);
  }
}

// -------------------------------------------------------------- backward

TEST(Backward, SumGivesOnes) {
  auto x = Tensor::from_vector({4}, {1, -2, 3, 0.5}, true);
  nc::backward(nc::sum(x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, HalfSquaredNormGivesX) {
  auto x = Tensor::from_vector({3}, {1, -2, 3}, true);
  nc::backward(nc::scale(nc::sum(nc::square(x)), 0.5));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x.grad()[i], x.at(i));
}

TEST(Backward, RepeatedCallsAccumulate) {
  auto x = Tensor::from_vector({2}, {1, 2}, true);
  auto loss = nc::sum(nc::scale(x, 3.0));
  nc::backward(loss);
  nc::backward(loss);
  EXPECT_EQ(x.grad()[0], 6.0);
  EXPECT_EQ(x.grad()[1], 6.0);
}

TEST(Backward, NonScalarRootIsUsageError) {
  auto x = Tensor::from_vector({2}, {1, 2}, true);
  EXPECT_THROW(nc::backward(nc::scale(x, 2.0)), UsageError);
  EXPECT_THROW(nc::backward(nc::sum(Tensor::from_vector({2}, {1, 2}))), UsageError);
}

TEST(Backward, SharedLeafSumsPathGradients) {
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(1100 + trial);
    auto x = random_tensor(rng, {2, 5});
    auto res = gradcheck(
        [](const std::vector<Tensor>& v) {
          auto a = nc::silu(v[0]);
          auto b = nc::mul(v[0], nc::exp(nc::scale(v[0], 0.3)));
          return nc::add(project(a, 1), project(b, 2));
        },
        {x});
    EXPECT_LT(res.max_rel, kTol);
  }
}

TEST(Backward, NoGradGuardRecordsNothing) {
  auto x = Tensor::from_vector({2}, {1, 2}, true);
  nc::NoGradGuard guard;
  auto y = nc::sum(nc::square(x));
  EXPECT_FALSE(y.requires_grad());
}

}  // namespace
