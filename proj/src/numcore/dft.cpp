// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/numcore/dft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "vampdiff/error.hpp"

namespace vampdiff::nc::dft {

namespace {

// cos/sin of 2 pi m / L for m in [0, L). Basis entries are looked up by
// (f * n) mod L, so only one period is stored.
struct Twiddles {
  std::vector<double> cos;
  std::vector<double> sin;
};

std::shared_ptr<const Twiddles> twiddles(std::size_t length) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const Twiddles>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(length);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<Twiddles>();
  table->cos.resize(length);
  table->sin.resize(length);
  for (std::size_t m = 0; m < length; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(length);
    table->cos[m] = std::cos(angle);
    table->sin[m] = std::sin(angle);
  }
  cache.emplace(length, table);
  return table;
}

}  // namespace

void forward_real(std::span<const double> x, std::span<double> re, std::span<double> im) {
  const std::size_t n_len = x.size();
  const std::size_t bins = num_bins(n_len);
  if (n_len < 2) throw DimensionError("rdft needs length >= 2");
  if (re.size() != bins || im.size() != bins) throw DimensionError("rdft output buffers have wrong size");
  const auto tw = twiddles(n_len);
  for (std::size_t f = 0; f < bins; ++f) {
    double acc_re = 0.0;
    double acc_im = 0.0;
    std::size_t idx = 0;
    for (std::size_t n = 0; n < n_len; ++n) {
      acc_re += x[n] * tw->cos[idx];
      acc_im -= x[n] * tw->sin[idx];
      idx += f;
      if (idx >= n_len) idx -= n_len;
    }
    re[f] = acc_re;
    im[f] = acc_im;
  }
}

void adjoint_real(std::span<const double> grad_re, std::span<const double> grad_im, std::span<double> gx) {
  const std::size_t n_len = gx.size();
  const std::size_t bins = num_bins(n_len);
  if (grad_re.size() != bins || grad_im.size() != bins) throw DimensionError("rdft adjoint buffers have wrong size");
  const auto tw = twiddles(n_len);
  for (std::size_t f = 0; f < bins; ++f) {
    const double gr = grad_re[f];
    const double gi = grad_im[f];
    if (gr == 0.0 && gi == 0.0) continue;
    std::size_t idx = 0;
    for (std::size_t n = 0; n < n_len; ++n) {
      gx[n] += gr * tw->cos[idx] - gi * tw->sin[idx];
      idx += f;
      if (idx >= n_len) idx -= n_len;
    }
  }
}

std::vector<double> inverse_real(std::span<const double> re, std::span<const double> im, std::size_t length) {
  const std::size_t bins = num_bins(length);
  if (re.size() != bins || im.size() != bins) throw DimensionError("inverse rdft buffers have wrong size");
  const auto tw = twiddles(length);
  std::vector<double> out(length, re[0]);
  for (std::size_t f = 1; f < bins; ++f) {
    const bool nyquist = (length % 2 == 0) && (f == length / 2);
    const double weight = nyquist ? 1.0 : 2.0;
    const double a = weight * re[f];
    const double b = nyquist ? 0.0 : weight * im[f];
    if (a == 0.0 && b == 0.0) continue;
    std::size_t idx = 0;
    for (std::size_t n = 0; n < length; ++n) {
      out[n] += a * tw->cos[idx] - b * tw->sin[idx];
      idx += f;
      if (idx >= length) idx -= length;
    }
  }
  const double inv = 1.0 / static_cast<double>(length);
  for (auto& v : out) v *= inv;
  return out;
}

}  // namespace vampdiff::nc::dft
