// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/encoder.hpp"

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::vamp {

Encoder::Encoder(const ModelConfig& config, Rng& rng) {
  const auto w = config.widths();
  stem = Conv1d::same(rng, 1, w[0], 7);
  down1 = Conv1d::create(rng, w[0], w[1], 5, {2, 1, 2});
  mid1 = Conv1d::same(rng, w[1], w[1], 3);
  down2 = Conv1d::create(rng, w[1], w[2], 5, {2, 1, 2});
  mid2 = Conv1d::same(rng, w[2], w[2], 3);
  head_mu = Conv1d::same(rng, w[2], config.latent_channels, 3);
  head_logvar = Conv1d::same(rng, w[2], config.latent_channels, 3);
  auto b = head_logvar.bias.mutable_data();
  for (auto& v : b) v += config.logvar_bias_init;
}

LatentPosterior Encoder::encode(const nc::Tensor& x0) const {
  if (x0.rank() != 3 || x0.dim(1) != 1) throw DimensionError("encode expects [B,1,L], got " + nc::shape_str(x0.shape()));
  if (x0.dim(2) % 4 != 0) throw DimensionError("encode: length " + std::to_string(x0.dim(2)) + " not divisible by 4");
  auto h = nc::silu(stem(x0));
  h = nc::silu(down1(h));
  h = nc::silu(mid1(h));
  h = nc::silu(down2(h));
  h = nc::silu(mid2(h));
  return {head_mu(h), nc::clamp(head_logvar(h), kLogvarMin, kLogvarMax)};
}

ParamList Encoder::params() const {
  ParamList out;
  stem.collect(out, "encoder.stem");
  down1.collect(out, "encoder.down1");
  mid1.collect(out, "encoder.mid1");
  down2.collect(out, "encoder.down2");
  mid2.collect(out, "encoder.mid2");
  head_mu.collect(out, "encoder.head_mu");
  head_logvar.collect(out, "encoder.head_logvar");
  return out;
}

nc::Tensor reparameterize(const LatentPosterior& post, const nc::Tensor& noise) {
  if (noise.shape() != post.mu.shape()) {
    throw DimensionError("reparameterize: noise " + nc::shape_str(noise.shape()) + " vs mu " +
                         nc::shape_str(post.mu.shape()));
  }
  return nc::add(post.mu, nc::mul(nc::exp(nc::scale(post.logvar, 0.5)), noise));
}

nc::Tensor pool(const nc::Tensor& z, std::size_t pooled_len) {
  if (z.rank() != 3) throw DimensionError("pool expects [B,C,T], got " + nc::shape_str(z.shape()));
  const std::size_t t = z.dim(2);
  if (pooled_len == 0 || t % pooled_len != 0) {
    throw DimensionError("pool: length " + std::to_string(t) + " not divisible by " + std::to_string(pooled_len));
  }
  if (pooled_len == t) return z;
  const std::size_t width = t / pooled_len;
  auto blocks = nc::reshape(z, {z.dim(0), z.dim(1), pooled_len, width});
  return nc::mean(blocks, {3});
}

}  // namespace vampdiff::vamp
