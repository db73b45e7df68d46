// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/vamp/unet.hpp"

#include <cmath>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/ops.hpp"

namespace vampdiff::vamp {

namespace {

UNet::ResBlock make_block(Rng& rng, std::size_t channels, std::size_t time_dim) {
  UNet::ResBlock b;
  b.norm1 = GroupNorm::create(channels);
  b.conv1 = Conv1d::same(rng, channels, channels, 3);
  b.time_proj = Linear::create(rng, time_dim, channels);
  b.norm2 = GroupNorm::create(channels);
  b.conv2 = Conv1d::same(rng, channels, channels, 3);
  return b;
}

struct Film {
  nc::Tensor gamma;
  nc::Tensor beta;
};

nc::Tensor res_block(const UNet::ResBlock& b, const nc::Tensor& x, const nc::Tensor& temb, const Film& film) {
  auto h = b.conv1(nc::silu(b.norm1(x)));
  auto t = b.time_proj(temb);
  h = nc::add(h, nc::reshape(t, {t.dim(0), t.dim(1), 1}));
  h = b.norm2(h);
  h = nc::add(nc::mul(film.gamma, h), film.beta);
  h = b.conv2(nc::silu(h));
  return nc::add(x, h);
}

void collect_block(const UNet::ResBlock& b, ParamList& out, const std::string& prefix) {
  b.norm1.collect(out, prefix + ".norm1");
  b.conv1.collect(out, prefix + ".conv1");
  b.time_proj.collect(out, prefix + ".time_proj");
  b.norm2.collect(out, prefix + ".norm2");
  b.conv2.collect(out, prefix + ".conv2");
}

}  // namespace

nc::Tensor timestep_embedding(const std::vector<std::size_t>& t, std::size_t dim) {
  const std::size_t half = dim / 2;
  std::vector<double> out(t.size() * dim);
  for (std::size_t b = 0; b < t.size(); ++b) {
    for (std::size_t i = 0; i < half; ++i) {
      const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
      const double arg = static_cast<double>(t[b]) * freq;
      out[b * dim + i] = std::sin(arg);
      out[b * dim + half + i] = std::cos(arg);
    }
  }
  return nc::Tensor::from_vector({t.size(), dim}, std::move(out));
}

UNet::UNet(const ModelConfig& config, Rng& rng) : time_dim(config.time_dim), channels(config.widths()) {
  time_mlp1 = Linear::create(rng, time_dim, time_dim);
  time_mlp2 = Linear::create(rng, time_dim, time_dim);
  in_conv = Conv1d::same(rng, 1, channels[0], 3);
  for (std::size_t lvl = 0; lvl < 3; ++lvl) {
    for (std::size_t i = 0; i < config.blocks_per_level; ++i) down_blocks[lvl].push_back(make_block(rng, channels[lvl], time_dim));
    film[lvl] = Conv1d::create(rng, config.latent_channels, 2 * channels[lvl], 1);
    // gamma half of the bias emits 1, beta half emits 0.
    auto bias = film[lvl].bias.mutable_data();
    for (std::size_t c = 0; c < bias.size(); ++c) bias[c] = c < channels[lvl] ? 1.0 : 0.0;
  }
  for (std::size_t lvl = 0; lvl < 2; ++lvl) {
    downsample[lvl] = Conv1d::create(rng, channels[lvl], channels[lvl + 1], 3, {2, 1, 1});
    upsample[lvl] = Conv1d::same(rng, channels[lvl + 1], channels[lvl], 3);
    for (std::size_t i = 0; i < config.blocks_per_level; ++i) up_blocks[lvl].push_back(make_block(rng, channels[lvl], time_dim));
  }
  out_norm = GroupNorm::create(channels[0]);
  out_conv = Conv1d::same(rng, channels[0], 1, 3);
}

nc::Tensor UNet::predict_x0(const nc::Tensor& x_t, const std::vector<std::size_t>& t, const nc::Tensor& z) const {
  if (x_t.rank() != 3 || x_t.dim(1) != 1) throw DimensionError("predict_x0 expects x_t [B,1,L], got " + nc::shape_str(x_t.shape()));
  const std::size_t batch = x_t.dim(0);
  const std::size_t length = x_t.dim(2);
  if (length % 4 != 0) throw DimensionError("predict_x0: length must be divisible by 4");
  if (t.size() != batch) throw DimensionError("predict_x0: need one timestep per batch element");
  if (z.rank() != 3 || z.dim(0) != batch || z.dim(1) != film[0].weight.dim(1)) {
    throw DimensionError("predict_x0: latent " + nc::shape_str(z.shape()) + " does not match batch " +
                         std::to_string(batch) + " and " + std::to_string(film[0].weight.dim(1)) + " channels");
  }

  auto temb = time_mlp2(nc::silu(time_mlp1(timestep_embedding(t, time_dim))));
  temb = nc::silu(temb);

  const std::size_t lengths[3] = {length, length / 2, length / 4};
  Film films[3];
  for (std::size_t lvl = 0; lvl < 3; ++lvl) {
    auto gb = film[lvl](nc::resample_linear(z, lengths[lvl]));
    films[lvl] = {nc::slice(gb, 1, 0, channels[lvl]), nc::slice(gb, 1, channels[lvl], 2 * channels[lvl])};
  }

  auto h = in_conv(x_t);
  nc::Tensor skips[2];
  for (std::size_t lvl = 0; lvl < 3; ++lvl) {
    for (const auto& b : down_blocks[lvl]) h = res_block(b, h, temb, films[lvl]);
    if (lvl < 2) {
      skips[lvl] = h;
      h = downsample[lvl](h);
    }
  }
  for (std::size_t k = 2; k-- > 0;) {
    h = upsample[k](nc::resample_linear(h, lengths[k]));
    h = nc::add(h, skips[k]);
    for (const auto& b : up_blocks[k]) h = res_block(b, h, temb, films[k]);
  }
  return out_conv(nc::silu(out_norm(h)));
}

ParamList UNet::params() const {
  ParamList out;
  time_mlp1.collect(out, "unet.time_mlp1");
  time_mlp2.collect(out, "unet.time_mlp2");
  in_conv.collect(out, "unet.in_conv");
  for (std::size_t lvl = 0; lvl < 3; ++lvl) {
    for (std::size_t i = 0; i < down_blocks[lvl].size(); ++i) {
      collect_block(down_blocks[lvl][i], out, "unet.down" + std::to_string(lvl) + "." + std::to_string(i));
    }
    film[lvl].collect(out, "unet.film" + std::to_string(lvl));
  }
  for (std::size_t lvl = 0; lvl < 2; ++lvl) {
    downsample[lvl].collect(out, "unet.downsample" + std::to_string(lvl));
    upsample[lvl].collect(out, "unet.upsample" + std::to_string(lvl));
    for (std::size_t i = 0; i < up_blocks[lvl].size(); ++i) {
      collect_block(up_blocks[lvl][i], out, "unet.up" + std::to_string(lvl) + "." + std::to_string(i));
    }
  }
  out_norm.collect(out, "unet.out_norm");
  out_conv.collect(out, "unet.out_conv");
  return out;
}

}  // namespace vampdiff::vamp
