// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vampdiff/cli/commands.hpp"
#include "vampdiff/error.hpp"

namespace {

using namespace vampdiff;

struct ConfigSource {
  std::string path;
  std::string profile = "desk";
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", path, "JSON run configuration");
    cmd->add_option("--profile", profile, "defaults when no config is given")->check(CLI::IsMember({"desk", "full"}));
    cmd->add_option("--seed", seed, "overrides the configured seed");
  }

  cli::RunConfig load() const {
    auto c = path.empty() ? cli::RunConfig::defaults(cli::profile_from_string(profile)) : cli::load_config(path);
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }
};

void log_line(const std::string& s) { std::cerr << s << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vampdiff: variational diffusion model for PPG"};
  app.require_subcommand(1);

  ConfigSource train_cfg;
  cli::TrainArgs train_args;
  std::string train_log;
  auto* train = app.add_subcommand("train", "fit a model and write a checkpoint plus training log");
  train_cfg.attach(train);
  train->add_option("--data", train_args.data, "dataset directory (uses train/ when present)")->required();
  train->add_option("--out", train_args.out, "checkpoint path")->required();
  train->add_option("--log", train_log, "training log CSV (default <out>.log.csv)");
  train->add_flag("--rr-estimator", train_args.rr_estimator, "also train the respiratory-rate estimator");

  cli::GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "draw unconditional samples");
  gen->add_option("--ckpt", gen_args.ckpt)->required();
  gen->add_option("--num", gen_args.num)->required();
  gen->add_option("--seed", gen_args.seed)->required();
  gen->add_option("--out", gen_args.out)->required();

  cli::ReconstructArgs rec_args;
  std::optional<std::uint64_t> rec_seed;
  auto* rec = app.add_subcommand("reconstruct", "posterior-mean reconstructions with per-window metrics");
  rec->add_option("--ckpt", rec_args.ckpt)->required();
  rec->add_option("--data", rec_args.data)->required();
  rec->add_option("--out", rec_args.out)->required();
  rec->add_option("--seed", rec_seed);

  cli::EvaluateArgs ev_args;
  std::optional<std::size_t> ev_gen_n;
  std::optional<std::uint64_t> ev_seed;
  std::string ev_generated;
  auto* ev = app.add_subcommand("evaluate", "write reconstruction, generation, anomaly and RR reports");
  ev->add_option("--ckpt", ev_args.ckpt)->required();
  ev->add_option("--data", ev_args.data)->required();
  ev->add_option("--report", ev_args.report)->required();
  ev->add_option("--gen-n", ev_gen_n, "number of generated samples");
  ev->add_option("--seed", ev_seed);
  ev->add_option("--generated", ev_generated, "score windows from this CSV instead of sampling");

  ConfigSource cor_cfg;
  cli::CorruptArgs cor_args;
  auto* cor = app.add_subcommand("corrupt", "build a corruption benchmark");
  cor->add_option("--config", cor_cfg.path);
  cor->add_option("--profile", cor_cfg.profile)->check(CLI::IsMember({"desk", "full"}));
  cor->add_option("--data", cor_args.data)->required();
  cor->add_option("--spec", cor_args.spec, "corruption JSON")->required();
  cor->add_option("--seed", cor_args.seed)->required();
  cor->add_option("--out", cor_args.out)->required();

  cli::InterpolateArgs in_args;
  std::string alphas;
  std::optional<std::uint64_t> in_seed;
  auto* in = app.add_subcommand("interpolate", "decode along a latent interpolation");
  in->add_option("--ckpt", in_args.ckpt)->required();
  in->add_option("--lo", in_args.lo, "FILE[:START] low-HR window")->required();
  in->add_option("--hi", in_args.hi, "FILE[:START] high-HR window")->required();
  in->add_option("--alphas", alphas, "comma-separated list")->required();
  in->add_option("--seed", in_seed);
  in->add_option("--out", in_args.out)->required();

  ConfigSource syn_cfg;
  cli::SynthArgs syn_args;
  auto* syn = app.add_subcommand("synth", "write a synthetic dataset split by patient");
  syn_cfg.attach(syn);
  syn->add_option("--out", syn_args.out)->required();

  auto* dump = app.add_subcommand("config", "print the default configuration of a profile");
  std::string dump_profile = "desk";
  dump->add_option("--profile", dump_profile)->check(CLI::IsMember({"desk", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      train_args.config = train_cfg.load();
      if (!train_log.empty()) train_args.log = train_log;
      cli::run_train(train_args, log_line);
    } else if (*gen) {
      cli::run_generate(gen_args, log_line);
    } else if (*rec) {
      rec_args.seed = rec_seed;
      cli::run_reconstruct(rec_args, log_line);
    } else if (*ev) {
      ev_args.gen_n = ev_gen_n;
      ev_args.seed = ev_seed;
      if (!ev_generated.empty()) ev_args.generated = ev_generated;
      cli::run_evaluate(ev_args, log_line);
    } else if (*cor) {
      cor_args.config = cor_cfg.load();
      cli::run_corrupt(cor_args, log_line);
    } else if (*in) {
      in_args.alphas = cli::parse_alphas(alphas);
      in_args.seed = in_seed;
      cli::run_interpolate(in_args, log_line);
    } else if (*syn) {
      syn_args.config = syn_cfg.load();
      cli::run_synth(syn_args, log_line);
    } else if (*dump) {
      std::cout << cli::dump_config(cli::RunConfig::defaults(cli::profile_from_string(dump_profile)));
    }
  } catch (const Error& e) {
    std::cerr << "error: category=" << e.category() << " message=" << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: category=internal message=" << e.what() << '\n';
    return 1;
  }
  return 0;
}
