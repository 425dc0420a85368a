#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svae/config.hpp"
#include "svae/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  long long seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value configuration file");
  cmd->add_option("--set", flags.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--threads", flags.threads, "worker threads (1 = bit-reproducible)");
}

svae::app::RunConfig build_config(const CommonFlags& flags) {
  svae::app::RunConfig cfg;
  if (!flags.config_path.empty()) cfg = svae::app::RunConfig::from_file(flags.config_path);
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw svae::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.threads > 0) cfg.threads = flags.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timewise variational trajectory predictor"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, predict_flags, sweep_flags, latent_flags, baseline_flags;
  std::string resume_path, ckpt_eval, ckpt_predict, ckpt_sweep, ckpt_latent;

  auto* train = app.add_subcommand("train", "train a model and write checkpoints");
  add_common(train, train_flags);
  train->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* eval = app.add_subcommand("eval", "best-of-K ADE/FDE and NLL on the test split");
  add_common(eval, eval_flags);
  eval->add_option("--checkpoint", ckpt_eval, "model checkpoint")->required();

  auto* predict = app.add_subcommand("predict", "export samples, heatmaps, attention maps");
  add_common(predict, predict_flags);
  predict->add_option("--checkpoint", ckpt_predict, "model checkpoint")->required();

  auto* sweep = app.add_subcommand("fpc-sweep", "ADE/FDE across FPC sampling rates");
  add_common(sweep, sweep_flags);
  sweep->add_option("--checkpoint", ckpt_sweep, "model checkpoint")->required();

  auto* latent = app.add_subcommand("latent-dump",
                                    "prior latent samples for synthetic observations");
  add_common(latent, latent_flags);
  latent->add_option("--checkpoint", ckpt_latent, "model checkpoint")->required();

  auto* baseline = app.add_subcommand("baseline", "constant-velocity baseline metrics");
  add_common(baseline, baseline_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const auto cfg = build_config(train_flags);
      const auto result = svae::app::run_train(cfg, resume_path);
      std::cout << "trained " << result.steps << " steps; loss " << result.first_loss << " -> "
                << result.final_loss << "\ncheckpoint: " << result.checkpoint_path << "\n";
    } else if (eval->parsed()) {
      const auto cfg = build_config(eval_flags);
      const auto out = svae::app::run_eval(cfg, ckpt_eval);
      std::cout << out.report.to_json() << "\n";
      std::cout << "wrote " << cfg.out_dir << "/metrics.json and metrics.csv\n";
    } else if (predict->parsed()) {
      const auto cfg = build_config(predict_flags);
      svae::app::run_predict(cfg, ckpt_predict);
      std::cout << "wrote samples.csv, heatmap_*.csv, attention.jsonl under " << cfg.out_dir
                << "\n";
    } else if (sweep->parsed()) {
      const auto cfg = build_config(sweep_flags);
      const auto rows = svae::app::run_fpc_sweep(cfg, ckpt_sweep);
      for (const auto& r : rows) {
        std::cout << "rate " << r.rate << ": ade " << r.ade << " (" << r.ade_rel << "x), fde "
                  << r.fde << " (" << r.fde_rel << "x)\n";
      }
      std::cout << "wrote " << cfg.out_dir << "/fpc_sweep.csv\n";
    } else if (latent->parsed()) {
      const auto cfg = build_config(latent_flags);
      svae::app::run_latent_dump(cfg, ckpt_latent);
      std::cout << "wrote " << cfg.out_dir << "/latents.csv\n";
    } else if (baseline->parsed()) {
      const auto cfg = build_config(baseline_flags);
      const auto report = svae::app::run_baseline(cfg);
      std::cout << report.to_json() << "\n";
      std::cout << "wrote " << cfg.out_dir << "/baseline_metrics.json and .csv\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
