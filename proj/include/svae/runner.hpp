#ifndef SVAE_RUNNER_HPP
#define SVAE_RUNNER_HPP

#include <string>
#include <vector>

#include "svae/config.hpp"
#include "svae/metrics.hpp"
#include "svae/scene.hpp"
#include "svae/windows.hpp"

namespace svae::app {

struct TrainResult {
  std::int64_t steps = 0;
  double first_loss = 0;
  double final_loss = 0;
  std::string checkpoint_path;  // final checkpoint
};

// Mini-batch training over the train split. Writes out/loss.csv
// (step,loss,recon,kl), periodic checkpoints and out/ckpt_final.svae.
// Deterministic for a fixed seed; resuming from a periodic checkpoint
// reproduces the uninterrupted run.
TrainResult run_train(const RunConfig& cfg, const std::string& resume_path = "");

struct EvalOutputs {
  metrics::MetricReport report;  // base best-of-K (+NLL); FPC columns when enabled
  bool has_fpc = false;
};

// Best-of-K ADE/FDE (and KDE NLL) over the test split, with and without
// Final Position Clustering. Writes out/metrics.json and out/metrics.csv.
EvalOutputs run_eval(const RunConfig& cfg, const std::string& checkpoint_path);

// Constant-velocity baseline over the test split; same report formats.
metrics::MetricReport run_baseline(const RunConfig& cfg);

// Per-window sample CSV, predicted-distribution heatmap grids and attention
// weights (JSON lines) for the test split.
void run_predict(const RunConfig& cfg, const std::string& checkpoint_path);

struct SweepRow {
  int rate = 1;
  double ade = 0;
  double fde = 0;
  double ade_rel = 1.0;  // normalized by the rate-1 value
  double fde_rel = 1.0;
};

// ADE/FDE as a function of the FPC sampling rate; writes out/fpc_sweep.csv.
std::vector<SweepRow> run_fpc_sweep(const RunConfig& cfg, const std::string& checkpoint_path);

// Prior latent samples for a grid of synthetic constant-speed observations
// with a heading change midway; writes out/latents.csv.
void run_latent_dump(const RunConfig& cfg, const std::string& checkpoint_path);

// --- shared plumbing (exposed for tests) --------------------------------

std::vector<data::TrajectoryScene> load_scenes(const RunConfig& cfg);

// Applies the configured split; returns scenes whose ids land in the
// requested side ("train" or "test"). In leave-one-out mode split.test names
// the held-out scene.
std::vector<data::TrajectoryScene> split_side(const RunConfig& cfg,
                                              std::vector<data::TrajectoryScene> scenes,
                                              bool test_side);

std::vector<data::ObservationWindow> windows_for(const RunConfig& cfg,
                                                 const std::vector<data::TrajectoryScene>& scenes);

}  // namespace svae::app

#endif
