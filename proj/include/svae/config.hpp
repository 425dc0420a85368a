#ifndef SVAE_CONFIG_HPP
#define SVAE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "svae/model.hpp"
#include "svae/scene.hpp"
#include "svae/windows.hpp"

namespace svae::app {

// Flat key=value run configuration. Every field has a documented default;
// unknown keys are rejected. Values are plain text: numbers, true/false,
// comma-separated lists, "inf" for the unbounded radius.
struct RunConfig {
  // general
  std::uint64_t seed = 1;
  int threads = 1;
  std::string precision = "f32";  // f32 | f64
  std::string out_dir = "out";

  // data
  std::vector<std::string> data_files;
  std::string data_columns = "frame,id,x,y";
  double data_unit_scale = 1.0;
  double data_frame_dt = 0.4;     // seconds between consecutive frames
  double data_radius = 8.0;       // neighborhood radius in working units
  double data_mpd_horizon = 7.0;  // seconds
  bool data_interpolate_gaps = true;
  std::string data_window_cache;

  // split
  std::string split_mode = "fixed";  // fixed | loo
  std::vector<std::string> split_train;
  std::vector<std::string> split_test;

  // window
  int window_T = 8;
  int window_H = 12;
  int window_stride = 1;

  // model
  int model_embed_dim = 64;
  int model_obs_hidden = 256;
  int model_rnn_hidden = 256;
  int model_attn_dim = 32;
  int model_latent_dim = 32;
  int model_head_hidden = 64;
  double model_leaky_slope = 0.2;
  double model_logvar_min = -8.0;
  double model_logvar_max = 4.0;
  std::string model_kl_mode = "closed";  // closed | sample

  // train
  std::int64_t train_steps = 20000;
  int train_batch = 128;
  double train_lr = 3e-4;
  double train_beta1 = 0.9;
  double train_beta2 = 0.999;
  double train_eps = 1e-8;
  bool train_aug_flip = true;
  bool train_aug_rotate = true;
  int train_log_every = 50;
  int train_checkpoint_every = 1000;

  // eval
  int eval_k = 20;
  bool eval_fpc = true;
  int eval_fpc_rate = 50;  // oversampling multiplier, capped at 50
  bool eval_nll = true;
  int eval_nll_samples = 2000;
  std::string eval_best_mode = "independent";  // independent | joint
  bool eval_mean_only = false;

  // fpc clustering
  std::uint64_t fpc_seed = 7;
  int fpc_max_iters = 100;
  double fpc_tol = 1e-6;

  // baseline
  std::string baseline_velocity = "mean";  // mean | last

  // predict
  int predict_samples = 20;
  int predict_heatmap_samples = 2000;
  int predict_heatmap_res = 128;
  int predict_max_windows = 0;  // 0 = all

  // latent dump
  int latent_samples = 150;

  // fpc sweep
  std::string sweep_rates = "1-50";

  // --- operations -------------------------------------------------------

  // Sets one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  // Reads "key = value" lines ('#' comments, blank lines ignored).
  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text, const std::string& origin = "<config>");

  // Every key in registry order; parses back to an identical config.
  std::string to_text() const;

  // Validated views for the subsystems.
  model::ModelConfig model_config() const;
  data::WindowOptions window_options() const;
  data::ParseOptions parse_options() const;
  std::vector<int> sweep_rate_list() const;

  void validate() const;
};

}  // namespace svae::app

#endif
