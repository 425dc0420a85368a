#include "svae/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "svae/checkpoint.hpp"
#include "svae/errors.hpp"
#include "svae/fpc.hpp"
#include "svae/model.hpp"
#include "svae/random.hpp"

namespace svae::app {

namespace fs = std::filesystem;

namespace {

// Stream tags keeping the derived RNG families apart.
constexpr std::uint64_t kTagPerm = 0x7065726d;
constexpr std::uint64_t kTagAugment = 0x61756721;
constexpr std::uint64_t kTagNoise = 0x6e6f6973;
constexpr std::uint64_t kTagEval = 0x6576616c;
constexpr std::uint64_t kTagNll = 0x6e6c6c21;
constexpr std::uint64_t kTagLatent = 0x6c617421;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<int> epoch_permutation(std::size_t n, std::uint64_t seed, std::int64_t epoch) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RandomEngine rng(seed, kTagPerm, static_cast<std::uint64_t>(epoch));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)))]);
  }
  return perm;
}

template <class Real>
void save_checkpoint(const std::string& path, const RunConfig& cfg,
                     model::Model<Real>& model, const nn::Adam<Real>& adam, std::int64_t step) {
  ckpt::Container c;
  c.add_text("meta/config", cfg.to_text());
  c.add_scalar_i64("meta/step", step);
  c.add_scalar_i64("meta/adam_t", adam.t);
  model.save_blocks(c);
  auto blocks = model.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    c.add_matrix("adam/m/" + blocks[i]->name, adam.m[i]);
    c.add_matrix("adam/v/" + blocks[i]->name, adam.v[i]);
  }
  c.save(path);
}

template <class Real>
std::int64_t load_checkpoint(const std::string& path, model::Model<Real>& model,
                             nn::Adam<Real>* adam) {
  const auto c = ckpt::Container::load(path);
  model.load_blocks(c);
  if (adam != nullptr) {
    adam->t = c.get_scalar_i64("meta/adam_t");
    auto blocks = model.blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      adam->m[i] = c.template get_matrix<Real>("adam/m/" + blocks[i]->name,
                                               blocks[i]->value.rows(), blocks[i]->value.cols());
      adam->v[i] = c.template get_matrix<Real>("adam/v/" + blocks[i]->name,
                                               blocks[i]->value.rows(), blocks[i]->value.cols());
    }
  }
  return c.get_scalar_i64("meta/step");
}

template <class Real>
model::Model<Real> build_model(const RunConfig& cfg) {
  RandomEngine init_rng(cfg.seed);
  return model::Model<Real>(model::ModelParams<Real>::init(cfg.model_config(), init_rng));
}

// --- training -----------------------------------------------------------

template <class Real>
TrainResult train_impl(const RunConfig& cfg, const std::string& resume_path) {
  auto train_scenes = split_side(cfg, load_scenes(cfg), /*test_side=*/false);
  auto windows = windows_for(cfg, train_scenes);
  if (windows.empty()) throw InvalidInputError("train: dataset produced no windows");

  fs::create_directories(cfg.out_dir);

  auto model = build_model<Real>(cfg);
  nn::Adam<Real> adam;
  adam.lr = static_cast<Real>(cfg.train_lr);
  adam.beta1 = static_cast<Real>(cfg.train_beta1);
  adam.beta2 = static_cast<Real>(cfg.train_beta2);
  adam.eps = static_cast<Real>(cfg.train_eps);
  auto blocks = model.blocks();
  adam.init(blocks);

  std::int64_t step0 = 0;
  if (!resume_path.empty()) step0 = load_checkpoint(resume_path, model, &adam);

  const std::string loss_path = cfg.out_dir + "/loss.csv";
  std::ofstream loss_csv;
  if (step0 > 0 && fs::exists(loss_path)) {
    loss_csv.open(loss_path, std::ios::app);
  } else {
    loss_csv.open(loss_path, std::ios::trunc);
    loss_csv << "step,loss,recon,kl\n";
  }
  loss_csv << std::setprecision(10);

  const auto n = static_cast<std::int64_t>(windows.size());
  const int batch = cfg.train_batch;
  data::AugmentationConfig aug;
  aug.enable_flip = cfg.train_aug_flip;
  aug.enable_rotation = cfg.train_aug_rotate;

  TrainResult result;
  result.first_loss = std::numeric_limits<double>::quiet_NaN();
  std::int64_t perm_epoch = -1;
  std::vector<int> perm;

  for (std::int64_t step = step0; step < cfg.train_steps; ++step) {
    double loss_acc = 0, recon_acc = 0, kl_acc = 0;
    for (int i = 0; i < batch; ++i) {
      const std::int64_t counter = step * batch + i;
      const std::int64_t epoch = counter / n;
      if (epoch != perm_epoch) {
        perm = epoch_permutation(windows.size(), cfg.seed, epoch);
        perm_epoch = epoch;
      }
      const auto& base = windows[static_cast<std::size_t>(perm[static_cast<std::size_t>(counter % n)])];
      const data::ObservationWindow* w = &base;
      data::ObservationWindow augmented;
      if (aug.enable_flip || aug.enable_rotation) {
        RandomEngine aug_rng(cfg.seed, kTagAugment, static_cast<std::uint64_t>(counter));
        augmented = data::augment(base, aug, aug_rng);
        w = &augmented;
      }
      RandomEngine noise_rng(cfg.seed, kTagNoise, static_cast<std::uint64_t>(counter));
      const auto noise = model::NoisePack<Real>::draw(w->H, cfg.model_latent_dim, noise_rng);

      typename model::Model<Real>::Tape tape(true);
      model::LossParts parts;
      try {
        const auto loss = model.training_loss_on_tape(tape, *w, noise, &parts);
        tape.backward(loss, Real(1) / static_cast<Real>(batch));
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " (step " + std::to_string(step) + ")");
      }
      loss_acc += parts.total / batch;
      recon_acc += parts.recon / batch;
      kl_acc += parts.kl / batch;
    }
    if (!std::isfinite(loss_acc)) {
      throw TrainingError("train: non-finite batch loss at step " + std::to_string(step));
    }
    try {
      adam.step(blocks);
    } catch (const TrainingError& e) {
      throw TrainingError(std::string(e.what()) + " (step " + std::to_string(step) + ")");
    }

    if (std::isnan(result.first_loss)) result.first_loss = loss_acc;
    result.final_loss = loss_acc;
    if (step % cfg.train_log_every == 0 || step + 1 == cfg.train_steps) {
      loss_csv << step << ',' << loss_acc << ',' << recon_acc << ',' << kl_acc << '\n';
    }
    if (cfg.train_checkpoint_every > 0 && (step + 1) % cfg.train_checkpoint_every == 0 &&
        step + 1 < cfg.train_steps) {
      save_checkpoint(cfg.out_dir + "/ckpt_" + std::to_string(step + 1) + ".svae", cfg, model,
                      adam, step + 1);
    }
  }

  result.steps = cfg.train_steps;
  result.checkpoint_path = cfg.out_dir + "/ckpt_final.svae";
  save_checkpoint(result.checkpoint_path, cfg, model, adam, cfg.train_steps);
  return result;
}

// --- evaluation ---------------------------------------------------------

struct WindowEval {
  std::string scene;
  double ade = 0, fde = 0;
  bool has_fpc = false;
  double ade_fpc = 0, fde_fpc = 0;
  bool has_nll = false;
  double nll_step = 0, nll_total = 0;
};

metrics::MetricReport aggregate_windows(const std::vector<WindowEval>& evals) {
  metrics::MetricReport report;
  auto add_to = [](metrics::MetricEntry& e, const WindowEval& w) {
    ++e.count;
    e.ade += w.ade;
    e.fde += w.fde;
    if (w.has_fpc) {
      e.has_fpc = true;
      e.ade_fpc += w.ade_fpc;
      e.fde_fpc += w.fde_fpc;
    }
    if (w.has_nll) {
      e.nll += w.nll_step;
      e.nll_total += w.nll_total;
    }
  };
  bool any_nll = false;
  for (const auto& w : evals) {
    add_to(report.aggregate, w);
    add_to(report.per_scene[w.scene], w);
    any_nll = any_nll || w.has_nll;
  }
  auto finish = [any_nll](metrics::MetricEntry& e) {
    if (e.count == 0) return;
    const auto n = static_cast<double>(e.count);
    e.ade /= n;
    e.fde /= n;
    e.ade_fpc /= n;
    e.fde_fpc /= n;
    if (any_nll) {
      e.nll /= n;
      e.nll_total /= n;
    } else {
      e.nll = std::numeric_limits<double>::quiet_NaN();
      e.nll_total = std::numeric_limits<double>::quiet_NaN();
    }
  };
  finish(report.aggregate);
  for (auto& [_, e] : report.per_scene) finish(e);
  return report;
}

template <class Real>
WindowEval eval_window(model::Model<Real>& model, const data::ObservationWindow& w, int wi,
                       const RunConfig& cfg) {
  WindowEval out;
  out.scene = w.scene_id;
  const auto enc = model.encode_observation(w);
  const int k = cfg.eval_k;
  const int rate = cfg.eval_fpc ? cfg.eval_fpc_rate : 1;
  const metrics::BestMode mode = cfg.eval_best_mode == "joint" ? metrics::BestMode::joint
                                                               : metrics::BestMode::independent;

  std::vector<std::vector<geom::Position>> preds;
  preds.reserve(static_cast<std::size_t>(k * rate));
  for (int s = 0; s < k * rate; ++s) {
    RandomEngine rng(cfg.seed ^ kTagEval, static_cast<std::uint64_t>(wi),
                     static_cast<std::uint64_t>(s));
    preds.push_back(
        model.rollout(enc, w.obs.back(), w.H, rng, cfg.eval_mean_only).positions_xy());
  }

  const std::vector<std::vector<geom::Position>> base(preds.begin(), preds.begin() + k);
  const auto best = metrics::best_of_k(base, w.fut, mode);
  out.ade = best.ade;
  out.fde = best.fde;

  if (cfg.eval_fpc) {
    out.has_fpc = true;
    if (rate == 1) {
      // Oversampling at rate 1 is the identity selection.
      out.ade_fpc = best.ade;
      out.fde_fpc = best.fde;
    } else {
      std::vector<geom::Position> finals;
      finals.reserve(preds.size());
      for (const auto& p : preds) finals.push_back(p.back());
      fpc::KMeansOptions opts;
      opts.seed = cfg.fpc_seed;
      opts.max_iters = cfg.fpc_max_iters;
      opts.tol = cfg.fpc_tol;
      const auto picks = fpc::fpc_select(finals, k, opts);
      std::vector<std::vector<geom::Position>> selected;
      selected.reserve(picks.size());
      for (int p : picks) selected.push_back(preds[static_cast<std::size_t>(p)]);
      const auto fpc_best = metrics::best_of_k(selected, w.fut, mode);
      out.ade_fpc = fpc_best.ade;
      out.fde_fpc = fpc_best.fde;
    }
  }

  if (cfg.eval_nll) {
    out.has_nll = true;
    std::vector<std::vector<geom::Position>> samples;
    samples.reserve(static_cast<std::size_t>(cfg.eval_nll_samples));
    for (int s = 0; s < cfg.eval_nll_samples; ++s) {
      RandomEngine rng(cfg.seed ^ kTagNll, static_cast<std::uint64_t>(wi),
                       static_cast<std::uint64_t>(s));
      samples.push_back(model.rollout(enc, w.obs.back(), w.H, rng, false).positions_xy());
    }
    const auto nll = metrics::nll_kde(samples, w.fut);
    out.nll_step = nll.per_step;
    out.nll_total = nll.total;
  }
  return out;
}

template <class Real>
metrics::MetricReport eval_impl(const RunConfig& cfg, const std::string& ckpt_path) {
  auto test_scenes = split_side(cfg, load_scenes(cfg), /*test_side=*/true);
  auto windows = windows_for(cfg, test_scenes);
  if (windows.empty()) throw InvalidInputError("eval: dataset produced no windows");

  auto model = build_model<Real>(cfg);
  load_checkpoint<Real>(ckpt_path, model, nullptr);

  std::vector<WindowEval> evals(windows.size());
  parallel_for(static_cast<int>(windows.size()), cfg.threads, [&](int i) {
    evals[static_cast<std::size_t>(i)] =
        eval_window(model, windows[static_cast<std::size_t>(i)], i, cfg);
  });
  return aggregate_windows(evals);
}

void write_report(const RunConfig& cfg, const metrics::MetricReport& report,
                  const std::string& stem) {
  fs::create_directories(cfg.out_dir);
  std::ofstream json(cfg.out_dir + "/" + stem + ".json", std::ios::trunc);
  json << report.to_json() << "\n";
  std::ofstream csv(cfg.out_dir + "/" + stem + ".csv", std::ios::trunc);
  csv << std::setprecision(17) << report.to_csv();
}

}  // namespace

// --- shared plumbing ------------------------------------------------------

std::vector<data::TrajectoryScene> load_scenes(const RunConfig& cfg) {
  if (cfg.data_files.empty()) throw ConfigError("data.files is empty");
  std::vector<data::TrajectoryScene> scenes;
  scenes.reserve(cfg.data_files.size());
  for (const auto& path : cfg.data_files) {
    scenes.push_back(data::parse_trajectory_file(path, cfg.parse_options()));
  }
  return scenes;
}

std::vector<data::TrajectoryScene> split_side(const RunConfig& cfg,
                                              std::vector<data::TrajectoryScene> scenes,
                                              bool test_side) {
  std::vector<std::string> ids;
  ids.reserve(scenes.size());
  for (const auto& s : scenes) ids.push_back(s.scene_id);

  std::vector<std::string> wanted;
  if (cfg.split_mode == "loo") {
    if (cfg.split_test.size() != 1) {
      throw ConfigError("split.mode = loo requires split.test to name exactly one scene");
    }
    const auto held_out = cfg.split_test[0];
    if (std::find(ids.begin(), ids.end(), held_out) == ids.end()) {
      throw ConfigError("split.test scene '" + held_out + "' not among data.files scenes");
    }
    if (scenes.size() < 2) throw InvalidInputError("leave-one-out needs at least 2 scenes");
    if (test_side) {
      wanted.push_back(held_out);
    } else {
      for (const auto& id : ids) {
        if (id != held_out) wanted.push_back(id);
      }
    }
  } else {
    // Fixed split; with both lists empty every scene lands on both sides
    // ("no split" convenience for single-dataset runs).
    if (cfg.split_train.empty() && cfg.split_test.empty()) {
      return scenes;
    }
    const auto split = data::fixed_split(cfg.split_train, cfg.split_test);
    wanted = test_side ? split.test : split.train;
  }

  std::vector<data::TrajectoryScene> out;
  for (const auto& id : wanted) {
    auto it = std::find_if(scenes.begin(), scenes.end(),
                           [&id](const auto& s) { return s.scene_id == id; });
    if (it == scenes.end()) throw ConfigError("split names unknown scene '" + id + "'");
    out.push_back(std::move(*it));
  }
  return out;
}

std::vector<data::ObservationWindow> windows_for(
    const RunConfig& cfg, const std::vector<data::TrajectoryScene>& scenes) {
  std::vector<data::ObservationWindow> out;
  for (const auto& scene : scenes) {
    if (!cfg.data_window_cache.empty()) {
      const std::string cache_path = cfg.data_window_cache + "." + scene.scene_id + ".svae";
      if (fs::exists(cache_path)) {
        auto cached = data::load_windows(cache_path);
        out.insert(out.end(), cached.begin(), cached.end());
        continue;
      }
      auto built = data::make_windows(scene, cfg.window_options());
      data::save_windows(cache_path, built);
      out.insert(out.end(), built.begin(), built.end());
      continue;
    }
    auto built = data::make_windows(scene, cfg.window_options());
    out.insert(out.end(), built.begin(), built.end());
  }
  return out;
}

// --- commands ---------------------------------------------------------------

TrainResult run_train(const RunConfig& cfg, const std::string& resume_path) {
  cfg.validate();
  if (cfg.precision == "f64") return train_impl<double>(cfg, resume_path);
  return train_impl<float>(cfg, resume_path);
}

EvalOutputs run_eval(const RunConfig& cfg, const std::string& checkpoint_path) {
  cfg.validate();
  EvalOutputs out;
  out.report = cfg.precision == "f64" ? eval_impl<double>(cfg, checkpoint_path)
                                      : eval_impl<float>(cfg, checkpoint_path);
  out.has_fpc = cfg.eval_fpc;
  write_report(cfg, out.report, "metrics");
  return out;
}

metrics::MetricReport run_baseline(const RunConfig& cfg) {
  cfg.validate();
  auto test_scenes = split_side(cfg, load_scenes(cfg), /*test_side=*/true);
  auto windows = windows_for(cfg, test_scenes);
  if (windows.empty()) throw InvalidInputError("baseline: dataset produced no windows");
  const auto mode = cfg.baseline_velocity == "last" ? metrics::VelocityMode::last_displacement
                                                    : metrics::VelocityMode::mean_displacement;
  std::vector<WindowEval> evals(windows.size());
  parallel_for(static_cast<int>(windows.size()), cfg.threads, [&](int i) {
    const auto& w = windows[static_cast<std::size_t>(i)];
    const auto pred = metrics::linear_baseline(w, mode);
    WindowEval e;
    e.scene = w.scene_id;
    e.ade = metrics::ade(pred, w.fut);
    e.fde = metrics::fde(pred, w.fut);
    evals[static_cast<std::size_t>(i)] = e;
  });
  auto report = aggregate_windows(evals);
  write_report(cfg, report, "baseline_metrics");
  return report;
}

namespace {

template <class Real>
void predict_impl(const RunConfig& cfg, const std::string& ckpt_path) {
  auto test_scenes = split_side(cfg, load_scenes(cfg), /*test_side=*/true);
  auto windows = windows_for(cfg, test_scenes);
  if (windows.empty()) throw InvalidInputError("predict: dataset produced no windows");
  if (cfg.predict_max_windows > 0 &&
      static_cast<int>(windows.size()) > cfg.predict_max_windows) {
    windows.resize(static_cast<std::size_t>(cfg.predict_max_windows));
  }

  auto model = build_model<Real>(cfg);
  load_checkpoint<Real>(ckpt_path, model, nullptr);
  fs::create_directories(cfg.out_dir);

  std::ofstream samples_csv(cfg.out_dir + "/samples.csv", std::ios::trunc);
  samples_csv << std::setprecision(10) << "window,sample,t,x,y\n";
  std::ofstream att_jsonl(cfg.out_dir + "/attention.jsonl", std::ios::trunc);

  for (int wi = 0; wi < static_cast<int>(windows.size()); ++wi) {
    const auto& w = windows[static_cast<std::size_t>(wi)];
    const auto enc = model.encode_observation(w);

    // Attention weights per observed frame (1-based frame index in the
    // window; attention exists from the second frame on).
    for (int t = 1; t < w.T; ++t) {
      const auto& weights = enc.attention[static_cast<std::size_t>(t)];
      const auto& nbs = w.neighbors[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < weights.size(); ++j) {
        nlohmann::json line;
        line["window"] = wi;
        line["frame"] = t + 1;
        line["neighbor"] = nbs[j].agent_id;
        line["weight"] = weights[j];
        att_jsonl << line.dump() << "\n";
      }
    }

    for (int s = 0; s < cfg.predict_samples; ++s) {
      RandomEngine rng(cfg.seed ^ kTagEval, static_cast<std::uint64_t>(wi),
                       static_cast<std::uint64_t>(s));
      const auto roll = model.rollout(enc, w.obs.back(), w.H, rng, cfg.eval_mean_only);
      const auto pos = roll.positions_xy();
      for (int t = 0; t < w.H; ++t) {
        samples_csv << wi << ',' << s << ',' << (t + 1) << ',' << pos[static_cast<std::size_t>(t)].x
                    << ',' << pos[static_cast<std::size_t>(t)].y << "\n";
      }
    }

    // Distribution heatmap over all predicted positions.
    std::vector<geom::Position> cloud;
    cloud.reserve(static_cast<std::size_t>(cfg.predict_heatmap_samples) *
                  static_cast<std::size_t>(w.H));
    for (int s = 0; s < cfg.predict_heatmap_samples; ++s) {
      RandomEngine rng(cfg.seed ^ kTagNll, static_cast<std::uint64_t>(wi),
                       static_cast<std::uint64_t>(s));
      const auto pos = model.rollout(enc, w.obs.back(), w.H, rng, false).positions_xy();
      cloud.insert(cloud.end(), pos.begin(), pos.end());
    }
    double xmin = cloud[0].x, xmax = cloud[0].x, ymin = cloud[0].y, ymax = cloud[0].y;
    for (const auto& p : cloud) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double pad_x = std::max(0.1 * (xmax - xmin), 1e-6);
    const double pad_y = std::max(0.1 * (ymax - ymin), 1e-6);
    xmin -= pad_x;
    xmax += pad_x;
    ymin -= pad_y;
    ymax += pad_y;
    const int res = cfg.predict_heatmap_res;
    std::vector<std::int64_t> grid(static_cast<std::size_t>(res) * static_cast<std::size_t>(res),
                                   0);
    for (const auto& p : cloud) {
      int gx = static_cast<int>((p.x - xmin) / (xmax - xmin) * res);
      int gy = static_cast<int>((p.y - ymin) / (ymax - ymin) * res);
      gx = std::clamp(gx, 0, res - 1);
      gy = std::clamp(gy, 0, res - 1);
      ++grid[static_cast<std::size_t>(gy) * static_cast<std::size_t>(res) +
             static_cast<std::size_t>(gx)];
    }
    std::ofstream heat(cfg.out_dir + "/heatmap_" + std::to_string(wi) + ".csv", std::ios::trunc);
    heat << std::setprecision(10);
    heat << "# xmin " << xmin << "\n# xmax " << xmax << "\n# ymin " << ymin << "\n# ymax "
         << ymax << "\n# res " << res << "\n";
    for (int gy = 0; gy < res; ++gy) {
      for (int gx = 0; gx < res; ++gx) {
        if (gx != 0) heat << ',';
        heat << grid[static_cast<std::size_t>(gy) * static_cast<std::size_t>(res) +
                     static_cast<std::size_t>(gx)];
      }
      heat << "\n";
    }
  }
}

template <class Real>
std::vector<SweepRow> sweep_impl(const RunConfig& cfg, const std::string& ckpt_path) {
  auto rates = cfg.sweep_rate_list();
  if (std::find(rates.begin(), rates.end(), 1) == rates.end()) {
    rates.insert(rates.begin(), 1);  // rate 1 anchors the normalization
  }
  auto test_scenes = split_side(cfg, load_scenes(cfg), /*test_side=*/true);
  auto windows = windows_for(cfg, test_scenes);
  if (windows.empty()) throw InvalidInputError("fpc-sweep: dataset produced no windows");

  auto model = build_model<Real>(cfg);
  load_checkpoint<Real>(ckpt_path, model, nullptr);

  std::vector<SweepRow> rows;
  double ade1 = 0, fde1 = 0;
  for (const int rate : rates) {
    RunConfig rate_cfg = cfg;
    rate_cfg.eval_fpc = true;
    rate_cfg.eval_fpc_rate = rate;
    rate_cfg.eval_nll = false;
    std::vector<WindowEval> evals(windows.size());
    parallel_for(static_cast<int>(windows.size()), cfg.threads, [&](int i) {
      evals[static_cast<std::size_t>(i)] =
          eval_window(model, windows[static_cast<std::size_t>(i)], i, rate_cfg);
    });
    double ade = 0, fde = 0;
    for (const auto& e : evals) {
      ade += e.ade_fpc;
      fde += e.fde_fpc;
    }
    ade /= static_cast<double>(evals.size());
    fde /= static_cast<double>(evals.size());
    if (rate == 1) {
      ade1 = ade;
      fde1 = fde;
    }
    SweepRow row;
    row.rate = rate;
    row.ade = ade;
    row.fde = fde;
    rows.push_back(row);
  }
  for (auto& row : rows) {
    row.ade_rel = ade1 > 0 ? row.ade / ade1 : 1.0;
    row.fde_rel = fde1 > 0 ? row.fde / fde1 : 1.0;
  }

  fs::create_directories(cfg.out_dir);
  std::ofstream csv(cfg.out_dir + "/fpc_sweep.csv", std::ios::trunc);
  csv << std::setprecision(10) << "rate,ade,fde,ade_rel,fde_rel\n";
  for (const auto& row : rows) {
    csv << row.rate << ',' << row.ade << ',' << row.fde << ',' << row.ade_rel << ','
        << row.fde_rel << "\n";
  }
  return rows;
}

template <class Real>
void latent_dump_impl(const RunConfig& cfg, const std::string& ckpt_path) {
  auto model = build_model<Real>(cfg);
  load_checkpoint<Real>(ckpt_path, model, nullptr);
  fs::create_directories(cfg.out_dir);

  const int T = cfg.window_T;
  const std::vector<double> turns_deg{-30, -15, 0, 15, 30};
  const std::vector<double> speeds{0.6, 0.7, 0.8};  // working units per frame

  std::ofstream csv(cfg.out_dir + "/latents.csv", std::ios::trunc);
  csv << std::setprecision(10) << "obs,speed,turn_deg,sample";
  for (int d = 0; d < cfg.model_latent_dim; ++d) csv << ",z" << d;
  csv << "\n";

  int obs_id = 0;
  for (const double speed : speeds) {
    for (const double turn : turns_deg) {
      // Straight segment, then a heading change halfway through the window.
      data::ObservationWindow w;
      w.scene_id = "latent-probe";
      w.T = T;
      w.H = 0;
      w.frame_dt = cfg.data_frame_dt;
      w.neighbors.resize(static_cast<std::size_t>(T));
      geom::Position p{0, 0};
      double heading = 0;
      w.obs.push_back(p);
      for (int t = 1; t < T; ++t) {
        if (t == T / 2 + 1) heading = turn * 3.14159265358979323846 / 180.0;
        p += geom::Vec2{speed * std::cos(heading), speed * std::sin(heading)};
        w.obs.push_back(p);
      }

      const auto enc = model.encode_observation(w);
      typename model::Model<Real>::Tape tape(false);
      const auto h = tape.input(enc.h_init);
      const auto pri = model.params().prior_head.forward(tape, h);
      const auto& mean = tape.value(pri.mean);
      const auto& lv = tape.value(pri.log_var);
      for (int s = 0; s < cfg.latent_samples; ++s) {
        RandomEngine rng(cfg.seed ^ kTagLatent, static_cast<std::uint64_t>(obs_id),
                         static_cast<std::uint64_t>(s));
        csv << obs_id << ',' << speed << ',' << turn << ',' << s;
        for (int d = 0; d < cfg.model_latent_dim; ++d) {
          const double z = static_cast<double>(mean[d]) +
                           std::exp(0.5 * static_cast<double>(lv[d])) * rng.normal();
          csv << ',' << z;
        }
        csv << "\n";
      }
      ++obs_id;
    }
  }
}

}  // namespace

void run_predict(const RunConfig& cfg, const std::string& checkpoint_path) {
  cfg.validate();
  if (cfg.precision == "f64") {
    predict_impl<double>(cfg, checkpoint_path);
  } else {
    predict_impl<float>(cfg, checkpoint_path);
  }
}

std::vector<SweepRow> run_fpc_sweep(const RunConfig& cfg, const std::string& checkpoint_path) {
  cfg.validate();
  if (cfg.precision == "f64") return sweep_impl<double>(cfg, checkpoint_path);
  return sweep_impl<float>(cfg, checkpoint_path);
}

void run_latent_dump(const RunConfig& cfg, const std::string& checkpoint_path) {
  cfg.validate();
  if (cfg.precision == "f64") {
    latent_dump_impl<double>(cfg, checkpoint_path);
  } else {
    latent_dump_impl<float>(cfg, checkpoint_path);
  }
}

}  // namespace svae::app
