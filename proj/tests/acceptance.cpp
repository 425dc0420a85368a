// Acceptance suite: one criterion per section, each printing a PASS/FAIL/SKIP
// line. The process exits nonzero if any gating criterion fails. Criterion 3
// needs the ETH/UCY benchmark files on disk and reports SKIP when they are
// absent; criterion 9 is an explicitly non-gating stretch goal.
//
// Usage: acceptance [--ethucy-dir DIR] [--fast]
//   --ethucy-dir  directory holding eth.txt hotel.txt univ.txt zara01.txt
//                 zara02.txt ("frame id x y", meters, 0.4 s frames);
//                 defaults to $SVAE_ETHUCY_DIR, then data/eth_ucy
//   --fast        shrink the overfit budget (debug runs, not the real gate)

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svae/errors.hpp"
#include "svae/fpc.hpp"
#include "svae/metrics.hpp"
#include "svae/model.hpp"
#include "svae/nn.hpp"
#include "svae/random.hpp"
#include "svae/runner.hpp"
#include "svae/scene.hpp"
#include "svae/windows.hpp"
#include "testutil.hpp"

using namespace svae;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& detail, double elapsed_s) {
  std::ostringstream line;
  line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail << " ("
       << std::fixed << std::setprecision(1) << elapsed_s << "s)";
  std::cout << line.str() << std::endl;
  if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& detail) {
  std::cout << "[SKIP] criterion " << criterion << ": " << detail << std::endl;
}

// --- criterion 1: metric oracle equivalence ------------------------------

void criterion_1() {
  const auto t0 = Clock::now();
  RandomEngine rng(101);
  double worst = 0;
  const int windows = 1000;
  for (int w = 0; w < windows; ++w) {
    const int h = 12;
    const int k = 1 + rng.uniform_int(20);
    std::vector<geom::Position> gt;
    geom::Position p{rng.normal() * 5, rng.normal() * 5};
    for (int t = 0; t < h; ++t) {
      p += geom::Vec2{rng.normal() * 0.5, rng.normal() * 0.5};
      gt.push_back(p);
    }
    std::vector<std::vector<geom::Position>> preds;
    for (int s = 0; s < k; ++s) {
      std::vector<geom::Position> traj;
      geom::Position q{rng.normal() * 5, rng.normal() * 5};
      for (int t = 0; t < h; ++t) {
        q += geom::Vec2{rng.normal() * 0.5, rng.normal() * 0.5};
        traj.push_back(q);
      }
      preds.push_back(std::move(traj));
    }

    // Naive oracle: direct loops over the definitions.
    double best_ade = std::numeric_limits<double>::infinity();
    double best_fde = std::numeric_limits<double>::infinity();
    for (const auto& pr : preds) {
      double sum = 0;
      for (int t = 0; t < h; ++t) {
        const double dx = pr[static_cast<std::size_t>(t)].x - gt[static_cast<std::size_t>(t)].x;
        const double dy = pr[static_cast<std::size_t>(t)].y - gt[static_cast<std::size_t>(t)].y;
        sum += std::sqrt(dx * dx + dy * dy);
      }
      const double a = sum / h;
      if (a < best_ade) best_ade = a;
      const double fx = pr.back().x - gt.back().x;
      const double fy = pr.back().y - gt.back().y;
      const double f = std::sqrt(fx * fx + fy * fy);
      if (f < best_fde) best_fde = f;
    }

    const auto got = metrics::best_of_k(preds, gt);
    const double ade0 = metrics::ade(preds[0], gt);
    double naive_ade0 = 0;
    for (int t = 0; t < h; ++t) {
      naive_ade0 += (preds[0][static_cast<std::size_t>(t)] - gt[static_cast<std::size_t>(t)]).norm();
    }
    naive_ade0 /= h;
    worst = std::max(worst, std::abs(got.ade - best_ade) / std::max(1.0, best_ade));
    worst = std::max(worst, std::abs(got.fde - best_fde) / std::max(1.0, best_fde));
    worst = std::max(worst, std::abs(ade0 - naive_ade0) / std::max(1.0, naive_ade0));
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "ade/fde/best_of_k vs naive oracle on " << windows
         << " random windows, max rel err " << std::scientific << std::setprecision(2) << worst;
  report(1, worst < 1e-9 && elapsed < 10.0, detail.str(), elapsed);
}

// --- criterion 2: full training-loss gradient ----------------------------

void criterion_2() {
  const auto t0 = Clock::now();
  // Two agents, so the target always has exactly one neighbor.
  auto scene = testutil::make_synthetic_scene(161, 2, 10);
  data::WindowOptions wopts;
  wopts.T = 4;
  wopts.H = 3;
  wopts.radius = 1e9;
  auto windows = data::make_windows(scene, wopts);
  const auto& w = windows[0];

  auto cfg = testutil::tiny_model_config();  // all widths <= 8
  RandomEngine init_rng(77);
  model::Model<double> m(model::ModelParams<double>::init(cfg, init_rng));
  RandomEngine noise_rng(991);
  const auto noise = model::NoisePack<double>::draw(3, cfg.latent_dim, noise_rng);

  auto loss_value = [&]() {
    model::Model<double>::Tape t(false);
    return t.value(m.training_loss_on_tape(t, w, noise))[0];
  };

  m.params().zero_grad();
  model::Model<double>::Tape tape(true);
  tape.backward(m.training_loss_on_tape(tape, w, noise));

  auto blocks = m.blocks();
  std::size_t n_params = 0;
  for (const auto* b : blocks) n_params += static_cast<std::size_t>(b->size());
  const auto fd = testutil::finite_difference<double>(loss_value, blocks, 1e-5);
  const double err = testutil::max_rel_error(blocks, fd);

  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "training_loss gradient vs central differences over " << n_params
         << " parameters (T=4, H=3, 1 neighbor), max rel err " << std::scientific
         << std::setprecision(2) << err;
  report(2, err < 1e-4 && elapsed < 60.0, detail.str(), elapsed);
}

// --- criterion 3: linear baseline vs published ETH/UCY numbers -----------

void criterion_3(const std::string& ethucy_dir) {
  struct Row {
    const char* file;
    double ade;
    double fde;
  };
  const std::vector<Row> expected = {
      {"eth", 1.07, 2.28},    {"hotel", 0.31, 0.61},  {"univ", 0.52, 1.16},
      {"zara01", 0.42, 0.95}, {"zara02", 0.32, 0.72},
  };

  bool all_present = !ethucy_dir.empty();
  for (const auto& row : expected) {
    if (!all_present || !fs::exists(fs::path(ethucy_dir) / (std::string(row.file) + ".txt"))) {
      all_present = false;
    }
  }
  if (!all_present) {
    report_skip(3, "ETH/UCY dataset not present (looked in '" + ethucy_dir +
                       "'; expected eth.txt hotel.txt univ.txt zara01.txt zara02.txt with "
                       "frame id x y rows in meters at 0.4 s). Supply --ethucy-dir to run "
                       "the Linear-baseline comparison against the published numbers.");
    return;
  }

  const auto t0 = Clock::now();
  bool all_ok = true;
  std::ostringstream detail;
  detail << "linear baseline vs published row within +/-15%:";
  for (const auto& row : expected) {
    app::RunConfig cfg;
    cfg.data_files = {(fs::path(ethucy_dir) / (std::string(row.file) + ".txt")).string()};
    cfg.out_dir = (fs::temp_directory_path() / "svae_acceptance_baseline").string();
    cfg.eval_nll = false;
    const auto report_m = app::run_baseline(cfg);
    const double ade = report_m.aggregate.ade;
    const double fde = report_m.aggregate.fde;
    const bool ok = std::abs(ade - row.ade) <= 0.15 * row.ade &&
                    std::abs(fde - row.fde) <= 0.15 * row.fde;
    all_ok = all_ok && ok;
    detail << ' ' << row.file << ' ' << std::fixed << std::setprecision(2) << ade << '/' << fde
           << (ok ? "" : "(!)");
  }
  const double elapsed = seconds_since(t0);
  report(3, all_ok && elapsed < 120.0, detail.str(), elapsed);
}

// --- criteria 4 + 8: overfit run, then FPC sweep direction ---------------

struct OverfitOutcome {
  bool trained = false;
  double best_ade = std::numeric_limits<double>::infinity();
  std::int64_t steps_used = 0;
  model::ModelConfig cfg;
  std::vector<data::ObservationWindow> train_windows;
  std::vector<data::ObservationWindow> heldout_windows;
  // Trained parameters survive via checkpoint records.
  ckpt::Container params;
};

template <class Real>
double best_of_20_ade(model::Model<Real>& m, const std::vector<data::ObservationWindow>& windows,
                      std::uint64_t seed) {
  double acc = 0;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const auto& w = windows[wi];
    const auto enc = m.encode_observation(w);
    std::vector<std::vector<geom::Position>> preds;
    preds.reserve(20);
    for (int s = 0; s < 20; ++s) {
      RandomEngine rng(seed, wi, static_cast<std::uint64_t>(s));
      preds.push_back(m.rollout(enc, w.obs.back(), w.H, rng).positions_xy());
    }
    acc += metrics::best_of_k(preds, w.fut).ade;
  }
  return acc / static_cast<double>(windows.size());
}

OverfitOutcome criterion_4(bool fast) {
  const auto t0 = Clock::now();
  OverfitOutcome out;

  // One synthetic scene; 32 training windows spread across agents, the rest
  // held out for criterion 8.
  auto scene = testutil::make_synthetic_scene(471, 6, 60);
  data::WindowOptions wopts;  // T=8, H=12, radius 8
  auto all_windows = data::make_windows(scene, wopts);
  const std::size_t n = all_windows.size();
  std::set<std::size_t> train_idx;
  for (int i = 0; i < 32; ++i) train_idx.insert(i * n / 32);
  for (std::size_t i = 0; i < n; ++i) {
    if (train_idx.count(i) != 0) {
      out.train_windows.push_back(all_windows[i]);
    } else {
      out.heldout_windows.push_back(all_windows[i]);
    }
  }

  model::ModelConfig mcfg;
  mcfg.embed_dim = 32;
  mcfg.obs_hidden = 64;
  mcfg.rnn_hidden = 64;
  mcfg.attn_dim = 16;
  mcfg.latent_dim = 32;
  mcfg.head_hidden = 32;
  out.cfg = mcfg;

  RandomEngine init_rng(4001);
  model::Model<float> m(model::ModelParams<float>::init(mcfg, init_rng));
  nn::Adam<float> adam;
  adam.lr = 1e-3f;
  auto blocks = m.blocks();
  adam.init(blocks);

  const std::int64_t max_steps = fast ? 600 : 5000;
  const int batch = static_cast<int>(out.train_windows.size());
  double ade = std::numeric_limits<double>::infinity();
  std::int64_t step = 0;
  for (; step < max_steps; ++step) {
    for (int i = 0; i < batch; ++i) {
      RandomEngine noise_rng(4002, static_cast<std::uint64_t>(step),
                             static_cast<std::uint64_t>(i));
      const auto noise = model::NoisePack<float>::draw(12, mcfg.latent_dim, noise_rng);
      model::Model<float>::Tape tape(true);
      const auto loss =
          m.training_loss_on_tape(tape, out.train_windows[static_cast<std::size_t>(i)], noise);
      tape.backward(loss, 1.0f / static_cast<float>(batch));
    }
    adam.step(blocks);
    if ((step + 1) % 250 == 0 || step + 1 == max_steps) {
      ade = best_of_20_ade(m, out.train_windows, 4010);
      if (ade < 0.045) {
        ++step;
        break;
      }
    }
  }
  out.best_ade = ade;
  out.steps_used = step;
  out.trained = true;
  m.save_blocks(out.params);

  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "overfit 32 windows: best-of-20 ADE " << std::fixed << std::setprecision(4) << ade
         << " after " << step << " steps (gate < 0.05 within 5000)";
  const bool pass = ade < 0.05 && step <= 5000 && elapsed < 1800.0;
  report(4, fast ? true : pass, detail.str() + (fast ? " [fast mode, informational]" : ""),
         elapsed);
  return out;
}

void criterion_8(OverfitOutcome& overfit, bool fast) {
  const auto t0 = Clock::now();
  RandomEngine init_rng(4001);
  model::Model<float> m(model::ModelParams<float>::init(overfit.cfg, init_rng));
  m.load_blocks(overfit.params);

  auto& windows = overfit.heldout_windows;
  if (windows.size() > 220) windows.resize(220);
  const std::size_t n_windows = windows.size();

  double ade1 = 0, fde1 = 0, ade20 = 0, fde20 = 0;
  const int k = 20;
  const int rate = 20;
  for (std::size_t wi = 0; wi < n_windows; ++wi) {
    const auto& w = windows[wi];
    const auto enc = m.encode_observation(w);
    std::vector<std::vector<geom::Position>> preds;
    preds.reserve(static_cast<std::size_t>(k * rate));
    for (int s = 0; s < k * rate; ++s) {
      RandomEngine rng(8101, wi, static_cast<std::uint64_t>(s));
      preds.push_back(m.rollout(enc, w.obs.back(), w.H, rng).positions_xy());
    }
    const std::vector<std::vector<geom::Position>> base(preds.begin(), preds.begin() + k);
    const auto b1 = metrics::best_of_k(base, w.fut);
    ade1 += b1.ade;
    fde1 += b1.fde;

    std::vector<geom::Position> finals;
    finals.reserve(preds.size());
    for (const auto& p : preds) finals.push_back(p.back());
    const auto picks = fpc::fpc_select(finals, k, {});
    std::vector<std::vector<geom::Position>> selected;
    for (int p : picks) selected.push_back(preds[static_cast<std::size_t>(p)]);
    const auto b20 = metrics::best_of_k(selected, w.fut);
    ade20 += b20.ade;
    fde20 += b20.fde;
  }
  ade1 /= static_cast<double>(n_windows);
  fde1 /= static_cast<double>(n_windows);
  ade20 /= static_cast<double>(n_windows);
  fde20 /= static_cast<double>(n_windows);

  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "FPC rate 20 vs rate 1 on " << n_windows << " held-out windows: ADE " << std::fixed
         << std::setprecision(4) << ade20 << " vs " << ade1 << ", FDE " << fde20 << " vs "
         << fde1 << " (gate: rate-20 <= rate-1 on average)";
  const bool pass = n_windows >= 200 && ade20 <= ade1 && fde20 <= fde1;
  report(8, fast ? true : pass, detail.str() + (fast ? " [fast mode, informational]" : ""),
         elapsed);
}

// --- criterion 5: translation invariance ----------------------------------

void criterion_5() {
  const auto t0 = Clock::now();
  auto scene = testutil::make_synthetic_scene(501, 5, 40);
  auto shifted = scene;
  for (auto& track : shifted.tracks) {
    for (auto& p : track.points) p += geom::Vec2{100.0, -50.0};
  }
  data::WindowOptions wopts;
  auto w1 = data::make_windows(scene, wopts);
  auto w2 = data::make_windows(shifted, wopts);

  model::ModelConfig mcfg;
  mcfg.embed_dim = 32;
  mcfg.obs_hidden = 64;
  mcfg.rnn_hidden = 64;
  mcfg.attn_dim = 16;
  RandomEngine init_rng(502);
  model::Model<float> m(model::ModelParams<float>::init(mcfg, init_rng));

  double worst = 0;
  for (std::size_t i = 0; i < w1.size(); ++i) {
    const auto e1 = m.encode_observation(w1[i]);
    const auto e2 = m.encode_observation(w2[i]);
    RandomEngine r1(503, i, 0), r2(503, i, 0);
    const auto s1 = m.rollout(e1, w1[i].obs.back(), 12, r1);
    const auto s2 = m.rollout(e2, w2[i].obs.back(), 12, r2);
    for (int t = 0; t < 12; ++t) {
      worst = std::max(worst, static_cast<double>(std::abs(s1.displacements[static_cast<std::size_t>(t)][0] -
                                                           s2.displacements[static_cast<std::size_t>(t)][0])));
      worst = std::max(worst, static_cast<double>(std::abs(s1.displacements[static_cast<std::size_t>(t)][1] -
                                                           s2.displacements[static_cast<std::size_t>(t)][1])));
    }
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "scene shifted by (100, -50): max sampled-displacement change " << std::scientific
         << std::setprecision(2) << worst << " over " << w1.size() << " windows";
  report(5, worst <= 1e-6, detail.str(), elapsed);
}

// --- criterion 6: FPC selection properties --------------------------------

double brute_force_sse(const std::vector<geom::Vec2>& pts, int k) {
  const auto n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= k;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      assign[static_cast<std::size_t>(i)] = static_cast<int>(c % k);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
      c /= k;
    }
    bool all_used = true;
    for (int cc = 0; cc < k; ++cc) all_used = all_used && counts[static_cast<std::size_t>(cc)] > 0;
    if (!all_used) continue;
    std::vector<geom::Vec2> sums(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] += pts[static_cast<std::size_t>(i)];
    }
    double sse = 0;
    for (int i = 0; i < n; ++i) {
      const auto cl = static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]);
      const geom::Vec2 mean = sums[cl] * (1.0 / counts[cl]);
      sse += (pts[static_cast<std::size_t>(i)] - mean).squared_norm();
    }
    best = std::min(best, sse);
  }
  return best;
}

void criterion_6() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream detail;

  // (a) 9 samples in 3 groups -> one representative per group, matching the
  // exhaustive oracle.
  std::vector<geom::Vec2> finals;
  for (int i = 0; i < 3; ++i) finals.push_back({0, 0});
  for (int i = 0; i < 3; ++i) finals.push_back({10, 0});
  for (int i = 0; i < 3; ++i) finals.push_back({0, 10});
  const auto picks = fpc::fpc_select(finals, 3);
  std::set<std::pair<double, double>> groups;
  for (int p : picks) {
    groups.insert({finals[static_cast<std::size_t>(p)].x, finals[static_cast<std::size_t>(p)].y});
  }
  const auto clusters = fpc::kmeans(finals, 3, {});
  std::vector<geom::Vec2> sums(3);
  std::vector<int> counts(3, 0);
  for (std::size_t i = 0; i < finals.size(); ++i) {
    sums[static_cast<std::size_t>(clusters.cluster_of[i])] += finals[i];
    ++counts[static_cast<std::size_t>(clusters.cluster_of[i])];
  }
  double sse = 0;
  for (std::size_t i = 0; i < finals.size(); ++i) {
    const auto c = static_cast<std::size_t>(clusters.cluster_of[i]);
    sse += (finals[i] - sums[c] * (1.0 / counts[c])).squared_norm();
  }
  const double oracle_sse = brute_force_sse(finals, 3);
  const bool groups_ok = groups.size() == 3 && std::abs(sse - oracle_sse) <= 1e-12;
  ok = ok && groups_ok;
  detail << "3-group selection " << (groups_ok ? "matches" : "DIFFERS from")
         << " brute-force k-means (sse " << sse << " vs " << oracle_sse << ")";

  // (b) eval with FPC rate 1 is bit-identical to eval without FPC.
  const auto tmp = fs::temp_directory_path() / "svae_acceptance_c6";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  auto scene = testutil::make_synthetic_scene(601, 4, 30);
  {
    std::ofstream out((tmp / "scene.txt").string());
    out.precision(12);
    for (const auto& track : scene.tracks) {
      for (std::size_t i = 0; i < track.points.size(); ++i) {
        out << scene.frames[static_cast<std::size_t>(track.first_frame) + i] << ' '
            << track.agent_id << ' ' << track.points[i].x << ' ' << track.points[i].y << '\n';
      }
    }
  }
  app::RunConfig cfg;
  cfg.seed = 607;
  cfg.data_files = {(tmp / "scene.txt").string()};
  cfg.out_dir = (tmp / "out").string();
  cfg.model_embed_dim = 16;
  cfg.model_obs_hidden = 32;
  cfg.model_rnn_hidden = 32;
  cfg.model_attn_dim = 8;
  cfg.model_latent_dim = 8;
  cfg.model_head_hidden = 16;
  cfg.train_steps = 5;
  cfg.train_batch = 8;
  cfg.eval_nll = false;
  const auto trained = app::run_train(cfg);

  auto cfg_no = cfg;
  cfg_no.eval_fpc = false;
  cfg_no.out_dir = (tmp / "no_fpc").string();
  const auto base = app::run_eval(cfg_no, trained.checkpoint_path);
  auto cfg_r1 = cfg;
  cfg_r1.eval_fpc = true;
  cfg_r1.eval_fpc_rate = 1;
  cfg_r1.out_dir = (tmp / "rate1").string();
  const auto rate1 = app::run_eval(cfg_r1, trained.checkpoint_path);
  const bool identical = rate1.report.aggregate.ade == base.report.aggregate.ade &&
                         rate1.report.aggregate.fde == base.report.aggregate.fde &&
                         rate1.report.aggregate.ade_fpc == base.report.aggregate.ade &&
                         rate1.report.aggregate.fde_fpc == base.report.aggregate.fde;
  ok = ok && identical;
  detail << "; FPC rate 1 " << (identical ? "bit-identical" : "DIFFERS") << " vs no-FPC";
  fs::remove_all(tmp);

  report(6, ok, detail.str(), seconds_since(t0));
}

// --- criterion 7: NLL estimator calibration --------------------------------

void criterion_7() {
  const auto t0 = Clock::now();
  RandomEngine rng(701);
  const int steps = 4;
  std::vector<std::vector<geom::Position>> samples;
  samples.reserve(2000);
  for (int s = 0; s < 2000; ++s) {
    std::vector<geom::Position> traj;
    for (int t = 0; t < steps; ++t) traj.push_back({rng.normal(), rng.normal()});
    samples.push_back(std::move(traj));
  }
  const std::vector<geom::Position> gt(static_cast<std::size_t>(steps), geom::Position{0, 0});
  const auto nll = metrics::nll_kde(samples, gt);
  const double target = std::log(2.0 * 3.14159265358979323846);
  const double err = std::abs(nll.per_step - target);
  std::ostringstream detail;
  detail << "2000 standard-normal samples: per-step NLL " << std::fixed << std::setprecision(4)
         << nll.per_step << " vs log(2*pi) = " << target << ", |diff| = " << err
         << " (gate < 0.15)";
  report(7, err < 0.15, detail.str(), seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
  std::string ethucy_dir;
  if (const char* env = std::getenv("SVAE_ETHUCY_DIR")) ethucy_dir = env;
  if (ethucy_dir.empty()) ethucy_dir = "data/eth_ucy";
  bool fast = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--ethucy-dir" && i + 1 < argc) {
      ethucy_dir = argv[++i];
    } else if (arg == "--fast") {
      fast = true;
    }
  }

  std::cout << "acceptance suite" << (fast ? " (fast mode: criteria 4/8 informational)" : "")
            << std::endl;

  criterion_1();
  criterion_2();
  criterion_3(ethucy_dir);
  auto overfit = criterion_4(fast);
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(overfit, fast);
  report_skip(9, "full ETH/UCY training (hours-scale) is explicitly not a gate; train "
                 "with the CLI and compare eval metrics against published full-benchmark "
                 "numbers when the data and compute budget are available.");

  std::cout << (g_failures == 0 ? "acceptance: all gating criteria passed"
                                : "acceptance: FAILURES present")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
