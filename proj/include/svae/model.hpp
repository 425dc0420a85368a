#ifndef SVAE_MODEL_HPP
#define SVAE_MODEL_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "svae/checkpoint.hpp"
#include "svae/errors.hpp"
#include "svae/nn.hpp"
#include "svae/random.hpp"
#include "svae/tape.hpp"
#include "svae/windows.hpp"

namespace svae::model {

struct ModelConfig {
  int embed_dim = 64;    // feature embedding width (self/neighbor nets)
  int obs_hidden = 256;  // observation GRU state width
  int rnn_hidden = 256;  // forward/backward GRU state width
  int attn_dim = 32;     // attention projection width
  int latent_dim = 32;
  int head_hidden = 64;  // hidden width of the Gaussian heads
  double leaky_slope = 0.2;
  double logvar_min = -8.0;
  double logvar_max = 4.0;
  // Default: closed-form KL between the per-step posterior and prior. The
  // alternative estimates it from the single drawn latent as
  // log q(z) - log p(z); same expectation, higher variance.
  bool kl_sample_mode = false;
};

// The full parameter set. Each named group realizes one part of the network:
// feature nets for the target's own state and for neighbor states (separate
// instances for the observation encoder and the backward branch), the
// first-frame embedding, the attention projections, three GRUs, the
// latent+displacement embedding feeding the forward GRU, the affine map
// producing the initial forward state, and the prior/posterior/decoder
// Gaussian heads.
template <class Real>
struct ModelParams {
  ModelConfig cfg;

  nn::Mlp<Real> self_embed;          // R^4 -> embed
  nn::Mlp<Real> neighbor_embed;      // R^4 -> embed
  nn::Mlp<Real> init_embed;          // R^2 -> obs_hidden
  nn::Mlp<Real> attn_query;          // obs_hidden -> attn_dim
  nn::Mlp<Real> attn_key;            // R^3 -> attn_dim
  nn::Mlp<Real> bwd_self_embed;      // R^4 -> embed
  nn::Mlp<Real> bwd_neighbor_embed;  // R^4 -> embed
  nn::Gru<Real> obs_gru;             // in 2*embed, state obs_hidden
  nn::Gru<Real> fwd_gru;             // in embed, state rnn_hidden
  nn::Gru<Real> bwd_gru;             // in 2*embed, state rnn_hidden
  nn::Mlp<Real> latent_disp_embed;   // latent+2 -> embed
  nn::Mlp<Real> state_init;          // obs_hidden -> rnn_hidden (single affine)
  nn::GaussianHead<Real> prior_head;      // rnn_hidden -> latent
  nn::GaussianHead<Real> posterior_head;  // 2*rnn_hidden -> latent
  nn::GaussianHead<Real> decoder_head;    // latent+rnn_hidden -> 2

  static ModelParams init(const ModelConfig& cfg, RandomEngine& rng) {
    const Real slope = static_cast<Real>(cfg.leaky_slope);
    const Real lv_min = static_cast<Real>(cfg.logvar_min);
    const Real lv_max = static_cast<Real>(cfg.logvar_max);
    ModelParams p;
    p.cfg = cfg;
    p.self_embed = nn::Mlp<Real>::make("self_embed", {4, cfg.embed_dim, cfg.embed_dim}, slope,
                                       false, rng);
    p.neighbor_embed = nn::Mlp<Real>::make("neighbor_embed", {4, cfg.embed_dim, cfg.embed_dim},
                                           slope, false, rng);
    p.init_embed = nn::Mlp<Real>::make("init_embed", {2, cfg.embed_dim, cfg.obs_hidden}, slope,
                                       false, rng);
    p.attn_query = nn::Mlp<Real>::make("attn_query", {cfg.obs_hidden, cfg.attn_dim}, slope,
                                       false, rng);
    p.attn_key = nn::Mlp<Real>::make("attn_key", {3, cfg.attn_dim}, slope, false, rng);
    p.bwd_self_embed = nn::Mlp<Real>::make("bwd_self_embed", {4, cfg.embed_dim, cfg.embed_dim},
                                           slope, false, rng);
    p.bwd_neighbor_embed = nn::Mlp<Real>::make(
        "bwd_neighbor_embed", {4, cfg.embed_dim, cfg.embed_dim}, slope, false, rng);
    p.obs_gru = nn::Gru<Real>::make("obs_gru", 2 * cfg.embed_dim, cfg.obs_hidden, rng);
    p.fwd_gru = nn::Gru<Real>::make("fwd_gru", cfg.embed_dim, cfg.rnn_hidden, rng);
    p.bwd_gru = nn::Gru<Real>::make("bwd_gru", 2 * cfg.embed_dim, cfg.rnn_hidden, rng);
    p.latent_disp_embed = nn::Mlp<Real>::make("latent_disp_embed",
                                              {cfg.latent_dim + 2, cfg.embed_dim}, slope, true,
                                              rng);
    p.state_init = nn::Mlp<Real>::make("state_init", {cfg.obs_hidden, cfg.rnn_hidden}, slope,
                                       false, rng);
    p.prior_head = nn::GaussianHead<Real>::make("prior_head", cfg.rnn_hidden, cfg.head_hidden,
                                                cfg.latent_dim, slope, lv_min, lv_max, rng);
    p.posterior_head =
        nn::GaussianHead<Real>::make("posterior_head", 2 * cfg.rnn_hidden, cfg.head_hidden,
                                     cfg.latent_dim, slope, lv_min, lv_max, rng);
    p.decoder_head =
        nn::GaussianHead<Real>::make("decoder_head", cfg.latent_dim + cfg.rnn_hidden,
                                     cfg.head_hidden, 2, slope, lv_min, lv_max, rng);
    return p;
  }

  std::vector<ad::Block<Real>*> blocks() {
    std::vector<ad::Block<Real>*> out;
    self_embed.collect(out);
    neighbor_embed.collect(out);
    init_embed.collect(out);
    attn_query.collect(out);
    attn_key.collect(out);
    bwd_self_embed.collect(out);
    bwd_neighbor_embed.collect(out);
    obs_gru.collect(out);
    fwd_gru.collect(out);
    bwd_gru.collect(out);
    latent_disp_embed.collect(out);
    state_init.collect(out);
    prior_head.collect(out);
    posterior_head.collect(out);
    decoder_head.collect(out);
    return out;
  }

  void zero_grad() {
    for (auto* b : blocks()) b->zero_grad();
  }
};

// Observation encoding: final forward state, the per-frame observation GRU
// states, and the recorded attention weights (frame-indexed 0..T-1; frame 0
// has no attention step and stays empty; empty frames likewise).
template <class Real>
struct EncodedObservation {
  ad::Vec<Real> h_init;
  std::vector<ad::Vec<Real>> q_states;
  std::vector<std::vector<double>> attention;
};

// One sampled prediction: per-step latents, displacements, positions (running
// sum from the last observed position, in sampling order), and the decoder
// distribution parameters behind each displacement.
template <class Real>
struct RolloutSample {
  std::vector<ad::Vec<Real>> latents;
  std::vector<std::array<Real, 2>> displacements;
  std::vector<std::array<Real, 2>> positions;
  std::vector<std::array<Real, 2>> decoder_mean;
  std::vector<std::array<Real, 2>> decoder_log_var;

  std::vector<geom::Position> positions_xy() const {
    std::vector<geom::Position> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.push_back({static_cast<double>(p[0]),
                                                   static_cast<double>(p[1])});
    return out;
  }
};

// Per-step Gaussian noise driving one teacher-forced loss evaluation.
template <class Real>
struct NoisePack {
  std::vector<ad::Vec<Real>> z_noise;  // H x latent_dim
  std::vector<ad::Vec<Real>> d_noise;  // H x 2

  static NoisePack draw(int steps, int latent_dim, RandomEngine& rng) {
    NoisePack n;
    n.z_noise.reserve(steps);
    n.d_noise.reserve(steps);
    for (int t = 0; t < steps; ++t) {
      ad::Vec<Real> z(latent_dim);
      for (int i = 0; i < latent_dim; ++i) z[i] = static_cast<Real>(rng.normal());
      ad::Vec<Real> d(2);
      d[0] = static_cast<Real>(rng.normal());
      d[1] = static_cast<Real>(rng.normal());
      n.z_noise.push_back(std::move(z));
      n.d_noise.push_back(std::move(d));
    }
    return n;
  }

  static NoisePack zeros(int steps, int latent_dim) {
    NoisePack n;
    for (int t = 0; t < steps; ++t) {
      n.z_noise.push_back(ad::Vec<Real>::Zero(latent_dim));
      n.d_noise.push_back(ad::Vec<Real>::Zero(2));
    }
    return n;
  }
};

struct LossParts {
  double total = 0;
  double recon = 0;
  double kl = 0;
};

// Values of the per-step posterior and prior distributions along a
// teacher-forced pass; used to probe how ground-truth futures shape the
// posterior.
template <class Real>
struct TeacherTrace {
  std::vector<ad::Vec<Real>> post_mean, post_log_var;
  std::vector<ad::Vec<Real>> prior_mean, prior_log_var;
};

template <class Real>
class Model {
public:
  using Tape = ad::Tape<Real>;
  using Index = typename Tape::Index;

  explicit Model(ModelParams<Real> params) : p_(std::move(params)) {}

  const ModelConfig& config() const { return p_.cfg; }
  ModelParams<Real>& params() { return p_; }
  const ModelParams<Real>& params() const { return p_; }

  // --- observation encoding -------------------------------------------

  struct TapedEncoding {
    Index h_init;
    std::vector<Index> q_states;
    std::vector<std::vector<double>> attention;
  };

  TapedEncoding encode_on_tape(Tape& tape, const data::ObservationWindow& w) {
    if (w.T < 2) {
      throw ContractError("encode: need at least 2 observed frames, got " + std::to_string(w.T));
    }
    TapedEncoding enc;
    enc.attention.resize(static_cast<std::size_t>(w.T));

    // Frame 0: init embedding summed over the initial neighbor offsets.
    Index q;
    const auto& first = w.neighbors[0];
    if (first.empty()) {
      q = tape.zeros(p_.cfg.obs_hidden);
    } else {
      std::vector<Index> feats;
      feats.reserve(first.size());
      for (const auto& nb : first) {
        feats.push_back(p_.init_embed.forward(
            tape, tape.input(to_vec({nb.state.rel_position.x, nb.state.rel_position.y}))));
      }
      q = feats.size() == 1 ? feats[0] : tape.sum(std::move(feats));
    }
    enc.q_states.push_back(q);

    for (int t = 1; t < w.T; ++t) {
      const auto O = observation_on_tape(tape, w, t, /*attended=*/true, q,
                                         &enc.attention[static_cast<std::size_t>(t)]);
      q = p_.obs_gru.step(tape, O, q);
      enc.q_states.push_back(q);
    }
    enc.h_init = p_.state_init.forward(tape, q);
    return enc;
  }

  EncodedObservation<Real> encode_observation(const data::ObservationWindow& w) {
    Tape tape(false);
    auto enc = encode_on_tape(tape, w);
    EncodedObservation<Real> out;
    out.h_init = tape.value(enc.h_init);
    out.q_states.reserve(enc.q_states.size());
    for (Index q : enc.q_states) out.q_states.push_back(tape.value(q));
    out.attention = std::move(enc.attention);
    return out;
  }

  // --- backward (posterior) branch -------------------------------------

  std::vector<Index> backward_on_tape(Tape& tape, const data::ObservationWindow& w) {
    if (w.H < 1 || static_cast<int>(w.fut.size()) != w.H) {
      throw ContractError("backward pass needs the ground-truth future frames");
    }
    std::vector<Index> states(static_cast<std::size_t>(w.H));
    Index b = tape.zeros(p_.cfg.rnn_hidden);
    for (int t = w.total() - 1; t >= w.T; --t) {
      const auto O = observation_on_tape(tape, w, t, /*attended=*/false, Index{-1}, nullptr);
      b = p_.bwd_gru.step(tape, O, b);
      states[static_cast<std::size_t>(t - w.T)] = b;
    }
    return states;
  }

  std::vector<ad::Vec<Real>> backward_states(const data::ObservationWindow& w) {
    Tape tape(false);
    auto idx = backward_on_tape(tape, w);
    std::vector<ad::Vec<Real>> out;
    out.reserve(idx.size());
    for (Index i : idx) out.push_back(tape.value(i));
    return out;
  }

  // --- generative rollout ----------------------------------------------

  // Samples an H-step future from the conditional prior. mean_only replaces
  // every draw by the distribution mean (debug mode). Throws TrainingError if
  // the recurrent state leaves the finite range, naming the step.
  RolloutSample<Real> rollout(const ad::Vec<Real>& h_init, const geom::Position& x_last,
                              int steps, RandomEngine& rng, bool mean_only = false) {
    Tape tape(false);
    RolloutSample<Real> out;
    Index h = tape.input(h_init);
    Real px = static_cast<Real>(x_last.x);
    Real py = static_cast<Real>(x_last.y);
    for (int t = 0; t < steps; ++t) {
      const auto pri = p_.prior_head.forward(tape, h);
      ad::Vec<Real> z_noise = mean_only ? ad::Vec<Real>::Zero(p_.cfg.latent_dim)
                                        : draw_noise(p_.cfg.latent_dim, rng);
      const Index z = tape.reparam_sample(pri.mean, pri.log_var, std::move(z_noise));
      const auto dec = p_.decoder_head.forward(tape, tape.concat({z, h}));
      ad::Vec<Real> d_noise = mean_only ? ad::Vec<Real>::Zero(2) : draw_noise(2, rng);
      const Index d = tape.reparam_sample(dec.mean, dec.log_var, std::move(d_noise));

      const auto& dv = tape.value(d);
      px += dv[0];
      py += dv[1];
      out.latents.push_back(tape.value(z));
      out.displacements.push_back({dv[0], dv[1]});
      out.positions.push_back({px, py});
      out.decoder_mean.push_back({tape.value(dec.mean)[0], tape.value(dec.mean)[1]});
      out.decoder_log_var.push_back({tape.value(dec.log_var)[0], tape.value(dec.log_var)[1]});

      h = p_.fwd_gru.step(tape, p_.latent_disp_embed.forward(tape, tape.concat({z, d})), h);
      if (!tape.value(h).allFinite()) {
        throw TrainingError("rollout: non-finite state at step " + std::to_string(t + 1));
      }
    }
    return out;
  }

  RolloutSample<Real> rollout(const EncodedObservation<Real>& enc, const geom::Position& x_last,
                              int steps, RandomEngine& rng, bool mean_only = false) {
    return rollout(enc.h_init, x_last, steps, rng, mean_only);
  }

  // --- training loss ----------------------------------------------------

  // Teacher-forced evidence-bound loss: squared position-offset error of the
  // accumulated sampled displacements plus the per-step divergence between
  // posterior and prior, averaged over the horizon. Latents come from the
  // posterior; each z and d is drawn once via reparameterization.
  Index training_loss_on_tape(Tape& tape, const data::ObservationWindow& w,
                              const NoisePack<Real>& noise, LossParts* parts = nullptr,
                              TeacherTrace<Real>* trace = nullptr) {
    if (static_cast<int>(noise.z_noise.size()) < w.H) {
      throw ContractError("training_loss: noise pack shorter than horizon");
    }
    const auto enc = encode_on_tape(tape, w);
    const auto back = backward_on_tape(tape, w);

    const geom::Position x_last = w.obs.back();
    Index h = enc.h_init;
    Index cum{};
    std::vector<Index> terms;
    terms.reserve(static_cast<std::size_t>(2 * w.H));
    double recon_acc = 0, kl_acc = 0;

    for (int t = 0; t < w.H; ++t) {
      const auto post =
          p_.posterior_head.forward(tape, tape.concat({back[static_cast<std::size_t>(t)], h}));
      const Index z = tape.reparam_sample(post.mean, post.log_var,
                                          noise.z_noise[static_cast<std::size_t>(t)]);
      const auto pri = p_.prior_head.forward(tape, h);
      Index kl;
      if (p_.cfg.kl_sample_mode) {
        kl = tape.sub(tape.gaussian_log_density(post.mean, post.log_var, z),
                      tape.gaussian_log_density(pri.mean, pri.log_var, z));
      } else {
        kl = tape.kl_diag(post.mean, post.log_var, pri.mean, pri.log_var);
      }
      const auto dec = p_.decoder_head.forward(tape, tape.concat({z, h}));
      const Index d =
          tape.reparam_sample(dec.mean, dec.log_var, noise.d_noise[static_cast<std::size_t>(t)]);
      cum = (t == 0) ? d : tape.add(cum, d);

      const geom::Vec2 offset = w.fut[static_cast<std::size_t>(t)] - x_last;
      const Index recon = tape.squared_error(cum, to_vec({offset.x, offset.y}));
      terms.push_back(recon);
      terms.push_back(kl);
      recon_acc += static_cast<double>(tape.value(recon)[0]);
      kl_acc += static_cast<double>(tape.value(kl)[0]);

      if (trace != nullptr) {
        trace->post_mean.push_back(tape.value(post.mean));
        trace->post_log_var.push_back(tape.value(post.log_var));
        trace->prior_mean.push_back(tape.value(pri.mean));
        trace->prior_log_var.push_back(tape.value(pri.log_var));
      }

      h = p_.fwd_gru.step(tape, p_.latent_disp_embed.forward(tape, tape.concat({z, d})), h);
    }

    const Index loss =
        tape.scale(tape.sum_elements(tape.stack_scalars(std::move(terms))), Real(1) / w.H);
    const double total = static_cast<double>(tape.value(loss)[0]);
    if (!std::isfinite(total)) throw TrainingError("training_loss: non-finite loss");
    if (parts != nullptr) {
      parts->total = total;
      parts->recon = recon_acc / w.H;
      parts->kl = kl_acc / w.H;
    }
    return loss;
  }

  LossParts training_loss(const data::ObservationWindow& w, RandomEngine& rng) {
    Tape tape(false);
    const auto noise = NoisePack<Real>::draw(w.H, p_.cfg.latent_dim, rng);
    LossParts parts;
    training_loss_on_tape(tape, w, noise, &parts);
    return parts;
  }

  TeacherTrace<Real> teacher_trace(const data::ObservationWindow& w,
                                   const NoisePack<Real>& noise) {
    Tape tape(false);
    TeacherTrace<Real> trace;
    training_loss_on_tape(tape, w, noise, nullptr, &trace);
    return trace;
  }

  // --- checkpoint -------------------------------------------------------

  void save_blocks(ckpt::Container& c) {
    for (const auto* b : blocks()) c.add_matrix("param/" + b->name, b->value);
  }

  void load_blocks(const ckpt::Container& c) {
    for (auto* b : blocks()) {
      b->value = c.template get_matrix<Real>("param/" + b->name, b->value.rows(),
                                             b->value.cols());
    }
  }

  std::vector<ad::Block<Real>*> blocks() { return p_.blocks(); }

private:
  static ad::Vec<Real> to_vec(std::initializer_list<double> xs) {
    ad::Vec<Real> v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = static_cast<Real>(x);
    return v;
  }

  static ad::Vec<Real> draw_noise(int n, RandomEngine& rng) {
    ad::Vec<Real> v(n);
    for (int i = 0; i < n; ++i) v[i] = static_cast<Real>(rng.normal());
    return v;
  }

  // Local observation vector at window frame t >= 1: the self-state features
  // concatenated with the neighbor-feature synthesis. The encoder path uses
  // attention over social features; the backward branch sums neighbor
  // features with unit weights.
  Index observation_on_tape(Tape& tape, const data::ObservationWindow& w, int t, bool attended,
                            Index q_prev, std::vector<double>* attention_out) {
    const geom::Displacement d = w.disp(t);
    const geom::Displacement acc = (t >= 2) ? d - w.disp(t - 1) : geom::Displacement{};
    auto& self_net = attended ? p_.self_embed : p_.bwd_self_embed;
    auto& nb_net = attended ? p_.neighbor_embed : p_.bwd_neighbor_embed;
    const Index self_feat =
        self_net.forward(tape, tape.input(to_vec({d.x, d.y, acc.x, acc.y})));

    const auto& nbs = w.neighbors[static_cast<std::size_t>(t)];
    Index nb_feat;
    if (nbs.empty()) {
      nb_feat = tape.zeros(p_.cfg.embed_dim);
    } else {
      std::vector<Index> values;
      values.reserve(nbs.size());
      for (const auto& nb : nbs) {
        values.push_back(nb_net.forward(
            tape, tape.input(to_vec({nb.state.rel_position.x, nb.state.rel_position.y,
                                     nb.state.rel_velocity.x, nb.state.rel_velocity.y}))));
      }
      if (attended) {
        const Index qproj = p_.attn_query.forward(tape, q_prev);
        std::vector<Index> logits;
        logits.reserve(nbs.size());
        for (const auto& nb : nbs) {
          const Index kproj = p_.attn_key.forward(
              tape, tape.input(to_vec(
                        {nb.features.distance, nb.features.bearing_cos, nb.features.mpd})));
          logits.push_back(tape.leaky_relu(tape.dot(qproj, kproj),
                                           static_cast<Real>(p_.cfg.leaky_slope)));
        }
        const Index weights = tape.softmax(tape.stack_scalars(std::move(logits)));
        if (attention_out != nullptr) {
          const auto& wv = tape.value(weights);
          attention_out->assign(wv.data(), wv.data() + wv.size());
        }
        nb_feat = tape.weighted_sum(std::move(values), weights);
      } else {
        nb_feat = values.size() == 1 ? values[0] : tape.sum(std::move(values));
      }
    }
    return tape.concat({self_feat, nb_feat});
  }

  ModelParams<Real> p_;
};

}  // namespace svae::model

#endif
