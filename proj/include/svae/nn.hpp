#ifndef SVAE_NN_HPP
#define SVAE_NN_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "svae/random.hpp"
#include "svae/tape.hpp"

namespace svae::nn {

template <class Real>
void uniform_init(ad::Mat<Real>& m, Real bound, RandomEngine& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m(r, c) = static_cast<Real>((2.0 * rng.uniform() - 1.0) * static_cast<double>(bound));
    }
  }
}

// Stack of affine layers with LeakyReLU between them (and optionally after
// the last one). dims = {in, hidden..., out}.
template <class Real>
struct Mlp {
  std::vector<ad::Block<Real>> weights;
  std::vector<ad::Block<Real>> biases;
  Real slope = Real(0.2);
  bool activate_last = false;

  static Mlp make(const std::string& name, const std::vector<int>& dims, Real slope,
                  bool activate_last, RandomEngine& rng) {
    Mlp mlp;
    mlp.slope = slope;
    mlp.activate_last = activate_last;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      ad::Block<Real> w, b;
      w.reset(name + ".w" + std::to_string(i), dims[i + 1], dims[i]);
      b.reset(name + ".b" + std::to_string(i), dims[i + 1], 1);
      const Real bound = Real(1) / std::sqrt(static_cast<Real>(dims[i]));
      uniform_init(w.value, bound, rng);
      uniform_init(b.value, bound, rng);
      mlp.weights.push_back(std::move(w));
      mlp.biases.push_back(std::move(b));
    }
    return mlp;
  }

  int in_dim() const { return static_cast<int>(weights.front().value.cols()); }
  int out_dim() const { return static_cast<int>(weights.back().value.rows()); }

  typename ad::Tape<Real>::Index forward(ad::Tape<Real>& tape,
                                         typename ad::Tape<Real>::Index x) {
    auto h = x;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      h = tape.affine(weights[i], biases[i], h);
      if (i + 1 < weights.size() || activate_last) h = tape.leaky_relu(h, slope);
    }
    return h;
  }

  void collect(std::vector<ad::Block<Real>*>& out) {
    for (auto& w : weights) out.push_back(&w);
    for (auto& b : biases) out.push_back(&b);
  }
};

// GRU cell parameters; see Tape::gru for the gate equations.
template <class Real>
struct Gru {
  ad::Block<Real> wx, wh, bx, bh;
  int in_dim = 0;
  int hidden = 0;

  static Gru make(const std::string& name, int in_dim, int hidden, RandomEngine& rng) {
    Gru g;
    g.in_dim = in_dim;
    g.hidden = hidden;
    g.wx.reset(name + ".wx", 3 * hidden, in_dim);
    g.wh.reset(name + ".wh", 3 * hidden, hidden);
    g.bx.reset(name + ".bx", 3 * hidden, 1);
    g.bh.reset(name + ".bh", 3 * hidden, 1);
    const Real bound = Real(1) / std::sqrt(static_cast<Real>(hidden));
    uniform_init(g.wx.value, bound, rng);
    uniform_init(g.wh.value, bound, rng);
    uniform_init(g.bx.value, bound, rng);
    uniform_init(g.bh.value, bound, rng);
    return g;
  }

  typename ad::Tape<Real>::Index step(ad::Tape<Real>& tape, typename ad::Tape<Real>::Index x,
                                      typename ad::Tape<Real>::Index h) {
    return tape.gru(wx, wh, bx, bh, x, h);
  }

  void collect(std::vector<ad::Block<Real>*>& out) {
    out.push_back(&wx);
    out.push_back(&wh);
    out.push_back(&bx);
    out.push_back(&bh);
  }
};

// MLP head emitting a diagonal Gaussian: the output splits into mean and
// log-variance halves, with log-variance clamped to [lv_min, lv_max].
// Gradients pass through the clamp only in its interior.
template <class Real>
struct GaussianHead {
  Mlp<Real> net;
  int dim = 0;
  Real lv_min = Real(-8);
  Real lv_max = Real(4);

  struct Out {
    typename ad::Tape<Real>::Index mean;
    typename ad::Tape<Real>::Index log_var;
  };

  static GaussianHead make(const std::string& name, int in_dim, int hidden, int dim, Real slope,
                           Real lv_min, Real lv_max, RandomEngine& rng) {
    GaussianHead h;
    h.dim = dim;
    h.lv_min = lv_min;
    h.lv_max = lv_max;
    h.net = Mlp<Real>::make(name, {in_dim, hidden, 2 * dim}, slope, false, rng);
    return h;
  }

  Out forward(ad::Tape<Real>& tape, typename ad::Tape<Real>::Index x) {
    auto raw = net.forward(tape, x);
    Out out;
    out.mean = tape.slice(raw, 0, dim);
    out.log_var = tape.clamp(tape.slice(raw, dim, dim), lv_min, lv_max);
    return out;
  }

  void collect(std::vector<ad::Block<Real>*>& out) { net.collect(out); }
};

// Adam with bias correction. step() consumes and zeroes the accumulated
// gradients of every registered block.
template <class Real>
struct Adam {
  Real lr = Real(3e-4);
  Real beta1 = Real(0.9);
  Real beta2 = Real(0.999);
  Real eps = Real(1e-8);
  std::int64_t t = 0;
  std::vector<ad::Mat<Real>> m;
  std::vector<ad::Mat<Real>> v;

  void init(const std::vector<ad::Block<Real>*>& blocks) {
    m.clear();
    v.clear();
    for (const auto* b : blocks) {
      m.push_back(ad::Mat<Real>::Zero(b->value.rows(), b->value.cols()));
      v.push_back(ad::Mat<Real>::Zero(b->value.rows(), b->value.cols()));
    }
  }

  void step(const std::vector<ad::Block<Real>*>& blocks) {
    if (m.size() != blocks.size()) throw ContractError("adam: not initialized for these blocks");
    ++t;
    const Real bc1 = Real(1) - std::pow(beta1, static_cast<Real>(t));
    const Real bc2 = Real(1) - std::pow(beta2, static_cast<Real>(t));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      ad::Block<Real>& b = *blocks[i];
      if (!b.grad.allFinite()) {
        throw TrainingError("adam: non-finite gradient in block " + b.name);
      }
      m[i] = beta1 * m[i] + (Real(1) - beta1) * b.grad;
      v[i] = beta2 * v[i] + (Real(1) - beta2) * b.grad.cwiseProduct(b.grad);
      const ad::Mat<Real> m_hat = m[i] / bc1;
      const ad::Mat<Real> v_hat = v[i] / bc2;
      b.value.array() -= lr * m_hat.array() / (v_hat.array().sqrt() + eps);
      if (!b.value.allFinite()) {
        throw TrainingError("adam: non-finite parameter after update in block " + b.name);
      }
      b.zero_grad();
    }
  }
};

}  // namespace svae::nn

#endif
