#ifndef SVAE_TAPE_HPP
#define SVAE_TAPE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "svae/errors.hpp"

namespace svae::ad {

template <class Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <class Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Named learnable array with a gradient buffer of the same shape. Vectors are
// stored as n x 1 matrices.
template <class Real>
struct Block {
  std::string name;
  Mat<Real> value;
  Mat<Real> grad;

  void reset(std::string n, Eigen::Index rows, Eigen::Index cols) {
    name = std::move(n);
    value = Mat<Real>::Zero(rows, cols);
    grad = Mat<Real>::Zero(rows, cols);
  }
  void zero_grad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

// Reverse-mode tape over vector-valued nodes.
//
// Activations live in tape nodes; parameter gradients accumulate directly
// into Block::grad during backward(). A tape records one forward computation
// and supports one backward sweep. With grad disabled the same ops run
// value-only, which is the evaluation fast path: forward numerics are
// identical in both modes.
template <class Real>
class Tape {
public:
  using Index = std::int32_t;

  explicit Tape(bool grad_enabled = true) : grad_(grad_enabled) {}

  // Backward closures capture `this`; a tape stays where it was built.
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_; }
  std::size_t size() const { return nodes_.size(); }

  void clear() { nodes_.clear(); }

  const Vec<Real>& value(Index i) const { return nodes_[static_cast<std::size_t>(i)].value; }
  const Vec<Real>& grad(Index i) const { return nodes_[static_cast<std::size_t>(i)].grad; }

  Index input(Vec<Real> v) { return push(std::move(v), nullptr); }

  Index zeros(Eigen::Index n) { return push(Vec<Real>::Zero(n), nullptr); }

  Index affine(Block<Real>& w, Block<Real>& b, Index x) {
    if (w.value.cols() != value(x).size() || w.value.rows() != b.value.rows()) {
      throw ContractError("affine: shape mismatch for block " + w.name + " (" +
                          std::to_string(w.value.rows()) + "x" + std::to_string(w.value.cols()) +
                          " vs input " + std::to_string(value(x).size()) + ")");
    }
    Vec<Real> y = w.value * value(x) + b.value.col(0);
    return push(std::move(y), [this, &w, &b, x](Index self) {
      const Vec<Real>& g = grad(self);
      w.grad.noalias() += g * value(x).transpose();
      b.grad.col(0) += g;
      node(x).grad.noalias() += w.value.transpose() * g;
    });
  }

  Index leaky_relu(Index x, Real slope) {
    Vec<Real> y = value(x).unaryExpr([slope](Real v) { return v > Real(0) ? v : slope * v; });
    return push(std::move(y), [this, x, slope](Index self) {
      const Vec<Real>& xv = value(x);
      const Vec<Real>& g = grad(self);
      Vec<Real>& gx = node(x).grad;
      for (Eigen::Index i = 0; i < xv.size(); ++i) {
        gx[i] += xv[i] > Real(0) ? g[i] : slope * g[i];
      }
    });
  }

  Index add(Index a, Index b) {
    Vec<Real> y = value(a) + value(b);
    return push(std::move(y), [this, a, b](Index self) {
      node(a).grad += grad(self);
      node(b).grad += grad(self);
    });
  }

  Index sub(Index a, Index b) {
    Vec<Real> y = value(a) - value(b);
    return push(std::move(y), [this, a, b](Index self) {
      node(a).grad += grad(self);
      node(b).grad -= grad(self);
    });
  }

  Index scale(Index a, Real s) {
    Vec<Real> y = value(a) * s;
    return push(std::move(y), [this, a, s](Index self) { node(a).grad += grad(self) * s; });
  }

  Index concat(std::vector<Index> parts) {
    Eigen::Index n = 0;
    for (Index p : parts) n += value(p).size();
    Vec<Real> y(n);
    Eigen::Index off = 0;
    for (Index p : parts) {
      y.segment(off, value(p).size()) = value(p);
      off += value(p).size();
    }
    return push(std::move(y), [this, parts = std::move(parts)](Index self) {
      Eigen::Index off2 = 0;
      for (Index p : parts) {
        node(p).grad += grad(self).segment(off2, value(p).size());
        off2 += value(p).size();
      }
    });
  }

  Index slice(Index x, Eigen::Index offset, Eigen::Index len) {
    Vec<Real> y = value(x).segment(offset, len);
    return push(std::move(y), [this, x, offset, len](Index self) {
      node(x).grad.segment(offset, len) += grad(self);
    });
  }

  // Sum of equally sized vector nodes. Empty input is rejected; callers decide
  // what an empty sum means (the model uses zeros()).
  Index sum(std::vector<Index> xs) {
    if (xs.empty()) throw ContractError("sum: empty node list");
    Vec<Real> y = value(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) y += value(xs[i]);
    return push(std::move(y), [this, xs = std::move(xs)](Index self) {
      for (Index x : xs) node(x).grad += grad(self);
    });
  }

  // Gathers scalar nodes into one vector node.
  Index stack_scalars(std::vector<Index> xs) {
    Vec<Real> y(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) y[static_cast<Eigen::Index>(i)] = value(xs[i])[0];
    return push(std::move(y), [this, xs = std::move(xs)](Index self) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        node(xs[i]).grad[0] += grad(self)[static_cast<Eigen::Index>(i)];
      }
    });
  }

  // Sum of a node's elements; scalar.
  Index sum_elements(Index x) {
    Vec<Real> y(1);
    y[0] = value(x).sum();
    return push(std::move(y), [this, x](Index self) {
      node(x).grad.array() += grad(self)[0];
    });
  }

  Index dot(Index a, Index b) {
    Vec<Real> y(1);
    y[0] = value(a).dot(value(b));
    return push(std::move(y), [this, a, b](Index self) {
      const Real g = grad(self)[0];
      node(a).grad += g * value(b);
      node(b).grad += g * value(a);
    });
  }

  Index softmax(Index x) {
    const Vec<Real>& xv = value(x);
    Vec<Real> y = (xv.array() - xv.maxCoeff()).exp();
    y /= y.sum();
    return push(std::move(y), [this, x](Index self) {
      const Vec<Real>& y2 = value(self);
      const Vec<Real>& g = grad(self);
      const Real dot_gy = g.dot(y2);
      node(x).grad.array() += y2.array() * (g.array() - dot_gy);
    });
  }

  // Sum_k weights[k] * values[k], weights a vector node of matching length.
  Index weighted_sum(std::vector<Index> xs, Index weights) {
    if (xs.empty()) throw ContractError("weighted_sum: empty node list");
    if (value(weights).size() != static_cast<Eigen::Index>(xs.size())) {
      throw ContractError("weighted_sum: weight length mismatch");
    }
    const Vec<Real>& w = value(weights);
    Vec<Real> y = Vec<Real>::Zero(value(xs[0]).size());
    for (std::size_t i = 0; i < xs.size(); ++i) y += w[static_cast<Eigen::Index>(i)] * value(xs[i]);
    return push(std::move(y), [this, xs = std::move(xs), weights](Index self) {
      const Vec<Real>& g = grad(self);
      const Vec<Real>& w2 = value(weights);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        node(xs[i]).grad += w2[k] * g;
        node(weights).grad[k] += g.dot(value(xs[i]));
      }
    });
  }

  // Elementwise clamp; gradient flows only where the input is strictly inside
  // the interval.
  Index clamp(Index x, Real lo, Real hi) {
    Vec<Real> y = value(x).array().min(hi).max(lo);
    return push(std::move(y), [this, x, lo, hi](Index self) {
      const Vec<Real>& xv = value(x);
      const Vec<Real>& g = grad(self);
      Vec<Real>& gx = node(x).grad;
      for (Eigen::Index i = 0; i < xv.size(); ++i) {
        if (xv[i] > lo && xv[i] < hi) gx[i] += g[i];
      }
    });
  }

  // Reparameterized diagonal-Gaussian draw: mean + exp(log_var / 2) * noise.
  Index reparam_sample(Index mean, Index log_var, Vec<Real> noise) {
    if (value(mean).size() != noise.size() || value(log_var).size() != noise.size()) {
      throw ContractError("reparam_sample: length mismatch");
    }
    Vec<Real> std_dev = (value(log_var).array() * Real(0.5)).exp();
    Vec<Real> y = value(mean) + std_dev.cwiseProduct(noise);
    return push(std::move(y),
                [this, mean, log_var, noise = std::move(noise),
                 std_dev = std::move(std_dev)](Index self) {
                  const Vec<Real>& g = grad(self);
                  node(mean).grad += g;
                  node(log_var).grad.array() +=
                      Real(0.5) * g.array() * std_dev.array() * noise.array();
                });
  }

  // Diagonal-Gaussian log density of `point` under (mean, log_var); scalar.
  Index gaussian_log_density(Index mean, Index log_var, Index point) {
    const Vec<Real>& mu = value(mean);
    const Vec<Real>& lv = value(log_var);
    const Vec<Real>& x = value(point);
    if (mu.size() != lv.size() || mu.size() != x.size()) {
      throw ContractError("gaussian_log_density: length mismatch");
    }
    constexpr Real kLog2Pi = Real(1.8378770664093454835606594728112);
    Vec<Real> y(1);
    Real acc = 0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const Real diff = x[i] - mu[i];
      acc += Real(-0.5) * (kLog2Pi + lv[i] + diff * diff * std::exp(-lv[i]));
    }
    y[0] = acc;
    return push(std::move(y), [this, mean, log_var, point](Index self) {
      const Real g = grad(self)[0];
      const Vec<Real>& mu2 = value(mean);
      const Vec<Real>& lv2 = value(log_var);
      const Vec<Real>& x2 = value(point);
      for (Eigen::Index i = 0; i < mu2.size(); ++i) {
        const Real inv_var = std::exp(-lv2[i]);
        const Real diff = x2[i] - mu2[i];
        node(mean).grad[i] += g * diff * inv_var;
        node(log_var).grad[i] += g * Real(0.5) * (diff * diff * inv_var - Real(1));
        node(point).grad[i] -= g * diff * inv_var;
      }
    });
  }

  // Closed-form KL(q || p) between diagonal Gaussians; scalar, nonnegative.
  Index kl_diag(Index mu_q, Index lv_q, Index mu_p, Index lv_p) {
    const Vec<Real>& mq = value(mu_q);
    const Vec<Real>& lq = value(lv_q);
    const Vec<Real>& mp = value(mu_p);
    const Vec<Real>& lp = value(lv_p);
    if (mq.size() != lq.size() || mq.size() != mp.size() || mq.size() != lp.size()) {
      throw ContractError("kl_diag: dimension mismatch");
    }
    Vec<Real> y(1);
    Real acc = 0;
    for (Eigen::Index i = 0; i < mq.size(); ++i) {
      const Real var_ratio = std::exp(lq[i] - lp[i]);
      const Real md = mp[i] - mq[i];
      acc += Real(0.5) * (var_ratio + md * md * std::exp(-lp[i]) - Real(1) + lp[i] - lq[i]);
    }
    y[0] = acc;
    return push(std::move(y), [this, mu_q, lv_q, mu_p, lv_p](Index self) {
      const Real g = grad(self)[0];
      const Vec<Real>& mq2 = value(mu_q);
      const Vec<Real>& lq2 = value(lv_q);
      const Vec<Real>& mp2 = value(mu_p);
      const Vec<Real>& lp2 = value(lv_p);
      for (Eigen::Index i = 0; i < mq2.size(); ++i) {
        const Real inv_vp = std::exp(-lp2[i]);
        const Real var_ratio = std::exp(lq2[i] - lp2[i]);
        const Real md = mp2[i] - mq2[i];
        node(mu_q).grad[i] += g * (mq2[i] - mp2[i]) * inv_vp;
        node(mu_p).grad[i] += g * md * inv_vp;
        node(lv_q).grad[i] += g * Real(0.5) * (var_ratio - Real(1));
        node(lv_p).grad[i] += g * Real(0.5) * (Real(1) - var_ratio - md * md * inv_vp);
      }
    });
  }

  // ||x - target||^2 against a constant target; scalar.
  Index squared_error(Index x, Vec<Real> target) {
    if (value(x).size() != target.size()) throw ContractError("squared_error: length mismatch");
    Vec<Real> y(1);
    y[0] = (value(x) - target).squaredNorm();
    return push(std::move(y), [this, x, target = std::move(target)](Index self) {
      node(x).grad += Real(2) * grad(self)[0] * (value(x) - target);
    });
  }

  // GRU cell with gates r, z, candidate n:
  //   r = sigmoid(Wx_r x + bx_r + Wh_r h + bh_r)
  //   z = sigmoid(Wx_z x + bx_z + Wh_z h + bh_z)
  //   n = tanh(Wx_n x + bx_n + r .* (Wh_n h + bh_n))
  //   h' = (1 - z) .* n + z .* h
  // Weight rows are stacked [r; z; n].
  Index gru(Block<Real>& wx, Block<Real>& wh, Block<Real>& bx, Block<Real>& bh, Index x, Index h) {
    const Eigen::Index hidden = wh.value.cols();
    if (wx.value.rows() != 3 * hidden || wh.value.rows() != 3 * hidden ||
        bx.value.rows() != 3 * hidden || bh.value.rows() != 3 * hidden ||
        wx.value.cols() != value(x).size() || value(h).size() != hidden) {
      throw ContractError("gru: shape mismatch for block group " + wx.name);
    }
    Vec<Real> a = wx.value * value(x) + bx.value.col(0);
    Vec<Real> c = wh.value * value(h) + bh.value.col(0);
    Vec<Real> r(hidden), z(hidden), n(hidden), y(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) {
      r[i] = sigmoid(a[i] + c[i]);
      z[i] = sigmoid(a[hidden + i] + c[hidden + i]);
      n[i] = std::tanh(a[2 * hidden + i] + r[i] * c[2 * hidden + i]);
      y[i] = (Real(1) - z[i]) * n[i] + z[i] * value(h)[i];
    }
    return push(std::move(y), [this, &wx, &wh, &bx, &bh, x, h, r = std::move(r), z = std::move(z),
                               n = std::move(n), c = std::move(c), hidden](Index self) {
      const Vec<Real>& g = grad(self);
      const Vec<Real>& hv = value(h);
      const Vec<Real>& xv = value(x);
      Vec<Real> da(3 * hidden);   // grads of x-side pre-activations
      Vec<Real> dch(3 * hidden);  // grads of h-side pre-activations
      for (Eigen::Index i = 0; i < hidden; ++i) {
        const Real dn = g[i] * (Real(1) - z[i]);
        const Real dz = g[i] * (hv[i] - n[i]);
        const Real dan = dn * (Real(1) - n[i] * n[i]);
        const Real dr = dan * c[2 * hidden + i];
        const Real dar = dr * r[i] * (Real(1) - r[i]);
        const Real daz = dz * z[i] * (Real(1) - z[i]);
        da[i] = dar;
        da[hidden + i] = daz;
        da[2 * hidden + i] = dan;
        dch[i] = dar;
        dch[hidden + i] = daz;
        dch[2 * hidden + i] = dan * r[i];
        node(h).grad[i] += g[i] * z[i];
      }
      wx.grad.noalias() += da * xv.transpose();
      wh.grad.noalias() += dch * hv.transpose();
      bx.grad.col(0) += da;
      bh.grad.col(0) += dch;
      node(x).grad.noalias() += wx.value.transpose() * da;
      node(h).grad.noalias() += wh.value.transpose() * dch;
    });
  }

  // Seeds d(root)/d(root) = seed and runs the reverse sweep. root must be a
  // scalar node. One backward per tape.
  void backward(Index root, Real seed = Real(1)) {
    if (!grad_) throw ContractError("backward: tape was created without gradients");
    if (value(root).size() != 1) throw ContractError("backward: root must be scalar");
    node(root).grad[0] += seed;
    for (auto i = static_cast<std::int64_t>(nodes_.size()) - 1; i >= 0; --i) {
      auto& nd = nodes_[static_cast<std::size_t>(i)];
      if (nd.back) nd.back(static_cast<Index>(i));
    }
  }

private:
  struct Node {
    Vec<Real> value;
    Vec<Real> grad;
    std::function<void(Index)> back;
  };

  Node& node(Index i) { return nodes_[static_cast<std::size_t>(i)]; }

  static Real sigmoid(Real v) { return Real(1) / (Real(1) + std::exp(-v)); }

  template <class Fn>
  Index push(Vec<Real> v, Fn&& back) {
    Node nd;
    nd.value = std::move(v);
    if (grad_) {
      nd.grad = Vec<Real>::Zero(nd.value.size());
      if constexpr (!std::is_same_v<std::decay_t<Fn>, std::nullptr_t>) {
        nd.back = std::forward<Fn>(back);
      }
    }
    nodes_.push_back(std::move(nd));
    return static_cast<Index>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  bool grad_;
};

}  // namespace svae::ad

#endif
