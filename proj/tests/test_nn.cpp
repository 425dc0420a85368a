#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "svae/errors.hpp"
#include "svae/nn.hpp"
#include "svae/random.hpp"
#include "svae/tape.hpp"
#include "testutil.hpp"

using namespace svae;
using Tape = ad::Tape<double>;
using Vec = ad::Vec<double>;

namespace {

Vec make_vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vec random_vec(Eigen::Index n, RandomEngine& rng) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("mlp: zero weights and bias give zero output") {
  RandomEngine rng(1);
  auto mlp = nn::Mlp<double>::make("m", {3, 4, 2}, 0.2, false, rng);
  for (auto& w : mlp.weights) w.value.setZero();
  for (auto& b : mlp.biases) b.value.setZero();
  Tape tape(false);
  auto y = mlp.forward(tape, tape.input(make_vec({1, -2, 3})));
  CHECK(tape.value(y).norm() == 0.0);
}

TEST_CASE("mlp: identity layer applies LeakyReLU slope 0.2") {
  RandomEngine rng(1);
  auto mlp = nn::Mlp<double>::make("m", {2, 2}, 0.2, true, rng);
  mlp.weights[0].value.setIdentity();
  mlp.biases[0].value.setZero();
  Tape tape(false);
  auto y = mlp.forward(tape, tape.input(make_vec({1, -1})));
  CHECK(tape.value(y)[0] == doctest::Approx(1.0));
  CHECK(tape.value(y)[1] == doctest::Approx(-0.2));
}

TEST_CASE("mlp: shape mismatch raises contract error") {
  RandomEngine rng(1);
  auto mlp = nn::Mlp<double>::make("m", {3, 2}, 0.2, false, rng);
  Tape tape(false);
  CHECK_THROWS_AS(mlp.forward(tape, tape.input(make_vec({1, 2}))), ContractError);
}

TEST_CASE("mlp: gradient matches central finite differences") {
  RandomEngine rng(11);
  auto mlp = nn::Mlp<double>::make("m", {4, 6, 3}, 0.2, false, rng);
  const Vec x = random_vec(4, rng);
  const Vec target = random_vec(3, rng);

  std::vector<ad::Block<double>*> blocks;
  mlp.collect(blocks);

  auto loss_value = [&]() {
    Tape t(false);
    return t.value(t.squared_error(mlp.forward(t, t.input(x)), target))[0];
  };

  Tape tape(true);
  auto loss = tape.squared_error(mlp.forward(tape, tape.input(x)), target);
  tape.backward(loss);

  auto fd = testutil::finite_difference<double>(loss_value, blocks);
  CHECK(testutil::max_rel_error(blocks, fd) < 1e-4);
}

TEST_CASE("gru: zero parameters halve the previous state") {
  RandomEngine rng(2);
  auto gru = nn::Gru<double>::make("g", 3, 4, rng);
  gru.wx.value.setZero();
  gru.wh.value.setZero();
  gru.bx.value.setZero();
  gru.bh.value.setZero();
  Tape tape(false);
  const Vec prev = make_vec({1.0, -2.0, 0.5, 4.0});
  auto h = gru.step(tape, tape.input(make_vec({1, 2, 3})), tape.input(prev));
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(tape.value(h)[i] == doctest::Approx(0.5 * prev[i]));
  }
}

TEST_CASE("gru: all-zero inputs and parameters give zero state") {
  RandomEngine rng(2);
  auto gru = nn::Gru<double>::make("g", 2, 3, rng);
  gru.wx.value.setZero();
  gru.wh.value.setZero();
  gru.bx.value.setZero();
  gru.bh.value.setZero();
  Tape tape(false);
  auto h = gru.step(tape, tape.zeros(2), tape.zeros(3));
  CHECK(tape.value(h).norm() == 0.0);
}

TEST_CASE("gru: gradient matches central finite differences") {
  RandomEngine rng(21);
  auto gru = nn::Gru<double>::make("g", 3, 5, rng);
  const Vec x0 = random_vec(3, rng);
  const Vec x1 = random_vec(3, rng);
  const Vec target = random_vec(5, rng);

  std::vector<ad::Block<double>*> blocks;
  gru.collect(blocks);

  // Two chained steps so the hidden-state path is exercised.
  auto loss_value = [&]() {
    Tape t(false);
    auto h = gru.step(t, t.input(x0), t.zeros(5));
    h = gru.step(t, t.input(x1), h);
    return t.value(t.squared_error(h, target))[0];
  };

  Tape tape(true);
  auto h = gru.step(tape, tape.input(x0), tape.zeros(5));
  h = gru.step(tape, tape.input(x1), h);
  tape.backward(tape.squared_error(h, target));

  auto fd = testutil::finite_difference<double>(loss_value, blocks);
  CHECK(testutil::max_rel_error(blocks, fd) < 1e-4);
}

TEST_CASE("reparam sample: zero noise returns the mean") {
  Tape tape(false);
  auto mean = tape.input(make_vec({1, 2, 3}));
  auto lv = tape.input(make_vec({0.3, -1, 2}));
  auto z = tape.reparam_sample(mean, lv, Vec::Zero(3));
  CHECK((tape.value(z) - make_vec({1, 2, 3})).norm() == 0.0);
}

TEST_CASE("reparam sample: unit noise with log_var zero adds one") {
  Tape tape(false);
  auto mean = tape.input(make_vec({1, 2}));
  auto lv = tape.input(make_vec({0, 0}));
  auto z = tape.reparam_sample(mean, lv, make_vec({1, 1}));
  CHECK(tape.value(z)[0] == doctest::Approx(2.0));
  CHECK(tape.value(z)[1] == doctest::Approx(3.0));
}

TEST_CASE("reparam sample: gradient matches finite differences") {
  RandomEngine rng(31);
  ad::Block<double> mean_blk, lv_blk;
  mean_blk.reset("mean", 3, 1);
  lv_blk.reset("lv", 3, 1);
  nn::uniform_init(mean_blk.value, 1.0, rng);
  nn::uniform_init(lv_blk.value, 1.0, rng);
  const Vec noise = random_vec(3, rng);
  const Vec target = random_vec(3, rng);

  auto loss_value = [&]() {
    Tape t(false);
    auto mean = t.input(mean_blk.value.col(0));
    auto lv = t.input(lv_blk.value.col(0));
    return t.value(t.squared_error(t.reparam_sample(mean, lv, noise), target))[0];
  };

  Tape tape(true);
  auto mean_in = tape.input(mean_blk.value.col(0));
  auto lv_in = tape.input(lv_blk.value.col(0));
  auto z = tape.reparam_sample(mean_in, lv_in, noise);
  tape.backward(tape.squared_error(z, target));

  std::vector<ad::Block<double>*> blocks{&mean_blk, &lv_blk};
  auto fd = testutil::finite_difference<double>(loss_value, blocks);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(tape.grad(mean_in)[i] == doctest::Approx(fd[0](i, 0)).epsilon(1e-4));
    CHECK(tape.grad(lv_in)[i] == doctest::Approx(fd[1](i, 0)).epsilon(1e-4));
  }
}

TEST_CASE("gaussian log density: standard 2D Gaussian at the origin") {
  Tape tape(false);
  auto mu = tape.zeros(2);
  auto lv = tape.zeros(2);
  auto x = tape.zeros(2);
  auto ld = tape.gaussian_log_density(mu, lv, x);
  CHECK(tape.value(ld)[0] == doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("gaussian log density: value at the mean scales with dimension") {
  for (int d = 1; d <= 5; ++d) {
    Tape tape(false);
    auto ld = tape.gaussian_log_density(tape.zeros(d), tape.zeros(d), tape.zeros(d));
    CHECK(tape.value(ld)[0] == doctest::Approx(-0.5 * d * std::log(2.0 * M_PI)));
  }
}

TEST_CASE("gaussian log density: density integrates to one on a 1D grid") {
  // Trapezoid rule over [-12, 12] for a non-standard Gaussian.
  const double mu = 0.7, lv = -0.5;
  Tape tape(false);
  auto mu_n = tape.input(make_vec({mu}));
  auto lv_n = tape.input(make_vec({lv}));
  const double a = -12, b = 12;
  const int n = 20000;
  const double h = (b - a) / n;
  double integral = 0;
  for (int i = 0; i <= n; ++i) {
    auto x = tape.input(make_vec({a + i * h}));
    const double p = std::exp(tape.value(tape.gaussian_log_density(mu_n, lv_n, x))[0]);
    integral += (i == 0 || i == n) ? 0.5 * p : p;
  }
  integral *= h;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kl: identical distributions have zero divergence") {
  Tape tape(false);
  auto mu = tape.input(make_vec({0.5, -1}));
  auto lv = tape.input(make_vec({0.2, 0.9}));
  auto kl = tape.kl_diag(mu, lv, mu, lv);
  CHECK(std::abs(tape.value(kl)[0]) <= 1e-12);
}

TEST_CASE("kl: unit mean shift at unit variance is one half per dim") {
  for (int d = 1; d <= 3; ++d) {
    Tape tape(false);
    Vec ones = Vec::Ones(d);
    auto kl = tape.kl_diag(tape.input(ones), tape.zeros(d), tape.zeros(d), tape.zeros(d));
    CHECK(tape.value(kl)[0] == doctest::Approx(0.5 * d));
  }
}

TEST_CASE("kl: matches Monte-Carlo estimate") {
  // KL(q||p) = E_q[log q(z) - log p(z)] with 1e6 reparameterized draws.
  RandomEngine rng(5);
  const Vec mu_q = make_vec({0.3, -0.6});
  const Vec lv_q = make_vec({-0.4, 0.5});
  const Vec mu_p = make_vec({-0.2, 0.1});
  const Vec lv_p = make_vec({0.3, -0.2});

  Tape tape(false);
  auto qm = tape.input(mu_q), ql = tape.input(lv_q);
  auto pm = tape.input(mu_p), pl = tape.input(lv_p);
  const double closed = tape.value(tape.kl_diag(qm, ql, pm, pl))[0];

  double acc = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    Vec z(2);
    for (int k = 0; k < 2; ++k) z[k] = mu_q[k] + std::exp(0.5 * lv_q[k]) * rng.normal();
    auto zn = tape.input(z);
    const double lq = tape.value(tape.gaussian_log_density(qm, ql, zn))[0];
    const double lp = tape.value(tape.gaussian_log_density(pm, pl, zn))[0];
    acc += lq - lp;
  }
  CHECK(closed == doctest::Approx(acc / n).epsilon(1e-2));
}

TEST_CASE("kl: nonnegative on random inputs, zero only at equality") {
  RandomEngine rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    Tape tape(false);
    auto qm = tape.input(random_vec(3, rng));
    auto ql = tape.input(random_vec(3, rng));
    auto pm = tape.input(random_vec(3, rng));
    auto pl = tape.input(random_vec(3, rng));
    const double kl = tape.value(tape.kl_diag(qm, ql, pm, pl))[0];
    CHECK(kl >= -1e-12);
    const bool equal = (tape.value(qm) - tape.value(pm)).cwiseAbs().maxCoeff() < 1e-12 &&
                       (tape.value(ql) - tape.value(pl)).cwiseAbs().maxCoeff() < 1e-12;
    if (kl < 1e-12) CHECK(equal);
  }
}

TEST_CASE("kl and log-density gradients match finite differences") {
  RandomEngine rng(41);
  ad::Block<double> p1, p2, p3, p4;
  p1.reset("mu_q", 3, 1);
  p2.reset("lv_q", 3, 1);
  p3.reset("mu_p", 3, 1);
  p4.reset("lv_p", 3, 1);
  for (auto* p : {&p1, &p2, &p3, &p4}) nn::uniform_init(p->value, 1.0, rng);
  const Vec point = random_vec(3, rng);

  auto loss_value = [&]() {
    Tape t(false);
    auto a = t.input(p1.value.col(0));
    auto b = t.input(p2.value.col(0));
    auto c = t.input(p3.value.col(0));
    auto d = t.input(p4.value.col(0));
    auto root = t.add(t.kl_diag(a, b, c, d), t.gaussian_log_density(c, d, t.input(point)));
    return t.value(root)[0];
  };

  std::vector<ad::Block<double>*> blocks{&p1, &p2, &p3, &p4};
  auto fd = testutil::finite_difference<double>(loss_value, blocks);

  Tape t2(true);
  auto a = t2.input(p1.value.col(0));
  auto b = t2.input(p2.value.col(0));
  auto c = t2.input(p3.value.col(0));
  auto d = t2.input(p4.value.col(0));
  auto root = t2.add(t2.kl_diag(a, b, c, d), t2.gaussian_log_density(c, d, t2.input(point)));
  t2.backward(root);
  const std::vector<Tape::Index> ins{a, b, c, d};
  for (std::size_t k = 0; k < 4; ++k) {
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double got = t2.grad(ins[k])[i];
      const double want = fd[k](i, 0);
      CHECK(std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-6}) < 1e-4);
    }
  }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ad::Block<double> p;
  p.reset("p", 2, 2);
  p.value << 1, 2, 3, 4;
  std::vector<ad::Block<double>*> blocks{&p};
  nn::Adam<double> opt;
  opt.init(blocks);
  opt.step(blocks);
  CHECK(p.value(0, 0) == 1.0);
  CHECK(p.value(1, 1) == 4.0);
}

TEST_CASE("adam: first step with unit gradient moves by about -lr") {
  ad::Block<double> p;
  p.reset("p", 1, 1);
  p.value(0, 0) = 0.0;
  p.grad(0, 0) = 1.0;
  std::vector<ad::Block<double>*> blocks{&p};
  nn::Adam<double> opt;
  opt.lr = 0.01;
  opt.init(blocks);
  opt.step(blocks);
  // Bias-corrected m_hat = v_hat = 1 at t=1, so the step is lr/(1+eps).
  CHECK(p.value(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p.grad(0, 0) == 0.0);  // gradients zeroed afterward
}

TEST_CASE("adam: non-finite gradient is a training error naming the block") {
  ad::Block<double> p;
  p.reset("offender", 1, 1);
  p.grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  std::vector<ad::Block<double>*> blocks{&p};
  nn::Adam<double> opt;
  opt.init(blocks);
  try {
    opt.step(blocks);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("offender") != std::string::npos);
  }
}

TEST_CASE("adam: converges on a quadratic bowl") {
  // f(x) = 0.5 * sum((x - c)^2), gradient x - c.
  ad::Block<double> p;
  p.reset("x", 3, 1);
  p.value << 5.0, -3.0, 2.0;
  ad::Mat<double> c(3, 1);
  c << 1.0, 0.5, -2.0;
  std::vector<ad::Block<double>*> blocks{&p};
  nn::Adam<double> opt;
  opt.lr = 0.05;
  opt.init(blocks);
  for (int i = 0; i < 2000; ++i) {
    p.grad = p.value - c;
    opt.step(blocks);
  }
  CHECK((p.value - c).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  RandomEngine a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform() == b.uniform());
  }
}
