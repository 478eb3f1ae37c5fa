#include <cmath>
#include <sstream>

#include "doctest.h"
#include "grad_oracle.hpp"

#include "finflow/meanflow/meanflow.hpp"
#include "finflow/meanflow/meanflow_policy.hpp"

using namespace finflow;
using namespace finflow::meanflow;

namespace {

VelocityNet small_net(std::uint64_t seed, int action_dim = 6, int cond_dim = 4, int hidden = 12) {
  Rng rng(seed);
  return VelocityNet::create({action_dim, cond_dim, hidden, 8}, rng);
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
  return m;
}

Eigen::RowVectorXd uniform_row(Eigen::Index n, Rng& rng) {
  Eigen::RowVectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = uniform01(rng);
  return r;
}

// Fixed single state and single normalized action chunk.
struct ConstantFixture {
  Eigen::VectorXd s;
  Eigen::VectorXd a;
};

ConstantFixture constant_fixture(int action_dim, int cond_dim) {
  ConstantFixture f;
  f.s = Eigen::VectorXd::LinSpaced(cond_dim, -1.0, 1.0);
  f.a.resize(action_dim);
  for (int i = 0; i < action_dim; ++i) f.a(i) = 0.8 * std::sin(1.3 * i + 0.4);
  return f;
}

// Same architecture with every output path zeroed except a constant bias.
VelocityNet constant_field(const VelocityNet& net, double value) {
  auto trunk = net.trunk();
  trunk.weight(trunk.num_layers() - 1).setZero();
  trunk.bias(trunk.num_layers() - 1).setConstant(value);
  auto skip = net.skip();
  for (auto& p : skip.params()) p = 0.0;
  return VelocityNet(net.embed(), net.film(), trunk, skip, net.film_time());
}

}  // namespace

TEST_CASE("VelocityNet: parameter gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = small_net(seed);
    Rng rng(seed + 100);
    const auto z = gaussian(6, 3, rng);
    const auto s = gaussian(4, 3, rng);
    const auto r = uniform_row(3, rng), t = uniform_row(3, rng);
    const auto probe = gaussian(6, 3, rng);
    VelocityNet::Tape tape;
    net.forward(z, r, t, s, &tape);
    std::vector<double> grad(net.num_params(), 0.0);
    net.backward(tape, probe, grad);
    std::vector<double> numeric;
    const auto group = net.param_group();
    for (auto part : group.parts()) {
      const auto g = testing::numeric_gradient(part, [&] { return (net.forward(z, r, t, s).array() * probe.array()).sum(); });
      numeric.insert(numeric.end(), g.begin(), g.end());
    }
    CHECK(testing::max_relative_error(grad, numeric) < 1e-4);
  }
}

TEST_CASE("VelocityNet: jvp matches finite differences along (v, 0, 1)") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = small_net(seed);
    Rng rng(seed + 7);
    const auto z = gaussian(6, 2, rng), s = gaussian(4, 2, rng), v = gaussian(6, 2, rng);
    const auto r = uniform_row(2, rng), t = uniform_row(2, rng);
    const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(2), one = Eigen::RowVectorXd::Ones(2);
    const auto analytic = net.jvp(z, r, t, s, v, zero, one);
    const double h = 1e-5;
    const Eigen::RowVectorXd tp = t.array() + h, tm = t.array() - h;
    const Eigen::MatrixXd fd = (net.forward(z + h * v, r, tp, s) - net.forward(z - h * v, r, tm, s)) / (2 * h);
    CHECK((analytic - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("meanflow_target: r = t returns v exactly") {
  auto net = small_net(3);
  Rng rng(4);
  const auto z = gaussian(6, 5, rng), s = gaussian(4, 5, rng), v = gaussian(6, 5, rng);
  const auto t = uniform_row(5, rng);
  CHECK(meanflow_target(net, z, t, t, s, v) == v);
  CHECK(meanflow_target_fd(net, z, t, t, s, v) == v);
}

TEST_CASE("meanflow_target: constant field gives v") {
  const auto constant = constant_field(small_net(5), 0.37);
  Rng rng(6);
  const auto z = gaussian(6, 4, rng), s = gaussian(4, 4, rng), v = gaussian(6, 4, rng);
  const auto t = uniform_row(4, rng);
  const Eigen::RowVectorXd r = t * 0.3;
  CHECK((meanflow_target(constant, z, r, t, s, v) - v).norm() == 0.0);
}

TEST_CASE("meanflow_target: forward-mode agrees with finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = small_net(seed);
    Rng rng(seed * 13);
    const auto z = gaussian(6, 8, rng), s = gaussian(4, 8, rng), v = gaussian(6, 8, rng);
    const auto t = uniform_row(8, rng);
    const Eigen::RowVectorXd r = t.cwiseProduct(uniform_row(8, rng));
    const auto a = meanflow_target(net, z, r, t, s, v);
    const auto b = meanflow_target_fd(net, z, r, t, s, v, 1e-6);
    CHECK((a - b).norm() / b.norm() < 1e-3);
  }
}

TEST_CASE("sample_flow: path convention and time ordering") {
  Rng rng(1);
  const auto a = gaussian(6, 200, rng);
  const auto b = sample_flow(a, rng);
  int equal = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    CHECK(b.r(j) >= 0.0);
    CHECK(b.r(j) <= b.t(j));
    CHECK(b.t(j) <= 1.0);
    equal += b.r(j) == b.t(j);
    const Eigen::VectorXd z = (1 - b.t(j)) * a.col(j) + b.t(j) * b.noise.col(j);
    CHECK((b.z.col(j) - z).norm() < 1e-14);
  }
  CHECK((b.v - (b.noise - a)).norm() == 0.0);
  CHECK(equal > 120);
  CHECK(equal < 180);
}

TEST_CASE("Trainer: zero learning rate leaves parameters and loss unchanged") {
  auto net = small_net(2);
  const auto before = net.param_group().gather();
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.0;
  Trainer trainer(net, cfg);
  Rng data_rng(3);
  const auto s = gaussian(4, 8, data_rng), a = gaussian(6, 8, data_rng);
  Rng r1(9), r2(9);
  const double l1 = trainer.step(s, a, r1);
  const double l2 = trainer.step(s, a, r2);
  CHECK(l1 >= 0.0);
  CHECK(l1 == l2);
  CHECK(net.param_group().gather() == before);
}

TEST_CASE("generate_normalized: zero field clips the noise; outputs bounded; deterministic") {
  auto net = small_net(8);
  const auto zero = constant_field(net, 0.0);
  Rng rng(2);
  const Eigen::MatrixXd w = 2.0 * gaussian(6, 20, rng);
  const auto s = gaussian(4, 20, rng);
  CHECK(generate_normalized(zero, w, s) == w.cwiseMax(-1.0).cwiseMin(1.0));
  const auto g = generate_normalized(net, w, s);
  CHECK(g.maxCoeff() <= 1.0);
  CHECK(g.minCoeff() >= -1.0);
  CHECK(generate_normalized(net, w, s) == g);
  // Clipping never grows a component.
  const Eigen::MatrixXd pre = w - net.forward(w, Eigen::RowVectorXd::Zero(20), Eigen::RowVectorXd::Ones(20), s);
  CHECK((g.array().abs() <= pre.array().abs()).all());
}

namespace {

// Trains on one (state, chunk) pair and returns the parameter average.
VelocityNet fit_constant(const ConstantFixture& fx, int hidden, int steps, std::vector<double>* losses) {
  Rng init(11);
  auto net = VelocityNet::create({static_cast<int>(fx.a.size()), static_cast<int>(fx.s.size()), hidden, 64}, init);
  Trainer trainer(net, TrainConfig{});
  const int bsz = trainer.config().batch_size;
  const Eigen::MatrixXd s = fx.s.replicate(1, bsz), a = fx.a.replicate(1, bsz);
  Rng rng(12);
  for (int step = 0; step < steps; ++step) {
    trainer.set_learning_rate(cosine_learning_rate(trainer.config().learning_rate, step, steps));
    const double loss = trainer.step(s, a, rng);
    if (losses) losses->push_back(loss);
  }
  return trainer.averaged();
}

}  // namespace

TEST_CASE("Trainer: constant target, loss falls and generation reaches the target") {
  const auto fx = constant_fixture(8, 4);
  std::vector<double> losses;
  const auto net = fit_constant(fx, 128, 5000, &losses);
  // Smoothed loss over the first 100 steps decreases window to window.
  for (int w = 0; w + 1 < 5; ++w) {
    double cur = 0, next = 0;
    for (int i = 0; i < 20; ++i) {
      cur += losses[20 * w + i];
      next += losses[20 * (w + 1) + i];
    }
    CHECK(next < cur);
  }
  for (double l : losses) CHECK(l >= 0.0);
  Rng noise(13);
  double mse = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd w = gaussian(8, 1, noise).col(0);
    mse += (generate_normalized(net, w, fx.s) - fx.a).squaredNorm() / 8;
  }
  CHECK(mse / 100 < 1e-3);
}

TEST_CASE("one-step generation collapses noise onto a deterministic target") {
  const auto fx = constant_fixture(2, 4);
  const auto net = fit_constant(fx, 64, 5000, nullptr);
  Rng noise(14);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd w = gaussian(2, 1, noise).col(0);
    CHECK((generate_normalized(net, w, fx.s) - fx.a).squaredNorm() < 1e-2);
  }
}

TEST_CASE("MeanFlowPolicy: checkpoint round trip preserves inference") {
  MeanFlowPolicy p;
  p.horizons = {2, 4, 2};
  Rng init(1);
  p.net = VelocityNet::create({8, 10, 16, 8}, init);
  p.stats.act_min = {0.1, 0.2};
  p.stats.act_max = {1.5, 2.5};
  p.stats.obs_mean = {0.5, 1000, 0, 100, 0.3};
  p.stats.obs_std = {0.3, 5, 2, 1, 0.1};
  std::stringstream buf;
  p.to_checkpoint().save(buf);
  const auto q = MeanFlowPolicy::from_checkpoint(nn::Checkpoint::load(buf));
  CHECK(q.horizons == p.horizons);
  CHECK(q.stats == p.stats);
  CHECK(q.parameter_hash() == p.parameter_hash());
  Rng rng(3);
  const Eigen::VectorXd w = gaussian(8, 1, rng).col(0);
  std::vector<market::MarketState> window(2);
  window[1].inventory = 3;
  CHECK(q.generate_chunk(w, q.condition(window)) == p.generate_chunk(w, p.condition(window)));
}

TEST_CASE("ChunkedStrategy: replans every T_exec steps from the exec slice") {
  struct Counting final : ChunkedStrategy {
    using ChunkedStrategy::ChunkedStrategy;
    int calls = 0;
    std::vector<double> seen_first_time;
    std::string name() const override { return "Counting"; }
    experts::ExpertKind kind() const override { return experts::ExpertKind::learned; }
    std::unique_ptr<QuotingStrategy> clone() const override { return std::make_unique<Counting>(*this); }
    Eigen::MatrixXd plan(std::span<const market::MarketState> window) override {
      seen_first_time.push_back(window[0].time);
      Eigen::MatrixXd rows(horizons().exec, 2);
      for (int i = 0; i < horizons().exec; ++i) rows.row(i) << calls, i;
      ++calls;
      return rows;
    }
  };
  Counting c(data::Horizons{2, 8, 3});
  market::MarketState s;
  c.begin_episode(s, 0);
  for (int step = 0; step < 7; ++step) {
    s.time = 0.01 * step;
    const auto a = c.quote(s);
    CHECK(a.delta_bid == step / 3);
    CHECK(a.delta_ask == step % 3);
  }
  CHECK(c.calls == 3);
  REQUIRE(c.seen_first_time.size() == 3);
  CHECK(c.seen_first_time[0] == 0.0);
  CHECK(c.seen_first_time[1] == doctest::Approx(0.02));
}
