#include <cmath>
#include <sstream>

#include "doctest.h"
#include "grad_oracle.hpp"

#include "finflow/numerics/adam.hpp"
#include "finflow/numerics/checkpoint.hpp"
#include "finflow/numerics/dense_net.hpp"
#include "finflow/numerics/film.hpp"

using namespace finflow;
using namespace finflow::nn;

namespace {

Eigen::VectorXd random_vector(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = standard_normal(rng);
  return v;
}

DenseNet random_net(std::vector<int> dims, Activation hidden, Rng& rng) {
  DenseNet net = DenseNet::glorot(std::move(dims), hidden, rng);
  // Nonzero biases so the check exercises them.
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < net.bias(l).size(); ++i) net.bias(l)(i) = 0.1 * standard_normal(rng);
  }
  return net;
}

}  // namespace

TEST_CASE("forward: identity, zero and relu cases") {
  DenseNet id({2, 2}, {Activation::identity});
  id.weight(0).setIdentity();
  const Eigen::VectorXd out = id.forward(Eigen::Vector2d(1.0, 2.0));
  CHECK(out(0) == 1.0);
  CHECK(out(1) == 2.0);

  DenseNet zero({3, 4, 2}, {Activation::tanh, Activation::identity});
  CHECK(zero.forward(Eigen::Vector3d(5, -1, 2)).isZero(0.0));

  DenseNet relu({1, 1, 1}, {Activation::relu, Activation::identity});
  relu.weight(0)(0, 0) = 2.0;
  relu.bias(0)(0) = 1.0;
  relu.weight(1)(0, 0) = 1.0;
  CHECK(relu.forward(Eigen::VectorXd::Constant(1, -3.0))(0) == 0.0);
}

TEST_CASE("forward rejects dimension mismatch and non-identity output") {
  DenseNet net({2, 3, 1}, {Activation::relu, Activation::identity});
  CHECK_THROWS_AS(net.forward(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(DenseNet({2, 3}, {Activation::relu}), std::invalid_argument);
}

TEST_CASE("forward is bitwise deterministic") {
  Rng rng(3);
  DenseNet net = random_net({4, 16, 16, 3}, Activation::tanh, rng);
  const Eigen::VectorXd x = random_vector(4, rng);
  const Eigen::VectorXd a = net.forward(x);
  const Eigen::VectorXd b = net.forward(x);
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("weight shapes follow layer dims") {
  DenseNet net({3, 5, 2}, {Activation::relu, Activation::identity});
  CHECK(net.weight(0).rows() == 5);
  CHECK(net.weight(0).cols() == 3);
  CHECK(net.bias(1).size() == 2);
  CHECK(net.num_params() == 3 * 5 + 5 + 5 * 2 + 2);
}

TEST_CASE("backward: zero output gradient and linear case") {
  Rng rng(1);
  DenseNet net = random_net({3, 4, 2}, Activation::tanh, rng);
  auto g = parameter_gradient(net, random_vector(3, rng), Eigen::VectorXd::Zero(2));
  for (double v : g) CHECK(v == 0.0);

  DenseNet lin({1, 1}, {Activation::identity});
  lin.weight(0)(0, 0) = 0.7;
  auto gl = parameter_gradient(lin, Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Ones(1));
  CHECK(gl[0] == doctest::Approx(3.0));
  CHECK(gl[1] == doctest::Approx(1.0));
}

TEST_CASE("backward without a cached forward pass is a usage error") {
  DenseNet net({2, 2}, {Activation::identity});
  Tape empty;
  std::vector<double> g(net.num_params());
  CHECK_THROWS_AS(net.backward(empty, Eigen::MatrixXd::Ones(2, 1), g), std::logic_error);
}

TEST_CASE("backward matches central finite differences over 10 seeds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    const Activation hidden = seed % 2 ? Activation::tanh : Activation::relu;
    DenseNet net = random_net({4, 8, 6, 3}, hidden, rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(4, 5, [&] { return standard_normal(rng); });
    const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(3, 5, [&] { return standard_normal(rng); });
    auto loss = [&] { return (net.forward(x, nullptr).array() * w.array()).sum(); };
    Tape tape;
    net.forward(x, &tape);
    std::vector<double> analytic(net.num_params(), 0.0);
    net.backward(tape, w, analytic);
    const auto numeric = testing::numeric_gradient(net.params(), loss);
    CHECK(testing::max_relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("input gradient from backward matches finite differences") {
  Rng rng(9);
  DenseNet net = random_net({3, 7, 2}, Activation::tanh, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(3, 1, [&] { return standard_normal(rng); });
  const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(2, 1, [&] { return standard_normal(rng); });
  Tape tape;
  net.forward(x, &tape);
  std::vector<double> scratch(net.num_params(), 0.0);
  const Eigen::MatrixXd gx = net.backward(tape, w, scratch);
  auto loss = [&] { return (net.forward(x, nullptr).array() * w.array()).sum(); };
  const auto numeric = testing::numeric_gradient(std::span<double>(x.data(), 3), loss);
  CHECK(testing::max_relative_error(std::span<const double>(gx.data(), 3), numeric) < 1e-4);
}

TEST_CASE("jvp: linear net is exact, zero direction gives zero") {
  Rng rng(5);
  DenseNet lin = random_net({3, 2}, Activation::identity, rng);
  const Eigen::VectorXd d = random_vector(3, rng);
  const Eigen::VectorXd x = random_vector(3, rng);
  const Eigen::VectorXd expected = lin.weight(0) * d;
  CHECK((lin.jvp(x, d) - expected).norm() < 1e-14);
  CHECK(lin.jvp(x, Eigen::VectorXd::Zero(3)).isZero(0.0));
  CHECK_THROWS_AS(lin.jvp(x, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("jvp matches the finite-difference directional derivative") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(200 + seed);
    DenseNet net = random_net({5, 12, 12, 4}, Activation::tanh, rng);
    const Eigen::VectorXd x = random_vector(5, rng);
    const Eigen::VectorXd d = random_vector(5, rng);
    const Eigen::VectorXd fwd = net.jvp(x, d);
    const Eigen::VectorXd fd =
        finite_difference_directional([&](const Eigen::VectorXd& v) { return net.forward(v); }, x, d, 1e-4);
    CHECK((fwd - fd).norm() / std::max(1e-8, fd.norm()) < 1e-3);
  }
}

TEST_CASE("jvp is linear in the direction") {
  Rng rng(11);
  DenseNet net = random_net({4, 10, 3}, Activation::relu, rng);
  const Eigen::VectorXd x = random_vector(4, rng);
  const Eigen::VectorXd d1 = random_vector(4, rng);
  const Eigen::VectorXd d2 = random_vector(4, rng);
  const double a = 1.7, b = -0.4;
  const Eigen::VectorXd lhs = net.jvp(x, a * d1 + b * d2);
  const Eigen::VectorXd rhs = a * net.jvp(x, d1) + b * net.jvp(x, d2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("adam: first step moves by learning rate against the gradient") {
  Adam adam(1, {0.1, 0.9, 0.999, 1e-8});
  std::vector<double> p{0.0};
  std::vector<double> g{1.0};
  adam.step(p, g);
  // m_hat = 1, v_hat = 1 after bias correction, so the step is lr / (1 + eps).
  CHECK(p[0] == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(adam.state().step_count == 1);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged, moments decay") {
  Adam adam(2, {});
  std::vector<double> p{0.5, -2.0};
  adam.step(p, std::vector<double>{0.0, 0.0});
  CHECK(p[0] == 0.5);
  CHECK(p[1] == -2.0);

  adam.step(p, std::vector<double>{1.0, -3.0});
  const auto after_signal = p;
  const double m0 = std::abs(adam.state().first_moment[0]);
  adam.step(p, std::vector<double>{0.0, 0.0});
  const double m1 = std::abs(adam.state().first_moment[0]);
  adam.step(p, std::vector<double>{0.0, 0.0});
  const double m2 = std::abs(adam.state().first_moment[0]);
  CHECK(p == after_signal);
  CHECK(m1 < m0);
  CHECK(m2 < m1);
  CHECK(adam.state().step_count == 4);
}

TEST_CASE("adam rejects non-finite gradients without touching state") {
  Adam adam(2, {});
  std::vector<double> p{1.0, 1.0};
  CHECK_THROWS_AS(adam.step(p, std::vector<double>{1.0, std::nan("")}), std::domain_error);
  CHECK(p[0] == 1.0);
  CHECK(adam.state().step_count == 0);
  CHECK_THROWS_AS(adam.step(p, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("film: identity and zero-gamma modulation") {
  Rng rng(2);
  FiLMLayer film = FiLMLayer::create(3, 8, 4, rng);
  film.condition_net().params()[0] = 0.0;
  // Zero every weight: output = bias = [1...1, 0...0] -> gamma 1, beta 0.
  for (auto& v : film.condition_net().params()) v = 0.0;
  const std::size_t last = film.condition_net().num_layers() - 1;
  film.condition_net().bias(last).head(4).setOnes();
  const Eigen::VectorXd h = random_vector(4, rng);
  const Eigen::VectorXd c = random_vector(3, rng);
  CHECK((film.modulate(h, c) - h).norm() == 0.0);

  film.condition_net().bias(last).head(4).setZero();
  film.condition_net().bias(last).tail(4) << 1, 2, 3, 4;
  const Eigen::VectorXd out = film.modulate(random_vector(4, rng), c);
  CHECK(out(0) == 1.0);
  CHECK(out(3) == 4.0);
  CHECK_THROWS_AS(film.modulate(Eigen::VectorXd::Zero(3), c), std::invalid_argument);
}

TEST_CASE("film: feature gradient is diag(gamma) and parameter gradient matches finite differences") {
  Rng rng(4);
  FiLMLayer film = FiLMLayer::create(3, 6, 5, rng);
  Eigen::MatrixXd h = Eigen::MatrixXd::NullaryExpr(5, 2, [&] { return standard_normal(rng); });
  const Eigen::MatrixXd c = Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return standard_normal(rng); });
  const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(5, 2, [&] { return standard_normal(rng); });

  Tape tape;
  const auto mod = film.modulation(c, &tape);
  std::vector<double> analytic(film.condition_net().num_params(), 0.0);
  const Eigen::MatrixXd gh = film.backward(tape, mod, h, w, analytic);
  CHECK((gh - w.cwiseProduct(mod.gamma)).norm() < 1e-14);

  auto loss = [&] { return (film.modulate(h, c).array() * w.array()).sum(); };
  const auto numeric_h = testing::numeric_gradient(std::span<double>(h.data(), h.size()), loss);
  CHECK(testing::max_relative_error(std::span<const double>(gh.data(), gh.size()), numeric_h) < 1e-4);
  const auto numeric_p = testing::numeric_gradient(film.condition_net().params(), loss);
  CHECK(testing::max_relative_error(analytic, numeric_p) < 1e-4);
}

TEST_CASE("checkpoint round trip is bitwise and rejects truncation") {
  Rng rng(8);
  DenseNet net = random_net({3, 5, 2}, Activation::tanh, rng);
  Checkpoint ck;
  ck.add_net("policy", net);
  std::vector<double> extra{1.5, -2.25};
  ck.add_vector("log_std", extra);
  ck.metadata()["note"] = "x";

  std::stringstream ss;
  ck.save(ss);
  const std::string bytes = ss.str();
  std::stringstream in(bytes);
  const Checkpoint back = Checkpoint::load(in);
  const DenseNet net2 = back.net("policy");
  CHECK(net2.layer_dims() == net.layer_dims());
  CHECK(std::equal(net.params().begin(), net.params().end(), net2.params().begin()));
  CHECK(back.vector("log_std") == extra);
  CHECK(back.metadata()["note"] == "x");
  CHECK(back.parameter_hash() == ck.parameter_hash());

  std::stringstream again;
  back.save(again);
  CHECK(again.str() == bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(Checkpoint::load(truncated), std::runtime_error);
}
