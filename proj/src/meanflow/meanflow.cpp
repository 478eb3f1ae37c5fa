#include "finflow/meanflow/meanflow.hpp"

#include <cmath>
#include <iostream>

namespace finflow::meanflow {

FlowBatch sample_flow(const Eigen::MatrixXd& actions, Rng& rng, double p_equal, const TimeSampling& times) {
  FlowBatch b;
  const Eigen::Index n = actions.cols();
  b.action = actions;
  b.noise.resize(actions.rows(), n);
  b.r.resize(n);
  b.t.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < actions.rows(); ++i) b.noise(i, j) = standard_normal(rng);
    double t = uniform01(rng);
    if (times.kind == TimeSampling::Kind::logit_normal) {
      t = 1.0 / (1.0 + std::exp(-(times.mu + times.sigma * standard_normal(rng))));
    }
    const double coin = uniform01(rng);
    const double u = uniform01(rng);
    b.t(j) = t;
    b.r(j) = coin < p_equal ? t : u * t;
  }
  b.z = actions.array().rowwise() * (1.0 - b.t.array()) + b.noise.array().rowwise() * b.t.array();
  b.v = b.noise - actions;
  return b;
}

namespace {

Eigen::MatrixXd apply_identity(const Eigen::MatrixXd& v, const Eigen::RowVectorXd& r, const Eigen::RowVectorXd& t,
                               const Eigen::MatrixXd& du) {
  Eigen::MatrixXd out = v;
  for (Eigen::Index j = 0; j < v.cols(); ++j) out.col(j) -= (t(j) - r(j)) * du.col(j);
  return out;
}

}  // namespace

Eigen::MatrixXd meanflow_target(const VelocityNet& net, const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                                const Eigen::RowVectorXd& t, const Eigen::MatrixXd& s, const Eigen::MatrixXd& v) {
  const Eigen::RowVectorXd dr = Eigen::RowVectorXd::Zero(z.cols());
  const Eigen::RowVectorXd dt = Eigen::RowVectorXd::Ones(z.cols());
  return apply_identity(v, r, t, net.jvp(z, r, t, s, v, dr, dt));
}

Eigen::MatrixXd meanflow_target_fd(const VelocityNet& net, const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                                   const Eigen::RowVectorXd& t, const Eigen::MatrixXd& s, const Eigen::MatrixXd& v,
                                   double h) {
  const Eigen::RowVectorXd tp = t.array() + h, tm = t.array() - h;
  const Eigen::MatrixXd du = (net.forward(z + h * v, r, tp, s) - net.forward(z - h * v, r, tm, s)) / (2.0 * h);
  return apply_identity(v, r, t, du);
}

double cosine_learning_rate(double peak, int step, int total) {
  if (total <= 1) return peak;
  return 0.5 * peak * (1.0 + std::cos(M_PI * static_cast<double>(step) / static_cast<double>(total)));
}

Trainer::Trainer(VelocityNet& net, TrainConfig cfg)
    : net_(net), cfg_(cfg), adam_(net.num_params(), nn::AdamConfig{cfg.learning_rate}) {}

double Trainer::step(const Eigen::MatrixXd& conditions, const Eigen::MatrixXd& actions, Rng& rng) {
  const FlowBatch b = sample_flow(actions, rng, cfg_.p_equal, cfg_.times);
  const Eigen::MatrixXd target = meanflow_target(net_, b.z, b.r, b.t, conditions, b.v);
  VelocityNet::Tape tape;
  const Eigen::MatrixXd u = net_.forward(b.z, b.r, b.t, conditions, &tape);
  const Eigen::MatrixXd resid = u - target;
  const double count = static_cast<double>(resid.size());
  const double loss = resid.squaredNorm() / count;
  if (!std::isfinite(loss)) {
    ++skipped_;
    std::cerr << "meanflow: non-finite loss, update skipped\n";
    return loss;
  }
  std::vector<double> grad(net_.num_params(), 0.0);
  net_.backward(tape, (2.0 / count) * resid, grad);
  const auto group = net_.param_group();
  try {
    nn::adam_step(adam_, group, grad);
  } catch (const std::domain_error&) {
    ++skipped_;
    std::cerr << "meanflow: non-finite gradient, update skipped\n";
  }
  if (cfg_.ema_decay > 0.0) {
    const auto current = group.gather();
    if (ema_.empty()) {
      ema_ = current;
    } else {
      for (std::size_t i = 0; i < ema_.size(); ++i) ema_[i] += (1.0 - cfg_.ema_decay) * (current[i] - ema_[i]);
    }
  }
  return loss;
}

VelocityNet Trainer::averaged() const {
  VelocityNet copy = net_;
  if (!ema_.empty()) copy.param_group().scatter(ema_);
  return copy;
}

Eigen::MatrixXd generate_normalized(const VelocityNet& net, const Eigen::MatrixXd& w, const Eigen::MatrixXd& s) {
  const Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(w.cols());
  const Eigen::RowVectorXd t = Eigen::RowVectorXd::Ones(w.cols());
  return (w - net.forward(w, r, t, s)).cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::VectorXd generate_normalized(const VelocityNet& net, const Eigen::VectorXd& w, const Eigen::VectorXd& s) {
  return generate_normalized(net, Eigen::MatrixXd(w), Eigen::MatrixXd(s)).col(0);
}

}  // namespace finflow::meanflow
