#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "finflow/common/rng.hpp"
#include "finflow/meanflow/velocity_net.hpp"
#include "finflow/numerics/adam.hpp"

namespace finflow::meanflow {

/// A batch of points on the linear path z_t = (1 - t) a + t eps, v = eps - a.
struct FlowBatch {
  Eigen::MatrixXd action;  // normalized targets, action_dim x B
  Eigen::MatrixXd noise;
  Eigen::RowVectorXd r, t;
  Eigen::MatrixXd z;
  Eigen::MatrixXd v;
};

/// How t is drawn. Logit-normal draws sigmoid(N(mu, sigma)).
struct TimeSampling {
  enum class Kind { uniform, logit_normal } kind = Kind::uniform;
  double mu = 0.5;
  double sigma = 1.0;
};

inline TimeSampling logit_normal_times(double mu = 0.5, double sigma = 1.0) {
  return {TimeSampling::Kind::logit_normal, mu, sigma};
}

/// Draws noise and (r, t) for each column of `actions`: t from `times`
/// (uniform by default), then r = t with probability `p_equal`, else
/// r ~ U(0, t).
FlowBatch sample_flow(const Eigen::MatrixXd& actions, Rng& rng, double p_equal = 0.75,
                      const TimeSampling& times = {});

/// u_tgt = v - (t - r) du/dt with the total derivative taken along (v, 0, 1)
/// by forward-mode differentiation. Treated as a constant by the caller.
Eigen::MatrixXd meanflow_target(const VelocityNet& net, const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                                const Eigen::RowVectorXd& t, const Eigen::MatrixXd& s, const Eigen::MatrixXd& v);

/// Same target with the total derivative from a symmetric finite difference.
Eigen::MatrixXd meanflow_target_fd(const VelocityNet& net, const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                                   const Eigen::RowVectorXd& t, const Eigen::MatrixXd& s, const Eigen::MatrixXd& v,
                                   double h = 1e-4);

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-2;
  double p_equal = 0.75;
  TimeSampling times = logit_normal_times();
  double ema_decay = 0.998;  // 0 disables the parameter average
};

/// Half-cosine decay from `peak` at step 0 to 0 at `total`.
double cosine_learning_rate(double peak, int step, int total);

/// Squared-residual MeanFlow regression with Adam. The trainer owns the
/// optimizer state; the net is updated in place.
class Trainer {
 public:
  Trainer(VelocityNet& net, TrainConfig cfg);

  /// One update on (conditions, normalized actions), columns are samples.
  /// Returns the batch loss (mean squared residual per component). A
  /// non-finite loss skips the update and bumps skipped().
  double step(const Eigen::MatrixXd& conditions, const Eigen::MatrixXd& actions, Rng& rng);

  std::uint64_t skipped() const { return skipped_; }
  /// Exponential moving average of the parameters (layout of param_group()).
  const std::vector<double>& ema() const { return ema_; }
  /// Copy of the net carrying the averaged parameters.
  VelocityNet averaged() const;
  const TrainConfig& config() const { return cfg_; }
  void set_learning_rate(double lr) { adam_.set_learning_rate(lr); }

 private:
  VelocityNet& net_;
  TrainConfig cfg_;
  nn::Adam adam_;
  std::vector<double> ema_;
  std::uint64_t skipped_ = 0;
};

/// One-step generation in normalized space: clip(w - u(w, 0, 1 | s), -1, 1).
Eigen::MatrixXd generate_normalized(const VelocityNet& net, const Eigen::MatrixXd& w, const Eigen::MatrixXd& s);
Eigen::VectorXd generate_normalized(const VelocityNet& net, const Eigen::VectorXd& w, const Eigen::VectorXd& s);

}  // namespace finflow::meanflow
