#pragma once

#include <span>

#include <Eigen/Dense>

#include "finflow/numerics/dense_net.hpp"
#include "finflow/numerics/film.hpp"
#include "finflow/numerics/param_group.hpp"

namespace finflow::meanflow {

struct VelocityNetConfig {
  int action_dim = 32;     // T_pred * 2
  int condition_dim = 10;  // T_obs * 5
  int hidden = 128;
  int film_hidden = 64;
  int trunk_layers = 2;  // hidden layers after the modulated features
  bool skip = true;       // linear path from (z, r, t) straight to the output
  bool film_time = true;  // FiLM also sees (r, t), not just the window
};

/// Average-velocity field u(z, r, t | s). The flattened (z, r, t) input goes
/// through a linear embedding, is FiLM-modulated by the observation window,
/// passes a relu and then an MLP trunk back to action space. An optional
/// linear skip from the raw input is added to the trunk output.
///
/// All batched methods take samples as columns: z is action_dim x B, r and t
/// are 1 x B, s is condition_dim x B.
class VelocityNet {
 public:
  VelocityNet() = default;
  VelocityNet(nn::DenseNet embed, nn::FiLMLayer film, nn::DenseNet trunk, nn::DenseNet skip = {},
              bool film_time = false);
  static VelocityNet create(const VelocityNetConfig& cfg, Rng& rng);

  int action_dim() const { return trunk_.output_dim(); }
  int condition_dim() const { return film_.condition_dim() - (film_time_ ? 2 : 0); }
  bool film_time() const { return film_time_; }
  int hidden() const { return embed_.output_dim(); }

  const nn::DenseNet& embed() const { return embed_; }
  const nn::FiLMLayer& film() const { return film_; }
  const nn::DenseNet& trunk() const { return trunk_; }
  bool has_skip() const { return skip_.num_layers() > 0; }
  const nn::DenseNet& skip() const { return skip_; }

  /// Embedding, FiLM condition net, trunk and skip parameters, in that order.
  nn::ParamGroup param_group();
  std::size_t num_params() const;

  struct Tape {
    nn::Tape embed, film, trunk;
    nn::FiLMLayer::Modulation mod;
    Eigen::MatrixXd features;   // embedding output
    Eigen::MatrixXd modulated;  // after FiLM, before relu
    nn::Tape skip;
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r, const Eigen::RowVectorXd& t,
                          const Eigen::MatrixXd& s, Tape* tape = nullptr) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& z, double r, double t, const Eigen::VectorXd& s) const;

  /// Directional derivative of u along (dz, dr, dt) with s held fixed.
  Eigen::MatrixXd jvp(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r, const Eigen::RowVectorXd& t,
                      const Eigen::MatrixXd& s, const Eigen::MatrixXd& dz, const Eigen::RowVectorXd& dr,
                      const Eigen::RowVectorXd& dt) const;

  /// Accumulates d<out_grad, u>/dparams into `grad` (laid out as param_group()).
  void backward(const Tape& tape, const Eigen::MatrixXd& out_grad, std::span<double> grad) const;

 private:
  Eigen::MatrixXd film_input(const Eigen::MatrixXd& s, const Eigen::RowVectorXd& r,
                             const Eigen::RowVectorXd& t) const;
  Eigen::MatrixXd stack_input(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                              const Eigen::RowVectorXd& t) const;

  nn::DenseNet embed_;
  nn::FiLMLayer film_;
  nn::DenseNet trunk_;
  nn::DenseNet skip_;
  bool film_time_ = false;
};

}  // namespace finflow::meanflow
