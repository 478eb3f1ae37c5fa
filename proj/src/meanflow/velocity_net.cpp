#include "finflow/meanflow/velocity_net.hpp"

#include <stdexcept>

namespace finflow::meanflow {

VelocityNet::VelocityNet(nn::DenseNet embed, nn::FiLMLayer film, nn::DenseNet trunk, nn::DenseNet skip,
                         bool film_time)
    : embed_(std::move(embed)),
      film_(std::move(film)),
      trunk_(std::move(trunk)),
      skip_(std::move(skip)),
      film_time_(film_time) {
  if (has_skip() && (skip_.input_dim() != embed_.input_dim() || skip_.output_dim() != trunk_.output_dim())) {
    throw std::invalid_argument("VelocityNet: skip layer shape mismatch");
  }
  if (embed_.input_dim() != trunk_.output_dim() + 2 || embed_.output_dim() != film_.feature_dim() ||
      trunk_.input_dim() != film_.feature_dim()) {
    throw std::invalid_argument("VelocityNet: inconsistent layer dimensions");
  }
}

VelocityNet VelocityNet::create(const VelocityNetConfig& cfg, Rng& rng) {
  auto embed = nn::DenseNet::glorot({cfg.action_dim + 2, cfg.hidden}, nn::Activation::identity, rng);
  auto film = nn::FiLMLayer::create(cfg.condition_dim + (cfg.film_time ? 2 : 0), cfg.film_hidden, cfg.hidden, rng);
  std::vector<int> dims(static_cast<std::size_t>(cfg.trunk_layers) + 1, cfg.hidden);
  dims.push_back(cfg.action_dim);
  auto trunk = nn::DenseNet::glorot(dims, nn::Activation::relu, rng);
  nn::DenseNet skip;
  if (cfg.skip) skip = nn::DenseNet::glorot({cfg.action_dim + 2, cfg.action_dim}, nn::Activation::identity, rng);
  return VelocityNet(std::move(embed), std::move(film), std::move(trunk), std::move(skip), cfg.film_time);
}

nn::ParamGroup VelocityNet::param_group() {
  std::vector<std::span<double>> parts{embed_.params(), film_.condition_net().params(), trunk_.params()};
  if (has_skip()) parts.push_back(skip_.params());
  return nn::ParamGroup(std::move(parts));
}

std::size_t VelocityNet::num_params() const {
  return embed_.num_params() + film_.condition_net().num_params() + trunk_.num_params() +
         (has_skip() ? skip_.num_params() : 0);
}

Eigen::MatrixXd VelocityNet::film_input(const Eigen::MatrixXd& s, const Eigen::RowVectorXd& r,
                                        const Eigen::RowVectorXd& t) const {
  if (s.rows() != condition_dim() || s.cols() != r.cols()) {
    throw std::invalid_argument("VelocityNet: condition shape mismatch");
  }
  if (!film_time_) return s;
  Eigen::MatrixXd c(s.rows() + 2, s.cols());
  c.topRows(s.rows()) = s;
  c.row(s.rows()) = r;
  c.row(s.rows() + 1) = t;
  return c;
}

Eigen::MatrixXd VelocityNet::stack_input(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                                         const Eigen::RowVectorXd& t) const {
  if (z.rows() != action_dim() || r.cols() != z.cols() || t.cols() != z.cols()) {
    throw std::invalid_argument("VelocityNet: input shape mismatch");
  }
  Eigen::MatrixXd x(z.rows() + 2, z.cols());
  x.topRows(z.rows()) = z;
  x.row(z.rows()) = r;
  x.row(z.rows() + 1) = t;
  return x;
}

Eigen::MatrixXd VelocityNet::forward(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r,
                                     const Eigen::RowVectorXd& t, const Eigen::MatrixXd& s, Tape* tape) const {
  const Eigen::MatrixXd x = stack_input(z, r, t);
  Eigen::MatrixXd h = embed_.forward(x, tape ? &tape->embed : nullptr);
  auto mod = film_.modulation(film_input(s, r, t), tape ? &tape->film : nullptr);
  Eigen::MatrixXd m = mod.gamma.cwiseProduct(h) + mod.beta;
  const Eigen::MatrixXd a = m.cwiseMax(0.0);
  Eigen::MatrixXd out = trunk_.forward(a, tape ? &tape->trunk : nullptr);
  if (has_skip()) out += skip_.forward(x, tape ? &tape->skip : nullptr);
  if (tape) {
    tape->mod = std::move(mod);
    tape->features = std::move(h);
    tape->modulated = std::move(m);
  }
  return out;
}

Eigen::VectorXd VelocityNet::forward(const Eigen::VectorXd& z, double r, double t, const Eigen::VectorXd& s) const {
  Eigen::RowVectorXd rr(1), tt(1);
  rr(0) = r;
  tt(0) = t;
  return forward(Eigen::MatrixXd(z), rr, tt, Eigen::MatrixXd(s)).col(0);
}

Eigen::MatrixXd VelocityNet::jvp(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& r, const Eigen::RowVectorXd& t,
                                 const Eigen::MatrixXd& s, const Eigen::MatrixXd& dz, const Eigen::RowVectorXd& dr,
                                 const Eigen::RowVectorXd& dt) const {
  const Eigen::MatrixXd x = stack_input(z, r, t);
  const Eigen::MatrixXd dx = stack_input(dz, dr, dt);
  const Eigen::MatrixXd h = embed_.forward(x, nullptr);
  const Eigen::MatrixXd dh = embed_.jvp(x, dx);
  const Eigen::MatrixXd c = film_input(s, r, t);
  const auto mod = film_.modulation(c, nullptr);
  const Eigen::MatrixXd m = mod.gamma.cwiseProduct(h) + mod.beta;
  Eigen::MatrixXd dm = mod.gamma.cwiseProduct(dh);
  if (film_time_) {
    Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(c.rows(), c.cols());
    dc.row(s.rows()) = dr;
    dc.row(s.rows() + 1) = dt;
    const Eigen::MatrixXd dmod = film_.condition_net().jvp(c, dc);
    const Eigen::Index f = film_.feature_dim();
    dm += dmod.topRows(f).cwiseProduct(h) + dmod.bottomRows(f);
  }
  const Eigen::MatrixXd a = m.cwiseMax(0.0);
  const Eigen::MatrixXd da = (m.array() > 0.0).select(dm, 0.0);
  Eigen::MatrixXd out = trunk_.jvp(a, da);
  if (has_skip()) out += skip_.jvp(x, dx);
  return out;
}

void VelocityNet::backward(const Tape& tape, const Eigen::MatrixXd& out_grad, std::span<double> grad) const {
  if (grad.size() != num_params()) throw std::invalid_argument("VelocityNet::backward: gradient size mismatch");
  const std::size_t ne = embed_.num_params(), nf = film_.condition_net().num_params();
  const std::size_t nt = trunk_.num_params();
  const Eigen::MatrixXd ga = trunk_.backward(tape.trunk, out_grad, grad.subspan(ne + nf, nt));
  if (has_skip()) skip_.backward(tape.skip, out_grad, grad.subspan(ne + nf + nt));
  const Eigen::MatrixXd gm = (tape.modulated.array() > 0.0).select(ga, 0.0);
  const Eigen::MatrixXd gh = film_.backward(tape.film, tape.mod, tape.features, gm, grad.subspan(ne, nf));
  embed_.backward(tape.embed, gh, grad.subspan(0, ne));
}

}  // namespace finflow::meanflow
