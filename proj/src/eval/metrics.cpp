#include "finflow/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace finflow::eval {

double cumulative_return(std::span<const double> period_returns) {
  double growth = 1.0;
  for (double r : period_returns) {
    if (!(r > -1.0)) throw std::invalid_argument("cumulative_return: period return <= -1 (total loss)");
    growth *= 1.0 + r;
  }
  return (growth - 1.0) * 100.0;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [m](double x) { return (x - m) * (x - m); });
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
}

double sharpe(std::span<const double> excess_returns) {
  if (excess_returns.size() < 2) throw std::logic_error("sharpe: need at least two returns");
  const double sd = sample_std(excess_returns);
  if (!(sd > 0.0)) throw UndefinedSharpe("sharpe: zero variance");
  return mean(excess_returns) / sd;
}

double max_drawdown(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("max_drawdown: empty series");
  double peak = values.front();
  double worst = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("max_drawdown: values must be positive");
    peak = std::max(peak, v);
    worst = std::max(worst, (peak - v) / peak);
  }
  return worst;
}

std::vector<double> period_returns(std::span<const double> values) {
  std::vector<double> r;
  for (std::size_t i = 1; i < values.size(); ++i) r.push_back(values[i] / values[i - 1] - 1.0);
  return r;
}

double student_t_upper_tail(double t, double dof) {
  // P(T > t) = 0.5 * I_{dof / (dof + t^2)}(dof / 2, 1 / 2) for t >= 0.
  const double x = dof / (dof + t * t);
  const double a = 0.5 * dof;
  const double b = 0.5;
  // Regularized incomplete beta by continued fraction (Lentz).
  auto betacf = [](double aa, double bb, double xx) {
    const double tiny = 1e-300;
    double c = 1.0;
    double d = 1.0 - (aa + bb) * xx / (aa + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
      const double m2 = 2.0 * m;
      double num = m * (bb - m) * xx / ((aa + m2 - 1.0) * (aa + m2));
      d = 1.0 + num * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      h *= d * c;
      num = -(aa + m) * (aa + bb + m) * xx / ((aa + m2) * (aa + m2 + 1.0));
      d = 1.0 + num * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h;
  };
  auto inc_beta = [&](double aa, double bb, double xx) {
    if (xx <= 0.0) return 0.0;
    if (xx >= 1.0) return 1.0;
    const double front =
        std::exp(std::lgamma(aa + bb) - std::lgamma(aa) - std::lgamma(bb) + aa * std::log(xx) + bb * std::log1p(-xx));
    if (xx < (aa + 1.0) / (aa + bb + 2.0)) return front * betacf(aa, bb, xx) / aa;
    return 1.0 - front * betacf(bb, aa, 1.0 - xx) / bb;
  };
  const double tail = 0.5 * inc_beta(a, b, x);
  return t >= 0.0 ? tail : 1.0 - tail;
}

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("paired_t_test: need equal lengths >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  PairedTest r;
  r.mean_difference = mean(d);
  const double se = sample_std(d) / std::sqrt(static_cast<double>(d.size()));
  if (!(se > 0.0)) {
    r.t_statistic = r.mean_difference > 0 ? INFINITY : (r.mean_difference < 0 ? -INFINITY : 0.0);
    r.p_value_one_sided = r.mean_difference > 0 ? 0.0 : 1.0;
    return r;
  }
  r.t_statistic = r.mean_difference / se;
  r.p_value_one_sided = student_t_upper_tail(r.t_statistic, static_cast<double>(d.size() - 1));
  return r;
}

PairedTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t_test: need >= 2 samples per group");
  const double va = std::pow(sample_std(a), 2) / a.size();
  const double vb = std::pow(sample_std(b), 2) / b.size();
  PairedTest r;
  r.mean_difference = mean(a) - mean(b);
  const double se = std::sqrt(va + vb);
  if (!(se > 0.0)) {
    r.p_value_one_sided = r.mean_difference > 0 ? 0.0 : 1.0;
    return r;
  }
  r.t_statistic = r.mean_difference / se;
  const double dof = (va + vb) * (va + vb) / (va * va / (a.size() - 1) + vb * vb / (b.size() - 1));
  r.p_value_one_sided = student_t_upper_tail(r.t_statistic, dof);
  return r;
}

}  // namespace finflow::eval
