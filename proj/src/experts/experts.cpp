#include "finflow/experts/experts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace finflow::experts {
namespace {

QuoteAction floor_at_zero(QuoteAction a) { return {std::max(0.0, a.delta_bid), std::max(0.0, a.delta_ask)}; }

}  // namespace

QuoteAction as_quotes_raw(int q, double t, const ASParams& p) {
  if (t > p.horizon + 1e-12) throw std::invalid_argument("as_quotes: t beyond horizon");
  const double tau = std::max(0.0, p.horizon - t);
  const double g = p.risk_aversion;
  const double risk = g * p.volatility * p.volatility * tau;
  const double base = 0.5 * risk + std::log1p(g / p.order_decay) / g;
  return {base - q * risk, base + q * risk};
}

QuoteAction as_quotes(int q, double t, const ASParams& p) { return floor_at_zero(as_quotes_raw(q, t, p)); }

double glft_c1(const GLFTParams& p) { return std::log1p(p.risk_aversion / p.order_decay) / p.risk_aversion; }

double glft_c2(const GLFTParams& p) {
  const double g = p.risk_aversion;
  const double k = p.order_decay;
  return std::sqrt(g / (2.0 * p.base_arrival * k) * std::pow(1.0 + g / k, k / g + 1.0));
}

QuoteAction glft_quotes_raw(int q, const GLFTParams& p) {
  const double c1 = glft_c1(p);
  const double sc2 = p.volatility * glft_c2(p);
  return {c1 + 0.5 * sc2 + sc2 * q, c1 + 0.5 * sc2 - sc2 * q};
}

QuoteAction glft_quotes(int q, const GLFTParams& p) { return floor_at_zero(glft_quotes_raw(q, p)); }

QuoteAction glft_drift_quotes_raw(int q, const GLFTParams& p) {
  if (!(p.volatility > 0.0)) throw std::invalid_argument("glft_drift_quotes: volatility must be > 0");
  const double g = p.risk_aversion;
  const double k = p.order_decay;
  const double s2 = p.volatility * p.volatility;
  const double root = std::sqrt(s2 / (2.0 * k * p.base_arrival) * std::pow(1.0 + g / k, 1.0 + k / g));
  const double c1 = std::log1p(g / k) / g;
  const double skew = p.drift / (g * s2);
  return {c1 + (-skew + (2.0 * q + 1.0) / 2.0) * root, c1 + (skew - (2.0 * q - 1.0) / 2.0) * root};
}

QuoteAction glft_drift_quotes(int q, const GLFTParams& p) { return floor_at_zero(glft_drift_quotes_raw(q, p)); }

QuoteAction random_quotes(Rng& rng, double range) {
  if (!(range > 0.0)) throw std::invalid_argument("random_quotes: range must be > 0");
  std::uniform_real_distribution<double> dist(0.0, range);
  const double bid = dist(rng);
  const double ask = dist(rng);
  return {bid, ask};
}

ASParams calibrate_as(const market::ScenarioConfig& cfg) {
  return {kDefaultRiskAversion, cfg.volatility, cfg.spread_sensitivity, cfg.horizon};
}

GLFTParams calibrate_glft(const market::ScenarioConfig& cfg) {
  return {kDefaultRiskAversion, cfg.volatility, cfg.spread_sensitivity,
          0.5 * (cfg.base_intensity_buy + cfg.base_intensity_sell), cfg.drift};
}

}  // namespace finflow::experts
