#pragma once

#include <string>

#include "finflow/common/rng.hpp"
#include "finflow/market/market_env.hpp"

namespace finflow::experts {

using market::QuoteAction;

struct ASParams {
  double risk_aversion = 0.1;
  double volatility = 0.1;
  double order_decay = 1.5;
  double horizon = 1.0;
};

struct GLFTParams {
  double risk_aversion = 0.1;
  double volatility = 0.1;
  double order_decay = 1.5;
  double base_arrival = 20.0;
  double drift = 0.0;
};

/// Pre-clamp spreads; exposed so invariants can be checked before the
/// zero floor hides them.
QuoteAction as_quotes_raw(int q, double t, const ASParams& p);
QuoteAction glft_quotes_raw(int q, const GLFTParams& p);
QuoteAction glft_drift_quotes_raw(int q, const GLFTParams& p);

/// Avellaneda-Stoikov closed-form spreads with tau = T - t, floored at 0.
QuoteAction as_quotes(int q, double t, const ASParams& p);

/// GLFT asymptotic spreads:
///   c1 = ln(1 + g/k) / g,  c2 = sqrt(g / (2 A k) * (1 + g/k)^(k/g + 1)),
///   bid = c1 + sigma c2 / 2 + sigma c2 q,  ask = c1 + sigma c2 / 2 - sigma c2 q.
QuoteAction glft_quotes(int q, const GLFTParams& p);

/// GLFT with a drift skew. Its square-root factor has no gamma in front,
/// unlike c2 above; both are implemented as written. Throws
/// std::invalid_argument when volatility is 0.
QuoteAction glft_drift_quotes(int q, const GLFTParams& p);

/// Both spreads uniform on [0, range].
QuoteAction random_quotes(Rng& rng, double range);

double glft_c1(const GLFTParams& p);
double glft_c2(const GLFTParams& p);

/// Teacher calibration for a scenario: gamma = 0.1, k = spread sensitivity,
/// sigma = scenario volatility, A = mean base intensity, T = horizon.
inline constexpr double kDefaultRiskAversion = 0.1;
ASParams calibrate_as(const market::ScenarioConfig& cfg);
GLFTParams calibrate_glft(const market::ScenarioConfig& cfg);

}  // namespace finflow::experts
