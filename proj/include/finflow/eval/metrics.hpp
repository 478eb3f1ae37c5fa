#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace finflow::eval {

/// Raised when a Sharpe ratio has no meaning (zero dispersion).
class UndefinedSharpe : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (prod(1 + r_i) - 1) * 100. Throws std::invalid_argument if any r_i <= -1.
double cumulative_return(std::span<const double> period_returns);

/// Sample mean over sample standard deviation (ddof = 1), risk-free rate 0.
/// Throws std::logic_error for fewer than two values and UndefinedSharpe
/// when the standard deviation is zero.
double sharpe(std::span<const double> excess_returns);

/// Largest peak-to-trough fall as a fraction of the running peak.
/// Throws std::invalid_argument for empty input or nonpositive values.
double max_drawdown(std::span<const double> values);

/// Simple period returns v[i+1]/v[i] - 1.
std::vector<double> period_returns(std::span<const double> values);

double mean(std::span<const double> xs);
/// Sample standard deviation (ddof = 1); 0 for fewer than two values.
double sample_std(std::span<const double> xs);

/// Pairwise (tree) summation with a fixed split order.
double pairwise_sum(std::span<const double> xs);

struct PairedTest {
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  double p_value_one_sided = 1.0;  // H1: mean(a - b) > 0
};

/// One-sided paired t-test of a against b (equal lengths >= 2).
PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

/// One-sided Welch t-test of mean(a) > mean(b).
PairedTest welch_t_test(std::span<const double> a, std::span<const double> b);

/// Upper tail of Student's t with `dof` degrees of freedom.
double student_t_upper_tail(double t, double dof);

}  // namespace finflow::eval
