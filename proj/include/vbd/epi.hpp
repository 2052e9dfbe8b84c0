#pragma once

#include <cmath>

namespace vbd {

/// Host-to-vector transmission probability as a function of viral load.
/// Constant by default; the logistic profile is
///   beta(z) = beta_max / (1 + exp(-slope (z - z_half))).
class BetaHv {
 public:
  static BetaHv constant(double value) { return BetaHv(value, 0.0, 0.0, false); }
  static BetaHv logistic(double beta_max, double z_half, double slope) {
    return BetaHv(beta_max, z_half, slope, true);
  }

  double operator()(double z) const {
    if (!logistic_) return level_;
    return level_ / (1.0 + std::exp(-slope_ * (z - z_half_)));
  }

  bool is_constant() const { return !logistic_; }
  /// Constant value, or beta_max for the logistic profile.
  double level() const { return level_; }
  double z_half() const { return z_half_; }
  double slope() const { return slope_; }

  BetaHv scaled(double k) const { return BetaHv(level_ * k, z_half_, slope_, logistic_); }

 private:
  BetaHv(double level, double z_half, double slope, bool logistic)
      : level_(level), z_half_(z_half), slope_(slope), logistic_(logistic) {}

  double level_;
  double z_half_;
  double slope_;
  bool logistic_;
};

/// Population-level rates. Time in days; host and vector quantities are
/// proportions of their (constant) totals.
struct EpiParams {
  double b = 1.0 / 3.0;  // biting rate
  double beta_vh = 0.25;
  BetaHv beta_hv = BetaHv::constant(0.2);
  double m = 6.0;  // vectors per host
  double mu_v = 0.05;
  double tau_h = 7.0;
  double tau_v = 10.0;
};

/// Dengue baseline values.
inline EpiParams baseline_epi() { return EpiParams{}; }

/// Validates positivity and probability ranges; throws InvalidArgument.
void require_valid(const EpiParams& epi);

}  // namespace vbd
