#pragma once

#include <vector>

namespace vbd {

/// Antibody-level density of hosts entering the infected compartment,
/// supported on [0, y0). Gaussians are truncated to [0, y0] and renormalized.
class EntryDistribution {
 public:
  enum class Kind { Dirac, Gaussian, Uniform, Tabulated };

  static EntryDistribution dirac(double y_star, double y0);
  static EntryDistribution gaussian(double center, double variance, double y0);
  static EntryDistribution uniform(double y0);
  /// Piecewise-linear density through (nodes, values), normalized on [0, y0].
  static EntryDistribution tabulated(std::vector<double> nodes, std::vector<double> values, double y0);

  Kind kind() const { return kind_; }
  double y0() const { return y0_; }

  /// Density; zero outside [0, y0]. Not defined for Dirac.
  double pdf(double y) const;
  /// Probability mass on [lo, hi] intersected with [0, y0].
  double mass(double lo, double hi) const;
  /// Expected entry level y*.
  double mean() const;
  /// Location of the atom of a Dirac distribution.
  double atom() const { return center_; }
  double variance() const { return variance_; }

 private:
  EntryDistribution() = default;
  double cdf(double y) const;

  Kind kind_ = Kind::Uniform;
  double y0_ = 1.0;
  double center_ = 0.0;
  double variance_ = 0.0;
  double norm_ = 1.0;  // gaussian: Phi(b) - Phi(a); tabulated: raw integral
  std::vector<double> nodes_;
  std::vector<double> values_;
};

}  // namespace vbd
