#pragma once

#include <functional>
#include <span>
#include <vector>

namespace vbd::numerics {

using ScalarFn = std::function<double(double)>;

struct RootBracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol_abs = 1e-10;
  int max_iter = 200;
};

/// Bracketed root of a continuous scalar function. The returned x lies in
/// [lo, hi] and within tol_abs of a sign change of f.
/// Throws NoSignChange when f(lo) and f(hi) share a sign and
/// MaxIterExceeded when the bracket cannot be shrunk to tol_abs.
double find_root(const ScalarFn& f, const RootBracket& bracket);

enum class QuadratureRule { Trapezoid, GaussLegendrePerPanel };

struct QuadratureSpec {
  int n_panels = 2000;
  QuadratureRule rule = QuadratureRule::Trapezoid;
};

/// Composite quadrature of f over [a, b]. Throws InvalidInterval if a > b.
double integrate(const ScalarFn& f, double a, double b, const QuadratureSpec& spec = {});

using State = std::vector<double>;
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

struct TrajectoryPoint {
  double t;
  State x;
};
using Trajectory = std::vector<TrajectoryPoint>;

/// Classical fixed-step RK4 from t0 to t1. The last step is shortened so the
/// trajectory ends exactly at t1. Throws NonFiniteState on overflow/NaN.
Trajectory rk4_integrate(const VectorField& rhs, State state0, double t0, double t1, double dt);

/// One classical RK4 step of size h; the building block of rk4_integrate.
State rk4_step(const VectorField& rhs, double t, std::span<const double> x, double h);

}  // namespace vbd::numerics
