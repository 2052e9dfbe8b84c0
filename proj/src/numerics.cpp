#include "vbd/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "vbd/errors.hpp"

namespace vbd::numerics {

double find_root(const ScalarFn& f, const RootBracket& bracket) {
  if (!(bracket.lo < bracket.hi)) {
    throw Error(ErrorKind::InvalidInterval, "root bracket requires lo < hi");
  }
  if (!(bracket.tol_abs > 0.0) || bracket.max_iter < 1) {
    throw Error(ErrorKind::InvalidArgument, "root bracket requires tol_abs > 0 and max_iter >= 1");
  }
  const double flo = f(bracket.lo);
  const double fhi = f(bracket.hi);
  if (flo == 0.0) return bracket.lo;
  if (fhi == 0.0) return bracket.hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || std::signbit(flo) == std::signbit(fhi)) {
    throw Error(ErrorKind::NoSignChange,
                "f(" + std::to_string(bracket.lo) + ")=" + std::to_string(flo) + ", f(" +
                    std::to_string(bracket.hi) + ")=" + std::to_string(fhi));
  }

  const double tol = bracket.tol_abs;
  auto done = [tol](double a, double b) { return std::fabs(b - a) <= tol; };
  std::uintmax_t iters = static_cast<std::uintmax_t>(bracket.max_iter);
  auto wrapped = [&f](double x) { return f(x); };
  const auto [a, b] = boost::math::tools::toms748_solve(wrapped, bracket.lo, bracket.hi, flo, fhi, done, iters);
  if (a == b) return a;  // exact zero hit
  if (!done(a, b)) {
    throw Error(ErrorKind::MaxIterExceeded,
                "bracket width " + std::to_string(b - a) + " after " + std::to_string(iters) + " iterations");
  }
  return 0.5 * (a + b);
}

double integrate(const ScalarFn& f, double a, double b, const QuadratureSpec& spec) {
  if (a > b) throw Error(ErrorKind::InvalidInterval, "integration bounds require a <= b");
  if (spec.n_panels < 1) throw Error(ErrorKind::InvalidArgument, "n_panels must be >= 1");
  if (a == b) return 0.0;

  const int n = spec.n_panels;
  const double h = (b - a) / n;
  double acc = 0.0;
  switch (spec.rule) {
    case QuadratureRule::Trapezoid: {
      acc = 0.5 * (f(a) + f(b));
      for (int i = 1; i < n; ++i) acc += f(a + i * h);
      return acc * h;
    }
    case QuadratureRule::GaussLegendrePerPanel: {
      using Gauss = boost::math::quadrature::gauss<double, 7>;
      for (int i = 0; i < n; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == n) ? b : lo + h;
        acc += Gauss::integrate(f, lo, hi);
      }
      return acc;
    }
  }
  return acc;
}

State rk4_step(const VectorField& rhs, double t, std::span<const double> x, double h) {
  const std::size_t n = x.size();
  State k1(n), k2(n), k3(n), k4(n), tmp(n), out(n);
  rhs(t, x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  rhs(t + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Trajectory rk4_integrate(const VectorField& rhs, State state0, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "rk4 requires dt > 0");
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidInterval, "rk4 requires t1 > t0");

  Trajectory traj;
  traj.reserve(static_cast<std::size_t>((t1 - t0) / dt) + 2);
  traj.push_back({t0, state0});

  State x = std::move(state0);
  double t = t0;
  for (long long k = 1; t < t1; ++k) {
    double t_next = t0 + static_cast<double>(k) * dt;
    // Final step lands exactly on t1; a sliver below 1e-9*dt is absorbed.
    if (t_next >= t1 - 1e-9 * dt) t_next = t1;
    x = rk4_step(rhs, t, x, t_next - t);
    for (double v : x) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteState, "at t=" + std::to_string(t_next));
    }
    t = t_next;
    traj.push_back({t, x});
  }
  return traj;
}

}  // namespace vbd::numerics
