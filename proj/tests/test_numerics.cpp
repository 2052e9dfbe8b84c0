#include <doctest.h>

#include <cmath>

#include "vbd/errors.hpp"
#include "vbd/numerics.hpp"

using namespace vbd;
using namespace vbd::numerics;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("find_root locates simple roots to the requested width") {
  const double r = find_root([](double x) { return x * x - 2.0; }, {0.0, 2.0, 1e-13});
  CHECK(std::fabs(r - std::sqrt(2.0)) < 1e-13);

  const double c = find_root([](double x) { return std::cos(x) - x; }, {0.0, 1.0, 1e-14});
  CHECK(std::fabs(std::cos(c) - c) < 1e-13);
}

TEST_CASE("find_root accepts a root sitting on the bracket end") {
  const double r = find_root([](double x) { return x - 1.0; }, {1.0, 3.0, 1e-12});
  CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("find_root errors") {
  CHECK(kind_of([] { find_root([](double x) { return x * x + 1.0; }, {-1.0, 1.0}); }) == ErrorKind::NoSignChange);
  CHECK(kind_of([] { find_root([](double x) { return x; }, {1.0, -1.0}); }) == ErrorKind::InvalidInterval);
  CHECK(kind_of([] { find_root([](double x) { return std::exp(x) - 1.7; }, {0.0, 1.0, 1e-30, 3}); }) ==
        ErrorKind::MaxIterExceeded);
}

TEST_CASE("Gauss-Legendre panels integrate polynomials up to degree 13 exactly") {
  const QuadratureSpec gl{3, QuadratureRule::GaussLegendrePerPanel};
  const double v = integrate([](double x) { return std::pow(x, 13) - 3.0 * x * x; }, 0.0, 2.0, gl);
  CHECK(v == doctest::Approx(std::pow(2.0, 14) / 14.0 - 8.0).epsilon(1e-13));
}

TEST_CASE("trapezoid error shrinks fourfold when panels double") {
  auto f = [](double x) { return std::exp(x); };
  const double exact = std::exp(1.0) - 1.0;
  const double e1 = std::fabs(integrate(f, 0.0, 1.0, {50}) - exact);
  const double e2 = std::fabs(integrate(f, 0.0, 1.0, {100}) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("integrate rejects reversed intervals and handles empty ones") {
  CHECK(kind_of([] { integrate([](double) { return 1.0; }, 1.0, 0.0); }) == ErrorKind::InvalidInterval);
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("rk4 is fourth order and lands exactly on t1") {
  const VectorField rhs = [](double, std::span<const double> x, std::span<double> d) {
    d[0] = x[1];
    d[1] = -x[0];
  };
  auto err = [&](double dt) {
    const auto tr = rk4_integrate(rhs, {1.0, 0.0}, 0.0, 3.0, dt);
    CHECK(tr.back().t == 3.0);
    return std::hypot(tr.back().x[0] - std::cos(3.0), tr.back().x[1] + std::sin(3.0));
  };
  const double e1 = err(0.1), e2 = err(0.05);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.05));

  const auto tr = rk4_integrate(rhs, {1.0, 0.0}, 0.0, 1.0, 0.3);
  CHECK(tr.size() == 5);
  CHECK(tr.back().t == 1.0);
}

TEST_CASE("rk4 reports blow-up") {
  const VectorField rhs = [](double, std::span<const double> x, std::span<double> d) { d[0] = x[0] * x[0]; };
  CHECK(kind_of([&] { rk4_integrate(rhs, {1.0}, 0.0, 5.0, 0.1); }) == ErrorKind::NonFiniteState);
}
