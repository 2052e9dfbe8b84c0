#include "vbd/reproduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "vbd/errors.hpp"

namespace vbd {
namespace {

constexpr int kInnerPanels = 40;
constexpr int kDfeScanPoints = 10'000;

void require_constant_beta(const EpiParams& epi) {
  if (!epi.beta_hv.is_constant()) {
    throw Error(ErrorKind::NonConstantBetaHv, "the delay model needs a constant beta_hv");
  }
}

// Nodes and weights of the composite rule on [a, b].
struct Node {
  double x;
  double w;
};

std::vector<Node> composite_nodes(double a, double b, const numerics::QuadratureSpec& quad) {
  if (quad.n_panels < 1) throw Error(ErrorKind::InvalidArgument, "n_panels must be >= 1");
  std::vector<Node> nodes;
  const double h = (b - a) / quad.n_panels;
  if (quad.rule == numerics::QuadratureRule::Trapezoid) {
    nodes.reserve(static_cast<std::size_t>(quad.n_panels) + 1);
    for (int i = 0; i <= quad.n_panels; ++i) {
      const double w = (i == 0 || i == quad.n_panels) ? 0.5 * h : h;
      nodes.push_back({a + i * h, w});
    }
    return nodes;
  }
  using Rule = boost::math::quadrature::gauss<double, 7>;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  for (int i = 0; i < quad.n_panels; ++i) {
    const double mid = a + (i + 0.5) * h;
    for (std::size_t k = 0; k < abs.size(); ++k) {
      if (abs[k] == 0.0) {
        nodes.push_back({mid, 0.5 * h * wts[k]});
      } else {
        nodes.push_back({mid - 0.5 * h * abs[k], 0.5 * h * wts[k]});
        nodes.push_back({mid + 0.5 * h * abs[k], 0.5 * h * wts[k]});
      }
    }
  }
  return nodes;
}

// Integral of beta_hv along the characteristic from (z0, y_entry) up to tau1.
double beta_path_integral(const WithinHostParams& whp, const EpiParams& epi, double y_entry, double tau1) {
  if (epi.beta_hv.is_constant()) return epi.beta_hv.level() * tau1;
  return numerics::integrate([&](double s) { return epi.beta_hv(flow(whp, whp.z0, y_entry, s).first); }, 0.0, tau1,
                             {kInnerPanels, numerics::QuadratureRule::GaussLegendrePerPanel});
}

std::optional<EndemicState> endemic_from(const EpiParams& epi, double r0, double t_inf, double t_rec,
                                         double t_beta) {
  if (!(r0 > 1.0)) return std::nullopt;
  const double span = t_inf + t_rec + epi.tau_h;
  const double vec = 1.0 + epi.mu_v * epi.tau_v;
  EndemicState s;
  s.E = epi.mu_v * epi.tau_h * (r0 - 1.0) / (epi.mu_v * r0 * span + epi.b * t_beta);
  const double vdenom = r0 * vec + epi.b * epi.beta_vh * epi.m * span;
  s.Ev = epi.mu_v * epi.tau_v * (r0 - 1.0) / vdenom;
  s.Iv = (r0 - 1.0) / vdenom;
  return s;
}

}  // namespace

void require_valid(const EpiParams& epi) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (!(epi.b > 0.0)) bad("b must be positive");
  if (!(epi.m >= 0.0)) bad("m must be non-negative");
  if (!(epi.mu_v > 0.0)) bad("mu_v must be positive");
  if (!(epi.tau_h > 0.0)) bad("tau_h must be positive");
  if (!(epi.tau_v > 0.0)) bad("tau_v must be positive");
  if (!(epi.beta_vh >= 0.0 && epi.beta_vh <= 1.0)) bad("beta_vh must lie in [0, 1]");
  if (!(epi.beta_hv.level() >= 0.0 && epi.beta_hv.level() <= 1.0)) bad("beta_hv must lie in [0, 1]");
  if (!epi.beta_hv.is_constant() && !(std::isfinite(epi.beta_hv.slope()) && std::isfinite(epi.beta_hv.z_half()))) {
    bad("logistic beta_hv needs finite slope and midpoint");
  }
}

double transmission_factor(const EpiParams& epi) {
  require_valid(epi);
  return epi.b * epi.b * epi.beta_vh * epi.m / (epi.mu_v * (1.0 + epi.tau_v * epi.mu_v));
}

double r0_uhr(const EpiParams& epi, double tau1) {
  require_constant_beta(epi);
  if (!(tau1 >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau1 must be non-negative");
  return transmission_factor(epi) * epi.beta_hv.level() * tau1;
}

std::optional<EndemicState> endemic_uhr(const EpiParams& epi, double tau1, double tau2) {
  if (!(tau2 >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau2 must be non-negative");
  const double r0 = r0_uhr(epi, tau1);
  return endemic_from(epi, r0, tau1, tau2, epi.beta_hv.level() * tau1);
}

std::array<double, 3> uhr_stationary_residual(const EpiParams& epi, double tau1, double tau2, const EndemicState& s) {
  require_constant_beta(epi);
  const double window_all = s.E * (tau1 + tau2) / epi.tau_h;
  const double window_inf = s.E * tau1 / epi.tau_h;
  return {epi.b * epi.beta_vh * epi.m * s.Iv * (1.0 - s.E - window_all) - s.E / epi.tau_h,
          epi.b * epi.beta_hv.level() * window_inf * (1.0 - s.Ev - s.Iv) - (1.0 / epi.tau_v + epi.mu_v) * s.Ev,
          s.Ev / epi.tau_v - epi.mu_v * s.Iv};
}

MeanTimes mean_times(const WithinHostParams& whp, const EntryDistribution& g, const EpiParams& epi,
                     const numerics::QuadratureSpec& quad) {
  require_valid(whp);
  require_valid(epi);
  const double y0 = whp.y0();
  if (g.kind() == EntryDistribution::Kind::Dirac) {
    const InfectionWindow w = permanence(whp, g.atom());
    return {w.tau1, w.tau2, beta_path_integral(whp, epi, g.atom(), w.tau1)};
  }
  double den = 0.0, n1 = 0.0, n2 = 0.0, nb = 0.0;
  for (const Node& nd : composite_nodes(0.0, y0, quad)) {
    // The weight a1 z0 - a2 y vanishes at y0, where the window is undefined.
    if (nd.x >= y0) continue;
    const double w = nd.w * g.pdf(nd.x) * (whp.a1 * whp.z0 - whp.a2 * nd.x);
    if (w == 0.0) continue;
    const InfectionWindow win = permanence(whp, nd.x);
    den += w;
    n1 += w * win.tau1;
    n2 += w * win.tau2;
    nb += w * beta_path_integral(whp, epi, nd.x, win.tau1);
  }
  if (!(den > 0.0)) throw Error(ErrorKind::InvalidArgument, "entry distribution has no mass on [0, y0)");
  return {n1 / den, n2 / den, nb / den};
}

double r0_full(const EpiParams& epi, const MeanTimes& times) { return transmission_factor(epi) * times.T1_beta; }

double r0_full(const WithinHostParams& whp, const EntryDistribution& g, const EpiParams& epi,
               const numerics::QuadratureSpec& quad) {
  return r0_full(epi, mean_times(whp, g, epi, quad));
}

std::optional<EndemicState> endemic_full(const EpiParams& epi, const MeanTimes& times) {
  return endemic_from(epi, r0_full(epi, times), times.T1, times.T2, times.T1_beta);
}

std::optional<EndemicState> endemic_full(const WithinHostParams& whp, const EntryDistribution& g,
                                         const EpiParams& epi, const numerics::QuadratureSpec& quad) {
  return endemic_full(epi, mean_times(whp, g, epi, quad));
}

EndemicFields realize_endemic_fields(const WithinHostParams& whp, const EntryDistribution& g, const EpiParams& epi,
                                     const EndemicState& eq, const Grid2D& grid,
                                     const numerics::QuadratureSpec& quad) {
  require_valid(whp);
  require_valid(epi);
  if (g.kind() == EntryDistribution::Kind::Dirac) {
    throw Error(ErrorKind::InvalidArgument, "a Dirac entry distribution has no density on the grid");
  }
  constexpr int kSub = 3;
  const double vz_star = whp.a1 * whp.z0 - whp.a2 * g.mean();
  const double inflow = eq.E / (epi.tau_h * vz_star);
  const double decay = whp.a3 - whp.a1;

  EndemicFields f;
  f.I.assign(grid.cells(), 0.0);
  for (int iz = 0; iz < grid.nz; ++iz) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      double acc = 0.0;
      for (int sz = 0; sz < kSub; ++sz) {
        for (int sy = 0; sy < kSub; ++sy) {
          const double z = grid.z_face(iz) + (sz + 0.5) * grid.dz / kSub;
          const double y = grid.y_face(iy) + (sy + 0.5) * grid.dy / kSub;
          if (const auto o = flow_origin(whp, z, y)) acc += g.pdf(o->y_entry) * std::exp(decay * o->tau);
        }
      }
      f.I[grid.index(iz, iy)] = inflow * acc / (kSub * kSub);
    }
  }

  // R*(y) a5 y equals the outflow through z0 above y; entries below the
  // crossing level y'_c(y) are exactly those leaving above y.
  const double y_top = permanence(whp, 0.0).y_plus;
  auto vz_g = [&](double yy) { return g.pdf(yy) * (whp.a1 * whp.z0 - whp.a2 * yy); };
  f.R.assign(static_cast<std::size_t>(grid.recovered_cells()), 0.0);
  for (int r = 0; r < grid.recovered_cells(); ++r) {
    double acc = 0.0;
    for (int s = 0; s < kSub; ++s) {
      const double y = grid.y_face(grid.inflow_cells + r) + (s + 0.5) * grid.dy / kSub;
      if (y >= y_top) continue;
      auto gap = [&](double ye) { return permanence(whp, ye).y_plus - y; };
      const double hi = whp.y0() * (1.0 - 1e-9);
      const double yc = gap(hi) >= 0.0 ? hi : numerics::find_root(gap, {0.0, hi, 1e-12, 200});
      acc += numerics::integrate(vz_g, 0.0, yc, quad) / (whp.a5 * y);
    }
    f.R[static_cast<std::size_t>(r)] = inflow * acc / kSub;
  }
  return f;
}

std::array<double, 3> full_stationary_residual(const EpiParams& epi, const EndemicState& s, double I_mass,
                                               double I_beta_mass, double R_mass) {
  return {epi.b * epi.beta_vh * epi.m * s.Iv * (1.0 - s.E - I_mass - R_mass) - s.E / epi.tau_h,
          epi.b * I_beta_mass * (1.0 - s.Ev - s.Iv) - (1.0 / epi.tau_v + epi.mu_v) * s.Ev,
          s.Ev / epi.tau_v - epi.mu_v * s.Iv};
}

std::complex<double> dfe_char_residual(const EpiParams& epi, double tau1, std::complex<double> lambda) {
  const double th = epi.tau_h, tv = epi.tau_v, mu = epi.mu_v;
  const double k = epi.b * epi.b * epi.beta_vh * epi.beta_hv.level() * epi.m;
  const std::complex<double> x = lambda * tau1;
  std::complex<double> kernel;
  if (std::abs(x) < 1e-6) {
    kernel = -tau1 * (1.0 - x / 2.0 + x * x / 6.0);
  } else {
    kernel = (std::exp(-x) - 1.0) / lambda;
  }
  const std::complex<double> poly =
      ((th * tv * lambda + (2.0 * th * tv * mu + th + tv)) * lambda + (th * tv * mu * mu + th * mu + 2.0 * tv * mu + 1.0)) *
          lambda +
      (tv * mu * mu + mu);
  return poly + k * kernel;
}

DfeRealRootTest dfe_real_root_test(const EpiParams& epi, double tau1) {
  require_constant_beta(epi);
  if (!(tau1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau1 must be positive");
  auto f = [&](double l) { return dfe_char_residual(epi, tau1, {l, 0.0}).real(); };
  const double lmax = 50.0 / tau1;
  double prev_l = 0.0;
  double prev = f(0.0);
  for (int i = 1; i <= kDfeScanPoints; ++i) {
    const double l = lmax * i / kDfeScanPoints;
    const double cur = f(l);
    if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
      const double root = numerics::find_root(f, {prev_l, l, 1e-14 * std::max(1.0, l), 400});
      return {true, root, f(root)};
    }
    prev = cur;
    prev_l = l;
  }
  return {};
}

}  // namespace vbd
