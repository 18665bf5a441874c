#include "greenmass/mass_functionals.hpp"

#include "greenmass/errors.hpp"
#include "greenmass/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace greenmass {

namespace {
constexpr double kPi = std::numbers::pi;
}

FValue F_of_t(const LevelSetGeometry& geo, double t, std::optional<double> eps) {
  const SurfaceIntegralReport r = geo.surface_integrals(t, eps);
  FValue f;
  f.t = t;
  f.F = r.f_density;
  f.F_surface = 4.0 * kPi * t - t * t * r.int_H_gradu + t * t * t * r.int_gradu_sq;
  f.smear_width = r.smear_width;
  f.single_shell = r.single_shell;
  return f;
}

EValue E_of(const LevelSetGeometry& geo, double a, double s, int nodes) {
  if (!(a > 0.0) || !(s >= 0.0) || s > a) throw ValidationError("E(a,s) needs a > 0 and 0 <= s <= a");
  EValue e;
  e.a = a;
  e.s = s;
  const double lo = a + s, hi = 2.0 * (a + s);
  for (const auto& [t, w] : gauss_legendre(nodes, lo, hi)) e.quadrature += w * F_of_t(geo, t).F / (t * t * t);
  e.flux_form = 2.0 * kPi / lo + geo.surface_integrals(hi).int_gradu_sq_over_u -
                geo.surface_integrals(lo).int_gradu_sq_over_u;
  e.discrepancy = std::abs(e.flux_form - e.quadrature);
  return e;
}

double D_volumetric_integral(const LevelSetGeometry& geo, double a, const BumpProfile& psi) {
  const double s0 = psi.s0();
  const double u_lo = 1.0 / (2.0 * a * (2.0 - s0)), u_hi = 1.0 / (a * (1.0 + s0));
  const auto [i0, i1] = geo.shell_range(u_lo, u_hi);
  const auto acc = geo.reduce<1>(i0, i1, [&](const SamplePoint& p, std::array<double, 1>& s) {
    if (p.masked || p.u < u_lo || p.u > u_hi) return;
    const double x = 1.0 / (a * p.u);
    const double w = 0.5 * psi.psi(0.5 * x - 1.0) - psi.psi(x - 1.0);
    if (w == 0.0) return;
    const double q = p.grad_g / p.u;
    s[0] += w * q * q * q * p.dv_g;
  });
  return acc[0];
}

DValue D_of(const LevelSetGeometry& geo, double a, const BumpProfile& psi, const DOptions& opt) {
  if (!(a > 0.0)) throw ValidationError("D(a) needs a > 0");
  DValue d;
  d.a = a;
  d.D = psi.c_psi() + D_volumetric_integral(geo, a, psi);
  d.s_quadrature = std::numeric_limits<double>::quiet_NaN();
  if (opt.cross_check) {
    const double s0 = psi.s0();
    double sum = 0.0;
    for (const auto& [s, w] : gauss_legendre(opt.s_nodes, s0 * a, (1.0 - s0) * a))
      sum += w * psi.psi(s / a) * E_of(geo, a, s, opt.e_nodes).quadrature;
    d.s_quadrature = sum;
    d.discrepancy = std::abs(d.D - sum);
    const double tol = opt.tolerance * std::max(std::abs(d.D), psi.c_psi());
    if (d.discrepancy > tol)
      throw InconsistentForms("D(a): volumetric " + std::to_string(d.D) + " vs s-quadrature " +
                              std::to_string(sum) + " at a = " + std::to_string(a));
  }
  return d;
}

double radial_D_oracle(const MetricModel& model, double a, const BumpProfile& psi) {
  if (!model.is_radial()) throw UnsupportedModel("radial D oracle needs a radial model");
  const double s0 = psi.s0();
  auto u = [&](double x) { return radial_oracle_value(model, std::exp(x)); };
  // ln r where u = target; u is decreasing
  auto level = [&](double target) {
    double lo = std::log(0.5 / target) - 5.0, hi = std::log(2.0 / target) + 5.0;
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::bisect([&](double x) { return u(x) - target; }, lo, hi, tol, it);
    return 0.5 * (r.first + r.second);
  };
  auto integrand = [&](double x) {
    const double r = std::exp(x);
    const double ph = model.conformal_factor(Vec3(0.0, 0.0, r));
    const double uv = u(x);
    const double du = 1.0 / (r * r * ph * ph);
    const double q = du / uv;
    const double y = 1.0 / (a * uv);
    return (0.5 * psi.psi(0.5 * y - 1.0) - psi.psi(y - 1.0)) * q * q * q * r * r * r;
  };
  double sum = 0.0;
  for (double k : {1.0, 2.0}) {
    const double xa = level(1.0 / (k * a * (1.0 + s0))), xb = level(1.0 / (k * a * (2.0 - s0)));
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, xa, xb, 12, 1e-13);
  }
  return psi.c_psi() + 4.0 * kPi * sum;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::NotApplicable: return "N/A";
  }
  return "?";
}

void validate_a_grid(const std::vector<double>& a_grid) {
  if (a_grid.empty()) throw InvalidSpec("a_grid is empty");
  for (double a : a_grid)
    if (!(a > 0.0)) throw InvalidSpec("a_grid entries must be positive");
  if (a_grid.size() < 2) return;
  const double q = a_grid[1] / a_grid[0];
  if (q < 1.5 || q > 4.0) throw InvalidSpec("a_grid ratio must lie in [1.5, 4]");
  for (std::size_t i = 1; i < a_grid.size(); ++i)
    if (std::abs(a_grid[i] / a_grid[i - 1] - q) > 1e-9 * q) throw InvalidSpec("a_grid is not geometric");
}

FunctionalSeries F_series(const LevelSetGeometry& geo, const std::vector<double>& t_grid, const SeriesOptions& opt) {
  FunctionalSeries out;
  out.t_grid = t_grid;
  out.hypothesis_R_nonnegative = geo.solution().model.curvature_nonnegative();
  for (double t : t_grid) out.F.push_back(F_of_t(geo, t));
  bool mono = true, nonneg = true;
  for (std::size_t i = 0; i < out.F.size(); ++i) {
    const double f = out.F[i].F;
    const double scale = 4.0 * kPi * out.F[i].t;
    if (f < -opt.monotone_tol * scale) nonneg = false;
    if (i == 0) continue;
    const double prev = out.F[i - 1].F;
    const double tol = opt.monotone_tol * (1.0 + std::abs(f));
    if (f < prev - tol) {
      mono = false;
      out.violations.push_back({"F", out.F[i - 1].t, out.F[i].t, prev, f, prev - f, tol});
    }
  }
  // without R >= 0 the violations are informational only
  if (!out.F.empty() && out.hypothesis_R_nonnegative) {
    out.F_monotone = mono ? Verdict::Pass : Verdict::Violated;
    out.F_nonnegative = nonneg ? Verdict::Pass : Verdict::Violated;
  }
  return out;
}

FunctionalSeries aD_series(const LevelSetGeometry& geo, const std::vector<double>& a_grid, const BumpProfile& psi,
                           const SeriesOptions& opt) {
  validate_a_grid(a_grid);
  FunctionalSeries out;
  out.a_grid = a_grid;
  out.hypothesis_R_nonnegative = geo.solution().model.curvature_nonnegative();
  for (double a : a_grid) out.D.push_back(D_of(geo, a, psi, opt.d));
  bool mono = true, nonneg = true;
  for (std::size_t i = 0; i < out.D.size(); ++i) {
    const DValue& d = out.D[i];
    const double tol = opt.monotone_tol * std::max(std::abs(d.aD()), psi.c_psi());
    if (d.D < -opt.monotone_tol * psi.c_psi()) {
      nonneg = false;
      out.violations.push_back({"D", d.a, d.a, 0.0, d.D, -d.D, opt.monotone_tol * psi.c_psi()});
    }
    if (i == 0) continue;
    const DValue& p = out.D[i - 1];
    if (d.aD() < p.aD() - tol) {
      mono = false;
      out.violations.push_back({"aD", p.a, d.a, p.aD(), d.aD(), p.aD() - d.aD(), tol});
    }
  }
  if (out.hypothesis_R_nonnegative) {
    out.D_nonnegative = nonneg ? Verdict::Pass : Verdict::Violated;
    out.aD_monotone = mono ? Verdict::Pass : Verdict::Violated;
  }
  const std::size_t n = out.D.size();
  const std::size_t first = n >= 3 ? n - 3 : 0;
  double spread = 0.0;
  for (std::size_t i = first; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) spread = std::max(spread, std::abs(out.D[i].aD() - out.D[j].aD()));
  out.limit = out.D.back().aD();
  out.uncertainty = spread;
  out.plateau = n >= 3 && spread <= 0.05 * std::abs(out.limit) + opt.monotone_tol * psi.c_psi();
  return out;
}

}  // namespace greenmass
