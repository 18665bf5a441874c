#include "greenmass/elliptic_green.hpp"

#include "greenmass/errors.hpp"
#include "greenmass/field_derivatives.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace greenmass {

std::string to_string(Provenance p) { return p == Provenance::GridSolve ? "GridSolve" : "RadialOracle"; }

namespace {

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

FluxOperator assemble_operator(std::shared_ptr<const SphericalGrid> grid, const MetricModel& model) {
  const SphericalGrid& g = *grid;
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi();
  const std::size_t n = g.size();
  FluxOperator op;
  op.grid = grid;
  auto& s = op.stencil;
  s.n_r = nr;
  s.n_theta = nt;
  s.n_phi = np;
  for (auto* v : {&s.diag, &s.w_rm, &s.w_rp, &s.w_tm, &s.w_tp, &s.w_pm, &s.w_pp}) v->assign(n, 0.0);
  op.cell_a.resize(n);
  op.radial_trans.assign(g.columns() * (nr + 1), 0.0);
  op.inner_current.resize(g.columns());

  const auto& rc = g.r_centers();
  const auto& rf = g.r_faces();
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < nr; ++i) {
        const double a = model.conductivity_scalar(g.centre(i, j, k));
        if (!(a > 0.0) || !std::isfinite(a)) throw NonPositiveDefinite("conductivity not positive at a cell centre");
        op.cell_a[g.index(i, j, k)] = a;
      }

  for (int j = 0; j < nt; ++j) {
    const double dom = g.solid_angle(j);
    for (int k = 0; k < np; ++k) {
      const std::size_t col = g.column(j, k);
      double* T = &op.radial_trans[col * (nr + 1)];
      const Vec3 e = g.unit(j, k);
      op.inner_current[col] = model.conductivity_scalar(rf[0] * e) * dom;
      for (int f = 1; f < nr; ++f) {
        const double a0 = op.cell_a[g.index(f - 1, j, k)], a1 = op.cell_a[g.index(f, j, k)];
        const double res = (1.0 / rc[f - 1] - 1.0 / rf[f]) / a0 + (1.0 / rf[f] - 1.0 / rc[f]) / a1;
        T[f] = dom / res;
      }
      const double al = op.cell_a[g.index(nr - 1, j, k)];
      T[nr] = dom * al / (1.0 / rc[nr - 1] - 1.0 / rf[nr]);
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        s.w_rm[c] = (i > 0) ? T[i] : 0.0;
        s.w_rp[c] = (i + 1 < nr) ? T[i + 1] : 0.0;
      }
    }
  }

  // angular faces: planar face area over centre distance along the sphere of radius r_c
  for (int i = 0; i < nr; ++i) {
    const double ring = 0.5 * (rf[i + 1] * rf[i + 1] - rf[i] * rf[i]);
    for (int j = 0; j < nt; ++j) {
      const double st = std::sin(g.theta_centers()[j]);
      const double tphi = ring * g.dtheta() / (rc[i] * st * g.dphi());
      const double sf = std::sin(g.theta_faces()[j + 1]);
      const double ttheta = ring * sf * g.dphi() / (rc[i] * g.dtheta());
      for (int k = 0; k < np; ++k) {
        const std::size_t c = g.index(i, j, k);
        const std::size_t cp = g.index(i, j, (k + 1) % np);
        const double wp = tphi * harmonic(op.cell_a[c], op.cell_a[cp]);
        s.w_pp[c] = wp;
        s.w_pm[cp] = wp;
        if (j + 1 < nt) {
          const std::size_t ct = g.index(i, j + 1, k);
          const double wt = ttheta * harmonic(op.cell_a[c], op.cell_a[ct]);
          s.w_tp[c] = wt;
          s.w_tm[ct] = wt;
        }
      }
    }
  }
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        double d = s.w_rm[c] + s.w_rp[c] + s.w_tm[c] + s.w_tp[c] + s.w_pm[c] + s.w_pp[c];
        if (i + 1 == nr) d += op.radial_trans[g.column(j, k) * (nr + 1) + nr];
        s.diag[c] = d;
      }
  return op;
}

void FluxOperator::apply(std::span<const double> x, std::span<double> y) const {
  kernels::parallel::apply(stencil, x, y);
}

double FluxOperator::shell_flux(std::span<const double> x, int face, double outer) const {
  const SphericalGrid& g = *grid;
  const int nr = g.n_r();
  double sum = 0.0;
  for (std::size_t col = 0; col < g.columns(); ++col) {
    const double T = radial_trans[col * (nr + 1) + face];
    const std::size_t b = col * nr;
    const double inner = x[b + face - 1];
    const double out = (face == nr) ? outer : x[b + face];
    sum += T * (inner - out);
  }
  return sum;
}

double FluxOperator::total_inner_current() const {
  double s = 0.0;
  for (double q : inner_current) s += q;
  return s;
}

double FluxOperator::asymmetry_norm() const {
  const SphericalGrid& g = *grid;
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi();
  double m = 0.0;
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        if (i + 1 < nr) m = std::max(m, std::abs(stencil.w_rp[c] - stencil.w_rm[g.index(i + 1, j, k)]));
        m = std::max(m, std::abs(stencil.w_pp[c] - stencil.w_pm[g.index(i, j, (k + 1) % np)]));
        if (j + 1 < nt) m = std::max(m, std::abs(stencil.w_tp[c] - stencil.w_tm[g.index(i, j + 1, k)]));
      }
  return m;
}

namespace {

// shell-averaged radial problem; exact for radial models, a starting guess otherwise
std::vector<double> radial_average_solve(const FluxOperator& op) {
  const SphericalGrid& g = *op.grid;
  const int nr = g.n_r();
  std::vector<double> T(nr + 1, 0.0);
  for (std::size_t col = 0; col < g.columns(); ++col)
    for (int f = 1; f <= nr; ++f) T[f] += op.radial_trans[col * (nr + 1) + f];
  // chain of conductances: flux Q through every face, v(n_r-1) = Q / T[n_r]
  const double Q = op.total_inner_current();
  std::vector<double> v(nr);
  v[nr - 1] = Q / T[nr];
  for (int i = nr - 2; i >= 0; --i) v[i] = v[i + 1] + Q / T[i + 1];
  return v;
}

struct PcgResult {
  int iterations;
  double residual;
};

template <class K>
PcgResult pcg(const FluxOperator& op, const kernels::LineFactors& lf, std::span<const double> b,
              std::span<double> x, double tol, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  K::apply(op.stencil, x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double bnorm = std::sqrt(K::dot(b, b));
  double rnorm = std::sqrt(K::dot(r, r));
  if (bnorm == 0.0) return {0, 0.0};
  if (rnorm <= tol * bnorm) return {0, rnorm / bnorm};
  K::line_solve(lf, r, z);
  p = z;
  double rz = K::dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    K::apply(op.stencil, p, q);
    const double alpha = rz / K::dot(p, q);
    K::axpy(alpha, p, x);
    K::axpy(-alpha, q, r);
    rnorm = std::sqrt(K::dot(r, r));
    if (rnorm <= tol * bnorm) return {it, rnorm / bnorm};
    K::line_solve(lf, r, z);
    const double rz_new = K::dot(r, z);
    K::xpby(z, rz_new / rz, p);
    rz = rz_new;
  }
  throw NoConvergence("PCG did not reach relative residual " + std::to_string(tol) + " in " +
                          std::to_string(max_iter) + " iterations",
                      rnorm / bnorm);
}

struct SerialK {
  static void apply(const kernels::Stencil7& s, std::span<const double> x, std::span<double> y) {
    kernels::serial::apply(s, x, y);
  }
  static double dot(std::span<const double> a, std::span<const double> b) { return kernels::serial::dot(a, b); }
  static void axpy(double a, std::span<const double> x, std::span<double> y) { kernels::serial::axpy(a, x, y); }
  static void xpby(std::span<const double> x, double b, std::span<double> y) { kernels::serial::xpby(x, b, y); }
  static void line_solve(const kernels::LineFactors& f, std::span<const double> r, std::span<double> z) {
    kernels::serial::line_solve(f, r, z);
  }
};

struct ParallelK {
  static void apply(const kernels::Stencil7& s, std::span<const double> x, std::span<double> y) {
    kernels::parallel::apply(s, x, y);
  }
  static double dot(std::span<const double> a, std::span<const double> b) { return kernels::parallel::dot(a, b); }
  static void axpy(double a, std::span<const double> x, std::span<double> y) { kernels::parallel::axpy(a, x, y); }
  static void xpby(std::span<const double> x, double b, std::span<double> y) { kernels::parallel::xpby(x, b, y); }
  static void line_solve(const kernels::LineFactors& f, std::span<const double> r, std::span<double> z) {
    kernels::parallel::line_solve(f, r, z);
  }
};

void fill_shell_fluxes(GreensSolution& s, const FluxOperator& op) {
  const int nr = s.grid->n_r();
  s.shell_flux.resize(nr);
  double sum = 0.0;
  for (int f = 1; f <= nr; ++f) {
    s.shell_flux[f - 1] = op.shell_flux(s.u, f, s.u_outer);
    if (f < nr) sum += s.shell_flux[f - 1];
  }
  s.flux_constant = sum / (nr - 1);
}

}  // namespace

GreensSolution solve_green(std::shared_ptr<const SphericalGrid> grid, const MetricModel& model,
                           const SolverOptions& opt) {
  const FluxOperator op = assemble_operator(grid, model);
  const SphericalGrid& g = *grid;
  const int nr = g.n_r();
  const std::size_t n = g.size();

  std::vector<double> b(n, 0.0);
  for (std::size_t col = 0; col < g.columns(); ++col) b[col * nr] = op.inner_current[col];

  const std::vector<double> v1 = radial_average_solve(op);
  std::vector<double> v(n);
  for (std::size_t col = 0; col < g.columns(); ++col)
    std::copy(v1.begin(), v1.end(), v.begin() + static_cast<std::ptrdiff_t>(col * nr));

  const kernels::LineFactors lf = kernels::factor_lines(op.stencil);
  const PcgResult res = opt.parallel ? pcg<ParallelK>(op, lf, b, v, opt.rel_tol, opt.max_iter)
                                     : pcg<SerialK>(op, lf, b, v, opt.rel_tol, opt.max_iter);

  GreensSolution s;
  s.grid = grid;
  s.model = model;
  s.u_outer = 1.0 / g.spec().r_max;
  s.scale = opt.normalize_flux ? op.total_inner_current() / (4.0 * std::numbers::pi) : 1.0;
  s.normalized = opt.normalize_flux;
  s.u.resize(n);
  // only the flux-carrying part is rescaled; the outer boundary value stays 1/r_max
  for (std::size_t c = 0; c < n; ++c) s.u[c] = v[c] / s.scale + s.u_outer;
  s.residual = res.residual;
  s.iterations = res.iterations;
  s.provenance = Provenance::GridSolve;
  fill_shell_fluxes(s, op);
  return s;
}

double radial_oracle_value(const MetricModel& model, double r) {
  if (!model.is_radial()) throw UnsupportedModel("radial oracle needs a radial model, got " + model.describe());
  if (std::holds_alternative<Euclidean>(model.kind())) return 1.0 / r;
  // s = r/x maps [r, inf) onto (0, 1]
  auto f = [&](double x) {
    if (x <= 0.0) return 1.0;
    const double ph = model.conformal_factor(Vec3(0.0, 0.0, r / x));
    return 1.0 / (ph * ph);
  };
  double err = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14, &err);
  return I / r;
}

GreensSolution radial_oracle(std::shared_ptr<const SphericalGrid> grid, const MetricModel& model) {
  if (!model.is_radial()) throw UnsupportedModel("radial oracle needs a radial model, got " + model.describe());
  const SphericalGrid& g = *grid;
  GreensSolution s;
  s.grid = grid;
  s.model = model;
  s.provenance = Provenance::RadialOracle;
  s.u_outer = radial_oracle_value(model, g.spec().r_max);
  std::vector<double> prof(g.n_r());
  for (int i = 0; i < g.n_r(); ++i) prof[i] = radial_oracle_value(model, g.r_centers()[i]);
  s.u.resize(g.size());
  for (std::size_t col = 0; col < g.columns(); ++col)
    std::copy(prof.begin(), prof.end(), s.u.begin() + static_cast<std::ptrdiff_t>(col * g.n_r()));
  // analytic flux r^2 phi^2 |u'| 4pi = 4pi on every sphere
  s.flux_constant = 4.0 * std::numbers::pi;
  s.shell_flux.assign(g.n_r(), s.flux_constant);
  return s;
}

double oracle_error(const GreensSolution& s, double r_lo, double r_hi) {
  const SphericalGrid& g = *s.grid;
  double e = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    const double r = g.r_centers()[i];
    if (r < r_lo || r > r_hi) continue;
    const double ref = radial_oracle_value(s.model, r);
    for (int j = 0; j < g.n_theta(); ++j)
      for (int k = 0; k < g.n_phi(); ++k) e = std::max(e, std::abs(s.at(i, j, k) - ref) / ref);
  }
  return e;
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace

HypothesisReport hypothesis_checks(const GreensSolution& s) {
  const SphericalGrid& g = *s.grid;
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi();
  HypothesisReport rep;
  rep.ellipticity = s.model.ellipticity(g.spec().r_min);
  rep.c_lower = std::numeric_limits<double>::infinity();
  rep.c_upper = 0.0;
  std::vector<double> shell_avg(nr, 0.0);
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < nr; ++i) {
        const double v = s.at(i, j, k);
        if (!(v > 0.0)) rep.positive = false;
        const double ur = v * g.r_centers()[i];
        rep.c_lower = std::min(rep.c_lower, ur);
        rep.c_upper = std::max(rep.c_upper, ur);
        shell_avg[i] += v * g.solid_angle(j);
      }
  for (int i = 1; i < nr; ++i)
    if (!(shell_avg[i] < shell_avg[i - 1])) rep.monotone_shell_average = false;

  const SphericalGradient gr = spherical_gradient(g, s.u);
  std::vector<double> g2(g.size()), xabs(g.size());
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        const double gt = gr.d_theta[c] / r, gp = gr.d_phi[c] / r;
        g2[c] = gr.d_r[c] * gr.d_r[c] + gt * gt + gp * gp;
        const double a = s.model.conductivity_scalar(g.centre(i, j, k));
        xabs[c] = (r >= 1.0 / 16.0) ? std::abs(1.0 - a) * std::sqrt(g2[c]) : 0.0;
      }

  const auto& rf = g.r_faces();
  std::vector<int> exps;
  for (int e = -20; e <= 40; ++e) {
    const double R = std::ldexp(1.0, e);
    if (R / 8.0 >= rf.front() * (1 - 1e-12) && 8.0 * R <= rf.back() * (1 + 1e-12)) exps.push_back(e);
  }
  if (exps.size() < 6) throw PreconditionError("hypothesis checks need at least 6 dyadic annuli inside the grid");
  std::vector<double> Rs, En, RsX, Lx;
  for (int e : exps) {
    AnnulusDiagnostic d;
    d.R = std::ldexp(1.0, e);
    const double lo = d.R / 8.0, hi = 8.0 * d.R;
    double en = 0.0, lx = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double a = std::max(rf[i], lo), b = std::min(rf[i + 1], hi);
      if (!(b > a)) continue;
      // exact volume fraction of the shell inside the annulus
      const double frac = (b * b * b - a * a * a) / (rf[i + 1] * rf[i + 1] * rf[i + 1] - rf[i] * rf[i] * rf[i]);
      for (int j = 0; j < nt; ++j) {
        const double vol = g.volume(i, j) * frac;
        for (int k = 0; k < np; ++k) {
          const std::size_t c = g.index(i, j, k);
          en += g2[c] * vol;
          lx += xabs[c] * vol;
        }
      }
    }
    d.energy_product = d.R * en;
    d.l1_x = lx;
    rep.annuli.push_back(d);
    Rs.push_back(d.R);
    En.push_back(d.energy_product);
    if (d.R >= 16.0 && lx > 0.0) {
      RsX.push_back(d.R);
      Lx.push_back(lx);
    }
  }
  rep.energy_exponent = slope(Rs, En);
  rep.l1_x_exponent = RsX.size() >= 2 ? slope(RsX, Lx) : 0.0;
  return rep;
}

}  // namespace greenmass
