#include "greenmass/asymptotic_expansion.hpp"

#include "greenmass/errors.hpp"
#include "greenmass/field_derivatives.hpp"
#include "greenmass/quadrature.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace greenmass {

namespace {

constexpr double kPi = std::numbers::pi;

void check_rescale_range(const GridSpec& g, double R, double r_out) {
  if (!(R >= 8.0 * g.r_min) || !(r_out * R <= 0.5 * g.r_max))
    throw OutOfRange("annulus at R = " + std::to_string(R) + " leaves the grid");
}

// Cartesian gradient of u at cell centres, one component per field
std::array<std::vector<double>, 3> cartesian_gradient(const SphericalGrid& g, std::span<const double> u) {
  const SphericalGradient sg = spherical_gradient(g, u);
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.resize(g.size());
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const double th = g.theta_centers()[j], ph = g.phi_centers()[k];
      const Vec3 er = g.unit(j, k);
      const Vec3 et(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
      const Vec3 ep(-std::sin(ph), std::cos(ph), 0.0);
      for (int i = 0; i < g.n_r(); ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        const Vec3 v = sg.d_r[c] * er + (sg.d_theta[c] / r) * et + (sg.d_phi[c] / r) * ep;
        for (int a = 0; a < 3; ++a) out[a][c] = v[a];
      }
    }
  return out;
}

}  // namespace

AnnulusLattice annulus_lattice(int n_r, int n_cos, int n_phi, double r_in, double r_out) {
  if (n_r < 1 || n_cos < 1 || n_phi < 1 || !(r_out > r_in) || !(r_in > 0.0)) throw InvalidSpec("annulus lattice");
  AnnulusLattice lat;
  const auto xi = gauss_legendre(n_r, std::log(r_in), std::log(r_out));
  const auto cs = gauss_legendre(n_cos, -1.0, 1.0);
  const double dphi = 2.0 * kPi / n_phi;
  for (const auto& [x, wx] : xi) {
    const double r = std::exp(x);
    for (const auto& [c, wc] : cs) {
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int k = 0; k < n_phi; ++k) {
        const double ph = (k + 0.5) * dphi;
        lat.y.emplace_back(r * s * std::cos(ph), r * s * std::sin(ph), r * c);
        lat.w.push_back(wx * r * r * r * wc * dphi);
      }
    }
  }
  lat.volume = 4.0 * kPi / 3.0 * (r_out * r_out * r_out - r_in * r_in * r_in);
  return lat;
}

const AnnulusLattice& fit_lattice() {
  static const AnnulusLattice lat = annulus_lattice(24, 12, 24);
  return lat;
}

const AnnulusLattice& potential_lattice() {
  static const AnnulusLattice lat = annulus_lattice(12, 6, 12);
  return lat;
}

InterpStencil interp_stencil(const SphericalGrid& g, const Vec3& x) {
  const double r = x.norm();
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi();
  const double fi = std::log(r / g.spec().r_min) / g.dxi() - 0.5;
  const int i = std::clamp(static_cast<int>(std::lround(fi)), 1, nr - 2);
  const ZetaStencil zs = zeta_stencil(g, i);
  double wv[3], wd[3];
  zeta_weights(zs, 1.0 / r, wv, wd);

  const double th = std::acos(std::clamp(x.z() / r, -1.0, 1.0));
  double ph = std::atan2(x.y(), x.x());
  if (ph < 0.0) ph += 2.0 * kPi;
  const double fj = th / g.dtheta() - 0.5;
  const int j0 = static_cast<int>(std::floor(fj));
  const double tj = fj - j0;
  const double fk = ph / g.dphi() - 0.5;
  const int k0 = static_cast<int>(std::floor(fk));
  const double tk = fk - k0;

  InterpStencil s;
  int n = 0;
  for (int dj = 0; dj < 2; ++dj)
    for (int dk = 0; dk < 2; ++dk) {
      int j = j0 + dj;
      int k = ((k0 + dk) % np + np) % np;
      if (j < 0) {
        j = 0;
        k = g.mirror_phi(k);
      } else if (j >= nt) {
        j = nt - 1;
        k = g.mirror_phi(k);
      }
      const double wa = (dj ? tj : 1.0 - tj) * (dk ? tk : 1.0 - tk);
      for (int m = 0; m < 3; ++m) {
        s.idx[n] = g.index(zs.i0 + m, j, k);
        s.w[n] = wa * wv[m];
        ++n;
      }
    }
  return s;
}

double interpolate(const InterpStencil& s, std::span<const double> f) {
  double v = 0.0;
  for (int n = 0; n < 12; ++n) v += s.w[n] * f[s.idx[n]];
  return v;
}

AnnulusSamples rescale_to_annulus(const GreensSolution& s, double R, const AnnulusLattice& lat) {
  check_rescale_range(s.spec(), R, 4.0);
  const SphericalGrid& g = *s.grid;
  const auto gc = cartesian_gradient(g, s.u);
  AnnulusSamples out;
  out.R = R;
  out.lattice = &lat;
  out.u.resize(lat.y.size());
  out.grad.resize(lat.y.size());
  for (std::size_t p = 0; p < lat.y.size(); ++p) {
    const InterpStencil st = interp_stencil(g, R * lat.y[p]);
    out.u[p] = R * interpolate(st, s.u);
    for (int a = 0; a < 3; ++a) out.grad[p][a] = R * R * interpolate(st, gc[a]);
  }
  return out;
}

namespace {

struct LsFit {
  Eigen::VectorXd coef;
  double condition = 0.0;
};

LsFit least_squares(const AnnulusLattice& lat, std::span<const double> v) {
  const Eigen::Index n = static_cast<Eigen::Index>(lat.y.size());
  Eigen::MatrixXd A(n, 5);
  Eigen::VectorXd b(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const Vec3& y = lat.y[p];
    const double r = y.norm(), sw = std::sqrt(lat.w[p]);
    A(p, 0) = sw / r;
    A(p, 1) = sw / (r * r);
    for (int a = 0; a < 3; ++a) A(p, 2 + a) = sw * y[a] / (r * r * r);
    b[p] = sw * v[p];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  LsFit f;
  f.condition = sv[0] / sv[sv.size() - 1];
  if (!(f.condition <= 1e6)) throw IllConditionedFit("annulus design matrix condition " + std::to_string(f.condition));
  f.coef = svd.solve(b);
  return f;
}

double model_value(const Eigen::VectorXd& c, const Vec3& y) {
  const double r = y.norm();
  return c[0] / r + c[1] / (r * r) + (c[2] * y[0] + c[3] * y[1] + c[4] * y[2]) / (r * r * r);
}

Vec3 model_gradient(const Eigen::VectorXd& c, const Vec3& y) {
  const double r = y.norm(), r3 = r * r * r, r5 = r3 * r * r;
  const Vec3 d(c[2], c[3], c[4]);
  return -c[0] * y / r3 - 2.0 * c[1] * y / (r3 * r) + d / r3 - 3.0 * d.dot(y) * y / r5;
}

AnnulusReport report_from(const LsFit& f, const AnnulusLattice& lat, std::span<const double> v, double R) {
  AnnulusReport rep;
  rep.R = R;
  rep.c = f.coef[0];
  rep.radial2 = R * f.coef[1];
  rep.d = R * Vec3(f.coef[2], f.coef[3], f.coef[4]);
  rep.condition = f.condition;
  double s1 = 0.0, s125 = 0.0;
  for (std::size_t p = 0; p < lat.y.size(); ++p) {
    const double e = std::abs(v[p] - model_value(f.coef, lat.y[p]));
    s1 += lat.w[p] * e;
    s125 += lat.w[p] * std::pow(e, 1.25);
  }
  rep.residual_l1 = s1 / lat.volume;
  rep.residual_l125 = std::pow(s125 / lat.volume, 1.0 / 1.25);
  return rep;
}

}  // namespace

AnnulusReport fit_values(const AnnulusLattice& lat, std::span<const double> v, double R) {
  return report_from(least_squares(lat, v), lat, v, R);
}

AnnulusReport fit_annulus(const AnnulusSamples& s, double p) {
  if (!(p > 3.0)) throw PreconditionError("gradient norm exponent must exceed 3");
  const AnnulusLattice& lat = *s.lattice;
  const LsFit f = least_squares(lat, s.u);
  AnnulusReport rep = report_from(f, lat, s.u, s.R);
  double sp = 0.0, gp = 0.0;
  for (std::size_t n = 0; n < lat.y.size(); ++n) {
    const double e = s.u[n] - model_value(f.coef, lat.y[n]);
    const double ge = (s.grad[n] - model_gradient(f.coef, lat.y[n])).norm();
    sp += lat.w[n] * std::pow(std::abs(e), p);
    gp += lat.w[n] * std::pow(ge, p);
  }
  rep.residual_wp = std::pow((sp + gp) / lat.volume, 1.0 / p);
  return rep;
}

int count_inversions(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] >= v[i] && v[i + 1] > 0.0) ++n;
  return n;
}

ExpansionFit fit_expansion(const GreensSolution& s, const std::vector<double>& R_list, double p) {
  if (R_list.size() < 4) throw PreconditionError("fit_expansion needs at least 4 values of R");
  ExpansionFit out;
  std::vector<double> res;
  for (double R : R_list) {
    out.series.push_back(fit_annulus(rescale_to_annulus(s, R), p));
    res.push_back(out.series.back().residual_l1);
  }
  const auto last = std::max_element(out.series.begin(), out.series.end(),
                                     [](const AnnulusReport& a, const AnnulusReport& b) { return a.R < b.R; });
  out.c = last->c;
  out.d = last->d;
  out.residual_decreasing = count_inversions(res) <= 1;
  return out;
}

std::vector<kernels::PotentialSample> PotentialField::evaluate(std::span<const Vec3> x) const {
  std::vector<kernels::PotentialSample> out(x.size());
  if (parallel)
    kernels::parallel::potential(sources, x, out);
  else
    kernels::serial::potential(sources, x, out);
  return out;
}

std::vector<Vec3> x_field(const GreensSolution& s, double cutoff) {
  const SphericalGrid& g = *s.grid;
  const auto gc = cartesian_gradient(g, s.u);
  std::vector<Vec3> X(g.size(), Vec3::Zero());
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k)
      for (int i = 0; i < g.n_r(); ++i) {
        if (g.r_centers()[i] < cutoff) continue;
        const std::size_t c = g.index(i, j, k);
        const double b = 1.0 - s.model.conductivity_scalar(g.centre(i, j, k));
        X[c] = b * Vec3(gc[0][c], gc[1][c], gc[2][c]);
      }
  return X;
}

PotentialField newtonian_potential(const SphericalGrid& g, std::span<const Vec3> X) {
  if (X.size() != g.size()) throw InvalidSpec("X field size does not match the grid");
  PotentialField pf;
  auto& src = pf.sources;
  const auto& rf = g.r_faces();
  const auto& tf = g.theta_faces();
  Vec3 total = Vec3::Zero();
  src.fine_begin.push_back(0);
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k)
      for (int i = 0; i < g.n_r(); ++i) {
        const std::size_t c = g.index(i, j, k);
        const Vec3& x = X[c];
        if (x.squaredNorm() == 0.0) continue;
        const double vol = g.volume(i, j);
        const double r = g.r_centers()[i];
        src.pos.push_back(g.centre(i, j, k));
        src.moment.push_back(x * vol);
        src.moment_norm.push_back(x.norm() * vol);
        const double edge = std::max({rf[i + 1] - rf[i], r * g.dtheta(), r * std::sin(g.theta_centers()[j]) * g.dphi()});
        src.reach.push_back(2.5 * edge);
        total += x * vol;
        pf.x_l1 += x.norm() * vol;
        // 2 x 2 x 2 split for targets nearby
        const double rm = std::sqrt(rf[i] * rf[i + 1]);
        const double radii[3] = {rf[i], rm, rf[i + 1]};
        const double thm = 0.5 * (tf[j] + tf[j + 1]);
        const double ths[3] = {tf[j], thm, tf[j + 1]};
        const double ph0 = g.phi_centers()[k] - 0.5 * g.dphi();
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int q = 0; q < 2; ++q) {
              const double ra = radii[a], rb = radii[a + 1];
              const double sv = (rb * rb * rb - ra * ra * ra) / 3.0 * (std::cos(ths[b]) - std::cos(ths[b + 1])) *
                                0.5 * g.dphi();
              const double rc = SphericalGrid::volume_centre(ra, rb);
              const double tc = 0.5 * (ths[b] + ths[b + 1]);
              const double pc = ph0 + (q + 0.5) * 0.5 * g.dphi();
              src.fine_pos.emplace_back(rc * std::sin(tc) * std::cos(pc), rc * std::sin(tc) * std::sin(pc),
                                        rc * std::cos(tc));
              src.fine_moment.push_back(x * sv);
              src.fine_moment_norm.push_back(x.norm() * sv);
            }
        src.fine_begin.push_back(src.fine_pos.size());
      }
  pf.xbar = total / (4.0 * kPi);
  return pf;
}

PotentialField newtonian_potential(const GreensSolution& s, double cutoff) {
  const std::vector<Vec3> X = x_field(s, cutoff);
  return newtonian_potential(*s.grid, X);
}

AnnulusErrorReport annulus_error(const PotentialField& pot, const std::vector<double>& R_list, double q) {
  if (!(q >= 1.0 && q < 1.5)) throw PreconditionError("annulus_error needs 1 <= q < 3/2");
  AnnulusErrorReport rep;
  rep.q = q;
  for (double R : R_list) {
    if (!(R > 0.0)) throw PreconditionError("annulus_error needs R > 0");
    const AnnulusLattice lat = annulus_lattice(16, 6, 12, R / 8.0, 8.0 * R);
    const auto w = pot.evaluate(lat.y);
    double sum = 0.0;
    for (std::size_t p = 0; p < lat.y.size(); ++p) {
      const Vec3& x = lat.y[p];
      const double r = x.norm();
      const double e = R * R * (w[p].w - x.dot(pot.xbar) / (r * r * r));
      sum += lat.w[p] * std::pow(std::abs(e), q);
    }
    rep.R.push_back(R);
    rep.value.push_back(std::pow(sum / lat.volume, 1.0 / q));
  }
  rep.inversions = count_inversions(rep.value);
  rep.decreasing = rep.inversions <= 1;
  return rep;
}

HarmonicRemainderReport harmonic_remainder(const GreensSolution& s, const PotentialField& pot,
                                           const std::vector<double>& R_list, const AnnulusLattice& lat) {
  HarmonicRemainderReport rep;
  rep.xbar = pot.xbar;
  const SphericalGrid& g = *s.grid;
  const std::size_t n = lat.y.size();
  for (double R : R_list) {
    check_rescale_range(s.spec(), R, 4.0);
    std::vector<Vec3> x(n);
    for (std::size_t p = 0; p < n; ++p) x[p] = R * lat.y[p];
    const auto w = pot.evaluate(x);
    std::vector<double> uR(n), wR(n), hR(n);
    for (std::size_t p = 0; p < n; ++p) {
      uR[p] = R * interpolate(interp_stencil(g, x[p]), s.u);
      wR[p] = R * w[p].w;
      hR[p] = uR[p] - wR[p];
    }
    const AnnulusReport fu = fit_values(lat, uR, R);
    const AnnulusReport fh = fit_values(lat, hR, R);
    const AnnulusReport fw = fit_values(lat, wR, R);
    RemainderPoint pt;
    pt.R = R;
    pt.c = fh.c;
    pt.b = fh.d;
    pt.d = fu.d;
    pt.w_dipole = fw.d;
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) acc += lat.w[p] * std::abs(hR[p] - fh.c / lat.y[p].norm()) / R;
    pt.mean_abs = acc / lat.volume;
    pt.closure = (pt.d - (pt.b + rep.xbar)).norm();
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace greenmass
