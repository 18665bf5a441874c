#include "greenmass/levelset_geometry.hpp"

#include "greenmass/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace greenmass {

namespace {

double kernel_base(double z) {
  const double q = 1.0 - z * z;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// (c0 + c1 z^2 + c2 z^4) b(z) with unit mass and zero second and fourth moments
struct KernelCoefficients {
  double c[3];
  KernelCoefficients() {
    double m[5];
    boost::math::quadrature::tanh_sinh<double> ts;
    for (int p = 0; p < 5; ++p) m[p] = ts.integrate([p](double z) { return std::pow(z, 2 * p) * kernel_base(z); }, -1.0, 1.0);
    Eigen::Matrix3d M;
    M << m[0], m[1], m[2], m[1], m[2], m[3], m[2], m[3], m[4];
    const Eigen::Vector3d x = M.fullPivLu().solve(Eigen::Vector3d(1.0, 0.0, 0.0));
    for (int i = 0; i < 3; ++i) c[i] = x[i];
  }
};

const KernelCoefficients& kernel_coefficients() {
  static const KernelCoefficients k;
  return k;
}

}  // namespace

double smear_kernel(double z) {
  if (!(std::abs(z) < 1.0)) return 0.0;
  const auto& k = kernel_coefficients();
  const double z2 = z * z;
  return (k.c[0] + z2 * (k.c[1] + z2 * k.c[2])) * kernel_base(z);
}

LevelSetGeometry::LevelSetGeometry(const GreensSolution& s, SmearOptions opt) : sol_(&s), opt_(opt) {
  if (opt_.substeps < 1) throw ValidationError("substeps must be >= 1");
  if (!(opt_.cells > 0.0)) throw ValidationError("smear width in cells must be positive");
  const SphericalGrid& g = grid();
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi(), ns = opt_.substeps;
  grad_ = spherical_gradient(g, s.u);
  const std::vector<double> H = euclidean_mean_curvature(g, s.u, grad_, opt_.gradient_floor);
  rH_.resize(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) rH_[c] = g.r_centers()[c % nr] * H[c];

  shell_lo_.assign(nr, std::numeric_limits<double>::infinity());
  shell_hi_.assign(nr, -std::numeric_limits<double>::infinity());
  std::vector<double> lo(nr, std::numeric_limits<double>::infinity()), hi(nr, -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < g.size(); ++c) {
    const int i = static_cast<int>(c % nr);
    lo[i] = std::min(lo[i], s.u[c]);
    hi[i] = std::max(hi[i], s.u[c]);
  }
  for (int i = 0; i < nr; ++i)
    for (int d = -1; d <= 1; ++d) {
      const int m = std::clamp(i + d, 0, nr - 1);
      shell_lo_[i] = std::min(shell_lo_[i], lo[m]);
      shell_hi_[i] = std::max(shell_hi_[i], hi[m]);
    }

  sub_r_.resize(nr * ns);
  sub_w_.resize(nr * ns);
  sub_i0_.resize(nr * ns);
  sub_wv_.resize(nr * ns);
  sub_wd_.resize(nr * ns);
  const double r0 = g.spec().r_min;
  for (int i = 0; i < nr; ++i) {
    const ZetaStencil st = zeta_stencil(g, i);
    for (int q = 0; q < ns; ++q) {
      const int idx = i * ns + q;
      const double ra = r0 * std::exp(g.dxi() * (i + static_cast<double>(q) / ns));
      const double rb = r0 * std::exp(g.dxi() * (i + static_cast<double>(q + 1) / ns));
      sub_r_[idx] = SphericalGrid::volume_centre(ra, rb);
      sub_w_[idx] = (rb * rb * rb - ra * ra * ra) / 3.0;
      sub_i0_[idx] = st.i0;
      zeta_weights(st, 1.0 / sub_r_[idx], sub_wv_[idx].data(), sub_wd_[idx].data());
    }
  }
  col_er_.resize(g.columns());
  col_et_.resize(g.columns());
  col_ep_.resize(g.columns());
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k) {
      const double th = g.theta_centers()[j], ph = g.phi_centers()[k];
      const std::size_t col = g.column(j, k);
      col_er_[col] = g.unit(j, k);
      col_et_[col] = Vec3(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
      col_ep_[col] = Vec3(-std::sin(ph), std::cos(ph), 0.0);
    }
}

SamplePoint LevelSetGeometry::sample(int i, int j, int k, int s) const {
  const SphericalGrid& g = grid();
  const int idx = i * opt_.substeps + s;
  const std::size_t col = g.column(j, k);
  const std::size_t b = col * g.n_r() + sub_i0_[idx];
  const auto& wv = sub_wv_[idx];
  const auto& wd = sub_wd_[idx];
  const std::vector<double>& u = sol_->u;
  SamplePoint p;
  p.i = i;
  p.j = j;
  p.k = k;
  p.sub = s;
  p.r = sub_r_[idx];
  p.weight = sub_w_[idx] * g.solid_angle(j);
  double dz = 0.0, dt = 0.0, dp = 0.0, rh = 0.0;
  dz = wd[0] * (u[b] - u[b + 1]) + wd[2] * (u[b + 2] - u[b + 1]);
  for (int m = 0; m < 3; ++m) {
    p.u += wv[m] * u[b + m];
    dt += wv[m] * grad_.d_theta[b + m];
    dp += wv[m] * grad_.d_phi[b + m];
    rh += wv[m] * rH_[b + m];
  }
  const double zeta = 1.0 / p.r;
  const double d_r = -zeta * zeta * dz;
  p.grad = d_r * col_er_[col] + (dt * zeta) * col_et_[col] + (dp * zeta) * col_ep_[col];
  p.grad_norm = p.grad.norm();
  p.H_euc = rh * zeta;
  p.x = p.r * col_er_[col];
  const MetricModel& model = sol_->model;
  p.phi = model.conformal_factor(p.x);
  p.grad_phi = model.conformal_gradient(p.x);
  const double f2 = p.phi * p.phi;
  p.grad_g = p.grad_norm / f2;
  p.dv_g = p.weight * f2 * f2 * f2;
  p.masked = !std::isfinite(rh) || !(p.grad_norm > 0.0) || !(p.u > 0.0);
  if (!p.masked) {
    const Vec3 nu = -p.grad / p.grad_norm;
    p.H_g = (p.H_euc + 4.0 * nu.dot(p.grad_phi) / p.phi) / f2;
  }
  return p;
}

double LevelSetGeometry::interpolate(const std::vector<double>& field, const SamplePoint& p) const {
  const int idx = p.i * opt_.substeps + p.sub;
  const std::size_t b = grid().column(p.j, p.k) * grid().n_r() + sub_i0_[idx];
  double v = 0.0;
  for (int m = 0; m < 3; ++m) v += sub_wv_[idx][m] * field[b + m];
  return v;
}

GradientField LevelSetGeometry::gradient_field() const {
  const SphericalGrid& g = grid();
  GradientField out;
  out.grad_g.resize(g.size());
  out.norm_g.resize(g.size());
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const std::size_t col = g.column(j, k);
      for (int i = 0; i < g.n_r(); ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        const Vec3 ge = grad_.d_r[c] * col_er_[col] + (grad_.d_theta[c] / r) * col_et_[col] +
                        (grad_.d_phi[c] / r) * col_ep_[col];
        const Mat3 ginv = sol_->model.metric_inverse(g.centre(i, j, k));
        out.grad_g[c] = ginv * ge;
        out.norm_g[c] = std::sqrt(ge.dot(ginv * ge));
      }
    }
  return out;
}

std::vector<double> LevelSetGeometry::mean_curvature_field() const {
  const SphericalGrid& g = grid();
  std::vector<double> H(g.size());
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const std::size_t col = g.column(j, k);
      for (int i = 0; i < g.n_r(); ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        const Vec3 ge = grad_.d_r[c] * col_er_[col] + (grad_.d_theta[c] / r) * col_et_[col] +
                        (grad_.d_phi[c] / r) * col_ep_[col];
        const Vec3 x = g.centre(i, j, k);
        const double ph = sol_->model.conformal_factor(x);
        const double hd = rH_[c] / r;
        if (!std::isfinite(hd)) {
          H[c] = hd;
          continue;
        }
        const Vec3 nu = -ge.normalized();
        H[c] = (hd + 4.0 * nu.dot(sol_->model.conformal_gradient(x)) / ph) / (ph * ph);
      }
    }
  return H;
}

std::pair<int, int> LevelSetGeometry::shell_range(double u_lo, double u_hi) const {
  const int nr = grid().n_r();
  int a = nr, b = -1;
  for (int i = 0; i < nr; ++i)
    if (shell_hi_[i] >= u_lo && shell_lo_[i] <= u_hi) {
      a = std::min(a, i);
      b = std::max(b, i);
    }
  if (b < 0) throw ShellUnresolved("level window outside the solution range");
  if (a == 0 || b == nr - 1) throw ShellUnresolved("level window touches the grid boundary");
  return {a, b};
}

double LevelSetGeometry::log_halfwidth(double t, std::optional<double> eps) const {
  const double w = eps ? std::asinh(*eps * t / 2.0) : default_log_halfwidth();
  if (!(w > 0.0)) throw ShellUnresolved("smear width must be positive");
  if (2.0 * w / grid().dxi() < 3.0 - 1e-9) throw ShellUnresolved("fewer than 3 cells across the smear shell");
  return w;
}

double LevelSetGeometry::default_smear_width(double t) const {
  const double w = default_log_halfwidth();
  return (std::exp(w) - std::exp(-w)) / t;
}

SurfaceIntegralReport LevelSetGeometry::surface_integrals(double t, std::optional<double> eps) const {
  if (!(t > 0.0)) throw ValidationError("level t must be positive");
  const double w = log_halfwidth(t, eps);
  const double lam0 = std::log(t);
  const auto [a, b] = shell_range(std::exp(-w) / t, std::exp(w) / t);
  const auto acc = reduce<7>(a, b, [&](const SamplePoint& p, std::array<double, 7>& s) {
    if (p.masked) {
      s[6] += 1.0;
      return;
    }
    const double z = (-std::log(p.u) - lam0) / w;
    if (!(std::abs(z) < 1.0)) return;
    const double cw = smear_kernel(z) / w * p.grad_g / p.u * p.dv_g;
    const double tl = 1.0 / p.u;
    s[0] += cw;
    s[1] += cw * p.H_g * p.grad_g;
    s[2] += cw * p.grad_g * p.grad_g;
    s[3] += cw * p.grad_g;
    s[4] += cw * p.grad_g * p.grad_g * tl;
    s[5] += cw * p.grad_g * (tl - tl * tl * p.H_g + tl * tl * tl * p.grad_g);
  });
  if (acc[6] > 0.0) throw DegenerateGradient("gradient below the floor inside the level window");
  SurfaceIntegralReport r;
  r.t = t;
  r.area = acc[0];
  r.int_H_gradu = acc[1];
  r.int_gradu_sq = acc[2];
  r.int_gradu = acc[3];
  r.int_gradu_sq_over_u = acc[4];
  r.f_density = acc[5];
  r.smear_width = (std::exp(w) - std::exp(-w)) / t;
  r.single_shell = single_shell(t);
  return r;
}

double LevelSetGeometry::smeared_surface_integral(const std::function<double(const SamplePoint&)>& Q, double t,
                                                  std::optional<double> eps) const {
  if (!(t > 0.0)) throw ValidationError("level t must be positive");
  const double w = log_halfwidth(t, eps);
  const double lam0 = std::log(t);
  const auto [a, b] = shell_range(std::exp(-w) / t, std::exp(w) / t);
  const auto acc = reduce<2>(a, b, [&](const SamplePoint& p, std::array<double, 2>& s) {
    if (p.masked) {
      s[1] += 1.0;
      return;
    }
    const double z = (-std::log(p.u) - lam0) / w;
    if (!(std::abs(z) < 1.0)) return;
    s[0] += smear_kernel(z) / w * p.grad_g / p.u * p.dv_g * Q(p);
  });
  if (acc[1] > 0.0) throw DegenerateGradient("gradient below the floor inside the level window");
  return acc[0];
}

bool LevelSetGeometry::single_shell(double t) const {
  const SphericalGrid& g = grid();
  const double u0 = 1.0 / t;
  for (std::size_t col = 0; col < g.columns(); ++col) {
    int crossings = 0;
    const double* u = &sol_->u[col * g.n_r()];
    for (int i = 0; i + 1 < g.n_r(); ++i)
      if ((u[i] - u0) * (u[i + 1] - u0) <= 0.0 && u[i] != u[i + 1]) ++crossings;
    if (crossings != 1) return false;
  }
  return true;
}

void LevelSetGeometry::build_weingarten() const {
  if (weingarten_ready_) return;
  const SphericalGrid& g = grid();
  const std::size_t n = g.size();
  const int nr = g.n_r();
  std::vector<double> ncomp[3], logg(n);
  for (auto& v : ncomp) v.resize(n);
  std::vector<Vec3> nvec(n);
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const std::size_t col = g.column(j, k);
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        const Vec3 ge = grad_.d_r[c] * col_er_[col] + (grad_.d_theta[c] / r) * col_et_[col] +
                        (grad_.d_phi[c] / r) * col_ep_[col];
        const double gn = ge.norm();
        nvec[c] = gn > 0.0 ? Vec3(ge / gn) : Vec3::Zero();
        for (int a = 0; a < 3; ++a) ncomp[a][c] = nvec[c][a];
        logg[c] = std::log(gn) - 2.0 * std::log(sol_->model.conformal_factor(g.centre(i, j, k)));
      }
    }
  auto cartesian = [&](const SphericalGradient& sg, std::size_t c, std::size_t col, double r) {
    return Vec3(sg.d_r[c] * col_er_[col] + (sg.d_theta[c] / r) * col_et_[col] + (sg.d_phi[c] / r) * col_ep_[col]);
  };
  SphericalGradient gn[3] = {spherical_gradient(g, ncomp[0]), spherical_gradient(g, ncomp[1]),
                             spherical_gradient(g, ncomp[2])};
  const SphericalGradient gl = spherical_gradient(g, logg);
  a_ring_sq_.assign(n, 0.0);
  grad_log_sq_.assign(n, 0.0);
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const std::size_t col = g.column(j, k);
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        Mat3 M;
        for (int a = 0; a < 3; ++a) M.row(a) = cartesian(gn[a], c, col, r).transpose();
        const Mat3 P = Mat3::Identity() - nvec[c] * nvec[c].transpose();
        Mat3 S = P * M * P;
        S = 0.5 * (S + S.transpose()).eval();
        const double tr = S.trace();
        const double f = sol_->model.conformal_factor(g.centre(i, j, k));
        const double f4 = f * f * f * f;
        a_ring_sq_[c] = std::max(0.0, S.squaredNorm() - 0.5 * tr * tr) / f4;
        const Vec3 gll = cartesian(gl, c, col, r);
        grad_log_sq_[c] = (P * gll).squaredNorm() / f4;
      }
    }
  weingarten_ready_ = true;
}

CurvatureTermsReport LevelSetGeometry::curvature_terms(double t) const {
  CurvatureTermsReport rep;
  rep.t = t;
  const MetricModel& model = sol_->model;
  rep.closed_form = model.is_radial();
  // level sets are connected spheres (single_shell), so Gauss-Bonnet gives 8 pi
  rep.int_RSigma = 8.0 * std::numbers::pi;
  rep.int_sphere_defect = smeared_surface_integral(
      [](const SamplePoint& p) {
        const double d = 2.0 * p.grad_g / p.u - p.H_g;
        return d * d;
      },
      t);
  rep.int_R = smeared_surface_integral([&](const SamplePoint& p) { return model.scalar_curvature(p.x); }, t);
  if (rep.closed_form) {
    rep.int_grad_log = 0.0;
    rep.int_A_ring = 0.0;
  } else {
    build_weingarten();
    rep.int_A_ring = smeared_surface_integral([&](const SamplePoint& p) { return interpolate(a_ring_sq_, p); }, t);
    rep.int_grad_log = smeared_surface_integral([&](const SamplePoint& p) { return interpolate(grad_log_sq_, p); }, t);
  }
  rep.dF_dt = 4.0 * std::numbers::pi - 0.5 * rep.int_RSigma + rep.int_grad_log + 0.5 * rep.int_R +
              0.5 * rep.int_A_ring + 0.75 * rep.int_sphere_defect;
  return rep;
}

}  // namespace greenmass
