#include "greenmass/field_derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace greenmass {

ZetaStencil zeta_stencil(const SphericalGrid& g, int i) {
  ZetaStencil s;
  s.i0 = std::clamp(i - 1, 0, g.n_r() - 3);
  for (int m = 0; m < 3; ++m) s.z[m] = 1.0 / g.r_centers()[s.i0 + m];
  return s;
}

void zeta_weights(const ZetaStencil& s, double zeta, double wv[3], double wd[3]) {
  for (int m = 0; m < 3; ++m) {
    const int a = (m + 1) % 3, b = (m + 2) % 3;
    const double den = (s.z[m] - s.z[a]) * (s.z[m] - s.z[b]);
    wv[m] = (zeta - s.z[a]) * (zeta - s.z[b]) / den;
    wd[m] = ((zeta - s.z[a]) + (zeta - s.z[b])) / den;
  }
}

SphericalGradient spherical_gradient(const SphericalGrid& g, std::span<const double> f) {
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi();
  SphericalGradient out;
  out.d_r.resize(g.size());
  out.d_theta.resize(g.size());
  out.d_phi.resize(g.size());
  std::vector<ZetaStencil> st(nr);
  std::vector<double> wd(3 * nr);
  for (int i = 0; i < nr; ++i) {
    st[i] = zeta_stencil(g, i);
    double wv[3];
    const double z = 1.0 / g.r_centers()[i];
    zeta_weights(st[i], z, wv, &wd[3 * i]);
  }
  const double two_dth = 2.0 * g.dtheta(), two_dph = 2.0 * g.dphi();
#pragma omp parallel for schedule(static)
  for (int col = 0; col < nt * np; ++col) {
    const int j = col / np, k = col % np;
    const int kp = (k + 1) % np, km = (k + np - 1) % np;
    const double inv_sin = 1.0 / std::sin(g.theta_centers()[j]);
    for (int i = 0; i < nr; ++i) {
      const std::size_t c = g.index(i, j, k);
      const double z = 1.0 / g.r_centers()[i];
      // derivative weights sum to zero; difference form keeps constants exact
      const double f1 = f[g.index(st[i].i0 + 1, j, k)];
      const double dz = wd[3 * i] * (f[g.index(st[i].i0, j, k)] - f1) + wd[3 * i + 2] * (f[g.index(st[i].i0 + 2, j, k)] - f1);
      out.d_r[c] = -z * z * dz;
      out.d_theta[c] = (theta_neighbour(g, f, i, j, k, +1) - theta_neighbour(g, f, i, j, k, -1)) / two_dth;
      out.d_phi[c] = (f[g.index(i, j, kp)] - f[g.index(i, j, km)]) * inv_sin / two_dph;
    }
  }
  return out;
}

std::vector<double> euclidean_mean_curvature(const SphericalGrid& g, std::span<const double> u,
                                             const SphericalGradient& grad, double floor) {
  const int nr = g.n_r(), nt = g.n_theta(), np = g.n_phi();
  const std::size_t n = g.size();
  std::vector<double> nrm(n), nr2(n), sin_nt(n), nph(n);
  double gmax = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const int i = static_cast<int>(c % nr);
    const double r = g.r_centers()[i];
    const double gt = grad.d_theta[c] / r, gp = grad.d_phi[c] / r;
    nrm[c] = std::sqrt(grad.d_r[c] * grad.d_r[c] + gt * gt + gp * gp);
    gmax = std::max(gmax, nrm[c]);
  }
  const double cut = floor * gmax;
  for (int j = 0; j < nt; ++j) {
    const double st = std::sin(g.theta_centers()[j]);
    for (int k = 0; k < np; ++k)
      for (int i = 0; i < nr; ++i) {
        const std::size_t c = g.index(i, j, k);
        const double r = g.r_centers()[i];
        const double inv = nrm[c] > cut ? 1.0 / nrm[c] : 0.0;
        nr2[c] = r * r * grad.d_r[c] * inv;
        sin_nt[c] = st * grad.d_theta[c] / r * inv;
        nph[c] = grad.d_phi[c] / r * inv;
      }
  }
  std::vector<double> H(n);
  const double two_dth = 2.0 * g.dtheta(), two_dph = 2.0 * g.dphi();
  (void)u;
#pragma omp parallel for schedule(static)
  for (int col = 0; col < nt * np; ++col) {
    const int j = col / np, k = col % np;
    const int kp = (k + 1) % np, km = (k + np - 1) % np;
    const double st = std::sin(g.theta_centers()[j]);
    for (int i = 0; i < nr; ++i) {
      const std::size_t c = g.index(i, j, k);
      if (!(nrm[c] > cut)) {
        H[c] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double r = g.r_centers()[i];
      // d/dr of r^2 n_r by the quadratic in r through three centres
      const int i0 = std::clamp(i - 1, 0, nr - 3);
      double dr = 0.0;
      for (int m = 0; m < 3; ++m) {
        const int a = (m + 1) % 3, b = (m + 2) % 3;
        const double xm = g.r_centers()[i0 + m], xa = g.r_centers()[i0 + a], xb = g.r_centers()[i0 + b];
        dr += nr2[g.index(i0 + m, j, k)] * ((r - xa) + (r - xb)) / ((xm - xa) * (xm - xb));
      }
      const double tp = theta_neighbour(g, sin_nt, i, j, k, +1);
      const double tm = theta_neighbour(g, sin_nt, i, j, k, -1);
      const double div = dr / (r * r) + (tp - tm) / (two_dth * r * st) + (nph[g.index(i, j, kp)] - nph[g.index(i, j, km)]) / (two_dph * r * st);
      H[c] = -div;
    }
  }
  return H;
}

}  // namespace greenmass
