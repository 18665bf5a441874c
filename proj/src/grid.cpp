#include "greenmass/grid.hpp"

#include "greenmass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace greenmass {

void GridSpec::validate() const {
  if (n_r < 3 || n_theta < 2 || n_phi < 4)
    throw InvalidSpec("need n_r >= 3, n_theta >= 2, n_phi >= 4 (got " + std::to_string(n_r) + "x" +
                      std::to_string(n_theta) + "x" + std::to_string(n_phi) + ")");
  if (n_phi % 2 != 0) throw InvalidSpec("n_phi must be even for the pole mirror");
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
    throw InvalidSpec("radii must satisfy 0 < r_min < r_max");
  if (!(r_min < 1.0 / 16.0)) throw InvalidSpec("r_min must lie inside B(0, 1/16)");
  if (r_max / r_min < 1024.0 * (1.0 - 1e-12)) throw InvalidSpec("r_max / r_min must be at least 2^10");
}

std::string GridSpec::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "r_min=%.17g;r_max=%.17g;n_r=%d;n_theta=%d;n_phi=%d", r_min, r_max, n_r,
                n_theta, n_phi);
  return buf;
}

double SphericalGrid::volume_centre(double r_a, double r_b) {
  const double dxi = std::log(r_b / r_a);
  return std::cbrt((r_b * r_b * r_b - r_a * r_a * r_a) / (3.0 * dxi));
}

SphericalGrid::SphericalGrid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const int nr = spec_.n_r, nt = spec_.n_theta, np = spec_.n_phi;
  dxi_ = std::log(spec_.r_max / spec_.r_min) / nr;
  dtheta_ = std::numbers::pi / nt;
  dphi_ = 2.0 * std::numbers::pi / np;

  r_f_.resize(nr + 1);
  for (int i = 0; i <= nr; ++i) r_f_[i] = spec_.r_min * std::exp(dxi_ * i);
  r_f_[nr] = spec_.r_max;
  r_c_.resize(nr);
  shell_factor_.resize(nr);
  for (int i = 0; i < nr; ++i) {
    r_c_[i] = volume_centre(r_f_[i], r_f_[i + 1]);
    shell_factor_[i] = (r_f_[i + 1] * r_f_[i + 1] * r_f_[i + 1] - r_f_[i] * r_f_[i] * r_f_[i]) / 3.0;
  }
  th_f_.resize(nt + 1);
  for (int j = 0; j <= nt; ++j) th_f_[j] = dtheta_ * j;
  th_f_[nt] = std::numbers::pi;
  th_c_.resize(nt);
  omega_.resize(nt);
  for (int j = 0; j < nt; ++j) {
    th_c_[j] = 0.5 * (th_f_[j] + th_f_[j + 1]);
    omega_[j] = dphi_ * (std::cos(th_f_[j]) - std::cos(th_f_[j + 1]));
  }
  ph_c_.resize(np);
  for (int k = 0; k < np; ++k) ph_c_[k] = dphi_ * (k + 0.5);
}

Vec3 SphericalGrid::unit(int j, int k) const {
  const double st = std::sin(th_c_[j]);
  return Vec3(st * std::cos(ph_c_[k]), st * std::sin(ph_c_[k]), std::cos(th_c_[j]));
}

Vec3 SphericalGrid::centre(int i, int j, int k) const { return r_c_[i] * unit(j, k); }

int SphericalGrid::aligned_face(double r) const {
  const double x = std::log(r / spec_.r_min) / dxi_;
  const long f = std::lround(x);
  if (f < 0 || f > spec_.n_r) return -1;
  return std::abs(r_f_[f] - r) <= 1e-12 * r ? static_cast<int>(f) : -1;
}

int SphericalGrid::shell_of(double r) const {
  const auto it = std::upper_bound(r_f_.begin() + 1, r_f_.end(), r);
  const int i = static_cast<int>(it - r_f_.begin()) - 1;
  return std::clamp(i, 0, spec_.n_r - 1);
}

}  // namespace greenmass
