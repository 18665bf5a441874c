#include "greenmass/bump_profile.hpp"

#include "greenmass/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace greenmass {

BumpProfile::BumpProfile(double s0) : s0_(s0) {
  if (!(s0 > 0.0 && s0 < 0.25)) throw InvalidSpec("bump margin s0 must lie in (0, 0.25)");
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mass = ts.integrate([this](double s) { return raw(s); }, s0_, 1.0 - s0_, 1e-14);
  norm_ = 1.0 / mass;
  c_psi_ = 2.0 * std::numbers::pi * integrate([](double s) { return 1.0 / (1.0 + s); });
  k2_ = integrate([](double s) { return 1.0 / ((1.0 + s) * (1.0 + s)); });
}

double BumpProfile::raw(double s) const {
  if (!(s > s0_ && s < 1.0 - s0_)) return 0.0;
  return std::exp(-1.0 / ((s - s0_) * (1.0 - s0_ - s)));
}

double BumpProfile::psi(double s) const { return norm_ * raw(s); }

double BumpProfile::dpsi(double s) const {
  if (!(s > s0_ && s < 1.0 - s0_)) return 0.0;
  const double q = (s - s0_) * (1.0 - s0_ - s);
  const double dq = 1.0 - 2.0 * s;
  return psi(s) * dq / (q * q);
}

double BumpProfile::phi(double t) const {
  return (0.5 * psi(0.5 / t - 1.0) - psi(1.0 / t - 1.0)) / (t * t * t);
}

double BumpProfile::dphi(double t) const {
  const double t2 = t * t;
  const double inner = 0.5 * psi(0.5 / t - 1.0) - psi(1.0 / t - 1.0);
  const double dinner = 0.5 * dpsi(0.5 / t - 1.0) * (-0.5 / t2) - dpsi(1.0 / t - 1.0) * (-1.0 / t2);
  return dinner / (t2 * t) - 3.0 * inner / (t2 * t2);
}

std::string BumpProfile::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "psi=exp_bump;s0=%.17g;N=%.17g;c_psi=%.17g", s0_, norm_, c_psi_);
  return buf;
}

}  // namespace greenmass
