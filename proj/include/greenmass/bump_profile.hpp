#pragma once

#include <string>

namespace greenmass {

// psi(s) = N exp(-1/((s - s0)(1 - s0 - s))) on (s0, 1 - s0), zero elsewhere.
// N, c_psi and K2 = int psi/(1+s)^2 are fixed by quadrature at construction.
class BumpProfile {
 public:
  explicit BumpProfile(double s0 = 0.05);

  double s0() const { return s0_; }
  double norm() const { return norm_; }
  double c_psi() const { return c_psi_; }
  double k2() const { return k2_; }

  double psi(double s) const;
  double dpsi(double s) const;

  // phi(t) = t^-3 [psi(1/(2t) - 1)/2 - psi(1/t - 1)], the coarea weight of D
  double phi(double t) const;
  double dphi(double t) const;

  // int_0^1 f(s) psi(s) ds by adaptive quadrature
  template <class F>
  double integrate(const F& f) const;

  std::string describe() const;

 private:
  double raw(double s) const;

  double s0_;
  double norm_ = 1.0;
  double c_psi_ = 0.0;
  double k2_ = 0.0;
};

}  // namespace greenmass

#include <boost/math/quadrature/tanh_sinh.hpp>

template <class F>
double greenmass::BumpProfile::integrate(const F& f) const {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double s) { return f(s) * psi(s); }, s0_, 1.0 - s0_, 1e-13);
}
