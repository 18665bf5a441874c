// Measures lim a D(a) / m on Schwarzschild from the 1D radial oracle and compares it
// with the closed form 3 pi int psi/(1+s)^2 and with the constant compiled into the library.
#include "greenmass/mass_functionals.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

using namespace greenmass;

int main() {
  const BumpProfile psi;
  std::printf("psi: %s\n", psi.describe().c_str());
  std::printf("%10s %10s %22s\n", "m", "a", "aD/m");
  double last = 0.0;
  for (double m : {0.5, 1.0, 2.0})
    for (double a = 4.0; a <= 65536.0; a *= 16.0) {
      last = a * radial_D_oracle(MetricModel::schwarzschild(m), a, psi) / m;
      std::printf("%10g %10g %22.15f\n", m, a, last);
    }
  const double closed = 3.0 * std::numbers::pi * psi.k2();
  std::printf("3 pi K2            %.15f\n", closed);
  std::printf("compiled constant  %.15f\n", kMassCalibration);
  const bool ok = std::abs(closed - kMassCalibration) < 1e-12 && std::abs(last - closed) < 1e-4 * closed;
  std::printf("%s\n", ok ? "consistent" : "MISMATCH");
  return ok ? 0 : 1;
}
