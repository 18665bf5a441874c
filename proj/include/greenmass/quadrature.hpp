#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <utility>
#include <vector>

namespace greenmass {

// n-point Gauss-Legendre rule mapped to [a, b], nodes ascending
inline std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
  const std::vector<double> z = boost::math::legendre_p_zeros<double>(n);
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  auto weight = [n](double x) {
    const double d = boost::math::legendre_p_prime<double>(n, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (auto it = z.rbegin(); it != z.rend(); ++it)
    if (*it > 0.0) out.emplace_back(c - h * *it, h * weight(*it));
  for (double x : z) out.emplace_back(c + h * x, h * weight(x));
  return out;
}

}  // namespace greenmass
