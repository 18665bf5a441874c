#pragma once

#include "greenmass/grid.hpp"

#include <span>
#include <vector>

namespace greenmass {

// Euclidean gradient of a cell field in the orthonormal spherical frame.
// Radial derivatives use three-point Lagrange interpolation in zeta = 1/r, which
// is exact for a + b/r + c/r^2; angular ones are centred, crossing the poles
// through the cell at phi + pi.
struct SphericalGradient {
  std::vector<double> d_r;      // du/dr
  std::vector<double> d_theta;  // du/dtheta          (tangential component times r)
  std::vector<double> d_phi;    // du/dphi / sin(theta) (tangential component times r)
};

SphericalGradient spherical_gradient(const SphericalGrid& g, std::span<const double> f);

// radial stencil helpers shared with the sub-cell sampler
struct ZetaStencil {
  int i0;          // first of the three cells
  double z[3];     // nodes in zeta
};
ZetaStencil zeta_stencil(const SphericalGrid& g, int i);
// weights of the quadratic through the stencil for value and d/dzeta at zeta
void zeta_weights(const ZetaStencil& s, double zeta, double wv[3], double wd[3]);

// value of the cell across the pole (or the regular neighbour) in theta direction
inline double theta_neighbour(const SphericalGrid& g, std::span<const double> f, int i, int j, int k, int dj) {
  const int jn = j + dj;
  if (jn < 0) return f[g.index(i, 0, g.mirror_phi(k))];
  if (jn >= g.n_theta()) return f[g.index(i, g.n_theta() - 1, g.mirror_phi(k))];
  return f[g.index(i, jn, k)];
}

// Euclidean mean curvature of the level sets, H = -div(grad u/|grad u|).
// Cells with |grad u| below floor * max|grad u| get NaN.
std::vector<double> euclidean_mean_curvature(const SphericalGrid& g, std::span<const double> u,
                                             const SphericalGradient& grad, double floor = 1e-12);

}  // namespace greenmass
