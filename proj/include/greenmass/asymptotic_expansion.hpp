#pragma once

#include "greenmass/elliptic_green.hpp"
#include "greenmass/kernels.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace greenmass {

// quadrature lattice on a spherical shell r_in <= |y| <= r_out; weights sum to its volume
struct AnnulusLattice {
  std::vector<Vec3> y;
  std::vector<double> w;
  double volume = 0.0;
};

// Gauss-Legendre in log r and cos(theta), uniform in phi
AnnulusLattice annulus_lattice(int n_r, int n_cos, int n_phi, double r_in = 1.0, double r_out = 4.0);
const AnnulusLattice& fit_lattice();        // 24 x 12 x 24 on An = B(0,4) \ B(0,1)
const AnnulusLattice& potential_lattice();  // 12 x 6 x 12 on An

// cell-centred field at an arbitrary point: quadratic in 1/r, bilinear in (theta, phi)
struct InterpStencil {
  std::array<std::size_t, 12> idx{};
  std::array<double, 12> w{};
};
InterpStencil interp_stencil(const SphericalGrid& g, const Vec3& x);
double interpolate(const InterpStencil& s, std::span<const double> f);

struct AnnulusSamples {
  double R = 0.0;
  const AnnulusLattice* lattice = nullptr;
  std::vector<double> u;    // u_R(y) = R u(R y)
  std::vector<Vec3> grad;   // grad_y u_R
};

// throws OutOfRange unless 8 r_min <= R and 4R <= r_max / 2
AnnulusSamples rescale_to_annulus(const GreensSolution& s, double R, const AnnulusLattice& lat = fit_lattice());

struct AnnulusReport {
  double R = 0.0;
  double c = 0.0;         // coefficient of 1/|y|
  double radial2 = 0.0;   // coefficient of 1/(R |y|^2)
  Vec3 d = Vec3::Zero();  // coefficient of y/(R |y|^3)
  double condition = 0.0;
  double residual_l1 = 0.0;   // scale-invariant L^q averages over An, q = 1 and 1.25
  double residual_l125 = 0.0;
  double residual_wp = 0.0;   // (avg |res|^p + avg |grad res|^p)^(1/p)
};

// least squares on the lattice against {1/|y|, 1/(R|y|^2), y_i/(R|y|^3)}
AnnulusReport fit_annulus(const AnnulusSamples& s, double p = 4.0);
// same basis on plain values (no gradient norm)
AnnulusReport fit_values(const AnnulusLattice& lat, std::span<const double> v, double R);

struct ExpansionFit {
  std::vector<AnnulusReport> series;
  double c = 0.0;         // from the largest R
  Vec3 d = Vec3::Zero();  // from the largest R
  bool residual_decreasing = true;  // scale-invariant L^1 residual, one inversion allowed
};

// needs at least 4 values of R
ExpansionFit fit_expansion(const GreensSolution& s, const std::vector<double>& R_list, double p = 4.0);

// Newtonian potential of div X by direct summation over cells
class PotentialField {
 public:
  kernels::CellSources sources;
  Vec3 xbar = Vec3::Zero();  // (1/4pi) int X
  double x_l1 = 0.0;         // int |X|
  bool parallel = true;

  std::vector<kernels::PotentialSample> evaluate(std::span<const Vec3> x) const;
};

// X = B grad u on |x| >= cutoff, zero inside
std::vector<Vec3> x_field(const GreensSolution& s, double cutoff = 1.0 / 16.0);
PotentialField newtonian_potential(const SphericalGrid& g, std::span<const Vec3> X);
PotentialField newtonian_potential(const GreensSolution& s, double cutoff = 1.0 / 16.0);

struct AnnulusErrorReport {
  double q = 1.0;
  std::vector<double> R;
  std::vector<double> value;  // (avg over An(R) of |R^2 (w - <x,xbar>/|x|^3)|^q)^(1/q)
  int inversions = 0;
  bool decreasing = true;  // at most one inversion
};

// An(R) = {R/8 <= |x| <= 8R}; q must lie in [1, 1.5)
AnnulusErrorReport annulus_error(const PotentialField& pot, const std::vector<double>& R_list, double q);

struct RemainderPoint {
  double R = 0.0;
  double c = 0.0;
  Vec3 b = Vec3::Zero();      // dipole of h = u - w
  Vec3 d = Vec3::Zero();      // dipole of u on the same lattice
  Vec3 w_dipole = Vec3::Zero();
  double mean_abs = 0.0;      // avg over R An of |h - c/|x||
  double closure = 0.0;       // |d - (b + xbar)|
};

struct HarmonicRemainderReport {
  Vec3 xbar = Vec3::Zero();
  std::vector<RemainderPoint> points;
};

HarmonicRemainderReport harmonic_remainder(const GreensSolution& s, const PotentialField& pot,
                                           const std::vector<double>& R_list,
                                           const AnnulusLattice& lat = potential_lattice());

// number of i with v[i+1] >= v[i]
int count_inversions(const std::vector<double>& v);

}  // namespace greenmass
