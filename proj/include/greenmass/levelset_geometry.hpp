#pragma once

#include "greenmass/elliptic_green.hpp"
#include "greenmass/field_derivatives.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace greenmass {

struct SmearOptions {
  double cells = 4.0;        // full window width in radial cells
  int substeps = 8;          // radial sub-samples per cell
  double gradient_floor = 1e-12;
};

// One radial sub-sample of a cell with everything the surface integrands need.
struct SamplePoint {
  Vec3 x;
  double r = 0.0;
  double weight = 0.0;  // Euclidean volume
  double u = 0.0;
  Vec3 grad;            // Euclidean gradient of u
  double grad_norm = 0.0;
  double H_euc = 0.0;
  double phi = 1.0;
  Vec3 grad_phi;
  // metric quantities (g = phi^4 delta)
  double grad_g = 0.0;  // |grad^g u|_g
  double dv_g = 0.0;
  double H_g = 0.0;
  bool masked = false;
  int i = 0, j = 0, k = 0, sub = 0;
};

struct SurfaceIntegralReport {
  double t = 0.0;
  double area = 0.0;
  double int_H_gradu = 0.0;
  double int_gradu_sq = 0.0;
  double int_gradu = 0.0;         // flux, 4 pi for normalised solutions
  double int_gradu_sq_over_u = 0.0;
  double f_density = 0.0;         // int |grad u| (t - t^2 H + t^3 |grad u|) with t = 1/u pointwise
  double smear_width = 0.0;       // epsilon in u units
  bool single_shell = true;
};

struct CurvatureTermsReport {
  double t = 0.0;
  double int_RSigma = 0.0;
  double int_grad_log = 0.0;
  double int_A_ring = 0.0;
  double int_R = 0.0;
  double int_sphere_defect = 0.0;
  double dF_dt = 0.0;
  bool closed_form = true;  // false: finite-difference Weingarten path (experimental)
};

struct GradientField {
  std::vector<Vec3> grad_g;     // g^{ij} d_j u, Cartesian components
  std::vector<double> norm_g;   // |grad^g u|_g
};

class LevelSetGeometry {
 public:
  explicit LevelSetGeometry(const GreensSolution& s, SmearOptions opt = {});

  const GreensSolution& solution() const { return *sol_; }
  const SphericalGrid& grid() const { return *sol_->grid; }
  const SmearOptions& options() const { return opt_; }

  GradientField gradient_field() const;
  std::vector<double> mean_curvature_field() const;  // H_g at cell centres, NaN where masked

  SamplePoint sample(int i, int j, int k, int s) const;

  // shells whose samples can reach u in [u_lo, u_hi]; throws ShellUnresolved at the grid edge
  std::pair<int, int> shell_range(double u_lo, double u_hi) const;

  // sum over all sub-samples of shells [i_lo, i_hi] of fn(sample, acc); columns are
  // reduced in parallel and folded in column order
  template <std::size_t N, class Fn>
  std::array<double, N> reduce(int i_lo, int i_hi, Fn&& fn) const;

  double default_log_halfwidth() const { return 0.5 * opt_.cells * grid().dxi(); }
  double default_smear_width(double t) const;

  // log-level window: kernel in ln(1/u) of half-width w around ln t
  SurfaceIntegralReport surface_integrals(double t, std::optional<double> eps = std::nullopt) const;
  double smeared_surface_integral(const std::function<double(const SamplePoint&)>& Q, double t,
                                  std::optional<double> eps = std::nullopt) const;
  CurvatureTermsReport curvature_terms(double t) const;

  // every column crosses u = 1/t exactly once
  bool single_shell(double t) const;

  // quadratic-in-zeta value of a cell field at a sample
  double interpolate(const std::vector<double>& field, const SamplePoint& p) const;

 private:
  double log_halfwidth(double t, std::optional<double> eps) const;
  void build_weingarten() const;

  const GreensSolution* sol_;
  SmearOptions opt_;
  SphericalGradient grad_;
  std::vector<double> rH_;  // r * H_euc at centres
  std::vector<double> shell_lo_, shell_hi_;
  // per sub-sample radius data
  std::vector<double> sub_r_, sub_w_;
  std::vector<int> sub_i0_;
  std::vector<std::array<double, 3>> sub_wv_, sub_wd_;
  std::vector<Vec3> col_er_, col_et_, col_ep_;
  // experimental Weingarten fields at centres
  mutable bool weingarten_ready_ = false;
  mutable std::vector<double> a_ring_sq_, grad_log_sq_;
};

// smooth compactly supported kernel on [-1, 1] with vanishing moments 2 and 4
double smear_kernel(double z);

template <std::size_t N, class Fn>
std::array<double, N> LevelSetGeometry::reduce(int i_lo, int i_hi, Fn&& fn) const {
  const int nt = grid().n_theta(), np = grid().n_phi(), ns = opt_.substeps;
  const int cols = nt * np;
  std::vector<std::array<double, N>> part(cols);
#pragma omp parallel for schedule(static)
  for (int col = 0; col < cols; ++col) {
    std::array<double, N> acc{};
    const int j = col / np, k = col % np;
    for (int i = i_lo; i <= i_hi; ++i)
      for (int s = 0; s < ns; ++s) fn(sample(i, j, k, s), acc);
    part[col] = acc;
  }
  std::array<double, N> out{};
  for (const auto& p : part)
    for (std::size_t m = 0; m < N; ++m) out[m] += p[m];
  return out;
}

}  // namespace greenmass
