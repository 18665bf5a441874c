#pragma once

#include "greenmass/bump_profile.hpp"
#include "greenmass/levelset_geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace greenmass {

// lim a D(a) / m on Schwarzschild for the default profile (s0 = 0.05); equals 3 pi K2.
// Regenerate with the mass_calibration tool.
inline constexpr double kMassCalibration = 4.265830205963781;

struct FValue {
  double t = 0.0;
  double F = 0.0;          // smeared with t = 1/u pointwise
  double F_surface = 0.0;  // 4 pi t - t^2 int H|grad u| + t^3 int |grad u|^2 at the nominal t
  double smear_width = 0.0;
  bool single_shell = true;
};

FValue F_of_t(const LevelSetGeometry& geo, double t, std::optional<double> eps = std::nullopt);

struct EValue {
  double a = 0.0, s = 0.0;
  double quadrature = 0.0;  // int_{a+s}^{2a+2s} F/t^3
  double flux_form = 0.0;
  double discrepancy = 0.0;
};

EValue E_of(const LevelSetGeometry& geo, double a, double s, int nodes = 8);

struct DOptions {
  bool cross_check = true;
  int s_nodes = 24;
  int e_nodes = 8;
  double tolerance = 5e-3;  // relative to max(|D|, c_psi)
};

struct DValue {
  double a = 0.0;
  double D = 0.0;             // volumetric form
  double s_quadrature = 0.0;  // int psi(s/a) E(a,s) ds, NaN when skipped
  double discrepancy = 0.0;
  double aD() const { return a * D; }
};

DValue D_of(const LevelSetGeometry& geo, double a, const BumpProfile& psi, const DOptions& opt = {});
// volumetric part only: int [psi(1/(2au)-1)/2 - psi(1/(au)-1)] |grad u|^3/u^3 dv_g
double D_volumetric_integral(const LevelSetGeometry& geo, double a, const BumpProfile& psi);

struct MonotonicityViolation {
  std::string series;  // "F" or "aD" or "D"
  double x1 = 0.0, x2 = 0.0;
  double v1 = 0.0, v2 = 0.0;
  double drop = 0.0;
  double tolerance = 0.0;
};

enum class Verdict { Pass, Violated, NotApplicable };
std::string to_string(Verdict v);

struct SeriesOptions {
  double monotone_tol = 1e-3;
  DOptions d;
};

struct FunctionalSeries {
  std::vector<double> t_grid;
  std::vector<FValue> F;
  std::vector<double> a_grid;
  std::vector<DValue> D;
  Verdict F_monotone = Verdict::NotApplicable;
  Verdict F_nonnegative = Verdict::NotApplicable;
  Verdict D_nonnegative = Verdict::NotApplicable;
  Verdict aD_monotone = Verdict::NotApplicable;
  bool hypothesis_R_nonnegative = true;  // verdicts are only asserted when true
  std::vector<MonotonicityViolation> violations;
  double limit = 0.0;        // plateau estimate of lim aD
  double uncertainty = 0.0;  // max pairwise spread of the last three aD
  bool plateau = false;
};

FunctionalSeries F_series(const LevelSetGeometry& geo, const std::vector<double>& t_grid,
                          const SeriesOptions& opt = {});
FunctionalSeries aD_series(const LevelSetGeometry& geo, const std::vector<double>& a_grid, const BumpProfile& psi,
                           const SeriesOptions& opt = {});

// D(a) on a radial model from 1D quadrature of the exact profile u(r), u'(r) = -1/(r^2 phi^2)
double radial_D_oracle(const MetricModel& model, double a, const BumpProfile& psi);

// geometric with ratio in [1.5, 4]
void validate_a_grid(const std::vector<double>& a_grid);

}  // namespace greenmass
