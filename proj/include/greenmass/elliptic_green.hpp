#pragma once

#include "greenmass/grid.hpp"
#include "greenmass/kernels.hpp"
#include "greenmass/metric_models.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace greenmass {

enum class Provenance { GridSolve, RadialOracle };
std::string to_string(Provenance p);

// Two-point-flux finite-volume discretisation of div(A grad .) with A = a I.
// Radial transmissibilities integrate 1/(a r^2) exactly between centres, so the
// flat operator reproduces 1/r to rounding.
struct FluxOperator {
  std::shared_ptr<const SphericalGrid> grid;
  kernels::Stencil7 stencil;
  std::vector<double> radial_trans;   // per column, faces 0..n_r (0: closed inner face, n_r: outer Dirichlet)
  std::vector<double> inner_current;  // per column: flux of A grad(1/r) through the inner face
  std::vector<double> cell_a;         // conductivity at cell centres

  void apply(std::span<const double> x, std::span<double> y) const;
  // outward flux through radial face f (1..n_r) of a field with outer boundary value outer
  double shell_flux(std::span<const double> x, int face, double outer) const;
  double total_inner_current() const;
  double asymmetry_norm() const;  // max |L_ij - L_ji| over stored couplings
};

FluxOperator assemble_operator(std::shared_ptr<const SphericalGrid> grid, const MetricModel& model);

struct SolverOptions {
  double rel_tol = 1e-12;
  int max_iter = 20000;
  bool normalize_flux = true;
  bool parallel = true;  // false selects the serial reference kernels
};

struct GreensSolution {
  std::shared_ptr<const SphericalGrid> grid;
  MetricModel model = MetricModel::euclidean();
  std::vector<double> u;
  double flux_constant = 0.0;  // mean interior shell flux after normalisation
  double scale = 1.0;          // the factor removed by normalisation
  double u_outer = 0.0;        // value imposed at r_max
  double residual = 0.0;       // relative residual of the linear solve
  int iterations = 0;
  bool normalized = true;
  Provenance provenance = Provenance::GridSolve;
  std::vector<double> shell_flux;  // faces 1..n_r, after normalisation

  const GridSpec& spec() const { return grid->spec(); }
  double at(int i, int j, int k) const { return u[grid->index(i, j, k)]; }
};

GreensSolution solve_green(std::shared_ptr<const SphericalGrid> grid, const MetricModel& model,
                           const SolverOptions& opt = {});

// u(r) = int_r^inf ds / (s^2 phi(s)^2) by adaptive quadrature
double radial_oracle_value(const MetricModel& model, double r);
GreensSolution radial_oracle(std::shared_ptr<const SphericalGrid> grid, const MetricModel& model);

// relative L-infinity distance to the radial oracle over cells with r in [r_lo, r_hi]
double oracle_error(const GreensSolution& s, double r_lo, double r_hi);

struct AnnulusDiagnostic {
  double R = 0.0;
  double energy_product = 0.0;  // R * int_{An(R)} |grad u|^2
  double l1_x = 0.0;            // int_{An(R)} |X|, X = B grad u on r >= 1/16
};

struct HypothesisReport {
  double c_lower = 0.0, c_upper = 0.0;  // c |x| <= u |x| <= C over all cells
  double ellipticity = 1.0;
  std::vector<AnnulusDiagnostic> annuli;
  double energy_exponent = 0.0;  // log-log slope of energy products
  double l1_x_exponent = 0.0;    // log-log slope of the X tail, over R >= 16
  bool monotone_shell_average = true;
  bool positive = true;
};

HypothesisReport hypothesis_checks(const GreensSolution& s);

// checkpoint: text header plus one %.17g value per line
void save_checkpoint(const GreensSolution& s, const std::string& path);
GreensSolution load_checkpoint(const std::string& path);

}  // namespace greenmass
