#pragma once

#include "greenmass/metric_models.hpp"

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel kernels. Each has a plain serial reference in kernels::serial and an
// OpenMP version in kernels::parallel; tests compare the two and bench/ times them.
// Parallel reductions sum fixed-size chunks and then fold the partials in chunk order,
// so results do not depend on the thread count.

namespace greenmass::kernels {

inline constexpr std::size_t kChunk = 2048;

// symmetric 7-point operator on an (n_r, n_theta, n_phi) lattice, radius fastest
struct Stencil7 {
  int n_r = 0, n_theta = 0, n_phi = 0;
  std::vector<double> diag;
  std::vector<double> w_rm, w_rp, w_tm, w_tp, w_pm, w_pp;

  std::size_t size() const { return diag.size(); }
};

// Thomas factors of the radial tridiagonal blocks of a Stencil7
struct LineFactors {
  int n_r = 0;
  std::size_t n_lines = 0;
  std::vector<double> inv_pivot, upper;  // per cell
  std::vector<double> lower;             // per cell, coupling to i-1
};

LineFactors factor_lines(const Stencil7& s);

// Sources for the Newtonian kernel: one representative point per cell, plus a
// finer sub-quadrature used when a target is close to the cell.
struct CellSources {
  std::vector<Vec3> pos;
  std::vector<Vec3> moment;  // X * volume
  std::vector<double> moment_norm;
  std::vector<double> reach;  // near-field radius
  std::vector<std::size_t> fine_begin;  // size = cells + 1
  std::vector<Vec3> fine_pos;
  std::vector<Vec3> fine_moment;
  std::vector<double> fine_moment_norm;

  std::size_t size() const { return pos.size(); }
};

struct PotentialSample {
  double w = 0.0;      // (1/4pi) sum <x - y, m>/|x - y|^3
  double bound = 0.0;  // (1/4pi) sum |m|/|x - y|^2 over the same points
};

namespace serial {
void apply(const Stencil7& s, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void line_solve(const LineFactors& f, std::span<const double> r, std::span<double> z);
double weighted_sum(std::span<const double> w, std::span<const double> v);
void potential(const CellSources& src, std::span<const Vec3> targets, std::span<PotentialSample> out);
}  // namespace serial

namespace parallel {
void apply(const Stencil7& s, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void line_solve(const LineFactors& f, std::span<const double> r, std::span<double> z);
double weighted_sum(std::span<const double> w, std::span<const double> v);
void potential(const CellSources& src, std::span<const Vec3> targets, std::span<PotentialSample> out);
}  // namespace parallel

int max_threads();

}  // namespace greenmass::kernels
