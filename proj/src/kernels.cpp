#include "greenmass/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>

namespace greenmass::kernels {

int max_threads() { return omp_get_max_threads(); }

LineFactors factor_lines(const Stencil7& s) {
  LineFactors f;
  f.n_r = s.n_r;
  f.n_lines = s.size() / static_cast<std::size_t>(s.n_r);
  f.inv_pivot.resize(s.size());
  f.upper.resize(s.size());
  f.lower.resize(s.size());
  for (std::size_t line = 0; line < f.n_lines; ++line) {
    const std::size_t b = line * s.n_r;
    double prev_upper = 0.0;
    for (int i = 0; i < s.n_r; ++i) {
      const std::size_t c = b + i;
      const double a = (i > 0) ? -s.w_rm[c] : 0.0;
      const double piv = s.diag[c] - a * prev_upper;
      f.inv_pivot[c] = 1.0 / piv;
      f.lower[c] = a;
      f.upper[c] = (i + 1 < s.n_r) ? -s.w_rp[c] / piv : 0.0;
      prev_upper = f.upper[c];
    }
  }
  return f;
}

namespace {

// one radial line of the operator; shared by both variants so they agree bitwise
inline void apply_column(const Stencil7& s, int j, int k, const double* x, double* y) {
  const int nr = s.n_r;
  const std::size_t np = static_cast<std::size_t>(s.n_phi);
  const std::size_t b = (static_cast<std::size_t>(j) * np + k) * nr;
  const std::size_t bpm = (static_cast<std::size_t>(j) * np + (k == 0 ? s.n_phi - 1 : k - 1)) * nr;
  const std::size_t bpp = (static_cast<std::size_t>(j) * np + (k + 1 == s.n_phi ? 0 : k + 1)) * nr;
  const bool has_tm = j > 0, has_tp = j + 1 < s.n_theta;
  const std::size_t btm = has_tm ? b - np * nr : b;
  const std::size_t btp = has_tp ? b + np * nr : b;
  for (int i = 0; i < nr; ++i) {
    const std::size_t c = b + i;
    double acc = s.diag[c] * x[c];
    if (i > 0) acc -= s.w_rm[c] * x[c - 1];
    if (i + 1 < nr) acc -= s.w_rp[c] * x[c + 1];
    acc -= s.w_pm[c] * x[bpm + i];
    acc -= s.w_pp[c] * x[bpp + i];
    if (has_tm) acc -= s.w_tm[c] * x[btm + i];
    if (has_tp) acc -= s.w_tp[c] * x[btp + i];
    y[c] = acc;
  }
}

inline void solve_line(const LineFactors& f, std::size_t line, const double* r, double* z) {
  const std::size_t b = line * f.n_r;
  double prev = 0.0;
  for (int i = 0; i < f.n_r; ++i) {
    const std::size_t c = b + i;
    prev = (r[c] - f.lower[c] * prev) * f.inv_pivot[c];
    z[c] = prev;
  }
  for (int i = f.n_r - 2; i >= 0; --i) {
    const std::size_t c = b + i;
    z[c] -= f.upper[c] * z[c + 1];
  }
}

inline PotentialSample potential_at(const CellSources& src, const Vec3& x) {
  double w = 0.0, bound = 0.0;
  const std::size_t n = src.pos.size();
  for (std::size_t c = 0; c < n; ++c) {
    const Vec3 d = x - src.pos[c];
    const double r2 = d.squaredNorm();
    if (r2 < src.reach[c] * src.reach[c]) {
      for (std::size_t f = src.fine_begin[c]; f < src.fine_begin[c + 1]; ++f) {
        const Vec3 df = x - src.fine_pos[f];
        const double rf2 = df.squaredNorm();
        if (rf2 < 1e-24) continue;
        const double inv = 1.0 / std::sqrt(rf2);
        w += df.dot(src.fine_moment[f]) * inv * inv * inv;
        bound += src.fine_moment_norm[f] * inv * inv;
      }
      continue;
    }
    const double inv = 1.0 / std::sqrt(r2);
    w += d.dot(src.moment[c]) * inv * inv * inv;
    bound += src.moment_norm[c] * inv * inv;
  }
  const double k = 0.25 / std::numbers::pi;
  return {k * w, k * bound};
}

}  // namespace

namespace serial {

void apply(const Stencil7& s, std::span<const double> x, std::span<double> y) {
  for (int j = 0; j < s.n_theta; ++j)
    for (int k = 0; k < s.n_phi; ++k) apply_column(s, j, k, x.data(), y.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void line_solve(const LineFactors& f, std::span<const double> r, std::span<double> z) {
  for (std::size_t line = 0; line < f.n_lines; ++line) solve_line(f, line, r.data(), z.data());
}

double weighted_sum(std::span<const double> w, std::span<const double> v) { return dot(w, v); }

void potential(const CellSources& src, std::span<const Vec3> targets, std::span<PotentialSample> out) {
  for (std::size_t t = 0; t < targets.size(); ++t) out[t] = potential_at(src, targets[t]);
}

}  // namespace serial

namespace parallel {

void apply(const Stencil7& s, std::span<const double> x, std::span<double> y) {
  const int cols = s.n_theta * s.n_phi;
#pragma omp parallel for schedule(static)
  for (int col = 0; col < cols; ++col) apply_column(s, col / s.n_phi, col % s.n_phi, x.data(), y.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[c] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void line_solve(const LineFactors& f, std::span<const double> r, std::span<double> z) {
  const std::size_t n = f.n_lines;
#pragma omp parallel for schedule(static)
  for (std::size_t line = 0; line < n; ++line) solve_line(f, line, r.data(), z.data());
}

double weighted_sum(std::span<const double> w, std::span<const double> v) { return dot(w, v); }

void potential(const CellSources& src, std::span<const Vec3> targets, std::span<PotentialSample> out) {
  const std::size_t n = targets.size();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t t = 0; t < n; ++t) out[t] = potential_at(src, targets[t]);
}

}  // namespace parallel

}  // namespace greenmass::kernels
