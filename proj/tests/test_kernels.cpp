#include "doctest.h"

#include "greenmass/asymptotic_expansion.hpp"
#include "greenmass/elliptic_green.hpp"
#include "greenmass/kernels.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

using namespace greenmass;
namespace K = greenmass::kernels;

namespace {

std::shared_ptr<const SphericalGrid> small_grid() {
  GridSpec g;
  g.r_min = 1.0 / 32.0;
  g.r_max = 32.0;
  g.n_r = 30;
  g.n_theta = 8;
  g.n_phi = 16;
  return std::make_shared<const SphericalGrid>(g);
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("serial and parallel vector kernels agree") {
  const std::size_t n = 3 * K::kChunk + 17;
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  // summation order differs; elementwise kernels are bitwise equal
  CHECK(K::serial::dot(a, b) == doctest::Approx(K::parallel::dot(a, b)).epsilon(1e-13));
  CHECK(K::serial::weighted_sum(a, b) == doctest::Approx(K::parallel::weighted_sum(a, b)).epsilon(1e-13));
  CHECK(K::parallel::dot(a, b) == K::parallel::dot(a, b));

  auto y1 = b, y2 = b;
  K::serial::axpy(0.37, a, y1);
  K::parallel::axpy(0.37, a, y2);
  CHECK(y1 == y2);
  K::serial::xpby(a, -1.3, y1);
  K::parallel::xpby(a, -1.3, y2);
  CHECK(y1 == y2);
}

TEST_CASE("dot product matches a compensated reference") {
  const std::size_t n = 5 * K::kChunk;
  const auto a = random_vector(n, 3), b = random_vector(n, 4);
  long double ref = 0.0L;
  for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(a[i]) * b[i];
  CHECK(K::parallel::dot(a, b) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
}

TEST_CASE("stencil apply and line solve agree between serial and parallel") {
  const auto grid = small_grid();
  const auto op = assemble_operator(grid, MetricModel::bump(Vec3(0.3, 0.1, 0.2), 1.0, 0.5));
  const auto x = random_vector(grid->size(), 5);
  std::vector<double> y1(x.size()), y2(x.size());
  K::serial::apply(op.stencil, x, y1);
  K::parallel::apply(op.stencil, x, y2);
  CHECK(y1 == y2);

  const auto f = K::factor_lines(op.stencil);
  std::vector<double> z1(x.size()), z2(x.size());
  K::serial::line_solve(f, x, z1);
  K::parallel::line_solve(f, x, z2);
  CHECK(z1 == z2);
}

TEST_CASE("line solve inverts the radial part of the stencil") {
  const auto grid = small_grid();
  const auto op = assemble_operator(grid, MetricModel::schwarzschild(1.0));
  const auto& s = op.stencil;
  const auto f = K::factor_lines(s);
  const auto r = random_vector(grid->size(), 6);
  std::vector<double> z(r.size());
  K::serial::line_solve(f, r, z);
  const int n = s.n_r;
  double worst = 0.0;
  for (std::size_t line = 0; line < grid->columns(); ++line)
    for (int i = 0; i < n; ++i) {
      const std::size_t c = line * n + i;
      double v = s.diag[c] * z[c];
      if (i > 0) v -= s.w_rm[c] * z[c - 1];
      if (i + 1 < n) v -= s.w_rp[c] * z[c + 1];
      worst = std::max(worst, std::abs(v - r[c]));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("assembled operator is symmetric") {
  const auto grid = small_grid();
  for (const auto& m : {MetricModel::euclidean(), MetricModel::bump(Vec3(1.0, 0.5, 0.75), 1.0, 0.5),
                        MetricModel::decay(0.3, 0.5, AngularPattern::Dipole)}) {
    const auto op = assemble_operator(grid, m);
    CHECK(op.asymmetry_norm() <= 1e-12 * op.stencil.diag[0]);
    // <Lx, y> = <x, Ly>
    const auto x = random_vector(grid->size(), 7), y = random_vector(grid->size(), 8);
    std::vector<double> lx(x.size()), ly(x.size());
    op.apply(x, lx);
    op.apply(y, ly);
    const double a = K::serial::dot(lx, y), b = K::serial::dot(x, ly);
    CHECK(a == doctest::Approx(b).epsilon(1e-11));
  }
}

TEST_CASE("potential kernel: serial equals parallel and the bound dominates") {
  const auto grid = small_grid();
  std::vector<Vec3> X(grid->size(), Vec3::Zero());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int j = 0; j < grid->n_theta(); ++j)
    for (int k = 0; k < grid->n_phi(); ++k)
      for (int i = 0; i < grid->n_r(); ++i)
        if (grid->r_centers()[i] > 0.1 && grid->r_centers()[i] < 2.0) X[grid->index(i, j, k)] = Vec3(u(rng), u(rng), u(rng));
  auto pot = newtonian_potential(*grid, X);

  std::vector<Vec3> targets;
  for (int n = 0; n < 300; ++n) targets.push_back(Vec3(u(rng), u(rng), u(rng)) * 20.0);
  std::vector<K::PotentialSample> a(targets.size()), b(targets.size());
  K::serial::potential(pot.sources, targets, a);
  K::parallel::potential(pot.sources, targets, b);
  for (std::size_t n = 0; n < targets.size(); ++n) {
    CHECK(a[n].w == b[n].w);
    CHECK(a[n].bound == b[n].bound);
    CHECK(std::abs(a[n].w) <= a[n].bound * (1.0 + 1e-12));
  }
}

TEST_CASE("thread count is positive") { CHECK(K::max_threads() >= 1); }
