#include "doctest.h"

#include "greenmass/asymptotic_expansion.hpp"
#include "greenmass/errors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>

using namespace greenmass;

namespace {

constexpr double kPi = std::numbers::pi;

const GreensSolution& solved(const MetricModel& m) {
  static std::map<std::string, GreensSolution> cache;
  auto it = cache.find(m.describe());
  if (it == cache.end()) {
    auto g = std::make_shared<const SphericalGrid>(GridSpec{});
    it = cache.emplace(m.describe(), solve_green(g, m)).first;
  }
  return it->second;
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)) * 180.0 / kPi;
}

}  // namespace

TEST_CASE("annulus lattice integrates polynomials in |y|") {
  const auto& lat = fit_lattice();
  double vol = 0.0, m2 = 0.0, first = 0.0;
  for (std::size_t n = 0; n < lat.y.size(); ++n) {
    vol += lat.w[n];
    m2 += lat.w[n] * lat.y[n].squaredNorm();
    first += lat.w[n] * lat.y[n].x();
  }
  CHECK(vol == doctest::Approx(84.0 * kPi).epsilon(1e-12));
  CHECK(lat.volume == doctest::Approx(84.0 * kPi).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(4.0 * kPi * (1024.0 - 1.0) / 5.0).epsilon(1e-10));
  CHECK(std::abs(first) <= 1e-10);
  CHECK_THROWS_AS(annulus_lattice(4, 4, 4, 2.0, 1.0), InvalidSpec);
}

TEST_CASE("interpolation is exact for a + b/r + c/r^2") {
  SphericalGrid g(GridSpec{});
  std::vector<double> f(g.size());
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k)
      for (int i = 0; i < g.n_r(); ++i) {
        const double r = g.r_centers()[i];
        f[g.index(i, j, k)] = 0.3 + 2.0 / r + 0.1 / (r * r);
      }
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> lr(std::log(0.1), std::log(500.0));
  for (int rep = 0; rep < 200; ++rep) {
    const Vec3 x = Vec3(n(rng), n(rng), n(rng)).normalized() * std::exp(lr(rng));
    const double r = x.norm();
    const auto st = interp_stencil(g, x);
    double wsum = 0.0;
    for (double w : st.w) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(interpolate(st, f) == doctest::Approx(0.3 + 2.0 / r + 0.1 / (r * r)).epsilon(1e-10));
  }
}

TEST_CASE("rescaled flat solution is 1/|y|") {
  const auto& s = solved(MetricModel::euclidean());
  for (double R : {8.0, 64.0}) {
    const auto a = rescale_to_annulus(s, R);
    for (std::size_t n = 0; n < a.u.size(); n += 97) {
      const Vec3 y = a.lattice->y[n];
      CHECK(a.u[n] == doctest::Approx(1.0 / y.norm()).epsilon(2e-3));
      CHECK((a.grad[n] + y / std::pow(y.norm(), 3)).norm() <= 2e-2 / y.squaredNorm());
    }
  }
  CHECK_THROWS_AS(rescale_to_annulus(s, 1e4), OutOfRange);
  CHECK_THROWS_AS(rescale_to_annulus(s, 0.1), OutOfRange);
}

TEST_CASE("fit recovers synthetic coefficients") {
  const auto& lat = fit_lattice();
  const double R = 16.0, c = 1.3, q = -0.4;
  const Vec3 d(0.2, -0.1, 0.5);
  std::vector<double> v(lat.y.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const Vec3 y = lat.y[n];
    const double r = y.norm();
    v[n] = c / r + q / (R * r * r) + d.dot(y) / (R * r * r * r);
  }
  const auto f = fit_values(lat, v, R);
  CHECK(f.c == doctest::Approx(c).epsilon(1e-10));
  CHECK(f.radial2 == doctest::Approx(q).epsilon(1e-9));
  CHECK((f.d - d).norm() <= 1e-9);
  CHECK(f.residual_l1 <= 1e-10);
  CHECK(f.condition < 1e6);
}

TEST_CASE("degenerate lattice raises IllConditionedFit") {
  AnnulusLattice lat;
  for (int n = 0; n < 10; ++n) {
    lat.y.push_back(Vec3(2.0, 0.0, 0.0));
    lat.w.push_back(1.0);
  }
  lat.volume = 10.0;
  std::vector<double> v(10, 0.5);
  CHECK_THROWS_AS(fit_values(lat, v, 8.0), IllConditionedFit);
}

TEST_CASE("annulus fits on radial models") {
  const auto fe = fit_annulus(rescale_to_annulus(solved(MetricModel::euclidean()), 32.0));
  CHECK(fe.c == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(fe.d.norm() <= 1e-3);

  const double m = 1.0;
  const auto fs = fit_annulus(rescale_to_annulus(solved(MetricModel::schwarzschild(m)), 32.0));
  CHECK(fs.c == doctest::Approx(1.0).epsilon(1e-3));
  // 1/(r + m/2) = 1/r - (m/2)/r^2 + ...
  CHECK(fs.radial2 == doctest::Approx(-0.5 * m).epsilon(5e-2));
  CHECK(fs.d.norm() <= 1e-3);
}

TEST_CASE("offset bump: dipole points along the offset") {
  const Vec3 centre(1.0, 0.5, 0.75);
  const auto& s = solved(MetricModel::bump(centre, 1.0, 0.5));
  const auto fit = fit_expansion(s, {8, 16, 32, 64});
  CHECK(fit.c == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(angle_deg(fit.d, centre) <= 5.0);
  CHECK(fit.series.size() == 4);
  CHECK_THROWS_AS(fit_expansion(s, {8, 16, 32}), PreconditionError);
}

TEST_CASE("potential of radial X has no dipole") {
  const auto pe = newtonian_potential(solved(MetricModel::euclidean()));
  CHECK(pe.x_l1 == 0.0);
  CHECK(pe.xbar.norm() == 0.0);
  const auto ps = newtonian_potential(solved(MetricModel::schwarzschild(1.0)));
  CHECK(ps.x_l1 > 0.0);
  CHECK(ps.xbar.norm() <= 1e-6 * ps.x_l1);
}

TEST_CASE("uniform X in a ball has an exact dipole far field") {
  SphericalGrid g(GridSpec{});
  std::vector<Vec3> X(g.size(), Vec3::Zero());
  const Vec3 e(0.0, 0.6, 0.8);
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k)
      for (int i = 0; i < g.n_r(); ++i)
        if (g.r_faces()[i + 1] <= 1.0) X[g.index(i, j, k)] = e;
  auto pot = newtonian_potential(g, X);
  // (1/4pi) e |B_1| on the faces inside r = 1
  const double rb = g.r_faces()[g.aligned_face(1.0)], ra = g.r_faces()[0];
  CHECK((pot.xbar - e * (rb * rb * rb - ra * ra * ra) / 3.0).norm() <= 1e-12);

  std::vector<Vec3> far{Vec3(20.0, 0.0, 0.0), Vec3(0.0, 15.0, 9.0), Vec3(-5.0, -30.0, 12.0)};
  const auto w = pot.evaluate(far);
  for (std::size_t n = 0; n < far.size(); ++n) {
    const double r = far[n].norm();
    const double ref = far[n].dot(pot.xbar) / (r * r * r);
    CHECK(w[n].w == doctest::Approx(ref).epsilon(1e-2).scale(pot.xbar.norm() / (r * r)));
    CHECK(std::abs(w[n].w) <= w[n].bound);
  }

  PotentialField serial = pot;
  serial.parallel = false;
  const auto ws = serial.evaluate(far);
  for (std::size_t n = 0; n < far.size(); ++n) CHECK(ws[n].w == w[n].w);
}

TEST_CASE("annulus error input checks and flat case") {
  const auto pe = newtonian_potential(solved(MetricModel::euclidean()));
  CHECK_THROWS_AS(annulus_error(pe, {8, 16}, 1.5), PreconditionError);
  CHECK_THROWS_AS(annulus_error(pe, {8, 16}, 0.9), PreconditionError);
  const auto rep = annulus_error(pe, {8, 16, 32}, 1.0);
  for (double v : rep.value) CHECK(v == 0.0);
  CHECK(rep.decreasing);
}

TEST_CASE("harmonic remainder on flat space") {
  const auto& s = solved(MetricModel::euclidean());
  const auto pot = newtonian_potential(s);
  const auto rep = harmonic_remainder(s, pot, {8, 32});
  REQUIRE(rep.points.size() == 2);
  for (const auto& p : rep.points) {
    CHECK(p.c == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p.b.norm() <= 1e-3);
    CHECK(p.closure <= 1e-3);
  }
}

TEST_CASE("inversion counting") {
  CHECK(count_inversions({3.0, 2.0, 1.0}) == 0);
  CHECK(count_inversions({3.0, 2.0, 2.5, 1.0}) == 1);
  CHECK(count_inversions({3.0, 3.0, 1.0}) == 1);
  CHECK(count_inversions({0.0, 0.0, 0.0}) == 0);
}
