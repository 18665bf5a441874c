#include "doctest.h"

#include "greenmass/errors.hpp"
#include "greenmass/linearization.hpp"
#include "greenmass/mass_functionals.hpp"

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

// composite Simpson moments of the raw bump, normalised here: K_n = int psi/(1+s)^n
struct Moments {
  double mass, k1, k2, k3;
};

Moments bump_moments(double s0) {
  const int n = 200000;
  const double a = s0, b = 1.0 - s0, h = (b - a) / n;
  double m[4] = {0, 0, 0, 0};
  for (int i = 0; i <= n; ++i) {
    const double s = a + i * h;
    const double q = (s - a) * (b - s);
    const double f = q > 0.0 ? std::exp(-1.0 / q) : 0.0;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int p = 0; p < 4; ++p) m[p] += w * f / std::pow(1.0 + s, p);
  }
  for (double& v : m) v *= h / 3.0;
  return {m[0], m[1] / m[0], m[2] / m[0], m[3] / m[0]};
}

// Schwarzschild with u = 1/(r + m/2): F = 8 pi m - 3 pi m^2/t integrates to these
double schwarzschild_E(double m, double a, double s) {
  const double A = a + s;
  return 3.0 * kPi * m / (A * A) - 7.0 * kPi * m * m / (8.0 * A * A * A);
}

double schwarzschild_D(double m, double a, const Moments& k) {
  return 3.0 * kPi * m * k.k2 / a - 7.0 * kPi * m * m * k.k3 / (8.0 * a * a);
}

}  // namespace

TEST_CASE("bump profile constants") {
  const BumpProfile psi;
  const auto k = bump_moments(psi.s0());
  CHECK(psi.norm() * k.mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(psi.c_psi() == doctest::Approx(2.0 * kPi * k.k1).epsilon(1e-10));
  CHECK(psi.c_psi() > kPi);
  CHECK(psi.c_psi() < 2.0 * kPi);
  CHECK(psi.k2() == doctest::Approx(k.k2).epsilon(1e-10));
  CHECK(kMassCalibration == doctest::Approx(3.0 * kPi * k.k2).epsilon(1e-10));
  CHECK(psi.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi.psi(0.01) == 0.0);
  CHECK(psi.psi(0.99) == 0.0);
  CHECK(psi.psi(0.5) > 0.0);
  CHECK_THROWS_AS(BumpProfile(0.3), InvalidSpec);
  CHECK_THROWS_AS(BumpProfile(0.0), InvalidSpec);
}

TEST_CASE("bump derivative matches a centred difference") {
  const BumpProfile psi;
  for (double s : {0.2, 0.4, 0.6, 0.8}) {
    const double h = 1e-6;
    CHECK(psi.dpsi(s) == doctest::Approx((psi.psi(s + h) - psi.psi(s - h)) / (2 * h)).epsilon(1e-6));
  }
  for (double t : {0.3, 0.45, 0.6}) {
    const double h = 1e-6;
    CHECK(psi.dphi(t) == doctest::Approx((psi.phi(t + h) - psi.phi(t - h)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("F vanishes on flat space") {
  const LevelSetGeometry geo(solved(MetricModel::euclidean()));
  for (double t : {2.0, 8.0, 32.0}) {
    const auto f = F_of_t(geo, t);
    CHECK(std::abs(f.F) <= 1e-6 * 4.0 * kPi * t);
    CHECK(std::abs(f.F_surface) <= 1e-2 * 4.0 * kPi * t);
  }
}

TEST_CASE("F on schwarzschild is 8 pi m - 3 pi m^2 / t") {
  for (double m : {0.5, 1.0}) {
    const LevelSetGeometry geo(solved(MetricModel::schwarzschild(m)));
    for (double t : {4.0, 8.0, 16.0, 48.0}) {
      const double ref = 8.0 * kPi * m - 3.0 * kPi * m * m / t;
      CHECK(F_of_t(geo, t).F == doctest::Approx(ref).epsilon(5e-3));
    }
  }
}

TEST_CASE("E: flux form, quadrature and closed form agree") {
  const double m = 1.0;
  const LevelSetGeometry geo(solved(MetricModel::schwarzschild(m)));
  for (auto [a, s] : {std::pair{4.0, 1.0}, std::pair{8.0, 8.0}, std::pair{16.0, 4.0}}) {
    const auto e = E_of(geo, a, s);
    const double ref = schwarzschild_E(m, a, s);
    CHECK(e.quadrature == doctest::Approx(ref).epsilon(1e-2));
    CHECK(e.flux_form == doctest::Approx(ref).epsilon(1e-2));
  }
  const LevelSetGeometry flat(solved(MetricModel::euclidean()));
  const auto e = E_of(flat, 4.0, 2.0);
  CHECK(std::abs(e.flux_form) <= 1e-3 * 2.0 * kPi / 6.0);
  CHECK_THROWS_AS(E_of(flat, 4.0, 5.0), ValidationError);
}

TEST_CASE("D on schwarzschild matches its closed form") {
  const BumpProfile psi;
  const auto k = bump_moments(psi.s0());
  for (double m : {0.5, 2.0}) {
    const LevelSetGeometry geo(solved(MetricModel::schwarzschild(m)));
    for (double a : {4.0, 16.0}) {
      const double ref = schwarzschild_D(m, a, k);
      CHECK(radial_D_oracle(geo.solution().model, a, psi) == doctest::Approx(ref).epsilon(1e-9));
      DOptions o;
      o.tolerance = 1e-2;
      const auto d = D_of(geo, a, psi, o);
      CHECK(d.D == doctest::Approx(ref).epsilon(1e-2));
      CHECK(d.s_quadrature == doctest::Approx(ref).epsilon(2e-2));
    }
  }
}

TEST_CASE("D vanishes on flat space for every a") {
  const BumpProfile psi;
  const LevelSetGeometry geo(solved(MetricModel::euclidean()));
  for (double a : {4.0, 16.0, 64.0}) CHECK(std::abs(D_of(geo, a, psi).D) <= 1e-3 * psi.c_psi() / a);
  CHECK(radial_D_oracle(MetricModel::euclidean(), 8.0, psi) == doctest::Approx(0.0).scale(psi.c_psi()).epsilon(1e-10));
}

TEST_CASE("D cross-check raises InconsistentForms when the tolerance is absurd") {
  const BumpProfile psi;
  const LevelSetGeometry geo(solved(MetricModel::schwarzschild(1.0)));
  DOptions o;
  o.tolerance = 1e-12;
  CHECK_THROWS_AS(D_of(geo, 8.0, psi, o), InconsistentForms);
  CHECK_THROWS_AS(radial_D_oracle(MetricModel::decay(0.3, 0.5, AngularPattern::Dipole), 8.0, psi), UnsupportedModel);
}

TEST_CASE("series verdicts on schwarzschild") {
  const BumpProfile psi;
  const LevelSetGeometry geo(solved(MetricModel::schwarzschild(1.0)));
  SeriesOptions o;
  o.d.tolerance = 1e-2;
  const auto F = F_series(geo, {2, 4, 8, 16, 32}, o);
  CHECK(F.F_monotone == Verdict::Pass);
  CHECK(F.F_nonnegative == Verdict::Pass);
  const auto D = aD_series(geo, {4, 8, 16, 32, 64}, psi, o);
  CHECK(D.aD_monotone == Verdict::Pass);
  CHECK(D.D_nonnegative == Verdict::Pass);
  CHECK(D.violations.empty());
  CHECK(D.limit / kMassCalibration == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(D.uncertainty < 0.05);
}

TEST_CASE("indefinite curvature gives no verdicts but still completes") {
  const BumpProfile psi;
  const LevelSetGeometry geo(solved(MetricModel::decay(0.3, 0.5, AngularPattern::Dipole)));
  SeriesOptions o;
  o.d.tolerance = 1e-2;
  const auto F = F_series(geo, {2, 4, 8, 16}, o);
  CHECK_FALSE(F.hypothesis_R_nonnegative);
  CHECK(F.F_monotone == Verdict::NotApplicable);
  CHECK(F.F.size() == 4);
}

TEST_CASE("a grid validation") {
  CHECK_NOTHROW(validate_a_grid({4, 8, 16}));
  CHECK_NOTHROW(validate_a_grid({2, 6, 18}));
  CHECK_THROWS_AS(validate_a_grid({}), InvalidSpec);
  CHECK_THROWS_AS(validate_a_grid({4, 5, 6.25}), InvalidSpec);
  CHECK_THROWS_AS(validate_a_grid({4, 8, 20}), InvalidSpec);
  CHECK_THROWS_AS(validate_a_grid({-1, -2}), InvalidSpec);
}

TEST_CASE("D functional vanishes at the flat reference") {
  const BumpProfile psi;
  const double d = D_functional([](const Vec3&) -> Mat3 { return Mat3::Identity(); },
                                [](const Vec3& y) { return 1.0 / y.norm(); },
                                [](const Vec3& y) -> Vec3 { return -y / std::pow(y.norm(), 3); }, psi);
  CHECK(std::abs(d) <= 1e-9 * psi.c_psi());
}

TEST_CASE("Frechet term is linear and kills dipoles") {
  const BumpProfile psi;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 5; ++rep) {
    const Vec3 d(n(rng), n(rng), n(rng));
    LinearizationInput in{[](const Vec3&) -> Mat3 { return Mat3::Zero(); },
                          [d](const Vec3& y) { return d.dot(y) / std::pow(y.norm(), 3); },
                          [d](const Vec3& y) -> Vec3 {
                            const double r = y.norm();
                            return d / std::pow(r, 3) - 3.0 * d.dot(y) * y / std::pow(r, 5);
                          }};
    CHECK(std::abs(frechet_term(in, psi)) <= 1e-10 * d.norm());
  }
  auto k = [](const Vec3& y) -> Mat3 {
    Mat3 m = Mat3::Identity() * std::exp(-y.squaredNorm());
    m(0, 1) = m(1, 0) = 0.3 * y.x() * y.y() / (1.0 + y.squaredNorm());
    return m;
  };
  auto v = [](const Vec3& y) { return std::sin(y.x()) / (1.0 + y.squaredNorm()); };
  auto gv = [](const Vec3& y) -> Vec3 {
    const double q = 1.0 + y.squaredNorm();
    return Vec3(std::cos(y.x()) / q, 0.0, 0.0) - 2.0 * std::sin(y.x()) / (q * q) * y;
  };
  const double L1 = frechet_term({k, v, gv}, psi);
  const double L2 = frechet_term({[&](const Vec3& y) -> Mat3 { return 2.5 * k(y); },
                                  [&](const Vec3& y) { return 2.5 * v(y); },
                                  [&](const Vec3& y) -> Vec3 { return 2.5 * gv(y); }},
                                 psi);
  CHECK(L2 == doctest::Approx(2.5 * L1).epsilon(1e-10));
  CHECK(std::abs(L1) > 0.0);
}

TEST_CASE("Frechet term rejects unbounded input") {
  const BumpProfile psi;
  LinearizationInput big{[](const Vec3&) -> Mat3 { return 1e4 * Mat3::Identity(); },
                         [](const Vec3&) { return 0.0; }, [](const Vec3&) -> Vec3 { return Vec3::Zero(); }};
  CHECK_THROWS_AS(frechet_term(big, psi), UnboundedInput);
  LinearizationInput nan{[](const Vec3&) -> Mat3 { return Mat3::Zero(); },
                         [](const Vec3&) { return std::nan(""); }, [](const Vec3&) -> Vec3 { return Vec3::Zero(); }};
  CHECK_THROWS_AS(frechet_term(nan, psi), UnboundedInput);
}

TEST_CASE("cubic remainder lemma") {
  const auto rep = cubic_lemma_check(100000, 99);
  CHECK(rep.samples == 100000);
  CHECK(rep.max_ratio <= 4.0);
  CHECK(rep.y_zero_residual == 0.0);
  CHECK(rep.x_zero_max_ratio <= 1.0 + 1e-12);
  // X = 0: ratio is exactly |Y|^3 / |Y|^3
  CHECK(cubic_lemma_ratio(Vec3::Zero(), Vec3(1.0, 2.0, -0.5)) == doctest::Approx(1.0).epsilon(1e-14));
}
