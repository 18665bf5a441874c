#include "doctest.h"

#include "greenmass/errors.hpp"
#include "greenmass/metric_models.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace greenmass;

namespace {

std::vector<MetricModel> all_models() {
  return {MetricModel::euclidean(),
          MetricModel::schwarzschild(1.0),
          MetricModel::schwarzschild(0.5),
          MetricModel::bump(Vec3(1.0, 0.5, 0.75), 1.0, 0.5),
          MetricModel::bump(Vec3::Zero(), 2.0, 0.3),
          MetricModel::decay(0.3, 0.5, AngularPattern::Dipole),
          MetricModel::decay(0.5, 1.0, AngularPattern::Quadrupole),
          MetricModel::decay(0.2, 0.25, AngularPattern::Isotropic)};
}

Vec3 random_point(std::mt19937_64& rng, double r_lo, double r_hi) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(std::log(r_lo), std::log(r_hi));
  Vec3 d(n(rng), n(rng), n(rng));
  return d.normalized() * std::exp(u(rng));
}

}  // namespace

TEST_CASE("euclidean metric is the identity") {
  const auto m = MetricModel::euclidean();
  const Vec3 x(1.0, 2.0, 3.0);
  CHECK((m.metric(x) - Mat3::Identity()).norm() == 0.0);
  const auto c = m.conductivity(x);
  CHECK((c.A - Mat3::Identity()).norm() == 0.0);
  CHECK(c.B.norm() == 0.0);
  CHECK(m.scalar_curvature(x) == 0.0);
  CHECK(std::isinf(m.tau()));
}

TEST_CASE("schwarzschild metric at r = 2 with m = 1") {
  const auto m = MetricModel::schwarzschild(1.0);
  const Vec3 x(0.0, 0.0, 2.0);
  // (1 + 1/4)^4 by hand
  const double phi4 = 1.25 * 1.25 * 1.25 * 1.25;
  CHECK(phi4 == doctest::Approx(2.44140625).epsilon(1e-15));
  CHECK((m.metric(x) - phi4 * Mat3::Identity()).norm() <= 1e-14);
  const auto c = m.conductivity(x);
  CHECK((c.A - 1.5625 * Mat3::Identity()).norm() <= 1e-14);
  CHECK((c.A + c.B - Mat3::Identity()).norm() <= 1e-14);
  CHECK(std::abs(m.scalar_curvature(x)) <= 1e-12);
  REQUIRE(m.adm_mass_hint().has_value());
  CHECK(*m.adm_mass_hint() == 1.0);
}

TEST_CASE("conductivity splits as A + B = I everywhere") {
  std::mt19937_64 rng(11);
  for (const auto& m : all_models())
    for (int n = 0; n < 200; ++n) {
      const Vec3 x = random_point(rng, 1.0 / 32.0, 2048.0);
      const auto c = m.conductivity(x);
      CHECK((c.A + c.B - Mat3::Identity()).norm() <= 1e-13);
      CHECK((c.A - c.A.transpose()).norm() == 0.0);
      CHECK(c.A(0, 0) == doctest::Approx(m.conductivity_scalar(x)).epsilon(1e-14));
    }
}

TEST_CASE("metric is symmetric and inverse is consistent") {
  std::mt19937_64 rng(12);
  for (const auto& m : all_models())
    for (int n = 0; n < 100; ++n) {
      const Vec3 x = random_point(rng, 0.05, 500.0);
      const Mat3 g = m.metric(x);
      CHECK((g - g.transpose()).norm() == 0.0);
      CHECK((g * m.metric_inverse(x) - Mat3::Identity()).norm() <= 1e-13);
    }
}

TEST_CASE("uniform ellipticity holds at random points") {
  std::mt19937_64 rng(13);
  const double r_min = 1.0 / 32.0;
  for (const auto& m : all_models()) {
    const double lam = m.ellipticity(r_min);
    REQUIRE(lam >= 1.0);
    for (int n = 0; n < 1000; ++n) {
      const Vec3 x = random_point(rng, r_min, 2048.0);
      Eigen::SelfAdjointEigenSolver<Mat3> es(m.conductivity(x).A);
      CHECK(es.eigenvalues().minCoeff() >= 1.0 / lam * (1.0 - 1e-12));
      CHECK(es.eigenvalues().maxCoeff() <= lam * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("scalar curvature matches -8 phi^-5 lap phi by finite differences") {
  std::mt19937_64 rng(14);
  const double h0 = 1e-3;
  for (const auto& m : all_models())
    for (int n = 0; n < 50; ++n) {
      const Vec3 x = random_point(rng, 0.5, 20.0);
      // step relative to the distance from the Schwarzschild pole
      const double h = h0 * std::min(1.0, x.norm());
      const double phi = m.conformal_factor(x);
      const double lap = fd_laplacian([&](const Vec3& y) { return m.conformal_factor(y); }, x, h);
      const double fd = -8.0 * lap / std::pow(phi, 5);
      const double R = m.scalar_curvature(x);
      CHECK(std::abs(R - fd) <= 10.0 * h0 * h0 * std::max(1.0, std::abs(R)));
    }
}

TEST_CASE("bump curvature at its centre") {
  const Vec3 c(1.0, 0.5, 0.75);
  const auto m = MetricModel::bump(c, 1.0, 0.5);
  const double R = m.scalar_curvature(c);
  CHECK(R > 0.0);
  const double lap = fd_laplacian([&](const Vec3& y) { return m.conformal_factor(y); }, c, 1e-4);
  CHECK(R == doctest::Approx(-8.0 * lap / std::pow(m.conformal_factor(c), 5)).epsilon(1e-6));
  CHECK(m.curvature_nonnegative());
}

TEST_CASE("decay model stays within its stated rate") {
  const double eps = 0.3, tau = 0.5;
  const auto m = MetricModel::decay(eps, tau, AngularPattern::Dipole);
  std::vector<double> radii;
  for (double r = 1.0; r <= 4096.0; r *= 2.0) radii.push_back(r);
  const auto rep = decay_report(m, radii);
  for (double v : rep) CHECK(v <= eps * (1.0 + 1e-12));
  CHECK(m.tau() == tau);

  std::mt19937_64 rng(15);
  for (int n = 0; n < 500; ++n) {
    const Vec3 x = random_point(rng, 1.0, 2048.0);
    const double r = x.norm();
    const double b = m.conductivity(x).B.norm() / std::sqrt(3.0);
    CHECK(b * std::pow(r, 1.0 + tau) <= eps * (1.0 + 1e-12));
  }
}

TEST_CASE("schwarzschild decay report approaches 2m with tau = 0") {
  const double mass = 1.0;
  const auto m = MetricModel::schwarzschild(mass);
  const std::vector<double> radii{1e4};
  const auto rep = decay_report(m, radii, 0.0);
  // r (phi^4 - 1) = 2m + 3m^2/(2r) + ...
  CHECK(rep[0] == doctest::Approx(2.0 * mass + 1.5 * mass * mass / 1e4).epsilon(1e-6));
  const auto flat = decay_report(MetricModel::euclidean(), radii);
  CHECK(flat[0] == 0.0);
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS(MetricModel::decay(1.0, 0.5, AngularPattern::Dipole), NonPositiveDefinite);
  CHECK_THROWS_AS(MetricModel::decay(-1.5, 0.5, AngularPattern::Dipole), NonPositiveDefinite);
  CHECK_THROWS_AS(MetricModel::decay(0.3, 0.0, AngularPattern::Dipole), NonPositiveDefinite);
  CHECK_THROWS_AS(MetricModel::schwarzschild(-1.0), NonPositiveDefinite);
  CHECK_THROWS_AS(MetricModel::bump(Vec3::Zero(), 1.0, 0.0), NonPositiveDefinite);
  CHECK_THROWS_AS(model_from_keys({{"kind", "kerr"}}), ValidationError);
  CHECK_THROWS_AS(model_from_keys({{"kind", "schwarzschild"}, {"m", "abc"}}), ValidationError);
}

TEST_CASE("describe round trips through the parser") {
  for (const auto& m : all_models()) {
    const auto back = parse_model_description(m.describe());
    CHECK(back.describe() == m.describe());
    CHECK(back.hash() == m.hash());
  }
  CHECK(MetricModel::schwarzschild(1.0).hash() != MetricModel::schwarzschild(2.0).hash());
}

TEST_CASE("cube directions are 26 distinct unit vectors") {
  const auto& d = cube_directions();
  REQUIRE(d.size() == 26);
  for (std::size_t a = 0; a < d.size(); ++a) {
    CHECK(d[a].norm() == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t b = a + 1; b < d.size(); ++b) CHECK((d[a] - d[b]).norm() > 0.1);
  }
}
