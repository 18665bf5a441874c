#include "greenmass/verify.hpp"

#include "greenmass/asymptotic_expansion.hpp"
#include "greenmass/errors.hpp"
#include "greenmass/linearization.hpp"
#include "greenmass/mass_functionals.hpp"
#include "greenmass/pipeline.hpp"
#include "greenmass/report_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include <unistd.h>

namespace greenmass {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<double> kLevels{2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
const std::vector<double> kAGrid{4, 8, 16, 32, 64};
const std::vector<double> kRList{8, 16, 32, 64, 128};

MetricModel offset_bump() { return MetricModel::bump(Vec3(1.0, 0.5, 0.75), 1.0, 0.5); }

// solves are shared between checks within one process
const GreensSolution& solved(const MetricModel& m, const GridSpec& g, bool normalize) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<GreensSolution>> cache;
  const std::string key = m.describe() + "|" + g.describe() + "|" + (normalize ? "1" : "0");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) {
    SolverOptions so;
    so.normalize_flux = normalize;
    slot = std::make_unique<GreensSolution>(solve_green(std::make_shared<const SphericalGrid>(g), m, so));
  }
  return *slot;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

template <class F>
CriterionResult timed(const std::string& name, double tol, F&& body) {
  CriterionResult r;
  r.name = name;
  r.tolerance = tol;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

CriterionResult check_flat_rigidity(const VerifyOptions& o) {
  return timed("flat rigidity: |F| <= 1e-2 4 pi t, |aD| <= 1e-3 c_psi", 1.0, [&](CriterionResult& r) {
    const LevelSetGeometry geo(solved(MetricModel::euclidean(), o.grid, o.normalize_flux));
    const BumpProfile psi;
    double wf = 0.0, wd = 0.0;
    for (double t : kLevels) wf = std::max(wf, std::abs(F_of_t(geo, t).F) / (1e-2 * 4.0 * kPi * t));
    for (double a : {4.0, 8.0, 16.0, 32.0}) {
      DOptions d;
      d.cross_check = false;
      wd = std::max(wd, std::abs(D_of(geo, a, psi, d).aD()) / (1e-3 * psi.c_psi()));
    }
    r.measured = std::max(wf, wd);
    r.pass = r.measured <= 1.0;
    r.detail = fmt("worst F ratio %.3g, worst aD ratio %.3g (1 = at tolerance)", wf, wd);
  });
}

CriterionResult check_oracle_equivalence(const VerifyOptions& o) {
  return timed("oracle equivalence: Schwarzschild m=1 within 1%, >= x1.8 on doubling", 0.01, [&](CriterionResult& r) {
    const MetricModel m = MetricModel::schwarzschild(1.0);
    GridSpec fine = o.grid;
    fine.n_r *= 2;
    fine.n_theta *= 2;
    fine.n_phi *= 2;
    const double e1 = oracle_error(solved(m, o.grid, o.normalize_flux), 1.0, o.grid.r_max / 8.0);
    const double e2 = oracle_error(solved(m, fine, o.normalize_flux), 1.0, fine.r_max / 8.0);
    r.measured = e1;
    r.pass = e1 <= 0.01 && e1 / e2 >= 1.8;
    r.detail = fmt("error %.3e -> %.3e, ratio %.2f", e1, e2, e1 / e2);
  });
}

CriterionResult check_monotonicity(const VerifyOptions& o) {
  return timed("monotonicity: F and aD non-decreasing, D >= 0", 1e-3, [&](CriterionResult& r) {
    const BumpProfile psi;
    SeriesOptions so;
    so.d.cross_check = false;
    double worst = 0.0;
    bool ok = true;
    std::string detail;
    const std::vector<std::pair<std::string, MetricModel>> models{{"m=0.5", MetricModel::schwarzschild(0.5)},
                                                                  {"m=1", MetricModel::schwarzschild(1.0)},
                                                                  {"m=2", MetricModel::schwarzschild(2.0)},
                                                                  {"bump", offset_bump()}};
    for (const auto& [label, m] : models) {
      const LevelSetGeometry geo(solved(m, o.grid, o.normalize_flux));
      const FunctionalSeries f = F_series(geo, kLevels, so);
      const FunctionalSeries d = aD_series(geo, kAGrid, psi, so);
      for (std::size_t i = 1; i < f.F.size(); ++i)
        worst = std::max(worst, (f.F[i - 1].F - f.F[i].F) / (1.0 + std::abs(f.F[i].F)));
      for (std::size_t i = 1; i < d.D.size(); ++i)
        worst = std::max(worst, (d.D[i - 1].aD() - d.D[i].aD()) / std::max(std::abs(d.D[i].aD()), psi.c_psi()));
      for (const auto& v : d.D) worst = std::max(worst, -v.D / psi.c_psi());
      ok = ok && f.F_monotone == Verdict::Pass && d.aD_monotone == Verdict::Pass && d.D_nonnegative == Verdict::Pass &&
           f.F.size() >= 8 && d.D.size() >= 4;
      detail += label + (f.F_monotone == Verdict::Pass && d.aD_monotone == Verdict::Pass ? " ok; " : " VIOLATED; ");
    }
    r.measured = worst;
    r.pass = ok && worst <= 1e-3;
    r.detail = detail + fmt("worst normalised drop %.2e over %g levels", worst, static_cast<double>(kLevels.size()));
  });
}

CriterionResult check_mass_proportionality(const VerifyOptions& o) {
  return timed("mass proportionality: lim aD / m constant and equal to the 1D oracle", 0.02, [&](CriterionResult& r) {
    const BumpProfile psi;
    SeriesOptions so;
    so.d.cross_check = false;
    std::vector<double> ratio;
    for (double m : {0.5, 1.0, 2.0}) {
      const LevelSetGeometry geo(solved(MetricModel::schwarzschild(m), o.grid, o.normalize_flux));
      ratio.push_back(aD_series(geo, kAGrid, psi, so).limit / m);
    }
    const double big = 65536.0;
    const double oracle = big * radial_D_oracle(MetricModel::schwarzschild(1.0), big, psi);
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    const double spread = (*hi - *lo) / (0.5 * (*hi + *lo));
    double off = 0.0;
    for (double q : ratio) off = std::max(off, std::abs(q / oracle - 1.0));
    r.measured = std::max(spread, off);
    r.pass = r.measured <= 0.02;
    r.detail = fmt("ratios %.5f %.5f %.5f", ratio[0], ratio[1], ratio[2]) +
               fmt(", oracle %.6f, spread %.2e", oracle, spread);
  });
}

CriterionResult check_identities(const VerifyOptions& o) {
  return timed("identities: E flux form vs quadrature 1%, ac-gradient 2%", 1.0, [&](CriterionResult& r) {
    const std::vector<std::pair<double, double>> as{{4, 1}, {4, 4}, {8, 2}, {8, 8}, {16, 4}};
    double we = 0.0, wa = 0.0;
    for (double mass : {0.0, 1.0}) {
      const MetricModel m = mass == 0.0 ? MetricModel::euclidean() : MetricModel::schwarzschild(mass);
      const LevelSetGeometry geo(solved(m, o.grid, o.normalize_flux));
      for (const auto& [a, s] : as) {
        const EValue e = E_of(geo, a, s);
        const double scale = mass == 0.0 ? 1e-3 * 2.0 * kPi / (a + s) : 1e-2 * std::abs(e.quadrature);
        const double flat = mass == 0.0 ? std::max(std::abs(e.quadrature), std::abs(e.flux_form)) : 0.0;
        we = std::max({we, e.discrepancy / scale, flat / scale});
      }
      for (double t : {3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0}) {
        const double h = 0.02 * t;
        const double d = (geo.surface_integrals(t + h).int_gradu_sq - geo.surface_integrals(t - h).int_gradu_sq) / (2 * h);
        const double rhs = -geo.surface_integrals(t).int_H_gradu / (t * t);
        wa = std::max(wa, std::abs(d - rhs) / (0.02 * std::abs(rhs)));
      }
    }
    r.measured = std::max(we, wa);
    r.pass = r.measured <= 1.0;
    r.detail = fmt("worst E ratio %.3g, worst ac-gradient ratio %.3g (1 = at tolerance)", we, wa);
  });
}

CriterionResult check_fitted_c(const VerifyOptions& o) {
  return timed("fitted c = 1 on flux-normalised runs", 0.01, [&](CriterionResult& r) {
    const std::vector<MetricModel> models{MetricModel::euclidean(), MetricModel::schwarzschild(0.5),
                                          MetricModel::schwarzschild(1.0), MetricModel::schwarzschild(2.0),
                                          offset_bump(), MetricModel::decay(0.3, 0.5, AngularPattern::Dipole)};
    double worst = 0.0;
    for (const auto& m : models) worst = std::max(worst, std::abs(fit_expansion(solved(m, o.grid, o.normalize_flux), kRList).c - 1.0));
    r.measured = worst;
    r.pass = worst <= 0.01;
    r.detail = fmt("max |c - 1| = %.3e over 6 models", worst);
  });
}

CriterionResult check_annulus_decay(const VerifyOptions& o) {
  return timed("annulus error decreasing on a decay tau=0.5 model", 1.0, [&](CriterionResult& r) {
    const auto& s = solved(MetricModel::decay(0.3, 0.5, AngularPattern::Dipole), o.grid, o.normalize_flux);
    const AnnulusErrorReport e = annulus_error(newtonian_potential(s), kRList, 1.0);
    r.measured = e.inversions;
    r.pass = e.decreasing && e.R.size() >= 4;
    r.detail = fmt("errors R=8: %.3e, R=128: %.3e, inversions %g", e.value.front(), e.value.back(), e.inversions);
  });
}

CriterionResult check_closure(const VerifyOptions& o) {
  return timed("closure |d - (b + xbar)| <= 2% on the offset bump", 0.02, [&](CriterionResult& r) {
    const auto& s = solved(offset_bump(), o.grid, o.normalize_flux);
    const HarmonicRemainderReport h = harmonic_remainder(s, newtonian_potential(s), {128.0});
    const RemainderPoint& p = h.points.back();
    const double scale = std::max(p.d.norm(), 1e-3);
    r.measured = p.closure / scale;
    const double angle = std::acos(std::clamp(p.d.normalized().dot(Vec3(1.0, 0.5, 0.75).normalized()), -1.0, 1.0));
    r.pass = r.measured <= 0.02 && angle * 180.0 / kPi <= 5.0;
    r.detail = fmt("closure %.3e, |d| %.4f, angle to offset %.2f deg", p.closure, p.d.norm(), angle * 180.0 / kPi);
  });
}

CriterionResult check_frechet_dipole(const VerifyOptions&) {
  return timed("L(0, <d,y>/|y|^3) = 0 for 20 random d", 1e-8, [&](CriterionResult& r) {
    const BumpProfile psi;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vec3 d(U(rng), U(rng), U(rng));
      LinearizationInput in;
      in.v = [d](const Vec3& y) { return d.dot(y) / std::pow(y.norm(), 3); };
      in.grad_v = [d](const Vec3& y) {
        const double n = y.norm();
        return Vec3(d / std::pow(n, 3) - 3.0 * d.dot(y) * y / std::pow(n, 5));
      };
      worst = std::max(worst, std::abs(frechet_term(in, psi)));
    }
    r.measured = worst;
    r.pass = worst <= 1e-8;
    r.detail = fmt("max |L| = %.3e", worst);
  });
}

CriterionResult check_frechet_convergence(const VerifyOptions&) {
  return timed("Frechet term vs finite differences of the D functional, first order", 0.3, [&](CriterionResult& r) {
    const BumpProfile psi;
    const TensorField k = [](const Vec3& y) {
      Mat3 m;
      m << 1.0 + y.x() * y.x() / 16.0, y.x() * y.y() / 16.0, 0.1 * y.z(), y.x() * y.y() / 16.0, 0.5 - y.z() / 8.0,
          0.0, 0.1 * y.z(), 0.0, 0.25 + y.y() * y.y() / 32.0;
      return m;
    };
    const ScalarField v = [](const Vec3& y) { return std::exp(-std::pow(y.norm() - 2.5, 2)); };
    const VectorField gv = [](const Vec3& y) {
      const double n = y.norm();
      return Vec3(-2.0 * (n - 2.5) * std::exp(-std::pow(n - 2.5, 2)) * y / n);
    };
    const ScalarField rho = [](const Vec3& y) { return 1.0 / y.norm(); };
    const VectorField grho = [](const Vec3& y) { return Vec3(-y / std::pow(y.norm(), 3)); };
    const TensorField flat = [](const Vec3&) { return Mat3::Identity(); };
    const double D0 = D_functional(flat, rho, grho, psi);
    LinearizationInput ink;
    ink.k = k;
    LinearizationInput inv;
    inv.v = v;
    inv.grad_v = gv;
    const double Lk = frechet_term(ink, psi), Lv = frechet_term(inv, psi);
    double worst = 0.0;
    std::string detail;
    for (int slot = 0; slot < 2; ++slot) {
      std::vector<double> err;
      for (double h : {4e-2, 2e-2, 1e-2, 5e-3}) {
        double Dh;
        if (slot == 0)
          Dh = D_functional([&](const Vec3& y) { return Mat3(Mat3::Identity() + h * k(y)); }, rho, grho, psi);
        else
          Dh = D_functional(flat, [&](const Vec3& y) { return rho(y) + h * v(y); },
                            [&](const Vec3& y) { return Vec3(grho(y) + h * gv(y)); }, psi);
        err.push_back(std::abs((Dh - D0) / h - (slot == 0 ? Lk : Lv)));
      }
      for (std::size_t i = 1; i < err.size(); ++i) worst = std::max(worst, std::abs(err[i - 1] / err[i] - 2.0) / 2.0);
      detail += fmt(slot == 0 ? "k slot L=%.4f err %.2e -> %.2e; " : "v slot L=%.4f err %.2e -> %.2e", slot == 0 ? Lk : Lv,
                    err.front(), err.back());
    }
    r.measured = worst;
    r.pass = worst <= 0.3;
    r.detail = detail + fmt(", worst deviation of halving ratio from 2: %.1f%%", 100 * worst);
  });
}

CriterionResult check_cubic_lemma(const VerifyOptions&) {
  return timed("cubic lemma ratio bounded over 1e6 random pairs", 4.0, [&](CriterionResult& r) {
    const CubicLemmaReport c = cubic_lemma_check();
    r.measured = c.max_ratio;
    r.pass = c.max_ratio <= 4.0 && c.y_zero_residual == 0.0 && c.x_zero_max_ratio <= 1.0 + 1e-12;
    r.detail = fmt("max ratio %.6f over %g pairs, Y=0 residual %g", c.max_ratio, static_cast<double>(c.samples),
                   c.y_zero_residual);
  });
}

CriterionResult check_determinism(const VerifyOptions& o) {
  return timed("determinism: two runs give bit-identical CSVs", 0.0, [&](CriterionResult& r) {
    fs::path base = o.scratch.empty() ? fs::temp_directory_path() / ("greenmass_det_" + std::to_string(::getpid()))
                                      : o.scratch;
    fs::remove_all(base);
    std::string text = "[model]\nkind = bump\ncenter = 1, 0.5, 0.75\namplitude = 1\nwidth = 0.5\n[grid]\nn_r = " +
                       std::to_string(o.grid.n_r) + "\nn_theta = " + std::to_string(o.grid.n_theta) +
                       "\nn_phi = " + std::to_string(o.grid.n_phi) + "\n[functionals]\na_grid = 4, 8, 16\n";
    const RunConfig cfg = parse_config(text);
    const RunManifest m1 = run_pipeline(cfg, base / "first");
    const RunManifest m2 = run_pipeline(cfg, base / "second");
    int files = 0, diff = 0;
    for (const auto& e : fs::directory_iterator(base / "first")) {
      const std::string ext = e.path().extension().string();
      if (ext != ".csv" && e.path().filename() != "summary.json") continue;
      ++files;
      if (read_file(e.path()) != read_file(base / "second" / e.path().filename())) ++diff;
    }
    r.measured = diff;
    r.pass = m1.ok() && m2.ok() && diff == 0 && files >= 6;
    r.detail = fmt("%g files compared, %g differ", files, diff);
    if (o.scratch.empty()) fs::remove_all(base);
  });
}

std::vector<CriterionResult> verify_suite(const std::string& level, const VerifyOptions& o) {
  if (level != "quick" && level != "full") throw InvalidSpec("verify level must be quick or full");
  std::vector<CriterionResult> out;
  out.push_back(check_flat_rigidity(o));
  out.push_back(check_cubic_lemma(o));
  out.push_back(check_frechet_dipole(o));
  if (level == "quick") return out;
  out.push_back(check_oracle_equivalence(o));
  out.push_back(check_monotonicity(o));
  out.push_back(check_mass_proportionality(o));
  out.push_back(check_identities(o));
  out.push_back(check_fitted_c(o));
  out.push_back(check_annulus_decay(o));
  out.push_back(check_closure(o));
  out.push_back(check_frechet_convergence(o));
  out.push_back(check_determinism(o));
  return out;
}

std::string format_result(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "measured=%.4g tol=%.4g %.1fs", r.measured, r.tolerance, r.seconds);
  return std::string(r.pass ? "PASS " : "FAIL ") + r.name + " | " + buf + " | " + r.detail;
}

}  // namespace greenmass
