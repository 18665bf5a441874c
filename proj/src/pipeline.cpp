#include "greenmass/pipeline.hpp"

#include "greenmass/asymptotic_expansion.hpp"
#include "greenmass/errors.hpp"
#include "greenmass/mass_functionals.hpp"
#include "greenmass/report_io.hpp"

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <thread>

namespace greenmass {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string tool_version() { return GREENMASS_VERSION; }

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// JSON has no NaN
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  RunManifest& man;
  json summary;
  std::optional<GreensSolution> sol;

  void put(const std::string& name, const std::string& content) {
    write_atomic(dir / name, content);
    if (std::find(man.files.begin(), man.files.end(), name) == man.files.end()) man.files.push_back(name);
  }
  void flush_summary() { put("summary.json", summary.dump(2) + "\n"); }
};

template <class F>
void stage(Context& ctx, const std::string& name, F&& body) {
  StageRecord rec;
  rec.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
    rec.status = "ok";
  } catch (const ValidationError& e) {
    rec.status = "failed";
    rec.error_type = "ValidationError";
    rec.message = e.what();
  } catch (const NumericalError& e) {
    rec.status = "failed";
    rec.error_type = "NumericalError";
    rec.message = e.what();
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.error_type = "NumericalError";
    rec.message = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ctx.man.stages.push_back(rec);
}

void solve_stage(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  auto grid = std::make_shared<const SphericalGrid>(cfg.grid);
  ctx.sol = cfg.oracle ? radial_oracle(grid, cfg.model) : solve_green(grid, cfg.model, cfg.solver);
  const GreensSolution& s = *ctx.sol;
  if (cfg.output.checkpoint) {
    save_checkpoint(s, (ctx.dir / "solution.chk").string());
    ctx.man.files.push_back("solution.chk");
  }
  json j;
  j["provenance"] = to_string(s.provenance);
  j["normalized"] = s.normalized;
  j["flux_constant"] = num(s.flux_constant);
  j["residual"] = num(s.residual);
  j["iterations"] = s.iterations;
  if (cfg.model.is_radial()) j["oracle_error"] = num(oracle_error(s, 1.0, cfg.grid.r_max / 8.0));
  const HypothesisReport h = hypothesis_checks(s);
  j["hypothesis"] = {{"c_lower", num(h.c_lower)},
                     {"c_upper", num(h.c_upper)},
                     {"ellipticity", num(h.ellipticity)},
                     {"energy_exponent", num(h.energy_exponent)},
                     {"l1_x_exponent", num(h.l1_x_exponent)},
                     {"monotone_shell_average", h.monotone_shell_average},
                     {"positive", h.positive}};
  ctx.summary["solve"] = j;
  ctx.put("hypothesis.csv", hypothesis_csv(h));
  ctx.flush_summary();
}

bool load_existing(Context& ctx) {
  const fs::path p = ctx.dir / "solution.chk";
  if (!fs::exists(p)) return false;
  GreensSolution s = load_checkpoint(p.string());
  if (!(s.spec() == ctx.cfg.grid) || s.model.describe() != ctx.cfg.model.describe()) return false;
  ctx.sol = std::move(s);
  return true;
}

void functionals_stage(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const GreensSolution& s = *ctx.sol;
  const LevelSetGeometry geo(s, cfg.smear);
  const BumpProfile psi(cfg.functionals.s0);
  SeriesOptions so;
  so.monotone_tol = cfg.functionals.monotone_tol;
  so.d.cross_check = cfg.functionals.cross_check;
  so.d.tolerance = cfg.functionals.d_tolerance;

  FunctionalSeries fs_ = F_series(geo, cfg.functionals.t_grid, so);
  std::vector<LevelRecord> levels;
  for (const FValue& f : fs_.F) levels.push_back({f, geo.surface_integrals(f.t), geo.curvature_terms(f.t)});
  ctx.put("levels.csv", levels_csv(levels));

  FunctionalSeries ds = aD_series(geo, cfg.functionals.a_grid, psi, so);
  ctx.put("dseries.csv", dseries_csv(ds, so.monotone_tol, psi.c_psi()));

  json j;
  j["psi"] = {{"s0", psi.s0()}, {"N", psi.norm()}, {"c_psi", psi.c_psi()}, {"K2", psi.k2()}};
  j["hypothesis_R_nonnegative"] = fs_.hypothesis_R_nonnegative;
  j["verdicts"] = {{"F_monotone", to_string(fs_.F_monotone)},
                   {"F_nonnegative", to_string(fs_.F_nonnegative)},
                   {"D_nonnegative", to_string(ds.D_nonnegative)},
                   {"aD_monotone", to_string(ds.aD_monotone)}};
  if (!fs_.hypothesis_R_nonnegative) j["verdict_note"] = "model has regions with R < 0; verdicts are not asserted";
  j["limit_aD"] = num(ds.limit);
  j["uncertainty"] = num(ds.uncertainty);
  j["plateau"] = ds.plateau;
  j["mass_estimate"] = num(ds.limit / kMassCalibration);
  j["mass_calibration"] = kMassCalibration;
  json viol = json::array();
  for (const auto* v : {&fs_.violations, &ds.violations})
    for (const auto& x : *v)
      viol.push_back({{"series", x.series}, {"x1", x.x1}, {"x2", x.x2}, {"v1", x.v1}, {"v2", x.v2}, {"drop", x.drop},
                      {"tolerance", x.tolerance}});
  j["violations"] = viol;
  ctx.summary["functionals"] = j;
  ctx.flush_summary();
}

void asymptotics_stage(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const GreensSolution& s = *ctx.sol;
  const auto& ac = cfg.asymptotics;
  const ExpansionFit fit = fit_expansion(s, ac.R, ac.p);
  ctx.put("annulus.csv", annulus_csv(fit));
  const PotentialField pot = newtonian_potential(s);
  const AnnulusErrorReport ae = annulus_error(pot, ac.R, ac.q);
  ctx.put("annulus_error.csv", annulus_error_csv(ae));
  const HarmonicRemainderReport hr = harmonic_remainder(s, pot, ac.R);
  ctx.put("remainder.csv", remainder_csv(hr));
  const RemainderPoint& last = hr.points.back();
  json j;
  j["c"] = num(fit.c);
  j["d"] = vec(fit.d);
  j["residual_decreasing"] = fit.residual_decreasing;
  j["xbar"] = vec(pot.xbar);
  j["x_l1"] = num(pot.x_l1);
  j["b"] = vec(last.b);
  j["closure_R"] = last.R;
  j["closure_defect"] = num(last.closure);
  j["annulus_error_inversions"] = ae.inversions;
  j["annulus_error_decreasing"] = ae.decreasing;
  ctx.summary["asymptotics"] = j;
  ctx.flush_summary();
}

}  // namespace

bool RunManifest::ok() const {
  for (const auto& s : stages)
    if (s.status == "failed") return false;
  return true;
}

int RunManifest::exit_code() const {
  for (const auto& s : stages)
    if (s.status == "failed") return s.error_type == "ValidationError" ? 2 : 3;
  return 0;
}

std::string RunManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["started"] = started;
  j["finished"] = finished;
  json st = json::array();
  for (const auto& s : stages)
    st.push_back({{"stage", s.name}, {"status", s.status}, {"error_type", s.error_type}, {"message", s.message},
                  {"seconds", s.seconds}});
  j["stages"] = st;
  j["files"] = files;
  return j.dump(2) + "\n";
}

RunManifest run_pipeline(const RunConfig& cfg, const fs::path& out_dir, const std::set<Stage>& stages) {
  fs::create_directories(out_dir);
  RunManifest man;
  man.config_hash = cfg.hash();
  man.version = tool_version();
  man.started = utc_now();
  Context ctx{cfg, out_dir, man, json::object(), std::nullopt};
  if (fs::exists(out_dir / "summary.json") && !stages.count(Stage::Solve)) {
    try {
      ctx.summary = json::parse(read_file(out_dir / "summary.json"));
    } catch (const std::exception&) {
      ctx.summary = json::object();
    }
  }
  ctx.summary["model"] = cfg.model.describe();
  ctx.summary["grid"] = cfg.grid.describe();
  ctx.summary["config_hash"] = man.config_hash;
  ctx.put("config.txt", cfg.canonical());

  if (stages.count(Stage::Solve)) {
    stage(ctx, "solve", [&] { solve_stage(ctx); });
  } else {
    stage(ctx, "load", [&] {
      if (!load_existing(ctx)) solve_stage(ctx);
    });
  }
  const bool have = ctx.sol.has_value();
  auto skipped = [&](const char* name) { man.stages.push_back({name, "skipped", "", "no solution", 0.0}); };
  if (stages.count(Stage::Functionals)) {
    if (have)
      stage(ctx, "functionals", [&] { functionals_stage(ctx); });
    else
      skipped("functionals");
  }
  if (stages.count(Stage::Asymptotics) && cfg.asymptotics.enabled) {
    if (have)
      stage(ctx, "asymptotics", [&] { asymptotics_stage(ctx); });
    else
      skipped("asymptotics");
  }
  man.summary_json = ctx.summary.dump(2) + "\n";
  man.finished = utc_now();
  write_atomic(out_dir / "manifest.json", man.to_json());
  return man;
}

std::string SweepResult::csv() const {
  std::vector<std::string> head{axis, "status", "limit_aD", "uncertainty", "oracle_error", "fitted_c"};
  if (axis == "m") head.insert(head.begin() + 4, "ratio");
  CsvTable t(head);
  for (const auto& r : rows) {
    t.row().add(r.value).add(r.ok ? std::string("ok") : std::string("missing"));
    if (!r.ok) {
      t.add(std::string("")).add(std::string(""));
      if (axis == "m") t.add(std::string(""));
      t.add(std::string("")).add(std::string(""));
      continue;
    }
    t.add(r.limit).add(r.uncertainty);
    if (axis == "m") t.add(r.ratio);
    t.add(r.oracle_error).add(r.fitted_c);
  }
  return t.str();
}

SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                  const fs::path& out_dir, int workers) {
  if (values.empty()) throw InvalidSpec("sweep needs at least one value");
  if (axis != "m" && axis != "epsilon" && axis != "tau" && axis != "resolution")
    throw InvalidSpec("sweep axis must be one of m, epsilon, tau, resolution");
  const std::string kind = base.model_keys.count("kind") ? base.model_keys.at("kind") : "";
  if (axis == "m" && kind != "schwarzschild") throw InvalidSpec("sweep over m needs kind = schwarzschild");
  if ((axis == "epsilon" || axis == "tau") && kind != "decay") throw InvalidSpec("sweep over " + axis + " needs kind = decay");

  std::vector<RunConfig> cfgs;
  for (double v : values) {
    RunConfig c = base;
    if (axis == "resolution") {
      const double f = std::round(v);
      if (f < 1.0 || std::abs(f - v) > 1e-12) throw InvalidSpec("resolution factors must be positive integers");
      c.grid.n_r = static_cast<int>(base.grid.n_r * f);
      c.grid.n_theta = static_cast<int>(base.grid.n_theta * f);
      c.grid.n_phi = static_cast<int>(base.grid.n_phi * f);
      c.grid.validate();
    } else {
      c.model_keys[axis] = fmt17(v);
      c.model = model_from_keys(c.model_keys);
    }
    cfgs.push_back(std::move(c));
  }
  fs::create_directories(out_dir);
  SweepResult res;
  res.axis = axis;
  res.rows.resize(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      SweepRow& row = res.rows[i];
      row.value = values[i];
      try {
        const RunManifest man = run_pipeline(cfgs[i], out_dir / (axis + "_" + fmt17(values[i])));
        row.ok = man.ok();
        if (!row.ok) {
          for (const auto& s : man.stages)
            if (s.status == "failed") row.error = s.name + ": " + s.message;
          continue;
        }
        const json sm = json::parse(man.summary_json);
        row.limit = sm["functionals"]["limit_aD"].get<double>();
        row.uncertainty = sm["functionals"]["uncertainty"].get<double>();
        if (axis == "m") row.ratio = row.limit / values[i];
        if (sm["solve"].contains("oracle_error")) row.oracle_error = sm["solve"]["oracle_error"].get<double>();
        if (sm.contains("asymptotics")) row.fitted_c = sm["asymptotics"]["c"].get<double>();
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(cfgs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  write_atomic(out_dir / "sweep.csv", res.csv());
  return res;
}

}  // namespace greenmass
