// greenmass: solve, functionals, asymptotics, run, sweep, verify
#include "greenmass/errors.hpp"
#include "greenmass/pipeline.hpp"
#include "greenmass/verify.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

using namespace greenmass;

namespace {

std::filesystem::path out_dir(const RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  return std::filesystem::path("runs") / cfg.hash();
}

int report(const RunManifest& m, const std::filesystem::path& dir) {
  for (const auto& s : m.stages) {
    std::printf("%-12s %-8s %7.2fs", s.name.c_str(), s.status.c_str(), s.seconds);
    if (!s.message.empty()) std::printf("  %s: %s", s.error_type.c_str(), s.message.c_str());
    std::printf("\n");
  }
  std::printf("run directory %s (config %s)\n", dir.string().c_str(), m.config_hash.c_str());
  return m.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green's-function mass functionals on asymptotically flat 3-metrics"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  std::string config, out, level = "quick", axis, values;
  int workers = 1;
  bool no_normalize = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "config file (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
  };
  auto* solve = app.add_subcommand("solve", "solve for the Green's function and write the checkpoint");
  auto* func = app.add_subcommand("functionals", "F(t), E, D(a) and aD(a) series");
  auto* asym = app.add_subcommand("asymptotics", "annulus fits, Newtonian potential, harmonic remainder");
  auto* run = app.add_subcommand("run", "full pipeline");
  auto* sw = app.add_subcommand("sweep", "one run per value of a parameter");
  for (auto* s : {solve, func, asym, run, sw}) add_common(s);
  sw->add_option("--axis", axis, "m | epsilon | tau | resolution")->required();
  sw->add_option("--values", values, "comma separated values")->required();
  sw->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);
  auto* ver = app.add_subcommand("verify", "acceptance checks");
  ver->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  ver->add_option("--out", out, "scratch directory for the determinism check");
  ver->add_flag("--no-normalize", no_normalize, "disable flux normalisation (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ver->parsed()) {
      VerifyOptions o;
      o.normalize_flux = !no_normalize;
      o.scratch = out;
      bool ok = true;
      for (const auto& r : verify_suite(level, o)) {
        std::cout << format_result(r) << std::endl;
        ok = ok && r.pass;
      }
      std::cout << (ok ? "verify " + level + ": PASS" : "verify " + level + ": FAIL") << std::endl;
      return ok ? 0 : 3;
    }
    const RunConfig cfg = load_config(config);
    const auto dir = out_dir(cfg, out);
    if (sw->parsed()) {
      const SweepResult res = sweep(cfg, axis, parse_list(values), dir, workers);
      std::cout << res.csv();
      for (const auto& r : res.rows)
        if (!r.ok) std::fprintf(stderr, "%s = %g failed: %s\n", axis.c_str(), r.value, r.error.c_str());
      return 0;
    }
    std::set<Stage> stages;
    if (solve->parsed()) stages = {Stage::Solve};
    if (func->parsed()) stages = {Stage::Functionals};
    if (asym->parsed()) stages = {Stage::Asymptotics};
    if (run->parsed()) stages = {Stage::Solve, Stage::Functionals, Stage::Asymptotics};
    return report(run_pipeline(cfg, dir, stages), dir);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
