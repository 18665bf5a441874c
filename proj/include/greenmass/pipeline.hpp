#pragma once

#include "greenmass/config.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace greenmass {

enum class Stage { Solve, Functionals, Asymptotics };

struct StageRecord {
  std::string name;
  std::string status;  // ok | failed | skipped
  std::string error_type;
  std::string message;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string started, finished;  // UTC, ISO 8601
  std::vector<StageRecord> stages;
  std::vector<std::string> files;
  std::string summary_json;  // contents of summary.json

  bool ok() const;
  // 0 success, 2 validation error, 3 numerical failure
  int exit_code() const;
  std::string to_json() const;
};

std::string tool_version();

// Writes into out_dir (created if needed): solution.chk, hypothesis.csv, levels.csv,
// dseries.csv, annulus.csv, annulus_error.csv, remainder.csv, summary.json, manifest.json.
// Stages not requested reuse solution.chk from out_dir when it matches the config.
RunManifest run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir,
                         const std::set<Stage>& stages = {Stage::Solve, Stage::Functionals, Stage::Asymptotics});

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  double limit = 0.0;
  double uncertainty = 0.0;
  double ratio = 0.0;         // limit / m, axis m only
  double oracle_error = 0.0;  // radial models only
  double fitted_c = 0.0;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepRow> rows;
  std::string csv() const;
};

// axis in {m, epsilon, tau, resolution}; resolution values multiply n_r, n_theta, n_phi
SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                  const std::filesystem::path& out_dir, int workers = 1);

}  // namespace greenmass
