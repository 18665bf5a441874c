#pragma once

#include "greenmass/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace greenmass {

struct CriterionResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst observed value in the units of tolerance
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  bool normalize_flux = true;  // false is the negative control
  GridSpec grid;               // 64 x 16 x 32 by default
  std::filesystem::path scratch;  // run directories for the determinism check; temp dir when empty
};

CriterionResult check_flat_rigidity(const VerifyOptions& o);
CriterionResult check_oracle_equivalence(const VerifyOptions& o);
CriterionResult check_monotonicity(const VerifyOptions& o);
CriterionResult check_mass_proportionality(const VerifyOptions& o);
CriterionResult check_identities(const VerifyOptions& o);
CriterionResult check_fitted_c(const VerifyOptions& o);
CriterionResult check_annulus_decay(const VerifyOptions& o);
CriterionResult check_closure(const VerifyOptions& o);
CriterionResult check_frechet_dipole(const VerifyOptions& o);
CriterionResult check_frechet_convergence(const VerifyOptions& o);
CriterionResult check_cubic_lemma(const VerifyOptions& o);
CriterionResult check_determinism(const VerifyOptions& o);

// quick: flat identities, cubic lemma, Frechet dipole vanishing; full: every check
std::vector<CriterionResult> verify_suite(const std::string& level, const VerifyOptions& o = {});

std::string format_result(const CriterionResult& r);

}  // namespace greenmass
