#pragma once

#include "greenmass/asymptotic_expansion.hpp"
#include "greenmass/mass_functionals.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace greenmass {

// Fixed-column CSV with %.17g numbers, so identical inputs give identical bytes.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(const std::string& v);
  CsvTable& add(bool v) { return add(std::string(v ? "1" : "0")); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt17(double v);

// write to path.tmp, then rename over path
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

struct LevelRecord {
  FValue f;
  SurfaceIntegralReport s;
  CurvatureTermsReport k;
};

std::string levels_csv(const std::vector<LevelRecord>& levels);
std::string dseries_csv(const FunctionalSeries& series, double monotone_tol, double c_psi);
std::string hypothesis_csv(const HypothesisReport& h);
std::string annulus_csv(const ExpansionFit& fit);
std::string annulus_error_csv(const AnnulusErrorReport& e);
std::string remainder_csv(const HarmonicRemainderReport& h);

}  // namespace greenmass
