#include "greenmass/report_io.hpp"

#include "greenmass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace greenmass {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(fmt17(v)); }

CsvTable& CsvTable::add(const std::string& v) {
  if (rows_.empty()) rows_.emplace_back();
  rows_.back().push_back(v);
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot write " + tmp.string());
    os << content;
    if (!os) throw ValidationError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string levels_csv(const std::vector<LevelRecord>& levels) {
  CsvTable t({"t", "F", "F_surface", "area", "int_H_gradu", "int_gradu_sq", "int_RSigma", "int_grad_log",
              "int_A_ring", "int_R", "int_sphere_defect", "dF_dt", "smear_width", "single_shell", "closed_form"});
  for (const auto& l : levels)
    t.row()
        .add(l.f.t)
        .add(l.f.F)
        .add(l.f.F_surface)
        .add(l.s.area)
        .add(l.s.int_H_gradu)
        .add(l.s.int_gradu_sq)
        .add(l.k.int_RSigma)
        .add(l.k.int_grad_log)
        .add(l.k.int_A_ring)
        .add(l.k.int_R)
        .add(l.k.int_sphere_defect)
        .add(l.k.dF_dt)
        .add(l.s.smear_width)
        .add(l.s.single_shell)
        .add(l.k.closed_form);
  return t.str();
}

std::string dseries_csv(const FunctionalSeries& series, double monotone_tol, double c_psi) {
  CsvTable t({"a", "D", "aD", "D_s_quadrature", "monotone_flag"});
  for (std::size_t i = 0; i < series.D.size(); ++i) {
    const DValue& d = series.D[i];
    bool ok = true;
    if (i > 0) {
      const double tol = monotone_tol * std::max(std::abs(d.aD()), c_psi);
      ok = d.aD() >= series.D[i - 1].aD() - tol;
    }
    t.row().add(d.a).add(d.D).add(d.aD()).add(d.s_quadrature).add(ok);
  }
  return t.str();
}

std::string hypothesis_csv(const HypothesisReport& h) {
  CsvTable t({"R", "energy_product", "l1_x"});
  for (const auto& a : h.annuli) t.row().add(a.R).add(a.energy_product).add(a.l1_x);
  return t.str();
}

std::string annulus_csv(const ExpansionFit& fit) {
  CsvTable t({"R", "c", "radial2", "d_x", "d_y", "d_z", "residual_l1", "residual_l1.25", "residual_w", "condition"});
  for (const auto& r : fit.series)
    t.row()
        .add(r.R)
        .add(r.c)
        .add(r.radial2)
        .add(r.d.x())
        .add(r.d.y())
        .add(r.d.z())
        .add(r.residual_l1)
        .add(r.residual_l125)
        .add(r.residual_wp)
        .add(r.condition);
  return t.str();
}

std::string annulus_error_csv(const AnnulusErrorReport& e) {
  CsvTable t({"R", "q", "error"});
  for (std::size_t i = 0; i < e.R.size(); ++i) t.row().add(e.R[i]).add(e.q).add(e.value[i]);
  return t.str();
}

std::string remainder_csv(const HarmonicRemainderReport& h) {
  CsvTable t({"R", "c_h", "b_x", "b_y", "b_z", "d_x", "d_y", "d_z", "mean_abs", "closure"});
  for (const auto& p : h.points)
    t.row()
        .add(p.R)
        .add(p.c)
        .add(p.b.x())
        .add(p.b.y())
        .add(p.b.z())
        .add(p.d.x())
        .add(p.d.y())
        .add(p.d.z())
        .add(p.mean_abs)
        .add(p.closure);
  return t.str();
}

}  // namespace greenmass
