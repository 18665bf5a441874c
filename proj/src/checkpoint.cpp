#include "greenmass/elliptic_green.hpp"
#include "greenmass/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace greenmass {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_checkpoint(const GreensSolution& s, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw ValidationError("cannot write checkpoint " + tmp);
    const GridSpec& g = s.spec();
    os << "# greenmass checkpoint v1\n";
    os << "grid " << g17(g.r_min) << ' ' << g17(g.r_max) << ' ' << g.n_r << ' ' << g.n_theta << ' ' << g.n_phi << '\n';
    os << "model " << s.model.describe() << '\n';
    os << "model_hash " << hex64(s.model.hash()) << '\n';
    os << "provenance " << to_string(s.provenance) << '\n';
    os << "normalized " << (s.normalized ? 1 : 0) << '\n';
    os << "flux_constant " << g17(s.flux_constant) << '\n';
    os << "scale " << g17(s.scale) << '\n';
    os << "u_outer " << g17(s.u_outer) << '\n';
    os << "residual " << g17(s.residual) << '\n';
    os << "iterations " << s.iterations << '\n';
    os << "values " << s.u.size() << '\n';
    for (double v : s.u) os << g17(v) << '\n';
    if (!os) throw ValidationError("failed writing checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

GreensSolution load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open checkpoint " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("# greenmass checkpoint", 0) != 0) throw ValidationError("not a checkpoint: " + path);
  GridSpec spec;
  GreensSolution s;
  std::string model_text, hash_text;
  std::size_t count = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "grid") {
      ls >> spec.r_min >> spec.r_max >> spec.n_r >> spec.n_theta >> spec.n_phi;
    } else if (key == "model") {
      ls >> model_text;
    } else if (key == "model_hash") {
      ls >> hash_text;
    } else if (key == "provenance") {
      std::string p;
      ls >> p;
      s.provenance = (p == "RadialOracle") ? Provenance::RadialOracle : Provenance::GridSolve;
    } else if (key == "normalized") {
      int n = 1;
      ls >> n;
      s.normalized = n != 0;
    } else if (key == "flux_constant") {
      ls >> s.flux_constant;
    } else if (key == "scale") {
      ls >> s.scale;
    } else if (key == "u_outer") {
      ls >> s.u_outer;
    } else if (key == "residual") {
      ls >> s.residual;
    } else if (key == "iterations") {
      ls >> s.iterations;
    } else if (key == "values") {
      ls >> count;
      break;
    }
  }
  s.grid = std::make_shared<const SphericalGrid>(spec);
  s.model = parse_model_description(model_text);
  if (hex64(s.model.hash()) != hash_text) throw ValidationError("checkpoint model hash mismatch in " + path);
  if (count != s.grid->size()) throw ValidationError("checkpoint value count does not match its grid");
  s.u.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw ValidationError("checkpoint truncated: " + path);
    s.u[i] = std::strtod(line.c_str(), nullptr);
  }
  if (s.provenance == Provenance::GridSolve) {
    const FluxOperator op = assemble_operator(s.grid, s.model);
    s.shell_flux.resize(spec.n_r);
    for (int f = 1; f <= spec.n_r; ++f) s.shell_flux[f - 1] = op.shell_flux(s.u, f, s.u_outer);
  } else {
    s.shell_flux.assign(spec.n_r, s.flux_constant);
  }
  return s;
}

}  // namespace greenmass
