#include "greenmass/config.hpp"

#include "greenmass/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace greenmass {

namespace pt = boost::property_tree;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + g17(v[i]);
  return s;
}

template <class T>
T get(const pt::ptree& sec, const std::string& section, const std::string& key, T fallback) {
  const auto v = sec.get_optional<std::string>(key);
  if (!v) return fallback;
  try {
    return sec.get<T>(key);
  } catch (const pt::ptree_error&) {
    throw InvalidSpec("[" + section + "] " + key + ": cannot parse '" + *v + "'");
  }
}

bool get_bool(const pt::ptree& sec, const std::string& section, const std::string& key, bool fallback) {
  const auto v = sec.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw InvalidSpec("[" + section + "] " + key + ": expected true or false");
}

void check_keys(const pt::ptree& sec, const std::string& section, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : sec) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InvalidSpec("[" + section + "] unknown key '" + k + "'");
  }
}

}  // namespace

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream is(t);
  std::string tok;
  while (is >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw InvalidSpec("bad number '" + tok + "' in list");
    out.push_back(v);
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidSpec(std::string("config: ") + e.what());
  }
  for (const auto& [name, sec] : tree)
    if (name != "model" && name != "grid" && name != "solver" && name != "functionals" && name != "asymptotics" &&
        name != "output")
      throw InvalidSpec("config: unknown section [" + name + "]");
  if (!tree.get_child_optional("model")) throw InvalidSpec("config: missing [model] section");
  if (!tree.get_child_optional("grid")) throw InvalidSpec("config: missing [grid] section");

  RunConfig c;
  const pt::ptree empty;
  const auto& m = tree.get_child("model");
  check_keys(m, "model", {"kind", "m", "center", "amplitude", "width", "epsilon", "tau", "pattern"});
  for (const auto& [k, v] : m) c.model_keys[k] = v.data();
  c.model = model_from_keys(c.model_keys);

  const auto& g = tree.get_child("grid");
  check_keys(g, "grid", {"r_min", "r_max", "n_r", "n_theta", "n_phi"});
  c.grid.r_min = get(g, "grid", "r_min", c.grid.r_min);
  c.grid.r_max = get(g, "grid", "r_max", c.grid.r_max);
  c.grid.n_r = get(g, "grid", "n_r", c.grid.n_r);
  c.grid.n_theta = get(g, "grid", "n_theta", c.grid.n_theta);
  c.grid.n_phi = get(g, "grid", "n_phi", c.grid.n_phi);
  c.grid.validate();

  const auto& s = tree.get_child_optional("solver") ? tree.get_child("solver") : empty;
  check_keys(s, "solver", {"rel_tol", "max_iter", "normalize_flux", "oracle", "parallel"});
  c.solver.rel_tol = get(s, "solver", "rel_tol", c.solver.rel_tol);
  c.solver.max_iter = get(s, "solver", "max_iter", c.solver.max_iter);
  c.solver.normalize_flux = get_bool(s, "solver", "normalize_flux", c.solver.normalize_flux);
  c.solver.parallel = get_bool(s, "solver", "parallel", c.solver.parallel);
  c.oracle = get_bool(s, "solver", "oracle", c.oracle);
  if (!(c.solver.rel_tol > 0.0)) throw InvalidSpec("[solver] rel_tol must be positive");
  if (c.solver.max_iter < 1) throw InvalidSpec("[solver] max_iter must be positive");
  if (c.oracle && !c.model.is_radial()) throw InvalidSpec("[solver] oracle = true needs a radial model");

  const auto& f = tree.get_child_optional("functionals") ? tree.get_child("functionals") : empty;
  check_keys(f, "functionals",
             {"s0", "t_grid", "a_grid", "monotone_tol", "d_tolerance", "cross_check", "smear_cells", "substeps"});
  auto& fc = c.functionals;
  fc.s0 = get(f, "functionals", "s0", fc.s0);
  if (auto v = f.get_optional<std::string>("t_grid")) fc.t_grid = parse_list(*v);
  if (auto v = f.get_optional<std::string>("a_grid")) fc.a_grid = parse_list(*v);
  fc.monotone_tol = get(f, "functionals", "monotone_tol", fc.monotone_tol);
  fc.d_tolerance = get(f, "functionals", "d_tolerance", fc.d_tolerance);
  fc.cross_check = get_bool(f, "functionals", "cross_check", fc.cross_check);
  c.smear.cells = get(f, "functionals", "smear_cells", c.smear.cells);
  c.smear.substeps = get(f, "functionals", "substeps", c.smear.substeps);
  if (!(fc.monotone_tol > 0.0) || !(fc.d_tolerance > 0.0)) throw InvalidSpec("[functionals] tolerances must be positive");
  for (double t : fc.t_grid)
    if (!(t > 0.0)) throw InvalidSpec("[functionals] t_grid entries must be positive");
  if (fc.a_grid.empty()) throw InvalidSpec("[functionals] a_grid is empty");
  if (fc.a_grid.size() >= 2) {
    const double q = fc.a_grid[1] / fc.a_grid[0];
    if (q < 1.5 || q > 4.0) throw InvalidSpec("[functionals] a_grid ratio must lie in [1.5, 4]");
    for (std::size_t i = 1; i < fc.a_grid.size(); ++i)
      if (std::abs(fc.a_grid[i] / fc.a_grid[i - 1] - q) > 1e-9 * q) throw InvalidSpec("[functionals] a_grid is not geometric");
  }

  const auto& a = tree.get_child_optional("asymptotics") ? tree.get_child("asymptotics") : empty;
  check_keys(a, "asymptotics", {"enabled", "R", "q", "p"});
  auto& ac = c.asymptotics;
  ac.enabled = get_bool(a, "asymptotics", "enabled", ac.enabled);
  if (auto v = a.get_optional<std::string>("R")) ac.R = parse_list(*v);
  ac.q = get(a, "asymptotics", "q", ac.q);
  ac.p = get(a, "asymptotics", "p", ac.p);
  if (!(ac.q >= 1.0 && ac.q < 1.5)) throw InvalidSpec("[asymptotics] q must lie in [1, 1.5)");
  if (!(ac.p > 3.0)) throw InvalidSpec("[asymptotics] p must exceed 3");
  if (ac.enabled && ac.R.size() < 4) throw InvalidSpec("[asymptotics] needs at least 4 values of R");

  const auto& o = tree.get_child_optional("output") ? tree.get_child("output") : empty;
  check_keys(o, "output", {"dir", "checkpoint"});
  c.output.dir = get<std::string>(o, "output", "dir", "");
  c.output.checkpoint = get_bool(o, "output", "checkpoint", true);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidSpec("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "model " << model.describe() << '\n';
  os << "grid " << grid.describe() << '\n';
  os << "solver rel_tol=" << g17(solver.rel_tol) << ";max_iter=" << solver.max_iter
     << ";normalize_flux=" << solver.normalize_flux << ";oracle=" << oracle << '\n';
  os << "smear cells=" << g17(smear.cells) << ";substeps=" << smear.substeps << '\n';
  os << "functionals s0=" << g17(functionals.s0) << ";t_grid=" << join(functionals.t_grid)
     << ";a_grid=" << join(functionals.a_grid) << ";monotone_tol=" << g17(functionals.monotone_tol)
     << ";d_tolerance=" << g17(functionals.d_tolerance) << ";cross_check=" << functionals.cross_check << '\n';
  os << "asymptotics enabled=" << asymptotics.enabled << ";R=" << join(asymptotics.R) << ";q=" << g17(asymptotics.q)
     << ";p=" << g17(asymptotics.p) << '\n';
  return os.str();
}

std::string RunConfig::hash() const { return hex64(fnv1a(canonical())); }

}  // namespace greenmass
