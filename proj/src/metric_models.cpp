#include "greenmass/metric_models.hpp"

#include "greenmass/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace greenmass {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// erf(s/(sqrt2 w))/s and its derivative divided by s
struct BumpRadial {
  double f;
  double df_over_s;
};

BumpRadial bump_radial(double s, double w) {
  const double k = std::sqrt(2.0 / std::numbers::pi) / w;
  if (s < 0.05 * w) {
    // Taylor series in z^2 = s^2/(2w^2)
    const double z2 = s * s / (2.0 * w * w);
    double f = 0.0, d = 0.0, zp = 1.0, zprev = 0.0, fact = 1.0;
    for (int n = 0; n < 6; ++n) {
      if (n > 0) fact *= n;
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      f += sign * zp / (fact * (2 * n + 1));
      d += sign * 2.0 * n * zprev / (fact * (2 * n + 1));
      zprev = zp;
      zp *= z2;
    }
    return {k * f, k * d / (2.0 * w * w)};
  }
  const double e = std::erf(s / (std::sqrt(2.0) * w));
  const double g = k * std::exp(-s * s / (2.0 * w * w));
  return {e / s, (g * s - e) / (s * s * s)};
}

struct DecayEval {
  double p;
  Vec3 grad;
  double lap;
};

DecayEval decay_eval(const DecayPerturbation& d, const Vec3& x) {
  const double r2 = x.squaredNorm();
  int l = 0;
  double Y = 1.0;
  Vec3 gY = Vec3::Zero();
  switch (d.pattern) {
    case AngularPattern::Isotropic:
      break;
    case AngularPattern::Dipole:
      l = 1;
      Y = x.z();
      gY = Vec3(0.0, 0.0, 1.0);
      break;
    case AngularPattern::Quadrupole:
      l = 2;
      Y = x.z() * x.z() - 0.5 * (x.x() * x.x() + x.y() * x.y());
      gY = Vec3(-x.x(), -x.y(), 2.0 * x.z());
      break;
  }
  const double beta = 0.5 * (1.0 + d.rate + l);
  const double q = 1.0 + r2;
  const double s = std::pow(q, -beta);
  const double sp_over_r = -2.0 * beta * s / q;
  const double spp = sp_over_r + 4.0 * beta * (beta + 1.0) * r2 * s / (q * q);
  DecayEval out;
  out.p = d.amplitude * Y * s;
  out.grad = d.amplitude * (s * gY + Y * sp_over_r * x);
  out.lap = d.amplitude * Y * (spp + 2.0 * (1.0 + l) * sp_over_r);
  return out;
}

}  // namespace

MetricModel::MetricModel(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const Euclidean&) {},
                 [](const ConformalRadial& c) {
                   if (!std::isfinite(c.mass) || c.mass < 0.0)
                     throw NonPositiveDefinite("conformal radial mass must be finite and >= 0");
                 },
                 [](const ConformalBump& b) {
                   if (!b.center.allFinite() || !std::isfinite(b.amplitude) || b.amplitude < 0.0)
                     throw NonPositiveDefinite("bump amplitude must be finite and >= 0");
                   if (!(b.width > 0.0) || !std::isfinite(b.width))
                     throw NonPositiveDefinite("bump width must be positive");
                 },
                 [](const DecayPerturbation& d) {
                   if (!std::isfinite(d.amplitude) || std::abs(d.amplitude) >= 1.0)
                     throw NonPositiveDefinite("decay amplitude |eps| must be < 1 so that 1 + p > 0");
                   if (!(d.rate > 0.0) || !std::isfinite(d.rate))
                     throw NonPositiveDefinite("decay rate tau must be positive");
                 },
             },
             kind_);
}

std::string MetricModel::kind_name() const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return std::string("euclidean"); },
                        [](const ConformalRadial&) { return std::string("schwarzschild"); },
                        [](const ConformalBump&) { return std::string("bump"); },
                        [](const DecayPerturbation&) { return std::string("decay"); },
                    },
                    kind_);
}

double MetricModel::conformal_factor(const Vec3& x) const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return 1.0; },
                        [&](const ConformalRadial& c) { return 1.0 + c.mass / (2.0 * x.norm()); },
                        [&](const ConformalBump& b) {
                          return 1.0 + 0.5 * b.amplitude * bump_radial((x - b.center).norm(), b.width).f;
                        },
                        [&](const DecayPerturbation& d) { return std::pow(1.0 + decay_eval(d, x).p, 0.25); },
                    },
                    kind_);
}

Vec3 MetricModel::conformal_gradient(const Vec3& x) const {
  return std::visit(overloaded{
                        [](const Euclidean&) -> Vec3 { return Vec3::Zero(); },
                        [&](const ConformalRadial& c) -> Vec3 {
                          const double r = x.norm();
                          return (-c.mass / (2.0 * r * r * r)) * x;
                        },
                        [&](const ConformalBump& b) -> Vec3 {
                          const Vec3 y = x - b.center;
                          return (0.5 * b.amplitude * bump_radial(y.norm(), b.width).df_over_s) * y;
                        },
                        [&](const DecayPerturbation& d) -> Vec3 {
                          const DecayEval e = decay_eval(d, x);
                          return (0.25 * std::pow(1.0 + e.p, -0.75)) * e.grad;
                        },
                    },
                    kind_);
}

double MetricModel::conformal_laplacian(const Vec3& x) const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return 0.0; },
                        [](const ConformalRadial&) { return 0.0; },
                        [&](const ConformalBump& b) {
                          const double s = (x - b.center).norm();
                          const double w = b.width;
                          const double rho = std::exp(-s * s / (2.0 * w * w)) /
                                             std::pow(2.0 * std::numbers::pi * w * w, 1.5);
                          return -0.5 * b.amplitude * 4.0 * std::numbers::pi * rho;
                        },
                        [&](const DecayPerturbation& d) {
                          const DecayEval e = decay_eval(d, x);
                          const double q = 1.0 + e.p;
                          return 0.25 * std::pow(q, -0.75) * e.lap -
                                 (3.0 / 16.0) * std::pow(q, -1.75) * e.grad.squaredNorm();
                        },
                    },
                    kind_);
}

Mat3 MetricModel::metric(const Vec3& x) const {
  const double f = conformal_factor(x);
  const double f2 = f * f;
  return (f2 * f2) * Mat3::Identity();
}

Mat3 MetricModel::metric_inverse(const Vec3& x) const {
  const double f = conformal_factor(x);
  const double f2 = f * f;
  return (1.0 / (f2 * f2)) * Mat3::Identity();
}

double MetricModel::conductivity_scalar(const Vec3& x) const {
  const double f = conformal_factor(x);
  return f * f;
}

ConductivitySample MetricModel::conductivity(const Vec3& x) const {
  ConductivitySample c;
  c.A = conductivity_scalar(x) * Mat3::Identity();
  c.B = Mat3::Identity() - c.A;
  return c;
}

double MetricModel::scalar_curvature(const Vec3& x) const {
  if (std::holds_alternative<Euclidean>(kind_) || std::holds_alternative<ConformalRadial>(kind_)) return 0.0;
  const double f = conformal_factor(x);
  return -8.0 * conformal_laplacian(x) / std::pow(f, 5);
}

double MetricModel::tau() const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return std::numeric_limits<double>::infinity(); },
                        [](const ConformalRadial& c) {
                          return c.mass == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
                        },
                        [](const ConformalBump& b) {
                          return b.amplitude == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
                        },
                        [](const DecayPerturbation& d) { return d.rate; },
                    },
                    kind_);
}

std::optional<double> MetricModel::adm_mass_hint() const {
  return std::visit(overloaded{
                        [](const Euclidean&) -> std::optional<double> { return 0.0; },
                        [](const ConformalRadial& c) -> std::optional<double> { return c.mass; },
                        [](const ConformalBump& b) -> std::optional<double> { return b.amplitude; },
                        [](const DecayPerturbation&) -> std::optional<double> { return 0.0; },
                    },
                    kind_);
}

double MetricModel::ellipticity(double r_min) const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return 1.0; },
                        [&](const ConformalRadial& c) {
                          const double f = 1.0 + c.mass / (2.0 * r_min);
                          return f * f;
                        },
                        [](const ConformalBump& b) {
                          const double f = 1.0 + 0.5 * b.amplitude * std::sqrt(2.0 / std::numbers::pi) / b.width;
                          return f * f;
                        },
                        [](const DecayPerturbation& d) {
                          const double e = std::abs(d.amplitude);
                          return std::max(1.0 / std::sqrt(1.0 - e), std::sqrt(1.0 + e));
                        },
                    },
                    kind_);
}

bool MetricModel::is_radial() const {
  return std::visit(overloaded{
                        [](const Euclidean&) { return true; },
                        [](const ConformalRadial&) { return true; },
                        [](const ConformalBump& b) { return b.center.isZero(0.0) || b.amplitude == 0.0; },
                        [](const DecayPerturbation& d) {
                          return d.pattern == AngularPattern::Isotropic || d.amplitude == 0.0;
                        },
                    },
                    kind_);
}

bool MetricModel::curvature_nonnegative() const {
  return !std::holds_alternative<DecayPerturbation>(kind_);
}

std::string MetricModel::describe() const {
  return std::visit(
      overloaded{
          [](const Euclidean&) { return std::string("kind=euclidean"); },
          [](const ConformalRadial& c) { return "kind=schwarzschild;m=" + fmt17(c.mass); },
          [](const ConformalBump& b) {
            return "kind=bump;center=" + fmt17(b.center.x()) + "," + fmt17(b.center.y()) + "," +
                   fmt17(b.center.z()) + ";amplitude=" + fmt17(b.amplitude) + ";width=" + fmt17(b.width);
          },
          [](const DecayPerturbation& d) {
            return "kind=decay;epsilon=" + fmt17(d.amplitude) + ";tau=" + fmt17(d.rate) +
                   ";pattern=" + to_string(d.pattern);
          },
      },
      kind_);
}

std::uint64_t MetricModel::hash() const { return fnv1a(describe()); }

namespace {

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("model key '" + key + "' is not a number: '" + it->second + "'");
  }
}

}  // namespace

MetricModel model_from_keys(const std::map<std::string, std::string>& kv) {
  const auto it = kv.find("kind");
  if (it == kv.end()) throw ValidationError("model section needs 'kind'");
  const std::string& kind = it->second;
  if (kind == "euclidean") return MetricModel::euclidean();
  if (kind == "schwarzschild") return MetricModel::schwarzschild(parse_double(kv, "m", 1.0));
  if (kind == "bump") {
    Vec3 c = Vec3::Zero();
    if (const auto ci = kv.find("center"); ci != kv.end()) {
      std::string t = ci->second;
      for (char& ch : t)
        if (ch == ',') ch = ' ';
      std::istringstream is(t);
      if (!(is >> c.x() >> c.y() >> c.z())) throw ValidationError("bump center needs three numbers");
    }
    return MetricModel::bump(c, parse_double(kv, "amplitude", 1.0), parse_double(kv, "width", 0.5));
  }
  if (kind == "decay") {
    const auto pi = kv.find("pattern");
    return MetricModel::decay(parse_double(kv, "epsilon", 0.3), parse_double(kv, "tau", 0.5),
                              pi == kv.end() ? AngularPattern::Dipole : pattern_from_string(pi->second));
  }
  throw ValidationError("unknown model kind '" + kind + "'");
}

MetricModel parse_model_description(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("bad model description '" + text + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return model_from_keys(kv);
}

std::string to_string(AngularPattern p) {
  switch (p) {
    case AngularPattern::Isotropic:
      return "isotropic";
    case AngularPattern::Dipole:
      return "dipole";
    case AngularPattern::Quadrupole:
      return "quadrupole";
  }
  return "isotropic";
}

AngularPattern pattern_from_string(const std::string& s) {
  if (s == "isotropic") return AngularPattern::Isotropic;
  if (s == "dipole") return AngularPattern::Dipole;
  if (s == "quadrupole") return AngularPattern::Quadrupole;
  throw ValidationError("unknown angular pattern '" + s + "'");
}

const std::vector<Vec3>& cube_directions() {
  static const std::vector<Vec3> dirs = [] {
    std::vector<Vec3> v;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k)
          if (i != 0 || j != 0 || k != 0) v.push_back(Vec3(i, j, k).normalized());
    return v;
  }();
  return dirs;
}

std::vector<double> decay_report(const MetricModel& model, std::span<const double> radii,
                                 std::optional<double> tau_probe) {
  double tp = tau_probe.value_or(model.tau());
  if (!std::isfinite(tp)) tp = 0.0;
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    double sup = 0.0;
    for (const Vec3& d : cube_directions()) {
      const Vec3 x = r * d;
      // conformal metrics: g - delta = (phi^4 - 1) I, operator norm |phi^4 - 1|
      const Mat3 dg = model.metric(x) - Mat3::Identity();
      sup = std::max(sup, dg.cwiseAbs().diagonal().maxCoeff());
    }
    out.push_back(sup * std::pow(r, 1.0 + tp));
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace greenmass
