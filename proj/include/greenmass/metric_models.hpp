#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace greenmass {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class AngularPattern { Isotropic, Dipole, Quadrupole };

struct Euclidean {};

// profile phi(r) = 1 + m/(2r): Schwarzschild in isotropic coordinates
struct ConformalRadial {
  double mass = 1.0;
};

// phi = 1 + (M/2) erf(s/(sqrt2 w))/s, s = |x - center|; -lap(phi) is a Gaussian of mass 2 pi M
struct ConformalBump {
  Vec3 center = Vec3::Zero();
  double amplitude = 1.0;
  double width = 0.5;
};

// g = (1 + p) delta, p = eps * Y_l(x) (1 + r^2)^{-(1 + tau + l)/2}
struct DecayPerturbation {
  double amplitude = 0.3;
  double rate = 0.5;
  AngularPattern pattern = AngularPattern::Dipole;
};

struct ConductivitySample {
  Mat3 A;
  Mat3 B;
};

// Every built-in family is conformally flat, g = phi^4 delta, so A = phi^2 I.
// Models are immutable after construction and safe to share across threads.
class MetricModel {
 public:
  using Kind = std::variant<Euclidean, ConformalRadial, ConformalBump, DecayPerturbation>;

  explicit MetricModel(Kind kind);

  static MetricModel euclidean() { return MetricModel(Euclidean{}); }
  static MetricModel schwarzschild(double m) { return MetricModel(ConformalRadial{m}); }
  static MetricModel bump(const Vec3& center, double amplitude, double width) {
    return MetricModel(ConformalBump{center, amplitude, width});
  }
  static MetricModel decay(double eps, double tau, AngularPattern pattern) {
    return MetricModel(DecayPerturbation{eps, tau, pattern});
  }

  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

  double conformal_factor(const Vec3& x) const;
  Vec3 conformal_gradient(const Vec3& x) const;
  double conformal_laplacian(const Vec3& x) const;

  Mat3 metric(const Vec3& x) const;
  Mat3 metric_inverse(const Vec3& x) const;
  ConductivitySample conductivity(const Vec3& x) const;
  double conductivity_scalar(const Vec3& x) const;  // a with A = a I
  double scalar_curvature(const Vec3& x) const;

  double tau() const;  // +inf when exactly flat
  std::optional<double> adm_mass_hint() const;
  double ellipticity(double r_min) const;  // Lambda for r >= r_min
  bool is_radial() const;
  bool curvature_nonnegative() const;

  // canonical "key=value;..." text, stable under round trips; hashed into checkpoints
  std::string describe() const;
  std::uint64_t hash() const;

 private:
  Kind kind_;
};

// keys: kind, m, center, amplitude, width, epsilon, tau, pattern
MetricModel model_from_keys(const std::map<std::string, std::string>& kv);
// inverse of MetricModel::describe()
MetricModel parse_model_description(const std::string& text);

std::string to_string(AngularPattern p);
AngularPattern pattern_from_string(const std::string& s);

// 26 unit directions: cube faces, edges and corners
const std::vector<Vec3>& cube_directions();

// per-radius sup over cube_directions of |g - delta|_op * r^(1 + tau_probe)
std::vector<double> decay_report(const MetricModel& model, std::span<const double> radii,
                                 std::optional<double> tau_probe = std::nullopt);

// second-order 7-point Laplacian; independent of the analytic formulas
template <class F>
double fd_laplacian(const F& f, const Vec3& x, double h) {
  double c = f(x);
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    Vec3 e = Vec3::Zero();
    e[d] = h;
    s += f(x + e) + f(x - e) - 2.0 * c;
  }
  return s / (h * h);
}

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace greenmass
