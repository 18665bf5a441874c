#include "greenmass/linearization.hpp"

#include "greenmass/errors.hpp"
#include "greenmass/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace greenmass {

std::vector<QuadratureNode> annulus_nodes(const AnnulusQuadrature& q) {
  if (q.r_panels < 1 || q.r_nodes < 1 || q.n_cos < 1 || q.n_phi < 1) throw InvalidSpec("annulus quadrature sizes");
  std::vector<std::pair<double, double>> radial;
  const double h = 3.0 / q.r_panels;
  for (int p = 0; p < q.r_panels; ++p)
    for (const auto& n : gauss_legendre(q.r_nodes, 1.0 + p * h, 1.0 + (p + 1) * h)) radial.push_back(n);
  const auto cosn = gauss_legendre(q.n_cos, -1.0, 1.0);
  const double dphi = 2.0 * std::numbers::pi / q.n_phi;
  std::vector<QuadratureNode> out;
  out.reserve(radial.size() * cosn.size() * q.n_phi);
  for (const auto& [r, wr] : radial)
    for (const auto& [c, wc] : cosn) {
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int k = 0; k < q.n_phi; ++k) {
        const double ph = (k + 0.5) * dphi;
        out.push_back({Vec3(r * s * std::cos(ph), r * s * std::sin(ph), r * c), wr * r * r * wc * dphi});
      }
    }
  return out;
}

double frechet_term(const LinearizationInput& in, const BumpProfile& psi, const LinearizationOptions& opt) {
  const auto nodes = annulus_nodes(opt.quadrature);
  double k_sup = 0.0, v4 = 0.0, g4 = 0.0;
  double sum = 0.0;
  for (const auto& n : nodes) {
    const Vec3& y = n.y;
    const double r = y.norm();
    const double rho = 1.0 / r;
    const Vec3 grho = -y / (r * r * r);
    const double gn = grho.norm();
    const double v = in.v ? in.v(y) : 0.0;
    const Vec3 gv = in.grad_v ? in.grad_v(y) : Vec3::Zero();
    const Mat3 k = in.k ? in.k(y) : Mat3::Zero();
    if (!std::isfinite(v) || !gv.allFinite() || !k.allFinite()) throw UnboundedInput("non-finite perturbation value");
    k_sup = std::max(k_sup, k.cwiseAbs().maxCoeff());
    v4 += n.w * std::pow(v, 4);
    g4 += n.w * gv.squaredNorm() * gv.squaredNorm();
    const double ph = psi.phi(rho);
    if (ph == 0.0 && psi.dphi(rho) == 0.0) continue;
    const double g3 = gn * gn * gn;
    sum += n.w * (psi.dphi(rho) * g3 * v + 3.0 * ph * gn * grho.dot(gv) +
                  ph * (0.5 * k.trace() * g3 - 1.5 * gn * grho.dot(k * grho)));
  }
  if (k_sup > opt.k_cap) throw UnboundedInput("sup |k| exceeds cap");
  if (std::pow(v4, 0.25) > opt.v_cap || std::pow(g4, 0.25) > opt.v_cap) throw UnboundedInput("L^4 norm of v exceeds cap");
  return sum;
}

double D_functional(const TensorField& g, const ScalarField& rho, const VectorField& grad_rho,
                    const BumpProfile& psi, const AnnulusQuadrature& q) {
  double sum = 0.0;
  for (const auto& n : annulus_nodes(q)) {
    const Mat3 gm = g(n.y);
    const Vec3 d = grad_rho(n.y);
    const double ph = psi.phi(rho(n.y));
    if (ph == 0.0) continue;
    const double gn2 = d.dot(gm.inverse() * d);
    sum += n.w * ph * std::pow(gn2, 1.5) * std::sqrt(gm.determinant());
  }
  return psi.c_psi() + sum;
}

namespace {
double cubic_lhs(const Vec3& x, const Vec3& y) {
  const double nx = x.norm();
  return std::abs(std::pow((x + y).norm(), 3) - std::pow(nx, 3) - 3.0 * nx * x.dot(y));
}
}  // namespace

double cubic_lemma_ratio(const Vec3& x, const Vec3& y) {
  const double nx = x.norm(), ny = y.norm();
  return cubic_lhs(x, y) / (nx * ny * ny + ny * ny * ny);
}

CubicLemmaReport cubic_lemma_check(std::size_t samples, std::uint64_t seed, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-range, range);
  auto draw = [&] { return Vec3(U(rng), U(rng), U(rng)); };
  CubicLemmaReport rep;
  rep.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec3 x = draw(), y = draw();
    if (y.squaredNorm() == 0.0) continue;
    const double q = cubic_lemma_ratio(x, y);
    if (q > rep.max_ratio) {
      rep.max_ratio = q;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x = draw();
    rep.y_zero_residual = std::max(rep.y_zero_residual, cubic_lhs(x, Vec3::Zero()));
    rep.x_zero_max_ratio = std::max(rep.x_zero_max_ratio, cubic_lemma_ratio(Vec3::Zero(), x));
  }
  return rep;
}

}  // namespace greenmass
