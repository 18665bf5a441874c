#pragma once

#include "greenmass/bump_profile.hpp"
#include "greenmass/metric_models.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace greenmass {

using TensorField = std::function<Mat3(const Vec3&)>;
using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

// perturbation pair (k, v) on An = B(0,4) \ B(0,1)
struct LinearizationInput {
  TensorField k;
  ScalarField v;
  VectorField grad_v;
};

struct AnnulusQuadrature {
  int r_panels = 24;  // composite Gauss-Legendre in |y| over [1, 4]
  int r_nodes = 8;
  int n_cos = 24;     // Gauss-Legendre in cos(theta)
  int n_phi = 48;     // uniform in phi
};

struct LinearizationOptions {
  AnnulusQuadrature quadrature;
  double k_cap = 1e3;  // sup |k| over the nodes
  double v_cap = 1e3;  // L^4 norms of v and grad v
};

struct QuadratureNode {
  Vec3 y;
  double w;
};
std::vector<QuadratureNode> annulus_nodes(const AnnulusQuadrature& q);

// L(k, v) at (delta, 1/|y|)
double frechet_term(const LinearizationInput& in, const BumpProfile& psi, const LinearizationOptions& opt = {});

// c_psi + int_An phi(rho) |grad rho|_g^3 dv_g
double D_functional(const TensorField& g, const ScalarField& rho, const VectorField& grad_rho,
                    const BumpProfile& psi, const AnnulusQuadrature& q = {});

struct CubicLemmaReport {
  std::size_t samples = 0;
  double max_ratio = 0.0;
  Vec3 worst_x = Vec3::Zero(), worst_y = Vec3::Zero();
  double y_zero_residual = 0.0;  // max |lhs| over the Y = 0 probes, exactly zero
  double x_zero_max_ratio = 0.0;
};

// sup of ||X+Y|^3 - |X|^3 - 3|X|<X,Y>| / (|X||Y|^2 + |Y|^3) over random pairs
CubicLemmaReport cubic_lemma_check(std::size_t samples = 1000000, std::uint64_t seed = 20240611, double range = 10.0);
double cubic_lemma_ratio(const Vec3& x, const Vec3& y);

}  // namespace greenmass
