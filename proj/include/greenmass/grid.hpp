#pragma once

#include "greenmass/metric_models.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace greenmass {

struct GridSpec {
  double r_min = 1.0 / 32.0;
  double r_max = 2048.0;
  int n_r = 64;
  int n_theta = 16;
  int n_phi = 32;

  void validate() const;  // throws InvalidSpec
  std::string describe() const;
  bool operator==(const GridSpec&) const = default;
};

// Log-radial, cell-centred spherical grid. Radius is the fastest index so that
// radial lines are contiguous. theta has no nodes on the poles; the neighbour of
// a polar cell across the pole is the cell at phi + pi (n_phi even).
class SphericalGrid {
 public:
  explicit SphericalGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int n_r() const { return spec_.n_r; }
  int n_theta() const { return spec_.n_theta; }
  int n_phi() const { return spec_.n_phi; }
  std::size_t size() const { return static_cast<std::size_t>(spec_.n_r) * spec_.n_theta * spec_.n_phi; }
  std::size_t columns() const { return static_cast<std::size_t>(spec_.n_theta) * spec_.n_phi; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(j) * spec_.n_phi + k) * spec_.n_r + i;
  }
  std::size_t column(int j, int k) const { return static_cast<std::size_t>(j) * spec_.n_phi + k; }
  int mirror_phi(int k) const { return (k + spec_.n_phi / 2) % spec_.n_phi; }

  double dxi() const { return dxi_; }
  double dtheta() const { return dtheta_; }
  double dphi() const { return dphi_; }

  const std::vector<double>& r_faces() const { return r_f_; }
  const std::vector<double>& r_centers() const { return r_c_; }
  const std::vector<double>& theta_faces() const { return th_f_; }
  const std::vector<double>& theta_centers() const { return th_c_; }
  const std::vector<double>& phi_centers() const { return ph_c_; }

  // centre radius of a sub-cell when [r_a, r_b] is split in log radius
  static double volume_centre(double r_a, double r_b);

  double solid_angle(int j) const { return omega_[j]; }
  double volume(int i, int j) const { return shell_factor_[i] * omega_[j]; }
  double shell_volume(int i) const { return shell_factor_[i] * 4.0 * 3.14159265358979323846; }
  Vec3 centre(int i, int j, int k) const;
  Vec3 unit(int j, int k) const;  // radial unit vector of a column

  // radial face index whose radius equals r to 1e-12 relative, or -1
  int aligned_face(double r) const;
  // first cell whose outer face exceeds r (clamped)
  int shell_of(double r) const;

 private:
  GridSpec spec_;
  double dxi_, dtheta_, dphi_;
  std::vector<double> r_f_, r_c_, th_f_, th_c_, ph_c_, omega_, shell_factor_;
};

}  // namespace greenmass
