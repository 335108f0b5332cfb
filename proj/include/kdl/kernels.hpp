#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace kdl {

enum class KernelForm { constant_maxwell, power_law_soft };

KernelForm parse_kernel_form(const std::string& name);
std::string to_string(KernelForm form);

/// Isotropic kernel b(s, w) = b0 / (4 pi) * s^-lambda with 0 <= lambda < 2.
struct KernelSpec {
  KernelForm form = KernelForm::constant_maxwell;
  double b0 = 1.0;
  double lambda = 0.0;
  /// Relative speeds below this are clamped before the power law is applied.
  double speed_floor = 1e-6;

  void validate() const;
  /// Floor tied to the velocity cutoff, 1e-6 * v_max.
  KernelSpec with_velocity_cutoff(double v_max) const;
};

/// Product rule on S^2: Gauss-Legendre in cos(theta) times uniform phi.
/// The node set is closed under w -> -w.
class SphereQuadrature {
 public:
  SphereQuadrature(int n_theta, int n_phi);

  int size() const { return static_cast<int>(weights_.size()); }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  Eigen::Vector3d direction(int k) const { return directions_.row(k).transpose(); }
  const Eigen::Matrix<double, Eigen::Dynamic, 3>& directions() const { return directions_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int antipode(int k) const { return antipode_[k]; }
  /// One representative of every antipodal pair.
  const std::vector<int>& half_set() const { return half_; }

 private:
  int n_theta_;
  int n_phi_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> directions_;
  Eigen::VectorXd weights_;
  std::vector<int> antipode_;
  std::vector<int> half_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

double kernel_value(const KernelSpec& spec, double relative_speed, double cos_angle);
/// Integral of b over the sphere at fixed relative speed.
double angular_integral(const KernelSpec& spec, const SphereQuadrature& quad, double relative_speed);
/// Closed-form integral over the sphere, b0 * max(s, floor)^-lambda.
double angular_integral_exact(const KernelSpec& spec, double relative_speed);

/// Gauss' Pi function, Pi(z) = Gamma(z + 1), z > -1.
double gauss_pi(double z);

struct CollisionModel {
  KernelSpec kernel;
  SphereQuadrature sphere;
};

}  // namespace kdl
