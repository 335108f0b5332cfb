#include "kdl/kernels.hpp"

#include "kdl/error.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace kdl {

KernelForm parse_kernel_form(const std::string& name) {
  if (name == "constant_maxwell") return KernelForm::constant_maxwell;
  if (name == "power_law_soft") return KernelForm::power_law_soft;
  throw ConfigError("kernel.form: unknown form '" + name + "' (expected constant_maxwell or power_law_soft)");
}

std::string to_string(KernelForm form) {
  return form == KernelForm::constant_maxwell ? "constant_maxwell" : "power_law_soft";
}

void KernelSpec::validate() const {
  if (!(b0 > 0.0) || !std::isfinite(b0)) throw ConfigError("kernel.b0 must be positive (Grad cutoff)");
  if (!(lambda >= 0.0 && lambda < 2.0))
    throw ConfigError("kernel.lambda must lie in [0, 2) (Grad soft cutoff), got " + std::to_string(lambda));
  if (form == KernelForm::constant_maxwell && lambda != 0.0)
    throw ConfigError("kernel.lambda must be 0 for constant_maxwell");
  if (!(speed_floor > 0.0)) throw ConfigError("kernel speed floor must be positive");
}

KernelSpec KernelSpec::with_velocity_cutoff(double v_max) const {
  KernelSpec out = *this;
  out.speed_floor = 1e-6 * v_max;
  return out;
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n <= 0) throw ConfigError("Gauss-Legendre order must be positive");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (2 * i + 1 == n) x = 0.0;
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes(i) = -x;
    nodes(n - 1 - i) = x;
    weights(i) = w;
    weights(n - 1 - i) = w;
  }
}

SphereQuadrature::SphereQuadrature(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta <= 0) throw ConfigError("kernel.n_theta must be positive");
  if (n_phi <= 0 || n_phi % 2 != 0) throw ConfigError("kernel.n_phi must be a positive even number");
  Eigen::VectorXd mu, wmu;
  gauss_legendre(n_theta, mu, wmu);
  const int total = n_theta * n_phi;
  directions_.resize(total, 3);
  weights_.resize(total);
  antipode_.resize(total);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - mu(i) * mu(i)));
    for (int k = 0; k < n_phi; ++k) {
      const int idx = i * n_phi + k;
      const double phi = dphi * (k + 0.5);
      directions_(idx, 0) = s * std::cos(phi);
      directions_(idx, 1) = s * std::sin(phi);
      directions_(idx, 2) = mu(i);
      directions_.row(idx).normalize();
      weights_(idx) = wmu(i) * dphi;
      antipode_[idx] = (n_theta - 1 - i) * n_phi + (k + n_phi / 2) % n_phi;
    }
  }
  // exact antipodal symmetry of the stored directions
  for (int idx = 0; idx < total; ++idx)
    if (antipode_[idx] > idx) directions_.row(antipode_[idx]) = -directions_.row(idx);
  for (int idx = 0; idx < total; ++idx)
    if (idx < antipode_[idx]) half_.push_back(idx);
}

double kernel_value(const KernelSpec& spec, double relative_speed, double /*cos_angle*/) {
  spec.validate();
  if (!(relative_speed >= 0.0)) throw PreconditionError("kernel_value: relative speed must be nonnegative");
  const double base = spec.b0 / (4.0 * std::numbers::pi);
  if (spec.form == KernelForm::constant_maxwell || spec.lambda == 0.0) return base;
  return base * std::pow(std::max(relative_speed, spec.speed_floor), -spec.lambda);
}

double angular_integral(const KernelSpec& spec, const SphereQuadrature& quad, double relative_speed) {
  if (!(relative_speed > 0.0)) throw PreconditionError("angular_integral: relative speed must be positive");
  double sum = 0.0;
  for (int k = 0; k < quad.size(); ++k) sum += quad.weights()(k) * kernel_value(spec, relative_speed, quad.directions()(k, 2));
  return sum;
}

double angular_integral_exact(const KernelSpec& spec, double relative_speed) {
  if (spec.form == KernelForm::constant_maxwell || spec.lambda == 0.0) return spec.b0;
  return spec.b0 * std::pow(std::max(relative_speed, spec.speed_floor), -spec.lambda);
}

double gauss_pi(double z) {
  if (!(z > -1.0)) throw DomainError("gauss_pi: argument must exceed -1, got " + std::to_string(z));
  return std::tgamma(z + 1.0);
}

}  // namespace kdl
