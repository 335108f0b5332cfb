#include "kdl/constants.hpp"

#include "kdl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kdl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 2.0)) throw DomainError("lambda must lie in [0, 2)");
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError(std::string(name) + " must be positive");
}

void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError(std::string(name) + " must be nonnegative");
}

void require_rates(double tau, double sigma) {
  require_positive(sigma, "sigma");
  require_positive(tau, "tau");
  if (!(sigma < tau)) throw DomainError("need 0 < sigma < tau");
}

}  // namespace

GradConstants grad_constants(double b0, double lambda, double tau) {
  require_positive(b0, "b0");
  require_lambda(lambda);
  require_positive(tau, "tau");
  const double pi_fn = gauss_pi(-lambda / 2.0);
  const double decay = std::pow(tau, -(3.0 - lambda) / 2.0);
  GradConstants g;
  g.b_lambda = pi_fn * b0;
  g.g_bound = std::pow(kPi, 1.5) * pi_fn * decay;
  g.c = 2.0 * std::pow(kPi, 1.5) * pi_fn * decay * b0;
  return g;
}

KeyConstants key_constants(double R, double M, double tau, double sigma, double b0, double lambda) {
  require_rates(tau, sigma);
  require_nonnegative(R, "R");
  require_nonnegative(M, "M");
  const double b_lambda = grad_constants(b0, lambda, tau).b_lambda;
  const double c_sigma = grad_constants(b0, lambda, sigma).c;
  const double sig_decay = std::pow(sigma, -(3.0 - lambda) / 2.0);
  const double gap = std::pow(tau - sigma, -0.5);
  const double rm = std::max(R, M);
  const double quad = std::max(R * R, M * (2.0 * R + M));
  KeyConstants k;
  k.k12 = std::pow(2.0, 2.5) * std::pow(kPi, 1.5) * std::pow(kE, -0.5) * b_lambda * gap * sig_decay * R * rm;
  k.k22 = std::pow(2.0 * kPi, 4.0) * b_lambda * std::pow(tau, -3.5) * sig_decay * R * rm;
  k.k13 = c_sigma * M * R;
  k.k23 = 2.0 * std::pow(kPi, 4.5) * b_lambda * std::pow(tau, -(9.0 - lambda) / 2.0) * M * R;
  k.k14 = std::pow(2.0, 1.5) * std::pow(kE, -0.5) * std::pow(kPi, 1.5) * b_lambda *
          std::pow(tau, -(3.0 - lambda) / 2.0) * gap * quad;
  k.k24 = 8.0 * std::pow(kPi, 4.0) * b_lambda * std::pow(tau, -(10.0 - lambda) / 2.0) * quad;
  k.k15 = 2.0 * c_sigma * R;
  k.k25 = k.k15;
  k.k1 = std::max({k.k12, k.k13, k.k14, k.k15});
  k.k2 = std::max({k.k22, k.k23, k.k24, k.k25});
  return k;
}

TimeLipschitz time_lipschitz_constants(double R, double M, double tau, double sigma, double b0, double lambda) {
  require_rates(tau, sigma);
  require_nonnegative(R, "R");
  require_nonnegative(M, "M");
  const double c_sigma = grad_constants(b0, lambda, sigma).c;
  const double rm = std::max(R, M);
  TimeLipschitz d;
  d.d1 = std::sqrt(2.0) * std::pow(kE, -0.5) * std::pow(tau - sigma, -0.5) * rm + c_sigma * R * R;
  d.d2 = 4.0 * std::pow(kPi, 2.5) * std::pow(tau, -3.5) * rm + c_sigma * std::pow(kPi / sigma, 3.0) * R * R;
  return d;
}

double GrowthFunction::operator()(double x) const { return k / (c * R) * std::exp(c * T * (x + R)); }

StabilityThresholds stability_thresholds(double R, double M, double T, double tau, double sigma, double b0,
                                         double lambda) {
  require_rates(tau, sigma);
  require_positive(R, "R");
  require_nonnegative(M, "M");
  require_positive(T, "T");
  const double c = grad_constants(b0, lambda, sigma).c;
  const KeyConstants key = key_constants(R, M, tau, sigma, b0, lambda);
  const TimeLipschitz d = time_lipschitz_constants(R, M, tau, sigma, b0, lambda);

  StabilityThresholds s;
  s.C.c = c;
  s.C.R = R;
  s.C.T = T;
  s.C.k = key.k1 * (2.0 + d.d1) * std::max(1.0, 1.0 / (c * R));

  // rho / C(R + rho) is proportional to rho exp(-c T rho), maximal at rho = 1 / (c T)
  double rho = 1.0 / (c * T);
  if (!std::isfinite(rho) || !(rho > 0.0)) {
    s.fallback = true;
    s.warning = "degenerate growth function; using rho = R";
    rho = R;
  }

  const double limit = std::min(1.0, T);
  double q = rho / s.C(R + rho);
  while (!(q < limit) && rho > 0.0) {
    rho *= 0.5;
    q = rho / s.C(R + rho);
  }
  s.rho = rho;
  s.X0 = 0.5 * q;
  s.T0 = q - s.X0;
  const double c_at = s.C(R + rho);
  while (s.T0 > 0.0 && c_at * (s.T0 + s.X0) > rho) s.T0 = std::nextafter(s.T0, 0.0);

  s.D0 = 0.5 * c * (R + rho);
  s.T_star = std::min({s.T0, 1.0 / s.D0, 1.0, T});

  s.K1_tilde = c * (2.0 * R + rho);
  s.K2_tilde = key.k2 * (2.0 + d.d2);
  s.K = s.K2_tilde / s.K1_tilde * std::exp(s.K1_tilde * T);
  s.K1 = d.d2 + s.K;
  s.K2 = s.K;
  return s;
}

double translate_decay(double T, double tau1) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("translate_decay: T must be nonnegative");
  require_positive(tau1, "tau1");
  const double T2 = T * T;
  // smallest root of l^2 - (2 + T^2) l + 1, written without cancellation
  const double lambda_min = 2.0 / ((2.0 + T2) + std::sqrt(T2 * T2 + 4.0 * T2));
  return tau1 * lambda_min;
}

double spatial_lipschitz_constant(double M0, double R, double T, double tau_star, double tau1, double b0,
                                  double lambda) {
  require_nonnegative(M0, "M0");
  require_nonnegative(R, "R");
  require_nonnegative(T, "T");
  require_positive(tau1, "tau1");
  if (!(tau1 < tau_star)) throw DomainError("spatial_lipschitz_constant: need tau1 < tau*");
  const double c = grad_constants(b0, lambda, tau1).c;
  return M0 * (1.0 + 0.5 * std::expm1(2.0 * c * R * T) *
                         (1.0 + std::exp(tau_star * tau_star / (tau_star - tau1))));
}

double positivity_timestep(double R_plus_rho, double sigma, const KernelSpec& kernel) {
  require_positive(R_plus_rho, "R + rho");
  require_positive(sigma, "sigma");
  kernel.validate();
  const double D0 = 0.5 * grad_constants(kernel.b0, kernel.lambda, sigma).c * R_plus_rho;
  return 1.0 / D0;
}

void ConstantsInputs::validate() const {
  require_positive(R, "R");
  require_nonnegative(M, "M");
  require_positive(T, "T");
  require_rates(tau, sigma);
  require_positive(tau1, "tau1");
  if (!(tau1 < tau_star)) throw DomainError("need tau1 < tau*");
  require_nonnegative(M0, "M0");
  require_positive(b0, "b0");
  require_lambda(lambda);
}

ConstantsReport constants_report(const ConstantsInputs& in) {
  in.validate();
  ConstantsReport r;
  r.inputs = in;
  const GradConstants at_tau = grad_constants(in.b0, in.lambda, in.tau);
  r.b_lambda = at_tau.b_lambda;
  r.c_tau = at_tau.c;
  r.g_bound = at_tau.g_bound;
  r.c_sigma = grad_constants(in.b0, in.lambda, in.sigma).c;
  r.key = key_constants(in.R, in.M, in.tau, in.sigma, in.b0, in.lambda);
  r.d = time_lipschitz_constants(in.R, in.M, in.tau, in.sigma, in.b0, in.lambda);
  r.stability = stability_thresholds(in.R, in.M, in.T, in.tau, in.sigma, in.b0, in.lambda);
  r.theta = translate_decay(in.T, in.tau1);
  r.M_spatial = spatial_lipschitz_constant(in.M0, in.R, in.T, in.tau_star, in.tau1, in.b0, in.lambda);
  r.R_star = r.c_tau * in.R * in.R;
  r.M_star = r.c_tau * in.M * (2.0 * in.R + in.M);
  return r;
}

}  // namespace kdl
