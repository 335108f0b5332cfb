#pragma once

#include "kdl/kernels.hpp"

#include <string>

namespace kdl {

struct GradConstants {
  double b_lambda = 0.0;  // Pi(-lambda/2) b0
  double c = 0.0;         // 2 pi^{3/2} Pi(-lambda/2) tau^{-(3-lambda)/2} b0
  double g_bound = 0.0;   // pi^{3/2} Pi(-lambda/2) tau^{-(3-lambda)/2}
};

GradConstants grad_constants(double b0, double lambda, double tau);

/// Constants of the defect-operator estimate. Row 1 bounds B_sigma norms,
/// row 2 L1 norms; columns: streaming (2), homogenization (3), time
/// translation of J (4), Lipschitz in h (5).
struct KeyConstants {
  double k12 = 0, k22 = 0;
  double k13 = 0, k23 = 0;
  double k14 = 0, k24 = 0;
  double k15 = 0, k25 = 0;
  double k1 = 0, k2 = 0;
};

KeyConstants key_constants(double R, double M, double tau, double sigma, double b0, double lambda);

struct TimeLipschitz {
  double d1 = 0.0;
  double d2 = 0.0;
};

TimeLipschitz time_lipschitz_constants(double R, double M, double tau, double sigma, double b0, double lambda);

/// C(x) = k / (c R) * exp(c T (x + R)) with c = c_{Lambda,sigma}.
struct GrowthFunction {
  double k = 0.0;
  double c = 0.0;
  double R = 0.0;
  double T = 0.0;
  double operator()(double x) const;
};

struct StabilityThresholds {
  GrowthFunction C;
  double rho = 0.0;
  double X0 = 0.0;
  double T0 = 0.0;
  double D0 = 0.0;
  double T_star = 0.0;
  // assembled error constants (upper bounds only)
  double K1_tilde = 0.0;
  double K2_tilde = 0.0;
  double K = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  bool fallback = false;
  std::string warning;
};

StabilityThresholds stability_thresholds(double R, double M, double T, double tau, double sigma, double b0,
                                         double lambda);

/// Theta(T, tau1) = tau1 * smallest eigenvalue of the form (x - T v)^2 + v^2.
double translate_decay(double T, double tau1);

/// M = M0 {1 + (exp(2 c R T) - 1)/2 [1 + exp(tau*^2 / (tau* - tau1))]}, c = c_{Lambda,tau1}.
double spatial_lipschitz_constant(double M0, double R, double T, double tau_star, double tau1, double b0,
                                  double lambda);

/// 1 / D0 with D0 = c_{Lambda,sigma} (R + rho) / 2.
double positivity_timestep(double R_plus_rho, double sigma, const KernelSpec& kernel);

struct ConstantsInputs {
  double R = 1.0;
  double M = 1.0;
  double T = 1.0;
  double tau = 1.0;
  double sigma = 0.5;
  double tau1 = 0.5;
  double tau_star = 1.0;
  double M0 = 1.0;
  double b0 = 1.0;
  double lambda = 0.0;

  void validate() const;
};

struct ConstantsReport {
  ConstantsInputs inputs;
  double b_lambda = 0.0;
  double c_tau = 0.0;
  double c_sigma = 0.0;
  double g_bound = 0.0;
  KeyConstants key;
  TimeLipschitz d;
  StabilityThresholds stability;
  double theta = 0.0;
  double M_spatial = 0.0;
  double R_star = 0.0;
  double M_star = 0.0;
};

ConstantsReport constants_report(const ConstantsInputs& in);

}  // namespace kdl
