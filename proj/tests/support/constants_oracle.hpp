#pragma once
// Second evaluation of the constants report in 50-digit arithmetic.

#include "kdl/constants.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <map>
#include <string>

namespace kdl_test {

using hp = boost::multiprecision::cpp_bin_float_50;

inline hp hp_pi() { return boost::math::constants::pi<hp>(); }

/// c_{Lambda,rate}: twice pi^{3/2} Gamma(1 - lambda/2) rate^{(lambda-3)/2} b0.
inline hp collision_constant(hp b0, hp lambda, hp rate) {
  using boost::multiprecision::pow;
  return 2 * pow(hp_pi(), hp(1.5)) * boost::math::tgamma(1 - lambda / 2) * pow(rate, (lambda - 3) / 2) * b0;
}

/// Flat map of every report entry, computed from the inputs alone.
inline std::map<std::string, hp> oracle_constants(const kdl::ConstantsInputs& in) {
  using boost::multiprecision::exp;
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const hp R = in.R, M = in.M, T = in.T, tau = in.tau, sigma = in.sigma, b0 = in.b0, lambda = in.lambda;
  const hp pi = hp_pi(), e = exp(hp(1));
  const hp gamma = boost::math::tgamma(1 - lambda / 2);
  const hp blam = gamma * b0;
  const hp c_tau = collision_constant(b0, lambda, tau);
  const hp c_sigma = collision_constant(b0, lambda, sigma);
  const hp sig = pow(sigma, (lambda - 3) / 2);
  const hp rm = std::max(R, M);
  const hp quad = std::max(R * R, M * (2 * R + M));

  std::map<std::string, hp> out;
  out["b_lambda"] = blam;
  out["c_tau"] = c_tau;
  out["c_sigma"] = c_sigma;
  out["g_bound"] = c_tau / (2 * b0);
  out["k12"] = 4 * sqrt(hp(2)) * pi * sqrt(pi) / sqrt(e) * blam / sqrt(tau - sigma) * sig * R * rm;
  out["k22"] = 16 * pow(pi, 4) * blam / (tau * tau * tau * sqrt(tau)) * sig * R * rm;
  out["k13"] = c_sigma * M * R;
  out["k23"] = 2 * pow(pi, hp(4.5)) * blam * pow(tau, (lambda - 9) / 2) * M * R;
  out["k14"] = 2 * sqrt(2 * pi * pi * pi / e) * blam * pow(tau, (lambda - 3) / 2) / sqrt(tau - sigma) * quad;
  out["k24"] = 8 * pow(pi, 4) * blam * pow(tau, (lambda - 10) / 2) * quad;
  out["k15"] = 2 * c_sigma * R;
  out["k25"] = out["k15"];
  out["k1"] = std::max({out["k12"], out["k13"], out["k14"], out["k15"]});
  out["k2"] = std::max({out["k22"], out["k23"], out["k24"], out["k25"]});
  out["d1"] = sqrt(2 / (e * (tau - sigma))) * rm + c_sigma * R * R;
  out["d2"] = 4 * pow(pi, hp(2.5)) * pow(tau, hp(-3.5)) * rm + c_sigma * pow(pi / sigma, 3) * R * R;

  const hp growth_k = out["k1"] * (2 + out["d1"]) * std::max(hp(1), 1 / (c_sigma * R));
  auto growth = [&](hp x) { return growth_k / (c_sigma * R) * exp(c_sigma * T * (x + R)); };
  hp rho = 1 / (c_sigma * T);
  hp q = rho / growth(R + rho);
  while (!(q < std::min(hp(1), T))) {
    rho /= 2;
    q = rho / growth(R + rho);
  }
  out["C.k"] = growth_k;
  out["rho"] = rho;
  out["X0"] = q / 2;
  out["T0"] = q / 2;
  out["D0"] = c_sigma * (R + rho) / 2;
  out["T_star"] = std::min({q / 2, 1 / out["D0"], hp(1), T});
  out["K1_tilde"] = c_sigma * (2 * R + rho);
  out["K2_tilde"] = out["k2"] * (2 + out["d2"]);
  out["K"] = out["K2_tilde"] / out["K1_tilde"] * exp(out["K1_tilde"] * T);
  out["K1"] = out["d2"] + out["K"];
  out["K2"] = out["K"];

  // smallest eigenvalue of [[1, -T], [-T, 1 + T^2]]
  const hp T2 = T * T;
  out["theta"] = hp(in.tau1) * ((2 + T2) - sqrt(T2 * T2 + 4 * T2)) / 2;
  const hp c1 = collision_constant(b0, lambda, hp(in.tau1));
  const hp ts = in.tau_star;
  out["M_spatial"] = hp(in.M0) * (1 + (exp(2 * c1 * R * T) - 1) / 2 * (1 + exp(ts * ts / (ts - hp(in.tau1)))));
  out["R_star"] = c_tau * R * R;
  out["M_star"] = c_tau * M * (2 * R + M);
  return out;
}

/// The same entries read from a computed report.
inline std::map<std::string, double> report_entries(const kdl::ConstantsReport& r) {
  const auto& k = r.key;
  const auto& s = r.stability;
  return {{"b_lambda", r.b_lambda}, {"c_tau", r.c_tau},       {"c_sigma", r.c_sigma}, {"g_bound", r.g_bound},
          {"k12", k.k12},           {"k22", k.k22},           {"k13", k.k13},         {"k23", k.k23},
          {"k14", k.k14},           {"k24", k.k24},           {"k15", k.k15},         {"k25", k.k25},
          {"k1", k.k1},             {"k2", k.k2},             {"d1", r.d.d1},         {"d2", r.d.d2},
          {"C.k", s.C.k},           {"rho", s.rho},           {"X0", s.X0},           {"T0", s.T0},
          {"D0", s.D0},             {"T_star", s.T_star},     {"K1_tilde", s.K1_tilde}, {"K2_tilde", s.K2_tilde},
          {"K", s.K},               {"K1", s.K1},             {"K2", s.K2},           {"theta", r.theta},
          {"M_spatial", r.M_spatial}, {"R_star", r.R_star},   {"M_star", r.M_star}};
}

}  // namespace kdl_test
