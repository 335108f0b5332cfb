#pragma once

#include "kdl/phase_space.hpp"

#include <vector>

namespace kdl {

/// Midpoint rule in x times the velocity weights.
template <typename Scalar>
double l1_norm(const DistributionField<Scalar>& g);

/// max |g| / m_{alpha,tau} over the grid samples.
template <typename Scalar>
double weighted_sup(const DistributionField<Scalar>& g, const WeightSpec& weight);

/// B_tau norm: max |g| exp(tau v^2).
template <typename Scalar>
double b_norm(const DistributionField<Scalar>& g, double tau) {
  return weighted_sup(g, WeightSpec{0.0, tau});
}

/// M_tau norm: max |g| exp(tau (x^2 + v^2)).
template <typename Scalar>
double m_norm(const DistributionField<Scalar>& g, double tau) {
  return weighted_sup(g, WeightSpec{tau, tau});
}

struct NormReport {
  double l1 = 0.0;
  std::vector<double> taus;
  std::vector<double> b_norm;
  std::vector<double> m_norm;
};

template <typename Scalar>
NormReport norms(const DistributionField<Scalar>& g, const std::vector<double>& taus);

struct Moments {
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double energy = 0.0;
};

/// Integrals of 1, v_i and v^2 against g.
template <typename Scalar>
Moments moments(const DistributionField<Scalar>& g);

template <typename Scalar>
double min_value(const DistributionField<Scalar>& g) {
  return g.values().size() ? static_cast<double>(g.values().minCoeff()) : 0.0;
}

}  // namespace kdl
