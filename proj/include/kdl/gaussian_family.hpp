#pragma once

#include "kdl/phase_space.hpp"

#include <cstdint>
#include <random>

namespace kdl {

/// Closed-form bounds for a Gaussian mixture at decay rate tau.
struct MixtureMetadata {
  double tau = 0.0;
  /// Upper bound on the M_tau norm.
  double R = 0.0;
  /// Upper bound on sup_{0 < |y| <= 1} ||T_y g - g||_{M_tau} / |y|.
  double M = 0.0;
  /// Integral of |g| over R^6 (sum of component integrals).
  double l1 = 0.0;
};

/// sup |g| exp(tau (x^2 + v^2)) for one component; needs alpha, tau > rate.
double component_m_norm(const GaussianComponent& c, double tau);
/// Same with weight exp(tau v^2) only.
double component_b_norm(const GaussianComponent& c, double tau);
/// Bound on the translation-Lipschitz constant of one component in M_tau.
double component_lipschitz_bound(const GaussianComponent& c, double tau);
/// Throws DomainError unless every component decays faster than `tau`.
MixtureMetadata mixture_metadata(const GaussianMixture& mix, double tau);

/// Random Gaussian mixtures with positive amplitudes, rescaled into
/// M_tau(R, M) using the closed-form metadata.
struct GaussianFamily {
  double tau = 1.0;
  double R = 1.0;
  double M = 1.0;
  int max_components = 3;
  /// Component rates are drawn from [tau (1 + rate_gap), 2 tau].
  double rate_gap = 0.25;
  /// Largest |coordinate| of the x and v centres.
  double center_x = 0.3;
  double center_v = 0.3;

  void validate() const;
};

struct SampledMixture {
  GaussianMixture mixture;
  MixtureMetadata metadata;
};

SampledMixture sample_mixture(const GaussianFamily& family, std::mt19937_64& rng);

/// Independent stream for trial `trial` of a campaign seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

}  // namespace kdl
