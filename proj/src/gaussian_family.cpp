#include "kdl/gaussian_family.hpp"

#include "kdl/error.hpp"

#include <cmath>
#include <numbers>

namespace kdl {

namespace {

void require_decay(const GaussianComponent& c, double tau) {
  if (!(tau > 0.0)) throw DomainError("decay rate must be positive");
  if (!(c.alpha > tau) || !(c.tau > tau))
    throw DomainError("Gaussian component must decay faster than the norm rate");
}

// sup_x exp(-a |x - x0|^2 + t |x|^2) for a > t
double shifted_sup(double a, double t, const Vec3& x0) { return std::exp(a * t * x0.squaredNorm() / (a - t)); }

}  // namespace

double component_m_norm(const GaussianComponent& c, double tau) {
  require_decay(c, tau);
  return std::abs(c.amplitude) * shifted_sup(c.alpha, tau, c.center_x) * shifted_sup(c.tau, tau, c.center_v);
}

double component_b_norm(const GaussianComponent& c, double tau) {
  if (!(tau > 0.0) || !(c.tau > tau)) throw DomainError("Gaussian component must decay faster than the norm rate");
  return std::abs(c.amplitude) * shifted_sup(c.tau, tau, c.center_v);
}

// |g(x + y) - g(x)| <= |y| sup_{|z - x| <= 1} |grad_x g(z)|, and with r = |z - x0|
// the weight obeys |x| <= r + |x0| + 1. Maximising 2 alpha r exp(-alpha r^2 + tau (r + c)^2)
// over r gives the bound.
double component_lipschitz_bound(const GaussianComponent& c, double tau) {
  require_decay(c, tau);
  const double a = c.alpha;
  const double reach = c.center_x.norm() + 1.0;
  const double gap = a - tau;
  const double r = (2.0 * tau * reach + std::sqrt(4.0 * tau * tau * reach * reach + 8.0 * gap)) / (4.0 * gap);
  const double spatial = 2.0 * a * r * std::exp(-a * r * r + tau * (r + reach) * (r + reach));
  return std::abs(c.amplitude) * spatial * shifted_sup(c.tau, tau, c.center_v);
}

MixtureMetadata mixture_metadata(const GaussianMixture& mix, double tau) {
  MixtureMetadata m;
  m.tau = tau;
  for (const auto& c : mix) {
    m.R += component_m_norm(c, tau);
    m.M += component_lipschitz_bound(c, tau);
    m.l1 += std::abs(c.amplitude) * std::pow(std::numbers::pi * std::numbers::pi / (c.alpha * c.tau), 1.5);
  }
  return m;
}

void GaussianFamily::validate() const {
  if (!(tau > 0.0)) throw ConfigError("family tau must be positive");
  if (!(R > 0.0) || !(M > 0.0)) throw ConfigError("family R and M must be positive");
  if (max_components < 1) throw ConfigError("family needs at least one component");
  if (!(rate_gap > 0.0 && rate_gap < 1.0)) throw ConfigError("family rate_gap must lie in (0, 1)");
  if (!(center_x >= 0.0) || !(center_v >= 0.0)) throw ConfigError("family centre spreads must be nonnegative");
}

SampledMixture sample_mixture(const GaussianFamily& family, std::mt19937_64& rng) {
  family.validate();
  std::uniform_int_distribution<int> count(1, family.max_components);
  std::uniform_real_distribution<double> rate(family.tau * (1.0 + family.rate_gap), 2.0 * family.tau);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> cx(-family.center_x, family.center_x);
  std::uniform_real_distribution<double> cv(-family.center_v, family.center_v);
  SampledMixture out;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    GaussianComponent c;
    c.amplitude = 0.1 + unit(rng);
    c.alpha = rate(rng);
    c.tau = rate(rng);
    c.center_x = Vec3(cx(rng), cx(rng), cx(rng));
    c.center_v = Vec3(cv(rng), cv(rng), cv(rng));
    out.mixture.push_back(c);
  }
  const MixtureMetadata raw = mixture_metadata(out.mixture, family.tau);
  const double fill = 0.5 + 0.5 * unit(rng);
  const double scale = fill * std::min(family.R / raw.R, family.M / raw.M);
  for (auto& c : out.mixture) c.amplitude *= scale;
  out.metadata = mixture_metadata(out.mixture, family.tau);
  return out;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

}  // namespace kdl
