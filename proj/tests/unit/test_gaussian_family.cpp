#include "kdl/error.hpp"
#include "kdl/gaussian_family.hpp"
#include "kdl/norms.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kdl;

namespace {
PhaseSpace grid(double L, int n, double vmax, int nv) {
  return PhaseSpace(SpatialPartition(L, n, 1), VelocityGrid(vmax, nv));
}
}  // namespace

TEST_SUITE("gaussian_family") {
  TEST_CASE("component norms against a dense sweep") {
    const GaussianComponent c{0.8, 2.0, 1.6, Vec3(0.3, -0.1, 0.2), Vec3(-0.2, 0.1, 0)};
    // the weighted component factorizes over the 6 coordinates
    const double tau = 1.0;
    auto sup1d = [](double rate, double centre, double weight) {
      double m = 0.0;
      for (int i = -200000; i <= 200000; ++i) {
        const double x = i * 1e-5;
        m = std::max(m, std::exp(-rate * (x - centre) * (x - centre) + weight * x * x));
      }
      return m;
    };
    double best = c.amplitude;
    for (int i = 0; i < 3; ++i) best *= sup1d(c.alpha, c.center_x[i], tau) * sup1d(c.tau, c.center_v[i], tau);
    CHECK(component_m_norm(c, tau) >= best * (1 - 1e-12));
    CHECK(component_m_norm(c, tau) == doctest::Approx(best).epsilon(1e-8));
    CHECK(component_b_norm(c, tau) <= component_m_norm(c, tau));
    CHECK(component_m_norm(GaussianComponent{1.0, 2.0, 2.0}, 1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("metadata bounds the sampled field") {
    const PhaseSpace s = grid(3.0, 24, 3.0, 12);
    const GaussianMixture mix{{0.5, 2.0, 1.8, Vec3(0.2, 0, 0), Vec3(0, 0.1, 0)}, {0.3, 1.5, 2.0}};
    const MixtureMetadata md = mixture_metadata(mix, 1.0);
    const auto g = gaussian_field(s, mix);
    CHECK(m_norm(g, 1.0) <= md.R * (1 + 1e-12));
    CHECK(md.l1 == doctest::Approx(0.5 * std::pow(std::numbers::pi * std::numbers::pi / (2.0 * 1.8), 1.5) +
                                   0.3 * std::pow(std::numbers::pi * std::numbers::pi / 3.0, 1.5)));
    CHECK(l1_norm(g) <= md.l1 * 1.01);
    CHECK_THROWS_AS(mixture_metadata(mix, 1.5), DomainError);
  }

  TEST_CASE("samples lie in the requested class") {
    GaussianFamily fam;
    fam.tau = 1.0;
    fam.R = 2.0;
    fam.M = 3.0;
    auto rng = trial_rng(7, 0, 0);
    for (int k = 0; k < 200; ++k) {
      const SampledMixture s = sample_mixture(fam, rng);
      CHECK(s.mixture.size() >= 1);
      CHECK(s.mixture.size() <= 3);
      CHECK(s.metadata.R <= fam.R * (1 + 1e-12));
      CHECK(s.metadata.M <= fam.M * (1 + 1e-12));
      for (const auto& c : s.mixture) {
        CHECK(c.amplitude > 0.0);
        CHECK(c.alpha >= fam.tau * (1 + fam.rate_gap) * (1 - 1e-15));
        CHECK(c.tau <= 2 * fam.tau);
        CHECK(c.center_x.cwiseAbs().maxCoeff() <= fam.center_x);
      }
    }
  }

  TEST_CASE("trial streams are reproducible and distinct") {
    auto a = trial_rng(1, 2, 3), b = trial_rng(1, 2, 3), c = trial_rng(1, 2, 4);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
}
