#include "kdl/error.hpp"
#include "kdl/kernels.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kdl;

namespace {
constexpr double kPi = std::numbers::pi;
KernelSpec soft(double b0, double lambda) {
  KernelSpec k;
  k.form = KernelForm::power_law_soft;
  k.b0 = b0;
  k.lambda = lambda;
  return k;
}
}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("kernel values") {
    KernelSpec maxwell;
    CHECK(kernel_value(maxwell, 0.7, 0.3) == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-15));
    CHECK(kernel_value(soft(1.0, 1.0), 2.0, -0.2) == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-15));
    const KernelSpec k = soft(1.0, 1.0).with_velocity_cutoff(4.0);
    CHECK(k.speed_floor == doctest::Approx(4e-6));
    CHECK(kernel_value(k, 0.0, 1.0) == doctest::Approx(1.0 / (4.0 * kPi) / k.speed_floor));
    CHECK(kernel_value(k, 1e-9, 1.0) == kernel_value(k, 0.0, 1.0));
    CHECK_THROWS_AS(kernel_value(k, -1.0, 0.0), PreconditionError);
  }

  TEST_CASE("kernel validation") {
    CHECK_THROWS_AS(soft(1.0, 2.0).validate(), ConfigError);
    CHECK_THROWS_AS(soft(1.0, -0.1).validate(), ConfigError);
    CHECK_THROWS_AS(soft(0.0, 1.0).validate(), ConfigError);
    KernelSpec m;
    m.lambda = 1.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    CHECK_THROWS_AS(parse_kernel_form("hard_sphere"), ConfigError);
    CHECK(parse_kernel_form(to_string(KernelForm::power_law_soft)) == KernelForm::power_law_soft);
  }

  TEST_CASE("sphere quadrature") {
    for (auto [nt, np] : {std::pair{2, 4}, {3, 6}, {4, 8}}) {
      const SphereQuadrature q(nt, np);
      CHECK(q.weights().sum() == doctest::Approx(4.0 * kPi).epsilon(1e-12));
      for (int k = 0; k < q.size(); ++k) {
        CHECK(std::abs(q.direction(k).norm() - 1.0) <= 1e-14);
        CHECK((q.direction(k) + q.direction(q.antipode(k))).norm() <= 1e-15);
      }
      CHECK(static_cast<int>(q.half_set().size()) * 2 == q.size());
      // odd integrands cancel
      Eigen::Vector3d first = Eigen::Vector3d::Zero();
      double cubic = 0.0;
      for (int k = 0; k < q.size(); ++k) {
        first += q.weights()(k) * q.direction(k);
        cubic += q.weights()(k) * std::pow(q.direction(k)(0), 3) * q.direction(k)(2);
      }
      CHECK(first.norm() <= 1e-14);
      CHECK(std::abs(cubic) <= 1e-14);
    }
    CHECK_THROWS_AS(SphereQuadrature(2, 3), ConfigError);
  }

  TEST_CASE("angular integral satisfies the cutoff bound") {
    CHECK(angular_integral(KernelSpec{}, SphereQuadrature(2, 4), 3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(angular_integral(soft(1.0, 1.0), SphereQuadrature(2, 4), 4.0) == doctest::Approx(0.25).epsilon(1e-14));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> b(0.1, 3.0), l(0.0, 1.99);
    const double v_max = 4.0;
    for (int trial = 0; trial < 10; ++trial) {
      const KernelSpec k = soft(b(rng), l(rng)).with_velocity_cutoff(v_max);
      const SphereQuadrature q(3, 6);
      for (int i = 0; i < 100; ++i) {
        const double s = k.speed_floor * std::pow(10.0 * v_max / k.speed_floor, i / 99.0);
        CHECK(angular_integral(k, q, s) <= k.b0 * std::pow(s, -k.lambda) * (1.0 + 1e-10));
      }
    }
  }

  TEST_CASE("Gauss Pi function") {
    CHECK(gauss_pi(0.0) == 1.0);
    CHECK(gauss_pi(1.0) == 1.0);
    using hp = boost::multiprecision::cpp_bin_float_50;
    const double sqrt_pi = static_cast<double>(boost::multiprecision::sqrt(boost::math::constants::pi<hp>()));
    CHECK(gauss_pi(-0.5) == doctest::Approx(sqrt_pi).epsilon(1e-15));
    for (double z = 0.05; z <= 5.0; z += 0.05) {
      CHECK(gauss_pi(z) == doctest::Approx(z * gauss_pi(z - 1.0)).epsilon(1e-9));
      const double oracle = static_cast<double>(boost::math::tgamma(hp(z) + 1));
      CHECK(gauss_pi(z) == doctest::Approx(oracle).epsilon(1e-10));
    }
    CHECK_THROWS_AS(gauss_pi(-1.0), DomainError);
  }
}
