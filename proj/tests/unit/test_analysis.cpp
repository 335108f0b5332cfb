#include "kdl/analysis.hpp"
#include "kdl/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kdl;
using Field = DistributionField<double>;

namespace {
PhaseSpace grid(double L, int n, int m, double vmax, int nv) {
  return PhaseSpace(SpatialPartition(L, n, m), VelocityGrid(vmax, nv));
}

// max over every corner threshold of |CDF_g - CDF_h|, by direct summation
double brute_discrepancy(const Field& g, const Field& h) {
  const auto& p = g.partition();
  const auto& v = g.velocity();
  const int n = p.fine_cells_per_axis(), k = v.nodes_per_axis();
  const double mg = g.values().sum(), mh = h.values().sum();
  double best = 0.0;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      for (int c = 1; c <= n; ++c)
        for (int d = 1; d <= k; ++d)
          for (int e = 1; e <= k; ++e)
            for (int f = 1; f <= k; ++f) {
              double sg = 0.0, sh = 0.0;
              for (int x = 0; x < a; ++x)
                for (int y = 0; y < b; ++y)
                  for (int z = 0; z < c; ++z)
                    for (int u = 0; u < d; ++u)
                      for (int w = 0; w < e; ++w)
                        for (int q = 0; q < f; ++q) {
                          const int cell = p.index(x, y, z), node = v.index(u, w, q);
                          sg += g(cell, node);
                          sh += h(cell, node);
                        }
              best = std::max(best, std::abs(sg / mg - sh / mh));
            }
  return best;
}
}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("norm ordering and values") {
    const PhaseSpace s = grid(2.0, 8, 1, 3.0, 6);
    const Field b = gaussian_field(s, GaussianComponent{1.0, 0.0, 1.0});
    CHECK(b_norm(b, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    const Field g = gaussian_field(s, GaussianComponent{0.7, 1.5, 1.2, Vec3(0.2, 0, 0), Vec3(0, -0.1, 0)});
    const NormReport r = norms(g, {0.5, 1.0});
    CHECK(r.b_norm[0] <= r.b_norm[1]);
    CHECK(r.b_norm[1] <= r.m_norm[1]);
    CHECK(moments(Field::zeros(s)).mass == 0.0);
  }

  TEST_CASE("discrepancy against brute force") {
    const PhaseSpace s = grid(1.0, 2, 1, 2.0, 3);
    const Field g = gaussian_field(s, GaussianComponent{1.0, 1.0, 1.0});
    const Field h = gaussian_field(s, GaussianComponent{1.0, 1.0, 1.0, Vec3(0.4, -0.2, 0.1), Vec3(0.3, 0, -0.5)});
    const Discrepancy d = discrepancy(g, h);
    CHECK_FALSE(d.marginal_only);
    CHECK(d.value == doctest::Approx(brute_discrepancy(g, h)).epsilon(1e-13));
    CHECK(discrepancy(g, g).value == 0.0);
    CHECK(discrepancy(g, 3.0 * g).value <= 1e-15);
  }

  TEST_CASE("discrepancy of separated point masses is one") {
    const PhaseSpace s = grid(1.0, 2, 1, 1.0, 2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s.cells(), s.nodes()), b = a;
    a(0, 0) = 1.0;
    b(s.cells() - 1, s.nodes() - 1) = 1.0;
    CHECK(discrepancy(Field(s, a), Field(s, b)).value == doctest::Approx(1.0));
  }

  TEST_CASE("discrepancy is a metric on samples") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const PhaseSpace s = grid(1.0, 2, 1, 1.0, 3);
    auto rand = [&] {
      Eigen::MatrixXd v(s.cells(), s.nodes());
      for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
      return Field(s, v);
    };
    for (int k = 0; k < 10; ++k) {
      const Field a = rand(), b = rand(), c = rand();
      CHECK(std::abs(discrepancy(a, b).value - discrepancy(b, a).value) <= 1e-14);
      CHECK(discrepancy(a, c).value <= discrepancy(a, b).value + discrepancy(b, c).value + 1e-14);
    }
  }

  TEST_CASE("discrepancy errors and the marginal fallback") {
    const PhaseSpace s = grid(1.0, 2, 1, 1.0, 2);
    const Field g = gaussian_field(s, GaussianComponent{1.0, 1.0, 1.0});
    CHECK_THROWS_AS(discrepancy(g, Field::zeros(s)), DomainError);
    CHECK_THROWS_AS(discrepancy(g, -1.0 * g), PreconditionError);
    const PhaseSpace big = grid(1.0, 2, 1, 2.0, 14);
    const Field a = gaussian_field(big, GaussianComponent{1.0, 1.0, 1.0});
    const Field b = gaussian_field(big, GaussianComponent{1.0, 1.0, 1.0, Vec3::Zero(), Vec3(0.5, 0, 0)});
    const Discrepancy d = discrepancy(a, b);
    CHECK(d.marginal_only);
    CHECK(d.method == "marginal-1d");
    CHECK(d.value > 0.0);
  }

  TEST_CASE("Lipschitz estimate") {
    const PhaseSpace s = grid(3.0, 24, 1, 3.0, 6);
    const GaussianComponent c{1.0, 2.0, 2.0};
    const Field g = gaussian_field(s, c);
    const std::vector<Vec3> ys{Vec3(0.25, 0, 0), Vec3(0, 0.25, 0.25), Vec3(0.5, 0, 0)};
    const auto est = lipschitz_estimate(g, 1.0, ys, 2.0);
    CHECK(est.warnings.empty());
    CHECK(est.R_est == doctest::Approx(m_norm(g, 1.0)));
    const double bound = component_lipschitz_bound(c, 1.0);
    CHECK(est.M_est <= bound);
    CHECK(est.M_est > 0.0);
    const auto scaled = lipschitz_estimate(3.0 * g, 1.0, ys);
    CHECK(scaled.M_est == doctest::Approx(3.0 * est.M_est).epsilon(1e-12));
    CHECK_FALSE(lipschitz_estimate(g, 2.5, ys, 2.0).warnings.empty());
    CHECK_THROWS_AS(lipschitz_estimate(g, 1.0, {Vec3(2, 0, 0)}), ConfigError);
  }

  TEST_CASE("order fit") {
    ConvergenceTable t;
    for (double h : {0.4, 0.2, 0.1}) t.rows.push_back(ConvergenceRow{h / 2, h / 2, 1, 3.0 * h * h});
    fit_order(t);
    CHECK(t.order == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.constant == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(t.rows.front().dt == 0.2);
    ConvergenceTable zero;
    zero.rows.push_back(ConvergenceRow{0.1, 0.1, 1, 0.0});
    fit_order(zero);
    CHECK(zero.order == 0.0);
  }

  TEST_CASE("convergence study") {
    const PhaseSpace s = grid(2.0, 4, 1, 2.0, 4);
    SchemeParams p;
    p.T = 0.4;
    p.model.kernel.b0 = 0.0;
    const auto zero = convergence_study(Field::zeros(s), p, {{0.2, 4}, {0.1, 2}}, 0.05);
    for (const auto& r : zero.rows) CHECK(r.error == 0.0);
    CHECK_THROWS_AS(convergence_study(Field::zeros(s), p, {{0.2, 1}}, 0.2), ConfigError);
    CHECK_THROWS_AS(convergence_study(Field::zeros(s), p, {{0.2, 1}, {0.15, 1}}, 0.05), ConfigError);

    const PhaseSpace fine = grid(2.0, 8, 1, 2.0, 4);
    const Field g = gaussian_field(fine, GaussianComponent{1.0, 1.5, 1.5});
    const auto t = convergence_study(g, p, {{0.1, 4}, {0.05, 2}, {0.025, 1}}, 0.025 / 8);
    CHECK(t.rows[0].error > t.rows[1].error);
    CHECK(t.rows[1].error > t.rows[2].error);
    CHECK(t.order >= 0.9);
  }

  TEST_CASE("envelope") {
    const PhaseSpace s = grid(2.0, 8, 1, 3.0, 6);
    SchemeParams p;
    p.dt = 0.1;
    p.T = 0.5;
    p.model.kernel.b0 = 0.0;
    const auto zero = run(Field::zeros(s), p);
    CHECK(envelope_check(zero, 1.0, 1.0) == 0.0);
    // U^t of the envelope is the envelope, up to streaming interpolation
    const auto free = run(gaussian_field(s, GaussianComponent{0.01, 1.0, 1.0}), p);
    CHECK(envelope_check(free, 0.01, 1.0) <= 0.05);
    CHECK(envelope_excess(gaussian_field(s, GaussianComponent{0.01, 1.0, 1.0}), 0.0, 0.01, 1.0) <= 1e-15);
  }
}
