#include "kdl/error.hpp"
#include "kdl/gaussian_family.hpp"
#include "kdl/norms.hpp"
#include "kdl/operators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kdl;
using Field = DistributionField<double>;

namespace {
PhaseSpace grid(double L, int n, int m, double vmax, int nv) {
  return PhaseSpace(SpatialPartition(L, n, m), VelocityGrid(vmax, nv));
}
CollisionModel maxwell(double v_max = 3.0) {
  return CollisionModel{KernelSpec{}.with_velocity_cutoff(v_max), SphereQuadrature(2, 4)};
}
Field random_field(const PhaseSpace& s, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd v(s.cells(), s.nodes());
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
  return Field(s, v);
}
const StreamingScheme kPeriodic{StreamingMode::conservative_remap, BoundaryMode::periodic};
}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("post-collision map conserves momentum and energy") {
    CHECK(post_collision(Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)).first == Vec3(-1, 0, 0));
    CHECK(post_collision(Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)).second == Vec3(1, 0, 0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
      const Vec3 v(n(rng), n(rng), n(rng)), w(n(rng), n(rng), n(rng));
      const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
      const auto [vp, wp] = post_collision(v, w, dir);
      CHECK((vp + wp - v - w).norm() <= 1e-14 * (1.0 + v.norm() + w.norm()));
      CHECK(std::abs(vp.squaredNorm() + wp.squaredNorm() - v.squaredNorm() - w.squaredNorm()) <=
            1e-14 * (1.0 + v.squaredNorm() + w.squaredNorm()));
    }
  }

  TEST_CASE("streaming") {
    std::mt19937_64 rng(2);
    const PhaseSpace s = grid(1.0, 8, 1, 2.0, 4);
    const Field g = random_field(s, rng);
    CHECK(stream(g, 0.0).values() == g.values());
    CHECK(translate(g, Vec3::Zero()).values() == g.values());
    // conservative remap keeps L1 of nonnegative fields
    for (double t : {0.1, -0.37, 1.3}) CHECK(l1_norm(stream(g, t, kPeriodic)) == doctest::Approx(l1_norm(g)).epsilon(1e-12));
    const Field gauss = gaussian_field(grid(3.0, 16, 1, 2.0, 4), GaussianComponent{1.0, 1.5, 1.5});
    OutflowLeak leak;
    const Field moved = stream(gauss, 0.1, StreamingScheme{}, &leak);
    CHECK(leak.mass > 0.0);
    CHECK(l1_norm(moved) + leak.mass == doctest::Approx(l1_norm(gauss)).epsilon(1e-12));
  }

  TEST_CASE("grid-aligned shifts permute samples") {
    std::mt19937_64 rng(3);
    const PhaseSpace s = grid(1.0, 8, 1, 2.0, 4);
    const Field g = random_field(s, rng);
    const double h = s.space->spacing();
    const Field moved = translate(g, Vec3(h, -2 * h, 0), kPeriodic);
    const auto& p = *s.space;
    for (int c = 0; c < p.cells(); ++c) {
      auto [i, j, k] = p.axis_indices(c);
      const int src = p.index((i + 1) % 8, (j + 6) % 8, k);
      CHECK(moved.values().row(c) == g.values().row(src));
    }
    CHECK(translate(moved, Vec3(-h, 2 * h, 0), kPeriodic).values() == g.values());
    CHECK(b_norm(moved, 1.0) == b_norm(g, 1.0));
  }

  TEST_CASE("translation Lipschitz bound of a Gaussian") {
    const PhaseSpace s = grid(3.0, 24, 1, 3.0, 6);
    const GaussianComponent c{1.0, 2.0, 2.0, Vec3(0.1, 0, 0), Vec3::Zero()};
    const Field g = gaussian_field(s, c);
    const double bound = component_lipschitz_bound(c, 1.0);
    for (const Vec3& y : {Vec3(0.05, 0, 0), Vec3(0, 0.03, -0.04)}) {
      const double measured = m_norm(translate(g, y) - g, 1.0) / y.norm();
      CHECK(measured <= bound);
    }
  }

  TEST_CASE("homogenization") {
    std::mt19937_64 rng(4);
    const PhaseSpace s = grid(1.0, 4, 2, 2.0, 4);
    const Field g = random_field(s, rng, -1.0, 1.0);
    const Field pg = homogenize(g);
    CHECK((homogenize(pg).values() - pg.values()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(moments(pg).mass == doctest::Approx(moments(g).mass).epsilon(1e-13));
    CHECK(l1_norm(pg) <= l1_norm(g) + 1e-12);
    CHECK(b_norm(pg, 1.0) <= b_norm(g, 1.0) + 1e-12);

    // slab of two fine cells holding 1 and 3
    const PhaseSpace slab(SpatialPartition(1.0, 2, 2), VelocityGrid(1.0, 2));
    Eigen::MatrixXd v = Eigen::MatrixXd::Ones(8, 8);
    v.row(slab.space->index(1, 0, 0)).setConstant(3.0);
    const Field two(slab, v);
    const Field avg = homogenize(two);
    CHECK(avg(0, 0) == doctest::Approx(1.25));
    const PhaseSpace pair(SpatialPartition(1.0, 2, 1), VelocityGrid(1.0, 2));
    CHECK(homogenize(Field(pair, v)).values() == v);
  }

  TEST_CASE("loss term of a unit-mass Maxwellian partner") {
    const PhaseSpace s = grid(0.5, 1, 1, 5.0, 16);
    const Field g = gaussian_field(s, GaussianComponent{1.0, 0.0, 2.0});
    // partner has unit velocity mass in the single cell
    const Field h = gaussian_field(s, GaussianComponent{std::pow(1.0 / std::numbers::pi, 1.5), 0.0, 1.0});
    const Field loss = loss_term(g, h, maxwell(5.0));
    CHECK((loss.values() - g.values()).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(loss_term(g, Field::zeros(s), maxwell(5.0)).values().isZero());
  }

  TEST_CASE("gain and loss are nonnegative and monotone") {
    std::mt19937_64 rng(5);
    const PhaseSpace s = grid(1.0, 2, 1, 2.0, 4);
    const Field g1 = random_field(s, rng), h = random_field(s, rng);
    const Field g2 = g1 + random_field(s, rng);
    const auto m = maxwell(2.0);
    CHECK(gain_term(g1, h, m).values().minCoeff() >= 0.0);
    CHECK(loss_term(g1, h, m).values().minCoeff() >= 0.0);
    CHECK((loss_term(g2, h, m).values() - loss_term(g1, h, m).values()).minCoeff() >= 0.0);
    CHECK((gain_term(g2, h, m).values() - gain_term(g1, h, m).values()).minCoeff() >= -1e-15);
    CHECK(collision(Field::zeros(s), m).values().isZero());
    CHECK(gain_term(Field::zeros(s), Field::zeros(s), m).values().isZero());
  }

  TEST_CASE("bilinearity") {
    std::mt19937_64 rng(6);
    const PhaseSpace s = grid(1.0, 2, 1, 2.0, 4);
    const Field a = random_field(s, rng, -1, 1), b = random_field(s, rng, -1, 1), h = random_field(s, rng, -1, 1);
    const auto m = maxwell(2.0);
    const Field lhs = bilinear_collision(a + 2.0 * b, h, m);
    const Field rhs = bilinear_collision(a, h, m) + 2.0 * bilinear_collision(b, h, m);
    CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("collision moments are small and shrink with the velocity grid") {
    auto defect = [](int nodes) {
      const PhaseSpace s = grid(0.5, 1, 1, 4.0, nodes);
      const Field g = gaussian_field(s, GaussianMixture{GaussianComponent{1.0, 0.0, 1.0, Vec3::Zero(), Vec3(0.7, 0, 0)},
                                                         GaussianComponent{1.0, 0.0, 1.5, Vec3::Zero(), Vec3(-0.7, 0.3, 0)}});
      const Moments m = moments(collision(g, maxwell(4.0)));
      const Moments ref = moments(g);
      return std::array<double, 3>{std::abs(m.mass) / ref.mass, m.momentum.norm() / ref.mass,
                                   std::abs(m.energy) / ref.energy};
    };
    const auto coarse = defect(8), fine = defect(16);
    for (int i = 0; i < 3; ++i) CHECK(fine[i] <= 0.5 * coarse[i] + 1e-14);
  }

  TEST_CASE("homogenized collision") {
    std::mt19937_64 rng(7);
    const PhaseSpace s = grid(1.0, 2, 1, 2.0, 4);
    const Field g = random_field(s, rng);
    const auto m = maxwell(2.0);
    // single-cell blocks make pi the identity
    CHECK(homogenized_collision(g, m).values() == collision(g, m).values());
    CHECK(defect(g, g, 0.0, 0.0, m).values().cwiseAbs().maxCoeff() <= 1e-15);
    const PhaseSpace blocks = grid(1.0, 2, 2, 2.0, 4);
    const Field pg = homogenize(g.rebind(blocks));
    CHECK((homogenized_collision(pg, m).values() - collision(pg, m).values()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("collision frequency") {
    const PhaseSpace s = grid(1.0, 2, 2, 4.0, 8);
    const Field g = gaussian_field(s, GaussianComponent{0.3, 0.0, 1.0});
    const Field e = collision_frequency(g, maxwell(4.0));
    // Maxwell kernel: E is the cell density, the same at every velocity
    const double density = g.values().row(0).sum() * s.velocity->weight();
    CHECK((e.values().array() - density).abs().maxCoeff() <= 1e-12);
    CHECK(collision_frequency(Field::zeros(s), maxwell(4.0)).values().isZero());
    CHECK_THROWS_AS(collision_frequency(-1.0 * g, maxwell(4.0)), PreconditionError);
  }
}
