#include "kdl/error.hpp"
#include "kdl/norms.hpp"
#include "kdl/phase_space.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace kdl;

namespace {
PhaseSpace grid(double L, int n, int m, double vmax, int nv) {
  return PhaseSpace(SpatialPartition(L, n, m), VelocityGrid(vmax, nv));
}
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_SUITE("phase_space") {
  TEST_CASE("partition diameter") {
    CHECK(SpatialPartition(1.0, 8, 1).delta_x() == doctest::Approx(0.25 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(SpatialPartition(1.0, 8, 2).delta_x() == doctest::Approx(0.5 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(SpatialPartition(1.0, 8, 3), ConfigError);
    CHECK_THROWS_AS(SpatialPartition(1.0, 0, 1), ConfigError);
    CHECK_THROWS_AS(SpatialPartition(-1.0, 8, 1), ConfigError);
  }

  TEST_CASE("delta_x equals the largest measured block diagonal") {
    for (int m : {1, 2, 4}) {
      const SpatialPartition p(1.5, 8, m);
      double largest = 0.0;
      for (int b = 0; b < p.blocks(); ++b) largest = std::max(largest, p.block_diameter(b));
      CHECK(std::abs(p.delta_x() - largest) <= 1e-14);
    }
  }

  TEST_CASE("blocks partition the fine cells") {
    const SpatialPartition p(1.0, 8, 2);
    std::vector<int> seen(p.cells(), 0);
    for (int b = 0; b < p.blocks(); ++b) {
      CHECK(p.members(b).size() == 8);
      for (int c : p.members(b)) {
        CHECK(p.block_of(c) == b);
        ++seen[c];
      }
    }
    for (int s : seen) CHECK(s == 1);
  }

  TEST_CASE("velocity grid is symmetric") {
    const VelocityGrid g(3.0, 6);
    for (int j = 0; j < g.size(); ++j) CHECK((g.node(j) + g.node(g.mirror(j))).norm() == 0.0);
  }

  TEST_CASE("gaussian field samples") {
    const PhaseSpace s = grid(4.0, 16, 1, 4.0, 16);
    CHECK(gaussian_field(s, GaussianComponent{0.0, 1.0, 1.0}).values().isZero());
    const auto g = gaussian_field(s, GaussianComponent{1.0, 1.0, 1.0});
    CHECK(m_norm(g, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    // midpoint rule on h = 0.5 over +-4 is spectrally accurate for this Gaussian
    CHECK(l1_norm(g) == doctest::Approx(std::pow(kPi, 3.0)).epsilon(1e-6));
    CHECK_THROWS_AS(gaussian_field(s, GaussianComponent{1.0, 1.0, 0.0}), ConfigError);
  }

  TEST_CASE("energy of a Maxwellian with unit spatial mass") {
    const PhaseSpace s = grid(4.0, 16, 1, 5.0, 20);
    const double a = std::pow(1.0 / kPi, 1.5);
    const auto g = gaussian_field(s, GaussianComponent{a, 1.0, 1.0});
    CHECK(moments(g).energy == doctest::Approx(1.5 * std::pow(kPi, 1.5)).epsilon(1e-6));
    CHECK(moments(g).momentum.norm() <= 1e-12);
  }

  TEST_CASE("L1 is nonnegative and positively homogeneous") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const PhaseSpace s = grid(1.0, 4, 2, 2.0, 4);
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd v(s.cells(), s.nodes());
      for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
      const DistributionField<double> g(s, v);
      const double c = u(rng);
      CHECK(l1_norm(g) >= 0.0);
      CHECK(l1_norm(c * g) == doctest::Approx(c * l1_norm(g)).epsilon(1e-12));
    }
  }

  TEST_CASE("field rejects wrong shapes and non-finite values") {
    const PhaseSpace s = grid(1.0, 2, 1, 1.0, 2);
    CHECK_THROWS_AS(DistributionField<double>(s, Eigen::MatrixXd::Zero(3, 3)), PreconditionError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(s.cells(), s.nodes());
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(DistributionField<double>(s, bad), NumericalError);
    const auto other = grid(1.0, 4, 1, 1.0, 2);
    CHECK_THROWS(DistributionField<double>::zeros(s) + DistributionField<double>::zeros(other));
  }

  TEST_CASE("snapshot round trip and header") {
    const auto dir = std::filesystem::temp_directory_path() / "kdl_unit_snapshots";
    std::filesystem::create_directories(dir);
    const PhaseSpace s = grid(1.0, 2, 1, 2.0, 3);
    const auto g = gaussian_field(s, GaussianComponent{1.0, 1.0, 1.0, Vec3(0.1, 0, 0), Vec3(0, 0.2, 0)});
    write_snapshot(dir / "a.kdl1", g);
    const auto back = read_snapshot(dir / "a.kdl1", s);
    CHECK(back.values() == g.values());
    const auto dims = read_snapshot_dims(dir / "a.kdl1");
    CHECK(dims == std::array<std::uint32_t, 6>{2, 2, 2, 3, 3, 3});
    // layout: magic, version, six u32, then values with the velocity index fastest
    std::ifstream is(dir / "a.kdl1", std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::string(magic, 4) == "KDL1");
    CHECK(is.get() == kSnapshotVersion);
    is.seekg(4 + 1 + 6 * 4 + 8 * 1);
    double second;
    is.read(reinterpret_cast<char*>(&second), 8);
    CHECK(second == g(0, 1));
    CHECK(std::filesystem::file_size(dir / "a.kdl1") == 4 + 1 + 24 + 8 * g.values().size());

    CHECK_THROWS_AS(read_snapshot(dir / "a.kdl1", grid(1.0, 4, 1, 2.0, 3)), PreconditionError);
    CHECK_THROWS_AS(read_snapshot(dir / "missing.kdl1", s), IoError);
    std::ofstream(dir / "bad.kdl1") << "NOPE";
    CHECK_THROWS_AS(read_snapshot(dir / "bad.kdl1", s), IoError);
  }
}
