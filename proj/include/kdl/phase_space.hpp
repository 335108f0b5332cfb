#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace kdl {

using Vec3 = Eigen::Vector3d;

/// Uniform symmetric tensor grid on [-v_max, v_max]^3. Nodes sit at cell
/// centres, so the node set is closed under v -> -v and every node carries the
/// same weight h^3.
class VelocityGrid {
 public:
  VelocityGrid(double v_max, int nodes_per_axis);

  double v_max() const { return v_max_; }
  int nodes_per_axis() const { return n_; }
  int size() const { return n_ * n_ * n_; }
  double spacing() const { return h_; }
  double weight() const { return h_ * h_ * h_; }

  double coordinate(int k) const { return -v_max_ + (k + 0.5) * h_; }
  int index(int ix, int iy, int iz) const { return (ix * n_ + iy) * n_ + iz; }
  std::array<int, 3> axis_indices(int node) const;
  Vec3 node(int j) const { return nodes_.row(j).transpose(); }
  /// Index of the node -v.
  int mirror(int j) const;

  const Eigen::Matrix<double, Eigen::Dynamic, 3>& nodes() const { return nodes_; }
  const Eigen::VectorXd& speed_squared() const { return speed2_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  bool operator==(const VelocityGrid& o) const { return v_max_ == o.v_max_ && n_ == o.n_; }

 private:
  double v_max_;
  int n_;
  double h_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes_;
  Eigen::VectorXd speed2_;
  Eigen::VectorXd weights_;
};

/// Cubic box [-L, L]^3 cut into n^3 fine cells; homogenization cells are
/// m^3 blocks of fine cells.
class SpatialPartition {
 public:
  SpatialPartition(double half_width, int fine_cells_per_axis, int block_factor);

  double half_width() const { return half_width_; }
  int fine_cells_per_axis() const { return n_; }
  int block_factor() const { return m_; }
  int blocks_per_axis() const { return n_ / m_; }
  int cells() const { return n_ * n_ * n_; }
  int blocks() const { return blocks_per_axis() * blocks_per_axis() * blocks_per_axis(); }
  double spacing() const { return h_; }
  double cell_volume() const { return h_ * h_ * h_; }
  double block_volume() const { return cell_volume() * m_ * m_ * m_; }
  /// Partition diameter: sup of the cell diameters.
  double delta_x() const { return delta_x_; }

  int index(int ix, int iy, int iz) const { return (ix * n_ + iy) * n_ + iz; }
  std::array<int, 3> axis_indices(int cell) const;
  double coordinate(int k) const { return -half_width_ + (k + 0.5) * h_; }
  Vec3 center(int cell) const { return centers_.row(cell).transpose(); }
  const Eigen::Matrix<double, Eigen::Dynamic, 3>& centers() const { return centers_; }
  const Eigen::VectorXd& radius_squared() const { return radius2_; }

  int block_of(int cell) const { return block_of_[cell]; }
  /// Fine cells of block b, in increasing index order.
  std::span<const int> members(int block) const;
  /// Diagonal of block b measured from its corner coordinates.
  double block_diameter(int block) const;

  /// Same fine grid, different homogenization blocks.
  SpatialPartition with_block_factor(int block_factor) const {
    return SpatialPartition(half_width_, n_, block_factor);
  }

  bool same_fine_grid(const SpatialPartition& o) const {
    return half_width_ == o.half_width_ && n_ == o.n_;
  }
  bool operator==(const SpatialPartition& o) const { return same_fine_grid(o) && m_ == o.m_; }

 private:
  double half_width_;
  int n_;
  int m_;
  double h_;
  double delta_x_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> centers_;
  Eigen::VectorXd radius2_;
  std::vector<int> block_of_;
  std::vector<int> member_offsets_;
  std::vector<int> members_;
};

SpatialPartition build_partition(double half_width, int fine_cells_per_axis, int block_factor);

/// Shared, immutable description of the discretized phase space.
struct PhaseSpace {
  std::shared_ptr<const SpatialPartition> space;
  std::shared_ptr<const VelocityGrid> velocity;

  PhaseSpace() = default;
  PhaseSpace(SpatialPartition s, VelocityGrid v)
      : space(std::make_shared<const SpatialPartition>(std::move(s))),
        velocity(std::make_shared<const VelocityGrid>(std::move(v))) {}
  PhaseSpace(std::shared_ptr<const SpatialPartition> s, std::shared_ptr<const VelocityGrid> v)
      : space(std::move(s)), velocity(std::move(v)) {}

  int cells() const { return space->cells(); }
  int nodes() const { return velocity->size(); }
  /// Quadrature weight of one (cell, node) sample.
  double sample_volume() const { return space->cell_volume() * velocity->weight(); }
  PhaseSpace with_block_factor(int m) const;
  bool operator==(const PhaseSpace& o) const { return *space == *o.space && *velocity == *o.velocity; }
};

/// Weight m_{alpha,tau}(x, v) = exp(-alpha x^2 - tau v^2).
struct WeightSpec {
  double alpha = 0.0;
  double tau = 1.0;
  void validate() const;
};

/// Point samples of a phase-space density: rows are fine spatial cells, columns
/// velocity nodes. Immutable once built.
template <typename Scalar>
class DistributionField {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  DistributionField(PhaseSpace space, Matrix values);
  static DistributionField zeros(PhaseSpace space);

  const PhaseSpace& space() const { return space_; }
  const SpatialPartition& partition() const { return *space_.space; }
  const VelocityGrid& velocity() const { return *space_.velocity; }
  const Matrix& values() const { return values_; }
  Scalar operator()(int cell, int node) const { return values_(cell, node); }
  int cells() const { return static_cast<int>(values_.rows()); }
  int nodes() const { return static_cast<int>(values_.cols()); }

  /// Same samples viewed through a partition with a different block factor.
  DistributionField rebind(PhaseSpace space) const;

 private:
  PhaseSpace space_;
  Matrix values_;
};

template <typename Scalar>
DistributionField<Scalar> operator+(const DistributionField<Scalar>& a, const DistributionField<Scalar>& b);
template <typename Scalar>
DistributionField<Scalar> operator-(const DistributionField<Scalar>& a, const DistributionField<Scalar>& b);
template <typename Scalar>
DistributionField<Scalar> operator*(Scalar c, const DistributionField<Scalar>& a);

/// Throws PreconditionError unless a and b live on the same grids.
void require_same_space(const PhaseSpace& a, const PhaseSpace& b, const char* op);

/// amplitude * exp(-alpha |x - x0|^2 - tau |v - v0|^2)
struct GaussianComponent {
  double amplitude = 1.0;
  double alpha = 1.0;
  double tau = 1.0;
  Vec3 center_x = Vec3::Zero();
  Vec3 center_v = Vec3::Zero();
};

using GaussianMixture = std::vector<GaussianComponent>;

template <typename Scalar = double>
DistributionField<Scalar> gaussian_field(const PhaseSpace& space, const GaussianComponent& spec);
template <typename Scalar = double>
DistributionField<Scalar> gaussian_field(const PhaseSpace& space, const GaussianMixture& spec);

/// Samples g(x - t v, v) for the mixture g: the exact free-streaming solution.
template <typename Scalar = double>
DistributionField<Scalar> transported_gaussian(const PhaseSpace& space, const GaussianMixture& spec, double t);

// Binary snapshots: "KDL1", version byte, six little-endian u32 dims
// (nx, ny, nz, nvx, nvy, nvz), then little-endian f64 samples in row-major
// order with the velocity index varying fastest.
inline constexpr std::uint8_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const DistributionField<double>& f);
/// Reads a snapshot whose dims must match `space`.
DistributionField<double> read_snapshot(const std::filesystem::path& path, const PhaseSpace& space);
/// Reads only the six dims of a snapshot header.
std::array<std::uint32_t, 6> read_snapshot_dims(const std::filesystem::path& path);

extern template class DistributionField<float>;
extern template class DistributionField<double>;

}  // namespace kdl
