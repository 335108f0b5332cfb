#include "kdl/phase_space.hpp"

#include "kdl/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace kdl {

VelocityGrid::VelocityGrid(double v_max, int nodes_per_axis) : v_max_(v_max), n_(nodes_per_axis) {
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("velocity grid: v_max must be positive");
  if (nodes_per_axis <= 0) throw ConfigError("velocity grid: nodes_per_axis must be positive");
  h_ = 2.0 * v_max_ / n_;
  const int total = size();
  nodes_.resize(total, 3);
  speed2_.resize(total);
  for (int ix = 0; ix < n_; ++ix)
    for (int iy = 0; iy < n_; ++iy)
      for (int iz = 0; iz < n_; ++iz) {
        const int j = index(ix, iy, iz);
        nodes_(j, 0) = coordinate(ix);
        nodes_(j, 1) = coordinate(iy);
        nodes_(j, 2) = coordinate(iz);
        speed2_(j) = nodes_.row(j).squaredNorm();
      }
  weights_ = Eigen::VectorXd::Constant(total, weight());
}

std::array<int, 3> VelocityGrid::axis_indices(int node) const {
  return {node / (n_ * n_), (node / n_) % n_, node % n_};
}

int VelocityGrid::mirror(int j) const {
  const auto [ix, iy, iz] = axis_indices(j);
  return index(n_ - 1 - ix, n_ - 1 - iy, n_ - 1 - iz);
}

SpatialPartition::SpatialPartition(double half_width, int fine_cells_per_axis, int block_factor)
    : half_width_(half_width), n_(fine_cells_per_axis), m_(block_factor) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("partition: box half width must be positive");
  if (fine_cells_per_axis <= 0) throw ConfigError("partition: fine_cells_per_axis must be positive");
  if (block_factor <= 0) throw ConfigError("partition: block_factor must be positive");
  if (fine_cells_per_axis % block_factor != 0)
    throw ConfigError("partition: block_factor " + std::to_string(block_factor) + " does not divide " +
                      std::to_string(fine_cells_per_axis) + " fine cells per axis");
  h_ = 2.0 * half_width_ / n_;
  delta_x_ = m_ * h_ * std::sqrt(3.0);

  const int total = cells();
  centers_.resize(total, 3);
  radius2_.resize(total);
  block_of_.resize(total);
  const int nb = blocks_per_axis();
  for (int ix = 0; ix < n_; ++ix)
    for (int iy = 0; iy < n_; ++iy)
      for (int iz = 0; iz < n_; ++iz) {
        const int c = index(ix, iy, iz);
        centers_(c, 0) = coordinate(ix);
        centers_(c, 1) = coordinate(iy);
        centers_(c, 2) = coordinate(iz);
        radius2_(c) = centers_.row(c).squaredNorm();
        block_of_[c] = ((ix / m_) * nb + iy / m_) * nb + iz / m_;
      }

  member_offsets_.assign(blocks() + 1, 0);
  for (int c = 0; c < total; ++c) ++member_offsets_[block_of_[c] + 1];
  for (int b = 0; b < blocks(); ++b) member_offsets_[b + 1] += member_offsets_[b];
  members_.resize(total);
  std::vector<int> fill(member_offsets_.begin(), member_offsets_.end() - 1);
  for (int c = 0; c < total; ++c) members_[fill[block_of_[c]]++] = c;
}

std::array<int, 3> SpatialPartition::axis_indices(int cell) const {
  return {cell / (n_ * n_), (cell / n_) % n_, cell % n_};
}

std::span<const int> SpatialPartition::members(int block) const {
  return {members_.data() + member_offsets_[block],
          static_cast<std::size_t>(member_offsets_[block + 1] - member_offsets_[block])};
}

double SpatialPartition::block_diameter(int block) const {
  const int nb = blocks_per_axis();
  const int b[3] = {block / (nb * nb), (block / nb) % nb, block % nb};
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double lo = -half_width_ + b[a] * m_ * h_;
    const double hi = -half_width_ + (b[a] + 1) * m_ * h_;
    d2 += (hi - lo) * (hi - lo);
  }
  return std::sqrt(d2);
}

SpatialPartition build_partition(double half_width, int fine_cells_per_axis, int block_factor) {
  return SpatialPartition(half_width, fine_cells_per_axis, block_factor);
}

PhaseSpace PhaseSpace::with_block_factor(int m) const {
  if (m == space->block_factor()) return *this;
  return PhaseSpace(std::make_shared<const SpatialPartition>(space->with_block_factor(m)), velocity);
}

void WeightSpec::validate() const {
  if (!(tau > 0.0)) throw ConfigError("weight: tau must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("weight: alpha must be nonnegative");
}

void require_same_space(const PhaseSpace& a, const PhaseSpace& b, const char* op) {
  if (!a.space || !b.space || !(*a.velocity == *b.velocity) || !a.space->same_fine_grid(*b.space))
    throw PreconditionError(std::string(op) + ": fields live on different grids");
}

template <typename Scalar>
DistributionField<Scalar>::DistributionField(PhaseSpace space, Matrix values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_.space || !space_.velocity) throw PreconditionError("field: missing grids");
  if (values_.rows() != space_.cells() || values_.cols() != space_.nodes())
    throw PreconditionError("field: array shape " + std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()) + " does not match grids " +
                            std::to_string(space_.cells()) + "x" + std::to_string(space_.nodes()));
  if (!values_.allFinite()) throw NumericalError("field: non-finite sample", -1);
}

template <typename Scalar>
DistributionField<Scalar> DistributionField<Scalar>::zeros(PhaseSpace space) {
  Matrix z = Matrix::Zero(space.cells(), space.nodes());
  return DistributionField(std::move(space), std::move(z));
}

template <typename Scalar>
DistributionField<Scalar> DistributionField<Scalar>::rebind(PhaseSpace space) const {
  require_same_space(space_, space, "rebind");
  return DistributionField(std::move(space), values_);
}

template <typename Scalar>
DistributionField<Scalar> operator+(const DistributionField<Scalar>& a, const DistributionField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "operator+");
  return DistributionField<Scalar>(a.space(), a.values() + b.values());
}

template <typename Scalar>
DistributionField<Scalar> operator-(const DistributionField<Scalar>& a, const DistributionField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "operator-");
  return DistributionField<Scalar>(a.space(), a.values() - b.values());
}

template <typename Scalar>
DistributionField<Scalar> operator*(Scalar c, const DistributionField<Scalar>& a) {
  return DistributionField<Scalar>(a.space(), c * a.values());
}

namespace {

template <typename Scalar>
void accumulate_gaussian(const PhaseSpace& space, const GaussianComponent& g, double t,
                         Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out) {
  if (!(g.tau > 0.0)) throw ConfigError("gaussian: tau must be positive");
  if (!(g.alpha >= 0.0)) throw ConfigError("gaussian: alpha must be nonnegative");
  if (g.amplitude == 0.0) return;
  const auto& x = space.space->centers();
  const auto& v = space.velocity->nodes();
  for (int j = 0; j < space.nodes(); ++j) {
    const Vec3 vj = v.row(j).transpose();
    const double vel = g.amplitude * std::exp(-g.tau * (vj - g.center_v).squaredNorm());
    const Vec3 shift = g.center_x + t * vj;
    for (int c = 0; c < space.cells(); ++c) {
      const double r2 = (x.row(c).transpose() - shift).squaredNorm();
      out(c, j) += static_cast<Scalar>(vel * std::exp(-g.alpha * r2));
    }
  }
}

}  // namespace

template <typename Scalar>
DistributionField<Scalar> gaussian_field(const PhaseSpace& space, const GaussianComponent& spec) {
  return gaussian_field<Scalar>(space, GaussianMixture{spec});
}

template <typename Scalar>
DistributionField<Scalar> gaussian_field(const PhaseSpace& space, const GaussianMixture& spec) {
  return transported_gaussian<Scalar>(space, spec, 0.0);
}

template <typename Scalar>
DistributionField<Scalar> transported_gaussian(const PhaseSpace& space, const GaussianMixture& spec, double t) {
  using Matrix = typename DistributionField<Scalar>::Matrix;
  Matrix values = Matrix::Zero(space.cells(), space.nodes());
  for (const auto& g : spec) accumulate_gaussian<Scalar>(space, g, t, values);
  return DistributionField<Scalar>(space, std::move(values));
}

namespace {

constexpr char kMagic[4] = {'K', 'D', 'L', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw IoError("snapshot " + path.string() + ": truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::array<std::uint32_t, 6> read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("snapshot " + path.string() + ": bad magic");
  const auto version = get_le<std::uint8_t>(is, path);
  if (version != kSnapshotVersion)
    throw IoError("snapshot " + path.string() + ": unsupported version " + std::to_string(version));
  std::array<std::uint32_t, 6> dims{};
  for (auto& d : dims) d = get_le<std::uint32_t>(is, path);
  return dims;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const DistributionField<double>& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("snapshot " + path.string() + ": cannot open for writing");
  os.write(kMagic, 4);
  put_le<std::uint8_t>(os, kSnapshotVersion);
  const auto nx = static_cast<std::uint32_t>(f.partition().fine_cells_per_axis());
  const auto nv = static_cast<std::uint32_t>(f.velocity().nodes_per_axis());
  for (auto d : {nx, nx, nx, nv, nv, nv}) put_le<std::uint32_t>(os, d);
  for (int c = 0; c < f.cells(); ++c)
    for (int j = 0; j < f.nodes(); ++j) put_le<double>(os, f(c, j));
  if (!os) throw IoError("snapshot " + path.string() + ": write failed");
}

std::array<std::uint32_t, 6> read_snapshot_dims(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("snapshot " + path.string() + ": cannot open");
  return read_header(is, path);
}

DistributionField<double> read_snapshot(const std::filesystem::path& path, const PhaseSpace& space) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("snapshot " + path.string() + ": cannot open");
  const auto dims = read_header(is, path);
  const auto nx = static_cast<std::uint32_t>(space.space->fine_cells_per_axis());
  const auto nv = static_cast<std::uint32_t>(space.velocity->nodes_per_axis());
  if (dims != std::array<std::uint32_t, 6>{nx, nx, nx, nv, nv, nv})
    throw PreconditionError("snapshot " + path.string() + ": dims do not match the configured grids");
  DistributionField<double>::Matrix values(space.cells(), space.nodes());
  for (int c = 0; c < space.cells(); ++c)
    for (int j = 0; j < space.nodes(); ++j) values(c, j) = get_le<double>(is, path);
  return DistributionField<double>(space, std::move(values));
}

template class DistributionField<float>;
template class DistributionField<double>;

#define KDL_INSTANTIATE(S)                                                                                  \
  template DistributionField<S> operator+(const DistributionField<S>&, const DistributionField<S>&);       \
  template DistributionField<S> operator-(const DistributionField<S>&, const DistributionField<S>&);       \
  template DistributionField<S> operator*(S, const DistributionField<S>&);                                 \
  template DistributionField<S> gaussian_field<S>(const PhaseSpace&, const GaussianComponent&);            \
  template DistributionField<S> gaussian_field<S>(const PhaseSpace&, const GaussianMixture&);              \
  template DistributionField<S> transported_gaussian<S>(const PhaseSpace&, const GaussianMixture&, double);
KDL_INSTANTIATE(float)
KDL_INSTANTIATE(double)
#undef KDL_INSTANTIATE

}  // namespace kdl
