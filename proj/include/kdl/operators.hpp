#pragma once

#include "kdl/kernels.hpp"
#include "kdl/phase_space.hpp"

#include <string>

namespace kdl {

enum class StreamingMode { conservative_remap, linear_interpolation };
enum class BoundaryMode { outflow, periodic };

StreamingMode parse_streaming_mode(const std::string& name);
std::string to_string(StreamingMode mode);
BoundaryMode parse_boundary_mode(const std::string& name);
std::string to_string(BoundaryMode mode);

struct StreamingScheme {
  StreamingMode mode = StreamingMode::conservative_remap;
  BoundaryMode boundary = BoundaryMode::outflow;
};

/// Moments of the part of a field pushed out of the box by a shift.
struct OutflowLeak {
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double energy = 0.0;

  OutflowLeak& operator+=(const OutflowLeak& o) {
    mass += o.mass;
    momentum += o.momentum;
    energy += o.energy;
    return *this;
  }
};

/// (U^t g)(x, v) = g(x - t v, v). Each velocity node is shifted by three 1D
/// finite-volume remaps. When `leak` is given it receives the outflow moments.
template <typename Scalar>
DistributionField<Scalar> stream(const DistributionField<Scalar>& g, double t, const StreamingScheme& scheme = {},
                                 OutflowLeak* leak = nullptr);

/// (T_y g)(x, v) = g(x + y, v).
template <typename Scalar>
DistributionField<Scalar> translate(const DistributionField<Scalar>& g, const Vec3& y,
                                    const StreamingScheme& scheme = {}, OutflowLeak* leak = nullptr);

/// Block means, one row per homogenization cell.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block_average(const DistributionField<Scalar>& g);

/// Replaces every sample by the mean over its homogenization cell.
template <typename Scalar>
DistributionField<Scalar> homogenize(const DistributionField<Scalar>& g);

/// Loss term S_B(g, h)(x, v) = g(x, v) * sum_{v*} K(v, v*) h(x, v*).
template <typename Scalar>
DistributionField<Scalar> loss_term(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h,
                                    const CollisionModel& model);

/// Gain term P_B(g, h)(x, v): products at post-collision velocities, found by
/// trilinear interpolation with zero outside the velocity box.
template <typename Scalar>
DistributionField<Scalar> gain_term(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h,
                                    const CollisionModel& model);

/// J_B(g, h) = P_B(g, h) - S_B(g, h).
template <typename Scalar>
DistributionField<Scalar> bilinear_collision(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h,
                                             const CollisionModel& model);

/// J(g) = J_B(g, g).
template <typename Scalar>
DistributionField<Scalar> collision(const DistributionField<Scalar>& g, const CollisionModel& model);

/// J_B(g, pi g): the partner slot is cell-averaged.
template <typename Scalar>
DistributionField<Scalar> homogenized_collision(const DistributionField<Scalar>& g, const CollisionModel& model);

/// E(g): per homogenization cell, sum_{v*} K(v, v*) times the cell-averaged g.
/// Requires g >= 0.
template <typename Scalar>
DistributionField<Scalar> collision_frequency(const DistributionField<Scalar>& g, const CollisionModel& model);

/// I(g, h, t, s) = J_pi(U^t g) - U^s J(h).
template <typename Scalar>
DistributionField<Scalar> defect(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h, double t,
                                 double s, const CollisionModel& model, const StreamingScheme& scheme = {});

/// Post-collision velocities for the pair (v, v*) and direction w.
inline std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& v_star, const Vec3& w) {
  const double c = (v - v_star).dot(w);
  return {v - c * w, v_star + c * w};
}

/// K(v_i, v_j) = quadrature weight of v_j times the angular integral of b.
Eigen::MatrixXd loss_kernel_matrix(const VelocityGrid& grid, const CollisionModel& model);

}  // namespace kdl
