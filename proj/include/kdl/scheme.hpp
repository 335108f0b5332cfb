#pragma once

#include "kdl/kernels.hpp"
#include "kdl/norms.hpp"
#include "kdl/operators.hpp"
#include "kdl/phase_space.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kdl {

/// Declared B_sigma bound used by the positivity guard.
struct PositivityBound {
  double R_plus_rho = 0.0;
  double sigma = 0.0;
};

struct SchemeParams {
  double dt = 0.1;
  double T = 1.0;
  /// kernel.b0 == 0 means collisionless (pure streaming).
  CollisionModel model{KernelSpec{}, SphereQuadrature(2, 4)};
  StreamingScheme streaming;
  bool moment_fix = false;
  /// Rate used for the bnorm / mnorm diagnostics.
  double diagnostic_tau = 1.0;
  /// Keep every snapshot while the step count stays below this cap.
  int snapshot_cap = 64;
  /// Times whose snapshots are always retained.
  std::vector<double> snapshot_times;
  std::optional<PositivityBound> guard;

  bool collisionless() const { return model.kernel.b0 == 0.0; }
  /// Number of steps J = [[T / dt]].
  int steps() const;
  void validate() const;
};

struct StepDiagnostics {
  double t = 0.0;
  Moments moments;
  double l1 = 0.0;
  double bnorm = 0.0;
  double mnorm = 0.0;
  double minval = 0.0;
  /// Cumulative outflow through the box boundary up to this step.
  OutflowLeak outflow;
  /// Moments of the collision increment dt * J_pi applied in this step.
  Moments collision_increment;
};

struct PositivityGuard {
  bool declared = false;
  double timestep = 0.0;  // 1 / D0
  bool respected = true;
  double measured_b_sigma = 0.0;
  bool bound_exceeded = false;
  std::string message;
};

/// Result of one step of the recurrence.
struct StepResult {
  DistributionField<double> field;
  OutflowLeak outflow;
  Moments collision_increment;
};

/// f^j = U^dt f^{j-1} + dt J_pi(U^dt f^{j-1}).
StepResult step(const DistributionField<double>& f_prev, const SchemeParams& params, int index = 1);

class Trajectory {
 public:
  const SchemeParams& params() const { return params_; }
  int steps() const { return steps_; }
  const std::vector<StepDiagnostics>& diagnostics() const { return diagnostics_; }
  const PositivityGuard& guard() const { return guard_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool has_snapshot(int j) const { return snapshots_.count(j) > 0; }
  const DistributionField<double>& snapshot(int j) const;
  std::vector<int> retained() const;

 private:
  friend Trajectory run(const DistributionField<double>&, const SchemeParams&,
                        const std::function<void(int, const DistributionField<double>&)>&);
  SchemeParams params_;
  int steps_ = 0;
  std::map<int, DistributionField<double>> snapshots_;
  std::vector<StepDiagnostics> diagnostics_;
  PositivityGuard guard_;
  std::vector<std::string> warnings_;
};

/// Iterates the recurrence J times. `on_step` sees every iterate, including
/// those not retained in memory.
Trajectory run(const DistributionField<double>& f0, const SchemeParams& params,
               const std::function<void(int, const DistributionField<double>&)>& on_step = {});

/// Step-function trajectory: f^j for (j - 1) dt <= t < j dt.
const DistributionField<double>& trajectory_at(const Trajectory& traj, double t);
/// Index j used by trajectory_at.
int trajectory_index(const SchemeParams& params, double t);

PositivityGuard evaluate_guard(const DistributionField<double>& f0, const SchemeParams& params);

/// Projects the rows of `increment` so that sum_v phi_i(v) increment(c, v) = 0
/// for phi = 1, v, v^2, with weights taken from `reference`.
void project_moments(Eigen::MatrixXd& increment, const Eigen::MatrixXd& reference, const VelocityGrid& grid);

}  // namespace kdl
