#include "kdl/scheme.hpp"

#include "kdl/constants.hpp"
#include "kdl/error.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace kdl {

int SchemeParams::steps() const {
  const double ratio = T / dt;
  return static_cast<int>(std::floor(ratio * (1.0 + 1e-12)));
}

void SchemeParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("scheme.dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("scheme.T must be positive");
  if (!(dt < T)) throw ConfigError("scheme.dt must be smaller than scheme.T");
  if (!collisionless()) model.kernel.validate();
  if (!(diagnostic_tau > 0.0)) throw ConfigError("diagnostic tau must be positive");
  if (snapshot_cap < 2) throw ConfigError("snapshot cap must be at least 2");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t < T)) throw ConfigError("snapshot times must lie in [0, T)");
  if (guard && (!(guard->R_plus_rho > 0.0) || !(guard->sigma > 0.0)))
    throw ConfigError("positivity guard needs positive R + rho and sigma");
}

void project_moments(Eigen::MatrixXd& increment, const Eigen::MatrixXd& reference, const VelocityGrid& grid) {
  const int nv = grid.size();
  Eigen::MatrixXd phi(nv, 5);
  phi.col(0).setOnes();
  phi.middleCols(1, 3) = grid.nodes();
  phi.col(4) = grid.speed_squared();
  const double scale = reference.cwiseAbs().maxCoeff();
  const double floor = scale > 0.0 ? 1e-12 * scale : 1e-300;
  for (int c = 0; c < increment.rows(); ++c) {
    if (increment.row(c).isZero(0.0)) continue;
    const Eigen::VectorXd omega = reference.row(c).transpose().cwiseAbs().array() + floor;
    const Eigen::MatrixXd gram = phi.transpose() * omega.asDiagonal() * phi;
    const Eigen::VectorXd rhs = phi.transpose() * increment.row(c).transpose();
    const Eigen::VectorXd lagrange = gram.ldlt().solve(rhs);
    increment.row(c) -= (omega.asDiagonal() * (phi * lagrange)).transpose();
  }
}

StepResult step(const DistributionField<double>& f_prev, const SchemeParams& params, int index) {
  StepResult out{f_prev, {}, {}};
  const DistributionField<double> streamed = stream(f_prev, params.dt, params.streaming, &out.outflow);
  if (params.collisionless()) {
    out.field = streamed;
    return out;
  }
  Eigen::MatrixXd increment = params.dt * homogenized_collision(streamed, params.model).values();
  if (params.moment_fix) project_moments(increment, streamed.values(), streamed.velocity());
  Eigen::MatrixXd next = streamed.values() + increment;
  if (!next.allFinite()) throw NumericalError("non-finite value produced at step " + std::to_string(index), index);
  out.collision_increment = moments(DistributionField<double>(streamed.space(), std::move(increment)));
  out.field = DistributionField<double>(streamed.space(), std::move(next));
  return out;
}

PositivityGuard evaluate_guard(const DistributionField<double>& f0, const SchemeParams& params) {
  PositivityGuard g;
  if (!params.guard) {
    g.message = "no B_sigma bound declared; positivity guard not evaluated";
    return g;
  }
  g.declared = true;
  if (params.collisionless()) {
    g.timestep = std::numeric_limits<double>::infinity();
    g.respected = true;
  } else {
    g.timestep = positivity_timestep(params.guard->R_plus_rho, params.guard->sigma, params.model.kernel);
    g.respected = params.dt <= g.timestep;
  }
  g.measured_b_sigma = b_norm(f0, params.guard->sigma);
  g.bound_exceeded = g.measured_b_sigma > params.guard->R_plus_rho;
  std::ostringstream msg;
  msg.precision(17);
  msg << "dt = " << params.dt << (g.respected ? " respects" : " VIOLATES") << " the positivity guard 1/D0 = "
      << g.timestep;
  if (g.bound_exceeded)
    msg << "; measured B_sigma norm " << g.measured_b_sigma << " exceeds the declared bound "
        << params.guard->R_plus_rho;
  g.message = msg.str();
  return g;
}

int trajectory_index(const SchemeParams& params, double t) {
  if (!(t >= 0.0) || !(t < params.T)) throw DomainError("trajectory_at: t must lie in [0, T)");
  // the nudge keeps t = k dt, computed in floating point, inside step k + 1
  const int j = static_cast<int>(std::floor(t / params.dt * (1.0 + 1e-12))) + 1;
  if (j > params.steps())
    throw DomainError("trajectory_at: t lies beyond the last step interval [(J-1) dt, J dt)");
  return j;
}

const DistributionField<double>& Trajectory::snapshot(int j) const {
  auto it = snapshots_.find(j);
  if (it == snapshots_.end()) throw PreconditionError("snapshot " + std::to_string(j) + " was not retained");
  return it->second;
}

std::vector<int> Trajectory::retained() const {
  std::vector<int> out;
  for (const auto& [j, f] : snapshots_) out.push_back(j);
  return out;
}

const DistributionField<double>& trajectory_at(const Trajectory& traj, double t) {
  return traj.snapshot(trajectory_index(traj.params(), t));
}

namespace {

StepDiagnostics diagnose(const DistributionField<double>& f, double t, double tau) {
  StepDiagnostics d;
  d.t = t;
  d.moments = moments(f);
  d.l1 = l1_norm(f);
  d.bnorm = b_norm(f, tau);
  d.mnorm = m_norm(f, tau);
  d.minval = min_value(f);
  return d;
}

}  // namespace

Trajectory run(const DistributionField<double>& f0, const SchemeParams& params,
               const std::function<void(int, const DistributionField<double>&)>& on_step) {
  params.validate();
  Trajectory traj;
  traj.params_ = params;
  traj.steps_ = params.steps();
  traj.guard_ = evaluate_guard(f0, params);
  if (traj.guard_.declared && !traj.guard_.respected) traj.warnings_.push_back(traj.guard_.message);
  if (traj.guard_.bound_exceeded) traj.warnings_.push_back(traj.guard_.message);

  const int J = traj.steps_;
  std::set<int> keep{0, J};
  const bool keep_all = J + 1 <= params.snapshot_cap;
  for (double t : params.snapshot_times) {
    if (t < J * params.dt) keep.insert(trajectory_index(params, t));
  }

  traj.diagnostics_.reserve(J + 1);
  traj.diagnostics_.push_back(diagnose(f0, 0.0, params.diagnostic_tau));
  traj.snapshots_.emplace(0, f0);
  if (on_step) on_step(0, f0);
  const double mass0 = std::abs(traj.diagnostics_.front().moments.mass);

  DistributionField<double> current = f0;
  OutflowLeak total_outflow;
  bool leak_warned = false;
  for (int j = 1; j <= J; ++j) {
    StepResult r = step(current, params, j);
    total_outflow += r.outflow;
    if (!leak_warned && std::abs(total_outflow.mass) > 1e-12 * std::max(mass0, 1e-300)) {
      traj.warnings_.push_back("support reached the box boundary by step " + std::to_string(j) +
                               "; outflow mass is measured in the diagnostics");
      leak_warned = true;
    }
    StepDiagnostics d = diagnose(r.field, j * params.dt, params.diagnostic_tau);
    d.outflow = total_outflow;
    d.collision_increment = r.collision_increment;
    traj.diagnostics_.push_back(d);
    if (on_step) on_step(j, r.field);
    if (keep_all || keep.count(j)) traj.snapshots_.insert_or_assign(j, r.field);
    current = std::move(r.field);
  }
  return traj;
}

}  // namespace kdl
