#include "kdl/analysis.hpp"
#include "kdl/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kdl {

LipschitzEstimate lipschitz_estimate(const DistributionField<double>& g, double tau, const std::vector<Vec3>& y_samples,
                                     std::optional<double> synthesis_rate, const StreamingScheme& scheme) {
  if (!(tau > 0.0)) throw ConfigError("lipschitz_estimate: tau must be positive");
  LipschitzEstimate est;
  if (synthesis_rate && !(tau < *synthesis_rate)) {
    std::ostringstream msg;
    msg << "tau = " << tau << " is not below the synthesis decay rate " << *synthesis_rate
        << "; the estimate may diverge with resolution";
    est.warnings.push_back(msg.str());
  }
  est.R_est = m_norm(g, tau);
  for (const Vec3& y : y_samples) {
    const double len = y.norm();
    if (len == 0.0) continue;
    if (len > 1.0) throw ConfigError("lipschitz_estimate: translation samples must satisfy |y| <= 1");
    const auto moved = translate(g, y, scheme);
    est.M_est = std::max(est.M_est, m_norm(moved - g, tau) / len);
  }
  return est;
}

double envelope_excess(const DistributionField<double>& f, double t, double R_env, double tau0) {
  if (!(R_env > 0.0) || !(tau0 > 0.0)) throw ConfigError("envelope: R and tau0 must be positive");
  const auto& centers = f.partition().centers();
  const auto& nodes = f.velocity().nodes();
  const auto& v2 = f.velocity().speed_squared();
  double worst = 0.0;
  for (int c = 0; c < f.cells(); ++c) {
    const Eigen::RowVector3d x = centers.row(c);
    for (int j = 0; j < f.nodes(); ++j) {
      const double value = f(c, j);
      if (value <= 0.0) continue;
      const double r2 = (x - t * nodes.row(j)).squaredNorm();
      const double env = R_env * std::exp(-tau0 * (r2 + v2(j)));
      if (value > env) worst = std::max(worst, (value - env) / R_env);
    }
  }
  return worst;
}

double envelope_check(const Trajectory& traj, double R_env, double tau0) {
  double worst = 0.0;
  for (int j : traj.retained())
    worst = std::max(worst, envelope_excess(traj.snapshot(j), j * traj.params().dt, R_env, tau0));
  return worst;
}

void fit_order(ConvergenceTable& table) {
  std::sort(table.rows.begin(), table.rows.end(),
            [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.dt + a.dx > b.dt + b.dx; });
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (r.error > 0.0) {
      xs.push_back(std::log(r.dt + r.dx));
      ys.push_back(std::log(r.error));
    }
  }
  table.order = 0.0;
  table.constant = 0.0;
  table.residual = 0.0;
  if (xs.size() < 2) return;
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd b(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    b(i) = ys[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  table.constant = std::exp(coef(0));
  table.order = coef(1);
  table.residual = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(xs.size()));
}

namespace {

bool is_multiple(double coarse, double fine) {
  const double ratio = coarse / fine;
  return ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio;
}

double l1_distance(const DistributionField<double>& a, const DistributionField<double>& b) {
  return (a.values() - b.values()).cwiseAbs().sum() * a.space().sample_volume();
}

}  // namespace

ConvergenceTable convergence_study(const DistributionField<double>& f0, const SchemeParams& base,
                                   const std::vector<Resolution>& resolutions, double reference_dt) {
  if (resolutions.empty()) throw ConfigError("convergence_study: no resolutions given");
  if (!(reference_dt > 0.0)) throw ConfigError("convergence_study: reference dt must be positive");
  double coarsest = 0.0;
  for (const auto& r : resolutions) {
    if (!(r.dt > reference_dt)) throw ConfigError("convergence_study: reference dt must be finer than every level");
    if (r.block_factor < 1) throw ConfigError("convergence_study: block factor must be positive");
    coarsest = std::max(coarsest, r.dt);
  }
  for (const auto& r : resolutions) {
    if (!is_multiple(r.dt, reference_dt) || !is_multiple(coarsest, r.dt))
      throw ConfigError("convergence_study: time grids do not nest, sample times would not align");
  }

  SchemeParams probe = base;
  probe.dt = coarsest;
  probe.validate();
  std::vector<double> times;
  for (int k = 0; k < probe.steps(); ++k) times.push_back(k * coarsest);

  auto solve = [&](double dt, int block_factor) {
    SchemeParams p = base;
    p.dt = dt;
    p.snapshot_times = times;
    p.guard.reset();
    const PhaseSpace space = f0.space().with_block_factor(block_factor);
    return run(f0.rebind(space), p);
  };

  ConvergenceTable table;
  table.reference_dt = reference_dt;
  const Trajectory reference = solve(reference_dt, 1);
  for (const auto& r : resolutions) {
    const Trajectory traj = solve(r.dt, r.block_factor);
    ConvergenceRow row;
    row.dt = r.dt;
    row.block_factor = r.block_factor;
    row.dx = traj.snapshot(0).partition().delta_x();
    for (double t : times) {
      const double e = l1_distance(trajectory_at(traj, t), trajectory_at(reference, t));
      row.times.push_back(t);
      row.errors.push_back(e);
      row.error = std::max(row.error, e);
    }
    table.rows.push_back(std::move(row));
  }
  fit_order(table);
  return table;
}

}  // namespace kdl
