#pragma once

#include "kdl/constants.hpp"
#include "kdl/gaussian_family.hpp"
#include "kdl/norms.hpp"
#include "kdl/operators.hpp"
#include "kdl/scheme.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kdl {

// ---------------------------------------------------------------- discrepancy

/// Largest nodes-per-axis (spatial and velocity) for the full 6D sweep.
inline constexpr int kDiscrepancyAxisCap = 12;

struct Discrepancy {
  double value = 0.0;
  /// True when only the six 1D marginals were compared.
  bool marginal_only = false;
  /// Additions performed by the sweep (6 passes over the 6D array).
  double cost_estimate = 0.0;
  std::string method;
};

/// sup_z |CDF_g(z) - CDF_h(z)| over cell-corner thresholds, both fields
/// normalised to unit mass. Above the axis cap, the max over the marginals.
Discrepancy discrepancy(const DistributionField<double>& g, const DistributionField<double>& h);

// ---------------------------------------------------------------- Lipschitz

struct LipschitzEstimate {
  double R_est = 0.0;
  double M_est = 0.0;
  std::vector<std::string> warnings;
};

/// R_est = ||g||_{M_tau}; M_est = max over samples 0 < |y| <= 1 of
/// ||T_y g - g||_{M_tau} / |y|. `synthesis_rate`, when known, is the slowest
/// decay rate used to build g.
LipschitzEstimate lipschitz_estimate(const DistributionField<double>& g, double tau, const std::vector<Vec3>& y_samples,
                                     std::optional<double> synthesis_rate = std::nullopt,
                                     const StreamingScheme& scheme = {});

// ---------------------------------------------------------------- inequalities

struct InequalityVerdict {
  std::string id;
  int trials = 0;
  /// LHS - RHS, clipped at 0, of the trial closest to failing.
  double max_violation = 0.0;
  /// Tolerance of that same trial.
  double tolerance = 0.0;
  /// max over trials of LHS / RHS (0 when RHS vanishes).
  double max_ratio = 0.0;
  /// Trials whose raw LHS exceeded RHS and triggered a re-evaluation.
  int reevaluated = 0;
  bool pass = true;
};

/// Grid for one group of inequalities.
struct CampaignGrid {
  double half_width = 1.0;
  int fine_cells = 8;
  int block_factor = 2;
  double v_max = 3.0;
  int velocity_nodes = 4;

  PhaseSpace build() const;
  /// Coarser grid for the quadrature-error estimate.
  CampaignGrid half() const;
};

struct CampaignSpec {
  GaussianFamily family;
  /// Rate of the weaker norm in the streaming and defect estimates.
  double sigma = 0.5;
  /// Largest |t|, |s| sampled for the streaming and defect estimates.
  double max_time = 0.5;
  int trials = 100;
  std::uint64_t seed = 1;
  /// Empty means every inequality.
  std::vector<std::string> ids;
  /// Collision-only estimates.
  CampaignGrid local{1.0, 2, 2, 2.0, 6};
  /// Estimates involving homogenization (needs delta_x <= 1).
  CampaignGrid homogenization{0.5, 4, 2, 2.0, 6};
  /// Streaming estimates: the box is padded so that outflow is negligible.
  CampaignGrid streaming{4.0, 16, 2, 3.0, 6};
  SphereQuadrature sphere{2, 4};
  double relative_slack = 1e-8;
};

/// Ids in evaluation order.
const std::vector<std::string>& inequality_ids();

/// Evaluates every requested inequality on `trials` sampled inputs. The
/// constants must have been computed for the family's (tau, R, M) and the
/// campaign's sigma.
std::vector<InequalityVerdict> verify_inequalities(const CampaignSpec& spec, const ConstantsReport& constants);

// ---------------------------------------------------------------- envelope

/// max over samples of max(0, f - R exp(-tau0 (x - t v)^2 - tau0 v^2)) / R.
double envelope_excess(const DistributionField<double>& f, double t, double R_env, double tau0);
/// envelope_excess over every retained snapshot, at its nominal time j dt.
double envelope_check(const Trajectory& traj, double R_env, double tau0);

// ---------------------------------------------------------------- convergence

struct ConvergenceRow {
  double dt = 0.0;
  double dx = 0.0;
  int block_factor = 1;
  double error = 0.0;
  std::vector<double> times;
  std::vector<double> errors;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double order = 0.0;
  double constant = 0.0;
  double residual = 0.0;
  double reference_dt = 0.0;
};

struct Resolution {
  double dt = 0.0;
  int block_factor = 1;
};

/// Fits err = A (dt + dx)^p by least squares in log space over rows with
/// positive error. Fewer than two such rows give p = 0.
void fit_order(ConvergenceTable& table);

/// Runs the scheme at each resolution and at the reference (dt_ref,
/// block factor 1), then measures sup_t ||f_res(t) - f_ref(t)||_{L1} over the
/// sample times k * max(dt) in [0, T).
ConvergenceTable convergence_study(const DistributionField<double>& f0, const SchemeParams& base,
                                   const std::vector<Resolution>& resolutions, double reference_dt);

}  // namespace kdl
