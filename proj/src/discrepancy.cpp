#include "kdl/analysis.hpp"
#include "kdl/error.hpp"

#include <array>
#include <cmath>

namespace kdl {

namespace {

Eigen::MatrixXd unit_mass(const DistributionField<double>& g, const char* name) {
  if (g.values().size() && g.values().minCoeff() < 0.0)
    throw PreconditionError(std::string("discrepancy: ") + name + " has negative samples");
  const double mass = g.values().sum();
  if (!(mass > 0.0)) throw DomainError(std::string("discrepancy: ") + name + " has zero mass");
  return g.values() / mass;
}

}  // namespace

Discrepancy discrepancy(const DistributionField<double>& g, const DistributionField<double>& h) {
  require_same_space(g.space(), h.space(), "discrepancy");
  const Eigen::MatrixXd diff = unit_mass(g, "g") - unit_mass(h, "h");
  const int n = g.partition().fine_cells_per_axis();
  const int nv = g.velocity().nodes_per_axis();
  const std::array<int, 6> dims{n, n, n, nv, nv, nv};
  const double total = static_cast<double>(diff.size());

  Discrepancy out;
  if (n <= kDiscrepancyAxisCap && nv <= kDiscrepancyAxisCap) {
    out.method = "6d-cumulative";
    out.cost_estimate = 6.0 * total;
    // diff is column-major (cell, node); lay it out with the velocity index fastest
    std::vector<double> cdf(diff.size());
    const Eigen::Index cells = diff.rows(), nodes = diff.cols();
    for (Eigen::Index c = 0; c < cells; ++c)
      for (Eigen::Index j = 0; j < nodes; ++j) cdf[c * nodes + j] = diff(c, j);
    std::array<std::size_t, 6> stride{};
    stride[5] = 1;
    for (int d = 4; d >= 0; --d) stride[d] = stride[d + 1] * dims[d + 1];
    for (int d = 0; d < 6; ++d) {
      const std::size_t s = stride[d];
      const std::size_t span = s * dims[d];
      for (std::size_t i = 0; i < cdf.size(); ++i) {
        if (i % span >= s) cdf[i] += cdf[i - s];
      }
    }
    for (double v : cdf) out.value = std::max(out.value, std::abs(v));
    return out;
  }

  out.method = "marginal-1d";
  out.marginal_only = true;
  out.cost_estimate = total + 6.0 * std::max(n, nv);
  const Eigen::VectorXd by_cell = diff.rowwise().sum();
  const Eigen::VectorXd by_node = diff.colwise().sum().transpose();
  for (int d = 0; d < 6; ++d) {
    std::vector<double> marginal(dims[d], 0.0);
    if (d < 3) {
      for (int c = 0; c < g.cells(); ++c) marginal[g.partition().axis_indices(c)[d]] += by_cell(c);
    } else {
      for (int j = 0; j < g.nodes(); ++j) marginal[g.velocity().axis_indices(j)[d - 3]] += by_node(j);
    }
    double run = 0.0;
    for (double m : marginal) {
      run += m;
      out.value = std::max(out.value, std::abs(run));
    }
  }
  return out;
}

}  // namespace kdl
