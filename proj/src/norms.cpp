#include "kdl/norms.hpp"

#include "kdl/error.hpp"

#include <cmath>

namespace kdl {

template <typename Scalar>
double l1_norm(const DistributionField<Scalar>& g) {
  return g.values().template cast<double>().cwiseAbs().sum() * g.space().sample_volume();
}

template <typename Scalar>
double weighted_sup(const DistributionField<Scalar>& g, const WeightSpec& weight) {
  weight.validate();
  const auto& r2 = g.partition().radius_squared();
  const auto& v2 = g.velocity().speed_squared();
  double best = 0.0;
  for (int j = 0; j < g.nodes(); ++j) {
    const double wv = weight.tau * v2(j);
    for (int c = 0; c < g.cells(); ++c) {
      const double a = std::abs(static_cast<double>(g(c, j)));
      if (a == 0.0) continue;
      best = std::max(best, a * std::exp(weight.alpha * r2(c) + wv));
    }
  }
  return best;
}

template <typename Scalar>
NormReport norms(const DistributionField<Scalar>& g, const std::vector<double>& taus) {
  NormReport r;
  r.l1 = l1_norm(g);
  for (double tau : taus) {
    if (!(tau > 0.0)) throw ConfigError("norms: tau must be positive");
    r.taus.push_back(tau);
    r.b_norm.push_back(b_norm(g, tau));
    r.m_norm.push_back(m_norm(g, tau));
  }
  return r;
}

template <typename Scalar>
Moments moments(const DistributionField<Scalar>& g) {
  const Eigen::VectorXd column = g.values().template cast<double>().colwise().sum().transpose() * g.space().sample_volume();
  Moments m;
  m.mass = column.sum();
  m.momentum = g.velocity().nodes().transpose() * column;
  m.energy = g.velocity().speed_squared().dot(column);
  return m;
}

#define KDL_INSTANTIATE(S)                                                   \
  template double l1_norm(const DistributionField<S>&);                      \
  template double weighted_sup(const DistributionField<S>&, const WeightSpec&); \
  template NormReport norms(const DistributionField<S>&, const std::vector<double>&); \
  template Moments moments(const DistributionField<S>&);
KDL_INSTANTIATE(float)
KDL_INSTANTIATE(double)
#undef KDL_INSTANTIATE

}  // namespace kdl
