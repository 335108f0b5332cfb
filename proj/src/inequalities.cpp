#include "kdl/analysis.hpp"
#include "kdl/error.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <cmath>
#include <functional>
#include <numbers>

namespace kdl {

PhaseSpace CampaignGrid::build() const {
  return PhaseSpace(SpatialPartition(half_width, fine_cells, block_factor), VelocityGrid(v_max, velocity_nodes));
}

CampaignGrid CampaignGrid::half() const {
  CampaignGrid g = *this;
  g.velocity_nodes = std::max(2, velocity_nodes / 2);
  return g;
}

namespace {

constexpr double kPi = std::numbers::pi;

enum class Group { local, homogenization, streaming };

struct Trial {
  std::array<SampledMixture, 5> mix;
  double t = 0.0;
  double s = 0.0;
};

struct Context {
  const CampaignSpec& spec;
  const ConstantsReport& constants;
  CollisionModel model;
  StreamingScheme scheme;
  double tau;
  double sigma;
};

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
};

using Field = DistributionField<double>;
using Evaluator = std::function<Sides(const PhaseSpace&, const Trial&, const Context&)>;

struct Inequality {
  std::string id;
  Group group;
  Evaluator eval;
};

Field sample(const PhaseSpace& space, const Trial& trial, int k) { return gaussian_field(space, trial.mix[k].mixture); }

double B(const Field& f, double tau) { return b_norm(f, tau); }
double Mn(const Field& f, double tau) { return m_norm(f, tau); }
double L1(const Field& f) { return l1_norm(f); }

Field J(const Field& g, const Context& cx) { return collision(g, cx.model); }
Field Jpi(const Field& g, const Context& cx) { return homogenized_collision(g, cx.model); }

std::vector<Inequality> build_inequalities() {
  std::vector<Inequality> list;
  auto add = [&](std::string id, Group group, Evaluator eval) { list.push_back({std::move(id), group, std::move(eval)}); };

  // J_B(g1, g2) - J_B(h1, h2) against the mixed products of its arguments
  add("bilinear_b", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g1 = sample(sp, tr, 0), g2 = sample(sp, tr, 1), h1 = sample(sp, tr, 2), h2 = sample(sp, tr, 3);
    const Field diff = bilinear_collision(g1, g2, cx.model) - bilinear_collision(h1, h2, cx.model);
    const double c = cx.constants.c_tau, t = cx.tau;
    return Sides{B(diff, t), c * (B(g1, t) * B(g2 - h2, t) + B(h2, t) * B(g1 - h1, t))};
  });
  add("bilinear_m", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g1 = sample(sp, tr, 0), g2 = sample(sp, tr, 1), h1 = sample(sp, tr, 2), h2 = sample(sp, tr, 3);
    const Field diff = bilinear_collision(g1, g2, cx.model) - bilinear_collision(h1, h2, cx.model);
    const double c = cx.constants.c_tau, t = cx.tau;
    return Sides{Mn(diff, t), c * (Mn(g1, t) * B(g2 - h2, t) + Mn(h2, t) * B(g1 - h1, t))};
  });
  add("bilinear_l1", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g1 = sample(sp, tr, 0), g2 = sample(sp, tr, 1), h1 = sample(sp, tr, 2), h2 = sample(sp, tr, 3);
    const Field diff = bilinear_collision(g1, g2, cx.model) - bilinear_collision(h1, h2, cx.model);
    const double c = cx.constants.c_tau, t = cx.tau;
    return Sides{L1(diff), c * (B(g1, t) * L1(g2 - h2) + B(h2, t) * L1(g1 - h1))};
  });

  // Lipschitz bounds for J and J_pi
  add("lipschitz_b", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1);
    const double t = cx.tau;
    return Sides{B(J(g, cx) - J(h, cx), t), cx.constants.c_tau * (B(g, t) + B(h, t)) * B(g - h, t)};
  });
  add("lipschitz_pi_b", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1);
    const double t = cx.tau;
    return Sides{B(Jpi(g, cx) - Jpi(h, cx), t), cx.constants.c_tau * (B(g, t) + B(h, t)) * B(g - h, t)};
  });
  add("lipschitz_m", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1);
    const double t = cx.tau;
    return Sides{Mn(J(g, cx) - J(h, cx), t), cx.constants.c_tau * (Mn(g, t) + Mn(h, t)) * B(g - h, t)};
  });
  add("lipschitz_l1", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1);
    const double t = cx.tau;
    return Sides{L1(J(g, cx) - J(h, cx)), cx.constants.c_tau * (B(g, t) + B(h, t)) * L1(g - h)};
  });
  add("lipschitz_pi_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1);
    const double t = cx.tau;
    return Sides{L1(Jpi(g, cx) - Jpi(h, cx)), cx.constants.c_tau * (B(g, t) + B(h, t)) * L1(g - h)};
  });

  // the same with h = 0
  add("quadratic_b", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const double b = B(g, cx.tau);
    return Sides{B(J(g, cx), cx.tau), cx.constants.c_tau * b * b};
  });
  add("quadratic_pi_b", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const double b = B(g, cx.tau);
    return Sides{B(Jpi(g, cx), cx.tau), cx.constants.c_tau * b * b};
  });
  add("quadratic_m", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    return Sides{Mn(J(g, cx), cx.tau), cx.constants.c_tau * Mn(g, cx.tau) * B(g, cx.tau)};
  });
  add("quadratic_l1", Group::local, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    return Sides{L1(J(g, cx)), cx.constants.c_tau * B(g, cx.tau) * L1(g)};
  });
  add("quadratic_pi_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    return Sides{L1(Jpi(g, cx)), cx.constants.c_tau * B(g, cx.tau) * L1(g)};
  });

  // J_pi - J, linear in delta_x for g in M_tau(R, M)
  add("homogenized_gap_b", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const auto& meta = tr.mix[0].metadata;
    const double dx = sp.space->delta_x();
    return Sides{B(Jpi(g, cx) - J(g, cx), cx.tau), cx.constants.c_tau * meta.M * meta.R * dx};
  });
  add("homogenized_gap_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const auto& meta = tr.mix[0].metadata;
    const double dx = sp.space->delta_x();
    const double lambda = cx.constants.inputs.lambda;
    const double k = 2.0 * std::pow(kPi, 4.5) * cx.constants.b_lambda * std::pow(cx.tau, -(9.0 - lambda) / 2.0);
    return Sides{L1(Jpi(g, cx) - J(g, cx)), k * meta.M * meta.R * dx};
  });

  // free streaming over a time s
  add("streaming_b", Group::streaming, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const auto& meta = tr.mix[0].metadata;
    const double k = std::sqrt(2.0) * std::exp(-0.5) / std::sqrt(cx.tau - cx.sigma);
    return Sides{B(stream(g, tr.s, cx.scheme) - g, cx.sigma), k * std::max(meta.R, meta.M) * std::abs(tr.s)};
  });
  add("streaming_l1", Group::streaming, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const auto& meta = tr.mix[0].metadata;
    const double k = 4.0 * std::pow(kPi, 2.5) * std::pow(cx.tau, -3.5);
    return Sides{L1(stream(g, tr.s, cx.scheme) - g), k * std::max(meta.R, meta.M) * std::abs(tr.s)};
  });

  // I(g, h, t, s) = J_pi(U^t g) - U^s J(h) with h, h_hat in M_tau(R, M)
  add("defect_b", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1), hh = sample(sp, tr, 2);
    const double s = cx.sigma, R = cx.constants.inputs.R;
    const Field I = defect(g, h, tr.t, tr.s, cx.model, cx.scheme);
    const double rhs = cx.constants.c_sigma * (B(g, s) + R) * B(g - hh, s) +
                       cx.constants.key.k1 * (B(hh - h, s) + sp.space->delta_x() + std::abs(tr.t) + std::abs(tr.s));
    return Sides{B(I, s), rhs};
  });
  add("defect_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0), h = sample(sp, tr, 1), hh = sample(sp, tr, 2);
    const double s = cx.sigma, R = cx.constants.inputs.R;
    const Field I = defect(g, h, tr.t, tr.s, cx.model, cx.scheme);
    const double rhs = cx.constants.c_sigma * (B(g, s) + R) * L1(g - hh) +
                       cx.constants.key.k2 * (L1(hh - h) + sp.space->delta_x() + std::abs(tr.t) + std::abs(tr.s));
    return Sides{L1(I), rhs};
  });

  // homogenization: contraction and delta_x-linear error
  add("contraction_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context&) {
    const Field g = sample(sp, tr, 0) - sample(sp, tr, 1);
    return Sides{L1(homogenize(g)), L1(g)};
  });
  add("contraction_b", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0) - sample(sp, tr, 1);
    return Sides{B(homogenize(g), cx.tau), B(g, cx.tau)};
  });
  add("homogenization_b", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    return Sides{B(homogenize(g) - g, cx.tau), tr.mix[0].metadata.M * sp.space->delta_x()};
  });
  add("homogenization_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    const double k = std::pow(kPi / cx.tau, 3.0);
    return Sides{L1(homogenize(g) - g), k * tr.mix[0].metadata.M * sp.space->delta_x()};
  });

  // ordering of the norms
  add("embedding_b_m", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    return Sides{B(g, cx.tau), Mn(g, cx.tau)};
  });
  add("embedding_m_r", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    return Sides{Mn(sample(sp, tr, 0), cx.tau), tr.mix[0].metadata.R};
  });
  add("embedding_l1", Group::homogenization, [](const PhaseSpace& sp, const Trial& tr, const Context& cx) {
    const Field g = sample(sp, tr, 0);
    return Sides{L1(g), std::pow(kPi / cx.tau, 3.0) * Mn(g, cx.tau)};
  });
  return list;
}

const std::vector<Inequality>& registry() {
  static const std::vector<Inequality> list = build_inequalities();
  return list;
}

const CampaignGrid& grid_for(const CampaignSpec& spec, Group group) {
  switch (group) {
    case Group::local: return spec.local;
    case Group::homogenization: return spec.homogenization;
    case Group::streaming: return spec.streaming;
  }
  return spec.local;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

const std::vector<std::string>& inequality_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& q : registry()) out.push_back(q.id);
    return out;
  }();
  return ids;
}

std::vector<InequalityVerdict> verify_inequalities(const CampaignSpec& spec, const ConstantsReport& constants) {
  spec.family.validate();
  const auto& in = constants.inputs;
  if (!same(in.tau, spec.family.tau) || !same(in.sigma, spec.sigma))
    throw ConfigError("verify_inequalities: generator rates (tau, sigma) differ from the constants report");
  if (!same(in.R, spec.family.R) || !same(in.M, spec.family.M))
    throw ConfigError("verify_inequalities: generator class (R, M) differs from the constants report");
  if (spec.trials < 1) throw ConfigError("verify_inequalities: trials must be positive");
  if (!(spec.max_time >= 0.0)) throw ConfigError("verify_inequalities: max_time must be nonnegative");
  for (const auto& id : spec.ids) {
    const auto& all = inequality_ids();
    if (std::find(all.begin(), all.end(), id) == all.end())
      throw ConfigError("verify_inequalities: unknown inequality id '" + id + "'");
  }
  for (Group g : {Group::homogenization}) {
    if (grid_for(spec, g).build().space->delta_x() > 1.0)
      throw ConfigError("verify_inequalities: homogenization grid needs delta_x <= 1");
  }

  KernelSpec kernel;
  kernel.form = in.lambda > 0.0 ? KernelForm::power_law_soft : KernelForm::constant_maxwell;
  kernel.b0 = in.b0;
  kernel.lambda = in.lambda;
  const Context cx{spec, constants, CollisionModel{kernel, spec.sphere}, StreamingScheme{}, in.tau, in.sigma};

  std::vector<InequalityVerdict> verdicts;
  const auto& list = registry();
  for (std::size_t q = 0; q < list.size(); ++q) {
    const Inequality& ineq = list[q];
    if (!spec.ids.empty() && std::find(spec.ids.begin(), spec.ids.end(), ineq.id) == spec.ids.end()) continue;
    const CampaignGrid& grid = grid_for(spec, ineq.group);
    const PhaseSpace space = grid.build();
    std::optional<PhaseSpace> coarse;

    InequalityVerdict v;
    v.id = ineq.id;
    v.trials = spec.trials;
    double worst_margin = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < spec.trials; ++k) {
      std::mt19937_64 rng = trial_rng(spec.seed, q, static_cast<std::uint64_t>(k));
      Trial trial;
      for (auto& m : trial.mix) m = sample_mixture(spec.family, rng);
      std::uniform_real_distribution<double> time(-spec.max_time, spec.max_time);
      trial.t = time(rng);
      trial.s = time(rng);

      const Sides fine = ineq.eval(space, trial, cx);
      double tol = spec.relative_slack * std::abs(fine.rhs);
      if (fine.lhs > fine.rhs) {
        if (!coarse) coarse = grid.half().build();
        const Sides half = ineq.eval(*coarse, trial, cx);
        tol += std::abs(fine.lhs - half.lhs) + std::abs(fine.rhs - half.rhs);
        ++v.reevaluated;
      }
      const double violation = std::max(0.0, fine.lhs - fine.rhs);
      if (fine.rhs > 0.0) v.max_ratio = std::max(v.max_ratio, fine.lhs / fine.rhs);
      if (violation - tol > worst_margin) {
        worst_margin = violation - tol;
        v.max_violation = violation;
        v.tolerance = tol;
      }
    }
    v.pass = v.max_violation <= v.tolerance;
    verdicts.push_back(v);
  }
  return verdicts;
}

}  // namespace kdl
