#include "kdl/cli.hpp"
#include "kdl/error.hpp"
#include "kdl/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace kdl {

using nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json moments_json(const Moments& m) {
  return {{"mass", m.mass}, {"momentum", {m.momentum(0), m.momentum(1), m.momentum(2)}}, {"energy", m.energy}};
}

ordered_json constants_json(const ConstantsReport& r) {
  const auto& in = r.inputs;
  const auto& k = r.key;
  const auto& s = r.stability;
  return {
      {"inputs",
       {{"R", in.R}, {"M", in.M}, {"T", in.T}, {"tau", in.tau}, {"sigma", in.sigma}, {"tau1", in.tau1},
        {"tau_star", in.tau_star}, {"M0", in.M0}, {"b0", in.b0}, {"lambda", in.lambda}}},
      {"b_lambda", r.b_lambda},
      {"c_tau", r.c_tau},
      {"c_sigma", r.c_sigma},
      {"g_bound", r.g_bound},
      {"key",
       {{"k12", k.k12}, {"k22", k.k22}, {"k13", k.k13}, {"k23", k.k23}, {"k14", k.k14}, {"k24", k.k24},
        {"k15", k.k15}, {"k25", k.k25}, {"k1", k.k1}, {"k2", k.k2}}},
      {"d", {{"d1", r.d.d1}, {"d2", r.d.d2}}},
      {"stability",
       {{"C", {{"k", s.C.k}, {"c", s.C.c}, {"R", s.C.R}, {"T", s.C.T}}},
        {"C_at_R_plus_rho", s.C(in.R + s.rho)},
        {"rho", s.rho},
        {"X0", s.X0},
        {"T0", s.T0},
        {"chain_product", s.C(in.R + s.rho) * (s.T0 + s.X0)},
        {"D0", s.D0},
        {"T_star", s.T_star},
        {"K1_tilde", s.K1_tilde},
        {"K2_tilde", s.K2_tilde},
        {"K", s.K},
        {"K1", s.K1},
        {"K2", s.K2},
        {"error_constants_are_upper_bounds", true},
        {"fallback", s.fallback},
        {"warning", s.warning}}},
      {"theta", r.theta},
      {"M_spatial", r.M_spatial},
      {"R_star", r.R_star},
      {"M_star", r.M_star},
  };
}

struct Context {
  const RunConfig& cfg;
  ordered_json manifest;
  std::vector<std::string> warnings;
  std::optional<ConstantsReport> constants;
};

std::optional<ConstantsReport> try_constants(const RunConfig& cfg, std::vector<std::string>& warnings) {
  if (cfg.kernel.b0 == 0.0) return std::nullopt;
  try {
    return constants_report(cfg.constants);
  } catch (const std::exception& e) {
    warnings.push_back(std::string("constants report unavailable: ") + e.what());
    return std::nullopt;
  }
}

// fills the guard from the config, else from the constants report (R + rho, sigma)
SchemeParams scheme_with_guard(Context& cx) {
  SchemeParams p = cx.cfg.scheme_params();
  if (!p.guard && cx.constants)
    p.guard = PositivityBound{cx.constants->inputs.R + cx.constants->stability.rho, cx.constants->inputs.sigma};
  return p;
}

ordered_json guard_json(const PositivityGuard& g, const SchemeParams& p, bool derived) {
  ordered_json j;
  j["declared"] = g.declared;
  j["source"] = g.declared ? (derived ? "constants report (R + rho, sigma)" : "config") : "none";
  if (p.guard) {
    j["R_plus_rho"] = p.guard->R_plus_rho;
    j["sigma"] = p.guard->sigma;
  }
  j["collisionless"] = p.collisionless();
  if (g.declared && std::isfinite(g.timestep)) j["timestep"] = g.timestep;
  else j["timestep"] = nullptr;
  j["dt"] = p.dt;
  j["respected"] = g.respected;
  j["measured_b_sigma"] = g.measured_b_sigma;
  j["bound_exceeded"] = g.bound_exceeded;
  j["message"] = g.message;
  return j;
}

void fill_common(Context& cx, Subcommand sub) {
  const RunConfig& cfg = cx.cfg;
  auto& m = cx.manifest;
  m["library_version"] = kLibraryVersion;
  m["schema_version"] = cfg.schema_version;
  m["subcommand"] = to_string(sub);
  m["config"] = cfg.echo;
  m["seed"] = cfg.seed;
  m["workers"] = workers();
  m["truncation_error_bound"] = truncation_error_bound(cfg.initial, cfg.half_width, cfg.v_max);
  const PhaseSpace space = cfg.phase_space();
  const double dirs = SphereQuadrature(cfg.n_theta, cfg.n_phi).half_set().size();
  const double offsets = std::pow(2.0 * cfg.velocity_nodes - 1.0, 3.0);
  m["collision_cost"] = {{"complexity", "O(cells * velocity_nodes * offsets * directions)"},
                         {"cells", space.cells()},
                         {"velocity_nodes", space.nodes()},
                         {"offsets", offsets},
                         {"directions", dirs},
                         {"estimate", space.cells() * static_cast<double>(space.nodes()) * offsets * dirs}};

  SchemeParams p = scheme_with_guard(cx);
  const DistributionField<double> f0 = gaussian_field(space, cfg.initial);
  const PositivityGuard g = evaluate_guard(f0, p);
  m["positivity_guard"] = guard_json(g, p, !cfg.guard_R_plus_rho.has_value());
  if (g.declared && !g.respected) cx.warnings.push_back("positivity guard violated: " + g.message);
  if (g.bound_exceeded) cx.warnings.push_back("declared B_sigma bound exceeded by the initial data: " + g.message);
  if (cx.constants) {
    const double t_star = cx.constants->stability.T_star;
    m["stability"] = {{"T_star", t_star},
                      {"dt", p.dt},
                      {"dt_respects_T_star", p.dt <= t_star},
                      {"error_constants", {{"K1", cx.constants->stability.K1}, {"K2", cx.constants->stability.K2}}}};
    if (!(p.dt <= t_star)) cx.warnings.push_back("dt = " + num(p.dt) + " exceeds T* = " + num(t_star));
    if (cx.constants->stability.fallback) cx.warnings.push_back(cx.constants->stability.warning);
  } else {
    m["stability"] = nullptr;
  }
}

std::string diagnostics_csv(const Trajectory& traj) {
  std::string out = "t,mass,px,py,pz,energy,l1,bnorm,mnorm,minval\n";
  for (const auto& d : traj.diagnostics()) {
    const double vals[] = {d.t, d.moments.mass, d.moments.momentum(0), d.moments.momentum(1), d.moments.momentum(2),
                           d.moments.energy, d.l1, d.bnorm, d.mnorm, d.minval};
    for (std::size_t i = 0; i < std::size(vals); ++i) out += (i ? "," : "") + num(vals[i]);
    out += "\n";
  }
  return out;
}

std::string step_name(int j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06d.kdl1", j);
  return buf;
}

void do_run(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const auto dir = cfg.output_dir;
  std::filesystem::create_directories(dir / "snapshots");
  const PhaseSpace space = cfg.phase_space();
  const DistributionField<double> f0 = gaussian_field(space, cfg.initial);
  SchemeParams p = scheme_with_guard(cx);
  const int J = p.steps();
  std::set<int> keep{0, J};
  for (double t : cfg.snapshot_times) {
    if (t < J * p.dt) keep.insert(trajectory_index(p, t));
  }
  const bool exact_available = p.collisionless() && p.streaming.boundary == BoundaryMode::outflow;
  double transport_error = 0.0;
  std::vector<std::string> written;
  auto on_step = [&](int j, const DistributionField<double>& f) {
    if (cfg.all_snapshots || keep.count(j)) {
      write_snapshot(dir / "snapshots" / step_name(j), f);
      written.push_back(step_name(j));
    }
    if (exact_available && j > 0) {
      const auto exact = transported_gaussian(space, cfg.initial, j * p.dt);
      transport_error = std::max(transport_error, l1_norm(f - exact));
    }
  };
  const Trajectory traj = run(f0, p, on_step);
  write_text(dir / "diagnostics.csv", diagnostics_csv(traj));

  ordered_json norms_out = ordered_json::array();
  for (int j : {0, J}) {
    const NormReport r = norms(traj.snapshot(j), cfg.taus);
    norms_out.push_back({{"step", j}, {"t", j * p.dt}, {"l1", r.l1}, {"taus", r.taus}, {"b_norm", r.b_norm},
                         {"m_norm", r.m_norm}});
  }
  write_json(dir / "norms.json", norms_out);

  auto& m = cx.manifest;
  const auto& last = traj.diagnostics().back();
  m["steps"] = J;
  m["snapshots"] = written;
  m["initial_moments"] = moments_json(traj.diagnostics().front().moments);
  m["final_moments"] = moments_json(last.moments);
  m["outflow"] = {{"mass", last.outflow.mass},
                  {"momentum", {last.outflow.momentum(0), last.outflow.momentum(1), last.outflow.momentum(2)}},
                  {"energy", last.outflow.energy}};
  double min_all = 0.0;
  for (const auto& d : traj.diagnostics()) min_all = std::min(min_all, d.minval);
  m["min_value"] = min_all;
  if (exact_available) m["transport_l1_error"] = transport_error;
  for (const auto& w : traj.warnings()) {
    if (std::find(cx.warnings.begin(), cx.warnings.end(), w) == cx.warnings.end() &&
        w.find("positivity guard") == std::string::npos && w.find("B_sigma") == std::string::npos)
      cx.warnings.push_back(w);
  }
}

void do_converge(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  std::filesystem::create_directories(cfg.output_dir);
  const DistributionField<double> f0 = gaussian_field(cfg.phase_space(), cfg.initial);
  SchemeParams p = cfg.scheme_params();
  const ConvergenceTable table = convergence_study(f0, p, cfg.ladder, cfg.reference_dt);

  std::string csv = "dt,dx,block_factor,error\n";
  std::string series = "dt,block_factor,t,error\n";
  ordered_json rows = ordered_json::array();
  bool decreasing = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    csv += num(r.dt) + "," + num(r.dx) + "," + std::to_string(r.block_factor) + "," + num(r.error) + "\n";
    for (std::size_t k = 0; k < r.times.size(); ++k)
      series += num(r.dt) + "," + std::to_string(r.block_factor) + "," + num(r.times[k]) + "," + num(r.errors[k]) + "\n";
    rows.push_back({{"dt", r.dt}, {"dx", r.dx}, {"block_factor", r.block_factor}, {"error", r.error}});
    if (i > 0 && !(r.error < table.rows[i - 1].error)) decreasing = false;
  }
  write_text(cfg.output_dir / "convergence.csv", csv);
  write_text(cfg.output_dir / "convergence_series.csv", series);
  write_json(cfg.output_dir / "convergence.json", {{"order", table.order},
                                                   {"constant", table.constant},
                                                   {"residual", table.residual},
                                                   {"reference_dt", table.reference_dt},
                                                   {"strictly_decreasing", decreasing},
                                                   {"rows", rows}});
  cx.manifest["convergence"] = {{"order", table.order}, {"strictly_decreasing", decreasing}};
}

bool do_verify(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  if (cfg.kernel.b0 == 0.0) throw ConfigError("verify needs a collision kernel (kernel.b0 > 0)");
  std::filesystem::create_directories(cfg.output_dir);
  const ConstantsReport report = constants_report(cfg.constants);
  const auto verdicts = verify_inequalities(cfg.campaign, report);
  ordered_json out = ordered_json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    out.push_back({{"id", v.id},
                   {"trials", v.trials},
                   {"max_violation", v.max_violation},
                   {"tolerance", v.tolerance},
                   {"max_ratio", v.max_ratio},
                   {"reevaluated", v.reevaluated},
                   {"pass", v.pass}});
    all = all && v.pass;
  }
  write_json(cfg.output_dir / "verdicts.json", {{"all_pass", all}, {"verdicts", out}});
  cx.manifest["verification"] = {{"inequalities", verdicts.size()}, {"all_pass", all}};
  return all;
}

void do_constants(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  if (cfg.kernel.b0 == 0.0) throw ConfigError("constants need a collision kernel (kernel.b0 > 0)");
  std::filesystem::create_directories(cfg.output_dir);
  const ConstantsReport report = constants_report(cfg.constants);
  write_json(cfg.output_dir / "constants.json", constants_json(report));
  cx.manifest["positivity_timestep"] =
      positivity_timestep(report.inputs.R + report.stability.rho, report.inputs.sigma, cfg.kernel);
}

void do_discrepancy(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const PhaseSpace space = cfg.phase_space();
  const auto g = gaussian_field(space, cfg.initial);
  std::optional<DistributionField<double>> h;
  std::string source;
  if (!cfg.discrepancy_snapshot.empty()) {
    h = read_snapshot(cfg.discrepancy_snapshot, space);
    source = cfg.discrepancy_snapshot;
  } else if (!cfg.discrepancy_other.empty()) {
    h = gaussian_field(space, cfg.discrepancy_other);
    source = "discrepancy.gaussian.*";
  } else {
    throw ConfigError("discrepancy needs discrepancy.snapshot or discrepancy.gaussian.<i>");
  }
  std::filesystem::create_directories(cfg.output_dir);
  const Discrepancy d = discrepancy(g, *h);
  write_json(cfg.output_dir / "discrepancy.json", {{"value", d.value},
                                                   {"method", d.method},
                                                   {"marginal_only", d.marginal_only},
                                                   {"cost_estimate", d.cost_estimate},
                                                   {"compared_with", source}});
  cx.manifest["discrepancy"] = d.value;
}

}  // namespace

double truncation_error_bound(const GaussianMixture& mix, double half_width, double v_max) {
  // L1 mass of |analytic mixture| outside the box, union bound over the six
  // coordinates: a point is outside iff some |x_i| > L or |v_i| > v_max.
  double total = 0.0;
  for (const auto& c : mix) {
    const double mass = std::abs(c.amplitude) * std::pow(std::numbers::pi / c.alpha, 1.5) *
                        std::pow(std::numbers::pi / c.tau, 1.5);
    double outside = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sx = std::sqrt(c.alpha), sv = std::sqrt(c.tau);
      outside += 0.5 * (std::erfc(sx * (half_width - c.center_x(i))) + std::erfc(sx * (half_width + c.center_x(i))));
      outside += 0.5 * (std::erfc(sv * (v_max - c.center_v(i))) + std::erfc(sv * (v_max + c.center_v(i))));
    }
    total += mass * std::min(outside, 1.0);
  }
  return total;
}

std::string error_json(const std::string& type, const std::string& message, const std::vector<std::string>& violations,
                       std::optional<int> step) {
  ordered_json j;
  j["error"]["type"] = type;
  j["error"]["message"] = message;
  if (!violations.empty()) j["error"]["violations"] = violations;
  if (step) j["error"]["step"] = *step;
  return j.dump();
}

int execute(const RunConfig& config, Subcommand subcommand, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context cx{config, ordered_json::object(), {}, std::nullopt};
  int status = kExitOk;
  try {
    cx.constants = try_constants(config, cx.warnings);
    fill_common(cx, subcommand);
    switch (subcommand) {
      case Subcommand::run: do_run(cx); break;
      case Subcommand::converge: do_converge(cx); break;
      case Subcommand::verify:
        if (!do_verify(cx)) status = kExitVerificationFailed;
        break;
      case Subcommand::constants: do_constants(cx); break;
      case Subcommand::discrepancy: do_discrepancy(cx); break;
    }
    cx.manifest["warnings"] = cx.warnings;
    cx.manifest["status"] = status == kExitOk ? "ok" : "verification_failed";
    cx.manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::filesystem::create_directories(config.output_dir);
    write_json(config.output_dir / "manifest.json", cx.manifest);
    if (status == kExitVerificationFailed)
      err << error_json("VerificationFailed", "at least one inequality verdict failed; see verdicts.json") << "\n";
    return status;
  } catch (const ConfigValidationError& e) {
    err << error_json("ConfigError", e.what(), e.violations()) << "\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << error_json("ConfigError", e.what()) << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << error_json("IoError", e.what()) << "\n";
    return kExitIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_json("IoError", e.what()) << "\n";
    return kExitIoError;
  } catch (const NumericalError& e) {
    err << error_json("NumericalError", e.what(), {}, e.step()) << "\n";
    return kExitModuleError;
  } catch (const DomainError& e) {
    err << error_json("DomainError", e.what()) << "\n";
    return kExitModuleError;
  } catch (const PreconditionError& e) {
    err << error_json("PreconditionError", e.what()) << "\n";
    return kExitModuleError;
  } catch (const std::exception& e) {
    err << error_json("Error", e.what()) << "\n";
    return kExitModuleError;
  }
}

}  // namespace kdl
