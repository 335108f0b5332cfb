#include "kdl/cli.hpp"
#include "kdl/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace kdl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const long long v = to_integer(s);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("integer out of range: '" + s + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(item));
  return out;
}

// "a alpha tau [x y z vx vy vz]"
GaussianComponent to_gaussian(const std::string& s) {
  const auto v = to_doubles(s);
  if (v.size() != 3 && v.size() != 9)
    throw ConfigError("a Gaussian needs 3 numbers (amplitude alpha tau) or 9 (plus x and v centres)");
  GaussianComponent c;
  c.amplitude = v[0];
  c.alpha = v[1];
  c.tau = v[2];
  if (v.size() == 9) {
    c.center_x = Vec3(v[3], v[4], v[5]);
    c.center_v = Vec3(v[6], v[7], v[8]);
  }
  return c;
}

std::string gaussian_text(const GaussianComponent& c) {
  std::string out = fmt(c.amplitude) + " " + fmt(c.alpha) + " " + fmt(c.tau);
  for (int i = 0; i < 3; ++i) out += " " + fmt(c.center_x(i));
  for (int i = 0; i < 3; ++i) out += " " + fmt(c.center_v(i));
  return out;
}

// "L n m v_max nv"
CampaignGrid to_grid(const std::string& s) {
  const auto v = to_doubles(s);
  if (v.size() != 5) throw ConfigError("a campaign grid needs 5 numbers: L fine_cells block_factor v_max nodes");
  return CampaignGrid{v[0], static_cast<int>(v[1]), static_cast<int>(v[2]), v[3], static_cast<int>(v[4])};
}

std::string grid_text(const CampaignGrid& g) {
  return fmt(g.half_width) + " " + std::to_string(g.fine_cells) + " " + std::to_string(g.block_factor) + " " +
         fmt(g.v_max) + " " + std::to_string(g.velocity_nodes);
}

std::vector<Resolution> to_ladder(const std::string& s) {
  std::vector<Resolution> out;
  for (const auto& item : split_list(s)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("ladder entries are dt:block_factor, got '" + item + "'");
    out.push_back({to_double(item.substr(0, colon)), to_int(item.substr(colon + 1))});
  }
  if (out.empty()) throw ConfigError("ladder is empty");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out;
}


struct Pending {
  std::map<int, GaussianComponent> initial;
  std::map<int, GaussianComponent> other;
  bool ladder_set = false;
  bool reference_set = false;
  std::optional<double> verify_tau;
  std::optional<double> verify_sigma;
};

const std::map<std::string, std::function<void(RunConfig&, Pending&, const std::string&)>>& setters() {
  using F = std::function<void(RunConfig&, Pending&, const std::string&)>;
  static const std::map<std::string, F> table = {
      {"schema_version", [](RunConfig& c, Pending&, const std::string& v) { c.schema_version = to_int(v); }},
      {"seed",
       [](RunConfig& c, Pending&, const std::string& v) {
         const long long s = to_integer(v);
         if (s < 0) throw ConfigError("seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"output.dir", [](RunConfig& c, Pending&, const std::string& v) { c.output_dir = v; }},
      {"domain.L", [](RunConfig& c, Pending&, const std::string& v) { c.half_width = to_double(v); }},
      {"domain.fine_cells", [](RunConfig& c, Pending&, const std::string& v) { c.fine_cells = to_int(v); }},
      {"domain.block_factor", [](RunConfig& c, Pending&, const std::string& v) { c.block_factor = to_int(v); }},
      {"domain.v_max", [](RunConfig& c, Pending&, const std::string& v) { c.v_max = to_double(v); }},
      {"domain.velocity_nodes", [](RunConfig& c, Pending&, const std::string& v) { c.velocity_nodes = to_int(v); }},
      {"kernel.form", [](RunConfig& c, Pending&, const std::string& v) { c.kernel.form = parse_kernel_form(v); }},
      {"kernel.b0", [](RunConfig& c, Pending&, const std::string& v) { c.kernel.b0 = to_double(v); }},
      {"kernel.lambda", [](RunConfig& c, Pending&, const std::string& v) { c.kernel.lambda = to_double(v); }},
      {"kernel.n_theta", [](RunConfig& c, Pending&, const std::string& v) { c.n_theta = to_int(v); }},
      {"kernel.n_phi", [](RunConfig& c, Pending&, const std::string& v) { c.n_phi = to_int(v); }},
      {"scheme.dt", [](RunConfig& c, Pending&, const std::string& v) { c.dt = to_double(v); }},
      {"scheme.T", [](RunConfig& c, Pending&, const std::string& v) { c.T = to_double(v); }},
      {"scheme.streaming",
       [](RunConfig& c, Pending&, const std::string& v) { c.streaming.mode = parse_streaming_mode(v); }},
      {"scheme.boundary",
       [](RunConfig& c, Pending&, const std::string& v) { c.streaming.boundary = parse_boundary_mode(v); }},
      {"scheme.moment_fix", [](RunConfig& c, Pending&, const std::string& v) { c.moment_fix = to_bool(v); }},
      {"scheme.snapshot_times", [](RunConfig& c, Pending&, const std::string& v) { c.snapshot_times = to_doubles(v); }},
      {"scheme.snapshot_cap", [](RunConfig& c, Pending&, const std::string& v) { c.snapshot_cap = to_int(v); }},
      {"scheme.all_snapshots", [](RunConfig& c, Pending&, const std::string& v) { c.all_snapshots = to_bool(v); }},
      {"guard.R_plus_rho", [](RunConfig& c, Pending&, const std::string& v) { c.guard_R_plus_rho = to_double(v); }},
      {"guard.sigma", [](RunConfig& c, Pending&, const std::string& v) { c.guard_sigma = to_double(v); }},
      {"analysis.taus", [](RunConfig& c, Pending&, const std::string& v) { c.taus = to_doubles(v); }},
      {"analysis.diagnostic_tau", [](RunConfig& c, Pending&, const std::string& v) { c.diagnostic_tau = to_double(v); }},
      {"constants.R", [](RunConfig& c, Pending&, const std::string& v) { c.constants.R = to_double(v); }},
      {"constants.M", [](RunConfig& c, Pending&, const std::string& v) { c.constants.M = to_double(v); }},
      {"constants.T", [](RunConfig& c, Pending&, const std::string& v) { c.constants.T = to_double(v); }},
      {"constants.tau", [](RunConfig& c, Pending&, const std::string& v) { c.constants.tau = to_double(v); }},
      {"constants.sigma", [](RunConfig& c, Pending&, const std::string& v) { c.constants.sigma = to_double(v); }},
      {"constants.tau1", [](RunConfig& c, Pending&, const std::string& v) { c.constants.tau1 = to_double(v); }},
      {"constants.tau_star", [](RunConfig& c, Pending&, const std::string& v) { c.constants.tau_star = to_double(v); }},
      {"constants.M0", [](RunConfig& c, Pending&, const std::string& v) { c.constants.M0 = to_double(v); }},
      {"verify.trials", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.trials = to_int(v); }},
      {"verify.tau", [](RunConfig&, Pending& p, const std::string& v) { p.verify_tau = to_double(v); }},
      {"verify.sigma", [](RunConfig&, Pending& p, const std::string& v) { p.verify_sigma = to_double(v); }},
      {"verify.max_components",
       [](RunConfig& c, Pending&, const std::string& v) { c.campaign.family.max_components = to_int(v); }},
      {"verify.rate_gap", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.family.rate_gap = to_double(v); }},
      {"verify.center_x", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.family.center_x = to_double(v); }},
      {"verify.center_v", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.family.center_v = to_double(v); }},
      {"verify.max_time", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.max_time = to_double(v); }},
      {"verify.relative_slack",
       [](RunConfig& c, Pending&, const std::string& v) { c.campaign.relative_slack = to_double(v); }},
      {"verify.ids", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.ids = split_list(v); }},
      {"verify.local_grid", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.local = to_grid(v); }},
      {"verify.homogenization_grid",
       [](RunConfig& c, Pending&, const std::string& v) { c.campaign.homogenization = to_grid(v); }},
      {"verify.streaming_grid", [](RunConfig& c, Pending&, const std::string& v) { c.campaign.streaming = to_grid(v); }},
      {"converge.ladder",
       [](RunConfig& c, Pending& p, const std::string& v) {
         c.ladder = to_ladder(v);
         p.ladder_set = true;
       }},
      {"converge.reference_dt",
       [](RunConfig& c, Pending& p, const std::string& v) {
         c.reference_dt = to_double(v);
         p.reference_set = true;
       }},
      {"discrepancy.snapshot", [](RunConfig& c, Pending&, const std::string& v) { c.discrepancy_snapshot = v; }},
  };
  return table;
}

// "prefix.<index>" with a nonnegative integer index
std::optional<int> indexed_key(const std::string& key, const std::string& prefix) {
  if (key.rfind(prefix, 0) != 0) return std::nullopt;
  const std::string rest = key.substr(prefix.size());
  if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return to_int(rest);
}

void check(std::vector<std::string>& errors, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
}

void fill_echo(RunConfig& c) {
  auto& e = c.echo;
  e.clear();
  e["schema_version"] = std::to_string(c.schema_version);
  e["seed"] = std::to_string(c.seed);
  e["output.dir"] = c.output_dir.string();
  e["domain.L"] = fmt(c.half_width);
  e["domain.fine_cells"] = std::to_string(c.fine_cells);
  e["domain.block_factor"] = std::to_string(c.block_factor);
  e["domain.v_max"] = fmt(c.v_max);
  e["domain.velocity_nodes"] = std::to_string(c.velocity_nodes);
  e["kernel.form"] = to_string(c.kernel.form);
  e["kernel.b0"] = fmt(c.kernel.b0);
  e["kernel.lambda"] = fmt(c.kernel.lambda);
  e["kernel.n_theta"] = std::to_string(c.n_theta);
  e["kernel.n_phi"] = std::to_string(c.n_phi);
  for (std::size_t i = 0; i < c.initial.size(); ++i) e["initial.gaussian." + std::to_string(i)] = gaussian_text(c.initial[i]);
  e["scheme.dt"] = fmt(c.dt);
  e["scheme.T"] = fmt(c.T);
  e["scheme.streaming"] = to_string(c.streaming.mode);
  e["scheme.boundary"] = to_string(c.streaming.boundary);
  e["scheme.moment_fix"] = c.moment_fix ? "true" : "false";
  e["scheme.snapshot_times"] = join<double>(c.snapshot_times, fmt);
  e["scheme.snapshot_cap"] = std::to_string(c.snapshot_cap);
  e["scheme.all_snapshots"] = c.all_snapshots ? "true" : "false";
  e["guard.R_plus_rho"] = c.guard_R_plus_rho ? fmt(*c.guard_R_plus_rho) : "derived";
  e["guard.sigma"] = c.guard_sigma ? fmt(*c.guard_sigma) : "derived";
  e["analysis.taus"] = join<double>(c.taus, fmt);
  e["analysis.diagnostic_tau"] = fmt(c.diagnostic_tau);
  e["constants.R"] = fmt(c.constants.R);
  e["constants.M"] = fmt(c.constants.M);
  e["constants.T"] = fmt(c.constants.T);
  e["constants.tau"] = fmt(c.constants.tau);
  e["constants.sigma"] = fmt(c.constants.sigma);
  e["constants.tau1"] = fmt(c.constants.tau1);
  e["constants.tau_star"] = fmt(c.constants.tau_star);
  e["constants.M0"] = fmt(c.constants.M0);
  const auto& cp = c.campaign;
  e["verify.trials"] = std::to_string(cp.trials);
  e["verify.tau"] = fmt(cp.family.tau);
  e["verify.sigma"] = fmt(cp.sigma);
  e["verify.max_components"] = std::to_string(cp.family.max_components);
  e["verify.rate_gap"] = fmt(cp.family.rate_gap);
  e["verify.center_x"] = fmt(cp.family.center_x);
  e["verify.center_v"] = fmt(cp.family.center_v);
  e["verify.max_time"] = fmt(cp.max_time);
  e["verify.relative_slack"] = fmt(cp.relative_slack);
  e["verify.ids"] = join<std::string>(cp.ids, [](const std::string& s) { return s; });
  e["verify.local_grid"] = grid_text(cp.local);
  e["verify.homogenization_grid"] = grid_text(cp.homogenization);
  e["verify.streaming_grid"] = grid_text(cp.streaming);
  e["converge.ladder"] = join<Resolution>(
      c.ladder, [](const Resolution& r) { return fmt(r.dt) + ":" + std::to_string(r.block_factor); });
  e["converge.reference_dt"] = fmt(c.reference_dt);
  for (std::size_t i = 0; i < c.discrepancy_other.size(); ++i)
    e["discrepancy.gaussian." + std::to_string(i)] = gaussian_text(c.discrepancy_other[i]);
  e["discrepancy.snapshot"] = c.discrepancy_snapshot;
}

}  // namespace

PhaseSpace RunConfig::phase_space() const {
  return PhaseSpace(SpatialPartition(half_width, fine_cells, block_factor), VelocityGrid(v_max, velocity_nodes));
}

CollisionModel RunConfig::model() const {
  return CollisionModel{kernel.with_velocity_cutoff(v_max), SphereQuadrature(n_theta, n_phi)};
}

SchemeParams RunConfig::scheme_params() const {
  SchemeParams p;
  p.dt = dt;
  p.T = T;
  p.model = model();
  p.streaming = streaming;
  p.moment_fix = moment_fix;
  p.diagnostic_tau = diagnostic_tau;
  p.snapshot_cap = snapshot_cap;
  p.snapshot_times = snapshot_times;
  if (guard_R_plus_rho && guard_sigma) p.guard = PositivityBound{*guard_R_plus_rho, *guard_sigma};
  return p;
}

RunConfig parse_config_text(const std::string& text, const ParseOptions& options) {
  RunConfig cfg;
  Pending pending;
  std::vector<std::string> errors;
  std::map<std::string, int> seen;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back(where + "empty key");
      continue;
    }
    if (auto it = seen.find(key); it != seen.end()) {
      errors.push_back(where + "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
      continue;
    }
    seen[key] = line_no;
    try {
      if (auto i = indexed_key(key, "initial.gaussian.")) {
        pending.initial[*i] = to_gaussian(value);
      } else if (auto k = indexed_key(key, "discrepancy.gaussian.")) {
        pending.other[*k] = to_gaussian(value);
      } else if (auto it = setters().find(key); it != setters().end()) {
        it->second(cfg, pending, value);
      } else if (!options.allow_unknown_keys) {
        errors.push_back(where + "unknown key '" + key + "' (use --allow-unknown-keys to ignore)");
      }
    } catch (const std::exception& e) {
      const std::string what = e.what();
      errors.push_back(where + (what.rfind(key + ":", 0) == 0 ? what : key + ": " + what));
    }
  }

  for (const auto& [i, c] : pending.initial) cfg.initial.push_back(c);
  for (const auto& [i, c] : pending.other) cfg.discrepancy_other.push_back(c);
  if (cfg.initial.empty()) cfg.initial.push_back(GaussianComponent{0.01, 1.5, 1.5, Vec3::Zero(), Vec3::Zero()});

  cfg.constants.b0 = cfg.kernel.b0;
  cfg.constants.lambda = cfg.kernel.lambda;
  cfg.campaign.family.tau = pending.verify_tau.value_or(cfg.constants.tau);
  cfg.campaign.family.R = cfg.constants.R;
  cfg.campaign.family.M = cfg.constants.M;
  cfg.campaign.sigma = pending.verify_sigma.value_or(cfg.constants.sigma);
  cfg.campaign.seed = cfg.seed;
  check(errors, [&] { cfg.campaign.sphere = SphereQuadrature(cfg.n_theta, cfg.n_phi); });

  if (!pending.ladder_set) {
    const int coarse = cfg.fine_cells % 4 == 0 ? 4 : cfg.block_factor;
    const int mid = cfg.fine_cells % 2 == 0 ? 2 : cfg.block_factor;
    cfg.ladder = {{cfg.dt, coarse}, {cfg.dt / 2, mid}, {cfg.dt / 4, 1}};
  }
  if (!pending.reference_set) {
    double finest = cfg.dt;
    for (const auto& r : cfg.ladder) finest = std::min(finest, r.dt);
    cfg.reference_dt = finest / 8;
  }

  // cross-field validation
  if (cfg.schema_version != kSchemaVersion)
    errors.push_back("schema_version " + std::to_string(cfg.schema_version) + " is not supported (expected " +
                     std::to_string(kSchemaVersion) + ")");
  check(errors, [&] { SpatialPartition(cfg.half_width, cfg.fine_cells, cfg.block_factor); });
  check(errors, [&] { VelocityGrid(cfg.v_max, cfg.velocity_nodes); });
  if (cfg.velocity_nodes < 2) errors.push_back("domain.velocity_nodes must be at least 2");
  if (!(cfg.kernel.lambda >= 0.0 && cfg.kernel.lambda < 2.0))
    errors.push_back("kernel.lambda = " + fmt(cfg.kernel.lambda) +
                     " violates the soft cutoff assumption 0 <= lambda < 2");
  if (cfg.kernel.b0 < 0.0) errors.push_back("kernel.b0 must be nonnegative (0 means collisionless)");
  if (cfg.kernel.b0 > 0.0 && cfg.kernel.lambda >= 0.0 && cfg.kernel.lambda < 2.0)
    check(errors, [&] { cfg.kernel.validate(); });
  if (!(cfg.dt > 0.0)) errors.push_back("scheme.dt must be positive");
  if (!(cfg.T > 0.0)) errors.push_back("scheme.T must be positive");
  if (cfg.dt > 0.0 && cfg.T > 0.0 && !(cfg.dt < cfg.T))
    errors.push_back("scheme.dt = " + fmt(cfg.dt) + " must be smaller than scheme.T = " + fmt(cfg.T));
  for (double t : cfg.snapshot_times)
    if (!(t >= 0.0 && t < cfg.T)) errors.push_back("scheme.snapshot_times entry " + fmt(t) + " is outside [0, T)");
  if (cfg.snapshot_cap < 2) errors.push_back("scheme.snapshot_cap must be at least 2");
  if (cfg.guard_R_plus_rho.has_value() != cfg.guard_sigma.has_value())
    errors.push_back("guard.R_plus_rho and guard.sigma must be given together");
  if (cfg.guard_R_plus_rho && !(*cfg.guard_R_plus_rho > 0.0)) errors.push_back("guard.R_plus_rho must be positive");
  if (cfg.guard_sigma && !(*cfg.guard_sigma > 0.0)) errors.push_back("guard.sigma must be positive");
  for (double t : cfg.taus)
    if (!(t > 0.0)) errors.push_back("analysis.taus entries must be positive");
  if (!(cfg.diagnostic_tau > 0.0)) errors.push_back("analysis.diagnostic_tau must be positive");
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    const auto& c = cfg.initial[i];
    if (!(c.tau > 0.0) || !(c.alpha >= 0.0))
      errors.push_back("initial.gaussian." + std::to_string(i) + ": needs alpha >= 0 and tau > 0");
  }
  for (std::size_t i = 0; i < cfg.discrepancy_other.size(); ++i) {
    const auto& c = cfg.discrepancy_other[i];
    if (!(c.tau > 0.0) || !(c.alpha >= 0.0))
      errors.push_back("discrepancy.gaussian." + std::to_string(i) + ": needs alpha >= 0 and tau > 0");
  }
  if (cfg.kernel.b0 > 0.0 && cfg.kernel.lambda >= 0.0 && cfg.kernel.lambda < 2.0)
    check(errors, [&] { cfg.constants.validate(); });
  for (const auto& r : cfg.ladder) {
    if (!(r.dt > 0.0)) errors.push_back("converge.ladder: dt must be positive");
    if (r.block_factor < 1 || cfg.fine_cells % r.block_factor != 0)
      errors.push_back("converge.ladder: block factor " + std::to_string(r.block_factor) + " does not divide " +
                       std::to_string(cfg.fine_cells) + " fine cells");
  }
  if (!(cfg.reference_dt > 0.0)) errors.push_back("converge.reference_dt must be positive");
  check(errors, [&] { cfg.campaign.family.validate(); });
  if (cfg.campaign.trials < 1) errors.push_back("verify.trials must be positive");
  for (const auto* g : {&cfg.campaign.local, &cfg.campaign.homogenization, &cfg.campaign.streaming})
    check(errors, [&] { g->build(); });
  for (const auto& id : cfg.campaign.ids) {
    const auto& all = inequality_ids();
    if (std::find(all.begin(), all.end(), id) == all.end()) errors.push_back("verify.ids: unknown id '" + id + "'");
  }

  if (!errors.empty()) throw ConfigValidationError(std::move(errors));
  fill_echo(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), options);
}

Subcommand parse_subcommand(const std::string& name) {
  if (name == "run") return Subcommand::run;
  if (name == "converge") return Subcommand::converge;
  if (name == "verify") return Subcommand::verify;
  if (name == "constants") return Subcommand::constants;
  if (name == "discrepancy") return Subcommand::discrepancy;
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::run: return "run";
    case Subcommand::converge: return "converge";
    case Subcommand::verify: return "verify";
    case Subcommand::constants: return "constants";
    case Subcommand::discrepancy: return "discrepancy";
  }
  return "unknown";
}

}  // namespace kdl
