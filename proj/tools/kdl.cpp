#include "kdl/cli.hpp"
#include "kdl/error.hpp"
#include "kdl/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Discretized kinetic collision model driver"};
  app.require_subcommand(1);
  std::string config_path;
  int workers = 0;
  std::string out_dir;
  bool allow_unknown = false;
  for (const char* name : {"run", "converge", "verify", "constants", "discrepancy"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file")->required();
    sub->add_option("--workers", workers, "worker threads (default: KDL_WORKERS, else 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--allow-unknown-keys", allow_unknown, "ignore unrecognised config keys");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << kdl::error_json("UsageError", e.what()) << "\n";
    return kdl::kExitConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  if (workers > 0) kdl::set_workers(workers);
  kdl::RunConfig cfg;
  try {
    cfg = kdl::parse_config(config_path, kdl::ParseOptions{allow_unknown});
  } catch (const kdl::ConfigValidationError& e) {
    std::cerr << kdl::error_json("ConfigError", e.what(), e.violations()) << "\n";
    return kdl::kExitConfigError;
  } catch (const kdl::IoError& e) {
    std::cerr << kdl::error_json("IoError", e.what()) << "\n";
    return kdl::kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << kdl::error_json("ConfigError", e.what()) << "\n";
    return kdl::kExitConfigError;
  }
  if (!out_dir.empty()) {
    cfg.output_dir = out_dir;
    cfg.echo["output.dir"] = out_dir;
  }
  return kdl::execute(cfg, kdl::parse_subcommand(name), std::cerr);
}
