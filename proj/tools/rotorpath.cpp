// rotorpath command-line front end: simulate, scan, matrix-elements, validate.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rotorpath/commands.hpp"
#include "rotorpath/config.hpp"

namespace {

std::string key_reference() {
  std::string text = "Configuration keys (file lines 'key = value'):\n";
  for (const auto& k : rotorpath::config_keys()) {
    char line[200];
    std::snprintf(line, sizeof line, "  %-36s [%s] %s\n", k.key, k.unit, k.description);
    text += line;
  }
  text += "\nEnvironment: ROTORPATH_WORKERS sets the default worker count.\n"
          "Exit codes: 0 ok, 2 config error, 3 validation tolerance breach, 4 numerical abort.\n";
  return text;
}

struct Options {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::optional<std::size_t> workers;
  std::optional<double> period_ps;
  std::optional<double> tolerance;
};

rotorpath::RunConfig resolve(const Options& opt) {
  using namespace rotorpath;
  RunConfig config = opt.preset_name.empty() ? preset("n14") : preset(opt.preset_name);
  bool workers_from_file = false;
  if (!opt.config_path.empty()) {
    const KeyValues kv = load_key_values(opt.config_path);
    for (const auto& [key, value] : kv) workers_from_file |= key == "scan.workers";
    apply(kv, config);
  }
  if (opt.workers) {
    config.scan.workers = *opt.workers;
  } else if (!workers_from_file) {
    if (const char* env = std::getenv("ROTORPATH_WORKERS")) {
      apply("scan.workers", env, config);
    }
  }
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  if (opt.period_ps) config.scan.pulse.train_period = *opt.period_ps * kPicosecond;
  if (opt.tolerance) config.validate_tolerance = *opt.tolerance;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotorpath: rotational excitation of diatomic molecules by pulse trains"};
  app.footer(key_reference());
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "configuration file (key = value lines)");
    cmd->add_option("--preset", opt.preset_name, "built-in parameter set")
        ->check(CLI::IsMember({"n14", "n15"}));
    cmd->add_option("--out", opt.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--workers", opt.workers, "worker threads (overrides scan.workers)");
  };

  auto* simulate = app.add_subcommand("simulate", "final populations at one train period");
  add_common(simulate);
  simulate->add_option("--period-ps", opt.period_ps, "train period in ps (overrides pulse.train_period_ps)");

  auto* scan = app.add_subcommand("scan", "sweep the train period; CSV, PGM map and metadata");
  add_common(scan);

  auto* matrix = app.add_subcommand("matrix-elements", "dump <l'|cos^2 theta|l> as CSV");
  add_common(matrix);

  auto* validate = app.add_subcommand("validate", "compare the propagator with the RK4 oracle");
  add_common(validate);
  validate->add_option("--period-ps", opt.period_ps, "train period in ps (overrides pulse.train_period_ps)");
  validate->add_option("--tolerance", opt.tolerance, "max allowed |dP| (overrides validate.tolerance)");

  auto* config = app.add_subcommand("config", "print the resolved configuration");
  add_common(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rotorpath::kExitConfigError;
  }

  return rotorpath::run_guarded(
      [&]() -> int {
        const rotorpath::RunConfig resolved = resolve(opt);
        if (*simulate) return rotorpath::cmd_simulate(resolved, std::cout);
        if (*scan) return rotorpath::cmd_scan(resolved, std::cout);
        if (*matrix) return rotorpath::cmd_matrix_elements(resolved, std::cout);
        if (*validate) return rotorpath::cmd_validate(resolved, std::cout);
        rotorpath::validate(resolved);
        std::cout << rotorpath::to_text(rotorpath::echo(resolved));
        return rotorpath::kExitOk;
      },
      std::cerr);
}
