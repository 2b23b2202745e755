#ifndef ROTORPATH_COMMANDS_HPP
#define ROTORPATH_COMMANDS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "rotorpath/config.hpp"
#include "rotorpath/coupling.hpp"
#include "rotorpath/error.hpp"
#include "rotorpath/oracle.hpp"
#include "rotorpath/quantum_core.hpp"
#include "rotorpath/rotor_model.hpp"
#include "rotorpath/scan_engine.hpp"

namespace rotorpath {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitToleranceBreach = 3,
  kExitNumericalAbort = 4,
};

/// Runs a subcommand, turning exceptions into the documented exit codes.
template <class F>
int run_guarded(F&& command, std::ostream& err) {
  try {
    return command();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

namespace detail {

inline std::filesystem::path output_path(const RunConfig& config, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec || !std::filesystem::is_directory(config.output_dir)) {
    throw ConfigError("output.dir", "cannot create directory '" + config.output_dir + "'");
  }
  return std::filesystem::path(config.output_dir) / file;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output.dir", "cannot write '" + path.string() + "'");
  return out;
}

inline std::string file_stem(const RunConfig& config) {
  std::string stem = config.scan.molecule.name;
  for (char& ch : stem) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    if (!keep) ch = '_';
  }
  return stem.empty() ? "molecule" : stem;
}

inline std::string fixed(double value, int digits = 9) { return format_number(value, digits); }

}  // namespace detail

/// Final populations at pulse.train_period_ps; writes <stem>_simulate.csv.
inline int cmd_simulate(const RunConfig& config, std::ostream& out) {
  validate(config);
  const PointResult point = simulate_point(config.scan, config.scan.pulse.train_period);
  const auto path = detail::output_path(config, detail::file_stem(config) + "_simulate.csv");
  {
    auto file = detail::open_output(path);
    file << "l,probability\n";
    for (std::size_t l = 0; l < point.populations.size(); ++l) {
      file << l << ',' << detail::fixed(point.populations[l]) << '\n';
    }
  }
  out << config.scan.molecule.name << " at tau_per = "
      << detail::fixed(point.period / kPicosecond) << " ps (" << point.slices << " slices)\n";
  out << "  l  population\n";
  char line[64];
  for (std::size_t l = 0; l < point.populations.size(); ++l) {
    std::snprintf(line, sizeof line, "%3zu  %.9f\n", l, point.populations[l]);
    out << line;
  }
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

/// Period sweep; writes <stem>_scan.csv, <stem>_map.pgm and <stem>_scan.meta.
inline int cmd_scan(const RunConfig& config, std::ostream& out) {
  validate(config);
  ScanResult result = run_scan(config.scan);
  for (const auto& kv : echo(config)) {
    if (kv.first.rfind("oracle.", 0) == 0 || kv.first.rfind("validate.", 0) == 0 ||
        kv.first.rfind("output.", 0) == 0) {
      result.metadata.push_back(kv);
    }
  }
  const std::string stem = detail::file_stem(config);
  const auto csv_path = detail::output_path(config, stem + "_scan.csv");
  const auto pgm_path = detail::output_path(config, stem + "_map.pgm");
  const auto meta_path = detail::output_path(config, stem + "_scan.meta");
  {
    auto csv = detail::open_output(csv_path);
    write_csv(csv, result);
    auto pgm = detail::open_output(pgm_path);
    write_pgm(pgm, result);
    auto meta = detail::open_output(meta_path);
    write_metadata(meta, result);
  }
  const double resonance = find_resonance(result, config.scan.resonance_levels);
  out << config.scan.molecule.name << ": " << result.periods.size() << " periods, resonance ("
      << format_levels(config.scan.resonance_levels) << ") at "
      << detail::fixed(resonance / kPicosecond) << " ps\n";
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  out << "wrote " << csv_path.string() << ", " << pgm_path.string() << ", " << meta_path.string()
      << '\n';
  return kExitOk;
}

/// Geometry matrix <l_to|cos^2|l_from> as matrix_elements.csv.
inline int cmd_matrix_elements(const RunConfig& config, std::ostream& out) {
  validate(config);
  const GeometryMatrix g = GeometryMatrix::compute(config.scan.n_levels);
  const auto path = detail::output_path(config, "matrix_elements.csv");
  std::string text = "l_to,l_from,value\n";
  for (std::size_t i = 0; i < g.n_levels(); ++i) {
    for (std::size_t j = 0; j < g.n_levels(); ++j) {
      text += std::to_string(i) + ',' + std::to_string(j) + ',' + detail::fixed(g(i, j)) + '\n';
    }
  }
  detail::open_output(path) << text;
  out << text << "wrote " << path.string() << '\n';
  return kExitOk;
}

/// Path-integral propagator and RK4 oracle side by side at one period.
struct ValidationReport {
  std::vector<double> path_integral;
  std::vector<double> oracle;
  double max_abs_diff = 0.0;             // over the reported populations
  double max_conditional_diff = 0.0;     // over all P(l_f | l_in) that were propagated
  std::size_t slices = 0;
};

inline ValidationReport compare_with_oracle(const RunConfig& config) {
  const ScanConfig& s = config.scan;
  const std::size_t n = s.n_levels;
  const double period = s.pulse.train_period;
  const GeometryMatrix geometry = GeometryMatrix::compute(n);
  const PointResult point = simulate_point(s, period, geometry);

  const QuantumSystem system = QuantumSystem::from_energies(rotor_ladder(n, s.molecule));
  const LaserCoupling coupling(s.molecule, geometry, train_with_period(s, period), s.window_margin,
                               config.oracle.include_diagonal ? DiagonalPolicy::keep
                                                              : DiagonalPolicy::zero);
  RealMatrix reference(n);
  std::vector<double> oracle_pop;
  if (s.thermal_average) {
    reference = oracle_transition_matrix(system, coupling, coupling.window(), config.oracle);
    const ThermalState thermal = boltzmann_populations(s.temperature, system.energies());
    oracle_pop = thermal_average(reference, thermal.populations);
  } else {
    const AmplitudeVector a = integrate(system, coupling, coupling.window(), s.initial_level, config.oracle);
    oracle_pop = probabilities(a);
    for (std::size_t f = 0; f < n; ++f) reference(s.initial_level, f) = oracle_pop[f];
  }

  ValidationReport report;
  report.path_integral = point.populations;
  report.oracle = oracle_pop;
  report.slices = point.slices;
  for (std::size_t l = 0; l < n; ++l) {
    report.max_abs_diff = std::max(report.max_abs_diff, std::abs(point.populations[l] - oracle_pop[l]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.thermal_average && i != s.initial_level) continue;
    for (std::size_t f = 0; f < n; ++f) {
      report.max_conditional_diff =
          std::max(report.max_conditional_diff, std::abs(point.transitions(i, f) - reference(i, f)));
    }
  }
  return report;
}

/// Writes <stem>_validate.csv; exit 3 when max |dP| exceeds validate.tolerance.
inline int cmd_validate(const RunConfig& config, std::ostream& out) {
  validate(config);
  const ValidationReport report = compare_with_oracle(config);
  const auto path = detail::output_path(config, detail::file_stem(config) + "_validate.csv");
  {
    auto file = detail::open_output(path);
    file << "l,path_integral,oracle,abs_diff\n";
    for (std::size_t l = 0; l < report.oracle.size(); ++l) {
      file << l << ',' << detail::fixed(report.path_integral[l]) << ','
           << detail::fixed(report.oracle[l]) << ','
           << detail::fixed(std::abs(report.path_integral[l] - report.oracle[l])) << '\n';
    }
  }
  out << "max |dP| = " << detail::fixed(report.max_abs_diff, 6)
      << " (conditional " << detail::fixed(report.max_conditional_diff, 6) << "), tolerance "
      << detail::fixed(config.validate_tolerance, 6) << ", " << report.slices << " slices\n";
  out << "wrote " << path.string() << '\n';
  if (report.max_abs_diff > config.validate_tolerance) {
    out << "FAIL: propagator and oracle disagree beyond tolerance\n";
    return kExitToleranceBreach;
  }
  out << "OK\n";
  return kExitOk;
}

}  // namespace rotorpath

#endif
