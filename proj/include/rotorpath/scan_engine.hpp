#ifndef ROTORPATH_SCAN_ENGINE_HPP
#define ROTORPATH_SCAN_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rotorpath/constants.hpp"
#include "rotorpath/coupling.hpp"
#include "rotorpath/error.hpp"
#include "rotorpath/field_model.hpp"
#include "rotorpath/quantum_core.hpp"
#include "rotorpath/rotor_model.hpp"

namespace rotorpath {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Largest step phase accepted for scans; finer is always allowed.
inline constexpr double kMaxScanStepPhase = 0.05;

/// Rejects discretizations coarser than the validated production setting.
inline void check_discretization(const PropagatorConfig& config, std::size_t n_levels) {
  config.validate();
  if (config.slices == 0 && config.step_phase > kMaxScanStepPhase) {
    throw ConfigError("propagator.step_phase_rad", "must not exceed 0.05 for scans");
  }
  if (config.resolved_xi_order(n_levels) < default_xi_order(n_levels)) {
    throw ConfigError("propagator.xi_order",
                      "must be at least " + std::to_string(default_xi_order(n_levels)) +
                          " for " + std::to_string(n_levels) + " levels");
  }
}

/// Everything a single-period run or a period sweep needs.
struct ScanConfig {
  MoleculeSpec molecule = presets::nitrogen14();
  PulseTrain pulse;                 // train_period is overridden per grid point in scans
  std::size_t n_levels = 8;
  double temperature = 6.3;         // K
  bool thermal_average = true;      // false: propagate from `initial_level` only
  std::size_t initial_level = 0;
  double window_margin = 5.0;       // pulse durations beyond the outermost pulse centers
  double period_min = 7.98e-12;     // s
  double period_max = 9.38e-12;     // s
  double period_step = 0.02e-12;    // s
  PropagatorConfig propagator;
  std::vector<std::size_t> resonance_levels{3, 4, 5, 6, 7};
  double truncation_threshold = 1e-2;
  std::size_t workers = 1;

  std::vector<double> period_grid() const {
    const double span = (period_max - period_min) / period_step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-6)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
      grid[i] = period_min + period_step * static_cast<double>(i);
    }
    return grid;
  }

  /// Checks fields used by single-period runs.
  void validate_point() const {
    molecule.validate();
    pulse.validate();
    if (n_levels < 1) throw ConfigError("model.n_levels", "must be positive");
    if (n_levels > 64) throw ConfigError("model.n_levels", "must not exceed 64");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
      throw ConfigError("model.temperature_k", "must be positive and finite");
    }
    if (!thermal_average && initial_level >= n_levels) {
      throw ConfigError("model.initial_level", "must be below model.n_levels");
    }
    if (!(window_margin >= 0.0) || !std::isfinite(window_margin)) {
      throw ConfigError("pulse.window_margin_durations", "must be non-negative");
    }
    check_discretization(propagator, n_levels);
    if (workers == 0) throw ConfigError("scan.workers", "must be positive");
  }

  /// Checks everything, including the sweep grid.
  void validate() const {
    validate_point();
    if (!(period_step > 0.0) || !std::isfinite(period_step)) {
      throw ConfigError("scan.period_step_ps", "must be positive");
    }
    if (!(period_min > 0.0)) throw ConfigError("scan.period_min_ps", "must be positive");
    if (!(period_min < period_max)) {
      throw ConfigError("scan.period_min_ps", "must be less than scan.period_max_ps");
    }
    if (period_grid().size() < 2) throw ConfigError("scan.period_step_ps", "grid needs at least 2 points");
    if (resonance_levels.empty()) throw ConfigError("scan.resonance_levels", "must not be empty");
    for (std::size_t l : resonance_levels) {
      if (l >= n_levels) throw ConfigError("scan.resonance_levels", "level beyond model.n_levels");
    }
    if (!(truncation_threshold > 0.0)) {
      throw ConfigError("scan.truncation_threshold", "must be positive");
    }
  }
};

inline std::string format_number(double value, int digits = 15) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return buffer;
}

inline std::string format_levels(std::span<const std::size_t> levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(levels[i]);
  }
  return out;
}

/// Flat key/value echo of a scan configuration, in the config-file vocabulary.
inline KeyValues echo(const ScanConfig& c) {
  KeyValues kv;
  kv.emplace_back("molecule.name", c.molecule.name);
  kv.emplace_back("molecule.moment_of_inertia_kg_m2", format_number(c.molecule.moment_of_inertia));
  kv.emplace_back("molecule.delta_alpha_c_m2_per_v", format_number(c.molecule.delta_alpha));
  if (c.molecule.reduced_mass) {
    kv.emplace_back("molecule.reduced_mass_kg", format_number(*c.molecule.reduced_mass));
    kv.emplace_back("molecule.bond_length_m", format_number(*c.molecule.bond_length));
  }
  kv.emplace_back("model.n_levels", std::to_string(c.n_levels));
  kv.emplace_back("model.temperature_k", format_number(c.temperature));
  kv.emplace_back("model.thermal_average", c.thermal_average ? "true" : "false");
  kv.emplace_back("model.initial_level", std::to_string(c.initial_level));
  kv.emplace_back("pulse.modulation_amplitude", format_number(c.pulse.modulation_amplitude));
  kv.emplace_back("pulse.peak_field_v_per_m", format_number(c.pulse.peak_field));
  kv.emplace_back("pulse.pulse_duration_fs", format_number(c.pulse.pulse_duration / kFemtosecond));
  kv.emplace_back("pulse.train_period_ps", format_number(c.pulse.train_period / kPicosecond));
  kv.emplace_back("pulse.index_min", std::to_string(c.pulse.index_min));
  kv.emplace_back("pulse.index_max", std::to_string(c.pulse.index_max));
  kv.emplace_back("pulse.window_margin_durations", format_number(c.window_margin));
  kv.emplace_back("propagator.step_phase_rad", format_number(c.propagator.step_phase));
  kv.emplace_back("propagator.xi_order", std::to_string(c.propagator.xi_order));
  kv.emplace_back("propagator.time_nodes", std::to_string(c.propagator.time_nodes));
  kv.emplace_back("propagator.k_multiplier", std::to_string(c.propagator.k_multiplier));
  kv.emplace_back("propagator.slices", std::to_string(c.propagator.slices));
  kv.emplace_back("scan.period_min_ps", format_number(c.period_min / kPicosecond));
  kv.emplace_back("scan.period_max_ps", format_number(c.period_max / kPicosecond));
  kv.emplace_back("scan.period_step_ps", format_number(c.period_step / kPicosecond));
  kv.emplace_back("scan.resonance_levels", format_levels(c.resonance_levels));
  kv.emplace_back("scan.truncation_threshold", format_number(c.truncation_threshold));
  kv.emplace_back("scan.workers", std::to_string(c.workers));
  return kv;
}

/// Populations after the pulse train at one period.
struct PointResult {
  double period = 0.0;
  std::vector<double> populations;  // P(l_f), thermally averaged unless disabled
  RealMatrix transitions;           // P(l_f | l_in), rows l_in; only row initial_level when not averaging
  std::size_t slices = 0;
};

inline PulseTrain train_with_period(const ScanConfig& config, double period) {
  PulseTrain train = config.pulse;
  train.train_period = period;
  return train;
}

inline PointResult simulate_point(const ScanConfig& config, double period,
                                  const GeometryMatrix& geometry) {
  const std::size_t n = config.n_levels;
  const QuantumSystem system = QuantumSystem::from_energies(rotor_ladder(n, config.molecule));
  const LaserCoupling coupling(config.molecule, geometry, train_with_period(config, period),
                               config.window_margin);
  const TimeWindow window = coupling.window();

  PointResult point;
  point.period = period;
  point.transitions = RealMatrix(n);
  if (config.thermal_average) {
    std::vector<std::size_t> levels(n);
    for (std::size_t l = 0; l < n; ++l) levels[l] = l;
    const PropagationResult r = propagate(system, coupling, window, levels, config.propagator);
    point.slices = r.slices;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < n; ++f) point.transitions(i, f) = transition_probability(r.finals[i], f);
    }
    const ThermalState thermal = boltzmann_populations(config.temperature, system.energies());
    point.populations = thermal_average(point.transitions, thermal.populations);
  } else {
    const std::size_t levels[] = {config.initial_level};
    const PropagationResult r = propagate(system, coupling, window, levels, config.propagator);
    point.slices = r.slices;
    point.populations = probabilities(r.finals.front());
    for (std::size_t f = 0; f < n; ++f) point.transitions(config.initial_level, f) = point.populations[f];
  }
  return point;
}

inline PointResult simulate_point(const ScanConfig& config, double period) {
  return simulate_point(config, period, GeometryMatrix::compute(config.n_levels));
}

/// Final populations over the period grid.
struct ScanResult {
  std::vector<double> periods;                  // s, ascending
  std::vector<std::vector<double>> raw;         // [period][level]
  std::vector<std::vector<double>> normalized;  // raw / max over periods, per level
  std::vector<std::string> warnings;
  KeyValues metadata;

  std::size_t n_levels() const { return raw.empty() ? 0 : raw.front().size(); }
};

/// Divides each level's column by its maximum over the grid. Columns that are identically
/// zero stay zero.
inline std::vector<std::vector<double>> normalize_per_level(const std::vector<std::vector<double>>& raw) {
  std::vector<std::vector<double>> out = raw;
  if (raw.empty()) return out;
  const std::size_t n = raw.front().size();
  for (std::size_t l = 0; l < n; ++l) {
    double peak = 0.0;
    for (const auto& row : raw) peak = std::max(peak, row[l]);
    for (auto& row : out) row[l] = peak > 0.0 ? row[l] / peak : 0.0;
  }
  return out;
}

/// Sweeps the train period. Grid points are split into contiguous blocks, one per worker,
/// and written into pre-sized slots, so the output does not depend on the worker count.
inline ScanResult run_scan(const ScanConfig& config) {
  config.validate();
  const std::vector<double> grid = config.period_grid();
  const GeometryMatrix geometry = GeometryMatrix::compute(config.n_levels);

  std::vector<std::vector<double>> raw(grid.size());
  std::vector<std::string> failures(grid.size());
  const std::size_t workers = std::min(config.workers, grid.size());

  auto run_block = [&](std::size_t w) {
    const std::size_t begin = w * grid.size() / workers;
    const std::size_t end = (w + 1) * grid.size() / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        raw[i] = simulate_point(config, grid[i], geometry).populations;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };

  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run_block, w);
  }

  std::string failed;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (failures[i].empty()) continue;
    failed += "\n  tau_per = " + format_number(grid[i] / kPicosecond, 9) + " ps: " + failures[i];
  }
  if (!failed.empty()) throw NumericalError("scan failed at" + failed);

  ScanResult result;
  result.periods = grid;
  result.raw = std::move(raw);
  result.normalized = normalize_per_level(result.raw);
  const std::size_t top = config.n_levels - 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = result.raw[i][top];
    if (p > config.truncation_threshold) {
      result.warnings.push_back("population " + format_number(p, 6) + " at l = " +
                                std::to_string(top) + " exceeds truncation threshold at tau_per = " +
                                format_number(grid[i] / kPicosecond, 9) + " ps");
    }
  }
  result.metadata.emplace_back("version", kVersion);
  for (auto& kv : echo(config)) result.metadata.push_back(std::move(kv));
  return result;
}

/// Sum of raw populations over `levels` at each grid point.
inline std::vector<double> level_set_population(const ScanResult& result,
                                                std::span<const std::size_t> levels) {
  std::vector<double> sums(result.periods.size(), 0.0);
  for (std::size_t i = 0; i < result.periods.size(); ++i) {
    for (std::size_t l : levels) {
      if (l >= result.raw[i].size()) throw ContractViolation("level_set_population: level out of range");
      sums[i] += result.raw[i][l];
    }
  }
  return sums;
}

/// Period maximizing the summed population of `levels`; ties go to the smaller period.
inline double find_resonance(const ScanResult& result, std::span<const std::size_t> levels) {
  if (levels.empty()) throw ContractViolation("find_resonance: empty level set");
  if (result.periods.empty()) throw ContractViolation("find_resonance: empty scan");
  const std::vector<double> sums = level_set_population(result, levels);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sums.size(); ++i) {
    if (sums[i] > sums[best]) best = i;
  }
  return result.periods[best];
}

/// tau_per_ps,l,probability,normalized_probability; rows by period then level.
inline void write_csv(std::ostream& out, const ScanResult& result) {
  out << "tau_per_ps,l,probability,normalized_probability\n";
  char line[160];
  for (std::size_t i = 0; i < result.periods.size(); ++i) {
    for (std::size_t l = 0; l < result.raw[i].size(); ++l) {
      std::snprintf(line, sizeof line, "%.9g,%zu,%.9g,%.9g\n", result.periods[i] / kPicosecond, l,
                    result.raw[i][l], result.normalized[i][l]);
      out << line;
    }
  }
}

/// Plain PGM (P2): one row per level from l = 0 downward, one column per period.
inline void write_pgm(std::ostream& out, const ScanResult& result) {
  const std::size_t width = result.periods.size();
  const std::size_t height = result.n_levels();
  out << "P2\n" << width << ' ' << height << "\n255\n";
  for (std::size_t l = 0; l < height; ++l) {
    for (std::size_t i = 0; i < width; ++i) {
      if (i) out << ' ';
      out << std::lround(255.0 * result.normalized[i][l]);
    }
    out << '\n';
  }
}

inline void write_metadata(std::ostream& out, const ScanResult& result) {
  for (const auto& [key, value] : result.metadata) out << key << " = " << value << '\n';
  for (std::size_t i = 0; i < result.warnings.size(); ++i) {
    out << "warning." << i << " = " << result.warnings[i] << '\n';
  }
}

}  // namespace rotorpath

#endif
