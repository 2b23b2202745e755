#ifndef ROTORPATH_CONFIG_HPP
#define ROTORPATH_CONFIG_HPP

// Flat "namespace.key = value" configuration. Every physical key carries its unit in the
// name. Later sources override earlier ones: built-in preset, config file, command line.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rotorpath/constants.hpp"
#include "rotorpath/error.hpp"
#include "rotorpath/oracle.hpp"
#include "rotorpath/scan_engine.hpp"

namespace rotorpath {

struct RunConfig {
  ScanConfig scan;
  OdeConfig oracle;
  double validate_tolerance = 1e-2;
  std::string output_dir = ".";
};

struct KeyDoc {
  const char* key;
  const char* unit;
  const char* description;
};

inline const std::vector<KeyDoc>& config_keys() {
  static const std::vector<KeyDoc> keys = {
      {"molecule.name", "-", "label used in output file names"},
      {"molecule.moment_of_inertia_kg_m2", "kg m^2", "moment of inertia I"},
      {"molecule.delta_alpha_c_m2_per_v", "C m^2/V", "polarizability anisotropy"},
      {"molecule.reduced_mass_kg", "kg", "optional; with bond_length_m sets I = mu R^2"},
      {"molecule.bond_length_m", "m", "optional; see reduced_mass_kg"},
      {"model.n_levels", "count", "rotational levels l = 0 .. N-1"},
      {"model.temperature_k", "K", "temperature of the initial Boltzmann mixture"},
      {"model.thermal_average", "bool", "average over the thermal mixture (false: single level)"},
      {"model.initial_level", "index", "initial level when thermal_average = false"},
      {"pulse.modulation_amplitude", "1", "spectral phase modulation amplitude A"},
      {"pulse.peak_field_v_per_m", "V/m", "peak field E_0 (0 switches the field off)"},
      {"pulse.pulse_duration_fs", "fs", "Gaussian duration tau_pul"},
      {"pulse.train_period_ps", "ps", "train period tau_per for simulate/validate"},
      {"pulse.index_min", "index", "first pulse index n"},
      {"pulse.index_max", "index", "last pulse index n"},
      {"pulse.window_margin_durations", "tau_pul", "integration margin beyond outer pulses"},
      {"propagator.step_phase_rad", "rad", "max(|V|/hbar, |w|) * dt per slice (<= 0.05)"},
      {"propagator.xi_order", "count", "xi Gauss-Legendre order M (0 = 3(N-1)+6)"},
      {"propagator.time_nodes", "count", "Gauss-Legendre nodes for the time integral per slice"},
      {"propagator.k_multiplier", "count", "multiplies the slice count"},
      {"propagator.slices", "count", "explicit slice count (0 = from step_phase_rad)"},
      {"oracle.step_phase_rad", "rad", "RK4 max(|V|/hbar, |w|) * dt (<= 0.01)"},
      {"oracle.step_size_s", "s", "explicit RK4 step (0 = from step_phase_rad)"},
      {"oracle.include_diagonal", "bool", "keep <l|cos^2|l> in the RK4 coupling"},
      {"oracle.norm_tolerance", "1", "allowed RK4 norm drift"},
      {"scan.period_min_ps", "ps", "first train period of the sweep"},
      {"scan.period_max_ps", "ps", "last train period of the sweep"},
      {"scan.period_step_ps", "ps", "sweep step"},
      {"scan.resonance_levels", "list", "levels summed for the resonance, e.g. 3-7 or 3,4,5"},
      {"scan.truncation_threshold", "1", "warn when P(l = N-1) exceeds this"},
      {"scan.workers", "count", "worker threads (default: ROTORPATH_WORKERS, else 1)"},
      {"validate.tolerance", "1", "max allowed |dP| between propagator and oracle"},
      {"output.dir", "path", "directory for output files"},
  };
  return keys;
}

/// Built-in parameter sets: "n14" and "n15".
inline RunConfig preset(std::string_view name) {
  RunConfig config;
  if (name == "n14") {
    config.scan.molecule = presets::nitrogen14();
    config.scan.pulse.train_period = 8.38e-12;
  } else if (name == "n15") {
    config.scan.molecule = presets::nitrogen15();
    config.scan.pulse.train_period = 8.98e-12;
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (expected n14 or n15)");
  }
  return config;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

inline long long parse_integer(const std::string& key, std::string_view text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

inline std::size_t parse_count(const std::string& key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

/// "3-7", "3,5,7" or a mix such as "0,3-5".
inline std::vector<std::size_t> parse_levels(const std::string& key, std::string_view text) {
  std::vector<std::size_t> levels;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) throw ConfigError(key, "empty list item");
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      levels.push_back(parse_count(key, item));
    } else {
      const std::size_t lo = parse_count(key, trim(item.substr(0, dash)));
      const std::size_t hi = parse_count(key, trim(item.substr(dash + 1)));
      if (lo > hi) throw ConfigError(key, "descending range");
      for (std::size_t l = lo; l <= hi; ++l) levels.push_back(l);
    }
  }
  if (levels.empty()) throw ConfigError(key, "must not be empty");
  return levels;
}

}  // namespace detail

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
inline KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_number), "expected 'key = value'");
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_number), "missing key");
    kv.emplace_back(std::string(key), std::string(detail::trim(line.substr(eq + 1))));
  }
  return kv;
}

inline void apply(const std::string& key, const std::string& value, RunConfig& c) {
  using namespace detail;
  ScanConfig& s = c.scan;
  if (key == "molecule.name") {
    if (value.empty()) throw ConfigError(key, "must not be empty");
    s.molecule.name = value;
  } else if (key == "molecule.moment_of_inertia_kg_m2") {
    s.molecule.moment_of_inertia = parse_double(key, value);
  } else if (key == "molecule.delta_alpha_c_m2_per_v") {
    s.molecule.delta_alpha = parse_double(key, value);
  } else if (key == "molecule.reduced_mass_kg") {
    s.molecule.reduced_mass = parse_double(key, value);
  } else if (key == "molecule.bond_length_m") {
    s.molecule.bond_length = parse_double(key, value);
  } else if (key == "model.n_levels") {
    s.n_levels = parse_count(key, value);
  } else if (key == "model.temperature_k") {
    s.temperature = parse_double(key, value);
  } else if (key == "model.thermal_average") {
    s.thermal_average = parse_bool(key, value);
  } else if (key == "model.initial_level") {
    s.initial_level = parse_count(key, value);
  } else if (key == "pulse.modulation_amplitude") {
    s.pulse.modulation_amplitude = parse_double(key, value);
  } else if (key == "pulse.peak_field_v_per_m") {
    s.pulse.peak_field = parse_double(key, value);
  } else if (key == "pulse.pulse_duration_fs") {
    s.pulse.pulse_duration = parse_double(key, value) * kFemtosecond;
  } else if (key == "pulse.train_period_ps") {
    s.pulse.train_period = parse_double(key, value) * kPicosecond;
  } else if (key == "pulse.index_min") {
    s.pulse.index_min = static_cast<int>(parse_integer(key, value));
  } else if (key == "pulse.index_max") {
    s.pulse.index_max = static_cast<int>(parse_integer(key, value));
  } else if (key == "pulse.window_margin_durations") {
    s.window_margin = parse_double(key, value);
  } else if (key == "propagator.step_phase_rad") {
    s.propagator.step_phase = parse_double(key, value);
  } else if (key == "propagator.xi_order") {
    s.propagator.xi_order = parse_count(key, value);
  } else if (key == "propagator.time_nodes") {
    s.propagator.time_nodes = parse_count(key, value);
  } else if (key == "propagator.k_multiplier") {
    s.propagator.k_multiplier = parse_count(key, value);
  } else if (key == "propagator.slices") {
    s.propagator.slices = parse_count(key, value);
  } else if (key == "oracle.step_phase_rad") {
    c.oracle.step_phase = parse_double(key, value);
  } else if (key == "oracle.step_size_s") {
    const double dt = parse_double(key, value);
    c.oracle.step_size = dt == 0.0 ? std::optional<double>{} : std::optional<double>{dt};
  } else if (key == "oracle.include_diagonal") {
    c.oracle.include_diagonal = parse_bool(key, value);
  } else if (key == "oracle.norm_tolerance") {
    c.oracle.norm_tolerance = parse_double(key, value);
  } else if (key == "scan.period_min_ps") {
    s.period_min = parse_double(key, value) * kPicosecond;
  } else if (key == "scan.period_max_ps") {
    s.period_max = parse_double(key, value) * kPicosecond;
  } else if (key == "scan.period_step_ps") {
    s.period_step = parse_double(key, value) * kPicosecond;
  } else if (key == "scan.resonance_levels") {
    s.resonance_levels = parse_levels(key, value);
  } else if (key == "scan.truncation_threshold") {
    s.truncation_threshold = parse_double(key, value);
  } else if (key == "scan.workers") {
    s.workers = parse_count(key, value);
  } else if (key == "validate.tolerance") {
    c.validate_tolerance = parse_double(key, value);
  } else if (key == "output.dir") {
    c.output_dir = value;
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

inline void apply(const KeyValues& kv, RunConfig& config) {
  for (const auto& [key, value] : kv) apply(key, value, config);
}

inline KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_key_values(text.str());
}

inline KeyValues echo(const RunConfig& c) {
  KeyValues kv = echo(c.scan);
  kv.emplace_back("oracle.step_phase_rad", format_number(c.oracle.step_phase));
  kv.emplace_back("oracle.step_size_s", format_number(c.oracle.step_size.value_or(0.0)));
  kv.emplace_back("oracle.include_diagonal", c.oracle.include_diagonal ? "true" : "false");
  kv.emplace_back("oracle.norm_tolerance", format_number(c.oracle.norm_tolerance));
  kv.emplace_back("validate.tolerance", format_number(c.validate_tolerance));
  kv.emplace_back("output.dir", c.output_dir);
  return kv;
}

inline std::string to_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [key, value] : kv) out += key + " = " + value + "\n";
  return out;
}

/// Field-level checks shared by every subcommand. Scan-grid checks live in ScanConfig::validate.
inline void validate(const RunConfig& c) {
  try {
    c.scan.validate_point();
  } catch (const ConfigError& e) {
    // Map the short field names raised by the physics types onto config keys.
    static const std::pair<const char*, const char*> names[] = {
        {"pulse_duration", "pulse.pulse_duration_fs"},
        {"train_period", "pulse.train_period_ps"},
        {"peak_field", "pulse.peak_field_v_per_m"},
        {"modulation_amplitude", "pulse.modulation_amplitude"},
        {"index_min", "pulse.index_min"},
        {"moment_of_inertia", "molecule.moment_of_inertia_kg_m2"},
        {"delta_alpha", "molecule.delta_alpha_c_m2_per_v"},
        {"reduced_mass", "molecule.reduced_mass_kg"},
        {"step_phase", "propagator.step_phase_rad"},
        {"xi_order", "propagator.xi_order"},
        {"time_nodes", "propagator.time_nodes"},
        {"k_multiplier", "propagator.k_multiplier"},
    };
    for (const auto& [field, key] : names) {
      if (e.key() == field) {
        const std::string what = e.what();
        throw ConfigError(key, what.substr(what.find(": ") + 2));
      }
    }
    throw;
  }
  if (!(c.oracle.step_phase > 0.0) || c.oracle.step_phase > OdeConfig::kMaxStepPhase) {
    throw ConfigError("oracle.step_phase_rad", "must lie in (0, 0.01]");
  }
  if (c.oracle.step_size && !(*c.oracle.step_size > 0.0)) {
    throw ConfigError("oracle.step_size_s", "must be positive");
  }
  if (!(c.oracle.norm_tolerance > 0.0)) throw ConfigError("oracle.norm_tolerance", "must be positive");
  if (!(c.validate_tolerance > 0.0)) throw ConfigError("validate.tolerance", "must be positive");
  if (c.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

}  // namespace rotorpath

#endif
