#ifndef ROTORPATH_ORACLE_HPP
#define ROTORPATH_ORACLE_HPP

// Direct fixed-step RK4 integration of the interaction-picture Schroedinger equation
//   i dc(l')/dt = sum_l V(l', l; t)/hbar exp(i w(l', l) t) c(l),
// used as an independent reference for the path-integral propagator.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rotorpath/error.hpp"
#include "rotorpath/matrix.hpp"
#include "rotorpath/quantum_core.hpp"

namespace rotorpath {

struct OdeConfig {
  static constexpr double kMaxStepPhase = 0.01;

  double step_phase = kMaxStepPhase;  // dt * max(|V|/hbar, |w|) when step_size is unset
  std::optional<double> step_size;    // explicit dt in seconds
  bool include_diagonal = false;      // keep V_ll instead of zeroing it
  double norm_tolerance = 1e-8;

  /// Checks the step bound against the fastest rate of the problem.
  void validate(double rate) const {
    if (!(step_phase > 0.0) || step_phase > kMaxStepPhase) {
      throw ConfigError("oracle.step_phase", "must lie in (0, 0.01]");
    }
    if (step_size) {
      if (!(*step_size > 0.0) || !std::isfinite(*step_size)) {
        throw ConfigError("oracle.step_size", "must be positive and finite");
      }
      if (*step_size * rate > kMaxStepPhase * (1.0 + 1e-12)) {
        throw ConfigError("oracle.step_size",
                          "dt * max(|V|/hbar, |w|) = " + std::to_string(*step_size * rate) +
                              " exceeds 0.01");
      }
    }
  }
};

namespace detail {

struct CoupledPair {
  std::size_t to;
  std::size_t from;
  double frequency;
};

}  // namespace detail

/// Final amplitudes for each requested initial basis level.
template <CouplingSource C>
std::vector<AmplitudeVector> integrate(const QuantumSystem& system, const C& coupling,
                                       TimeWindow window,
                                       std::span<const std::size_t> initial_levels,
                                       const OdeConfig& config) {
  const std::size_t n = system.n_levels();
  if (coupling.n_levels() != n) throw ContractViolation("integrate: coupling size mismatch");
  for (std::size_t l : initial_levels) {
    if (l >= n) throw ContractViolation("integrate: initial level out of range");
  }
  const double rate = max_rate(system, coupling);
  config.validate(rate);

  std::size_t steps = 1;
  if (config.step_size) {
    steps = static_cast<std::size_t>(std::ceil(window.duration() / *config.step_size));
  } else {
    steps = static_cast<std::size_t>(std::ceil(window.duration() * rate / config.step_phase));
  }
  steps = std::max<std::size_t>(steps, 1);
  const double dt = window.duration() / static_cast<double>(steps);

  std::vector<detail::CoupledPair> pairs;
  const RealMatrix& pattern = coupling.pattern();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (pattern(i, j) == 0.0) continue;
      if (i == j && !config.include_diagonal) continue;
      pairs.push_back({i, j, system.frequency(i, j)});
    }
  }

  using Vec = std::vector<std::complex<double>>;
  const std::size_t m = initial_levels.size();
  std::vector<Vec> state(m, Vec(n));
  for (std::size_t t = 0; t < m; ++t) state[t][initial_levels[t]] = 1.0;

  RealMatrix v(n);
  using Couplings = std::vector<std::complex<double>>;
  auto load = [&](double time, Couplings& h) {
    coupling.sample(time, v);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double phase = pairs[p].frequency * time;
      h[p] = v(pairs[p].to, pairs[p].from) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  };
  const std::complex<double> minus_i(0.0, -1.0);
  auto derivative = [&](const Couplings& h, const Vec& c, Vec& out) {
    std::fill(out.begin(), out.end(), std::complex<double>{});
    for (std::size_t p = 0; p < pairs.size(); ++p) out[pairs[p].to] += h[p] * c[pairs[p].from];
    for (auto& x : out) x *= minus_i;
  };

  // Stage couplings are shared by all trajectories, so each is evaluated once per step.
  Couplings h0(pairs.size()), hm(pairs.size()), h1(pairs.size());
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t0 = window.start + dt * static_cast<double>(s);
    load(t0, h0);
    load(t0 + 0.5 * dt, hm);
    load(t0 + dt, h1);
    for (Vec& c : state) {
      derivative(h0, c, k1);
      for (std::size_t l = 0; l < n; ++l) tmp[l] = c[l] + 0.5 * dt * k1[l];
      derivative(hm, tmp, k2);
      for (std::size_t l = 0; l < n; ++l) tmp[l] = c[l] + 0.5 * dt * k2[l];
      derivative(hm, tmp, k3);
      for (std::size_t l = 0; l < n; ++l) tmp[l] = c[l] + dt * k3[l];
      derivative(h1, tmp, k4);
      for (std::size_t l = 0; l < n; ++l) {
        c[l] += dt / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
      }
    }
  }

  std::vector<AmplitudeVector> finals(m);
  for (std::size_t t = 0; t < m; ++t) {
    AmplitudeVector& a = finals[t];
    a.re.resize(n);
    a.im.resize(n);
    a.step_index = steps;
    for (std::size_t l = 0; l < n; ++l) {
      a.re[l] = state[t][l].real();
      a.im[l] = state[t][l].imag();
    }
    const double drift = std::abs(1.0 - a.norm_squared());
    if (!(drift <= config.norm_tolerance)) {
      throw NumericalError("integrate: norm drift " + std::to_string(drift) + " from level " +
                           std::to_string(initial_levels[t]) + " exceeds tolerance with dt = " +
                           std::to_string(dt) + " s; reduce the step size");
    }
  }
  return finals;
}

template <CouplingSource C>
AmplitudeVector integrate(const QuantumSystem& system, const C& coupling, TimeWindow window,
                          std::size_t initial_level, const OdeConfig& config) {
  const std::size_t levels[] = {initial_level};
  return integrate(system, coupling, window, std::span<const std::size_t>(levels), config).front();
}

/// P(l_f | l_in) from the direct integrator; row index l_in.
template <CouplingSource C>
RealMatrix oracle_transition_matrix(const QuantumSystem& system, const C& coupling,
                                    TimeWindow window, const OdeConfig& config) {
  const std::size_t n = system.n_levels();
  std::vector<std::size_t> levels(n);
  for (std::size_t l = 0; l < n; ++l) levels[l] = l;
  const auto finals = integrate(system, coupling, window, std::span<const std::size_t>(levels), config);
  RealMatrix p(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < n; ++f) p(i, f) = transition_probability(finals[i], f);
  }
  return p;
}

}  // namespace rotorpath

#endif
