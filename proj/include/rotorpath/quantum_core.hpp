#ifndef ROTORPATH_QUANTUM_CORE_HPP
#define ROTORPATH_QUANTUM_CORE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rotorpath/constants.hpp"
#include "rotorpath/error.hpp"
#include "rotorpath/matrix.hpp"
#include "rotorpath/quadrature.hpp"

namespace rotorpath {

/// N-level system in its energy eigenbasis. Frequencies w(l', l) = (E_l' - E_l) / hbar.
class QuantumSystem {
 public:
  static QuantumSystem from_energies(std::vector<double> energies) {
    if (energies.empty()) throw ConfigError("n_levels", "must be positive");
    for (std::size_t l = 0; l < energies.size(); ++l) {
      if (!std::isfinite(energies[l])) throw ConfigError("energies", "must be finite");
      if (l > 0 && energies[l] < energies[l - 1]) {
        throw ConfigError("energies", "must be non-decreasing in l");
      }
    }
    QuantumSystem s;
    s.energies_ = std::move(energies);
    const std::size_t n = s.energies_.size();
    s.frequencies_ = RealMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        s.frequencies_(i, j) = (s.energies_[i] - s.energies_[j]) / PhysicalConstants::hbar;
      }
    }
    return s;
  }

  std::size_t n_levels() const noexcept { return energies_.size(); }
  std::span<const double> energies() const noexcept { return energies_; }
  double frequency(std::size_t l_to, std::size_t l_from) const { return frequencies_(l_to, l_from); }
  const RealMatrix& frequencies() const noexcept { return frequencies_; }

 private:
  std::vector<double> energies_;
  RealMatrix frequencies_;
};

struct TimeWindow {
  double start = 0.0;  // s
  double end = 0.0;    // s

  double duration() const noexcept { return end - start; }
};

/// Uniform partition t_0 = start < t_1 < ... < t_{K+1} = end.
class TimeGrid {
 public:
  TimeGrid(TimeWindow window, std::size_t n_slices) : window_(window), n_slices_(n_slices) {
    if (n_slices == 0) throw ContractViolation("TimeGrid: need at least one slice");
    if (!(window.end > window.start) || !std::isfinite(window.start) || !std::isfinite(window.end)) {
      throw ContractViolation("TimeGrid: window must satisfy start < end");
    }
  }

  std::size_t n_slices() const noexcept { return n_slices_; }
  TimeWindow window() const noexcept { return window_; }

  double boundary(std::size_t k) const noexcept {
    if (k >= n_slices_) return window_.end;
    return window_.start +
           window_.duration() * static_cast<double>(k) / static_cast<double>(n_slices_);
  }

 private:
  TimeWindow window_;
  std::size_t n_slices_;
};

/// Complex amplitudes U(l, t_k | l_in, 0) held as separate real and imaginary parts.
struct AmplitudeVector {
  std::vector<double> re;
  std::vector<double> im;
  std::size_t step_index = 0;

  static AmplitudeVector basis(std::size_t n_levels, std::size_t level) {
    if (level >= n_levels) throw ContractViolation("AmplitudeVector::basis: level out of range");
    AmplitudeVector a;
    a.re.assign(n_levels, 0.0);
    a.im.assign(n_levels, 0.0);
    a.re[level] = 1.0;
    return a;
  }

  std::size_t size() const noexcept { return re.size(); }

  std::complex<double> operator[](std::size_t l) const { return {re[l], im[l]}; }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (std::size_t l = 0; l < re.size(); ++l) s += re[l] * re[l] + im[l] * im[l];
    return s;
  }
};

/// V(l', l; tau) / hbar in rad/s, sampled at the time-quadrature nodes of one slice.
/// The diagonal must be zero for the path-integral kernel.
struct SliceCoupling {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<RealMatrix> v_over_hbar;

  std::size_t n_levels() const noexcept {
    return v_over_hbar.empty() ? 0 : v_over_hbar.front().size();
  }
};

/// A source of interaction matrix elements V(l', l; tau) / hbar (rad/s).
///
/// `pattern()` is nonzero exactly where the coupling can be nonzero; `peak_rate()` is an
/// upper bound on |V / hbar| over the times the source will be sampled at.
template <class C>
concept CouplingSource = requires(const C& c, double tau, RealMatrix& out) {
  { c.n_levels() } -> std::convertible_to<std::size_t>;
  { c.pattern() } -> std::convertible_to<const RealMatrix&>;
  { c.peak_rate() } -> std::convertible_to<double>;
  c.sample(tau, out);
};

/// Time-independent coupling matrix given directly in rad/s.
class ConstantCoupling {
 public:
  explicit ConstantCoupling(RealMatrix v_over_hbar) : v_(std::move(v_over_hbar)) {
    for (double x : v_.data()) peak_ = std::max(peak_, std::abs(x));
  }

  std::size_t n_levels() const noexcept { return v_.size(); }
  const RealMatrix& pattern() const noexcept { return v_; }
  double peak_rate() const noexcept { return peak_; }
  void sample(double, RealMatrix& out) const { out = v_; }

 private:
  RealMatrix v_;
  double peak_ = 0.0;
};

/// Fills `slice` with coupling samples on the mapped time rule over [t_begin, t_end].
template <CouplingSource C>
void sample_slice(const C& coupling, double t_begin, double t_end, const QuadratureRule& reference,
                  SliceCoupling& slice) {
  slice.t_begin = t_begin;
  slice.t_end = t_end;
  const QuadratureRule rule = mapped(reference, t_begin, t_end);
  slice.nodes = rule.nodes;
  slice.weights = rule.weights;
  slice.v_over_hbar.resize(rule.order());
  for (std::size_t j = 0; j < rule.order(); ++j) coupling.sample(rule.nodes[j], slice.v_over_hbar[j]);
}

template <CouplingSource C>
SliceCoupling sample_slice(const C& coupling, double t_begin, double t_end,
                           const QuadratureRule& reference) {
  SliceCoupling slice;
  sample_slice(coupling, t_begin, t_end, reference, slice);
  return slice;
}

/// Dimensionless action of one slice,
///   S = 2 pi dl xi - int (V(l_to, l_from; tau) / hbar) 2 cos(2 pi dl xi - w tau) dtau,
/// with dl = l_to - l_from and the time integral done with the slice's quadrature rule.
inline double action_slice(std::size_t l_to, std::size_t l_from, double xi,
                           const SliceCoupling& slice, const QuantumSystem& system) {
  const std::size_t n = system.n_levels();
  if (l_to >= n || l_from >= n || slice.n_levels() != n) {
    throw ContractViolation("action_slice: level index out of range");
  }
  if (!(xi >= 0.0 && xi <= 1.0)) throw ContractViolation("action_slice: xi must lie in [0, 1]");
  const double dl = static_cast<double>(l_to) - static_cast<double>(l_from);
  const double theta = kTwoPi * dl * xi;
  const double w = system.frequency(l_to, l_from);
  double integral = 0.0;
  for (std::size_t j = 0; j < slice.nodes.size(); ++j) {
    const double v = slice.v_over_hbar[j](l_to, l_from);
    integral += slice.weights[j] * v * 2.0 * std::cos(theta - w * slice.nodes[j]);
  }
  const double s = theta - integral;
  if (!std::isfinite(s)) {
    throw NumericalError("action_slice: non-finite action on slice starting at t = " +
                         std::to_string(slice.t_begin));
  }
  return s;
}

/// Smallest xi-quadrature order used by default for an N-level system. With this order the
/// Gauss-Legendre rule reproduces int_0^1 exp(2 pi i n xi) dxi = delta_n0 to better than 1e-10
/// for every |n| <= N - 1.
inline std::size_t default_xi_order(std::size_t n_levels) {
  return 3 * (n_levels > 0 ? n_levels - 1 : 0) + 6;
}

inline QuadratureRule unit_interval_rule(std::size_t order) {
  return mapped(gauss_legendre(order), 0.0, 1.0);
}

/// Slice kernel <l_to| U(t_k, t_{k-1}) |l_from> = int_0^1 exp(i S) dxi, evaluated straight
/// from `action_slice` on an M-node Gauss-Legendre rule.
inline std::complex<double> slice_kernel(std::size_t l_to, std::size_t l_from,
                                         const SliceCoupling& slice, const QuantumSystem& system,
                                         std::size_t xi_order) {
  if (xi_order < 2) throw ConfigError("xi_order", "xi quadrature order must be at least 2");
  const QuadratureRule rule = unit_interval_rule(xi_order);
  std::complex<double> sum{};
  for (std::size_t q = 0; q < rule.order(); ++q) {
    const double s = action_slice(l_to, l_from, rule.nodes[q], slice, system);
    sum += rule.weights[q] * std::complex<double>(std::cos(s), std::sin(s));
  }
  return sum;
}

/// Kernel evaluator for repeated slices of one system.
///
/// Writing cos(theta - w tau) = cos(theta) cos(w tau) + sin(theta) sin(w tau) splits the time
/// integral into two moments per pair, so each xi node costs one sincos. Pairs whose coupling
/// pattern is zero have S = 2 pi dl xi on every slice; their kernel is the fixed quadrature
/// value of the Kronecker integral and is tabulated once.
class SliceKernel {
 public:
  SliceKernel(const QuantumSystem& system, const RealMatrix& pattern, std::size_t xi_order)
      : n_(system.n_levels()), frequencies_(system.frequencies()), pattern_(pattern) {
    if (xi_order < 2) throw ConfigError("xi_order", "xi quadrature order must be at least 2");
    if (pattern.size() != n_) throw ContractViolation("SliceKernel: coupling size mismatch");
    for (std::size_t l = 0; l < n_; ++l) {
      if (pattern(l, l) != 0.0) {
        throw ContractViolation("SliceKernel: diagonal coupling must be zero");
      }
    }
    rule_ = unit_interval_rule(xi_order);
    const std::size_t offsets = 2 * n_ - 1;
    cos_theta_.assign(offsets * rule_.order(), 0.0);
    sin_theta_.assign(offsets * rule_.order(), 0.0);
    kronecker_.assign(offsets, {});
    for (std::size_t d = 0; d < offsets; ++d) {
      const double dl = static_cast<double>(d) - static_cast<double>(n_ - 1);
      std::complex<double> sum{};
      for (std::size_t q = 0; q < rule_.order(); ++q) {
        const double theta = kTwoPi * dl * rule_.nodes[q];
        cos_theta_[d * rule_.order() + q] = std::cos(theta);
        sin_theta_[d * rule_.order() + q] = std::sin(theta);
        sum += rule_.weights[q] * std::complex<double>(std::cos(theta), std::sin(theta));
      }
      kronecker_[d] = sum;
    }
  }

  std::size_t xi_order() const noexcept { return rule_.order(); }

  /// Quadrature value of int_0^1 exp(2 pi i dl xi) dxi.
  std::complex<double> kronecker(int dl) const {
    return kronecker_.at(static_cast<std::size_t>(dl + static_cast<int>(n_) - 1));
  }

  std::complex<double> operator()(std::size_t l_to, std::size_t l_from,
                                  const SliceCoupling& slice) const {
    double moment_cos = 0.0;
    double moment_sin = 0.0;
    const double w = frequencies_(l_to, l_from);
    for (std::size_t j = 0; j < slice.nodes.size(); ++j) {
      const double wv = slice.weights[j] * slice.v_over_hbar[j](l_to, l_from);
      const double phase = w * slice.nodes[j];
      moment_cos += wv * std::cos(phase);
      moment_sin += wv * std::sin(phase);
    }
    const std::size_t d = l_to + n_ - 1 - l_from;
    const double* ct = cos_theta_.data() + d * rule_.order();
    const double* st = sin_theta_.data() + d * rule_.order();
    const double dl = static_cast<double>(l_to) - static_cast<double>(l_from);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t q = 0; q < rule_.order(); ++q) {
      const double theta = kTwoPi * dl * rule_.nodes[q];
      const double s = theta - 2.0 * (ct[q] * moment_cos + st[q] * moment_sin);
      re += rule_.weights[q] * std::cos(s);
      im += rule_.weights[q] * std::sin(s);
    }
    return {re, im};
  }

  void matrix(const SliceCoupling& slice, ComplexMatrix& out) const {
    if (out.size() != n_) out = ComplexMatrix(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        out(i, j) = pattern_(i, j) == 0.0
                        ? kronecker_[i + n_ - 1 - j]
                        : (*this)(i, j, slice);
      }
    }
  }

 private:
  std::size_t n_;
  RealMatrix frequencies_;
  RealMatrix pattern_;
  QuadratureRule rule_;
  std::vector<double> cos_theta_;
  std::vector<double> sin_theta_;
  std::vector<std::complex<double>> kronecker_;
};

/// One step of the amplitude recurrence in real/imaginary rotation form:
///   Re U~(l) = sum_l' [C(l, l') Re U(l') - S(l, l') Im U(l')],
///   Im U~(l) = sum_l' [S(l, l') Re U(l') + C(l, l') Im U(l')],
/// where C + iS is the slice kernel. The result is not normalized.
inline AmplitudeVector propagate_step(const AmplitudeVector& amp, const ComplexMatrix& kernel) {
  const std::size_t n = amp.size();
  if (kernel.size() != n) throw ContractViolation("propagate_step: size mismatch");
  AmplitudeVector out;
  out.re.assign(n, 0.0);
  out.im.assign(n, 0.0);
  out.step_index = amp.step_index + 1;
  for (std::size_t l = 0; l < n; ++l) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double c = kernel(l, m).real();
      const double s = kernel(l, m).imag();
      re += c * amp.re[m] - s * amp.im[m];
      im += s * amp.re[m] + c * amp.im[m];
    }
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw NumericalError("propagate_step: non-finite amplitude at slice " +
                           std::to_string(out.step_index));
    }
    out.re[l] = re;
    out.im[l] = im;
  }
  return out;
}

inline AmplitudeVector propagate_step(const AmplitudeVector& amp, const SliceKernel& kernel,
                                      const SliceCoupling& slice) {
  ComplexMatrix k;
  kernel.matrix(slice, k);
  return propagate_step(amp, k);
}

/// Divides every component by A = sqrt(sum |U~|^2).
inline AmplitudeVector renormalize(AmplitudeVector amp) {
  const double a2 = amp.norm_squared();
  if (!(a2 > 0.0) || !std::isfinite(a2)) {
    throw NumericalError("renormalize: amplitude norm is zero or non-finite at slice " +
                         std::to_string(amp.step_index));
  }
  const double inv = 1.0 / std::sqrt(a2);
  for (std::size_t l = 0; l < amp.size(); ++l) {
    amp.re[l] *= inv;
    amp.im[l] *= inv;
  }
  return amp;
}

inline double transition_probability(const AmplitudeVector& amp, std::size_t l_final) {
  if (l_final >= amp.size()) throw ContractViolation("transition_probability: level out of range");
  return amp.re[l_final] * amp.re[l_final] + amp.im[l_final] * amp.im[l_final];
}

inline std::vector<double> probabilities(const AmplitudeVector& amp) {
  std::vector<double> p(amp.size());
  for (std::size_t l = 0; l < amp.size(); ++l) p[l] = transition_probability(amp, l);
  return p;
}

/// P(l_f) = sum_{l_in} P(l_f | l_in) P_{l_in}(0). `conditional(l_in, l_f)` holds P(l_f | l_in).
inline std::vector<double> thermal_average(const RealMatrix& conditional,
                                           std::span<const double> weights) {
  const std::size_t n = conditional.size();
  if (weights.size() != n) throw ContractViolation("thermal_average: size mismatch");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(std::abs(total - 1.0) <= 1e-9)) {
    throw ConfigError("weights", "initial populations must sum to 1 (got " + std::to_string(total) + ")");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t f = 0; f < n; ++f) row += conditional(i, f);
    if (!(std::abs(row - 1.0) <= 1e-6)) {
      throw NumericalError("thermal_average: conditional probabilities from level " +
                           std::to_string(i) + " sum to " + std::to_string(row));
    }
    for (std::size_t f = 0; f < n; ++f) out[f] += weights[i] * conditional(i, f);
  }
  return out;
}

/// Discretization of the path-integral propagator.
struct PropagatorConfig {
  double step_phase = 0.05;      // bound on max(|V|/hbar, |w|) * dt per slice
  std::size_t xi_order = 0;      // M; 0 selects default_xi_order(N)
  std::size_t time_nodes = 3;    // Gauss-Legendre nodes for the time integral in each slice
  std::size_t k_multiplier = 1;  // refinement factor applied to the slice count
  std::size_t slices = 0;        // explicit slice count; 0 derives it from step_phase

  void validate() const {
    if (!(step_phase > 0.0) || !std::isfinite(step_phase)) {
      throw ConfigError("step_phase", "must be positive and finite");
    }
    if (xi_order == 1) throw ConfigError("xi_order", "xi quadrature order must be at least 2");
    if (time_nodes == 0) throw ConfigError("time_nodes", "must be positive");
    if (k_multiplier == 0) throw ConfigError("k_multiplier", "must be positive");
  }

  std::size_t resolved_xi_order(std::size_t n_levels) const {
    return xi_order == 0 ? default_xi_order(n_levels) : xi_order;
  }
};

/// Largest rate entering the step bound: the coupling peak, or the largest |w| among
/// coupled pairs.
template <CouplingSource C>
double max_rate(const QuantumSystem& system, const C& coupling) {
  double rate = std::abs(coupling.peak_rate());
  const RealMatrix& pattern = coupling.pattern();
  for (std::size_t i = 0; i < system.n_levels(); ++i) {
    for (std::size_t j = 0; j < system.n_levels(); ++j) {
      if (pattern(i, j) != 0.0) rate = std::max(rate, std::abs(system.frequency(i, j)));
    }
  }
  return rate;
}

template <CouplingSource C>
std::size_t slice_count(const QuantumSystem& system, const C& coupling, TimeWindow window,
                        const PropagatorConfig& config) {
  std::size_t base = config.slices;
  if (base == 0) {
    const double phase = window.duration() * max_rate(system, coupling) / config.step_phase;
    if (!std::isfinite(phase) || phase > 1e12) {
      throw NumericalError("slice_count: coupling rate " + std::to_string(max_rate(system, coupling)) +
                           " rad/s gives an unusable slice count");
    }
    base = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(phase)));
  }
  return base * config.k_multiplier;
}

struct PropagationResult {
  std::vector<AmplitudeVector> finals;  // one per requested initial level, same order
  std::size_t slices = 0;
};

/// Runs the renormalized slice recurrence from each initial basis state across `window`.
/// Trajectories share the per-slice kernel; each is otherwise independent.
template <CouplingSource C>
PropagationResult propagate(const QuantumSystem& system, const C& coupling, TimeWindow window,
                            std::span<const std::size_t> initial_levels,
                            const PropagatorConfig& config) {
  config.validate();
  const std::size_t n = system.n_levels();
  if (coupling.n_levels() != n) throw ContractViolation("propagate: coupling size mismatch");

  const TimeGrid grid(window, slice_count(system, coupling, window, config));
  const SliceKernel kernel(system, coupling.pattern(), config.resolved_xi_order(n));
  const QuadratureRule time_rule = gauss_legendre(config.time_nodes);

  PropagationResult result;
  result.slices = grid.n_slices();
  result.finals.reserve(initial_levels.size());
  for (std::size_t l : initial_levels) result.finals.push_back(AmplitudeVector::basis(n, l));

  SliceCoupling slice;
  ComplexMatrix k(n);
  for (std::size_t s = 0; s < grid.n_slices(); ++s) {
    sample_slice(coupling, grid.boundary(s), grid.boundary(s + 1), time_rule, slice);
    kernel.matrix(slice, k);
    for (AmplitudeVector& amp : result.finals) amp = renormalize(propagate_step(amp, k));
  }
  return result;
}

/// P(l_f | l_in) for every initial level; row index l_in.
template <CouplingSource C>
RealMatrix transition_matrix(const QuantumSystem& system, const C& coupling, TimeWindow window,
                             const PropagatorConfig& config) {
  const std::size_t n = system.n_levels();
  std::vector<std::size_t> levels(n);
  for (std::size_t l = 0; l < n; ++l) levels[l] = l;
  const PropagationResult r = propagate(system, coupling, window, levels, config);
  RealMatrix p(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < n; ++f) p(i, f) = transition_probability(r.finals[i], f);
  }
  return p;
}

/// One rung of a slice-doubling refinement ladder.
struct ConvergenceRung {
  std::size_t slices = 0;
  RealMatrix transitions;  // P(l_f | l_in)
  double max_change = 0.0; // max |dP| against the previous rung; 0 for the first
};

/// Propagates at K, 2K, ..., 2^rungs K slices, where K is what `config` resolves to.
template <CouplingSource C>
std::vector<ConvergenceRung> convergence_ladder(const QuantumSystem& system, const C& coupling,
                                                TimeWindow window, PropagatorConfig config,
                                                std::size_t rungs) {
  config.slices = slice_count(system, coupling, window, config);
  config.k_multiplier = 1;
  std::vector<ConvergenceRung> ladder;
  for (std::size_t r = 0; r <= rungs; ++r) {
    ConvergenceRung rung;
    rung.slices = config.slices;
    rung.transitions = transition_matrix(system, coupling, window, config);
    if (!ladder.empty()) {
      const auto& prev = ladder.back().transitions.data();
      const auto& cur = rung.transitions.data();
      for (std::size_t i = 0; i < cur.size(); ++i) {
        rung.max_change = std::max(rung.max_change, std::abs(cur[i] - prev[i]));
      }
    }
    ladder.push_back(std::move(rung));
    config.slices *= 2;
  }
  return ladder;
}

}  // namespace rotorpath

#endif
