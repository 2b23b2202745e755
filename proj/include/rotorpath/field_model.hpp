#ifndef ROTORPATH_FIELD_MODEL_HPP
#define ROTORPATH_FIELD_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "rotorpath/error.hpp"

namespace rotorpath {

/// Bessel function of the first kind J_n(x) for |n| <= 64, |x| <= 100.
///
/// Miller's downward recurrence started well above max(|n|, |x|), normalized with
/// J_0 + 2 * sum_k J_2k = 1. Negative orders and arguments use the parity identities
/// J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
inline double bessel_j(int n, double x) {
  if (std::abs(n) > 64 || !(std::abs(x) <= 100.0)) {
    throw ContractViolation("bessel_j: arguments outside validated domain |n| <= 64, |x| <= 100");
  }
  const int order = std::abs(n);
  double sign = 1.0;
  if (n < 0 && (order % 2 == 1)) sign = -sign;
  if (x < 0.0 && (order % 2 == 1)) sign = -sign;
  const double ax = std::abs(x);
  if (ax == 0.0) return order == 0 ? 1.0 : 0.0;

  const double top = std::max(static_cast<double>(order), ax);
  int start = static_cast<int>(top + 30.0 + std::sqrt(60.0 * top));
  start += start % 2;  // even, so the normalization sum picks up J_0 correctly

  constexpr double kRescale = 1e250;
  double next = 0.0;     // J_{k+1}
  double current = 1e-300;  // J_k, arbitrary seed
  double wanted = 0.0;
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double previous = 2.0 * k / ax * current - next;  // J_{k-1}
    next = current;
    current = previous;
    if (std::abs(current) > kRescale) {
      current /= kRescale;
      next /= kRescale;
      wanted /= kRescale;
      norm /= kRescale;
    }
    const int index = k - 1;
    if (index == order) wanted = current;
    if (index > 0 && index % 2 == 0) norm += 2.0 * current;
  }
  norm += current;  // J_0 term
  if (order == 0) wanted = current;
  return sign * wanted / norm;
}

/// Bessel-weighted train of Gaussian envelopes,
/// E(t) = sum_{n=n_min}^{n_max} J_n(A) E_0 exp(-(t - n T)^2 / tau^2).
struct PulseTrain {
  double modulation_amplitude = 2.5;  // A, dimensionless
  double peak_field = 6e9;            // E_0, V/m
  double pulse_duration = 500e-15;    // tau_pul, s
  double train_period = 8.38e-12;     // tau_per, s
  int index_min = -3;
  int index_max = 3;

  void validate() const {
    if (!(pulse_duration > 0.0) || !std::isfinite(pulse_duration)) {
      throw ConfigError("pulse_duration", "must be positive and finite");
    }
    if (!(train_period > 0.0) || !std::isfinite(train_period)) {
      throw ConfigError("train_period", "must be positive and finite");
    }
    if (!(peak_field >= 0.0) || !std::isfinite(peak_field)) {
      throw ConfigError("peak_field", "must be non-negative and finite");
    }
    if (!(std::abs(modulation_amplitude) <= 100.0)) {
      throw ConfigError("modulation_amplitude", "must satisfy |A| <= 100");
    }
    if (index_min > index_max) throw ConfigError("index_min", "must not exceed index_max");
    if (std::abs(index_min) > 64 || std::abs(index_max) > 64) {
      throw ConfigError("index_min", "pulse indices must satisfy |n| <= 64");
    }
  }
};

/// Direct evaluation of the pulse-train field, recomputing the Bessel weights.
inline double field_amplitude(double tau, const PulseTrain& train) {
  double sum = 0.0;
  for (int n = train.index_min; n <= train.index_max; ++n) {
    const double u = (tau - n * train.train_period) / train.pulse_duration;
    sum += bessel_j(n, train.modulation_amplitude) * std::exp(-u * u);
  }
  return train.peak_field * sum;
}

/// Pulse train with its Bessel weights evaluated once; cheap to sample repeatedly.
class PulseTrainField {
 public:
  explicit PulseTrainField(const PulseTrain& train) : train_(train) {
    train_.validate();
    for (int n = train_.index_min; n <= train_.index_max; ++n) {
      weights_.push_back(train_.peak_field * bessel_j(n, train_.modulation_amplitude));
    }
  }

  const PulseTrain& train() const noexcept { return train_; }

  double amplitude(double tau) const {
    double sum = 0.0;
    const double inv = 1.0 / train_.pulse_duration;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      const double center = (train_.index_min + static_cast<int>(i)) * train_.train_period;
      const double u = (tau - center) * inv;
      sum += weights_[i] * std::exp(-u * u);
    }
    return sum;
  }

  double squared(double tau) const {
    const double e = amplitude(tau);
    return e * e;
  }

  /// Integration window [n_min T - m tau, n_max T + m tau] for margin m (in pulse durations).
  double window_start(double margin) const {
    return train_.index_min * train_.train_period - margin * train_.pulse_duration;
  }
  double window_end(double margin) const {
    return train_.index_max * train_.train_period + margin * train_.pulse_duration;
  }

  /// max |E|^2 over the window, from dense sampling plus a small safety factor.
  /// Sample spacing tau/50 bounds the relative miss at a Gaussian peak to ~1e-3.
  double peak_squared(double margin) const {
    const double a = window_start(margin);
    const double b = window_end(margin);
    const double h = train_.pulse_duration / 50.0;
    const auto steps = static_cast<std::size_t>(std::ceil((b - a) / h));
    double peak = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      peak = std::max(peak, squared(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps)));
    }
    return peak * 1.01;
  }

 private:
  PulseTrain train_;
  std::vector<double> weights_;
};

}  // namespace rotorpath

#endif
