#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rotorpath/field_model.hpp"
#include "support/oracles.hpp"

using rotorpath::bessel_j;
using rotorpath::PulseTrain;
using rotorpath::PulseTrainField;

TEST(BesselJ, ValuesAtOrigin) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  for (int n : {-5, -1, 1, 2, 7, 64}) EXPECT_EQ(bessel_j(n, 0.0), 0.0) << n;
}

TEST(BesselJ, ModulationAmplitudeAgainstFrozenValues) {
  // 30-digit reference values.
  const double expected[] = {-0.0483837764681979963, 0.497094102464274038, 0.446059058439617227,
                             0.216600391039113525,  0.0737818800542552327, 0.0195016251345032199,
                             0.00422462048375764684, 0.000776553187533484954};
  for (int n = 0; n < 8; ++n) EXPECT_NEAR(bessel_j(n, 2.5), expected[n], 1e-14) << n;
}

TEST(BesselJ, MatchesPowerSeriesOracle) {
  for (double x : {0.1, 1.0, 2.5, 5.0, 10.0, 15.0}) {
    for (int n = 0; n <= 30; ++n) {
      EXPECT_NEAR(bessel_j(n, x), oracles::bessel_series(n, x), 1e-12) << "n=" << n << " x=" << x;
    }
  }
}

TEST(BesselJ, MatchesLibraryAcrossValidatedDomain) {
  for (double x : {20.0, 37.5, 63.0, 99.9, 100.0}) {
    for (int n : {0, 1, 2, 5, 17, 40, 64}) {
      EXPECT_NEAR(bessel_j(n, x), std::cyl_bessel_j(static_cast<double>(n), x), 1e-12)
          << "n=" << n << " x=" << x;
    }
  }
  EXPECT_NEAR(bessel_j(5, 30.0), -0.143240295512077077, 1e-13);
  EXPECT_NEAR(bessel_j(64, 100.0), 0.0399850694529183382, 1e-13);
  EXPECT_NEAR(bessel_j(20, 1.0), 3.87350300852465772e-25, 1e-30);
}

TEST(BesselJ, ParityOfNegativeOrdersAndArguments) {
  for (int n = 0; n <= 10; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    EXPECT_DOUBLE_EQ(bessel_j(-n, 2.5), sign * bessel_j(n, 2.5));
    EXPECT_DOUBLE_EQ(bessel_j(n, -2.5), sign * bessel_j(n, 2.5));
  }
}

TEST(BesselJ, RejectsArgumentsOutsideDomain) {
  EXPECT_THROW(bessel_j(65, 1.0), rotorpath::ContractViolation);
  EXPECT_THROW(bessel_j(0, 100.5), rotorpath::ContractViolation);
  EXPECT_THROW(bessel_j(0, std::nan("")), rotorpath::ContractViolation);
}

namespace {

PulseTrain paper_train(double period = 8.38e-12) {
  PulseTrain t;
  t.train_period = period;
  return t;
}

}  // namespace

TEST(FieldAmplitude, NegligibleFarFromEveryPulse) {
  const PulseTrain train = paper_train();
  // One full period beyond the outermost pulse center is about 17 tau_pul away.
  for (double tau : {4.0 * train.train_period, -4.0 * train.train_period, 5.5 * train.train_period}) {
    EXPECT_LT(std::abs(rotorpath::field_amplitude(tau, train)), train.peak_field * 1e-40) << tau;
  }
}

TEST(FieldAmplitude, PulseCentersWithinGaussianTailBound) {
  // tau_per >= 15 tau_pul
  const PulseTrain train = paper_train(15.0 * 500e-15);
  for (int n = -3; n <= 3; ++n) {
    double bound = 0.0;
    for (int m = -3; m <= 3; ++m) {
      if (m == n) continue;
      const double r = (m - n) * train.train_period / train.pulse_duration;
      bound += std::abs(oracles::bessel_series(m, train.modulation_amplitude)) * std::exp(-r * r);
    }
    bound *= train.peak_field;
    const double e = rotorpath::field_amplitude(n * train.train_period, train);
    const double center = oracles::bessel_series(n, 2.5) * train.peak_field;
    EXPECT_LE(std::abs(e - center), bound + 1e-12 * train.peak_field) << n;
  }
}

TEST(FieldAmplitude, OddPulsesFlipSignSoFieldIsNotEven) {
  const PulseTrain train = paper_train();
  const double tau = train.train_period;
  EXPECT_NEAR(rotorpath::field_amplitude(-tau, train), -rotorpath::field_amplitude(tau, train),
              1e-9 * train.peak_field);
  EXPECT_GT(std::abs(rotorpath::field_amplitude(tau, train)), 0.4 * train.peak_field);
}

TEST(FieldAmplitude, LinearInPeakField) {
  PulseTrain a = paper_train();
  PulseTrain b = a;
  b.peak_field = 3.0 * a.peak_field;
  for (double tau : {-1.3e-12, 0.0, 0.2e-12, 8.5e-12}) {
    EXPECT_NEAR(rotorpath::field_amplitude(tau, b), 3.0 * rotorpath::field_amplitude(tau, a),
                1e-12 * a.peak_field);
  }
}

TEST(FieldAmplitude, CachedFieldMatchesDirectEvaluation) {
  const PulseTrain train = paper_train();
  const PulseTrainField field(train);
  for (double tau = -30e-12; tau <= 30e-12; tau += 0.37e-12) {
    EXPECT_NEAR(field.amplitude(tau), rotorpath::field_amplitude(tau, train), 1e-6);
  }
}

TEST(FieldAmplitude, CentredDifferenceConvergesAtSecondOrder) {
  const PulseTrainField field(paper_train());
  const double tau = 8.38e-12 + 0.31e-12;
  std::vector<double> errors;
  // Reference derivative from a much finer 4th-order stencil.
  const double hr = 1e-16;
  const double reference = (-field.amplitude(tau + 2 * hr) + 8 * field.amplitude(tau + hr) -
                            8 * field.amplitude(tau - hr) + field.amplitude(tau - 2 * hr)) /
                           (12 * hr);
  for (double h : {40e-15, 20e-15, 10e-15}) {
    const double d = (field.amplitude(tau + h) - field.amplitude(tau - h)) / (2 * h);
    errors.push_back(std::abs(d - reference));
  }
  EXPECT_NEAR(errors[0] / errors[1], 4.0, 0.2);
  EXPECT_NEAR(errors[1] / errors[2], 4.0, 0.2);
}

TEST(FieldAmplitude, WindowEdgesAreNegligible) {
  const PulseTrainField field(paper_train());
  EXPECT_LT(std::abs(field.amplitude(field.window_start(5.0))), 1e-10 * 6e9);
  EXPECT_LT(std::abs(field.amplitude(field.window_end(5.0))), 1e-10 * 6e9);
  EXPECT_DOUBLE_EQ(field.window_start(5.0), -3 * 8.38e-12 - 5 * 500e-15);
}

TEST(FieldAmplitude, PeakSquaredBoundsSampledField) {
  const PulseTrainField field(paper_train());
  const double bound = field.peak_squared(5.0);
  double seen = 0.0;
  for (double tau = field.window_start(5.0); tau <= field.window_end(5.0); tau += 1e-15) {
    seen = std::max(seen, field.squared(tau));
  }
  EXPECT_GE(bound, seen);
  EXPECT_LT(bound, 1.02 * seen);
}

TEST(PulseTrain, ValidationNamesTheField) {
  PulseTrain t;
  t.pulse_duration = -1.0;
  try {
    t.validate();
    FAIL();
  } catch (const rotorpath::ConfigError& e) {
    EXPECT_EQ(e.key(), "pulse_duration");
  }
  t = PulseTrain{};
  t.train_period = 0.0;
  EXPECT_THROW(t.validate(), rotorpath::ConfigError);
  t = PulseTrain{};
  t.index_min = 2;
  t.index_max = 1;
  EXPECT_THROW(t.validate(), rotorpath::ConfigError);
}
