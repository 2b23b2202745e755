#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "rotorpath/coupling.hpp"
#include "rotorpath/quantum_core.hpp"
#include "rotorpath/rotor_model.hpp"
#include "support/oracles.hpp"

using namespace rotorpath;

namespace {

SliceCoupling constant_slice(const RealMatrix& v, double t0, double t1, std::size_t nodes = 3) {
  return sample_slice(ConstantCoupling(v), t0, t1, gauss_legendre(nodes));
}

QuantumSystem degenerate(std::size_t n) { return QuantumSystem::from_energies(std::vector<double>(n, 0.0)); }

QuantumSystem n14_system(std::size_t n = 8) {
  return QuantumSystem::from_energies(rotor_ladder(n, presets::nitrogen14()));
}

PulseTrain train_at(double period) {
  PulseTrain t;
  t.train_period = period;
  return t;
}

}  // namespace

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
  for (std::size_t n = 1; n <= 30; ++n) {
    const QuadratureRule rule = mapped(gauss_legendre(n), 0.0, 1.0);
    for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
      const double v = rule.integrate([k](double x) { return std::pow(x, static_cast<double>(k)); });
      EXPECT_NEAR(v, 1.0 / static_cast<double>(k + 1), 1e-14) << "n=" << n << " k=" << k;
    }
  }
  EXPECT_THROW(gauss_legendre(0), ContractViolation);
}

TEST(TimeGrid, UniformBoundaries) {
  const TimeGrid grid({-1.0, 3.0}, 4);
  EXPECT_EQ(grid.boundary(0), -1.0);
  EXPECT_EQ(grid.boundary(2), 1.0);
  EXPECT_EQ(grid.boundary(4), 3.0);
  EXPECT_THROW(TimeGrid({0.0, 1.0}, 0), ContractViolation);
  EXPECT_THROW(TimeGrid({1.0, 1.0}, 3), ContractViolation);
}

TEST(ActionSlice, ZeroFieldIsPureGeometricPhase) {
  const QuantumSystem system = n14_system(4);
  const SliceCoupling slice = constant_slice(RealMatrix(4), 0.0, 1e-14);
  for (double xi : {0.0, 0.25, 0.7, 1.0}) {
    EXPECT_DOUBLE_EQ(action_slice(3, 1, xi, slice, system), kTwoPi * 2.0 * xi);
    EXPECT_DOUBLE_EQ(action_slice(0, 2, xi, slice, system), -kTwoPi * 2.0 * xi);
    EXPECT_EQ(action_slice(1, 1, xi, slice, system), 0.0);
  }
}

TEST(ActionSlice, ConstantCouplingWithoutPhase) {
  // w = 0 and dl = 0: S = -2 c dt for every xi.
  RealMatrix v(2);
  v(0, 0) = 3.0e12;
  v(1, 0) = v(0, 1) = 2.0e12;
  const QuantumSystem system = degenerate(2);
  const double dt = 1e-14;
  const SliceCoupling slice = constant_slice(v, 5e-13, 5e-13 + dt);
  for (double xi : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(action_slice(0, 0, xi, slice, system), -2.0 * 3.0e12 * dt, 1e-14);
  }
  // dl = 1 at xi = 0: the cosine is 1.
  EXPECT_NEAR(action_slice(1, 0, 0.0, slice, system), -2.0 * 2.0e12 * dt, 1e-14);
  // xi = 1/4: theta = pi/2 and the cosine vanishes.
  EXPECT_NEAR(action_slice(1, 0, 0.25, slice, system), kPi / 2.0, 1e-14);
  EXPECT_THROW(action_slice(2, 0, 0.0, slice, system), ContractViolation);
  EXPECT_THROW(action_slice(1, 0, 1.5, slice, system), ContractViolation);
}

TEST(ActionSlice, NonFiniteCouplingAborts) {
  RealMatrix v(2);
  v(1, 0) = v(0, 1) = std::numeric_limits<double>::infinity();
  const SliceCoupling slice = constant_slice(v, 0.0, 1e-14);
  EXPECT_THROW(action_slice(1, 0, 0.1, slice, degenerate(2)), NumericalError);
}

TEST(SliceKernelReference, ZeroFieldGivesKroneckerDelta) {
  const QuantumSystem system = n14_system(8);
  const SliceCoupling slice = constant_slice(RealMatrix(8), 0.0, 1e-14);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      const std::complex<double> k = slice_kernel(i, j, slice, system, default_xi_order(8));
      EXPECT_NEAR(std::abs(k - (i == j ? 1.0 : 0.0)), 0.0, 1e-10) << i << "," << j;
    }
  }
}

TEST(SliceKernelReference, DiagonalConstantCouplingIsPhaseFactor) {
  RealMatrix v(1);
  v(0, 0) = 4e12;
  const double dt = 2e-14;
  const SliceCoupling slice = constant_slice(v, 0.0, dt);
  const std::complex<double> k = slice_kernel(0, 0, slice, degenerate(1), 6);
  EXPECT_NEAR(k.real(), std::cos(2 * 4e12 * dt), 1e-13);
  EXPECT_NEAR(k.imag(), -std::sin(2 * 4e12 * dt), 1e-13);
}

TEST(SliceKernelReference, OffDiagonalConstantCouplingIsBesselFunction) {
  // With w = 0 the xi integral is a Bessel integral: kernel = -i J1(2 c dt). The default xi
  // order only targets the pure geometric phase, so a high order resolves the extra harmonics.
  const QuantumSystem system = degenerate(3);
  for (double c : {1e12, 5e12, 2e13}) {
    RealMatrix v(3);
    v(2, 0) = v(0, 2) = c;
    const double dt = 1e-14;
    const SliceCoupling slice = constant_slice(v, 0.0, dt);
    const std::complex<double> k = slice_kernel(2, 0, slice, system, 80);
    EXPECT_NEAR(k.real(), 0.0, 1e-12) << c;
    EXPECT_NEAR(k.imag(), -std::cyl_bessel_j(1.0, 2.0 * c * dt), 1e-12) << c;
  }
}

TEST(SliceKernelReference, RejectsXiOrderBelowTwo) {
  const SliceCoupling slice = constant_slice(RealMatrix(2), 0.0, 1.0);
  EXPECT_THROW(slice_kernel(0, 1, slice, degenerate(2), 1), ConfigError);
  PropagatorConfig config;
  config.xi_order = 1;
  EXPECT_THROW(config.validate(), ConfigError);
}

TEST(SliceKernel, KroneckerIdentityAtDefaultOrder) {
  const std::size_t n = 8;
  RealMatrix pattern(n);
  pattern(2, 0) = pattern(0, 2) = 1.0;
  const SliceKernel kernel(n14_system(n), pattern, default_xi_order(n));
  for (int dl = -7; dl <= 7; ++dl) {
    EXPECT_LT(std::abs(kernel.kronecker(dl) - (dl == 0 ? 1.0 : 0.0)), 1e-10) << dl;
  }
}

TEST(SliceKernel, RequiresZeroDiagonal) {
  RealMatrix pattern(2);
  pattern(0, 0) = 1.0;
  EXPECT_THROW(SliceKernel(degenerate(2), pattern, 6), ContractViolation);
  EXPECT_THROW(SliceKernel(degenerate(2), RealMatrix(2), 1), ConfigError);
}

TEST(SliceKernel, AgreesWithReferenceOnLaserSlices) {
  const std::size_t n = 8;
  const QuantumSystem system = n14_system(n);
  const LaserCoupling coupling(presets::nitrogen14(), GeometryMatrix::compute(n), train_at(8.38e-12), 5.0);
  const SliceKernel kernel(system, coupling.pattern(), default_xi_order(n));
  ComplexMatrix k(n);
  // Slices around the strongest pulse and one with a long step.
  for (auto [t0, dt] : {std::pair{8.38e-12 - 3e-15, 1e-14}, std::pair{-0.1e-12, 1e-14},
                        std::pair{8.2e-12, 8e-14}}) {
    const SliceCoupling slice = sample_slice(coupling, t0, t0 + dt, gauss_legendre(3));
    kernel.matrix(slice, k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::complex<double> ref = slice_kernel(i, j, slice, system, default_xi_order(n));
        EXPECT_LT(std::abs(k(i, j) - ref), 1e-12) << i << "," << j << " t0=" << t0;
      }
    }
  }
}

TEST(SliceKernel, FirstOrderConsistentAsSliceShrinks) {
  // Independent first-order kernel: -i int V(2,0)/hbar exp(i w tau) dtau, with V built from
  // the closed-form field and the analytic <2|cos^2|0>.
  const std::size_t n = 8;
  const QuantumSystem system = n14_system(n);
  const PulseTrain train = train_at(8.38e-12);
  const MoleculeSpec mol = presets::nitrogen14();
  const LaserCoupling coupling(mol, GeometryMatrix::compute(n), train, 5.0);
  const SliceKernel kernel(system, coupling.pattern(), default_xi_order(n));
  const double g20 = 2.0 / (3.0 * std::sqrt(5.0));
  auto v = [&](double tau) {
    const double e = field_amplitude(tau, train);
    return -0.25 * mol.delta_alpha * g20 * e * e / PhysicalConstants::hbar;
  };
  const double w = system.frequency(2, 0);
  const double t0 = 8.38e-12 - 2e-15;

  std::vector<double> errors;
  for (double dt = 16e-15; dt >= 1e-15 * 0.99; dt /= 2.0) {
    const SliceCoupling slice = sample_slice(coupling, t0, t0 + dt, gauss_legendre(3));
    const std::complex<double> k = kernel(2, 0, slice);
    const std::complex<double> first = oracles::first_order_kernel(false, v, w, t0, t0 + dt);
    errors.push_back(std::abs(k - first));
    EXPECT_LT(errors.back(), std::pow(std::abs(first), 2.0)) << dt;
  }
  ASSERT_EQ(errors.size(), 5u);
  for (std::size_t r = 1; r < errors.size(); ++r) EXPECT_GT(errors[r - 1] / errors[r], 5.0) << r;
}

TEST(PropagateStep, IdentityKernelKeepsAmplitudes) {
  AmplitudeVector a;
  a.re = {0.6, 0.0, 0.0};
  a.im = {0.0, 0.8, 0.0};
  a.step_index = 7;
  const AmplitudeVector b = propagate_step(a, ComplexMatrix::identity(3));
  EXPECT_EQ(b.re, a.re);
  EXPECT_EQ(b.im, a.im);
  EXPECT_EQ(b.step_index, 8u);
}

TEST(PropagateStep, SingleLeakDownByTwoLevels) {
  ComplexMatrix k = ComplexMatrix::identity(4);
  k(0, 2) = {0.0, 0.1};
  const AmplitudeVector b = propagate_step(AmplitudeVector::basis(4, 2), k);
  EXPECT_EQ(b.re, (std::vector<double>{0.0, 0.0, 1.0, 0.0}));
  EXPECT_EQ(b.im, (std::vector<double>{0.1, 0.0, 0.0, 0.0}));
  EXPECT_NEAR(transition_probability(renormalize(b), 0), 0.01 / 1.01, 1e-15);
}

TEST(PropagateStep, RotationFormMatchesComplexProduct) {
  ComplexMatrix k(3);
  AmplitudeVector a;
  a.re = {0.3, -0.2, 0.5};
  a.im = {0.1, 0.7, -0.4};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) k(i, j) = {0.1 * i - 0.3 * j, 0.2 + 0.05 * i * j};
  }
  const AmplitudeVector b = propagate_step(a, k);
  for (std::size_t i = 0; i < 3; ++i) {
    std::complex<double> expected{};
    for (std::size_t j = 0; j < 3; ++j) expected += k(i, j) * a[j];
    EXPECT_NEAR(b.re[i], expected.real(), 1e-15);
    EXPECT_NEAR(b.im[i], expected.imag(), 1e-15);
  }
}

TEST(PropagateStep, NonFiniteAmplitudeAbortsWithSliceIndex) {
  ComplexMatrix k = ComplexMatrix::identity(2);
  k(1, 0) = {std::nan(""), 0.0};
  AmplitudeVector a = AmplitudeVector::basis(2, 0);
  a.step_index = 41;
  try {
    propagate_step(a, k);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos) << e.what();
  }
}

TEST(Renormalize, ScalesToUnitNorm) {
  AmplitudeVector a;
  a.re = {3.0, 0.0};
  a.im = {0.0, 4.0};
  const AmplitudeVector b = renormalize(a);
  EXPECT_DOUBLE_EQ(b.re[0], 0.6);
  EXPECT_DOUBLE_EQ(b.im[1], 0.8);
  EXPECT_NEAR(b.norm_squared(), 1.0, 1e-15);
  const AmplitudeVector unit = renormalize(b);
  EXPECT_NEAR(unit.re[0], b.re[0], 1e-16);
  AmplitudeVector zero;
  zero.re = {0.0, 0.0};
  zero.im = {0.0, 0.0};
  EXPECT_THROW(renormalize(zero), NumericalError);
}

TEST(TransitionProbability, SquaredModulus) {
  AmplitudeVector a;
  a.re = {0.6, 0.0};
  a.im = {0.0, -0.8};
  EXPECT_NEAR(transition_probability(a, 0), 0.36, 1e-15);
  EXPECT_NEAR(transition_probability(a, 1), 0.64, 1e-15);
  EXPECT_THROW(transition_probability(a, 2), ContractViolation);
}

TEST(ThermalAverage, IdentityReturnsWeights) {
  const std::vector<double> w{0.5, 0.3, 0.2};
  EXPECT_EQ(thermal_average(RealMatrix::identity(3), w), w);
}

TEST(ThermalAverage, MixesRows) {
  RealMatrix c(2);
  c(0, 0) = 0.9;
  c(0, 1) = 0.1;
  c(1, 0) = 0.4;
  c(1, 1) = 0.6;
  const std::vector<double> w{0.75, 0.25};
  const auto p = thermal_average(c, w);
  EXPECT_NEAR(p[0], 0.75 * 0.9 + 0.25 * 0.4, 1e-15);
  EXPECT_NEAR(p[1], 0.75 * 0.1 + 0.25 * 0.6, 1e-15);
}

TEST(ThermalAverage, RejectsBadWeightsAndRows) {
  const std::vector<double> low{0.5, 0.4};
  EXPECT_THROW(thermal_average(RealMatrix::identity(2), low), ConfigError);
  RealMatrix c = RealMatrix::identity(2);
  c(1, 0) = 0.5;
  const std::vector<double> w{0.5, 0.5};
  EXPECT_THROW(thermal_average(c, w), NumericalError);
}

TEST(Propagate, ZeroFieldIsIdentityForAnySliceCount) {
  const std::size_t n = 8;
  PulseTrain train = train_at(8.38e-12);
  train.peak_field = 0.0;
  const LaserCoupling coupling(presets::nitrogen14(), GeometryMatrix::compute(n), train, 5.0);
  for (std::size_t k : {1u, 2u, 17u, 500u}) {
    PropagatorConfig config;
    config.slices = k;
    const RealMatrix p = transition_matrix(n14_system(n), coupling, coupling.window(), config);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < n; ++f) EXPECT_NEAR(p(i, f), i == f ? 1.0 : 0.0, 1e-10) << k;
    }
  }
}

TEST(Propagate, RowsStayNormalizedAndSlicesFollowStepBound) {
  const std::size_t n = 8;
  const QuantumSystem system = n14_system(n);
  const LaserCoupling coupling(presets::nitrogen14(), GeometryMatrix::compute(n), train_at(8.38e-12), 5.0);
  PropagatorConfig config;
  const TimeWindow window = coupling.window();
  const std::size_t k = slice_count(system, coupling, window, config);
  EXPECT_LE(window.duration() / static_cast<double>(k) * max_rate(system, coupling), 0.05);
  EXPECT_GT(window.duration() / static_cast<double>(k - 1) * max_rate(system, coupling), 0.05);
  const std::size_t levels[] = {0, 3};
  const PropagationResult r = propagate(system, coupling, window, levels, config);
  EXPECT_EQ(r.slices, k);
  for (const AmplitudeVector& a : r.finals) EXPECT_NEAR(a.norm_squared(), 1.0, 1e-12);
  // Parity: even levels never reach odd ones beyond quadrature round-off.
  EXPECT_LT(transition_probability(r.finals[0], 1), 1e-20);
  EXPECT_LT(transition_probability(r.finals[1], 2), 1e-20);
  config.k_multiplier = 3;
  EXPECT_EQ(slice_count(system, coupling, window, config), 3 * k);
}

TEST(Propagate, UnusableRateAborts) {
  RealMatrix v(2);
  v(0, 1) = v(1, 0) = 1e300;
  EXPECT_THROW(slice_count(degenerate(2), ConstantCoupling(v), TimeWindow{0.0, 1.0}, PropagatorConfig{}),
               NumericalError);
}

TEST(ConvergenceLadder, DoublesSlicesAndShrinksChanges) {
  const std::size_t n = 4;
  RealMatrix v(n);
  v(2, 0) = v(0, 2) = 3e11;
  v(3, 1) = v(1, 3) = 2e11;
  const QuantumSystem system = QuantumSystem::from_energies({0.0, 1e-23, 3e-23, 6e-23});
  const ConstantCoupling coupling(v);
  const auto ladder = convergence_ladder(system, coupling, {0.0, 2e-11}, PropagatorConfig{}, 3);
  ASSERT_EQ(ladder.size(), 4u);
  for (std::size_t r = 1; r < ladder.size(); ++r) {
    EXPECT_EQ(ladder[r].slices, 2 * ladder[r - 1].slices);
    if (r > 1) EXPECT_LT(ladder[r].max_change, ladder[r - 1].max_change);
  }
}
