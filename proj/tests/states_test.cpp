#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phasemetro/linalg.hpp"
#include "phasemetro/states.hpp"
#include "support/expect_error.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

namespace phasemetro {
namespace {

using testing::expect_error;
using testing::InstanceGenerator;
using testing::uniform_model;

const double kHalf = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

TEST(PureState, BasisState) {
  const ComplexVector psi = build_pure_state(PhaseModel({1.0, 0.0}, {2.5}));
  EXPECT_EQ(psi(0), Complex(1.0));
  EXPECT_EQ(psi(1), Complex(0.0));
}

TEST(PureState, PiPhaseFlipsSign) {
  const ComplexVector psi = build_pure_state(PhaseModel({kHalf, kHalf}, {std::numbers::pi}));
  EXPECT_NEAR(std::abs(psi(0) - kHalf), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi(1) + kHalf), 0.0, 1e-15);
}

TEST(PureState, UniformQutrit) {
  const ComplexVector psi = build_pure_state(uniform_model(3, {0.3, 1.1}));
  const double c = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(c, 0.57735, 1e-5);
  EXPECT_NEAR(std::abs(psi(0) - c), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi(1) - c * std::exp(kI * 0.3)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi(2) - c * std::exp(kI * 1.1)), 0.0, 1e-15);
}

TEST(PhaseModel, Validation) {
  expect_error(ErrorCode::NotNormalized, [] { PhaseModel({1.0, 1.0}, {0.0}); });
  expect_error(ErrorCode::DimensionMismatch, [] { PhaseModel({kHalf, kHalf}, {0.0, 1.0}); });
  const PhaseModel rescaled({1.0, 1.0, 1.0}, {0.0, 0.0}, Normalization::Rescale);
  EXPECT_TRUE(rescaled.was_rescaled());
  EXPECT_NEAR(rescaled.amplitude(2), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(rescaled.phase(0), 0.0);
}

TEST(Projector, Examples) {
  const ComplexMatrix p0 = build_projector(PhaseModel({1.0, 0.0}, {0.4}));
  EXPECT_EQ(p0(0, 0), Complex(1.0));
  EXPECT_EQ(p0.cwiseAbs().sum(), 1.0);
  const ComplexMatrix p1 = build_projector(PhaseModel({kHalf, kHalf}, {0.0}));
  EXPECT_LE((p1 - ComplexMatrix::Constant(2, 2, 0.5)).norm(), 1e-15);
}

TEST(Projector, RankOneOnRandomModels) {
  InstanceGenerator gen(31, 2, 12);
  for (int trial = 0; trial < 40; ++trial) {
    const PhaseModel model = gen.next().model;
    const ComplexMatrix p = build_projector(model);
    const RealVector ev = hermitian_eig(p).eigenvalues;
    const int d = model.dimension();
    EXPECT_NEAR(ev(d - 1), 1.0, 1e-12);
    EXPECT_LE(std::abs(ev(d - 2)), 1e-12);
    EXPECT_LE((p * p - p).norm(), 1e-12);
  }
}

TEST(WhiteNoise, Endpoints) {
  const PhaseModel model = uniform_model(3, {0.3, 1.1});
  const WhiteNoiseState mixed(model, 0.0);
  EXPECT_LE((mixed.rho() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 1e-15);
  EXPECT_EQ(mixed.alpha(), 0.0);

  const WhiteNoiseState pure(model, 1.0);
  EXPECT_LE((pure.rho() - build_projector(model)).norm(), 1e-15);
  EXPECT_TRUE(std::isinf(pure.alpha()));
  EXPECT_FALSE(pure.has_exponential_form());
  expect_error(ErrorCode::EtaEndpoint, [&] { pure.exponent(); });
}

TEST(WhiteNoise, ExponentialCoefficients) {
  const WhiteNoiseState state(uniform_model(3, {0.3, 1.1}), 0.5);
  EXPECT_NEAR(state.alpha(), std::log(4.0), 1e-15);
  EXPECT_NEAR(state.alpha(), 1.3862944, 1e-7);
  EXPECT_NEAR(state.beta(), std::log(1.0 / 6.0), 1e-15);
  EXPECT_NEAR(state.beta(), -1.7917595, 1e-7);
}

TEST(WhiteNoise, RejectsEtaOutsideUnitInterval) {
  const PhaseModel model = uniform_model(2, {0.0});
  expect_error(ErrorCode::EtaOutOfRange, [&] { WhiteNoiseState(model, -0.1); });
  expect_error(ErrorCode::EtaOutOfRange, [&] { WhiteNoiseState(model, 1.5); });
}

TEST(WhiteNoise, ExponentialFormReproducesState) {
  InstanceGenerator gen(37, 2, 10);
  for (int trial = 0; trial < 40; ++trial) {
    const testing::Instance inst = gen.next();
    const WhiteNoiseState state(inst.model, inst.eta);
    // Oracle: Taylor exponential, no spectral decomposition involved.
    EXPECT_LE((testing::expm_taylor(state.exponent()) - state.rho()).norm(), 1e-12);
  }
}

TEST(WhiteNoise, SpectrumAndTrace) {
  InstanceGenerator gen(41, 2, 16);
  for (int trial = 0; trial < 40; ++trial) {
    const testing::Instance inst = gen.next();
    const WhiteNoiseState state(inst.model, inst.eta);
    const int d = state.dimension();
    const RealVector ev = hermitian_eig(state.rho()).eigenvalues;
    const double low = (1.0 - inst.eta) / d;
    for (int i = 0; i + 1 < d; ++i) EXPECT_NEAR(ev(i), low, 1e-12);
    EXPECT_NEAR(ev(d - 1), inst.eta + low, 1e-12);
    EXPECT_NEAR(state.rho().trace().real(), 1.0, 1e-12);
  }
}

TEST(DerivativeA, Examples) {
  const PhaseModel zero({1.0, 0.0, 0.0}, {0.2, 0.9});
  EXPECT_EQ(derivative_operator_A(zero, 1).norm(), 0.0);
  EXPECT_EQ(projector_derivative(zero, 2).norm(), 0.0);

  const ComplexMatrix a = derivative_operator_A(PhaseModel({kHalf, kHalf}, {0.0}), 1);
  EXPECT_EQ(a(0, 0), Complex(0.0));
  EXPECT_EQ(a(0, 1), Complex(0.0));
  EXPECT_NEAR(std::abs(a(1, 0) - 0.5 * kI), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a(1, 1) - 0.5 * kI), 0.0, 1e-15);
}

TEST(DerivativeA, IndexValidation) {
  const PhaseModel model = uniform_model(3, {0.1, 0.2});
  expect_error(ErrorCode::IndexOutOfRange, [&] { derivative_operator_A(model, 0); });
  expect_error(ErrorCode::IndexOutOfRange, [&] { derivative_operator_A(model, 3); });
  expect_error(ErrorCode::IndexOutOfRange, [&] { projector_derivative(model, 3); });
  expect_error(ErrorCode::IndexOutOfRange, [&] { white_noise_derivative(WhiteNoiseState(model, 0.5), 0); });
}

TEST(DerivativeA, MatchesFiniteDifferenceOfKet) {
  InstanceGenerator gen(43, 2, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const PhaseModel model = gen.next().model;
    const int d = model.dimension();
    const ComplexVector psi = build_pure_state(model);
    for (int k = 1; k < d; ++k) {
      auto ket = [&](double x) {
        std::vector<double> phases(model.phases().begin(), model.phases().end());
        phases[k - 1] = x;
        return ComplexMatrix(build_pure_state(model.with_phases(phases)) * psi.adjoint());
      };
      const ComplexMatrix fd = testing::central_difference(ket, model.phase(k), 1e-6);
      EXPECT_LE((derivative_operator_A(model, k) - fd).norm(), 1e-8);
    }
  }
}

TEST(ProjectorDerivative, Examples) {
  const ComplexMatrix p = projector_derivative(PhaseModel({kHalf, kHalf}, {0.0}), 1);
  ComplexMatrix expected(2, 2);
  expected << 0.0, -0.5 * kI, 0.5 * kI, 0.0;
  EXPECT_LE((p - expected).norm(), 1e-15);
}

TEST(ProjectorDerivative, MatchesFiniteDifference) {
  InstanceGenerator gen(47, 2, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const PhaseModel model = gen.next().model;
    for (int k = 1; k < model.dimension(); ++k) {
      auto proj = [&](double x) {
        std::vector<double> phases(model.phases().begin(), model.phases().end());
        phases[k - 1] = x;
        return build_projector(model.with_phases(phases));
      };
      const ComplexMatrix fd = testing::central_difference(proj, model.phase(k), 1e-5);
      EXPECT_LE((projector_derivative(model, k) - fd).norm(), 1e-8);
    }
  }
}

TEST(ProjectorDerivative, OperatorAlgebra) {
  InstanceGenerator gen(53, 2, 16);
  for (int trial = 0; trial < 40; ++trial) {
    const PhaseModel model = gen.next().model;
    const ComplexMatrix p = build_projector(model);
    for (int k = 1; k < model.dimension(); ++k) {
      const ComplexMatrix a = derivative_operator_A(model, k);
      const ComplexMatrix dp = projector_derivative(model, k);
      const Complex ick2 = kI * model.amplitude(k) * model.amplitude(k);
      const ComplexMatrix a_dag = a.adjoint();
      EXPECT_LE((commutator(p, a) - (ick2 * p - a)).norm(), 1e-12);
      EXPECT_LE((commutator(p, a_dag) - (ick2 * p + a_dag)).norm(), 1e-12);
      EXPECT_LE((commutator(p, commutator(p, dp)) - dp).norm(), 1e-12);
      EXPECT_LE(std::abs(dp.trace()), 1e-12);
      EXPECT_LE(std::abs((p * dp).trace()), 1e-12);
    }
  }
}

TEST(WhiteNoiseDerivative, Examples) {
  const PhaseModel model({kHalf, kHalf}, {0.0});
  EXPECT_EQ(white_noise_derivative(WhiteNoiseState(model, 0.0), 1).norm(), 0.0);
  EXPECT_LE((white_noise_derivative(WhiteNoiseState(model, 1.0), 1) - projector_derivative(model, 1)).norm(), 1e-15);
  ComplexMatrix expected(2, 2);
  expected << 0.0, -0.25 * kI, 0.25 * kI, 0.0;
  EXPECT_LE((white_noise_derivative(WhiteNoiseState(model, 0.5), 1) - expected).norm(), 1e-15);
}

TEST(WhiteNoiseDerivative, MatchesBuilderFiniteDifference) {
  InstanceGenerator gen(59, 2, 8);
  for (int trial = 0; trial < 20; ++trial) {
    const testing::Instance inst = gen.next();
    const WhiteNoiseState state(inst.model, inst.eta);
    const std::vector<double> point(inst.model.phases().begin(), inst.model.phases().end());
    const auto fd = finite_difference_derivatives(white_noise_builder(inst.model, inst.eta), point, 1e-5);
    const auto exact = white_noise_derivatives(state);
    ASSERT_EQ(fd.size(), exact.size());
    for (std::size_t k = 0; k < fd.size(); ++k) EXPECT_LE((fd[k] - exact[k]).norm(), 1e-8);
  }
}

ComplexVector basis_vector(int d, int k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

TEST(Luders, FullRankIsMaximallyMixed) {
  for (double eta : {0.0, 0.3, 1.0}) {
    std::vector<ComplexVector> basis;
    for (int k = 0; k < 3; ++k) basis.push_back(basis_vector(3, k));
    const LudersState state(basis, eta);
    EXPECT_LE((state.rho() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 1e-15);
  }
}

TEST(Luders, RankOneReducesToWhiteNoise) {
  const PhaseModel model = uniform_model(3, {0.3, 1.1});
  const LudersState luders({build_pure_state(model)}, 0.4);
  EXPECT_LE((luders.rho() - WhiteNoiseState(model, 0.4).rho()).norm(), 1e-15);
}

TEST(Luders, RankTwoInFour) {
  const LudersState state({basis_vector(4, 0), basis_vector(4, 1)}, 0.5);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 0.375, 0.375, 0.125, 0.125;
  EXPECT_LE((state.rho() - expected).norm(), 1e-15);
}

TEST(Luders, Validation) {
  expect_error(ErrorCode::NotOrthonormal, [] { LudersState({basis_vector(3, 0), basis_vector(3, 0)}, 0.5); });
  expect_error(ErrorCode::NotOrthonormal, [] { LudersState({ComplexVector::Constant(2, 1.0)}, 0.5); });
  expect_error(ErrorCode::EtaOutOfRange, [] { LudersState({basis_vector(2, 0)}, 1.2); });
}

TEST(Builders, PhaseOffsetsActOnWhiteNoiseState) {
  const PhaseModel model = uniform_model(3, {0.3, 1.1});
  const std::vector<double> offsets = {0.2, -0.4};
  const ComplexMatrix rotated = apply_phase_offsets(WhiteNoiseState(model, 0.6).rho(), offsets);
  const ComplexMatrix direct = WhiteNoiseState(model.with_phases({0.5, 0.7}), 0.6).rho();
  EXPECT_LE((rotated - direct).norm(), 1e-14);
  const std::vector<double> phases = {0.5, 0.7};
  EXPECT_LE((white_noise_builder(model, 0.6)(phases) - direct).norm(), 1e-15);
}

}  // namespace
}  // namespace phasemetro
