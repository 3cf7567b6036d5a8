#include <cmath>

#include <gtest/gtest.h>

#include "phasemetro/qfim.hpp"
#include "phasemetro/sld.hpp"
#include "support/expect_error.hpp"
#include "support/instances.hpp"

namespace phasemetro {
namespace {

using testing::expect_error;
using testing::InstanceGenerator;
using testing::uniform_model;

RealMatrix mat2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const RealMatrix kGolden = mat2(4.0 / 15, -2.0 / 15, -2.0 / 15, 4.0 / 15);
const RealMatrix kGoldenPure = mat2(8.0 / 9, -4.0 / 9, -4.0 / 9, 8.0 / 9);

std::vector<double> phases_of(const PhaseModel& model) { return {model.phases().begin(), model.phases().end()}; }

TEST(FromSlds, Examples) {
  const PhaseModel qutrit = uniform_model(3, {0.3, 1.1});
  const WhiteNoiseState empty(qutrit, 0.0);
  EXPECT_EQ(qfim_from_slds(empty.rho(), sld_closed_form(empty)).entries.norm(), 0.0);

  const WhiteNoiseState qubit(uniform_model(2, {0.6}), 1.0);
  const QFIM f = qfim_from_slds(qubit.rho(), sld_closed_form(qubit));
  ASSERT_EQ(f.size(), 1);
  EXPECT_NEAR(f.entries(0, 0), 1.0, 1e-12);

  const WhiteNoiseState golden(qutrit, 0.5);
  const QFIM g = qfim_from_slds(golden.rho(), sld_eigenbasis(golden.rho(), white_noise_derivatives(golden)));
  EXPECT_EQ(g.method, QfimMethod::FromSlds);
  EXPECT_LE((g.entries - kGolden).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ClosedForm, Examples) {
  const PhaseModel qutrit = uniform_model(3, {0.3, 1.1});
  EXPECT_EQ(qfim_closed_form(WhiteNoiseState(qutrit, 0.0)).entries.norm(), 0.0);
  EXPECT_LE((qfim_closed_form(WhiteNoiseState(qutrit, 1.0)).entries - kGoldenPure).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((qfim_closed_form(WhiteNoiseState(qutrit, 0.5)).entries - kGolden).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Pure, Examples) {
  EXPECT_EQ(qfim_pure(PhaseModel({1.0, 0.0, 0.0}, {0.5, 0.2})).entries.norm(), 0.0);
  EXPECT_NEAR(qfim_pure(uniform_model(2, {1.3})).entries(0, 0), 1.0, 1e-15);
  EXPECT_LE((qfim_pure(uniform_model(3, {0.3, 1.1})).entries - kGoldenPure).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spectral, Examples) {
  InstanceGenerator gen(83, 3, 3);
  const std::vector<ComplexMatrix> zero(2, ComplexMatrix::Zero(3, 3));
  EXPECT_EQ(qfim_spectral(gen.density(3), zero).entries.norm(), 0.0);

  const WhiteNoiseState golden(uniform_model(3, {0.3, 1.1}), 0.5);
  const QFIM f = qfim_spectral(golden.rho(), white_noise_derivatives(golden));
  EXPECT_EQ(f.method, QfimMethod::Spectral);
  EXPECT_LE((f.entries - kGolden).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Spectral, RejectsWeightOutsideSupport) {
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  ComplexMatrix drho = ComplexMatrix::Zero(2, 2);
  drho(1, 1) = 1.0;
  const std::vector<ComplexMatrix> list = {drho};
  expect_error(ErrorCode::SupportViolation, [&] { qfim_spectral(rho, list); });
}

TEST(Spectral, LudersRankTwoMatchesFidelity) {
  ComplexVector e0 = ComplexVector::Zero(4), e1 = ComplexVector::Zero(4);
  e0 << 0.5, Complex(0.5, 0.1), Complex(-0.3, 0.4), 0.2;
  e0.normalize();
  e1 << Complex(0.1, -0.2), 0.6, 0.3, Complex(0.0, 0.7);
  e1 -= e0.dot(e1) * e0;
  e1.normalize();
  const LudersState state({e0, e1}, 0.5);
  const StateBuilder builder = luders_builder(state);
  const std::vector<double> point(3, 0.0);
  std::vector<ComplexMatrix> drho = finite_difference_derivatives(builder, point, 1e-6);
  for (ComplexMatrix& m : drho) m = 0.5 * (m + m.adjoint()).eval();
  const QFIM spectral = qfim_spectral(state.rho(), drho);
  const QFIM fidelity = qfim_fidelity_fd(builder, point);
  EXPECT_GT(spectral.entries.norm(), 1e-3);
  EXPECT_LE(relative_frobenius(fidelity.entries, spectral.entries), 1e-4);
}

TEST(FidelityFd, Examples) {
  const PhaseModel qutrit = uniform_model(3, {0.3, 1.1});
  const QFIM zero = qfim_fidelity_fd(white_noise_builder(qutrit, 0.0), phases_of(qutrit));
  EXPECT_LE(zero.entries.norm(), 1e-12);

  const PhaseModel qubit = uniform_model(2, {0.4});
  const QFIM pure = qfim_fidelity_fd(white_noise_builder(qubit, 1.0), phases_of(qubit), 1e-3);
  EXPECT_EQ(pure.method, QfimMethod::FidelityFd);
  EXPECT_NEAR(pure.entries(0, 0), 1.0, 1e-6);

  const QFIM golden = qfim_fidelity_fd(white_noise_builder(qutrit, 0.5), phases_of(qutrit), 1e-3);
  EXPECT_LE(relative_frobenius(golden.entries, kGolden), 1e-4);
}

TEST(FidelityFd, StepRange) {
  const PhaseModel qubit = uniform_model(2, {0.4});
  const StateBuilder builder = white_noise_builder(qubit, 0.5);
  expect_error(ErrorCode::StepOutOfRange, [&] { qfim_fidelity_fd(builder, phases_of(qubit), 1e-5); });
  expect_error(ErrorCode::StepOutOfRange, [&] { qfim_fidelity_fd(builder, phases_of(qubit), 0.5); });
}

TEST(RatioXi, Examples) {
  for (int d : {2, 3, 7, 64}) {
    EXPECT_EQ(ratio_xi(0.0, d), 0.0);
    EXPECT_EQ(ratio_xi(1.0, d), 1.0);
  }
  EXPECT_EQ(ratio_xi(0.5, 3), 0.3);
}

TEST(RatioXi, StrictlyIncreasing) {
  for (int d : {2, 3, 8, 64}) {
    double previous = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const double xi = ratio_xi(i / 999.0, d);
      EXPECT_GT(xi, previous) << d << " " << i;
      previous = xi;
    }
  }
}

TEST(MonotonicityGap, Examples) {
  const PhaseModel qutrit = uniform_model(3, {0.3, 1.1});
  EXPECT_NEAR(monotonicity_gap(WhiteNoiseState(qutrit, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(monotonicity_gap(WhiteNoiseState(qutrit, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(monotonicity_gap(WhiteNoiseState(qutrit, 0.5)), 4.0 / 45.0, 1e-14);
}

TEST(RelativeFrobenius, Conventions) {
  const RealMatrix zero = RealMatrix::Zero(2, 2);
  EXPECT_EQ(relative_frobenius(zero, zero), 0.0);
  EXPECT_TRUE(std::isinf(relative_frobenius(kGolden, zero)));
  EXPECT_NEAR(relative_frobenius(2.0 * kGolden, kGolden), 1.0, 1e-15);
}

TEST(Properties, RandomInstances) {
  InstanceGenerator gen(89, 2, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const testing::Instance inst = gen.next();
    const WhiteNoiseState state(inst.model, inst.eta);
    const int d = state.dimension();
    const RealMatrix closed = qfim_closed_form(state).entries;
    const std::vector<ComplexMatrix> drho = white_noise_derivatives(state);

    EXPECT_LE(relative_frobenius(qfim_from_slds(state.rho(), sld_eigenbasis(state.rho(), drho)).entries, closed), 1e-9);
    EXPECT_LE(relative_frobenius(qfim_spectral(state.rho(), drho).entries, closed), 1e-9);
    if (trial % 4 == 0) {
      const QFIM fd = qfim_fidelity_fd(white_noise_builder(inst.model, inst.eta), phases_of(inst.model));
      EXPECT_LE(relative_frobenius(fd.entries, closed), 1e-4);
    }

    const RealMatrix pure = qfim_pure(inst.model).entries;
    EXPECT_LE((closed - ratio_xi(inst.eta, d) * pure).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(monotonicity_gap(state), -1e-10);
    EXPECT_EQ(closed, closed.transpose());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<RealMatrix>(closed).eigenvalues().minCoeff(), -1e-12);

    const double c0 = inst.model.amplitude(0);
    const RealVector row_sums = closed.rowwise().sum();
    for (int j = 1; j < d; ++j) {
      const double cj = inst.model.amplitude(j);
      EXPECT_NEAR(row_sums(j - 1), qfim_prefactor(inst.eta, d) * cj * cj * c0 * c0, 1e-12);
    }

    const WhiteNoiseState moved(inst.model.with_phases(gen.phases(d)), inst.eta);
    EXPECT_LE((qfim_closed_form(moved).entries - closed).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
}  // namespace phasemetro
