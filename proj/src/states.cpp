#include "phasemetro/states.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "phasemetro/errors.hpp"

namespace phasemetro {
namespace {

constexpr Complex kI{0.0, 1.0};

void require_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::EtaOutOfRange, "eta must lie in [0, 1], got " + std::to_string(eta));
  }
}

void require_index(const PhaseModel& model, int k) {
  if (k < 1 || k >= model.dimension()) {
    throw Error(ErrorCode::IndexOutOfRange, "phase index " + std::to_string(k) + " outside 1.." +
                                                std::to_string(model.dimension() - 1));
  }
}

}  // namespace

PhaseModel::PhaseModel(std::vector<double> amplitudes, std::vector<double> phases, Normalization policy)
    : amplitudes_(std::move(amplitudes)), phases_(std::move(phases)) {
  if (amplitudes_.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "a phase model needs d >= 2 amplitudes");
  }
  if (phases_.size() + 1 != amplitudes_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(amplitudes_.size() - 1) +
                                                  " phases, got " + std::to_string(phases_.size()));
  }
  for (double v : amplitudes_)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "amplitudes must be finite");
  for (double v : phases_)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "phases must be finite");

  const double norm2 = std::inner_product(amplitudes_.begin(), amplitudes_.end(), amplitudes_.begin(), 0.0);
  if (std::abs(norm2 - 1.0) <= kNormalizationTol) return;
  if (policy == Normalization::Strict || norm2 == 0.0) {
    throw Error(ErrorCode::NotNormalized, "sum of squared amplitudes is " + std::to_string(norm2));
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (double& v : amplitudes_) v *= scale;
  rescaled_ = true;
}

double PhaseModel::phase(int k) const {
  if (k == 0) return 0.0;
  return phases_.at(static_cast<std::size_t>(k - 1));
}

PhaseModel PhaseModel::with_phases(std::vector<double> phases) const {
  return PhaseModel(amplitudes_, std::move(phases), Normalization::Strict);
}

ComplexVector build_pure_state(const PhaseModel& model) {
  const int d = model.dimension();
  ComplexVector psi(d);
  for (int k = 0; k < d; ++k) psi(k) = model.amplitude(k) * std::exp(kI * model.phase(k));
  return psi;
}

ComplexMatrix build_projector(const PhaseModel& model) {
  const ComplexVector psi = build_pure_state(model);
  return psi * psi.adjoint();
}

WhiteNoiseState::WhiteNoiseState(PhaseModel model, double eta) : model_(std::move(model)), eta_(eta) {
  require_eta(eta_);
  const int d = model_.dimension();
  projector_ = build_projector(model_);
  rho_ = eta_ * projector_ + ComplexMatrix::Identity(d, d) * ((1.0 - eta_) / d);
  if (eta_ < 1.0) {
    alpha_ = std::log(((d - 1) * eta_ + 1.0) / (1.0 - eta_));
    beta_ = std::log((1.0 - eta_) / d);
  } else {
    alpha_ = std::numeric_limits<double>::infinity();
    beta_ = -std::numeric_limits<double>::infinity();
  }
}

ComplexMatrix WhiteNoiseState::exponent() const {
  if (!has_exponential_form()) {
    throw Error(ErrorCode::EtaEndpoint, "rho has no exponential form at eta = 1 (alpha diverges)");
  }
  const int d = dimension();
  return alpha_ * projector_ + beta_ * ComplexMatrix::Identity(d, d);
}

WhiteNoiseState build_white_noise_state(const PhaseModel& model, double eta) {
  return WhiteNoiseState(model, eta);
}

ComplexMatrix derivative_operator_A(const PhaseModel& model, int k) {
  require_index(model, k);
  const ComplexVector psi = build_pure_state(model);
  const int d = model.dimension();
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  a.row(k) = (kI * model.amplitude(k) * std::exp(kI * model.phase(k))) * psi.adjoint();
  return a;
}

ComplexMatrix projector_derivative(const PhaseModel& model, int k) {
  const ComplexMatrix a = derivative_operator_A(model, k);
  return a + a.adjoint();
}

ComplexMatrix white_noise_derivative(const WhiteNoiseState& state, int k) {
  return state.eta() * projector_derivative(state.model(), k);
}

std::vector<ComplexMatrix> white_noise_derivatives(const WhiteNoiseState& state) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(state.model().parameter_count()));
  for (int k = 1; k < state.dimension(); ++k) out.push_back(white_noise_derivative(state, k));
  return out;
}

LudersState::LudersState(std::vector<ComplexVector> basis, double eta) : basis_(std::move(basis)), eta_(eta) {
  require_eta(eta_);
  if (basis_.empty()) throw Error(ErrorCode::NotOrthonormal, "Lueders basis must contain at least one vector");
  const auto d = basis_.front().size();
  const auto r = static_cast<Eigen::Index>(basis_.size());
  if (d < 2 || r > d) {
    throw Error(ErrorCode::DimensionMismatch, "Lueders basis needs 1 <= r <= d with d >= 2");
  }
  ComplexMatrix frame(d, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const ComplexVector& v = basis_[static_cast<std::size_t>(j)];
    if (v.size() != d) throw Error(ErrorCode::DimensionMismatch, "Lueders basis vectors differ in length");
    if (!v.allFinite()) throw Error(ErrorCode::NonFinite, "Lueders basis has non-finite entries");
    frame.col(j) = v;
  }
  const double defect = (frame.adjoint() * frame - ComplexMatrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw Error(ErrorCode::NotOrthonormal, "Lueders basis Gram defect " + std::to_string(defect));
  }
  projector_ = frame * frame.adjoint();
  rho_ = (eta_ / static_cast<double>(r)) * projector_ +
         ComplexMatrix::Identity(d, d) * ((1.0 - eta_) / static_cast<double>(d));
}

LudersState build_luders_state(std::vector<ComplexVector> basis, double eta) {
  return LudersState(std::move(basis), eta);
}

ComplexMatrix apply_phase_offsets(const ComplexMatrix& rho, std::span<const double> offsets) {
  require_square(rho, "apply_phase_offsets");
  if (static_cast<Eigen::Index>(offsets.size()) + 1 != rho.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "phase offsets must have length d - 1");
  }
  ComplexVector u(rho.rows());
  u(0) = 1.0;
  for (std::size_t k = 0; k < offsets.size(); ++k) u(static_cast<Eigen::Index>(k) + 1) = std::exp(kI * offsets[k]);
  return u.asDiagonal() * rho * u.conjugate().asDiagonal();
}

StateBuilder white_noise_builder(const PhaseModel& model, double eta) {
  return [model, eta](std::span<const double> phases) {
    return WhiteNoiseState(model.with_phases({phases.begin(), phases.end()}), eta).rho();
  };
}

StateBuilder luders_builder(const LudersState& state) {
  return [sigma = state.rho()](std::span<const double> offsets) { return apply_phase_offsets(sigma, offsets); };
}

std::vector<ComplexMatrix> finite_difference_derivatives(const StateBuilder& builder,
                                                         std::span<const double> point, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::StepOutOfRange, "finite-difference step must be positive");
  std::vector<double> shifted(point.begin(), point.end());
  std::vector<ComplexMatrix> out;
  out.reserve(point.size());
  for (std::size_t k = 0; k < point.size(); ++k) {
    shifted[k] = point[k] + step;
    const ComplexMatrix plus = builder(shifted);
    shifted[k] = point[k] - step;
    const ComplexMatrix minus = builder(shifted);
    shifted[k] = point[k];
    out.push_back((plus - minus) / (2.0 * step));
  }
  return out;
}

}  // namespace phasemetro
