#pragma once

// Parametrized pure states |Psi(phi)> = sum_k c_k e^{i phi_k} |k> with the
// global phase phi_0 fixed at zero, their white-noise mixtures and the rank-r
// (Lueders-type) generalization.

#include <functional>
#include <span>
#include <vector>

#include "phasemetro/linalg.hpp"

namespace phasemetro {

inline constexpr double kNormalizationTol = 1e-10;

enum class Normalization {
  Strict,     // sum c_k^2 must equal 1 within kNormalizationTol
  Rescale,    // amplitudes are rescaled to unit norm
};

class PhaseModel {
 public:
  /// amplitudes: c_0..c_{d-1} (real, any sign); phases: phi_1..phi_{d-1}.
  PhaseModel(std::vector<double> amplitudes, std::vector<double> phases,
             Normalization policy = Normalization::Strict);

  int dimension() const { return static_cast<int>(amplitudes_.size()); }
  int parameter_count() const { return dimension() - 1; }

  std::span<const double> amplitudes() const { return amplitudes_; }
  std::span<const double> phases() const { return phases_; }

  double amplitude(int k) const { return amplitudes_.at(static_cast<std::size_t>(k)); }
  /// phi_k for k in 0..d-1; phi_0 is identically zero.
  double phase(int k) const;

  PhaseModel with_phases(std::vector<double> phases) const;

  /// True when the constructor had to rescale the amplitudes.
  bool was_rescaled() const { return rescaled_; }

 private:
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
  bool rescaled_ = false;
};

ComplexVector build_pure_state(const PhaseModel& model);

/// |Psi><Psi|
ComplexMatrix build_projector(const PhaseModel& model);

/// eta P(phi) + (1 - eta)/d I together with its exponential-form coefficients.
class WhiteNoiseState {
 public:
  WhiteNoiseState(PhaseModel model, double eta);

  const PhaseModel& model() const { return model_; }
  double eta() const { return eta_; }
  int dimension() const { return model_.dimension(); }
  const ComplexMatrix& rho() const { return rho_; }
  const ComplexMatrix& projector() const { return projector_; }

  /// ln[((d-1) eta + 1)/(1 - eta)]; +inf at eta = 1.
  double alpha() const { return alpha_; }
  /// ln[(1 - eta)/d]; -inf at eta = 1.
  double beta() const { return beta_; }
  bool has_exponential_form() const { return eta_ < 1.0; }

  /// G = alpha P + beta I with rho = exp(G).  Throws EtaEndpoint at eta = 1.
  ComplexMatrix exponent() const;

 private:
  PhaseModel model_;
  double eta_;
  ComplexMatrix projector_;
  ComplexMatrix rho_;
  double alpha_;
  double beta_;
};

WhiteNoiseState build_white_noise_state(const PhaseModel& model, double eta);

/// A_k = |d_k Psi><Psi| = i c_k e^{i phi_k} |k><Psi|, k in 1..d-1.
ComplexMatrix derivative_operator_A(const PhaseModel& model, int k);

/// dP/dphi_k = A_k + A_k^dagger.
ComplexMatrix projector_derivative(const PhaseModel& model, int k);

/// d rho / d phi_k = eta dP/dphi_k.
ComplexMatrix white_noise_derivative(const WhiteNoiseState& state, int k);

/// All d-1 derivatives, index 0 holding k = 1.
std::vector<ComplexMatrix> white_noise_derivatives(const WhiteNoiseState& state);

/// (eta/r) P~ + (1 - eta)/d I where P~ projects onto span(basis).
class LudersState {
 public:
  LudersState(std::vector<ComplexVector> basis, double eta);

  int dimension() const { return static_cast<int>(rho_.rows()); }
  int rank() const { return static_cast<int>(basis_.size()); }
  double eta() const { return eta_; }
  std::span<const ComplexVector> basis() const { return basis_; }
  const ComplexMatrix& projector() const { return projector_; }
  const ComplexMatrix& rho() const { return rho_; }

 private:
  std::vector<ComplexVector> basis_;
  double eta_;
  ComplexMatrix projector_;
  ComplexMatrix rho_;
};

LudersState build_luders_state(std::vector<ComplexVector> basis, double eta);

/// Maps a phase vector (length d-1) to a density matrix.
using StateBuilder = std::function<ComplexMatrix(std::span<const double>)>;

/// U(u) rho U(u)^dagger with U(u) = diag(1, e^{i u_1}, ..., e^{i u_{d-1}}).
ComplexMatrix apply_phase_offsets(const ComplexMatrix& rho, std::span<const double> offsets);

/// phases -> rho^w(phases) at fixed amplitudes and eta.
StateBuilder white_noise_builder(const PhaseModel& model, double eta);

/// The Lueders state is taken as the value at phase offset zero; the builder
/// returns U(u) sigma U(u)^dagger for offsets u.
StateBuilder luders_builder(const LudersState& state);

/// Central finite differences of builder at point, one matrix per parameter.
std::vector<ComplexMatrix> finite_difference_derivatives(const StateBuilder& builder,
                                                         std::span<const double> point, double step);

}  // namespace phasemetro
