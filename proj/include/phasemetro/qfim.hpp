#pragma once

// Quantum Fisher information matrix over the d-1 free phases, by closed form,
// from SLDs, by the spectral pair sum and by finite differences of the
// Uhlmann fidelity.

#include <optional>
#include <span>
#include <vector>

#include "phasemetro/linalg.hpp"
#include "phasemetro/sld.hpp"
#include "phasemetro/states.hpp"

namespace phasemetro {

enum class QfimMethod { ClosedForm, FromSlds, Spectral, FidelityFd, Pure };

const char* to_string(QfimMethod method);

struct QFIM {
  QfimMethod method;
  RealMatrix entries;  // (d-1)x(d-1), real symmetric

  int size() const { return static_cast<int>(entries.rows()); }
};

/// F_jk = Re Tr(rho L_j L_k), symmetrized.
QFIM qfim_from_slds(const ComplexMatrix& rho, const SLDSet& slds);

/// 4 d eta^2 / (2 + (d - 2) eta)
double qfim_prefactor(double eta, int d);

/// prefactor * (c_j^2 delta_jk - c_j^2 c_k^2), j, k in 1..d-1.
QFIM qfim_closed_form(const WhiteNoiseState& state);

/// 4 Re(<d_j Psi|d_k Psi> - <d_j Psi|Psi><Psi|d_k Psi>) for the noiseless state.
QFIM qfim_pure(const PhaseModel& model);

/// F_ab = sum over lambda_m + lambda_n > tol of
///        2 Re[(d_a rho)_mn (d_b rho)_nm] / (lambda_m + lambda_n)
/// in the eigenbasis of rho.
QFIM qfim_spectral(const ComplexMatrix& rho, std::span<const ComplexMatrix> drho,
                   std::optional<double> support_tol = std::nullopt);

inline constexpr double kDefaultFidelityStep = 1e-3;

/// Hessian of -2 F_U(rho(point), rho(point + u)) at u = 0 by central
/// differences with step h in [1e-4, 1e-1].  A second estimate at h/2 is
/// always taken; when the two differ by more than 1e-4 (relative) the
/// Richardson combination is returned, otherwise the h/2 estimate.
QFIM qfim_fidelity_fd(const StateBuilder& builder, std::span<const double> point,
                      double step = kDefaultFidelityStep);

/// xi(eta) = d eta^2 / (2 + (d - 2) eta)
double ratio_xi(double eta, int d);

/// Smallest eigenvalue of eta * F_pure - F_noisy; non-negative by
/// monotonicity.
double monotonicity_gap(const WhiteNoiseState& state);

/// ||a - reference||_F / ||reference||_F, with 0/0 read as 0.
double relative_frobenius(const RealMatrix& a, const RealMatrix& reference);

}  // namespace phasemetro
