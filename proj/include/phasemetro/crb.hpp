#pragma once

// Quantum Cramer-Rao bound: weak-commutativity check, diagonalization of the
// QFIM, minimal total variance and the optimal locally unbiased estimators in
// the rotated parameters lambda = Q phi.

#include <span>
#include <vector>

#include "phasemetro/linalg.hpp"
#include "phasemetro/qfim.hpp"
#include "phasemetro/sld.hpp"

namespace phasemetro {

inline constexpr double kAttainabilityTol = 1e-10;

struct Attainability {
  bool attainable;
  double max_im_residual;
};

/// max_{j<k} |Im Tr(rho L_j L_k)| / max(1, ||F||_F).
Attainability attainability_check(const ComplexMatrix& rho, const SLDSet& slds, double tol = kAttainabilityTol);

struct QfimDiagonalization {
  RealMatrix rotation;      // rows are eigenvectors: Q F Q^T = diag(eigenvalues)
  RealVector eigenvalues;   // ascending
};

/// Sign convention: the first component of each eigenvector whose magnitude
/// exceeds 1e-12 is positive.
QfimDiagonalization diagonalize_qfim(const RealMatrix& fisher);

/// 1e-12 * max F_mu, or 1e-300 when every eigenvalue vanishes.
double singular_tolerance(const RealVector& eigenvalues);

struct TotalVariance {
  double value;                              // +inf when some F_mu <= singular_tol
  std::vector<RealVector> singular_directions;  // null-space vectors in phi coordinates
  bool finite() const { return singular_directions.empty(); }
};

/// (1/M) sum_mu 1/F_mu.
TotalVariance min_total_variance(const RealMatrix& fisher, int measurements = 1);

/// (L_lambda)_i = sum_j Q_ij (L_phi)_j.  Throws NotOrthogonal.
SLDSet rotated_slds(const SLDSet& slds, const RealMatrix& rotation);

/// O_k = lambda_k I + L_{lambda_k} / F_{lambda_k}.  Throws SingularInformation.
std::vector<ComplexMatrix> optimal_estimators(const ComplexMatrix& rho, const SLDSet& rotated,
                                              std::span<const double> lambda_point,
                                              std::span<const double> fisher_lambda);

/// Re Tr(rho (O_j O_k + O_k O_j)/2) - lambda_j lambda_k.
RealMatrix estimator_covariance(const ComplexMatrix& rho, std::span<const ComplexMatrix> estimators,
                                std::span<const double> lambda_point);

struct CRBReport {
  bool attainable = false;
  double max_im_residual = 0.0;
  RealVector qfim_eigenvalues;
  RealMatrix rotation;
  double min_total_variance = 0.0;
  int measurement_count = 1;
  std::vector<RealVector> singular_directions;
  RealVector lambda_point;
  std::vector<ComplexMatrix> estimators;  // empty when information is singular
  RealMatrix estimator_covariance;
};

/// Runs the full chain for SLDs valid at rho and the phase point phases.
CRBReport crb_report(const ComplexMatrix& rho, const SLDSet& slds, const RealMatrix& fisher,
                     std::span<const double> phases, int measurements = 1);

}  // namespace phasemetro
