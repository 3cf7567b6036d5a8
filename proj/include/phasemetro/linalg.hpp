#pragma once

// Dense complex linear algebra used throughout the library.  Matrices are
// plain Eigen types; the functions here add the Hermitian/PSD contracts and
// the tolerances every other module relies on.

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace phasemetro {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdClampTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;

struct HermitianEig {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // unitary, columns are eigenvectors
};

void require_square(const ComplexMatrix& m, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);
void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what);

/// ||M - M^dagger||_F
double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTol);

/// Throws NonSquare / NonHermitian / NonFinite.
void require_hermitian(const ComplexMatrix& m, const char* what);

/// Throws NotDensityMatrix unless m is Hermitian, unit trace and PSD within
/// the clamp tolerance.
void require_density_matrix(const ComplexMatrix& m, const char* what);

/// Eigenvalues ascending; the input is symmetrized before decomposition so the
/// result is exactly Hermitian-consistent.  Deterministic for identical input.
HermitianEig hermitian_eig(const ComplexMatrix& m);

/// Principal square root of a Hermitian PSD matrix.  Eigenvalues in
/// [-1e-10, 0) and those indistinguishable from rounding noise
/// (|lambda| <= n*eps*lambda_max) are treated as zero.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m);

/// (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, clamped to [0, 1].
double uhlmann_fidelity(const ComplexMatrix& rho1, const ComplexMatrix& rho2);

/// Same as uhlmann_fidelity with sqrt(rho1) supplied by the caller and no
/// validation.  Evaluated and returned in extended precision: finite
/// differences of F_U near 1 need more than 53 bits.  rho2 is renormalized to
/// unit trace first.  Not clamped, so it may exceed 1 by rounding; this keeps
/// it smooth in rho2.
long double uhlmann_fidelity_with_root(const ComplexMatrix& sqrt_rho1, const ComplexMatrix& rho2);

/// sqrt(2 - 2 sqrt(F_U)).
double bures_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Real symmetric eigendecomposition, ascending.  Solved in long double so
/// the small eigenvalues of ill-conditioned QFIMs keep their relative accuracy.
struct SymmetricEig {
  RealVector eigenvalues;
  RealMatrix eigenvectors;
};
SymmetricEig symmetric_eig(const RealMatrix& m);

}  // namespace phasemetro
