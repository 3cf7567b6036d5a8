#include "phasemetro/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phasemetro/errors.hpp"

namespace phasemetro {
namespace {

double scale_of(const ComplexMatrix& m) { return std::max(1.0, m.norm()); }

// Threshold below which an eigenvalue is rounding noise relative to the
// spectrum's largest magnitude.
double noise_floor(const RealVector& evals) {
  const double top = evals.cwiseAbs().maxCoeff();
  return static_cast<double>(evals.size()) * std::numeric_limits<double>::epsilon() * top;
}

double clamped(double lambda, double floor) { return lambda <= floor ? 0.0 : lambda; }

}  // namespace

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSquare, std::string(what) + " must be a non-empty square matrix, got " +
                                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

double hermiticity_defect(const ComplexMatrix& m) { return (m - m.adjoint()).norm(); }

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= rel_tol * scale_of(m);
}

void require_hermitian(const ComplexMatrix& m, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  if (!is_hermitian(m)) {
    throw Error(ErrorCode::NonHermitian,
                std::string(what) + " is not Hermitian (defect " + std::to_string(hermiticity_defect(m)) + ")");
  }
}

void require_density_matrix(const ComplexMatrix& m, const char* what) {
  try {
    require_hermitian(m, what);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotDensityMatrix, e.what());
  }
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > kTraceTol) {
    throw Error(ErrorCode::NotDensityMatrix, std::string(what) + " has trace " + std::to_string(trace));
  }
  const HermitianEig eig = hermitian_eig(m);
  if (eig.eigenvalues(0) < -kPsdClampTol) {
    throw Error(ErrorCode::NotDensityMatrix,
                std::string(what) + " has negative eigenvalue " + std::to_string(eig.eigenvalues(0)));
  }
}

HermitianEig hermitian_eig(const ComplexMatrix& m) {
  require_square(m, "hermitian_eig input");
  require_finite(m, "hermitian_eig input");
  if (!is_hermitian(m)) {
    throw Error(ErrorCode::NonHermitian,
                "hermitian_eig input defect " + std::to_string(hermiticity_defect(m)));
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  const HermitianEig eig = hermitian_eig(m);
  if (eig.eigenvalues(0) < -kPsdClampTol) {
    throw Error(ErrorCode::NegativeEigenvalue,
                "matrix_sqrt_psd: eigenvalue " + std::to_string(eig.eigenvalues(0)));
  }
  const double floor = noise_floor(eig.eigenvalues);
  RealVector roots(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < roots.size(); ++i) roots(i) = std::sqrt(clamped(eig.eigenvalues(i), floor));
  return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

long double uhlmann_fidelity_with_root(const ComplexMatrix& sqrt_rho1, const ComplexMatrix& rho2) {
  // Extended precision: second differences of F_U near 1 amplify rounding by 1/h^2.
  using WideMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  using WideReal = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const WideMatrix root = sqrt_rho1.cast<std::complex<long double>>();
  WideMatrix second = rho2.cast<std::complex<long double>>();
  second /= second.trace().real();
  WideMatrix inner = root * second * root;
  inner = (0.5L * (inner + inner.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<WideMatrix> solver(inner, Eigen::EigenvaluesOnly);
  const WideReal& evals = solver.eigenvalues();
  const long double floor =
      static_cast<long double>(evals.size()) * std::numeric_limits<long double>::epsilon() * evals.cwiseAbs().maxCoeff();
  long double trace = 0.0L;
  for (Eigen::Index i = 0; i < evals.size(); ++i) trace += evals(i) <= floor ? 0.0L : std::sqrt(evals(i));
  return trace * trace;
}

double uhlmann_fidelity(const ComplexMatrix& rho1, const ComplexMatrix& rho2) {
  require_same_shape(rho1, rho2, "uhlmann_fidelity");
  require_density_matrix(rho1, "rho1");
  require_density_matrix(rho2, "rho2");
  return std::clamp(static_cast<double>(uhlmann_fidelity_with_root(matrix_sqrt_psd(rho1), rho2)), 0.0, 1.0);
}

double bures_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2) {
  const double f = uhlmann_fidelity(rho1, rho2);
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(f)));
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "commutator lhs");
  require_same_shape(a, b, "commutator");
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "anticommutator lhs");
  require_same_shape(a, b, "anticommutator");
  return a * b + b * a;
}

SymmetricEig symmetric_eig(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NonSquare, "symmetric_eig input");
  if (m.rows() == 0) return {};
  using ExtendedMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const ExtendedMatrix wide = m.cast<long double>();
  const ExtendedMatrix sym = 0.5L * (wide + wide.transpose());
  Eigen::SelfAdjointEigenSolver<ExtendedMatrix> solver(sym, Eigen::ComputeEigenvectors);
  return {solver.eigenvalues().cast<double>(), solver.eigenvectors().cast<double>()};
}

}  // namespace phasemetro
