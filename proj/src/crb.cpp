#include "phasemetro/crb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phasemetro/errors.hpp"

namespace phasemetro {

Attainability attainability_check(const ComplexMatrix& rho, const SLDSet& slds, double tol) {
  require_square(rho, "rho");
  for (const ComplexMatrix& l : slds.operators) require_same_shape(rho, l, "SLD vs rho");
  const int n = slds.size();
  RealMatrix fisher(n, n);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const ComplexMatrix rho_l = rho * slds.operators[j];
    for (int k = 0; k < n; ++k) {
      const Complex t = (rho_l.cwiseProduct(slds.operators[k].transpose())).sum();
      fisher(j, k) = t.real();
      if (j < k) worst = std::max(worst, std::abs(t.imag()));
    }
  }
  const double residual = worst / std::max(1.0, fisher.norm());
  return {residual <= tol, residual};
}

QfimDiagonalization diagonalize_qfim(const RealMatrix& fisher) {
  SymmetricEig eig = symmetric_eig(fisher);
  RealMatrix q = eig.eigenvectors.transpose();
  for (Eigen::Index row = 0; row < q.rows(); ++row) {
    for (Eigen::Index col = 0; col < q.cols(); ++col) {
      if (std::abs(q(row, col)) > 1e-12) {
        if (q(row, col) < 0.0) q.row(row) *= -1.0;
        break;
      }
    }
  }
  return {q, eig.eigenvalues};
}

double singular_tolerance(const RealVector& eigenvalues) {
  const double top = eigenvalues.size() ? eigenvalues.maxCoeff() : 0.0;
  return top > 0.0 ? 1e-12 * top : 1e-300;
}

TotalVariance min_total_variance(const RealMatrix& fisher, int measurements) {
  if (measurements < 1) throw Error(ErrorCode::RangeError, "measurement count must be >= 1");
  const QfimDiagonalization diag = diagonalize_qfim(fisher);
  const double tol = singular_tolerance(diag.eigenvalues);
  TotalVariance out{0.0, {}};
  for (Eigen::Index mu = 0; mu < diag.eigenvalues.size(); ++mu) {
    if (diag.eigenvalues(mu) <= tol) {
      out.singular_directions.push_back(diag.rotation.row(mu).transpose());
    } else {
      out.value += 1.0 / diag.eigenvalues(mu);
    }
  }
  if (!out.singular_directions.empty()) {
    out.value = std::numeric_limits<double>::infinity();
  } else {
    out.value /= measurements;
  }
  return out;
}

SLDSet rotated_slds(const SLDSet& slds, const RealMatrix& rotation) {
  const int n = slds.size();
  if (rotation.rows() != n || rotation.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "rotation must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const double defect = (rotation * rotation.transpose() - RealMatrix::Identity(n, n)).norm();
  if (defect > 1e-10) throw Error(ErrorCode::NotOrthogonal, "Q Q^T deviates from I by " + std::to_string(defect));
  SLDSet out{slds.method, {}, slds.point};
  for (int i = 0; i < n; ++i) {
    ComplexMatrix acc = ComplexMatrix::Zero(slds.operators[i].rows(), slds.operators[i].cols());
    for (int j = 0; j < n; ++j) acc += rotation(i, j) * slds.operators[j];
    out.operators.push_back(std::move(acc));
  }
  return out;
}

std::vector<ComplexMatrix> optimal_estimators(const ComplexMatrix& rho, const SLDSet& rotated,
                                              std::span<const double> lambda_point,
                                              std::span<const double> fisher_lambda) {
  const auto n = static_cast<std::size_t>(rotated.size());
  if (lambda_point.size() != n || fisher_lambda.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "estimators need one lambda and one F_lambda per SLD");
  }
  RealVector values(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) values(static_cast<Eigen::Index>(k)) = fisher_lambda[k];
  const double tol = singular_tolerance(values);
  const Eigen::Index d = rho.rows();
  std::vector<ComplexMatrix> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(fisher_lambda[k] > tol)) {
      throw Error(ErrorCode::SingularInformation,
                  "F_lambda[" + std::to_string(k) + "] = " + std::to_string(fisher_lambda[k]) + " is singular");
    }
    require_same_shape(rho, rotated.operators[k], "rotated SLD vs rho");
    out.push_back(lambda_point[k] * ComplexMatrix::Identity(d, d) + rotated.operators[k] / fisher_lambda[k]);
  }
  return out;
}

RealMatrix estimator_covariance(const ComplexMatrix& rho, std::span<const ComplexMatrix> estimators,
                                std::span<const double> lambda_point) {
  const auto n = static_cast<Eigen::Index>(estimators.size());
  if (static_cast<Eigen::Index>(lambda_point.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "one lambda per estimator required");
  }
  for (const ComplexMatrix& o : estimators) require_same_shape(rho, o, "estimator vs rho");
  RealMatrix cov(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      const ComplexMatrix sym = 0.5 * anticommutator(estimators[j], estimators[k]);
      const double v = (rho * sym).trace().real() - lambda_point[j] * lambda_point[k];
      cov(j, k) = v;
      cov(k, j) = v;
    }
  }
  return cov;
}

CRBReport crb_report(const ComplexMatrix& rho, const SLDSet& slds, const RealMatrix& fisher,
                     std::span<const double> phases, int measurements) {
  if (static_cast<Eigen::Index>(phases.size()) != fisher.rows() || slds.size() != fisher.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "phases, SLDs and QFIM must agree in size");
  }
  CRBReport report;
  const Attainability att = attainability_check(rho, slds);
  report.attainable = att.attainable;
  report.max_im_residual = att.max_im_residual;

  const QfimDiagonalization diag = diagonalize_qfim(fisher);
  report.qfim_eigenvalues = diag.eigenvalues;
  report.rotation = diag.rotation;
  report.measurement_count = measurements;

  const TotalVariance variance = min_total_variance(fisher, measurements);
  report.min_total_variance = variance.value;
  report.singular_directions = variance.singular_directions;

  const Eigen::Map<const RealVector> phi(phases.data(), static_cast<Eigen::Index>(phases.size()));
  report.lambda_point = diag.rotation * phi;
  if (variance.finite()) {
    const SLDSet rotated = rotated_slds(slds, diag.rotation);
    const std::span<const double> lambda(report.lambda_point.data(), static_cast<std::size_t>(report.lambda_point.size()));
    const std::span<const double> f_lambda(diag.eigenvalues.data(), static_cast<std::size_t>(diag.eigenvalues.size()));
    report.estimators = optimal_estimators(rho, rotated, lambda, f_lambda);
    report.estimator_covariance = estimator_covariance(rho, report.estimators, lambda);
  }
  return report;
}

}  // namespace phasemetro
