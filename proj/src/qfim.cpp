#include "phasemetro/qfim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "phasemetro/errors.hpp"

namespace phasemetro {
namespace {

RealMatrix symmetrized(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

const char* to_string(QfimMethod method) {
  switch (method) {
    case QfimMethod::ClosedForm: return "closed_form";
    case QfimMethod::FromSlds: return "from_slds";
    case QfimMethod::Spectral: return "spectral";
    case QfimMethod::FidelityFd: return "fidelity_fd";
    case QfimMethod::Pure: return "pure";
  }
  return "unknown";
}

QFIM qfim_from_slds(const ComplexMatrix& rho, const SLDSet& slds) {
  require_square(rho, "rho");
  for (const ComplexMatrix& l : slds.operators) require_same_shape(rho, l, "SLD vs rho");
  const int n = slds.size();
  std::vector<ComplexMatrix> rho_l;
  rho_l.reserve(slds.operators.size());
  for (const ComplexMatrix& l : slds.operators) rho_l.push_back(rho * l);
  RealMatrix f(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      // Tr(rho L_j L_k) = sum_ab (rho L_j)_ab (L_k)_ba
      const double v = (rho_l[j].cwiseProduct(slds.operators[k].transpose())).sum().real();
      f(j, k) = v;
      f(k, j) = v;
    }
  }
  return {QfimMethod::FromSlds, f};
}

double qfim_prefactor(double eta, int d) { return 4.0 * d * eta * eta / (2.0 + (d - 2) * eta); }

QFIM qfim_closed_form(const WhiteNoiseState& state) {
  const int n = state.model().parameter_count();
  const double pre = qfim_prefactor(state.eta(), state.dimension());
  RealMatrix f(n, n);
  for (int j = 0; j < n; ++j) {
    const double cj2 = std::pow(state.model().amplitude(j + 1), 2);
    for (int k = 0; k < n; ++k) {
      const double ck2 = std::pow(state.model().amplitude(k + 1), 2);
      f(j, k) = pre * ((j == k ? cj2 : 0.0) - cj2 * ck2);
    }
  }
  return {QfimMethod::ClosedForm, f};
}

QFIM qfim_pure(const PhaseModel& model) {
  const ComplexVector psi = build_pure_state(model);
  const int d = model.dimension();
  const int n = d - 1;
  std::vector<ComplexVector> dpsi;
  dpsi.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k < d; ++k) {
    ComplexVector v = ComplexVector::Zero(d);
    v(k) = Complex(0.0, 1.0) * psi(k);
    dpsi.push_back(std::move(v));
  }
  RealMatrix f(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const Complex overlap = dpsi[j].dot(dpsi[k]) - dpsi[j].dot(psi) * psi.dot(dpsi[k]);
      f(j, k) = 4.0 * overlap.real();
    }
  }
  return {QfimMethod::Pure, symmetrized(f)};
}

QFIM qfim_spectral(const ComplexMatrix& rho, std::span<const ComplexMatrix> drho,
                   std::optional<double> support_tol) {
  require_density_matrix(rho, "rho");
  const HermitianEig eig = hermitian_eig(rho);
  const double tol = support_tol.value_or(1e-12 * std::max(0.0, eig.eigenvalues.maxCoeff()));
  const Eigen::Index d = rho.rows();

  // Inverse pair weights 2/(lambda_m + lambda_n) on the support, zero elsewhere.
  RealMatrix weight = RealMatrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index k = 0; k < d; ++k) {
      const double denom = eig.eigenvalues(m) + eig.eigenvalues(k);
      if (denom > tol) weight(m, k) = 2.0 / denom;
    }

  std::vector<ComplexMatrix> local;
  local.reserve(drho.size());
  for (const ComplexMatrix& dr : drho) {
    require_same_shape(rho, dr, "derivative vs rho");
    require_hermitian(dr, "derivative of rho");
    ComplexMatrix l = eig.eigenvectors.adjoint() * dr * eig.eigenvectors;
    double off_support = 0.0;
    for (Eigen::Index m = 0; m < d; ++m)
      for (Eigen::Index k = 0; k < d; ++k)
        if (weight(m, k) == 0.0) off_support += std::norm(l(m, k));
    if (std::sqrt(off_support) > 1e-8 * std::max(1.0, dr.norm())) {
      throw Error(ErrorCode::SupportViolation,
                  "derivative has weight " + std::to_string(std::sqrt(off_support)) + " outside the support of rho");
    }
    local.push_back(std::move(l));
  }

  const auto n = static_cast<Eigen::Index>(drho.size());
  RealMatrix f(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      // (d_a)_mn (d_b)_nm = (d_a)_mn conj((d_b)_mn) for Hermitian d_b
      const double v =
          (local[a].cwiseProduct(local[b].conjugate()).real().cwiseProduct(weight)).sum();
      f(a, b) = v;
      f(b, a) = v;
    }
  }
  return {QfimMethod::Spectral, f};
}

QFIM qfim_fidelity_fd(const StateBuilder& builder, std::span<const double> point, double step) {
  if (!(step >= 1e-4 && step <= 1e-1)) {
    throw Error(ErrorCode::StepOutOfRange, "fidelity step must lie in [1e-4, 1e-1], got " + std::to_string(step));
  }
  const ComplexMatrix rho0 = builder(point);
  require_density_matrix(rho0, "state at the evaluation point");
  const ComplexMatrix root = matrix_sqrt_psd(rho0);
  const auto n = static_cast<Eigen::Index>(point.size());

  std::vector<double> shifted(point.begin(), point.end());
  auto fidelity_at = [&](Eigen::Index j, double uj, Eigen::Index k, double uk) {
    shifted[j] += uj;
    if (k >= 0) shifted[k] += uk;
    const long double f = uhlmann_fidelity_with_root(root, builder(shifted));
    std::copy(point.begin(), point.end(), shifted.begin());
    return f;
  };
  const long double f0 = uhlmann_fidelity_with_root(root, rho0);

  auto hessian = [&](double h) {
    const long double h2 = static_cast<long double>(h) * h;
    RealMatrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const long double second = (fidelity_at(j, h, -1, 0.0) - 2.0L * f0 + fidelity_at(j, -h, -1, 0.0)) / h2;
      out(j, j) = static_cast<double>(-2.0L * second);
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const long double mixed = (fidelity_at(j, h, k, h) - fidelity_at(j, h, k, -h) - fidelity_at(j, -h, k, h) +
                                   fidelity_at(j, -h, k, -h)) /
                                  (4.0L * h2);
        out(j, k) = static_cast<double>(-2.0L * mixed);
        out(k, j) = out(j, k);
      }
    }
    return out;
  };

  const RealMatrix coarse = hessian(step);
  const RealMatrix fine = hessian(0.5 * step);
  RealMatrix result = fine;
  const double scale = std::max(fine.norm(), std::numeric_limits<double>::min());
  if ((coarse - fine).norm() > 1e-4 * scale) result = (4.0 * fine - coarse) / 3.0;
  return {QfimMethod::FidelityFd, symmetrized(result)};
}

double ratio_xi(double eta, int d) { return d * eta * eta / (2.0 + (d - 2) * eta); }

double monotonicity_gap(const WhiteNoiseState& state) {
  const RealMatrix diff =
      state.eta() * qfim_pure(state.model()).entries - qfim_closed_form(state).entries;
  if (diff.size() == 0) return 0.0;
  return symmetric_eig(diff).eigenvalues(0);
}

double relative_frobenius(const RealMatrix& a, const RealMatrix& reference) {
  const double num = (a - reference).norm();
  const double den = reference.norm();
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace phasemetro
