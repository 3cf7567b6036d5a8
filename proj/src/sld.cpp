#include "phasemetro/sld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "phasemetro/errors.hpp"

namespace phasemetro {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::vector<cpp_rational> exact_bernoulli(int n_max) {
  std::vector<cpp_rational> b(static_cast<std::size_t>(n_max) + 1);
  b[0] = 1;
  // binom holds C(n+1, k) for the current n.
  std::vector<cpp_int> binom{1, 1};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<cpp_int> next(static_cast<std::size_t>(n) + 2);
    next.front() = 1;
    next.back() = 1;
    for (int k = 1; k <= n; ++k) next[k] = binom[k - 1] + binom[k];
    binom = std::move(next);
    cpp_rational acc = 0;
    for (int k = 0; k < n; ++k) acc += cpp_rational(binom[k]) * b[k];
    b[n] = -acc / cpp_rational(binom[n]);
  }
  return b;
}

cpp_int factorial(int n) {
  cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require_drho_shapes(const ComplexMatrix& rho, std::span<const ComplexMatrix> drho) {
  for (const ComplexMatrix& m : drho) {
    require_same_shape(rho, m, "derivative vs rho");
    require_hermitian(m, "derivative of rho");
  }
}

}  // namespace

const char* to_string(SldMethod method) {
  switch (method) {
    case SldMethod::ClosedForm: return "closed_form";
    case SldMethod::Eigenbasis: return "eigenbasis";
    case SldMethod::Series: return "series";
  }
  return "unknown";
}

std::vector<double> bernoulli_numbers(int n_max) {
  if (n_max < 0) throw Error(ErrorCode::RangeError, "bernoulli_numbers needs n_max >= 0");
  if (n_max > kMaxBernoulliIndex) {
    throw Error(ErrorCode::NMaxTooLarge, "bernoulli_numbers supports 0 <= n_max <= " +
                                             std::to_string(kMaxBernoulliIndex));
  }
  const std::vector<cpp_rational> exact = exact_bernoulli(n_max);
  std::vector<double> out;
  out.reserve(exact.size());
  for (const cpp_rational& v : exact) out.push_back(static_cast<double>(v));
  return out;
}

SeriesSpec generating_coefficients(int n_terms) {
  if (n_terms < 1) throw Error(ErrorCode::RangeError, "generating_coefficients needs at least one term");
  if (n_terms > kMaxSeriesTerms) {
    throw Error(ErrorCode::NMaxTooLarge, "generating_coefficients supports 1..." +
                                             std::to_string(kMaxSeriesTerms) + " terms");
  }
  const std::vector<cpp_rational> b = exact_bernoulli(2 * n_terms);
  SeriesSpec spec;
  spec.even_coefficients.reserve(static_cast<std::size_t>(n_terms));
  for (int n = 0; n < n_terms; ++n) {
    const cpp_int four_pow = cpp_int(1) << (2 * (n + 1));
    const cpp_rational f = cpp_rational(4 * (four_pow - 1)) * b[2 * n + 2] / cpp_rational(factorial(2 * n + 2));
    spec.even_coefficients.push_back(static_cast<double>(f));
  }
  return spec;
}

double sld_coefficient(double eta, int d) { return 2.0 * d * eta / (2.0 + (d - 2) * eta); }

SLDSet sld_closed_form(const WhiteNoiseState& state) {
  const double coeff = sld_coefficient(state.eta(), state.dimension());
  SLDSet set{SldMethod::ClosedForm, {}, ParameterPoint{state.model(), state.eta()}};
  for (int k = 1; k < state.dimension(); ++k) set.operators.push_back(coeff * projector_derivative(state.model(), k));
  return set;
}

double default_support_tol(const ComplexMatrix& rho) {
  const HermitianEig eig = hermitian_eig(rho);
  return 1e-12 * std::max(0.0, eig.eigenvalues.maxCoeff());
}

SLDSet sld_eigenbasis(const ComplexMatrix& rho, std::span<const ComplexMatrix> drho,
                      std::optional<double> support_tol) {
  require_density_matrix(rho, "rho");
  require_drho_shapes(rho, drho);
  const HermitianEig eig = hermitian_eig(rho);
  const double tol = support_tol.value_or(1e-12 * std::max(0.0, eig.eigenvalues.maxCoeff()));
  const ComplexMatrix& v = eig.eigenvectors;
  const Eigen::Index d = rho.rows();

  SLDSet set{SldMethod::Eigenbasis, {}, std::nullopt};
  set.operators.reserve(drho.size());
  for (const ComplexMatrix& dr : drho) {
    const ComplexMatrix local = v.adjoint() * dr * v;
    ComplexMatrix l = ComplexMatrix::Zero(d, d);
    double off_support = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index n = 0; n < d; ++n) {
        const double denom = eig.eigenvalues(m) + eig.eigenvalues(n);
        if (denom > tol) {
          l(m, n) = 2.0 * local(m, n) / denom;
        } else {
          off_support += std::norm(local(m, n));
        }
      }
    }
    if (std::sqrt(off_support) > 1e-8 * std::max(1.0, dr.norm())) {
      throw Error(ErrorCode::SupportViolation,
                  "derivative has weight " + std::to_string(std::sqrt(off_support)) + " outside the support of rho");
    }
    const ComplexMatrix sld = v * l * v.adjoint();
    set.operators.push_back(0.5 * (sld + sld.adjoint()));
  }
  return set;
}

SLDSet sld_series(const WhiteNoiseState& state, const SeriesSpec& spec) {
  const double limit = std::numbers::pi - kSeriesAlphaMargin;
  if (!(state.alpha() < limit)) {
    throw Error(ErrorCode::AlphaOutOfConvergenceDomain,
                "alpha = " + std::to_string(state.alpha()) + " is outside the convergence domain alpha < pi - 0.1");
  }
  if (state.eta() <= 0.0 || state.eta() >= 1.0) {
    throw Error(ErrorCode::EtaEndpoint, "series route needs eta in (0, 1)");
  }
  const ComplexMatrix g = state.exponent();
  SLDSet set{SldMethod::Series, {}, ParameterPoint{state.model(), state.eta()}};
  for (int k = 1; k < state.dimension(); ++k) {
    ComplexMatrix term = state.alpha() * projector_derivative(state.model(), k);  // G-dot
    ComplexMatrix sum = ComplexMatrix::Zero(term.rows(), term.cols());
    for (int n = 0; n < spec.terms(); ++n) {
      sum += spec.even_coefficients[static_cast<std::size_t>(n)] * term;
      if (n + 1 < spec.terms()) term = commutator(g, commutator(g, term));
    }
    set.operators.push_back(std::move(sum));
  }
  return set;
}

double verify_sld(const ComplexMatrix& rho, const ComplexMatrix& drho, const ComplexMatrix& sld) {
  require_square(rho, "rho");
  require_same_shape(rho, drho, "verify_sld derivative");
  require_same_shape(rho, sld, "verify_sld operator");
  const ComplexMatrix residual = drho - 0.5 * (rho * sld + sld * rho);
  return residual.norm() / std::max(1.0, drho.norm());
}

}  // namespace phasemetro
