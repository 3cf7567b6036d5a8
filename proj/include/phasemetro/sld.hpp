#pragma once

// Symmetric logarithmic derivatives L_k solving
//   d_k rho = (rho L_k + L_k rho) / 2
// for the white-noise family, by closed form, by a generic eigenbasis solve
// and by the nested-commutator series L = sum_n f_n G^{x n}(dG).

#include <optional>
#include <span>
#include <vector>

#include "phasemetro/linalg.hpp"
#include "phasemetro/states.hpp"

namespace phasemetro {

enum class SldMethod { ClosedForm, Eigenbasis, Series };

const char* to_string(SldMethod method);

struct ParameterPoint {
  PhaseModel model;
  double eta;
};

struct SLDSet {
  SldMethod method;
  std::vector<ComplexMatrix> operators;  // operators[k - 1] is L_k
  std::optional<ParameterPoint> point;   // set for the white-noise routes

  int dimension() const { return operators.empty() ? 0 : static_cast<int>(operators.front().rows()); }
  int size() const { return static_cast<int>(operators.size()); }
};

inline constexpr int kMaxBernoulliIndex = 128;
inline constexpr int kMaxSeriesTerms = 64;
inline constexpr double kSeriesAlphaMargin = 0.1;

/// B_0..B_{n_max} with B_1 = -1/2, evaluated exactly from
/// sum_{k=0}^{n} C(n+1, k) B_k = 0 and rounded once.
std::vector<double> bernoulli_numbers(int n_max);

/// Even-order Taylor coefficients of f(t) = tanh(t/2)/(t/2).
struct SeriesSpec {
  std::vector<double> even_coefficients;  // [n] holds f_{2n}

  int terms() const { return static_cast<int>(even_coefficients.size()); }
};

/// f_{2n} = 4 (4^{n+1} - 1) B_{2n+2} / (2n+2)! for n = 0..n_terms-1.
SeriesSpec generating_coefficients(int n_terms);

/// 2 d eta / (2 + (d - 2) eta); equals 2 tanh(alpha/2) for eta in (0, 1).
double sld_coefficient(double eta, int d);

SLDSet sld_closed_form(const WhiteNoiseState& state);

/// Default support cutoff: 1e-12 times the largest eigenvalue of rho.
double default_support_tol(const ComplexMatrix& rho);

/// Generic solve in the eigenbasis of rho.  Pairs with lambda_m + lambda_n at
/// or below support_tol contribute zero; throws SupportViolation if d rho
/// has weight there.
SLDSet sld_eigenbasis(const ComplexMatrix& rho, std::span<const ComplexMatrix> drho,
                      std::optional<double> support_tol = std::nullopt);

/// Partial sum of the commutator series through spec.terms() even orders,
/// evaluated with literal nested commutators of G = alpha P + beta.
/// Requires eta in (0, 1) and alpha < pi - 0.1.
SLDSet sld_series(const WhiteNoiseState& state, const SeriesSpec& spec);

/// ||d rho - (rho L + L rho)/2||_F / max(1, ||d rho||_F)
double verify_sld(const ComplexMatrix& rho, const ComplexMatrix& drho, const ComplexMatrix& sld);

}  // namespace phasemetro
