#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phasemetro/cli.hpp"
#include "phasemetro/crb.hpp"
#include "phasemetro/errors.hpp"
#include "phasemetro/qfim.hpp"
#include "phasemetro/sld.hpp"
#include "phasemetro/states.hpp"

#ifndef PHASEMETRO_VERSION
#define PHASEMETRO_VERSION "0.0.0"
#endif

namespace phasemetro::cli {
namespace {

constexpr double kLudersDerivativeStep = 1e-6;

// Density matrix, its phase derivatives and the phase-family builder for one
// problem.
struct Evaluation {
  ComplexMatrix rho;
  std::vector<ComplexMatrix> drho;
  std::optional<WhiteNoiseState> white;
  std::optional<LudersState> luders;
  StateBuilder builder;
  std::vector<double> point;
};

Evaluation evaluate(const ProblemSpec& spec) {
  Evaluation ev;
  const PhaseModel model = spec.model();
  if (spec.luders) {
    ev.luders = build_luders_state(spec.luders->basis, spec.eta);
    ev.rho = ev.luders->rho();
    ev.builder = luders_builder(*ev.luders);
    ev.point.assign(static_cast<std::size_t>(spec.d - 1), 0.0);
    ev.drho = finite_difference_derivatives(ev.builder, ev.point, kLudersDerivativeStep);
    for (ComplexMatrix& m : ev.drho) m = 0.5 * (m + m.adjoint());
  } else {
    ev.white = build_white_noise_state(model, spec.eta);
    ev.rho = ev.white->rho();
    ev.drho = white_noise_derivatives(*ev.white);
    ev.builder = white_noise_builder(model, spec.eta);
    ev.point = spec.phases;
  }
  return ev;
}

std::string resolve_method(const ProblemSpec& spec, const CommandOptions& options) {
  std::string method = !options.method.empty() ? options.method : spec.method.value_or("");
  if (method.empty()) method = spec.is_luders() ? "spectral" : "closed";
  static const std::vector<std::string> allowed{"closed", "sld", "spectral", "fidelity", "all"};
  if (std::find(allowed.begin(), allowed.end(), method) == allowed.end()) {
    throw Error(ErrorCode::SchemaError, "unknown method \"" + method + "\" (closed|sld|spectral|fidelity|all)");
  }
  if (method == "closed" && spec.is_luders()) {
    throw Error(ErrorCode::SchemaError, "no closed-form QFIM exists for Lueders states");
  }
  return method;
}

QFIM compute_qfim(const Evaluation& ev, QfimMethod method, const CommandOptions& options) {
  switch (method) {
    case QfimMethod::ClosedForm: return qfim_closed_form(*ev.white);
    case QfimMethod::FromSlds: return qfim_from_slds(ev.rho, sld_eigenbasis(ev.rho, ev.drho));
    case QfimMethod::Spectral: return qfim_spectral(ev.rho, ev.drho);
    case QfimMethod::FidelityFd: return qfim_fidelity_fd(ev.builder, ev.point, options.step);
    case QfimMethod::Pure: return qfim_pure(ev.white->model());
  }
  throw Error(ErrorCode::SchemaError, "unsupported method");
}

std::vector<QfimMethod> methods_for(const std::string& method, bool luders) {
  if (method == "closed") return {QfimMethod::ClosedForm};
  if (method == "sld") return {QfimMethod::FromSlds};
  if (method == "spectral") return {QfimMethod::Spectral};
  if (method == "fidelity") return {QfimMethod::FidelityFd};
  if (luders) return {QfimMethod::FromSlds, QfimMethod::Spectral, QfimMethod::FidelityFd};
  return {QfimMethod::ClosedForm, QfimMethod::FromSlds, QfimMethod::Spectral, QfimMethod::FidelityFd};
}

double symmetric_deviation(const RealMatrix& a, const RealMatrix& b) {
  const double num = (a - b).norm();
  if (num == 0.0) return 0.0;
  return num / std::max({a.norm(), b.norm(), std::numeric_limits<double>::min()});
}

std::string dump(const Json& j, const CommandOptions& options) {
  return (options.pretty ? j.dump(2) : j.dump()) + "\n";
}

Json base_envelope(const char* command, const ProblemSpec& spec) {
  Json env;
  env["tool"] = "phasemetro";
  env["version"] = PHASEMETRO_VERSION;
  env["command"] = command;
  env["problem"] = problem_to_json(spec);
  env["warnings"] = spec.warnings;
  return env;
}

Json state_json(const Evaluation& ev) {
  Json j;
  if (ev.white) {
    const WhiteNoiseState& s = *ev.white;
    j["kind"] = "white_noise";
    j["alpha"] = number_to_json(s.alpha());
    j["beta"] = number_to_json(s.beta());
    j["sld_coefficient"] = sld_coefficient(s.eta(), s.dimension());
    j["xi"] = ratio_xi(s.eta(), s.dimension());
  } else {
    j["kind"] = "luders";
    j["r"] = ev.luders->rank();
  }
  return j;
}

// The bound is always taken from the reference QFIM: closed form for
// white-noise states, spectral otherwise.
struct BoundInputs {
  SLDSet slds;
  RealMatrix fisher;
};

BoundInputs bound_inputs(const Evaluation& ev) {
  if (ev.white) return {sld_closed_form(*ev.white), qfim_closed_form(*ev.white).entries};
  return {sld_eigenbasis(ev.rho, ev.drho), qfim_spectral(ev.rho, ev.drho).entries};
}

Json crb_json(const CRBReport& report, bool phase_independent) {
  Json j;
  j["attainable"] = report.attainable;
  j["max_im_residual"] = report.max_im_residual;
  j["qfim_eigenvalues"] = vector_to_json(report.qfim_eigenvalues);
  j["rotation"] = matrix_to_json(report.rotation);
  j["min_total_variance"] = number_to_json(report.min_total_variance);
  j["measurement_count"] = report.measurement_count;
  Json dirs = Json::array();
  for (const RealVector& v : report.singular_directions) dirs.push_back(vector_to_json(v));
  j["singular_directions"] = std::move(dirs);
  j["rotation_phase_independent"] = phase_independent;
  return j;
}

template <typename Fn>
CommandResult guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return {"", kExitInputError, {e.what()}};
  }
}

}  // namespace

CommandResult cmd_qfim(const ProblemSpec& spec, const CommandOptions& options) {
  return guarded([&] {
    const std::string method = resolve_method(spec, options);
    const Evaluation ev = evaluate(spec);
    Json env = base_envelope("qfim", spec);
    env["state"] = state_json(ev);

    std::vector<QFIM> results;
    for (QfimMethod m : methods_for(method, spec.is_luders())) results.push_back(compute_qfim(ev, m, options));
    Json q;
    for (const QFIM& f : results) q[to_string(f.method)] = matrix_to_json(f.entries);
    env["qfim"] = std::move(q);
    if (results.size() > 1) {
      double worst = 0.0;
      for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b)
          worst = std::max(worst, symmetric_deviation(results[a].entries, results[b].entries));
      env["max_deviation"] = worst;
    }

    const BoundInputs in = bound_inputs(ev);
    const CRBReport report = crb_report(ev.rho, in.slds, in.fisher, spec.phases, spec.measurements);
    env["crb"] = crb_json(report, !spec.is_luders());

    CommandResult result{dump(env, options), kExitSuccess, {}};
    if (!std::isfinite(report.min_total_variance) && !options.allow_singular) {
      result.exit_code = kExitSingular;
      result.diagnostics.push_back("QFIM is singular: total variance bound is infinite (use --allow-singular)");
    }
    return result;
  });
}

CommandResult cmd_estimators(const ProblemSpec& spec, const CommandOptions& options) {
  return guarded([&] {
    const Evaluation ev = evaluate(spec);
    const BoundInputs in = bound_inputs(ev);
    const CRBReport report = crb_report(ev.rho, in.slds, in.fisher, spec.phases, spec.measurements);
    Json env = base_envelope("estimators", spec);
    env["state"] = state_json(ev);
    env["crb"] = crb_json(report, !spec.is_luders());
    if (report.estimators.empty()) {
      env["estimators"] = nullptr;
      return CommandResult{dump(env, options), kExitSingular,
                           {"singular information: optimal estimators do not exist for unidentifiable directions"}};
    }
    Json est;
    est["lambda_point"] = vector_to_json(report.lambda_point);
    Json ops = Json::array();
    for (const ComplexMatrix& o : report.estimators) ops.push_back(complex_matrix_to_json(o));
    est["operators"] = std::move(ops);
    est["covariance"] = matrix_to_json(report.estimator_covariance);
    env["estimators"] = std::move(est);
    return CommandResult{dump(env, options), kExitSuccess, {}};
  });
}

namespace {

struct Check {
  std::string name;
  enum class Status { Pass, Fail, Skipped } status;
  double residual;
  double tolerance;
  std::string reason;
};

class Checklist {
 public:
  void record(std::string name, double residual, double tolerance) {
    const bool ok = std::isfinite(residual) && residual <= tolerance;
    checks_.push_back({std::move(name), ok ? Check::Status::Pass : Check::Status::Fail, residual, tolerance, ""});
  }
  void skip(std::string name, std::string reason) {
    checks_.push_back({std::move(name), Check::Status::Skipped, 0.0, 0.0, std::move(reason)});
  }
  bool all_passed() const {
    return std::none_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.status == Check::Status::Fail; });
  }
  Json to_json() const {
    Json out = Json::array();
    for (const Check& c : checks_) {
      Json j;
      j["name"] = c.name;
      switch (c.status) {
        case Check::Status::Pass: j["status"] = "pass"; break;
        case Check::Status::Fail: j["status"] = "fail"; break;
        case Check::Status::Skipped: j["status"] = "skipped"; break;
      }
      if (c.status == Check::Status::Skipped) {
        j["reason"] = c.reason;
      } else {
        j["residual"] = number_to_json(c.residual);
        j["tolerance"] = c.tolerance;
      }
      out.push_back(std::move(j));
    }
    return out;
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const Check& c : checks_)
      if (c.status == Check::Status::Fail) out.push_back("check failed: " + c.name + " (residual " + format_number(c.residual) + ")");
    return out;
  }

 private:
  std::vector<Check> checks_;
};

void check_slds(Checklist& list, const Evaluation& ev, const SLDSet& slds, double residual_tol) {
  const std::string tag = to_string(slds.method);
  double residual = 0.0, hermitian = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < slds.operators.size(); ++k) {
    const ComplexMatrix& l = slds.operators[k];
    residual = std::max(residual, verify_sld(ev.rho, ev.drho[k], l));
    hermitian = std::max(hermitian, hermiticity_defect(l) / std::max(1.0, l.norm()));
    mean = std::max(mean, std::abs((ev.rho * l).trace()));
  }
  list.record("sld_equation:" + tag, residual, residual_tol);
  list.record("sld_hermitian:" + tag, hermitian, 1e-10);
  list.record("sld_zero_mean:" + tag, mean, 1e-10);
}

}  // namespace

CommandResult cmd_verify(const ProblemSpec& spec, const CommandOptions& options) {
  return guarded([&] {
    const std::string method = options.method.empty() ? spec.method.value_or("all_but_series") : options.method;
    const bool with_series = method == "series" || method == "all";
    const Evaluation ev = evaluate(spec);
    Checklist list;

    // SLD routes.
    const SLDSet eigen = sld_eigenbasis(ev.rho, ev.drho);
    if (ev.white) check_slds(list, ev, sld_closed_form(*ev.white), 1e-10);
    check_slds(list, ev, eigen, 1e-10);
    if (with_series) {
      if (!ev.white) {
        list.skip("sld_equation:series", "series route applies to white-noise states only");
      } else {
        try {
          check_slds(list, ev, sld_series(*ev.white, generating_coefficients(options.series_terms)), 1e-8);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::AlphaOutOfConvergenceDomain) {
            list.skip("sld_equation:series", "alpha out of convergence domain");
          } else if (e.code() == ErrorCode::EtaEndpoint) {
            list.skip("sld_equation:series", "eta at an endpoint");
          } else {
            throw;
          }
        }
      }
    }

    // Operator algebra of the pure-state projector.
    if (ev.white) {
      const PhaseModel& model = ev.white->model();
      const ComplexMatrix& p = ev.white->projector();
      double nested = 0.0, relations = 0.0;
      for (int k = 1; k < model.dimension(); ++k) {
        const ComplexMatrix a = derivative_operator_A(model, k);
        const ComplexMatrix dp = projector_derivative(model, k);
        const Complex ick2(0.0, model.amplitude(k) * model.amplitude(k));
        nested = std::max(nested, (commutator(p, commutator(p, dp)) - dp).norm());
        relations = std::max(relations, (commutator(p, a) - (ick2 * p - a)).norm());
        relations = std::max(relations, (commutator(p, a.adjoint()) - (ick2 * p + a.adjoint())).norm());
      }
      list.record("nested_commutator", nested, 1e-12);
      list.record("commutation_relations", relations, 1e-12);
    }

    // QFIM cross-method agreement against the reference matrix.
    const BoundInputs in = bound_inputs(ev);
    const RealMatrix& reference = in.fisher;
    if (ev.white) list.record("qfim_from_slds_vs_closed", relative_frobenius(qfim_from_slds(ev.rho, eigen).entries, reference), 1e-9);
    if (ev.white) list.record("qfim_spectral_vs_closed", relative_frobenius(qfim_spectral(ev.rho, ev.drho).entries, reference), 1e-9);
    if (!ev.white) list.record("qfim_from_slds_vs_spectral", relative_frobenius(qfim_from_slds(ev.rho, eigen).entries, reference), 1e-9);
    list.record(ev.white ? "qfim_fidelity_vs_closed" : "qfim_fidelity_vs_spectral",
                relative_frobenius(qfim_fidelity_fd(ev.builder, ev.point, options.step).entries, reference), 1e-4);

    if (ev.white) {
      const RealMatrix pure = qfim_pure(ev.white->model()).entries;
      const double xi = ratio_xi(ev.white->eta(), ev.white->dimension());
      list.record("proportionality_xi", (reference - xi * pure).norm() / std::max(1.0, reference.norm()), 1e-12);
      list.record("monotonicity", std::max(0.0, -monotonicity_gap(*ev.white)), 1e-10);
    }

    // Cramer-Rao chain.
    const CRBReport report = crb_report(ev.rho, in.slds, reference, spec.phases, spec.measurements);
    if (ev.white) {
      list.record("weak_commutativity", report.max_im_residual, 1e-12);
    } else {
      list.skip("weak_commutativity", "not guaranteed for Lueders states (residual " +
                                          format_number(report.max_im_residual) + ")");
    }
    if (report.estimators.empty()) {
      list.skip("estimator_covariance", "singular information");
      list.skip("qcrb_saturation", "singular information");
    } else {
      const RealMatrix& cov = report.estimator_covariance;
      double off = 0.0, diag = 0.0;
      for (Eigen::Index j = 0; j < cov.rows(); ++j) {
        const double expected = 1.0 / report.qfim_eigenvalues(j);
        diag = std::max(diag, std::abs(cov(j, j) - expected) / std::max(1.0, expected));
        for (Eigen::Index k = 0; k < cov.cols(); ++k)
          if (j != k) off = std::max(off, std::abs(cov(j, k)) / std::max(1.0, std::sqrt(std::abs(cov(j, j) * cov(k, k)))));
      }
      list.record("estimator_covariance_diagonal", diag, 1e-9);
      list.record("estimator_covariance_offdiagonal", off, 1e-9);
      const double total = cov.trace() / spec.measurements;
      list.record("qcrb_saturation",
                  std::abs(total - report.min_total_variance) / std::max(1.0, report.min_total_variance), 1e-9);
    }

    // Expectations recorded in a result envelope.
    for (const auto& [name, recorded] : spec.recorded_qfim) {
      std::optional<QfimMethod> m;
      for (QfimMethod cand : {QfimMethod::ClosedForm, QfimMethod::FromSlds, QfimMethod::Spectral,
                              QfimMethod::FidelityFd, QfimMethod::Pure})
        if (name == to_string(cand)) m = cand;
      if (!m) throw Error(ErrorCode::SchemaError, "unknown recorded QFIM method \"" + name + "\"");
      if (!ev.white && (*m == QfimMethod::ClosedForm || *m == QfimMethod::Pure)) {
        throw Error(ErrorCode::SchemaError, "recorded closed-form QFIM on a Lueders problem");
      }
      const RealMatrix now = compute_qfim(ev, *m, options).entries;
      const double dev = recorded.rows() == now.rows() && recorded.cols() == now.cols()
                             ? symmetric_deviation(recorded, now)
                             : std::numeric_limits<double>::infinity();
      list.record("recorded_qfim:" + name, dev, 1e-9);
    }
    if (spec.recorded_min_total_variance) {
      const double rec = *spec.recorded_min_total_variance;
      const double now = report.min_total_variance;
      const double dev = std::isinf(rec) || std::isinf(now) ? (rec == now ? 0.0 : std::numeric_limits<double>::infinity())
                                                             : std::abs(rec - now) / std::max(1.0, std::abs(now));
      list.record("recorded_min_total_variance", dev, 1e-9);
    }

    Json env = base_envelope("verify", spec);
    env["checks"] = list.to_json();
    env["all_passed"] = list.all_passed();
    return CommandResult{dump(env, options), list.all_passed() ? kExitSuccess : kExitVerificationFailed,
                         list.failures()};
  });
}

CommandResult cmd_scan(const ProblemSpec& spec, const ScanOptions& scan, const CommandOptions& options) {
  return guarded([&] {
    (void)options;
    if (scan.parameter != "eta") throw Error(ErrorCode::RangeError, "only --parameter eta can be scanned");
    if (!(scan.from >= 0.0 && scan.from < scan.to && scan.to <= 1.0)) {
      throw Error(ErrorCode::RangeError, "scan range must satisfy 0 <= from < to <= 1");
    }
    if (scan.steps < 2) throw Error(ErrorCode::RangeError, "scan needs at least 2 steps");
    if (spec.is_luders()) throw Error(ErrorCode::SchemaError, "scan supports white-noise problems only");

    const PhaseModel model = spec.model();
    const int n = spec.d - 1;
    std::ostringstream out;
    out << "eta,xi";
    for (int j = 1; j <= n; ++j)
      for (int k = 1; k <= n; ++k) out << ",F_" << j << k;
    out << ",min_total_variance\n";
    for (int i = 0; i < scan.steps; ++i) {
      const double eta = i + 1 == scan.steps ? scan.to
                                              : scan.from + (scan.to - scan.from) * i / (scan.steps - 1);
      const WhiteNoiseState state = build_white_noise_state(model, eta);
      const RealMatrix f = qfim_closed_form(state).entries;
      out << format_number(eta) << ',' << format_number(ratio_xi(eta, spec.d));
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out << ',' << format_number(f(j, k));
      out << ',' << format_number(min_total_variance(f, spec.measurements).value) << '\n';
    }
    return CommandResult{out.str(), kExitSuccess, {}};
  });
}

CommandResult cmd_selftest(int count, const CommandOptions& options) {
  return guarded([&] {
    if (count < 1) throw Error(ErrorCode::RangeError, "selftest count must be >= 1");
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> dim(2, 8);
    std::uniform_real_distribution<double> eta_dist(0.05, 0.95);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double exact = 0.0, fidelity = 0.0;
    for (int i = 0; i < count; ++i) {
      const int d = dim(rng);
      std::vector<double> amps(static_cast<std::size_t>(d)), phases(static_cast<std::size_t>(d - 1));
      for (double& a : amps) a = gauss(rng);
      for (double& p : phases) p = phase_dist(rng);
      const PhaseModel model(amps, phases, Normalization::Rescale);
      const WhiteNoiseState state(model, eta_dist(rng));
      const std::vector<ComplexMatrix> drho = white_noise_derivatives(state);
      const RealMatrix closed = qfim_closed_form(state).entries;
      exact = std::max(exact, relative_frobenius(qfim_from_slds(state.rho(), sld_eigenbasis(state.rho(), drho)).entries, closed));
      exact = std::max(exact, relative_frobenius(qfim_spectral(state.rho(), drho).entries, closed));
      fidelity = std::max(fidelity, relative_frobenius(
                                        qfim_fidelity_fd(white_noise_builder(model, state.eta()), phases, options.step).entries,
                                        closed));
    }
    const bool passed = exact <= 1e-9 && fidelity <= 1e-4;
    Json env;
    env["tool"] = "phasemetro";
    env["version"] = PHASEMETRO_VERSION;
    env["command"] = "selftest";
    env["seed"] = options.seed;
    env["count"] = count;
    env["max_deviation_exact"] = exact;
    env["max_deviation_fidelity"] = fidelity;
    env["all_passed"] = passed;
    return CommandResult{dump(env, options), passed ? kExitSuccess : kExitVerificationFailed, {}};
  });
}

}  // namespace phasemetro::cli
