#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "phasemetro/cli.hpp"
#include "phasemetro/errors.hpp"

namespace phasemetro::cli {
namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

const Json& member(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing required key \"") + key + "\"");
  return *it;
}

double number_member(const Json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(where + " must be finite");
  return v;
}

std::vector<double> number_array(const Json& j, const std::string& where, std::size_t expected) {
  if (!j.is_array()) schema_error(where + " must be an array");
  if (j.size() != expected) {
    schema_error(where + " must have " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_member(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

LudersInput parse_luders(const Json& j, int d) {
  if (!j.is_object()) schema_error("luders must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "r" && key != "basis") schema_error("unknown key \"luders." + key + "\"");
  const Json& r = member(j, "r");
  if (!r.is_number_integer()) schema_error("luders.r must be an integer");
  const int rank = r.get<int>();
  if (rank < 1 || rank > d) schema_error("luders.r must satisfy 1 <= r <= d");
  const Json& basis = member(j, "basis");
  if (!basis.is_array() || basis.size() != static_cast<std::size_t>(rank)) {
    schema_error("luders.basis must be an array of r vectors");
  }
  LudersInput out{rank, {}};
  for (std::size_t v = 0; v < basis.size(); ++v) {
    const std::string where = "luders.basis[" + std::to_string(v) + "]";
    if (!basis[v].is_array() || basis[v].size() != static_cast<std::size_t>(d)) {
      schema_error(where + " must have d entries");
    }
    ComplexVector vec(d);
    for (int i = 0; i < d; ++i) {
      const std::vector<double> pair = number_array(basis[v][static_cast<std::size_t>(i)],
                                                    where + "[" + std::to_string(i) + "]", 2);
      vec(i) = Complex(pair[0], pair[1]);
    }
    out.basis.push_back(std::move(vec));
  }
  return out;
}

void parse_recorded(const Json& envelope, ProblemSpec& spec) {
  if (const auto q = envelope.find("qfim"); q != envelope.end() && q->is_object()) {
    for (const auto& [name, value] : q->items()) spec.recorded_qfim.emplace(name, matrix_from_json(value));
  }
  if (const auto crb = envelope.find("crb"); crb != envelope.end() && crb->is_object()) {
    if (const auto v = crb->find("min_total_variance"); v != crb->end()) {
      spec.recorded_min_total_variance = number_from_json(*v);
    }
  }
}

}  // namespace

PhaseModel ProblemSpec::model() const { return PhaseModel(amplitudes, phases, Normalization::Strict); }

ProblemSpec parse_problem(std::string_view text, const ParseOptions& options) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
  return parse_problem_document(doc, options);
}

ProblemSpec parse_problem_document(const Json& document, const ParseOptions& options) {
  if (!document.is_object()) schema_error("problem document must be a JSON object");
  if (document.contains("problem")) {
    ProblemSpec spec = parse_problem_document(document.at("problem"), options);
    parse_recorded(document, spec);
    return spec;
  }

  static const std::set<std::string> known{"d", "eta", "amplitudes", "phases", "luders", "M", "method"};
  for (const auto& [key, _] : document.items())
    if (!known.contains(key)) schema_error("unknown key \"" + key + "\"");

  ProblemSpec spec;
  const Json& d = member(document, "d");
  if (!d.is_number_integer()) schema_error("d must be an integer");
  spec.d = d.get<int>();
  if (spec.d < 2) schema_error("d must be >= 2");

  spec.eta = number_member(member(document, "eta"), "eta");
  if (spec.eta < 0.0 || spec.eta > 1.0) {
    throw Error(ErrorCode::EtaOutOfRange, "eta must lie in [0, 1], got " + std::to_string(spec.eta));
  }
  spec.amplitudes = number_array(member(document, "amplitudes"), "amplitudes", static_cast<std::size_t>(spec.d));
  spec.phases = number_array(member(document, "phases"), "phases", static_cast<std::size_t>(spec.d - 1));

  if (const auto m = document.find("M"); m != document.end()) {
    if (!m->is_number_integer() || m->get<long long>() < 1) schema_error("M must be an integer >= 1");
    spec.measurements = m->get<int>();
  }
  if (const auto m = document.find("method"); m != document.end()) {
    if (!m->is_string()) schema_error("method must be a string");
    spec.method = m->get<std::string>();
  }
  if (const auto l = document.find("luders"); l != document.end()) spec.luders = parse_luders(*l, spec.d);

  const PhaseModel model(spec.amplitudes, spec.phases,
                         options.normalize ? Normalization::Rescale : Normalization::Strict);
  if (model.was_rescaled()) {
    const double norm2 = std::inner_product(spec.amplitudes.begin(), spec.amplitudes.end(), spec.amplitudes.begin(), 0.0);
    spec.warnings.push_back("amplitudes rescaled to unit norm (sum of squares was " + format_number(norm2) + ")");
    spec.amplitudes.assign(model.amplitudes().begin(), model.amplitudes().end());
  }
  return spec;
}

}  // namespace phasemetro::cli
