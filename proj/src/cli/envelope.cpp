#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "phasemetro/cli.hpp"
#include "phasemetro/errors.hpp"

namespace phasemetro::cli {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::SchemaError, "expected a number or \"inf\"/\"-inf\", got " + j.dump());
}

Json matrix_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::SchemaError, "matrix rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json vector_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_to_json(v(i)));
  return out;
}

Json complex_matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({number_to_json(m(i, j).real()), number_to_json(m(i, j).imag())}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json problem_to_json(const ProblemSpec& spec) {
  Json j;
  j["d"] = spec.d;
  j["eta"] = spec.eta;
  j["amplitudes"] = spec.amplitudes;
  j["phases"] = spec.phases;
  j["M"] = spec.measurements;
  if (spec.method) j["method"] = *spec.method;
  if (spec.luders) {
    Json basis = Json::array();
    for (const ComplexVector& v : spec.luders->basis) {
      Json vec = Json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(Json::array({v(i).real(), v(i).imag()}));
      basis.push_back(std::move(vec));
    }
    j["luders"] = {{"r", spec.luders->rank}, {"basis", std::move(basis)}};
  }
  return j;
}

}  // namespace phasemetro::cli
