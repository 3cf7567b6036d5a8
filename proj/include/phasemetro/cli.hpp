#pragma once

// Front end shared by the phasemetro executable and the integration tests:
// problem parsing, result envelopes and the subcommands.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phasemetro/linalg.hpp"
#include "phasemetro/states.hpp"

namespace phasemetro::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kExitSuccess = 0,
  kExitInternal = 1,
  kExitInputError = 2,
  kExitSingular = 3,
  kExitVerificationFailed = 4,
};

struct LudersInput {
  int rank;
  std::vector<ComplexVector> basis;
};

struct ProblemSpec {
  int d = 0;
  double eta = 0.0;
  std::vector<double> amplitudes;
  std::vector<double> phases;
  std::optional<LudersInput> luders;
  int measurements = 1;
  std::optional<std::string> method;
  std::vector<std::string> warnings;

  // Present when the document was a previously emitted result envelope.
  std::map<std::string, RealMatrix> recorded_qfim;
  std::optional<double> recorded_min_total_variance;

  PhaseModel model() const;
  bool is_luders() const { return luders.has_value(); }
};

struct ParseOptions {
  bool normalize = false;
};

/// Accepts a problem document or a result envelope (whose "problem" member is
/// used and whose recorded results become expectations for verify).
/// Throws Error(SchemaError | NotNormalized | EtaOutOfRange | ...).
ProblemSpec parse_problem(std::string_view text, const ParseOptions& options = {});
ProblemSpec parse_problem_document(const Json& document, const ParseOptions& options = {});

// --- serialization helpers -------------------------------------------------

/// Finite values as numbers (shortest round-trip), +-inf as "inf"/"-inf".
Json number_to_json(double v);
double number_from_json(const Json& j);
Json matrix_to_json(const RealMatrix& m);
RealMatrix matrix_from_json(const Json& j);
Json vector_to_json(const RealVector& v);
/// Rows of [re, im] pairs.
Json complex_matrix_to_json(const ComplexMatrix& m);
Json problem_to_json(const ProblemSpec& spec);
/// Shortest round-trip decimal, "inf"/"-inf" for infinities.
std::string format_number(double v);

// --- commands ----------------------------------------------------------------

struct CommandOptions {
  std::string method;  // empty: subcommand default
  bool allow_singular = false;
  double step = 1e-3;
  int series_terms = 40;
  std::uint64_t seed = 42;
  bool pretty = false;
};

struct ScanOptions {
  std::string parameter = "eta";
  double from = 0.0;
  double to = 1.0;
  int steps = 11;
};

struct CommandResult {
  std::string output;
  int exit_code = kExitSuccess;
  std::vector<std::string> diagnostics;  // human-readable, for stderr
};

CommandResult cmd_qfim(const ProblemSpec& spec, const CommandOptions& options);
CommandResult cmd_verify(const ProblemSpec& spec, const CommandOptions& options);
CommandResult cmd_scan(const ProblemSpec& spec, const ScanOptions& scan, const CommandOptions& options);
CommandResult cmd_estimators(const ProblemSpec& spec, const CommandOptions& options);
/// Cross-method agreement on `count` random instances drawn from options.seed.
CommandResult cmd_selftest(int count, const CommandOptions& options);

}  // namespace phasemetro::cli
