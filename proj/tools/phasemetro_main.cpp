// phasemetro: QFIM, Cramer-Rao bounds and optimal estimators for multiphase
// estimation on pure states under white noise.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "phasemetro/cli.hpp"
#include "phasemetro/errors.hpp"

namespace {

using namespace phasemetro;

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot open input file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int emit(const cli::CommandResult& result) {
  std::cout << result.output;
  for (const std::string& line : result.diagnostics) std::cerr << "phasemetro: " << line << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QFIM, Cramer-Rao bounds and optimal estimators for multiphase estimation under white noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(PHASEMETRO_VERSION));

  cli::CommandOptions options;
  cli::ParseOptions parse;
  cli::ScanOptions scan;
  std::string input = "-";
  int count = 20;

  auto add_common = [&](CLI::App* sub, bool takes_input) {
    if (takes_input) sub->add_option("input", input, "problem JSON file ('-' for stdin)");
    sub->add_flag("--pretty", options.pretty, "pretty-print JSON output");
    sub->add_flag("--normalize", parse.normalize, "rescale amplitudes to unit norm instead of rejecting them");
    sub->add_option("--step", options.step, "fidelity finite-difference step")->check(CLI::Range(1e-4, 1e-1));
    sub->add_option("--series-terms", options.series_terms, "even-order terms in the SLD series")->check(CLI::Range(1, 64));
    sub->add_option("--seed", options.seed, "seed for randomized instances");
  };

  auto* qfim = app.add_subcommand("qfim", "compute the QFIM by one or all methods");
  add_common(qfim, true);
  qfim->add_option("--method", options.method, "closed|sld|spectral|fidelity|all");
  qfim->add_flag("--allow-singular", options.allow_singular, "exit 0 even when the bound is infinite");

  auto* verify = app.add_subcommand("verify", "check every SLD/QFIM/QCRB identity on a problem or result envelope");
  add_common(verify, true);
  verify->add_option("--method", options.method, "series|all include the commutator-series route");

  auto* scan_cmd = app.add_subcommand("scan", "tabulate xi, QFIM and total variance over eta (CSV)");
  add_common(scan_cmd, true);
  scan_cmd->add_option("--parameter", scan.parameter, "scanned parameter (eta)");
  scan_cmd->add_option("--from", scan.from, "first value");
  scan_cmd->add_option("--to", scan.to, "last value");
  scan_cmd->add_option("--steps", scan.steps, "number of rows");

  auto* est = app.add_subcommand("estimators", "optimal estimators and their covariance");
  add_common(est, true);

  auto* self = app.add_subcommand("selftest", "cross-method agreement on seeded random instances");
  add_common(self, false);
  self->add_option("--count", count, "number of random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  try {
    if (self->parsed()) return emit(cli::cmd_selftest(count, options));
    const cli::ProblemSpec spec = cli::parse_problem(read_input(input), parse);
    for (const std::string& w : spec.warnings) std::cerr << "phasemetro: warning: " << w << '\n';
    if (qfim->parsed()) return emit(cli::cmd_qfim(spec, options));
    if (verify->parsed()) return emit(cli::cmd_verify(spec, options));
    if (scan_cmd->parsed()) return emit(cli::cmd_scan(spec, scan, options));
    if (est->parsed()) return emit(cli::cmd_estimators(spec, options));
  } catch (const Error& e) {
    std::cerr << "phasemetro: " << e.what() << '\n';
    return cli::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "phasemetro: internal error: " << e.what() << '\n';
    return cli::kExitInternal;
  }
  return cli::kExitInternal;
}
