#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "fwdflat/system_file.hpp"
#include "fwdflat_cli/cli.hpp"

namespace fwdflat::cli {

std::string remediation(Errc code) {
  switch (code) {
    case Errc::ParseError:
      return "check the syntax at the reported line and column";
    case Errc::NonRationalExpression:
      return "only rational expressions are supported: + - * / ^ with integer exponents";
    case Errc::SubmersivityFailed:
      return "the map (x, u) -> f(x, u) must have full rank n; remove redundant states";
    case Errc::EquilibriumMismatch:
      return "check the equilibrium: f(x0, u0) must equal x0 and f must be defined there";
    case Errc::InvalidSystem:
      return "every state needs one equation and every name must be declared once";
    case Errc::InversionFailed:
      return "provide chart hint: xi = <m variables of (x, u)>, e.g. --chart-hint x1,x3, or an 'inverse:' hint";
    case Errc::HintInvalid:
      return "the chart hint must name m distinct variables of (x, u) that complete f to a chart";
    case Errc::IntegralsNotFound:
      return "provide first integrals with --integrals-hint 'g1; g2' or an 'integrals:' hint";
    case Errc::NormalizationFailed:
    case Errc::NotDecomposable:
      return "the decomposition needs a forward-flat system with independent inputs";
    case Errc::DualityViolation:
    case Errc::InternalInconsistency:
      return "internal check failed; please report the input file";
    case Errc::EvalSingular:
      return "the sampled point hit a singular locus; try another --seed";
    default:
      return "";
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decides forward-flatness of discrete-time systems x+ = f(x, u)", "fwdflat"};

  std::string path;
  std::string test = "both";
  std::optional<bool> verify;
  bool decompose = false;
  std::string json_path;
  std::size_t max_iterations = 0;
  bool point_check = false;
  std::uint64_t seed = 1;
  std::string chart_hint;
  std::string integrals_hint;

  app.add_option("system", path, "System definition file")->required();
  app.add_option("--test", test, "Which test to run")
      ->check(CLI::IsMember({"distribution", "codistribution", "both"}))
      ->capture_default_str();
  app.add_flag("--verify-duality,!--no-verify-duality", verify,
               "Check P_k = E_{k-1}^perp and the dimension formulas (default: on with --test both)");
  app.add_flag("--decompose", decompose, "Compute the triangular decomposition cascade");
  app.add_option("--json", json_path, "Write the structured report to this file ('-' for standard output)");
  app.add_option("--max-iterations", max_iterations, "Iteration cap (default n+m+1)")->check(CLI::PositiveNumber);
  app.add_flag("--point-check", point_check, "Compare generic ranks with ranks at a sampled rational point");
  app.add_option("--seed", seed, "Seed of the point sampler")->capture_default_str();
  app.add_option("--chart-hint", chart_hint, "xi variables of the adapted chart, e.g. x1,x3");
  app.add_option("--integrals-hint", integrals_hint, "First integral candidates, e.g. 'x1; x2 + 3*x4'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  const auto fail = [&](const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.message() << "\n";
    const std::string hint = remediation(e.code());
    if (!hint.empty()) err << "hint: " << hint << "\n";
    return kAnalysisError;
  };

  AnalysisOptions opt;
  opt.test = test == "distribution"     ? TestSelection::Distribution
             : test == "codistribution" ? TestSelection::Codistribution
                                        : TestSelection::Both;
  opt.verify_duality = verify;
  opt.decompose = decompose;
  opt.max_iterations = max_iterations;
  opt.point_check = point_check;
  opt.seed = seed;

  AnalysisReport report;
  try {
    const SystemFile file = read_system_file(path);
    if (!chart_hint.empty()) opt.chart_hint.xi_vars = parse_name_list(chart_hint);
    opt.integral_hints = file.integral_hints;
    if (!integrals_hint.empty()) opt.integral_hints = parse_expression_list(integrals_hint);
    report = analyze(file.to_system(), opt);
  } catch (const Error& e) {
    return fail(e);
  }

  if (json_path == "-") {
    out << to_json(report).dump(2) << "\n";
    return kOk;
  }
  out << render_text(report);
  if (!json_path.empty()) {
    std::ofstream js(json_path, std::ios::binary);
    if (!js) {
      err << "error: cannot write " << json_path << "\n";
      return kIoError;
    }
    js << to_json(report).dump(2) << "\n";
  }
  return kOk;
}

}  // namespace fwdflat::cli
