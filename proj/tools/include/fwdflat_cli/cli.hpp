#pragma once

#include <iosfwd>
#include <string>

#include "fwdflat/analysis.hpp"
#include "fwdflat/error.hpp"
#include "json.hpp"

namespace fwdflat::cli {

using Json = nlohmann::ordered_json;

/// Human-readable report.
std::string render_text(const AnalysisReport& report);

/// Structured report; the tree mirrors AnalysisReport field by field.
Json to_json(const AnalysisReport& report);

/// What to try next for an error of this kind.
std::string remediation(Errc code);

enum ExitCode : int {
  kOk = 0,
  kAnalysisError = 1,
  kUsageError = 2,
  kIoError = 3,
};

/// Full command line entry point. Exit 0 whenever the analysis completes,
/// whatever the verdict.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fwdflat::cli
