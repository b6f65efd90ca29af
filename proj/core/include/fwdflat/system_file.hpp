#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwdflat/dtsystem.hpp"
#include "fwdflat/scalar.hpp"

namespace fwdflat {

/// Parsed contents of a system definition file.
///
/// The format is line oriented. `#` starts a comment. A line `key:` opens a
/// section; text after the colon counts as the first entry of that section.
///
///     name: example
///     states: x1, x2
///     inputs: u1
///     dynamics:
///       x1+ = x2
///       x2+ = u1
///     equilibrium: x1 = 0, x2 = 0, u1 = 0
///     hints:
///       xi = x1
///       inverse: x2 = th1, u1 = th2
///       integrals: x1; x2
///
/// `states:` may be omitted, in which case the states are the left-hand sides
/// of `dynamics:` in order. The equilibrium is either a list of assignments or
/// a list of n+m values in (states, inputs) order; it is optional.
struct SystemFile {
  std::string origin;  // path or "<input>", used in error messages
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  std::vector<Scalar> f;
  std::optional<Point> equilibrium;
  AdaptedChartHint chart_hint;
  std::vector<Scalar> integral_hints;

  /// Validates and builds the system (submersivity, equilibrium).
  DiscreteSystem to_system() const;
};

/// Throws ParseError ("origin:line:column: message") or NonRationalExpression.
SystemFile parse_system_text(std::string_view text, std::string origin = "<input>");
SystemFile read_system_file(const std::string& path);
DiscreteSystem parse_system(const std::string& path);

/// Text in the file format; parse_system_text reads it back to an equal system.
std::string format_system(const DiscreteSystem& sys);

/// Comma separated identifiers, e.g. a chart hint "x1, x3".
std::vector<std::string> parse_name_list(std::string_view text);
/// Semicolon separated expressions, e.g. an integrals hint "x1; x2 + 3*x4".
std::vector<Scalar> parse_expression_list(std::string_view text);

}  // namespace fwdflat
