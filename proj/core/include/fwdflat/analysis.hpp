#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fwdflat/decompose.hpp"
#include "fwdflat/dtsystem.hpp"
#include "fwdflat/flatness.hpp"

namespace fwdflat {

struct AnalysisOptions {
  TestSelection test = TestSelection::Both;
  /// Defaults to on when both tests run.
  std::optional<bool> verify_duality;
  bool decompose = false;
  /// 0 means n+m+1.
  std::size_t max_iterations = 0;
  bool point_check = false;
  /// Seeds the point sampler only.
  std::uint64_t seed = 1;
  /// Replaces the system's own chart hint when non-empty.
  AdaptedChartHint chart_hint;
  std::vector<Scalar> integral_hints;
};

struct RankCheck {
  std::string object;  // e.g. "E_2"
  std::size_t generic = 0;
  std::size_t at_point = 0;
};

struct PointCheckReport {
  Point point;
  std::size_t attempts = 0;
  std::vector<RankCheck> checks;
  bool agrees = true;
};

struct AnalysisReport {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> inputs;
  std::vector<Scalar> f;
  std::optional<Point> equilibrium;

  std::vector<std::string> xi_vars;
  std::vector<Scalar> chart_inverse;  // (x, u) in (th, xi), base chart order

  TestSelection test = TestSelection::Both;
  bool duality_requested = false;
  std::size_t max_iterations = 0;
  bool converged = false;

  FlatnessVerdict verdict;
  std::optional<Cascade> cascade;
  std::optional<PointCheckReport> point_check;
  std::vector<std::string> warnings;
};

/// Builds the adapted chart, runs the selected tests and the optional extras.
AnalysisReport analyze(const DiscreteSystem& sys, const AnalysisOptions& options = {});

/// Rank of a matrix of Scalars evaluated at `p`. Throws EvalSingular.
std::size_t rank_at(const Matrix& rows, const Point& p);

std::string to_string(TestSelection t);

}  // namespace fwdflat
