#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fwdflat/dtsystem.hpp"
#include "fwdflat/geometry.hpp"

namespace fwdflat {

/// Distribution on the adapted chart in normalized form: the first `dbar`
/// fields carry an identity block on the th pivots, the others only have
/// xi components with an identity block on the xi pivots.
struct NormalizedBasis {
  std::vector<VectorField> fields;
  std::size_t dbar = 0;
  std::vector<std::size_t> theta_pivots;  // adapted column of each of the first dbar fields
  std::vector<std::size_t> theta_free;    // remaining th columns (rows of L)
  std::vector<std::size_t> xi_pivots;
};

NormalizedBasis normalize_distribution_basis(const Distribution& d, const AdaptedChart& chart);

/// Derivative matrix of the non-pivot coefficients with respect to xi.
struct MMatrixReport {
  std::size_t dbar = 0;
  Matrix L;       // (n - dbar) x dbar
  Matrix M;       // stacked xi-derivatives of L, one level per derivative order
  Matrix Mhat;    // rows of M independent over the rational constants
  std::size_t rankM = 0;  // rank over the rational functions
  Matrix kernel;  // kernel vectors (length dbar), functions of th only
  std::size_t levels = 0;
};

/// Builds M from the rows `L` (functions on the adapted chart) by repeated
/// differentiation along xi until the rank stops growing. `xi_order` fixes
/// the order in which derivatives are appended.
MMatrixReport derivative_matrix(const Matrix& L, std::size_t columns, const AdaptedChart& chart,
                                const std::vector<std::size_t>& xi_order = {});

struct ProjectableResult {
  Distribution D;           // on (x, u)
  Distribution D_adapted;   // on (th, xi)
  Distribution Delta;       // pushforward on x+
  MMatrixReport report;
};

/// Largest projectable subdistribution of `d` (given on (x, u)).
ProjectableResult largest_projectable_subdistribution(const Distribution& d, const AdaptedChart& chart);

struct DistributionStep {
  std::size_t k = 0;
  Distribution D;      // D_{k-1}
  Distribution Delta;  // Delta_k
  Distribution E;      // E_k
  MMatrixReport report;
};

struct DistributionTestResult {
  std::vector<Distribution> E;  // E_0, E_1, ...
  std::vector<DistributionStep> steps;
  std::size_t kbar = 0;
  bool converged = false;
  bool flat = false;
  std::vector<std::size_t> dims() const;
};

struct CodistributionStep {
  std::size_t k = 0;
  Codistribution P;            // P_k
  Codistribution intersection; // P_k cap span{df}
  Codistribution Pplus;        // P_{k+1}^+ on (th, xi)
  std::vector<OneForm> rho;    // forms added to the intersection, on (th, xi)
  Codistribution next;         // P_{k+1}
  MMatrixReport report;
};

struct CodistributionTestResult {
  std::vector<Codistribution> P;  // P_1, P_2, ...
  std::vector<CodistributionStep> steps;
  std::size_t kbar = 0;
  bool converged = false;
  bool flat = false;
  std::vector<std::size_t> dims() const;
  const Codistribution& at(std::size_t k) const { return P.at(k - 1); }
};

struct TestOptions {
  /// Iteration cap; zero selects n + m + 1.
  std::size_t max_iterations = 0;
  /// Recompute every closure with the coordinate-free route and compare.
  bool cross_check = true;
  /// Check involutivity of every E_k and integrability of every P_k.
  bool check_integrability = true;
};

DistributionTestResult run_distribution_test(const DiscreteSystem& sys, const AdaptedChart& chart,
                                             const TestOptions& options = {});
CodistributionTestResult run_codistribution_test(const DiscreteSystem& sys, const AdaptedChart& chart,
                                                 const TestOptions& options = {});

struct DualityCheck {
  std::size_t k = 0;
  std::string name;
  bool ok = false;
  std::string detail;
};

struct DualityReport {
  bool ok = false;
  std::vector<DualityCheck> checks;
};

/// Checks P_k = E_{k-1}^perp, the relation between D_{k-1} and P_{k+1}^+ + P_k
/// and the dimension formulas. Throws DualityViolation on the first failure.
DualityReport verify_duality(const DiscreteSystem& sys, const AdaptedChart& chart, const DistributionTestResult& dist,
                             const CodistributionTestResult& codist);

struct FlatnessVerdict {
  bool flat = false;
  std::size_t kbar = 0;
  std::string witness;
  std::optional<DualityReport> duality;
  std::optional<DistributionTestResult> distribution;
  std::optional<CodistributionTestResult> codistribution;
};

enum class TestSelection { Distribution, Codistribution, Both };

/// Runs the selected tests (both concurrently when requested) and, for both,
/// optionally the duality verification. Disagreement throws InternalInconsistency.
FlatnessVerdict decide_flatness(const DiscreteSystem& sys, const AdaptedChart& chart, TestSelection which,
                                bool verify, const TestOptions& options = {});

}  // namespace fwdflat
