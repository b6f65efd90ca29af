#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwdflat/geometry.hpp"
#include "fwdflat/scalar.hpp"

namespace fwdflat {

/// Optional guidance for building the adapted chart.
struct AdaptedChartHint {
  /// Variables among (x, u) used as the xi coordinates, in order.
  std::vector<std::string> xi_vars;
  /// Explicit inverse: each non-xi variable of (x, u) in terms of (th, xi).
  Bindings inverse;

  bool empty() const { return xi_vars.empty() && inverse.empty(); }
};

/// x+ = f(x, u) with n states and m inputs.
class DiscreteSystem {
 public:
  /// Validates names and dimensions, submersivity and (when given) the equilibrium.
  DiscreteSystem(std::string name, std::vector<std::string> states, std::vector<std::string> inputs,
                 std::vector<Scalar> f, std::optional<Point> equilibrium = std::nullopt,
                 AdaptedChartHint hint = {});

  const std::string& name() const { return name_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& inputs() const { return inputs_; }
  std::size_t n() const { return states_.size(); }
  std::size_t m() const { return inputs_.size(); }
  const std::vector<Scalar>& f() const { return f_; }
  const std::optional<Point>& equilibrium() const { return equilibrium_; }
  const AdaptedChartHint& hint() const { return hint_; }
  void set_hint(AdaptedChartHint hint) { hint_ = std::move(hint); }

  /// Chart (x1..xn, u1..um).
  const Chart& chart() const { return chart_; }
  /// Rows df^i on chart().
  Matrix jacobian() const;

 private:
  std::string name_;
  std::vector<std::string> states_;
  std::vector<std::string> inputs_;
  std::vector<Scalar> f_;
  std::optional<Point> equilibrium_;
  AdaptedChartHint hint_;
  Chart chart_;
};

/// Generic rank of the Jacobian of f with respect to (x, u) equals n.
bool check_submersive(const std::vector<std::string>& states, const std::vector<std::string>& inputs,
                      const std::vector<Scalar>& f);
bool check_submersive(const DiscreteSystem& sys);

/// Rank of the input Jacobian of f.
std::size_t input_rank(const DiscreteSystem& sys);

std::string adapted_theta(std::size_t i);  // th1, th2, ...
std::string adapted_xi(std::size_t j);     // xi1, xi2, ...
std::string xplus_name(std::size_t i);     // xp1, xp2, ...
Chart xplus_chart(std::size_t n);

/// Coordinates th = f(x, u), xi = selected coordinates of (x, u).
class AdaptedChart {
 public:
  AdaptedChart(const DiscreteSystem& sys, std::vector<std::string> xi_vars, std::vector<Scalar> inverse);

  const Chart& base() const { return base_; }
  const Chart& adapted() const { return adapted_; }
  std::size_t n() const { return n_; }
  const std::vector<std::string>& xi_vars() const { return xi_vars_; }
  /// (f, h) in base variables.
  const std::vector<Scalar>& forward() const { return forward_; }
  /// Base variables in adapted variables, in base chart order.
  const std::vector<Scalar>& inverse() const { return inverse_; }
  Bindings inverse_bindings() const;
  Bindings forward_bindings() const;

  Scalar to_adapted(const Scalar& g) const;
  Scalar to_base(const Scalar& g) const;
  VectorField to_adapted(const VectorField& v) const;
  VectorField to_base(const VectorField& v) const;
  OneForm to_adapted(const OneForm& w) const;
  OneForm to_base(const OneForm& w) const;
  Distribution to_adapted(const Distribution& d) const;
  Distribution to_base(const Distribution& d) const;
  Codistribution to_adapted(const Codistribution& p) const;
  Codistribution to_base(const Codistribution& p) const;

  bool is_theta(std::size_t adapted_index) const { return adapted_index < n_; }

 private:
  Chart base_;
  Chart adapted_;
  std::size_t n_;
  std::vector<std::string> xi_vars_;
  std::vector<Scalar> forward_;
  std::vector<Scalar> inverse_;
  Matrix jac_forward_;  // d(th, xi)/d(x, u), entries in adapted variables
  Matrix jac_inverse_;  // d(x, u)/d(th, xi), entries in base variables
};

/// Solution of equations by successive single-variable linear solves.
struct TriangularSolution {
  bool solved = false;
  Bindings values;             // unknown -> expression in the remaining variables
  std::vector<Scalar> stuck;   // residuals left when no linear pivot exists
  std::vector<std::string> order;
};

/// Each residual must vanish. Repeatedly picks the residual with the fewest
/// unsolved unknowns that is linear in one of them, solves and substitutes.
TriangularSolution solve_triangular(std::vector<Scalar> residuals, const std::vector<std::string>& unknowns);

/// Builds and verifies the adapted chart, honoring the system's hint.
AdaptedChart build_adapted_chart(const DiscreteSystem& sys);

/// Pushforward of a projectable field on the adapted chart to x+ coordinates.
VectorField pushforward_projectable(const VectorField& v, const AdaptedChart& chart);
/// Renames x+ to x and appends the input coordinate fields.
Distribution pullback_pi(const Distribution& delta, const DiscreteSystem& sys);
/// Backward shift of a codistribution on the adapted chart that admits a
/// basis in dth with xi-free coefficients.
Codistribution backward_shift_codistribution(const Codistribution& pplus, const AdaptedChart& chart,
                                             const DiscreteSystem& sys);
/// Substitutes x -> f(x, u) in a function of the states.
Scalar forward_shift(const Scalar& g, const DiscreteSystem& sys);

}  // namespace fwdflat
