#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fwdflat/dtsystem.hpp"
#include "fwdflat/geometry.hpp"

namespace fwdflat {

enum class IntegralMethod { CoordinatePick, ConstantCombination, Exact, IntegratingFactor, UserHint };

std::string to_string(IntegralMethod m);

struct FirstIntegralSet {
  std::vector<Scalar> functions;
  std::vector<IntegralMethod> methods;
};

/// Functions of `states` whose differentials span `p`, which must lie in span{dx}.
/// Hints that depend on the states only are tried before the heuristics.
/// Throws IntegralsNotFound listing the forms that could not be integrated.
FirstIntegralSet find_first_integrals(const Codistribution& p, const std::vector<std::string>& states,
                                      const std::vector<Scalar>& hints = {});

struct TriangularDecomposition {
  std::size_t dim_x2 = 0;
  std::size_t dim_x1 = 0;
  std::size_t dim_u2 = 0;
  std::size_t dim_u1 = 0;

  std::vector<std::string> states;           // new states, x2 block first
  std::vector<Scalar> state_transform;       // new states in the old ones
  std::vector<Scalar> state_inverse;         // old states in the new ones, in old order
  std::vector<std::string> inputs;           // new inputs, u2 block first
  std::vector<Scalar> input_transform;       // new inputs in old (x, u)
  std::vector<Scalar> input_inverse;         // old inputs in new (states, inputs), in old order
  std::vector<std::size_t> normalized_rows;  // rows of the x2 block that read x2+ = u2
  std::vector<Scalar> f;                     // dynamics in new states and inputs

  FirstIntegralSet integrals;
  /// Inputs of the subsystem after eliminating redundant ones, with definitions
  /// in terms of the x1 states and u2 inputs (identity when nothing was eliminated).
  std::vector<std::string> subsystem_inputs;
  std::vector<Scalar> subsystem_input_defs;
  std::optional<DiscreteSystem> subsystem;  // empty when dim_x2 = 0
  bool d0_matches = false;
};

struct DecomposeOptions {
  std::vector<Scalar> integral_hints;
};

/// One step of the triangular decomposition.
TriangularDecomposition decompose_step(const DiscreteSystem& sys, const DecomposeOptions& options = {});

struct Cascade {
  std::vector<TriangularDecomposition> steps;
  bool complete = false;
  std::string blocking;  // error text of the step that stopped the cascade
};

/// Repeats decompose_step on successive subsystems until the subsystem state is empty.
Cascade decompose_cascade(const DiscreteSystem& sys, const DecomposeOptions& options = {});

/// Fresh variable prefix starting at `base` that no name of `taken` uses.
std::string fresh_prefix(std::string base, const std::vector<std::string>& taken);

}  // namespace fwdflat
