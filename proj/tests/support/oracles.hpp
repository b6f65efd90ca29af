#pragma once

// Reference computations that share no code with the library. They work on
// plain expression trees and dense rational matrices evaluated at points.

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Point = std::map<std::string, mpq_class>;

/// Arithmetic expression tree over integer literals and named variables.
struct Expr {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow };
  Kind kind = Kind::Const;
  long value = 0;
  std::string name;
  int exponent = 0;
  std::shared_ptr<const Expr> lhs, rhs;

  static std::shared_ptr<const Expr> constant(long v);
  static std::shared_ptr<const Expr> var(std::string n);
  static std::shared_ptr<const Expr> binary(Kind k, std::shared_ptr<const Expr> a, std::shared_ptr<const Expr> b);
  static std::shared_ptr<const Expr> neg(std::shared_ptr<const Expr> a);
  static std::shared_ptr<const Expr> pow(std::shared_ptr<const Expr> a, int e);
};
using ExprPtr = std::shared_ptr<const Expr>;

/// Fully parenthesized text in the input language of the parser.
std::string text(const ExprPtr& e);
/// Exact value; nullopt when a division by zero occurs anywhere.
std::optional<mpq_class> eval(const ExprPtr& e, const Point& p);
/// Symbolic derivative by the textbook rules, without simplification.
ExprPtr derivative(const ExprPtr& e, const std::string& var);

/// Random expression of bounded depth in the given variables.
ExprPtr random_expr(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth, bool allow_division = true);

/// Dense univariate gcd over Q via the Euclidean algorithm; coefficients are
/// indexed by degree and the result is monic.
std::vector<mpq_class> univariate_gcd(std::vector<mpq_class> a, std::vector<mpq_class> b);

using DenseMatrix = std::vector<std::vector<mpq_class>>;
std::size_t rank(DenseMatrix m);

/// Random point with small nonzero rational coordinates.
Point random_point(std::mt19937_64& rng, const std::vector<std::string>& vars);

}  // namespace oracle
