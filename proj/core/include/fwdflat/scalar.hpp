#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fwdflat/poly.hpp"

namespace fwdflat {

/// Exact rational function num/den over Q in named variables.
///
/// The representation is canonical: gcd(num, den) = 1 and den has leading
/// coefficient 1 in the graded lexicographic term order, so two Scalars are
/// equal as rational functions iff they are equal member-wise. Values are
/// immutable once built and can be shared across threads.
class Scalar {
 public:
  Scalar() : den_(1) {}
  Scalar(long value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
  Scalar(const mpq_class& value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
  Scalar(Poly p) : num_(std::move(p)), den_(1) {}  // NOLINT(google-explicit-constructor)

  static Scalar variable(std::string name);
  /// Canonicalizes num/den; throws DivisionByZeroScalar on a zero denominator.
  static Scalar fraction(const Poly& num, const Poly& den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  mpq_class constant_value() const;

  std::vector<std::string> variables() const;
  bool depends_on(std::string_view var) const;

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  /// Canonical text form; parses back to an equal Scalar.
  std::string to_string() const;

 private:
  Poly num_;
  Poly den_;
};

using Bindings = std::map<std::string, Scalar>;
using Point = std::map<std::string, mpq_class>;

Scalar add(const Scalar& a, const Scalar& b);
Scalar mul(const Scalar& a, const Scalar& b);
Scalar div(const Scalar& a, const Scalar& b);
Scalar neg(const Scalar& a);
Scalar pow(const Scalar& base, int exponent);

/// Exact partial derivative.
Scalar differentiate(const Scalar& a, std::string_view var);

/// Simultaneous substitution. Throws SubstitutionSingular when the result's
/// denominator vanishes identically.
Scalar substitute(const Scalar& a, const Bindings& bindings);

/// Variable renaming (a cheap special case of substitution).
Scalar rename(const Scalar& a, const std::map<std::string, std::string>& names);

/// Solves lhs = rhs for `var` when the cleared equation has degree exactly one
/// in `var`. Throws NotLinearInVariable or CoefficientVanishes.
Scalar solve_linear_in(const Scalar& lhs, const Scalar& rhs, std::string_view var);

/// True when the cleared equation lhs - rhs = 0 is of degree one in `var`
/// and substituting the solution leaves the denominators nonzero.
bool is_linear_in(const Scalar& expr, std::string_view var);

bool is_zero(const Scalar& a);

/// Exact value at a rational point. Throws EvalSingular on a zero denominator.
mpq_class eval_at(const Scalar& a, const Point& point);

std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace fwdflat
