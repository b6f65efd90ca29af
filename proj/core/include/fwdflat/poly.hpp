#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fwdflat {

/// Power product of named variables. Factors are kept sorted by variable name
/// with strictly positive exponents, so two equal monomials compare equal
/// member-wise.
class Monomial {
 public:
  using Factor = std::pair<std::string, unsigned>;

  Monomial() = default;
  explicit Monomial(std::vector<Factor> factors);

  static Monomial variable(std::string name, unsigned exponent = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  unsigned degree() const { return degree_; }
  unsigned degree_in(std::string_view var) const;
  bool is_one() const { return factors_.empty(); }

  /// The monomial with `var` removed.
  Monomial without(std::string_view var) const;
  /// Quotient if `divisor` divides this monomial.
  std::optional<Monomial> divide(const Monomial& divisor) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
  unsigned degree_ = 0;
};

Monomial monomial_gcd(const Monomial& a, const Monomial& b);

/// Graded lexicographic comparison over name-sorted variables.
/// Negative when a < b, zero when equal, positive when a > b.
int compare(const Monomial& a, const Monomial& b);

struct TermOrderGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }
};

struct Term {
  Monomial mono;
  mpq_class coef;
};

/// Sparse multivariate polynomial over the rationals. Terms are sorted in
/// decreasing term order and never carry a zero coefficient, which makes the
/// representation canonical.
class Poly {
 public:
  Poly() = default;
  Poly(const mpq_class& constant);  // NOLINT(google-explicit-constructor)
  Poly(long constant) : Poly(mpq_class(constant)) {}  // NOLINT(google-explicit-constructor)

  static Poly variable(std::string name);
  static Poly monomial(Monomial mono, mpq_class coef);
  /// Builds a polynomial from arbitrary terms (unsorted, repeated monomials allowed).
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  /// Value of a constant polynomial (zero polynomial gives 0).
  mpq_class constant_value() const;
  const Term& leading() const { return terms_.front(); }

  /// Name-sorted list of variables that occur.
  std::vector<std::string> variables() const;
  bool depends_on(std::string_view var) const;
  unsigned degree_in(std::string_view var) const;
  unsigned total_degree() const;

  friend bool operator==(const Poly&, const Poly&);

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const mpq_class& c);

  std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

/// Non-negative integer power.
Poly pow(const Poly& base, int exponent);
Poly derivative(const Poly& p, std::string_view var);
/// Coefficients of `p` viewed as a univariate polynomial in `var`, indexed by degree.
std::vector<Poly> coefficients_in(const Poly& p, std::string_view var);
/// Inverse of coefficients_in.
Poly from_coefficients(const std::vector<Poly>& coeffs, const std::string& var);
/// Quotient a / b when b divides a exactly, nullopt otherwise.
std::optional<Poly> exact_divide(const Poly& a, const Poly& b);
/// Scales p to leading coefficient 1. The zero polynomial is returned unchanged.
Poly make_monic(const Poly& p);
/// Scales p to integer coefficients with unit content and positive leading coefficient.
Poly make_integral_primitive(const Poly& p);
/// Monic greatest common divisor over Q[vars]; gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);
/// Renames variables; names absent from the map are kept.
Poly rename(const Poly& p, const std::map<std::string, std::string>& names);

std::string to_string(const mpq_class& q);

}  // namespace fwdflat
