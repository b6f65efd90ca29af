#include "fwdflat/scalar.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "fwdflat/error.hpp"

namespace fwdflat {

namespace {

// Makes the denominator monic; requires gcd(num, den) = 1 already.
void normalize_units(Poly& num, Poly& den) {
  const mpq_class lc = den.leading().coef;
  if (lc != 1) {
    const mpq_class inv = 1 / lc;
    num = num * inv;
    den = den * inv;
  }
}

Poly divide_or_die(const Poly& a, const Poly& b) {
  auto q = exact_divide(a, b);
  if (!q) throw Error(Errc::InternalInconsistency, "inexact polynomial division in canonicalization");
  return std::move(*q);
}

}  // namespace

Scalar Scalar::variable(std::string name) {
  return Scalar(Poly::variable(std::move(name)));
}

Scalar Scalar::fraction(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw Error(Errc::DivisionByZeroScalar, "denominator is the zero polynomial");
  Scalar s;
  if (num.is_zero()) return s;
  if (den.is_constant()) {
    s.num_ = num * mpq_class(1 / den.constant_value());
    return s;
  }
  Poly g = gcd(num, den);
  if (g.is_constant()) {
    s.num_ = num;
    s.den_ = den;
  } else {
    s.num_ = divide_or_die(num, g);
    s.den_ = divide_or_die(den, g);
  }
  normalize_units(s.num_, s.den_);
  return s;
}

mpq_class Scalar::constant_value() const {
  return num_.constant_value() / den_.constant_value();
}

std::vector<std::string> Scalar::variables() const {
  auto a = num_.variables();
  auto b = den_.variables();
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool Scalar::depends_on(std::string_view var) const {
  return num_.depends_on(var) || den_.depends_on(var);
}

Scalar Scalar::operator-() const {
  Scalar s = *this;
  s.num_ = -s.num_;
  return s;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return Scalar::fraction(a.num_ + b.num_, a.den_);
  if (a.den_.is_constant() && b.den_.is_constant()) return Scalar(a.num_ + b.num_);
  // Henrici: only the shared denominator factor can cancel.
  Poly g = gcd(a.den_, b.den_);
  Poly ad = divide_or_die(a.den_, g);
  Poly bd = divide_or_die(b.den_, g);
  Poly num = a.num_ * bd + b.num_ * ad;
  Poly den = a.den_ * bd;
  if (num.is_zero()) return Scalar();
  if (g.is_constant()) {
    Scalar s;
    s.num_ = std::move(num);
    s.den_ = std::move(den);
    normalize_units(s.num_, s.den_);
    return s;
  }
  Poly h = gcd(num, g);
  Scalar s;
  if (h.is_constant()) {
    s.num_ = std::move(num);
    s.den_ = std::move(den);
  } else {
    s.num_ = divide_or_die(num, h);
    s.den_ = divide_or_die(den, h);
  }
  normalize_units(s.num_, s.den_);
  return s;
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  return a + (-b);
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return Scalar();
  if (a.is_polynomial() && b.is_polynomial()) return Scalar(a.num_ * b.num_);
  // Cross-cancel: a.num with b.den and b.num with a.den.
  Poly g1 = gcd(a.num_, b.den_);
  Poly g2 = gcd(b.num_, a.den_);
  Poly an = g1.is_constant() ? a.num_ : divide_or_die(a.num_, g1);
  Poly bd = g1.is_constant() ? b.den_ : divide_or_die(b.den_, g1);
  Poly bn = g2.is_constant() ? b.num_ : divide_or_die(b.num_, g2);
  Poly ad = g2.is_constant() ? a.den_ : divide_or_die(a.den_, g2);
  Scalar s;
  s.num_ = an * bn;
  s.den_ = ad * bd;
  normalize_units(s.num_, s.den_);
  return s;
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw Error(Errc::DivisionByZeroScalar, "division by the zero rational function");
  Scalar inv;
  inv.num_ = b.den_;
  inv.den_ = b.num_;
  normalize_units(inv.num_, inv.den_);
  return a * inv;
}

Scalar add(const Scalar& a, const Scalar& b) { return a + b; }
Scalar mul(const Scalar& a, const Scalar& b) { return a * b; }
Scalar div(const Scalar& a, const Scalar& b) { return a / b; }
Scalar neg(const Scalar& a) { return -a; }

Scalar pow(const Scalar& base, int exponent) {
  if (exponent < 0) return Scalar(1) / pow(base, -exponent);
  if (exponent == 0) return Scalar(1);
  if (base.is_zero()) return Scalar();
  Poly num = pow(base.num(), exponent);
  Poly den = pow(base.den(), exponent);
  return Scalar::fraction(num, den);
}

std::string Scalar::to_string() const {
  std::string n = num_.to_string();
  if (den_ == Poly(1)) return n;
  std::string out;
  if (num_.terms().size() > 1) {
    out = "(" + n + ")";
  } else {
    out = n;
  }
  const bool bare_den = den_.terms().size() == 1 && den_.leading().coef == 1 &&
                        den_.leading().mono.factors().size() == 1;
  out += "/";
  if (bare_den) {
    out += den_.to_string();
  } else {
    out += "(" + den_.to_string() + ")";
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) {
  return os << s.to_string();
}

Scalar differentiate(const Scalar& a, std::string_view var) {
  if (!a.depends_on(var)) return Scalar();
  if (a.is_polynomial()) return Scalar(derivative(a.num(), var));
  Poly dn = derivative(a.num(), var);
  Poly dd = derivative(a.den(), var);
  if (dd.is_zero()) return Scalar::fraction(dn, a.den());
  // With g = gcd(D, D'): (N'D - ND')/D^2 = (N' D/g - N D'/g) / (D D/g).
  const Poly g = gcd(a.den(), dd);
  if (g.is_constant()) return Scalar::fraction(dn * a.den() - a.num() * dd, a.den() * a.den());
  const Poly dg = divide_or_die(a.den(), g);
  return Scalar::fraction(dn * dg - a.num() * divide_or_die(dd, g), a.den() * dg);
}

namespace {

struct PowerCache {
  std::vector<Poly> powers;
  explicit PowerCache(Poly base) { powers.push_back(Poly(1)), powers.push_back(std::move(base)); }
  const Poly& get(unsigned e) {
    while (powers.size() <= e) powers.push_back(powers.back() * powers[1]);
    return powers[e];
  }
};

struct BoundVar {
  PowerCache num;
  PowerCache den;
  unsigned top;  // common degree used to clear denominators
};

Poly substitute_poly(const Poly& p, std::map<std::string, BoundVar>& bound) {
  std::vector<Term> acc;
  for (const auto& t : p.terms()) {
    std::vector<Monomial::Factor> keep;
    for (const auto& f : t.mono.factors())
      if (bound.find(f.first) == bound.end()) keep.push_back(f);
    Poly factor = Poly::monomial(Monomial(std::move(keep)), t.coef);
    // Every bound variable contributes num^e * den^(top - e), including e = 0.
    for (auto& [name, bv] : bound) {
      const unsigned e = t.mono.degree_in(name);
      if (e > 0) factor = factor * bv.num.get(e);
      if (bv.top > e) factor = factor * bv.den.get(bv.top - e);
    }
    for (const auto& term : factor.terms()) acc.push_back(term);
  }
  return Poly::from_terms(std::move(acc));
}

}  // namespace

Scalar substitute(const Scalar& a, const Bindings& bindings) {
  std::map<std::string, BoundVar> bound;
  for (const auto& [name, value] : bindings) {
    if (!a.depends_on(name)) continue;
    unsigned top = std::max(a.num().degree_in(name), a.den().degree_in(name));
    bound.emplace(name, BoundVar{PowerCache(value.num()), PowerCache(value.den()), top});
  }
  if (bound.empty()) return a;
  Poly n = substitute_poly(a.num(), bound);
  Poly d = substitute_poly(a.den(), bound);
  if (d.is_zero()) throw Error(Errc::SubstitutionSingular, "substitution makes the denominator of " + a.to_string() + " vanish");
  // Powers of the substituted denominators are the usual common factors;
  // dividing them out first leaves the gcd a (typically trivial) remainder.
  if (!n.is_zero()) {
    for (auto& [name, bv] : bound) {
      const Poly& q = bv.den.get(1);
      if (q.is_constant()) continue;
      while (true) {
        auto qn = exact_divide(n, q);
        if (!qn) break;
        auto qd = exact_divide(d, q);
        if (!qd) break;
        n = std::move(*qn);
        d = std::move(*qd);
      }
    }
  }
  return Scalar::fraction(n, d);
}

Scalar rename(const Scalar& a, const std::map<std::string, std::string>& names) {
  bool touched = false;
  for (const auto& [from, to] : names)
    if (a.depends_on(from)) touched = true;
  if (!touched) return a;
  // Renaming preserves coprimality; only the unit normalization can change.
  return Scalar::fraction(rename(a.num(), names), rename(a.den(), names));
}

bool is_linear_in(const Scalar& expr, std::string_view var) {
  if (expr.num().degree_in(var) != 1) return false;
  auto c = coefficients_in(expr.num(), var);
  if (c[1].is_zero()) return false;
  if (!expr.den().depends_on(var)) return true;
  Scalar sol = Scalar::fraction(-c[0], c[1]);
  Bindings b{{std::string(var), sol}};
  Poly dn = substitute(Scalar(expr.den()), b).num();
  return !dn.is_zero();
}

Scalar solve_linear_in(const Scalar& lhs, const Scalar& rhs, std::string_view var) {
  Scalar eq = lhs - rhs;
  const unsigned deg = eq.num().degree_in(var);
  if (deg != 1)
    throw Error(Errc::NotLinearInVariable, "equation " + lhs.to_string() + " = " + rhs.to_string() +
                                               " has degree " + std::to_string(deg) + " in " + std::string(var));
  auto c = coefficients_in(eq.num(), var);
  if (c[1].is_zero()) throw Error(Errc::CoefficientVanishes, "coefficient of " + std::string(var) + " vanishes");
  Scalar sol = Scalar::fraction(-c[0], c[1]);
  if (eq.den().depends_on(var)) {
    Scalar d = substitute(Scalar(eq.den()), Bindings{{std::string(var), sol}});
    if (d.is_zero())
      throw Error(Errc::CoefficientVanishes, "solution for " + std::string(var) + " annihilates a denominator");
  }
  return sol;
}

bool is_zero(const Scalar& a) { return a.is_zero(); }

namespace {

mpq_class eval_poly(const Poly& p, const Point& point) {
  mpq_class sum = 0;
  for (const auto& t : p.terms()) {
    mpq_class v = t.coef;
    for (const auto& [name, e] : t.mono.factors()) {
      auto it = point.find(name);
      if (it == point.end()) throw Error(Errc::EvalSingular, "no value for variable " + name);
      mpq_class x;
      mpz_pow_ui(x.get_num_mpz_t(), it->second.get_num_mpz_t(), e);
      mpz_pow_ui(x.get_den_mpz_t(), it->second.get_den_mpz_t(), e);
      v *= x;
    }
    sum += v;
  }
  return sum;
}

}  // namespace

mpq_class eval_at(const Scalar& a, const Point& point) {
  mpq_class d = eval_poly(a.den(), point);
  if (sgn(d) == 0) throw Error(Errc::EvalSingular, "denominator of " + a.to_string() + " vanishes at the point");
  mpq_class r = eval_poly(a.num(), point) / d;
  return r;
}

}  // namespace fwdflat
