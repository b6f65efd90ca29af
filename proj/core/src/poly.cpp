#include "fwdflat/poly.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>

#include "fwdflat/error.hpp"

namespace fwdflat {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  for (auto& f : factors) {
    if (f.second == 0) continue;
    if (!factors_.empty() && factors_.back().first == f.first) {
      factors_.back().second += f.second;
    } else {
      factors_.push_back(std::move(f));
    }
    degree_ += f.second;
  }
}

Monomial Monomial::variable(std::string name, unsigned exponent) {
  Monomial m;
  if (exponent > 0) {
    m.factors_.emplace_back(std::move(name), exponent);
    m.degree_ = exponent;
  }
  return m;
}

unsigned Monomial::degree_in(std::string_view var) const {
  for (const auto& [name, e] : factors_) {
    if (name == var) return e;
    if (name > var) break;
  }
  return 0;
}

Monomial Monomial::without(std::string_view var) const {
  Monomial m;
  for (const auto& f : factors_) {
    if (f.first == var) continue;
    m.factors_.push_back(f);
    m.degree_ += f.second;
  }
  return m;
}

std::optional<Monomial> Monomial::divide(const Monomial& divisor) const {
  Monomial q;
  std::size_t j = 0;
  for (const auto& [name, e] : factors_) {
    unsigned d = 0;
    if (j < divisor.factors_.size() && divisor.factors_[j].first == name) {
      d = divisor.factors_[j].second;
      ++j;
    } else if (j < divisor.factors_.size() && divisor.factors_[j].first < name) {
      return std::nullopt;
    }
    if (d > e) return std::nullopt;
    if (e > d) {
      q.factors_.emplace_back(name, e - d);
      q.degree_ += e - d;
    }
  }
  if (j != divisor.factors_.size()) return std::nullopt;
  return q;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.factors_.reserve(a.factors_.size() + b.factors_.size());
  std::size_t i = 0, j = 0;
  while (i < a.factors_.size() || j < b.factors_.size()) {
    if (j == b.factors_.size() || (i < a.factors_.size() && a.factors_[i].first < b.factors_[j].first)) {
      m.factors_.push_back(a.factors_[i++]);
    } else if (i == a.factors_.size() || b.factors_[j].first < a.factors_[i].first) {
      m.factors_.push_back(b.factors_[j++]);
    } else {
      m.factors_.emplace_back(a.factors_[i].first, a.factors_[i].second + b.factors_[j].second);
      ++i;
      ++j;
    }
  }
  m.degree_ = a.degree_ + b.degree_;
  return m;
}

Monomial monomial_gcd(const Monomial& a, const Monomial& b) {
  std::vector<Monomial::Factor> out;
  std::size_t j = 0;
  for (const auto& [name, e] : a.factors()) {
    while (j < b.factors().size() && b.factors()[j].first < name) ++j;
    if (j < b.factors().size() && b.factors()[j].first == name) {
      out.emplace_back(name, std::min(e, b.factors()[j].second));
    }
  }
  return Monomial(std::move(out));
}

int compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0;
  for (; i < fa.size() && i < fb.size(); ++i) {
    if (fa[i].first != fb[i].first) {
      // The side holding the smaller name has a positive exponent where the
      // other has none.
      return fa[i].first < fb[i].first ? 1 : -1;
    }
    if (fa[i].second != fb[i].second) return fa[i].second < fb[i].second ? -1 : 1;
  }
  if (i < fa.size()) return 1;
  if (i < fb.size()) return -1;
  return 0;
}

// -------------------------------------------------------------------- Poly

namespace {

void sort_terms(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return compare(a.mono, b.mono) > 0; });
}

// Merges two canonical term lists, b scaled by `sign`.
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i == a.size()) {
      c = -1;
    } else if (j == b.size()) {
      c = 1;
    } else {
      c = compare(a[i].mono, b[j].mono);
    }
    if (c > 0) {
      out.push_back(a[i++]);
    } else if (c < 0) {
      out.push_back(sign > 0 ? b[j] : Term{b[j].mono, -b[j].coef});
      ++j;
    } else {
      mpq_class s = sign > 0 ? mpq_class(a[i].coef + b[j].coef) : mpq_class(a[i].coef - b[j].coef);
      if (sgn(s) != 0) out.push_back(Term{a[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Poly::Poly(const mpq_class& constant) {
  if (sgn(constant) != 0) terms_.push_back(Term{Monomial(), constant});
}

Poly Poly::variable(std::string name) {
  return monomial(Monomial::variable(std::move(name)), 1);
}

Poly Poly::monomial(Monomial mono, mpq_class coef) {
  Poly p;
  if (sgn(coef) != 0) p.terms_.push_back(Term{std::move(mono), std::move(coef)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  sort_terms(terms);
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coef += t.coef;
    } else {
      if (!p.terms_.empty() && sgn(p.terms_.back().coef) == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && sgn(p.terms_.back().coef) == 0) p.terms_.pop_back();
  return p;
}

mpq_class Poly::constant_value() const {
  if (terms_.empty()) return 0;
  assert(is_constant());
  return terms_[0].coef;
}

std::vector<std::string> Poly::variables() const {
  std::set<std::string> names;
  for (const auto& t : terms_)
    for (const auto& f : t.mono.factors()) names.insert(f.first);
  return {names.begin(), names.end()};
}

bool Poly::depends_on(std::string_view var) const {
  for (const auto& t : terms_)
    if (t.mono.degree_in(var) > 0) return true;
  return false;
}

unsigned Poly::degree_in(std::string_view var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.degree_in(var));
  return d;
}

unsigned Poly::total_degree() const {
  return terms_.empty() ? 0 : terms_.front().mono.degree();
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].coef != b.terms_[i].coef) return false;
    if (!(a.terms_[i].mono == b.terms_[i].mono)) return false;
  }
  return true;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly p;
  p.terms_ = merge(a.terms_, b.terms_, 1);
  return p;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly p;
  p.terms_ = merge(a.terms_, b.terms_, -1);
  return p;
}

Poly operator*(const Poly& a, const mpq_class& c) {
  if (sgn(c) == 0) return Poly();
  Poly p = a;
  for (auto& t : p.terms_) t.coef *= c;
  return p;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.is_constant()) return b * a.terms_[0].coef;
  if (b.is_constant()) return a * b.terms_[0].coef;
  const Poly& small = a.terms_.size() <= b.terms_.size() ? a : b;
  const Poly& large = a.terms_.size() <= b.terms_.size() ? b : a;
  if (small.terms_.size() == 1) {
    // A monomial times a canonical list keeps the term order.
    Poly p;
    p.terms_.reserve(large.terms_.size());
    const Term& s = small.terms_[0];
    for (const auto& t : large.terms_) p.terms_.push_back(Term{s.mono * t.mono, s.coef * t.coef});
    return p;
  }
  std::map<Monomial, mpq_class, TermOrderGreater> acc;
  for (const auto& s : small.terms_) {
    for (const auto& t : large.terms_) {
      auto [it, inserted] = acc.try_emplace(s.mono * t.mono, s.coef * t.coef);
      if (!inserted) it->second += s.coef * t.coef;
    }
  }
  Poly p;
  p.terms_.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (sgn(c) != 0) p.terms_.push_back(Term{m, c});
  return p;
}

std::string to_string(const mpq_class& q) {
  return q.get_str();
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    mpq_class c = t.coef;
    if (first) {
      if (sgn(c) < 0) {
        os << '-';
        c = -c;
      }
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
      if (sgn(c) < 0) c = -c;
    }
    first = false;
    if (t.mono.is_one()) {
      os << c.get_str();
      continue;
    }
    if (c != 1) os << c.get_str() << '*';
    bool first_factor = true;
    for (const auto& [name, e] : t.mono.factors()) {
      if (!first_factor) os << '*';
      first_factor = false;
      os << name;
      if (e > 1) os << '^' << e;
    }
  }
  return os.str();
}

Poly pow(const Poly& base, int exponent) {
  if (exponent < 0) throw Error(Errc::InternalInconsistency, "negative exponent for a polynomial power");
  Poly result(1);
  Poly b = base;
  while (exponent > 0) {
    if (exponent & 1) result = result * b;
    exponent >>= 1;
    if (exponent > 0) b = b * b;
  }
  return result;
}

Poly derivative(const Poly& p, std::string_view var) {
  std::vector<Term> out;
  for (const auto& t : p.terms()) {
    unsigned e = t.mono.degree_in(var);
    if (e == 0) continue;
    std::vector<Monomial::Factor> f = t.mono.factors();
    for (auto& fac : f)
      if (fac.first == var) fac.second -= 1;
    out.push_back(Term{Monomial(std::move(f)), t.coef * e});
  }
  return Poly::from_terms(std::move(out));
}

std::vector<Poly> coefficients_in(const Poly& p, std::string_view var) {
  std::vector<std::vector<Term>> buckets(p.degree_in(var) + 1);
  for (const auto& t : p.terms()) buckets[t.mono.degree_in(var)].push_back(Term{t.mono.without(var), t.coef});
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(Poly::from_terms(std::move(b)));
  return out;
}

Poly from_coefficients(const std::vector<Poly>& coeffs, const std::string& var) {
  std::vector<Term> terms;
  for (std::size_t d = 0; d < coeffs.size(); ++d) {
    Monomial v = Monomial::variable(var, static_cast<unsigned>(d));
    for (const auto& t : coeffs[d].terms()) terms.push_back(Term{t.mono * v, t.coef});
  }
  return Poly::from_terms(std::move(terms));
}

std::optional<Poly> exact_divide(const Poly& a, const Poly& b) {
  if (b.is_zero()) return std::nullopt;
  if (a.is_zero()) return Poly();
  if (b.is_constant()) return a * mpq_class(1 / b.constant_value());
  const Term& lb = b.leading();
  std::vector<Term> quotient;
  Poly r = a;
  while (!r.is_zero()) {
    const Term& lr = r.leading();
    auto q = lr.mono.divide(lb.mono);
    if (!q) return std::nullopt;
    Term t{std::move(*q), lr.coef / lb.coef};
    r = r - Poly::monomial(t.mono, t.coef) * b;
    quotient.push_back(std::move(t));
  }
  return Poly::from_terms(std::move(quotient));
}

Poly make_monic(const Poly& p) {
  if (p.is_zero()) return p;
  mpq_class lc = p.leading().coef;
  if (lc == 1) return p;
  return p * mpq_class(1 / lc);
}

Poly make_integral_primitive(const Poly& p) {
  if (p.is_zero()) return p;
  mpz_class den_lcm = 1;
  mpz_class num_gcd = 0;
  for (const auto& t : p.terms()) {
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coef.get_den_mpz_t());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), t.coef.get_num_mpz_t());
  }
  mpq_class scale(den_lcm, num_gcd);
  scale.canonicalize();
  if (sgn(p.leading().coef) < 0) scale = -scale;
  return p * scale;
}

// ------------------------------------------------------------------- GCD

namespace {

using UPoly = std::vector<Poly>;  // coefficients by degree, top entry nonzero

void trim(UPoly& u) {
  while (!u.empty() && u.back().is_zero()) u.pop_back();
}

Poly gcd_impl(const Poly& a, const Poly& b);

Poly must_divide(const Poly& a, const Poly& b) {
  auto q = exact_divide(a, b);
  if (!q) throw Error(Errc::InternalInconsistency, "inexact division inside polynomial gcd");
  return std::move(*q);
}

Poly content(const UPoly& u) {
  Poly g;
  for (const auto& c : u) {
    if (c.is_zero()) continue;
    g = gcd_impl(g, c);
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

UPoly primitive_part(const UPoly& u) {
  Poly c = content(u);
  UPoly out;
  out.reserve(u.size());
  for (const auto& coef : u) {
    out.push_back(must_divide(coef, c));
  }
  // Remove the rational content as well to curb coefficient growth.
  mpz_class den_lcm = 1;
  mpz_class num_gcd = 0;
  for (const auto& coef : out)
    for (const auto& t : coef.terms()) {
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coef.get_den_mpz_t());
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), t.coef.get_num_mpz_t());
    }
  if (num_gcd != 0) {
    mpq_class scale(den_lcm, num_gcd);
    scale.canonicalize();
    if (scale != 1)
      for (auto& coef : out) coef = coef * scale;
  }
  return out;
}

// Pseudo-remainder of a by b (both univariate in the main variable).
UPoly pseudo_remainder(UPoly a, const UPoly& b) {
  const std::size_t db = b.size() - 1;
  const Poly& lb = b.back();
  if (a.size() < b.size()) return a;
  std::size_t steps = a.size() - b.size() + 1;
  while (!a.empty() && a.size() - 1 >= db) {
    const std::size_t shift = a.size() - 1 - db;
    Poly la = a.back();
    for (auto& c : a) c = c * lb;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] = a[i + shift] - la * b[i];
    trim(a);
    --steps;
  }
  // Complete the multiplier lc(b)^(deg a - deg b + 1) so subresultant divisions stay exact.
  if (steps > 0 && !a.empty()) {
    Poly scale = pow(lb, static_cast<int>(steps));
    for (auto& c : a) c = c * scale;
  }
  return a;
}

Poly monomial_content(const Poly& p) {
  Monomial g = p.leading().mono;
  for (const auto& t : p.terms()) {
    g = monomial_gcd(g, t.mono);
    if (g.is_one()) break;
  }
  return Poly::monomial(g, 1);
}

// Arithmetic modulo a 62-bit prime for coprimality certificates.
constexpr std::uint64_t kPrime = 4611686018427387847ULL;  // 2^62 - 57

__extension__ using Wide = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<Wide>(a) * b) % kPrime);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a);
    a = mulmod(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::optional<std::uint64_t> reduce_mod(const mpq_class& q) {
  mpz_class n = q.get_num() % mpz_class(static_cast<unsigned long>(kPrime));
  if (n < 0) n += mpz_class(static_cast<unsigned long>(kPrime));
  mpz_class d = q.get_den() % mpz_class(static_cast<unsigned long>(kPrime));
  if (d == 0) return std::nullopt;
  return mulmod(n.get_ui(), invmod(d.get_ui()));
}

// Image of p in (Z/p)[var] after substituting `values` for all other variables.
std::optional<std::vector<std::uint64_t>> specialize(const Poly& p, const std::string& var,
                                                     const std::map<std::string, std::uint64_t>& values) {
  std::vector<std::uint64_t> out(p.degree_in(var) + 1, 0);
  for (const auto& t : p.terms()) {
    auto c = reduce_mod(t.coef);
    if (!c) return std::nullopt;
    std::uint64_t v = *c;
    unsigned e_main = 0;
    for (const auto& [name, e] : t.mono.factors()) {
      if (name == var) {
        e_main = e;
      } else {
        v = mulmod(v, powmod(values.at(name), e));
      }
    }
    out[e_main] = (out[e_main] + v) % kPrime;
  }
  return out;
}

std::size_t degree_mod(std::vector<std::uint64_t>& u) {
  while (!u.empty() && u.back() == 0) u.pop_back();
  return u.empty() ? 0 : u.size() - 1;
}

// Degree of gcd over Z/p of two dense univariate polynomials.
std::size_t gcd_degree_mod(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
  degree_mod(a);
  degree_mod(b);
  while (!b.empty()) {
    const std::uint64_t inv = invmod(b.back());
    while (a.size() >= b.size() && !a.empty()) {
      const std::uint64_t f = mulmod(a.back(), inv);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] = (a[i + shift] + kPrime - mulmod(f, b[i])) % kPrime;
      degree_mod(a);
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

// True when the gcd provably has degree zero in `var`: the gcd's image under
// a specialization that keeps both leading coefficients divides the images,
// so a trivial image gcd rules out any factor involving `var`.
bool free_of_in_gcd(const Poly& a, const Poly& b, const std::string& var, const std::vector<std::string>& vars) {
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::map<std::string, std::uint64_t> values;
    for (const auto& v : vars) {
      seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
      values[v] = 2 + (seed >> 3) % (kPrime - 3);
    }
    auto sa = specialize(a, var, values);
    auto sb = specialize(b, var, values);
    if (!sa || !sb) return false;
    if (degree_mod(*sa) != a.degree_in(var) || degree_mod(*sb) != b.degree_in(var)) continue;
    return gcd_degree_mod(*sa, *sb) == 0;
  }
  return false;
}

Poly content_in(const Poly& p, const std::string& var) {
  return content(coefficients_in(p, var));
}

Poly gcd_impl(const Poly& a, const Poly& b) {
  if (a.is_zero()) return make_monic(b);
  if (b.is_zero()) return make_monic(a);
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a == b) return make_monic(a);
  // A single term only has monomial divisors.
  if (a.terms().size() == 1)
    return Poly::monomial(monomial_gcd(a.leading().mono, monomial_content(b).leading().mono), 1);
  if (b.terms().size() == 1)
    return Poly::monomial(monomial_gcd(b.leading().mono, monomial_content(a).leading().mono), 1);

  const auto va = a.variables();
  const auto vb = b.variables();
  std::vector<std::string> common;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
  if (common.empty()) return Poly(1);

  std::vector<std::string> all;
  std::set_union(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(all));

  // Variables the gcd cannot involve; if that covers every shared variable the
  // gcd is trivial, otherwise one such variable reduces the problem to contents.
  for (const auto& v : common) {
    if (!free_of_in_gcd(a, b, v, all)) continue;
    if (common.size() == 1) return Poly(1);
    return gcd_impl(content_in(a, v), content_in(b, v));
  }

  // Main variable: the shared variable of smallest degree keeps the PRS short.
  std::string var = common.front();
  unsigned best = std::max(a.degree_in(var), b.degree_in(var));
  for (const auto& v : common) {
    unsigned d = std::max(a.degree_in(v), b.degree_in(v));
    if (d < best) {
      best = d;
      var = v;
    }
  }

  UPoly ua = coefficients_in(a, var);
  UPoly ub = coefficients_in(b, var);
  Poly c = gcd_impl(content(ua), content(ub));
  UPoly pa = primitive_part(ua);
  UPoly pb = primitive_part(ub);
  if (pa.size() < pb.size()) std::swap(pa, pb);

  // Subresultant PRS: exact divisions keep coefficient growth polynomial
  // without a content computation per step.
  Poly g(1), h(1);
  UPoly result;
  while (true) {
    const int delta = static_cast<int>(pa.size() - pb.size());
    UPoly r = pseudo_remainder(pa, pb);
    if (r.empty()) {
      result = pb;
      break;
    }
    if (r.size() == 1) {
      result = UPoly{Poly(1)};
      break;
    }
    Poly divisor = g * pow(h, delta);
    for (auto& coef : r) coef = must_divide(coef, divisor);
    pa = std::move(pb);
    pb = std::move(r);
    g = pa.back();
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      h = must_divide(pow(g, delta), pow(h, delta - 1));
    }
  }
  return make_monic(c * from_coefficients(primitive_part(result), var));
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero() && b.is_zero()) return Poly();
  return gcd_impl(a, b);
}

Poly rename(const Poly& p, const std::map<std::string, std::string>& names) {
  std::vector<Term> terms;
  terms.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    std::vector<Monomial::Factor> f = t.mono.factors();
    for (auto& fac : f) {
      auto it = names.find(fac.first);
      if (it != names.end()) fac.first = it->second;
    }
    terms.push_back(Term{Monomial(std::move(f)), t.coef});
  }
  return Poly::from_terms(std::move(terms));
}

}  // namespace fwdflat
