#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwdflat/linalg.hpp"
#include "fwdflat/scalar.hpp"

namespace fwdflat {

/// Ordered list of coordinate names; the order fixes coefficient indexing.
class Chart {
 public:
  Chart() : vars_(std::make_shared<const std::vector<std::string>>()) {}
  explicit Chart(std::vector<std::string> vars);

  const std::vector<std::string>& vars() const { return *vars_; }
  std::size_t size() const { return vars_->size(); }
  const std::string& operator[](std::size_t i) const { return (*vars_)[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Chart& a, const Chart& b) { return a.vars_ == b.vars_ || *a.vars_ == *b.vars_; }

 private:
  std::shared_ptr<const std::vector<std::string>> vars_;
};

struct VectorField {
  Chart chart;
  Row coeffs;

  static VectorField zero(const Chart& chart);
  /// The coordinate field of `name`.
  static VectorField coordinate(const Chart& chart, std::string_view name);
  std::string to_string() const;
};

struct OneForm {
  Chart chart;
  Row coeffs;

  static OneForm zero(const Chart& chart);
  static OneForm coordinate(const Chart& chart, std::string_view name);
  std::string to_string() const;
};

/// Antisymmetric coefficient matrix; the (i, j) entry multiplies d_i ^ d_j.
struct TwoForm {
  Chart chart;
  Matrix coeffs;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(const Scalar& c, const VectorField& v);
OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator*(const Scalar& c, const OneForm& w);
bool is_zero(const VectorField& v);
bool is_zero(const OneForm& w);

/// Span of vector fields. The stored basis is a generically independent
/// subset of the input, kept in input order and coefficient form.
class Distribution {
 public:
  explicit Distribution(Chart chart = Chart(), const std::vector<VectorField>& fields = {});

  const Chart& chart() const { return chart_; }
  const std::vector<VectorField>& basis() const { return basis_; }
  std::size_t dim() const { return basis_.size(); }
  Matrix matrix() const;

  bool contains(const VectorField& v) const;
  bool includes(const Distribution& other) const;
  std::string to_string() const;

 private:
  Chart chart_;
  std::vector<VectorField> basis_;
  RowSpace space_;
};

class Codistribution {
 public:
  explicit Codistribution(Chart chart = Chart(), const std::vector<OneForm>& forms = {});

  const Chart& chart() const { return chart_; }
  const std::vector<OneForm>& basis() const { return basis_; }
  std::size_t dim() const { return basis_.size(); }
  Matrix matrix() const;

  bool contains(const OneForm& w) const;
  bool includes(const Codistribution& other) const;
  std::string to_string() const;

 private:
  Chart chart_;
  std::vector<OneForm> basis_;
  RowSpace space_;
};

bool same_span(const Distribution& a, const Distribution& b);
bool same_span(const Codistribution& a, const Codistribution& b);

/// Differential of a function, expressed on `chart`.
OneForm differential(const Scalar& g, const Chart& chart);

VectorField lie_bracket(const VectorField& v, const VectorField& w);
TwoForm exterior_derivative(const OneForm& w);
Scalar interior_product(const VectorField& v, const OneForm& w);
OneForm interior_product(const VectorField& v, const TwoForm& omega);
/// Evaluates the two-form on a pair of fields.
Scalar evaluate(const TwoForm& omega, const VectorField& v, const VectorField& w);
/// Lie derivative via the Cartan formula.
OneForm lie_derivative(const VectorField& v, const OneForm& w);

Codistribution annihilator(const Distribution& d);
Distribution annihilator(const Codistribution& p);
Codistribution intersect(const Codistribution& p, const Codistribution& q);
Codistribution sum(const Codistribution& p, const Codistribution& q);

/// Smallest codistribution containing `p0` that is invariant under Lie
/// derivatives along every basis field of `d`.
Codistribution invariant_closure(const Codistribution& p0, const Distribution& d);

bool is_involutive(const Distribution& d);
/// Frobenius condition: every d(omega) vanishes on pairs of fields from the annihilator.
bool is_integrable(const Codistribution& p);

}  // namespace fwdflat
