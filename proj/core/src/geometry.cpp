#include "fwdflat/geometry.hpp"

#include <algorithm>
#include <set>

#include "fwdflat/error.hpp"

namespace fwdflat {

namespace {

void require_same(const Chart& a, const Chart& b, const char* what) {
  if (!(a == b)) throw Error(Errc::ChartMismatch, std::string(what) + ": operands live on different charts");
}

std::string render(const Chart& chart, const Row& coeffs, const char* prefix) {
  std::string out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const Scalar& c = coeffs[i];
    if (c.is_zero()) continue;
    std::string basis = std::string(prefix) + chart[i];
    std::string piece;
    if (c == Scalar(1)) {
      piece = basis;
    } else if (c == Scalar(-1)) {
      piece = "-" + basis;
    } else {
      piece = "(" + c.to_string() + ")*" + basis;
    }
    if (!out.empty()) out += " + ";
    out += piece;
  }
  return out.empty() ? "0" : out;
}

}  // namespace

Chart::Chart(std::vector<std::string> vars) {
  std::set<std::string> seen;
  for (const auto& v : vars)
    if (!seen.insert(v).second) throw Error(Errc::InvalidSystem, "duplicate chart variable " + v);
  vars_ = std::make_shared<const std::vector<std::string>>(std::move(vars));
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_->size(); ++i)
    if ((*vars_)[i] == name) return i;
  return std::nullopt;
}

VectorField VectorField::zero(const Chart& chart) { return {chart, Row(chart.size())}; }

VectorField VectorField::coordinate(const Chart& chart, std::string_view name) {
  auto idx = chart.index_of(name);
  if (!idx) throw Error(Errc::ChartMismatch, "no coordinate " + std::string(name) + " in chart");
  VectorField v = zero(chart);
  v.coeffs[*idx] = Scalar(1);
  return v;
}

std::string VectorField::to_string() const { return render(chart, coeffs, "d_"); }

OneForm OneForm::zero(const Chart& chart) { return {chart, Row(chart.size())}; }

OneForm OneForm::coordinate(const Chart& chart, std::string_view name) {
  auto idx = chart.index_of(name);
  if (!idx) throw Error(Errc::ChartMismatch, "no coordinate " + std::string(name) + " in chart");
  OneForm w = zero(chart);
  w.coeffs[*idx] = Scalar(1);
  return w;
}

std::string OneForm::to_string() const { return render(chart, coeffs, "d"); }

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same(a.chart, b.chart, "vector field sum");
  VectorField out = a;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += b.coeffs[i];
  return out;
}

VectorField operator*(const Scalar& c, const VectorField& v) {
  VectorField out = v;
  for (auto& s : out.coeffs) s *= c;
  return out;
}

OneForm operator+(const OneForm& a, const OneForm& b) {
  require_same(a.chart, b.chart, "one-form sum");
  OneForm out = a;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += b.coeffs[i];
  return out;
}

OneForm operator*(const Scalar& c, const OneForm& w) {
  OneForm out = w;
  for (auto& s : out.coeffs) s *= c;
  return out;
}

bool is_zero(const VectorField& v) { return is_zero_row(v.coeffs); }
bool is_zero(const OneForm& w) { return is_zero_row(w.coeffs); }

Distribution::Distribution(Chart chart, const std::vector<VectorField>& fields)
    : chart_(std::move(chart)), space_(chart_.size()) {
  for (const auto& v : fields) {
    require_same(chart_, v.chart, "distribution");
    if (space_.add(v.coeffs)) basis_.push_back(v);
  }
}

Matrix Distribution::matrix() const {
  Matrix m;
  for (const auto& v : basis_) m.push_back(v.coeffs);
  return m;
}

bool Distribution::contains(const VectorField& v) const {
  require_same(chart_, v.chart, "distribution membership");
  return space_.contains(v.coeffs);
}

bool Distribution::includes(const Distribution& other) const {
  return std::all_of(other.basis_.begin(), other.basis_.end(), [&](const auto& v) { return contains(v); });
}

std::string Distribution::to_string() const {
  std::string out = "span{";
  for (std::size_t i = 0; i < basis_.size(); ++i) out += (i ? ", " : "") + basis_[i].to_string();
  return out + "}";
}

Codistribution::Codistribution(Chart chart, const std::vector<OneForm>& forms)
    : chart_(std::move(chart)), space_(chart_.size()) {
  for (const auto& w : forms) {
    require_same(chart_, w.chart, "codistribution");
    if (space_.add(w.coeffs)) basis_.push_back(w);
  }
}

Matrix Codistribution::matrix() const {
  Matrix m;
  for (const auto& w : basis_) m.push_back(w.coeffs);
  return m;
}

bool Codistribution::contains(const OneForm& w) const {
  require_same(chart_, w.chart, "codistribution membership");
  return space_.contains(w.coeffs);
}

bool Codistribution::includes(const Codistribution& other) const {
  return std::all_of(other.basis_.begin(), other.basis_.end(), [&](const auto& w) { return contains(w); });
}

std::string Codistribution::to_string() const {
  std::string out = "span{";
  for (std::size_t i = 0; i < basis_.size(); ++i) out += (i ? ", " : "") + basis_[i].to_string();
  return out + "}";
}

bool same_span(const Distribution& a, const Distribution& b) {
  return a.chart() == b.chart() && a.dim() == b.dim() && a.includes(b) && b.includes(a);
}

bool same_span(const Codistribution& a, const Codistribution& b) {
  return a.chart() == b.chart() && a.dim() == b.dim() && a.includes(b) && b.includes(a);
}

OneForm differential(const Scalar& g, const Chart& chart) {
  OneForm w = OneForm::zero(chart);
  for (std::size_t i = 0; i < chart.size(); ++i) w.coeffs[i] = differentiate(g, chart[i]);
  return w;
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  require_same(v.chart, w.chart, "lie_bracket");
  const Chart& chart = v.chart;
  VectorField out = VectorField::zero(chart);
  for (std::size_t j = 0; j < chart.size(); ++j) {
    const bool vj = !v.coeffs[j].is_zero(), wj = !w.coeffs[j].is_zero();
    if (!vj && !wj) continue;
    for (std::size_t i = 0; i < chart.size(); ++i) {
      if (vj) out.coeffs[i] += v.coeffs[j] * differentiate(w.coeffs[i], chart[j]);
      if (wj) out.coeffs[i] -= w.coeffs[j] * differentiate(v.coeffs[i], chart[j]);
    }
  }
  return out;
}

TwoForm exterior_derivative(const OneForm& w) {
  const std::size_t n = w.chart.size();
  TwoForm out{w.chart, Matrix(n, Row(n))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Scalar c = differentiate(w.coeffs[j], w.chart[i]) - differentiate(w.coeffs[i], w.chart[j]);
      out.coeffs[j][i] = -c;
      out.coeffs[i][j] = std::move(c);
    }
  return out;
}

Scalar interior_product(const VectorField& v, const OneForm& w) {
  require_same(v.chart, w.chart, "interior_product");
  Scalar out;
  for (std::size_t i = 0; i < v.coeffs.size(); ++i)
    if (!v.coeffs[i].is_zero() && !w.coeffs[i].is_zero()) out += v.coeffs[i] * w.coeffs[i];
  return out;
}

OneForm interior_product(const VectorField& v, const TwoForm& omega) {
  require_same(v.chart, omega.chart, "interior_product");
  OneForm out = OneForm::zero(v.chart);
  for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
    if (v.coeffs[i].is_zero()) continue;
    for (std::size_t j = 0; j < v.coeffs.size(); ++j)
      if (!omega.coeffs[i][j].is_zero()) out.coeffs[j] += v.coeffs[i] * omega.coeffs[i][j];
  }
  return out;
}

Scalar evaluate(const TwoForm& omega, const VectorField& v, const VectorField& w) {
  require_same(w.chart, omega.chart, "two-form evaluation");
  OneForm partial = interior_product(v, omega);
  return interior_product(w, partial);
}

OneForm lie_derivative(const VectorField& v, const OneForm& w) {
  require_same(v.chart, w.chart, "lie_derivative");
  return interior_product(v, exterior_derivative(w)) + differential(interior_product(v, w), v.chart);
}

Codistribution annihilator(const Distribution& d) {
  std::vector<OneForm> forms;
  for (auto& row : kernel_basis(d.matrix(), d.chart().size())) forms.push_back({d.chart(), std::move(row)});
  return Codistribution(d.chart(), forms);
}

Distribution annihilator(const Codistribution& p) {
  std::vector<VectorField> fields;
  for (auto& row : kernel_basis(p.matrix(), p.chart().size())) fields.push_back({p.chart(), std::move(row)});
  return Distribution(p.chart(), fields);
}

Codistribution intersect(const Codistribution& p, const Codistribution& q) {
  require_same(p.chart(), q.chart(), "intersect");
  const Chart& chart = p.chart();
  if (p.dim() == 0 || q.dim() == 0) return Codistribution(chart);
  // a*P + b*Q = 0 gives the common element a*P.
  Matrix stacked = p.matrix();
  for (const auto& w : q.basis()) stacked.push_back(w.coeffs);
  Matrix relations = kernel_basis(transpose(stacked, chart.size()), stacked.size());
  std::vector<OneForm> common;
  for (const auto& rel : relations) {
    OneForm w = OneForm::zero(chart);
    for (std::size_t i = 0; i < p.dim(); ++i)
      if (!rel[i].is_zero()) w = w + rel[i] * p.basis()[i];
    common.push_back(std::move(w));
  }
  return Codistribution(chart, common);
}

Codistribution sum(const Codistribution& p, const Codistribution& q) {
  require_same(p.chart(), q.chart(), "sum");
  std::vector<OneForm> all = p.basis();
  all.insert(all.end(), q.basis().begin(), q.basis().end());
  return Codistribution(p.chart(), all);
}

Codistribution invariant_closure(const Codistribution& p0, const Distribution& d) {
  require_same(p0.chart(), d.chart(), "invariant_closure");
  std::vector<OneForm> basis = p0.basis();
  RowSpace space(p0.chart().size());
  for (const auto& w : basis) space.add(w.coeffs);
  for (std::size_t next = 0; next < basis.size(); ++next) {
    for (const auto& v : d.basis()) {
      OneForm lw = lie_derivative(v, basis[next]);
      if (space.add(lw.coeffs)) basis.push_back(std::move(lw));
    }
  }
  return Codistribution(p0.chart(), basis);
}

bool is_involutive(const Distribution& d) {
  const auto& b = d.basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (!d.contains(lie_bracket(b[i], b[j]))) return false;
  return true;
}

bool is_integrable(const Codistribution& p) {
  Distribution kernel = annihilator(p);
  const auto& k = kernel.basis();
  for (const auto& w : p.basis()) {
    TwoForm dw = exterior_derivative(w);
    for (std::size_t a = 0; a < k.size(); ++a) {
      OneForm partial = interior_product(k[a], dw);
      for (std::size_t b = a + 1; b < k.size(); ++b)
        if (!interior_product(k[b], partial).is_zero()) return false;
    }
  }
  return true;
}

}  // namespace fwdflat
