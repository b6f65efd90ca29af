#include "fwdflat/dtsystem.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "fwdflat/error.hpp"

namespace fwdflat {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

bool reserved_name(const std::string& s) {
  static const std::regex pattern("(th|xi|xp)[0-9]+");
  return std::regex_match(s, pattern);
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

Matrix jacobian_of(const std::vector<Scalar>& funcs, const Chart& chart) {
  Matrix j;
  for (const auto& g : funcs) j.push_back(differential(g, chart).coeffs);
  return j;
}

Matrix map_entries(const Matrix& m, const Bindings& b) {
  Matrix out = m;
  for (auto& row : out)
    for (auto& s : row)
      if (!s.is_constant()) s = substitute(s, b);
  return out;
}

Row mat_vec(const Matrix& m, const Row& v) {
  Row out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!m[i][j].is_zero() && !v[j].is_zero()) out[i] += m[i][j] * v[j];
  return out;
}

Row apply_transposed(const Row& w, const Matrix& m) {
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  Row out(cols);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j].is_zero()) continue;
    for (std::size_t k = 0; k < cols; ++k)
      if (!m[j][k].is_zero()) out[k] += w[j] * m[j][k];
  }
  return out;
}

bool chart_round_trip(const AdaptedChart& c) {
  const Bindings fwd = c.forward_bindings();
  const Bindings inv = c.inverse_bindings();
  for (std::size_t j = 0; j < c.base().size(); ++j)
    if (!(substitute(c.inverse()[j], fwd) == Scalar::variable(c.base()[j]))) return false;
  for (std::size_t i = 0; i < c.adapted().size(); ++i)
    if (!(substitute(c.forward()[i], inv) == Scalar::variable(c.adapted()[i]))) return false;
  return generic_rank(jacobian_of(c.forward(), c.base()), c.base().size()) == c.base().size();
}

}  // namespace

DiscreteSystem::DiscreteSystem(std::string name, std::vector<std::string> states, std::vector<std::string> inputs,
                               std::vector<Scalar> f, std::optional<Point> equilibrium, AdaptedChartHint hint)
    : name_(std::move(name)),
      states_(std::move(states)),
      inputs_(std::move(inputs)),
      f_(std::move(f)),
      equilibrium_(std::move(equilibrium)),
      hint_(std::move(hint)) {
  if (states_.empty()) throw Error(Errc::InvalidSystem, "system has no states");
  if (inputs_.empty()) throw Error(Errc::InvalidSystem, "system has no inputs");
  if (f_.size() != states_.size())
    throw Error(Errc::InvalidSystem, std::to_string(f_.size()) + " equations for " + std::to_string(states_.size()) +
                                         " states");
  std::vector<std::string> all = states_;
  all.insert(all.end(), inputs_.begin(), inputs_.end());
  for (const auto& v : all) {
    if (!valid_identifier(v)) throw Error(Errc::InvalidSystem, "invalid variable name '" + v + "'");
    if (reserved_name(v))
      throw Error(Errc::InvalidSystem, "variable name '" + v + "' is reserved for internal coordinates");
  }
  chart_ = Chart(all);  // rejects duplicates
  const std::set<std::string> known(all.begin(), all.end());
  for (std::size_t i = 0; i < f_.size(); ++i)
    for (const auto& v : f_[i].variables())
      if (!known.count(v))
        throw Error(Errc::InvalidSystem, "equation for " + states_[i] + " uses undeclared variable " + v);
  if (!check_submersive(states_, inputs_, f_))
    throw Error(Errc::SubmersivityFailed, "Jacobian of f with respect to (x, u) has generic rank below n = " +
                                              std::to_string(n()));
  if (equilibrium_) {
    for (const auto& v : all)
      if (!equilibrium_->count(v)) throw Error(Errc::InvalidSystem, "equilibrium lacks a value for " + v);
    for (std::size_t i = 0; i < f_.size(); ++i) {
      mpq_class value;
      try {
        value = eval_at(f_[i], *equilibrium_);
      } catch (const Error&) {
        throw Error(Errc::EquilibriumMismatch, "equation for " + states_[i] + " is singular at the equilibrium");
      }
      if (value != equilibrium_->at(states_[i]))
        throw Error(Errc::EquilibriumMismatch, "f(x0, u0) = " + to_string(value) + " differs from " + states_[i] +
                                                   "0 = " + to_string(equilibrium_->at(states_[i])));
    }
  }
}

Matrix DiscreteSystem::jacobian() const { return jacobian_of(f_, chart_); }

bool check_submersive(const std::vector<std::string>& states, const std::vector<std::string>& inputs,
                      const std::vector<Scalar>& f) {
  std::vector<std::string> all = states;
  all.insert(all.end(), inputs.begin(), inputs.end());
  const Chart chart(all);
  return generic_rank(jacobian_of(f, chart), chart.size()) == states.size();
}

bool check_submersive(const DiscreteSystem& sys) { return check_submersive(sys.states(), sys.inputs(), sys.f()); }

std::size_t input_rank(const DiscreteSystem& sys) {
  Matrix ju;
  for (const auto& g : sys.f()) {
    Row r;
    for (const auto& u : sys.inputs()) r.push_back(differentiate(g, u));
    ju.push_back(std::move(r));
  }
  return generic_rank(ju, sys.m());
}

std::string adapted_theta(std::size_t i) { return "th" + std::to_string(i + 1); }
std::string adapted_xi(std::size_t j) { return "xi" + std::to_string(j + 1); }
std::string xplus_name(std::size_t i) { return "xp" + std::to_string(i + 1); }

Chart xplus_chart(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(xplus_name(i));
  return Chart(v);
}

AdaptedChart::AdaptedChart(const DiscreteSystem& sys, std::vector<std::string> xi_vars, std::vector<Scalar> inverse)
    : base_(sys.chart()), n_(sys.n()), xi_vars_(std::move(xi_vars)), inverse_(std::move(inverse)) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < sys.n(); ++i) names.push_back(adapted_theta(i));
  for (std::size_t j = 0; j < sys.m(); ++j) names.push_back(adapted_xi(j));
  adapted_ = Chart(names);
  forward_ = sys.f();
  for (const auto& v : xi_vars_) forward_.push_back(Scalar::variable(v));
  if (inverse_.size() != base_.size())
    throw Error(Errc::HintInvalid, "inverse map needs one expression per variable of (x, u)");

  const Bindings to_y = inverse_bindings();
  const Bindings to_z = forward_bindings();
  Matrix jf = jacobian_of(forward_, base_);
  Matrix ji = jacobian_of(inverse_, adapted_);
  jac_forward_ = map_entries(jf, to_y);
  jac_inverse_ = map_entries(ji, to_z);
}

Bindings AdaptedChart::inverse_bindings() const {
  Bindings b;
  for (std::size_t j = 0; j < base_.size(); ++j) b[base_[j]] = inverse_[j];
  return b;
}

Bindings AdaptedChart::forward_bindings() const {
  Bindings b;
  for (std::size_t i = 0; i < adapted_.size(); ++i) b[adapted_[i]] = forward_[i];
  return b;
}

Scalar AdaptedChart::to_adapted(const Scalar& g) const { return substitute(g, inverse_bindings()); }
Scalar AdaptedChart::to_base(const Scalar& g) const { return substitute(g, forward_bindings()); }

VectorField AdaptedChart::to_adapted(const VectorField& v) const {
  if (!(v.chart == base_)) throw Error(Errc::ChartMismatch, "vector field is not on the (x, u) chart");
  const Bindings b = inverse_bindings();
  Row coeffs;
  for (const auto& c : v.coeffs) coeffs.push_back(c.is_constant() ? c : substitute(c, b));
  return {adapted_, mat_vec(jac_forward_, coeffs)};
}

VectorField AdaptedChart::to_base(const VectorField& v) const {
  if (!(v.chart == adapted_)) throw Error(Errc::ChartMismatch, "vector field is not on the adapted chart");
  const Bindings b = forward_bindings();
  Row coeffs;
  for (const auto& c : v.coeffs) coeffs.push_back(c.is_constant() ? c : substitute(c, b));
  return {base_, mat_vec(jac_inverse_, coeffs)};
}

OneForm AdaptedChart::to_adapted(const OneForm& w) const {
  if (!(w.chart == base_)) throw Error(Errc::ChartMismatch, "one-form is not on the (x, u) chart");
  const Bindings b = inverse_bindings();
  Row coeffs;
  for (const auto& c : w.coeffs) coeffs.push_back(c.is_constant() ? c : substitute(c, b));
  // dz_j = sum_k d(inverse_j)/dy_k dy_k with the inverse Jacobian in adapted variables.
  Matrix ji = jacobian_of(inverse_, adapted_);
  return {adapted_, apply_transposed(coeffs, ji)};
}

OneForm AdaptedChart::to_base(const OneForm& w) const {
  if (!(w.chart == adapted_)) throw Error(Errc::ChartMismatch, "one-form is not on the adapted chart");
  const Bindings b = forward_bindings();
  Row coeffs;
  for (const auto& c : w.coeffs) coeffs.push_back(c.is_constant() ? c : substitute(c, b));
  Matrix jf = jacobian_of(forward_, base_);
  return {base_, apply_transposed(coeffs, jf)};
}

Distribution AdaptedChart::to_adapted(const Distribution& d) const {
  std::vector<VectorField> out;
  for (const auto& v : d.basis()) out.push_back(to_adapted(v));
  return Distribution(adapted_, out);
}

Distribution AdaptedChart::to_base(const Distribution& d) const {
  std::vector<VectorField> out;
  for (const auto& v : d.basis()) out.push_back(to_base(v));
  return Distribution(base_, out);
}

Codistribution AdaptedChart::to_adapted(const Codistribution& p) const {
  std::vector<OneForm> out;
  for (const auto& w : p.basis()) out.push_back(to_adapted(w));
  return Codistribution(adapted_, out);
}

Codistribution AdaptedChart::to_base(const Codistribution& p) const {
  std::vector<OneForm> out;
  for (const auto& w : p.basis()) out.push_back(to_base(w));
  return Codistribution(base_, out);
}

TriangularSolution solve_triangular(std::vector<Scalar> residuals, const std::vector<std::string>& unknowns) {
  TriangularSolution sol;
  std::vector<bool> eq_open(residuals.size(), true);
  std::vector<bool> var_open(unknowns.size(), true);
  std::size_t remaining = unknowns.size();
  while (remaining > 0) {
    std::size_t best_eq = residuals.size(), best_var = unknowns.size(), best_count = unknowns.size() + 1;
    for (std::size_t e = 0; e < residuals.size(); ++e) {
      if (!eq_open[e]) continue;
      std::vector<std::size_t> deps;
      for (std::size_t v = 0; v < unknowns.size(); ++v)
        if (var_open[v] && residuals[e].depends_on(unknowns[v])) deps.push_back(v);
      if (deps.empty() || deps.size() >= best_count) continue;
      for (std::size_t v : deps) {
        if (is_linear_in(residuals[e], unknowns[v])) {
          best_eq = e;
          best_var = v;
          best_count = deps.size();
          break;
        }
      }
    }
    if (best_eq == residuals.size()) {
      for (std::size_t e = 0; e < residuals.size(); ++e)
        if (eq_open[e]) sol.stuck.push_back(residuals[e]);
      return sol;
    }
    const std::string& var = unknowns[best_var];
    Scalar value = solve_linear_in(residuals[best_eq], Scalar(0), var);
    const Bindings b{{var, value}};
    eq_open[best_eq] = false;
    var_open[best_var] = false;
    --remaining;
    for (std::size_t e = 0; e < residuals.size(); ++e)
      if (eq_open[e] && residuals[e].depends_on(var)) residuals[e] = substitute(residuals[e], b);
    for (auto& [name, expr] : sol.values)
      if (expr.depends_on(var)) expr = substitute(expr, b);
    sol.values[var] = value;
    sol.order.push_back(var);
  }
  for (std::size_t e = 0; e < residuals.size(); ++e)
    if (eq_open[e] && !residuals[e].is_zero()) sol.stuck.push_back(residuals[e]);
  sol.solved = sol.stuck.empty();
  return sol;
}

namespace {

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

AdaptedChart chart_from_hint_inverse(const DiscreteSystem& sys) {
  const auto& hint = sys.hint();
  if (hint.xi_vars.size() != sys.m())
    throw Error(Errc::HintInvalid, "an inverse hint needs exactly m = " + std::to_string(sys.m()) + " xi variables");
  std::vector<Scalar> inverse;
  for (const auto& v : sys.chart().vars()) {
    auto pos = std::find(hint.xi_vars.begin(), hint.xi_vars.end(), v);
    if (pos != hint.xi_vars.end()) {
      inverse.push_back(Scalar::variable(adapted_xi(static_cast<std::size_t>(pos - hint.xi_vars.begin()))));
      continue;
    }
    auto it = hint.inverse.find(v);
    if (it == hint.inverse.end()) throw Error(Errc::HintInvalid, "inverse hint has no expression for " + v);
    inverse.push_back(it->second);
  }
  AdaptedChart chart(sys, hint.xi_vars, inverse);
  for (const auto& g : inverse)
    for (const auto& name : g.variables())
      if (!chart.adapted().index_of(name))
        throw Error(Errc::HintInvalid, "inverse hint uses " + name + ", which is not an adapted coordinate");
  bool ok = false;
  try {
    ok = chart_round_trip(chart);
  } catch (const Error&) {
    ok = false;
  }
  if (!ok) throw Error(Errc::HintInvalid, "inverse hint does not invert th = f(x, u), xi = (" + join(hint.xi_vars) + ")");
  return chart;
}

}  // namespace

AdaptedChart build_adapted_chart(const DiscreteSystem& sys) {
  const auto& hint = sys.hint();
  if (!hint.inverse.empty()) return chart_from_hint_inverse(sys);

  const Chart& base = sys.chart();
  std::vector<std::vector<std::size_t>> candidates;
  if (!hint.xi_vars.empty()) {
    if (hint.xi_vars.size() != sys.m())
      throw Error(Errc::HintInvalid, "chart hint must name exactly m = " + std::to_string(sys.m()) + " variables");
    std::vector<std::size_t> idx;
    for (const auto& v : hint.xi_vars) {
      auto i = base.index_of(v);
      if (!i) throw Error(Errc::HintInvalid, "chart hint names unknown variable " + v);
      if (std::find(idx.begin(), idx.end(), *i) != idx.end()) throw Error(Errc::HintInvalid, "chart hint repeats " + v);
      idx.push_back(*i);
    }
    candidates.push_back(idx);
  } else {
    candidates = subsets(base.size(), sys.m());
  }

  const Matrix jac = sys.jacobian();
  std::string first_failure;
  for (const auto& subset : candidates) {
    std::vector<std::string> xi;
    std::vector<std::string> unknowns;
    std::vector<bool> in_subset(base.size(), false);
    for (auto i : subset) in_subset[i] = true;
    for (auto i : subset) xi.push_back(base[i]);
    Matrix reduced;
    for (const auto& row : jac) {
      Row r;
      for (std::size_t j = 0; j < base.size(); ++j)
        if (!in_subset[j]) r.push_back(row[j]);
      reduced.push_back(std::move(r));
    }
    if (generic_rank(reduced, base.size() - subset.size()) != sys.n()) continue;
    for (std::size_t j = 0; j < base.size(); ++j)
      if (!in_subset[j]) unknowns.push_back(base[j]);

    Bindings xi_sub;
    for (std::size_t j = 0; j < xi.size(); ++j) xi_sub[xi[j]] = Scalar::variable(adapted_xi(j));
    std::vector<Scalar> residuals;
    for (std::size_t i = 0; i < sys.n(); ++i)
      residuals.push_back(substitute(sys.f()[i], xi_sub) - Scalar::variable(adapted_theta(i)));

    TriangularSolution sol = solve_triangular(residuals, unknowns);
    if (!sol.solved) {
      if (first_failure.empty()) {
        first_failure = "xi = (" + join(xi) + ") leaves";
        for (const auto& r : sol.stuck) first_failure += " [" + r.to_string() + " = 0]";
      }
      continue;
    }
    std::vector<Scalar> inverse;
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (in_subset[j]) {
        auto pos = std::find(xi.begin(), xi.end(), base[j]) - xi.begin();
        inverse.push_back(Scalar::variable(adapted_xi(static_cast<std::size_t>(pos))));
      } else {
        inverse.push_back(sol.values.at(base[j]));
      }
    }
    AdaptedChart chart(sys, xi, inverse);
    if (chart_round_trip(chart)) return chart;
    if (first_failure.empty()) first_failure = "xi = (" + join(xi) + ") failed the round-trip check";
  }
  if (first_failure.empty()) first_failure = "no selection of xi coordinates gives a regular Jacobian";
  throw Error(Errc::InversionFailed,
              "no triangular inversion of th = f(x, u) found; " + first_failure +
                  "; provide a chart hint such as 'xi = <m variables>' or an explicit inverse");
}

VectorField pushforward_projectable(const VectorField& v, const AdaptedChart& chart) {
  if (!(v.chart == chart.adapted())) throw Error(Errc::ChartMismatch, "pushforward expects an adapted-chart field");
  const std::size_t n = chart.n();
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < n; ++i) names[adapted_theta(i)] = xplus_name(i);
  VectorField out = VectorField::zero(xplus_chart(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar& c = v.coeffs[i];
    for (std::size_t j = n; j < chart.adapted().size(); ++j)
      if (c.depends_on(chart.adapted()[j]))
        throw Error(Errc::NotProjectable, "coefficient " + c.to_string() + " of d_" + adapted_theta(i) +
                                              " depends on " + chart.adapted()[j]);
    out.coeffs[i] = rename(c, names);
  }
  return out;
}

Distribution pullback_pi(const Distribution& delta, const DiscreteSystem& sys) {
  const Chart& z = sys.chart();
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < sys.n(); ++i) names[xplus_name(i)] = sys.states()[i];
  std::vector<VectorField> fields;
  for (const auto& v : delta.basis()) {
    VectorField w = VectorField::zero(z);
    for (std::size_t i = 0; i < sys.n(); ++i) w.coeffs[i] = rename(v.coeffs[i], names);
    fields.push_back(std::move(w));
  }
  for (const auto& u : sys.inputs()) fields.push_back(VectorField::coordinate(z, u));
  return Distribution(z, fields);
}

Codistribution backward_shift_codistribution(const Codistribution& pplus, const AdaptedChart& chart,
                                             const DiscreteSystem& sys) {
  if (!(pplus.chart() == chart.adapted()))
    throw Error(Errc::ChartMismatch, "backward shift expects an adapted-chart codistribution");
  const std::size_t n = chart.n();
  const std::size_t total = chart.adapted().size();
  Echelon e = reduced_echelon(pplus.matrix(), total);
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < n; ++i) names[adapted_theta(i)] = sys.states()[i];
  std::vector<OneForm> forms;
  for (const auto& row : e.rows) {
    OneForm w = OneForm::zero(sys.chart());
    for (std::size_t j = 0; j < total; ++j) {
      const Scalar& c = row[j];
      if (c.is_zero()) continue;
      if (j >= n)
        throw Error(Errc::NotShiftable, "codistribution is not contained in span{dth}: component along d" +
                                            chart.adapted()[j]);
      for (std::size_t k = n; k < total; ++k)
        if (c.depends_on(chart.adapted()[k]))
          throw Error(Errc::NotShiftable, "no basis with coefficients free of " + chart.adapted()[k] + " (coefficient " +
                                              c.to_string() + ")");
      w.coeffs[j] = rename(c, names);
    }
    forms.push_back(std::move(w));
  }
  return Codistribution(sys.chart(), forms);
}

Scalar forward_shift(const Scalar& g, const DiscreteSystem& sys) {
  Bindings b;
  for (std::size_t i = 0; i < sys.n(); ++i) b[sys.states()[i]] = sys.f()[i];
  for (const auto& v : g.variables())
    if (!b.count(v)) throw Error(Errc::UnsupportedShift, "forward shift is only modeled for functions of the state; " +
                                                              g.to_string() + " depends on " + v);
  return substitute(g, b);
}

}  // namespace fwdflat
