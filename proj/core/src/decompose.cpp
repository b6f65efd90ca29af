#include "fwdflat/decompose.hpp"

#include <algorithm>
#include <regex>

#include "fwdflat/error.hpp"
#include "fwdflat/flatness.hpp"

namespace fwdflat {

std::string to_string(IntegralMethod m) {
  switch (m) {
    case IntegralMethod::CoordinatePick: return "coordinate-pick";
    case IntegralMethod::ConstantCombination: return "constant-combination";
    case IntegralMethod::Exact: return "exact";
    case IntegralMethod::IntegratingFactor: return "integrating-factor";
    case IntegralMethod::UserHint: return "user-hint";
  }
  return "unknown";
}

std::string fresh_prefix(std::string base, const std::vector<std::string>& taken) {
  for (;;) {
    const std::regex pattern(base + "[0-9]+");
    bool clash = std::any_of(taken.begin(), taken.end(), [&](const std::string& v) { return std::regex_match(v, pattern); });
    if (!clash) return base;
    base += 'b';
  }
}

namespace {

std::vector<std::string> numbered(const std::string& prefix, std::size_t count, std::size_t start = 1) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(start + i));
  return out;
}

Bindings bindings_of(const std::vector<std::string>& names, const std::vector<Scalar>& values) {
  Bindings b;
  for (std::size_t i = 0; i < names.size(); ++i) b[names[i]] = values[i];
  return b;
}

bool all_constant(const Row& r) {
  return std::all_of(r.begin(), r.end(), [](const Scalar& s) { return s.is_constant(); });
}

bool is_closed(const OneForm& w) {
  TwoForm d = exterior_derivative(w);
  for (const auto& row : d.coeffs)
    if (!is_zero_row(row)) return false;
  return true;
}

// Rational antiderivative in `var`, available when the denominator is free of `var`.
std::optional<Scalar> antiderivative(const Scalar& r, const std::string& var) {
  if (r.den().depends_on(var)) return std::nullopt;
  std::vector<Poly> c = coefficients_in(r.num(), var);
  std::vector<Poly> lifted(c.size() + 1);
  for (std::size_t k = 0; k < c.size(); ++k) lifted[k + 1] = c[k] * mpq_class(1, static_cast<long>(k + 1));
  return Scalar::fraction(from_coefficients(lifted, var), r.den());
}

std::optional<Scalar> potential(const OneForm& w) {
  const Chart& c = w.chart;
  Scalar g;
  for (std::size_t i = 0; i < c.size(); ++i) {
    Scalar r = w.coeffs[i] - differentiate(g, c[i]);
    if (r.is_zero()) continue;
    for (std::size_t j = 0; j < i; ++j)
      if (r.depends_on(c[j])) return std::nullopt;
    auto a = antiderivative(r, c[i]);
    if (!a) return std::nullopt;
    g += *a;
  }
  if (differential(g, c).coeffs != w.coeffs) return std::nullopt;
  return g;
}

std::optional<Scalar> integrate_with_factor(const OneForm& w) {
  std::vector<std::string> vars;
  for (const auto& c : w.coeffs)
    for (const auto& v : c.variables())
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  if (vars.empty() || vars.size() > 4) return std::nullopt;
  std::vector<std::vector<int>> exps{{}};
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& e : exps)
      for (int k = -2; k <= 2; ++k) {
        auto f = e;
        f.push_back(k);
        next.push_back(std::move(f));
      }
    exps = std::move(next);
  }
  auto weight = [](const std::vector<int>& e) {
    int s = 0;
    for (int k : e) s += std::abs(k);
    return s;
  };
  std::stable_sort(exps.begin(), exps.end(), [&](const auto& a, const auto& b) { return weight(a) < weight(b); });
  for (const auto& e : exps) {
    if (weight(e) == 0) continue;
    Scalar mu(1);
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (e[i]) mu *= pow(Scalar::variable(vars[i]), e[i]);
    OneForm scaled = mu * w;
    if (!is_closed(scaled)) continue;
    if (auto g = potential(scaled)) return g;
  }
  return std::nullopt;
}

Scalar linear_function(const Row& r, const Chart& c) {
  Scalar g;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (!r[j].is_zero()) g += r[j] * Scalar::variable(c[j]);
  return g;
}

IntegralMethod linear_method(const Row& r) {
  std::size_t nonzero = 0;
  bool unit = true;
  for (const auto& s : r)
    if (!s.is_zero()) {
      ++nonzero;
      unit = unit && s == Scalar(1);
    }
  return nonzero == 1 && unit ? IntegralMethod::CoordinatePick : IntegralMethod::ConstantCombination;
}

}  // namespace

FirstIntegralSet find_first_integrals(const Codistribution& p, const std::vector<std::string>& states,
                                      const std::vector<Scalar>& hints) {
  const Chart x(states);
  const std::size_t n = states.size();
  std::vector<OneForm> forms;
  for (const auto& w : p.basis()) {
    OneForm r = OneForm::zero(x);
    for (std::size_t j = 0; j < w.chart.size(); ++j) {
      const Scalar& c = w.coeffs[j];
      if (c.is_zero()) continue;
      auto idx = x.index_of(w.chart[j]);
      if (!idx) throw Error(Errc::IntegralsNotFound, "form " + w.to_string() + " is not in span{dx}");
      r.coeffs[*idx] = c;
    }
    for (const auto& c : r.coeffs)
      for (const auto& v : c.variables())
        if (!x.index_of(v)) throw Error(Errc::IntegralsNotFound, "form " + w.to_string() + " depends on " + v);
    forms.push_back(std::move(r));
  }
  const Codistribution px(x, forms);
  const Echelon e = reduced_echelon(px.matrix(), n);

  std::vector<std::pair<Scalar, IntegralMethod>> candidates;
  for (const auto& h : hints) {
    bool local = true;
    for (const auto& v : h.variables()) local = local && x.index_of(v).has_value();
    if (local) candidates.emplace_back(h, IntegralMethod::UserHint);
  }
  for (const auto& w : px.basis())
    if (all_constant(w.coeffs)) candidates.emplace_back(linear_function(w.coeffs, x), linear_method(w.coeffs));
  for (const auto& row : e.rows) {
    if (all_constant(row)) {
      candidates.emplace_back(linear_function(row, x), linear_method(row));
      continue;
    }
    OneForm w{x, row};
    if (is_closed(w))
      if (auto g = potential(w)) {
        candidates.emplace_back(*g, IntegralMethod::Exact);
        continue;
      }
    // The row rescaled to a unit coefficient on each of its entries.
    for (const auto& c : row) {
      if (c.is_zero()) continue;
      if (auto g = integrate_with_factor(Scalar(1) / c * w)) {
        candidates.emplace_back(*g, IntegralMethod::IntegratingFactor);
        break;
      }
    }
  }

  FirstIntegralSet out;
  RowSpace span(n);
  for (const auto& [g, method] : candidates) {
    if (out.functions.size() == px.dim()) break;
    OneForm dg = differential(g, x);
    if (is_zero(dg) || !px.contains(dg) || span.contains(dg.coeffs)) continue;
    span.add(dg.coeffs);
    out.functions.push_back(g);
    out.methods.push_back(method);
  }
  if (out.functions.size() < px.dim()) {
    std::string residual;
    for (const auto& row : e.rows)
      if (!span.contains(row)) residual += (residual.empty() ? "" : ", ") + OneForm{x, row}.to_string();
    throw Error(Errc::IntegralsNotFound, "found " + std::to_string(out.functions.size()) + " of " +
                                             std::to_string(px.dim()) + " first integrals; no integral found for " +
                                             residual + "; supply integrals as hints");
  }
  return out;
}

namespace {

Matrix jacobian_in(const std::vector<Scalar>& funcs, const std::vector<std::string>& vars) {
  Matrix j;
  for (const auto& g : funcs) {
    Row r;
    for (const auto& v : vars) r.push_back(differentiate(g, v));
    j.push_back(std::move(r));
  }
  return j;
}

struct InputChoice {
  std::vector<std::size_t> rows;
  std::vector<Scalar> transform;  // in old (x, u)
  std::vector<Scalar> inverse;    // old inputs in new states and inputs
  std::vector<Scalar> f;
};

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

// Normalizes the equations `rows` and completes with the lowest-index original inputs.
std::optional<InputChoice> try_inputs(const DiscreteSystem& sys, const std::vector<std::size_t>& rows,
                                      const std::vector<Scalar>& shifted, const std::vector<Scalar>& fbar,
                                      const std::vector<std::string>& names, std::string& failure) {
  const std::size_t m = sys.m();
  InputChoice c;
  c.rows = rows;
  std::vector<Scalar> defs_new;  // new inputs in new states and old inputs
  RowSpace span(m);
  for (auto r : rows) {
    c.transform.push_back(shifted[r]);
    defs_new.push_back(fbar[r]);
    span.add(jacobian_in({fbar[r]}, sys.inputs())[0]);
  }
  for (std::size_t j = 0; j < m && c.transform.size() < m; ++j) {
    Row e(m);
    e[j] = Scalar(1);
    if (span.add(e)) {
      c.transform.push_back(Scalar::variable(sys.inputs()[j]));
      defs_new.push_back(Scalar::variable(sys.inputs()[j]));
    }
  }
  std::vector<Scalar> residuals;
  for (std::size_t i = 0; i < m; ++i) residuals.push_back(defs_new[i] - Scalar::variable(names[i]));
  TriangularSolution sol = solve_triangular(residuals, sys.inputs());
  if (!sol.solved) {
    if (failure.empty())
      failure = "input transformation cannot be inverted by linear solves; stuck on " + sol.stuck.front().to_string();
    return std::nullopt;
  }
  for (const auto& u : sys.inputs()) c.inverse.push_back(sol.values.at(u));
  const Bindings u_of_new = bindings_of(sys.inputs(), c.inverse);
  for (const auto& g : fbar) c.f.push_back(substitute(g, u_of_new));
  return c;
}

// The transformed dynamics and the inverse input map are defined at the mapped equilibrium.
bool regular_at_equilibrium(const DiscreteSystem& sys, const TriangularDecomposition& t, const InputChoice& c) {
  if (!sys.equilibrium()) return true;
  try {
    const Point& old = *sys.equilibrium();
    Point q;
    for (std::size_t i = 0; i < t.states.size(); ++i) q[t.states[i]] = eval_at(t.state_transform[i], old);
    for (std::size_t i = 0; i < t.inputs.size(); ++i) q[t.inputs[i]] = eval_at(c.transform[i], old);
    for (const auto& g : c.f) eval_at(g, q);
    for (const auto& g : c.inverse) eval_at(g, q);
    for (const auto& g : t.state_inverse) eval_at(g, q);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::optional<Point> map_equilibrium(const DiscreteSystem& sys, const TriangularDecomposition& t) {
  if (!sys.equilibrium()) return std::nullopt;
  try {
    Point old = *sys.equilibrium();
    Point mapped;
    for (std::size_t i = 0; i < t.states.size(); ++i) mapped[t.states[i]] = eval_at(t.state_transform[i], old);
    for (std::size_t i = 0; i < t.inputs.size(); ++i) mapped[t.inputs[i]] = eval_at(t.input_transform[i], old);
    Point sub;
    for (std::size_t i = 0; i < t.dim_x2; ++i) sub[t.states[i]] = mapped[t.states[i]];
    for (std::size_t i = 0; i < t.subsystem_inputs.size(); ++i)
      sub[t.subsystem_inputs[i]] = eval_at(t.subsystem_input_defs[i], mapped);
    return sub;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

TriangularDecomposition decompose_step(const DiscreteSystem& sys, const DecomposeOptions& options) {
  const std::size_t n = sys.n();
  const std::size_t m = sys.m();
  if (input_rank(sys) != m)
    throw Error(Errc::NotDecomposable, "input Jacobian has rank " + std::to_string(input_rank(sys)) + " < m = " +
                                           std::to_string(m) + "; eliminate redundant inputs first");
  const AdaptedChart chart = build_adapted_chart(sys);
  TestOptions one;
  one.max_iterations = 1;
  const CodistributionTestResult codist = run_codistribution_test(sys, chart, one);
  const DistributionTestResult dist = run_distribution_test(sys, chart, one);
  const Codistribution& p2 = codist.P.at(1);
  if (same_span(p2, codist.P.at(0)))
    throw Error(Errc::NotDecomposable, "P_2 = P_1, the system is not forward-flat");
  const Distribution& d0 = dist.steps.at(0).D;

  TriangularDecomposition t;
  t.integrals = find_first_integrals(p2, sys.states(), options.integral_hints);
  t.dim_x2 = t.integrals.functions.size();
  t.dim_x1 = n - t.dim_x2;

  // States: integrals first, then original coordinates completing the chart.
  // Completions are tried in lexicographic order until the map inverts.
  RowSpace integral_span(n);
  for (const auto& g : t.integrals.functions) integral_span.add(jacobian_in({g}, sys.states())[0]);
  std::vector<std::string> taken = sys.chart().vars();
  t.states = numbered(fresh_prefix("xb", taken), n);
  taken.insert(taken.end(), t.states.begin(), t.states.end());
  std::string stuck;
  for (const auto& extra : subsets(n, t.dim_x1)) {
    RowSpace span = integral_span;
    bool independent = true;
    for (auto j : extra) {
      Row e(n);
      e[j] = Scalar(1);
      independent = independent && span.add(e);
    }
    if (!independent) continue;
    std::vector<Scalar> transform = t.integrals.functions;
    for (auto j : extra) transform.push_back(Scalar::variable(sys.states()[j]));
    std::vector<Scalar> residuals;
    for (std::size_t i = 0; i < n; ++i) residuals.push_back(transform[i] - Scalar::variable(t.states[i]));
    TriangularSolution sol = solve_triangular(residuals, sys.states());
    if (!sol.solved) {
      if (stuck.empty()) stuck = sol.stuck.front().to_string();
      continue;
    }
    t.state_transform = std::move(transform);
    for (const auto& x : sys.states()) t.state_inverse.push_back(sol.values.at(x));
    break;
  }
  if (t.state_transform.empty())
    throw Error(Errc::NormalizationFailed,
                "state transformation cannot be inverted by linear solves for any completing coordinates; stuck on " +
                    stuck);
  const Bindings x_of_new = bindings_of(sys.states(), t.state_inverse);
  std::vector<Scalar> shifted;  // new states shifted forward, in old (x, u)
  std::vector<Scalar> fbar;     // the same in new states and old inputs
  for (const auto& g : t.state_transform) {
    shifted.push_back(forward_shift(g, sys));
    fbar.push_back(substitute(shifted.back(), x_of_new));
  }

  // Inputs: normalize independent subsystem equations, complete with original inputs.
  const std::vector<Scalar> f2(fbar.begin(), fbar.begin() + static_cast<long>(t.dim_x2));
  const Matrix j2 = jacobian_in(f2, sys.inputs());
  t.dim_u2 = generic_rank(j2, m);
  t.dim_u1 = m - t.dim_u2;
  t.inputs = numbered(fresh_prefix("ub", taken), m);
  taken.insert(taken.end(), t.inputs.begin(), t.inputs.end());
  std::optional<InputChoice> chosen;
  std::optional<InputChoice> fallback;
  std::string failure;
  for (const auto& rows : subsets(t.dim_x2, t.dim_u2)) {
    Matrix sub;
    for (auto r : rows) sub.push_back(j2[r]);
    if (generic_rank(sub, m) != t.dim_u2) continue;
    std::optional<InputChoice> c = try_inputs(sys, rows, shifted, fbar, t.inputs, failure);
    if (!c) continue;
    if (regular_at_equilibrium(sys, t, *c)) {
      chosen = std::move(c);
      break;
    }
    if (!fallback) fallback = std::move(c);
  }
  if (!chosen) chosen = std::move(fallback);
  if (!chosen)
    throw Error(Errc::NormalizationFailed, failure.empty() ? "no invertible input normalization" : failure);
  t.normalized_rows = chosen->rows;
  t.input_transform = chosen->transform;
  t.input_inverse = chosen->inverse;
  t.f = chosen->f;

  // Triangular form checks.
  for (std::size_t i = 0; i < t.dim_u2; ++i)
    if (!(t.f[t.normalized_rows[i]] == Scalar::variable(t.inputs[i])))
      throw Error(Errc::InternalInconsistency, "normalized equation for " + t.states[t.normalized_rows[i]] +
                                                   " reads " + t.f[t.normalized_rows[i]].to_string());
  const std::vector<std::string> u1(t.inputs.begin() + static_cast<long>(t.dim_u2), t.inputs.end());
  for (std::size_t i = 0; i < t.dim_x2; ++i)
    for (const auto& v : u1)
      if (t.f[i].depends_on(v))
        throw Error(Errc::InternalInconsistency, "subsystem equation for " + t.states[i] + " depends on " + v);
  const std::vector<Scalar> f1(t.f.begin() + static_cast<long>(t.dim_x2), t.f.end());
  if (generic_rank(jacobian_in(f1, u1), u1.size()) != t.dim_x1)
    throw Error(Errc::InternalInconsistency, "feedback part is not regular in the new inputs");

  // D_0 must be spanned by the new u1 directions, written in old coordinates.
  {
    Bindings back = bindings_of(t.states, t.state_transform);
    for (std::size_t i = 0; i < m; ++i) back[t.inputs[i]] = t.input_transform[i];
    std::vector<VectorField> fields;
    for (const auto& name : u1) {
      VectorField v = VectorField::zero(sys.chart());
      for (std::size_t j = 0; j < m; ++j) v.coeffs[n + j] = substitute(differentiate(t.input_inverse[j], name), back);
      fields.push_back(std::move(v));
    }
    t.d0_matches = same_span(Distribution(sys.chart(), fields), d0);
    if (!t.d0_matches)
      throw Error(Errc::InternalInconsistency, "D_0 = " + d0.to_string() + " is not spanned by the new u1 directions");
  }

  if (t.dim_x2 == 0) return t;

  // Subsystem with redundant inputs eliminated.
  std::vector<Scalar> sub_f(t.f.begin(), t.f.begin() + static_cast<long>(t.dim_x2));
  std::vector<std::string> candidates(t.states.begin() + static_cast<long>(t.dim_x2), t.states.end());
  candidates.insert(candidates.end(), t.inputs.begin(), t.inputs.begin() + static_cast<long>(t.dim_u2));
  std::vector<std::string> used;
  for (const auto& v : candidates)
    if (std::any_of(sub_f.begin(), sub_f.end(), [&](const Scalar& g) { return g.depends_on(v); })) used.push_back(v);
  Matrix ju = jacobian_in(sub_f, used);
  const std::size_t rank = generic_rank(ju, used.size());
  if (rank == used.size()) {
    t.subsystem_inputs = used;
    for (const auto& v : used) t.subsystem_input_defs.push_back(Scalar::variable(v));
  } else {
    const auto rows = independent_rows(ju, used.size());
    Matrix chosen;
    for (auto r : rows) chosen.push_back(ju[r]);
    const auto cols = independent_rows(transpose(chosen, used.size()), rows.size());
    std::vector<std::string> solve_for;
    for (auto c : cols) solve_for.push_back(used[c]);
    const auto w = numbered(fresh_prefix("wb", taken), rows.size());
    std::vector<Scalar> residuals;
    for (std::size_t i = 0; i < rows.size(); ++i) residuals.push_back(sub_f[rows[i]] - Scalar::variable(w[i]));
    TriangularSolution sol = solve_triangular(residuals, solve_for);
    if (!sol.solved)
      throw Error(Errc::NormalizationFailed, "redundant subsystem inputs cannot be eliminated; stuck on " +
                                                 sol.stuck.front().to_string());
    for (auto& g : sub_f) g = substitute(g, sol.values);
    for (const auto& g : sub_f)
      for (const auto& v : used)
        if (g.depends_on(v))
          throw Error(Errc::NormalizationFailed, "subsystem still depends on " + v + " after input elimination");
    t.subsystem_inputs = w;
    for (auto r : rows) t.subsystem_input_defs.push_back(t.f[r]);
  }
  std::vector<std::string> sub_states(t.states.begin(), t.states.begin() + static_cast<long>(t.dim_x2));
  try {
    t.subsystem.emplace(sys.name() + "'", sub_states, t.subsystem_inputs, sub_f, map_equilibrium(sys, t));
  } catch (const Error& err) {
    throw Error(Errc::NotDecomposable, std::string("subsystem is not a valid system: ") + err.what());
  }
  return t;
}

Cascade decompose_cascade(const DiscreteSystem& sys, const DecomposeOptions& options) {
  Cascade c;
  std::optional<DiscreteSystem> current = sys;
  for (std::size_t guard = 0; guard <= sys.n(); ++guard) {
    try {
      TriangularDecomposition step = decompose_step(*current, options);
      const bool last = !step.subsystem.has_value();
      if (!last) current = *step.subsystem;
      c.steps.push_back(std::move(step));
      if (last) {
        c.complete = true;
        return c;
      }
    } catch (const Error& e) {
      c.blocking = e.what();
      return c;
    }
  }
  c.blocking = "cascade did not terminate";
  return c;
}

}  // namespace fwdflat
