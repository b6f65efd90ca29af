#include "fwdflat/flatness.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "fwdflat/error.hpp"

namespace fwdflat {

namespace {

std::size_t cap(const DiscreteSystem& sys, const TestOptions& options) {
  return options.max_iterations ? options.max_iterations : sys.n() + sys.m() + 1;
}

Distribution input_fields(const DiscreteSystem& sys) {
  std::vector<VectorField> fields;
  for (const auto& u : sys.inputs()) fields.push_back(VectorField::coordinate(sys.chart(), u));
  return Distribution(sys.chart(), fields);
}

Codistribution state_differentials(const DiscreteSystem& sys) {
  std::vector<OneForm> forms;
  for (const auto& x : sys.states()) forms.push_back(OneForm::coordinate(sys.chart(), x));
  return Codistribution(sys.chart(), forms);
}

Distribution xi_fields(const AdaptedChart& chart) {
  std::vector<VectorField> fields;
  for (std::size_t j = chart.n(); j < chart.adapted().size(); ++j)
    fields.push_back(VectorField::coordinate(chart.adapted(), chart.adapted()[j]));
  return Distribution(chart.adapted(), fields);
}

Row differentiate_row(const Row& row, const std::string& var) {
  Row out;
  out.reserve(row.size());
  for (const auto& c : row) out.push_back(differentiate(c, var));
  return out;
}

Scalar pair(const VectorField& v, const OneForm& w) { return interior_product(v, w); }

}  // namespace

std::vector<std::size_t> DistributionTestResult::dims() const {
  std::vector<std::size_t> out;
  for (const auto& e : E) out.push_back(e.dim());
  return out;
}

std::vector<std::size_t> CodistributionTestResult::dims() const {
  std::vector<std::size_t> out;
  for (const auto& p : P) out.push_back(p.dim());
  return out;
}

NormalizedBasis normalize_distribution_basis(const Distribution& d, const AdaptedChart& chart) {
  if (!(d.chart() == chart.adapted())) throw Error(Errc::ChartMismatch, "normalization expects the adapted chart");
  const std::size_t n = chart.n();
  const std::size_t total = chart.adapted().size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j = total; j > n; --j) order.push_back(j - 1);
  Echelon e = reduced_echelon(d.matrix(), total, order);

  NormalizedBasis nb;
  std::vector<bool> is_pivot(total, false);
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    nb.fields.push_back(VectorField{chart.adapted(), e.rows[r]});
    is_pivot[e.pivots[r]] = true;
    if (e.pivots[r] < n) {
      nb.theta_pivots.push_back(e.pivots[r]);
      ++nb.dbar;
    } else {
      nb.xi_pivots.push_back(e.pivots[r]);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!is_pivot[i]) nb.theta_free.push_back(i);
  return nb;
}

MMatrixReport derivative_matrix(const Matrix& L, std::size_t columns, const AdaptedChart& chart,
                                const std::vector<std::size_t>& xi_order) {
  MMatrixReport rep;
  rep.dbar = columns;
  rep.L = L;
  std::vector<std::size_t> order = xi_order;
  if (order.empty())
    for (std::size_t j = chart.n(); j < chart.adapted().size(); ++j) order.push_back(j);

  RowSpace space(columns);
  Matrix frontier = L;
  while (space.rank() < columns && !frontier.empty()) {
    Matrix level;
    for (const auto& row : frontier)
      for (auto j : order) {
        Row r = differentiate_row(row, chart.adapted()[j]);
        if (!is_zero_row(r)) level.push_back(std::move(r));
      }
    const std::size_t before = space.rank();
    for (const auto& r : level) space.add(r);
    if (space.rank() == before) break;
    ++rep.levels;
    frontier.clear();
    for (auto i : constant_independent_rows(level)) frontier.push_back(level[i]);
    rep.M.insert(rep.M.end(), level.begin(), level.end());
  }
  for (auto i : constant_independent_rows(rep.M)) rep.Mhat.push_back(rep.M[i]);
  rep.rankM = space.rank();
  rep.kernel = kernel_basis(space.rows(), columns);
  for (const auto& c : rep.kernel)
    for (const auto& entry : c)
      for (std::size_t j = chart.n(); j < chart.adapted().size(); ++j)
        if (entry.depends_on(chart.adapted()[j]))
          throw Error(Errc::InternalInconsistency, "kernel vector depends on " + chart.adapted()[j]);
  return rep;
}

ProjectableResult largest_projectable_subdistribution(const Distribution& d, const AdaptedChart& chart) {
  const Distribution dy = chart.to_adapted(d);
  NormalizedBasis nb = normalize_distribution_basis(dy, chart);
  Matrix L;
  for (auto r : nb.theta_free) {
    Row row;
    for (std::size_t k = 0; k < nb.dbar; ++k) row.push_back(nb.fields[k].coeffs[r]);
    L.push_back(std::move(row));
  }
  MMatrixReport rep = derivative_matrix(L, nb.dbar, chart);

  std::vector<VectorField> fields;
  for (const auto& c : rep.kernel) {
    VectorField v = VectorField::zero(chart.adapted());
    for (std::size_t k = 0; k < nb.dbar; ++k)
      if (!c[k].is_zero()) v = v + c[k] * nb.fields[k];
    fields.push_back(std::move(v));
  }
  for (std::size_t l = nb.dbar; l < nb.fields.size(); ++l) fields.push_back(nb.fields[l]);
  Distribution d_adapted(chart.adapted(), fields);
  if (d_adapted.dim() + rep.rankM != d.dim())
    throw Error(Errc::InternalInconsistency, "projectable part has dimension " + std::to_string(d_adapted.dim()) +
                                                 ", expected " + std::to_string(d.dim() - rep.rankM));

  std::vector<VectorField> pushed;
  for (const auto& v : d_adapted.basis()) {
    try {
      pushed.push_back(pushforward_projectable(v, chart));
    } catch (const Error& e) {
      throw Error(Errc::InternalInconsistency, std::string("kernel combination is not projectable: ") + e.what());
    }
  }
  Distribution delta(xplus_chart(chart.n()), pushed);
  return {chart.to_base(d_adapted), d_adapted, delta, std::move(rep)};
}

DistributionTestResult run_distribution_test(const DiscreteSystem& sys, const AdaptedChart& chart,
                                             const TestOptions& options) {
  const std::size_t total = sys.n() + sys.m();
  const std::size_t limit = cap(sys, options);
  DistributionTestResult res;
  res.E.push_back(input_fields(sys));
  for (std::size_t k = 1; k <= limit; ++k) {
    const Distribution prev = res.E.back();
    ProjectableResult pr = largest_projectable_subdistribution(prev, chart);
    Distribution ek = pullback_pi(pr.Delta, sys);
    if (!ek.includes(prev))
      throw Error(Errc::InternalInconsistency, "E_" + std::to_string(k - 1) + " is not contained in E_" +
                                                   std::to_string(k));
    if (options.check_integrability && !is_involutive(ek))
      throw Error(Errc::InternalInconsistency, "E_" + std::to_string(k) + " is not involutive");
    res.steps.push_back(DistributionStep{k, pr.D, pr.Delta, ek, std::move(pr.report)});
    res.E.push_back(ek);
    if (ek.dim() == prev.dim()) {
      res.kbar = k;
      res.converged = true;
      res.flat = prev.dim() == total;
      return res;
    }
  }
  res.kbar = limit;
  return res;
}

CodistributionTestResult run_codistribution_test(const DiscreteSystem& sys, const AdaptedChart& chart,
                                                 const TestOptions& options) {
  const std::size_t n = sys.n();
  const std::size_t total = chart.adapted().size();
  const std::size_t limit = cap(sys, options);
  const Codistribution df(sys.chart(), [&] {
    std::vector<OneForm> forms;
    for (const auto& row : sys.jacobian()) forms.push_back(OneForm{sys.chart(), row});
    return forms;
  }());
  const Distribution xi = xi_fields(chart);
  const Distribution fibers = options.cross_check ? annihilator(df) : Distribution(sys.chart());

  // Pivots on the trailing th columns, so the added forms land on the leading ones.
  std::vector<std::size_t> order;
  for (std::size_t i = n; i > 0; --i) order.push_back(i - 1);
  for (std::size_t j = n; j < total; ++j) order.push_back(j);

  CodistributionTestResult res;
  res.P.push_back(state_differentials(sys));
  for (std::size_t k = 1; k <= limit; ++k) {
    const Codistribution pk = res.P.back();
    CodistributionStep step;
    step.k = k;
    step.P = pk;
    step.intersection = intersect(pk, df);
    const Codistribution iy = chart.to_adapted(step.intersection);
    Echelon e = reduced_echelon(iy.matrix(), total, order);
    std::vector<bool> is_pivot(total, false);
    for (auto p : e.pivots) {
      if (p >= n) throw Error(Errc::InternalInconsistency, "intersection with span{df} has a dxi component");
      is_pivot[p] = true;
    }
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i)
      if (!is_pivot[i]) free.push_back(i);
    // L holds -alpha, the coefficients of the dual normalized fields.
    Matrix L;
    for (const auto& row : e.rows) {
      Row a;
      for (auto c : free) a.push_back(-row[c]);
      L.push_back(std::move(a));
    }
    step.report = derivative_matrix(L, free.size(), chart);

    std::vector<OneForm> forms;
    for (const auto& row : e.rows) forms.push_back(OneForm{chart.adapted(), row});
    Matrix rho_rows;
    for (const auto& r : step.report.Mhat) {
      Row neg;
      for (const auto& c : r) neg.push_back(-c);
      rho_rows.push_back(std::move(neg));
    }
    for (const auto& r : reduced_echelon(rho_rows, free.size()).rows) {
      OneForm w = OneForm::zero(chart.adapted());
      for (std::size_t j = 0; j < free.size(); ++j) w.coeffs[free[j]] = r[j];
      step.rho.push_back(w);
      forms.push_back(w);
    }
    step.Pplus = Codistribution(chart.adapted(), forms);

    if (options.cross_check) {
      if (!same_span(step.Pplus, invariant_closure(iy, xi)))
        throw Error(Errc::InternalInconsistency, "closure along d_xi differs from the derivative construction at k = " +
                                                     std::to_string(k));
      if (!same_span(step.Pplus, chart.to_adapted(invariant_closure(step.intersection, fibers))))
        throw Error(Errc::InternalInconsistency,
                    "coordinate-free closure differs from the adapted-chart closure at k = " + std::to_string(k));
    }
    try {
      step.next = backward_shift_codistribution(step.Pplus, chart, sys);
    } catch (const Error& err) {
      throw Error(Errc::InternalInconsistency, "invariant closure " + step.Pplus.to_string() +
                                                   " cannot be shifted back: " + err.what());
    }
    if (!pk.includes(step.next))
      throw Error(Errc::InternalInconsistency, "P_" + std::to_string(k + 1) + " is not contained in P_" +
                                                   std::to_string(k));
    if (options.check_integrability && !is_integrable(step.next))
      throw Error(Errc::InternalInconsistency, "P_" + std::to_string(k + 1) + " is not integrable");
    const Codistribution next = step.next;
    res.steps.push_back(std::move(step));
    res.P.push_back(next);
    if (same_span(next, pk)) {
      res.kbar = k;
      res.converged = true;
      res.flat = pk.dim() == 0;
      return res;
    }
  }
  res.kbar = limit;
  return res;
}

namespace {

class DualityRecorder {
 public:
  void check(std::size_t k, std::string name, bool ok, std::string detail) {
    report_.checks.push_back(DualityCheck{k, std::move(name), ok, std::move(detail)});
    if (!ok && !failure_) failure_ = report_.checks.size() - 1;
  }

  DualityReport finish() {
    report_.ok = !failure_.has_value();
    if (failure_) {
      const auto& c = report_.checks[*failure_];
      throw Error(Errc::DualityViolation, "k = " + std::to_string(c.k) + ", " + c.name + ": " + c.detail);
    }
    return std::move(report_);
  }

 private:
  DualityReport report_;
  std::optional<std::size_t> failure_;
};

// First (field, form) pair with a nonzero pairing, or empty.
std::string first_nonzero_pairing(const std::vector<VectorField>& fields, const std::vector<OneForm>& forms) {
  for (const auto& v : fields)
    for (const auto& w : forms) {
      Scalar p = pair(v, w);
      if (!p.is_zero()) return v.to_string() + " _| " + w.to_string() + " = " + p.to_string();
    }
  return {};
}

}  // namespace

DualityReport verify_duality(const DiscreteSystem& sys, const AdaptedChart& chart, const DistributionTestResult& dist,
                             const CodistributionTestResult& codist) {
  const std::size_t n = sys.n();
  const std::size_t m = sys.m();
  const std::size_t total = n + m;
  DualityRecorder rec;
  rec.check(0, "same stopping step", dist.kbar == codist.kbar,
            "distribution test stops at " + std::to_string(dist.kbar) + ", codistribution test at " +
                std::to_string(codist.kbar));
  const std::size_t kbar = std::min({dist.kbar, codist.kbar, dist.steps.size(), codist.steps.size()});
  for (std::size_t k = 1; k <= kbar; ++k) {
    const Distribution& e_prev = dist.E[k - 1];
    const Codistribution& pk = codist.at(k);
    std::string bad = first_nonzero_pairing(e_prev.basis(), pk.basis());
    rec.check(k, "E_{k-1} _| P_k = 0", bad.empty(), bad.empty() ? "all pairings vanish" : bad);
    rec.check(k, "dim E_{k-1} + dim P_k = n+m", e_prev.dim() + pk.dim() == total,
              std::to_string(e_prev.dim()) + " + " + std::to_string(pk.dim()));

    const DistributionStep& ds = dist.steps[k - 1];
    const CodistributionStep& cs = codist.steps[k - 1];
    const Codistribution combined = sum(chart.to_base(cs.Pplus), pk);
    bad = first_nonzero_pairing(ds.D.basis(), combined.basis());
    rec.check(k, "D_{k-1} _| (P_{k+1}^+ + P_k) = 0", bad.empty(), bad.empty() ? "all pairings vanish" : bad);
    rec.check(k, "dim D_{k-1} + dim(P_{k+1}^+ + P_k) = n+m", ds.D.dim() + combined.dim() == total,
              std::to_string(ds.D.dim()) + " + " + std::to_string(combined.dim()));

    const auto& r = ds.report;
    const std::size_t dim_e = ds.E.dim();
    rec.check(k, "dim E_k = dbar - rank M + m", dim_e + r.rankM == r.dbar + m,
              std::to_string(dim_e) + " vs " + std::to_string(r.dbar) + " - " + std::to_string(r.rankM) + " + " +
                  std::to_string(m));
    const std::size_t dim_p = cs.next.dim();
    rec.check(k, "dim P_{k+1} = n - dbar + rank M", dim_p + r.dbar == n + r.rankM,
              std::to_string(dim_p) + " vs " + std::to_string(n) + " - " + std::to_string(r.dbar) + " + " +
                  std::to_string(r.rankM));
    rec.check(k, "matching derivative matrices", cs.report.dbar == r.dbar && cs.report.rankM == r.rankM,
              "dbar " + std::to_string(r.dbar) + "/" + std::to_string(cs.report.dbar) + ", rank M " +
                  std::to_string(r.rankM) + "/" + std::to_string(cs.report.rankM));
  }
  return rec.finish();
}

FlatnessVerdict decide_flatness(const DiscreteSystem& sys, const AdaptedChart& chart, TestSelection which,
                                bool verify, const TestOptions& options) {
  FlatnessVerdict v;
  if (which == TestSelection::Both) {
    auto a = std::async(std::launch::async, [&] { return run_distribution_test(sys, chart, options); });
    auto b = std::async(std::launch::async, [&] { return run_codistribution_test(sys, chart, options); });
    // Collect both before rethrowing so neither task outlives the inputs.
    std::exception_ptr failure;
    try {
      v.distribution = a.get();
    } catch (...) {
      failure = std::current_exception();
    }
    try {
      v.codistribution = b.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
    if (failure) std::rethrow_exception(failure);
  } else if (which == TestSelection::Distribution) {
    v.distribution = run_distribution_test(sys, chart, options);
  } else {
    v.codistribution = run_codistribution_test(sys, chart, options);
  }

  const std::size_t total = sys.n() + sys.m();
  if (v.distribution) {
    const auto& d = *v.distribution;
    v.flat = d.flat;
    v.kbar = d.kbar;
    if (!d.converged)
      v.witness = "iteration limit " + std::to_string(d.kbar) + " reached before dim E stopped growing";
    else
      v.witness = "dim E_" + std::to_string(d.kbar) + " = dim E_" + std::to_string(d.kbar - 1) + " = " +
                  std::to_string(d.E[d.kbar - 1].dim()) + (d.flat ? " = n+m" : " < n+m = " + std::to_string(total));
  }
  if (v.codistribution) {
    const auto& c = *v.codistribution;
    std::string w;
    if (!c.converged)
      w = "iteration limit " + std::to_string(c.kbar) + " reached before P stabilized";
    else
      w = "P_" + std::to_string(c.kbar + 1) + " = P_" + std::to_string(c.kbar) +
          (c.flat ? " = 0" : " has dimension " + std::to_string(c.at(c.kbar).dim()));
    if (v.distribution) {
      if (c.flat != v.flat || c.kbar != v.kbar)
        throw Error(Errc::InternalInconsistency, "the two tests disagree: " + v.witness + " versus " + w);
      v.witness += "; " + w;
    } else {
      v.flat = c.flat;
      v.kbar = c.kbar;
      v.witness = w;
    }
  }
  if (verify && v.distribution && v.codistribution)
    v.duality = verify_duality(sys, chart, *v.distribution, *v.codistribution);
  return v;
}

}  // namespace fwdflat
