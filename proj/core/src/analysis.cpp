#include "fwdflat/analysis.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "fwdflat/error.hpp"

namespace fwdflat {

std::string to_string(TestSelection t) {
  switch (t) {
    case TestSelection::Distribution:
      return "distribution";
    case TestSelection::Codistribution:
      return "codistribution";
    case TestSelection::Both:
      return "both";
  }
  return "both";
}

std::size_t rank_at(const Matrix& rows, const Point& p) {
  std::vector<std::vector<mpq_class>> a;
  std::size_t cols = 0;
  for (const auto& row : rows) {
    std::vector<mpq_class> r;
    for (const auto& c : row) r.push_back(eval_at(c, p));
    cols = std::max(cols, r.size());
    a.push_back(std::move(r));
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
    std::size_t piv = rank;
    while (piv < a.size() && sgn(a[piv][c]) == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t i = rank + 1; i < a.size(); ++i) {
      if (sgn(a[i][c]) == 0) continue;
      const mpq_class factor = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= factor * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

namespace {

struct Tracked {
  std::string object;
  Matrix rows;
  std::size_t generic;
};

std::vector<Tracked> tracked_objects(const DiscreteSystem& sys, const FlatnessVerdict& v) {
  std::vector<Tracked> out;
  out.push_back({"df", sys.jacobian(), sys.n()});
  if (v.distribution) {
    const auto& d = *v.distribution;
    for (std::size_t k = 0; k < d.E.size(); ++k)
      out.push_back({"E_" + std::to_string(k), d.E[k].matrix(), d.E[k].dim()});
    for (const auto& s : d.steps)
      out.push_back({"D_" + std::to_string(s.k - 1), s.D.matrix(), s.D.dim()});
  }
  if (v.codistribution) {
    const auto& c = *v.codistribution;
    for (std::size_t k = 1; k <= c.P.size(); ++k)
      out.push_back({"P_" + std::to_string(k), c.at(k).matrix(), c.at(k).dim()});
  }
  return out;
}

// Point ranks of every tracked object; nullopt when some entry is singular.
std::optional<std::vector<RankCheck>> ranks_at(const std::vector<Tracked>& objs, const Point& p) {
  std::vector<RankCheck> out;
  try {
    for (const auto& o : objs) out.push_back({o.object, o.generic, rank_at(o.rows, p)});
  } catch (const Error& e) {
    if (e.code() != Errc::EvalSingular) throw;
    return std::nullopt;
  }
  return out;
}

PointCheckReport sample_point_check(const DiscreteSystem& sys, const std::vector<Tracked>& objs,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(7, 19);
  PointCheckReport rep;
  for (rep.attempts = 1; rep.attempts <= 64; ++rep.attempts) {
    Point p;
    for (const auto& v : sys.chart().vars()) {
      mpq_class base = 0;
      if (sys.equilibrium()) base = sys.equilibrium()->at(v);
      mpq_class offset(num(rng), den(rng));
      offset.canonicalize();
      p[v] = base + offset;
    }
    if (auto checks = ranks_at(objs, p)) {
      rep.point = std::move(p);
      rep.checks = std::move(*checks);
      rep.agrees = std::all_of(rep.checks.begin(), rep.checks.end(),
                               [](const RankCheck& c) { return c.generic == c.at_point; });
      return rep;
    }
  }
  throw Error(Errc::EvalSingular, "point check found no regular sample in 64 attempts");
}

void add_denominator_warnings(const AnalysisReport& rep, const AdaptedChart& chart, std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rep.f.size(); ++i) {
    const Scalar den = rep.f[i].den();
    if (den.is_constant()) continue;
    const std::string text = den.to_string();
    if (seen.insert(text).second) out.push_back("f is undefined where " + text + " = 0");
  }
  for (const auto& g : chart.inverse()) {
    const Scalar den = g.den();
    if (den.is_constant()) continue;
    const std::string text = chart.to_base(den).to_string();
    if (seen.insert(text).second) out.push_back("adapted chart is singular where " + text + " = 0");
  }
}

}  // namespace

AnalysisReport analyze(const DiscreteSystem& input, const AnalysisOptions& options) {
  DiscreteSystem sys = input;
  if (!options.chart_hint.empty()) sys.set_hint(options.chart_hint);

  AnalysisReport rep;
  rep.name = sys.name();
  rep.states = sys.states();
  rep.inputs = sys.inputs();
  rep.f = sys.f();
  rep.equilibrium = sys.equilibrium();
  rep.test = options.test;
  rep.duality_requested = options.verify_duality.value_or(options.test == TestSelection::Both);
  if (rep.duality_requested && options.test != TestSelection::Both)
    rep.warnings.push_back("duality verification needs both tests and was skipped");

  const AdaptedChart chart = build_adapted_chart(sys);
  rep.xi_vars = chart.xi_vars();
  rep.chart_inverse = chart.inverse();

  TestOptions topt;
  topt.max_iterations = options.max_iterations;
  rep.max_iterations = options.max_iterations ? options.max_iterations : sys.n() + sys.m() + 1;
  rep.verdict = decide_flatness(sys, chart, options.test, rep.duality_requested, topt);
  rep.converged = (!rep.verdict.distribution || rep.verdict.distribution->converged) &&
                  (!rep.verdict.codistribution || rep.verdict.codistribution->converged);
  if (!rep.converged)
    rep.warnings.push_back("not converged within " + std::to_string(rep.max_iterations) +
                           " iterations; the verdict is partial");

  add_denominator_warnings(rep, chart, rep.warnings);

  const auto objs = tracked_objects(sys, rep.verdict);
  if (sys.equilibrium()) {
    std::vector<std::string> singular;
    for (const auto& o : objs) {
      if (auto c = ranks_at({o}, *sys.equilibrium())) {
        if (c->front().at_point != o.generic)
          rep.warnings.push_back("rank of " + o.object + " drops from " + std::to_string(o.generic) + " to " +
                                 std::to_string(c->front().at_point) + " at the equilibrium");
      } else {
        singular.push_back(o.object);
      }
    }
    if (!singular.empty()) {
      std::string names;
      for (const auto& s : singular) names += (names.empty() ? "" : ", ") + s;
      rep.warnings.push_back("basis coefficients are singular at the equilibrium for " + names);
    }
  }
  if (options.point_check) {
    rep.point_check = sample_point_check(sys, objs, options.seed);
    for (const auto& c : rep.point_check->checks)
      if (c.generic != c.at_point)
        rep.warnings.push_back("rank of " + c.object + " is " + std::to_string(c.at_point) +
                               " at the sampled point, generic rank " + std::to_string(c.generic));
  }

  if (options.decompose) {
    if (!rep.verdict.flat) {
      rep.warnings.push_back("decomposition skipped: the system is not forward-flat");
    } else {
      DecomposeOptions dopt;
      dopt.integral_hints = options.integral_hints;
      rep.cascade = decompose_cascade(sys, dopt);
      if (!rep.cascade->complete) rep.warnings.push_back("decomposition stopped: " + rep.cascade->blocking);
    }
  }
  return rep;
}

}  // namespace fwdflat
