#include "fwdflat_cli/cli.hpp"

namespace fwdflat::cli {

namespace {

Json scalars(const std::vector<Scalar>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(x.to_string());
  return a;
}

Json matrix(const Matrix& m) {
  Json a = Json::array();
  for (const auto& row : m) a.push_back(scalars(row));
  return a;
}

Json names(const std::vector<std::string>& xs) { return Json(xs); }

Json span(const Chart& chart, const Matrix& rows) {
  Json o;
  o["chart"] = names(chart.vars());
  o["dim"] = rows.size();
  o["basis"] = matrix(rows);
  return o;
}

Json span(const Distribution& d) { return span(d.chart(), d.matrix()); }
Json span(const Codistribution& p) { return span(p.chart(), p.matrix()); }

Json m_report(const MMatrixReport& r) {
  Json o;
  o["dbar"] = r.dbar;
  o["L"] = matrix(r.L);
  o["M"] = matrix(r.M);
  o["Mhat"] = matrix(r.Mhat);
  o["rankM"] = r.rankM;
  o["kernel"] = matrix(r.kernel);
  o["levels"] = r.levels;
  return o;
}

Json point(const Point& p, const std::vector<std::string>& order) {
  Json o = Json::object();
  for (const auto& v : order) o[v] = p.at(v).get_str();
  return o;
}

Json assignments(const std::vector<std::string>& lhs, const std::vector<Scalar>& rhs) {
  Json o = Json::object();
  for (std::size_t i = 0; i < lhs.size(); ++i) o[lhs[i]] = rhs[i].to_string();
  return o;
}

}  // namespace

Json to_json(const AnalysisReport& rep) {
  std::vector<std::string> all = rep.states;
  all.insert(all.end(), rep.inputs.begin(), rep.inputs.end());

  Json j;
  Json& sys = j["system"];
  sys["name"] = rep.name;
  sys["n"] = rep.states.size();
  sys["m"] = rep.inputs.size();
  sys["states"] = names(rep.states);
  sys["inputs"] = names(rep.inputs);
  sys["dynamics"] = assignments(rep.states, rep.f);
  sys["equilibrium"] = rep.equilibrium ? point(*rep.equilibrium, all) : Json();

  j["chart"]["xi"] = names(rep.xi_vars);
  j["chart"]["inverse"] = assignments(all, rep.chart_inverse);

  j["options"]["test"] = to_string(rep.test);
  j["options"]["verify_duality"] = rep.duality_requested;
  j["options"]["max_iterations"] = rep.max_iterations;

  const auto& v = rep.verdict;
  j["verdict"]["flat"] = v.flat;
  j["verdict"]["kbar"] = v.kbar;
  j["verdict"]["converged"] = rep.converged;
  j["verdict"]["witness"] = v.witness;

  if (v.distribution) {
    const auto& d = *v.distribution;
    Json& o = j["distribution"];
    o["converged"] = d.converged;
    o["kbar"] = d.kbar;
    o["flat"] = d.flat;
    o["dims"] = d.dims();
    o["E"] = Json::array();
    for (const auto& e : d.E) o["E"].push_back(span(e));
    o["steps"] = Json::array();
    for (const auto& s : d.steps) {
      Json st;
      st["k"] = s.k;
      st["D"] = span(s.D);
      st["Delta"] = span(s.Delta);
      st["E"] = span(s.E);
      st["M"] = m_report(s.report);
      o["steps"].push_back(std::move(st));
    }
  } else {
    j["distribution"] = Json();
  }

  if (v.codistribution) {
    const auto& c = *v.codistribution;
    Json& o = j["codistribution"];
    o["converged"] = c.converged;
    o["kbar"] = c.kbar;
    o["flat"] = c.flat;
    o["dims"] = c.dims();
    o["P"] = Json::array();
    for (const auto& p : c.P) o["P"].push_back(span(p));
    o["steps"] = Json::array();
    for (const auto& s : c.steps) {
      Json st;
      st["k"] = s.k;
      st["P"] = span(s.P);
      st["intersection"] = span(s.intersection);
      Matrix rho;
      for (const auto& w : s.rho) rho.push_back(w.coeffs);
      st["rho"] = span(s.Pplus.chart(), rho);
      st["Pplus"] = span(s.Pplus);
      st["next"] = span(s.next);
      st["M"] = m_report(s.report);
      o["steps"].push_back(std::move(st));
    }
  } else {
    j["codistribution"] = Json();
  }

  if (v.duality) {
    j["duality"]["ok"] = v.duality->ok;
    j["duality"]["checks"] = Json::array();
    for (const auto& ch : v.duality->checks) {
      Json c;
      c["k"] = ch.k;
      c["name"] = ch.name;
      c["ok"] = ch.ok;
      c["detail"] = ch.detail;
      j["duality"]["checks"].push_back(std::move(c));
    }
  } else {
    j["duality"] = Json();
  }

  if (rep.cascade) {
    const auto& cas = *rep.cascade;
    Json& o = j["decomposition"];
    o["complete"] = cas.complete;
    o["blocking"] = cas.blocking;
    o["steps"] = Json::array();
    std::vector<std::string> old_states = rep.states;
    std::vector<std::string> old_inputs = rep.inputs;
    for (const auto& t : cas.steps) {
      Json st;
      st["dim_x2"] = t.dim_x2;
      st["dim_x1"] = t.dim_x1;
      st["dim_u2"] = t.dim_u2;
      st["dim_u1"] = t.dim_u1;
      st["d0_matches"] = t.d0_matches;
      st["integrals"] = Json::array();
      for (std::size_t i = 0; i < t.integrals.functions.size(); ++i) {
        Json g;
        g["function"] = t.integrals.functions[i].to_string();
        g["method"] = to_string(t.integrals.methods[i]);
        st["integrals"].push_back(std::move(g));
      }
      st["state_transform"] = assignments(t.states, t.state_transform);
      st["input_transform"] = assignments(t.inputs, t.input_transform);
      st["state_inverse"] = assignments(old_states, t.state_inverse);
      st["input_inverse"] = assignments(old_inputs, t.input_inverse);
      st["normalized_rows"] = t.normalized_rows;
      st["dynamics"] = assignments(t.states, t.f);
      if (t.subsystem) {
        st["subsystem"]["states"] = names(t.subsystem->states());
        st["subsystem"]["inputs"] = names(t.subsystem->inputs());
        st["subsystem"]["input_definitions"] = assignments(t.subsystem_inputs, t.subsystem_input_defs);
        old_states = t.subsystem->states();
        old_inputs = t.subsystem->inputs();
      } else {
        st["subsystem"] = Json();
      }
      o["steps"].push_back(std::move(st));
    }
  } else {
    j["decomposition"] = Json();
  }

  if (rep.point_check) {
    const auto& pc = *rep.point_check;
    Json& o = j["point_check"];
    o["agrees"] = pc.agrees;
    o["attempts"] = pc.attempts;
    o["point"] = point(pc.point, all);
    o["checks"] = Json::array();
    for (const auto& c : pc.checks) {
      Json e;
      e["object"] = c.object;
      e["generic"] = c.generic;
      e["at_point"] = c.at_point;
      o["checks"].push_back(std::move(e));
    }
  } else {
    j["point_check"] = Json();
  }

  j["warnings"] = rep.warnings;
  return j;
}

}  // namespace fwdflat::cli
