#include <sstream>

#include "fwdflat_cli/cli.hpp"

namespace fwdflat::cli {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string matrix_text(const Matrix& m) {
  if (m.empty()) return "[]";
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? "; " : "";
    for (std::size_t j = 0; j < m[i].size(); ++j) out += (j ? ", " : "") + m[i][j].to_string();
  }
  return out + "]";
}

std::string dims_text(const std::vector<std::size_t>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? " " : "") + std::to_string(dims[i]);
  return out;
}

std::string point_text(const Point& p, const std::vector<std::string>& order) {
  std::vector<std::string> items;
  for (const auto& v : order) items.push_back(v + " = " + p.at(v).get_str());
  return join(items);
}

void m_report(std::ostream& os, const MMatrixReport& r) {
  os << "    dbar = " << r.dbar << ", rank M = " << r.rankM << ", levels = " << r.levels << "\n";
  os << "    L = " << matrix_text(r.L) << "\n";
  os << "    M = " << matrix_text(r.M) << "\n";
  os << "    Mhat = " << matrix_text(r.Mhat) << "\n";
  os << "    kernel = " << matrix_text(r.kernel) << "\n";
}

}  // namespace

std::string render_text(const AnalysisReport& rep) {
  std::ostringstream os;
  const std::size_t n = rep.states.size();
  const std::size_t m = rep.inputs.size();
  std::vector<std::string> all = rep.states;
  all.insert(all.end(), rep.inputs.begin(), rep.inputs.end());

  os << "system " << rep.name << ": n = " << n << ", m = " << m << "\n";
  for (std::size_t i = 0; i < n; ++i) os << "  " << rep.states[i] << "+ = " << rep.f[i].to_string() << "\n";
  if (rep.equilibrium) os << "equilibrium: " << point_text(*rep.equilibrium, all) << "\n";
  os << "adapted chart: xi = (" << join(rep.xi_vars) << ")\n";
  for (std::size_t i = 0; i < all.size(); ++i) os << "  " << all[i] << " = " << rep.chart_inverse[i].to_string() << "\n";

  const auto& v = rep.verdict;
  os << "\nverdict: " << (v.flat ? "forward-flat" : "not forward-flat") << ", kbar = " << v.kbar
     << (rep.converged ? "" : " (not converged)") << "\n";
  os << "  " << v.witness << "\n";

  if (v.distribution) {
    const auto& d = *v.distribution;
    os << "\ndistribution test: " << (d.converged ? "converged" : "not converged") << ", kbar = " << d.kbar
       << ", " << (d.flat ? "flat" : "not flat") << "\n";
    os << "  dim E: " << dims_text(d.dims()) << "\n";
    for (std::size_t k = 0; k < d.E.size(); ++k)
      os << "  E_" << k << " (dim " << d.E[k].dim() << ") = " << d.E[k].to_string() << "\n";
    for (const auto& s : d.steps) {
      os << "  step " << s.k << "\n";
      os << "    D_" << s.k - 1 << " (dim " << s.D.dim() << ") = " << s.D.to_string() << "\n";
      os << "    Delta_" << s.k << " (dim " << s.Delta.dim() << ") = " << s.Delta.to_string() << "\n";
      m_report(os, s.report);
    }
  }

  if (v.codistribution) {
    const auto& c = *v.codistribution;
    os << "\ncodistribution test: " << (c.converged ? "converged" : "not converged") << ", kbar = " << c.kbar
       << ", " << (c.flat ? "flat" : "not flat") << "\n";
    os << "  dim P: " << dims_text(c.dims()) << "\n";
    for (std::size_t k = 1; k <= c.P.size(); ++k)
      os << "  P_" << k << " (dim " << c.at(k).dim() << ") = " << c.at(k).to_string() << "\n";
    for (const auto& s : c.steps) {
      os << "  step " << s.k << "\n";
      os << "    P_" << s.k << " cap span{df} (dim " << s.intersection.dim() << ") = " << s.intersection.to_string()
         << "\n";
      std::vector<std::string> rho;
      for (const auto& w : s.rho) rho.push_back(w.to_string());
      os << "    rho = {" << join(rho) << "}\n";
      os << "    P_" << s.k + 1 << "^+ (dim " << s.Pplus.dim() << ") = " << s.Pplus.to_string() << "\n";
      m_report(os, s.report);
    }
  }

  if (v.duality) {
    const auto& d = *v.duality;
    std::size_t passed = 0;
    for (const auto& ch : d.checks) passed += ch.ok ? 1 : 0;
    os << "\nduality: " << (d.ok ? "pass" : "FAIL") << " (" << passed << "/" << d.checks.size() << " checks)\n";
    for (const auto& ch : d.checks)
      os << "  k = " << ch.k << "  " << (ch.ok ? "pass" : "FAIL") << "  " << ch.name << "  [" << ch.detail << "]\n";
  } else if (rep.duality_requested) {
    os << "\nduality: not run\n";
  }

  if (rep.cascade) {
    const auto& cas = *rep.cascade;
    os << "\ndecomposition: " << cas.steps.size() << " step(s), " << (cas.complete ? "complete" : "incomplete")
       << "\n";
    std::vector<std::string> old_states = rep.states;
    std::vector<std::string> old_inputs = rep.inputs;
    for (std::size_t i = 0; i < cas.steps.size(); ++i) {
      const auto& t = cas.steps[i];
      os << "  step " << i + 1 << ": dim x2 = " << t.dim_x2 << ", dim x1 = " << t.dim_x1 << ", dim u2 = " << t.dim_u2
         << ", dim u1 = " << t.dim_u1 << ", D_0 check " << (t.d0_matches ? "pass" : "FAIL") << "\n";
      for (std::size_t j = 0; j < t.integrals.functions.size(); ++j)
        os << "    integral " << t.integrals.functions[j].to_string() << " (" << to_string(t.integrals.methods[j])
           << ")\n";
      for (std::size_t j = 0; j < t.states.size(); ++j)
        os << "    " << t.states[j] << " = " << t.state_transform[j].to_string() << "\n";
      for (std::size_t j = 0; j < t.inputs.size(); ++j)
        os << "    " << t.inputs[j] << " = " << t.input_transform[j].to_string() << "\n";
      for (std::size_t j = 0; j < old_states.size(); ++j)
        os << "    " << old_states[j] << " = " << t.state_inverse[j].to_string() << "\n";
      for (std::size_t j = 0; j < old_inputs.size(); ++j)
        os << "    " << old_inputs[j] << " = " << t.input_inverse[j].to_string() << "\n";
      std::vector<std::string> rows;
      for (auto r : t.normalized_rows) rows.push_back(std::to_string(r));
      os << "    normalized rows: " << join(rows) << "\n";
      for (std::size_t j = 0; j < t.f.size(); ++j)
        os << "    " << t.states[j] << "+ = " << t.f[j].to_string() << "\n";
      if (t.subsystem) {
        os << "    subsystem: states (" << join(t.subsystem->states()) << "), inputs (" << join(t.subsystem->inputs())
           << ")\n";
        for (std::size_t j = 0; j < t.subsystem_inputs.size(); ++j)
          os << "      " << t.subsystem_inputs[j] << " = " << t.subsystem_input_defs[j].to_string() << "\n";
        old_states = t.subsystem->states();
        old_inputs = t.subsystem->inputs();
      }
    }
    if (!cas.complete) os << "  stopped: " << cas.blocking << "\n";
  }

  if (rep.point_check) {
    const auto& pc = *rep.point_check;
    os << "\npoint check: " << (pc.agrees ? "agrees" : "DISAGREES") << " at " << point_text(pc.point, all) << " (attempt "
       << pc.attempts << ")\n";
    for (const auto& c : pc.checks)
      os << "  " << c.object << ": generic " << c.generic << ", at point " << c.at_point << "\n";
  }

  if (!rep.warnings.empty()) {
    os << "\nwarnings:\n";
    for (const auto& w : rep.warnings) os << "  - " << w << "\n";
  }
  return os.str();
}

}  // namespace fwdflat::cli
