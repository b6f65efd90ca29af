#include "fwdflat/system_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fwdflat/error.hpp"
#include "fwdflat/expr_parser.hpp"

namespace fwdflat {

namespace {

// A piece of one source line; `offset` is the 0-based column of text[0].
struct Slice {
  std::string_view text;
  std::size_t line = 0;
  std::size_t offset = 0;
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

Slice trim(Slice s) {
  std::size_t b = 0;
  while (b < s.text.size() && is_space(s.text[b])) ++b;
  std::size_t e = s.text.size();
  while (e > b && is_space(s.text[e - 1])) --e;
  return Slice{s.text.substr(b, e - b), s.line, s.offset + b};
}

std::vector<Slice> split(Slice s, char sep) {
  std::vector<Slice> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.text.size(); ++i) {
    if (i == s.text.size() || s.text[i] == sep) {
      out.push_back(trim(Slice{s.text.substr(start, i - start), s.line, s.offset + start}));
      start = i + 1;
    }
  }
  return out;
}

// Splits at the first `sep`; the second part is empty when absent.
std::pair<Slice, std::optional<Slice>> split_once(Slice s, char sep) {
  const auto at = s.text.find(sep);
  if (at == std::string_view::npos) return {trim(s), std::nullopt};
  return {trim(Slice{s.text.substr(0, at), s.line, s.offset}),
          trim(Slice{s.text.substr(at + 1), s.line, s.offset + at + 1})};
}

bool valid_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const Slice& at, const std::string& msg, Errc code = Errc::ParseError) const {
    throw Error(code, origin_ + ":" + std::to_string(at.line) + ":" + std::to_string(at.offset + 1) + ": " + msg);
  }

  Scalar expression(const Slice& s) const {
    if (s.text.empty()) fail(s, "expected an expression");
    try {
      return parse_scalar(s.text, s.offset);
    } catch (const Error& e) {
      // parse_scalar reports "column N: message".
      std::string what = e.message();
      std::size_t column = s.offset + 1;
      if (what.rfind("column ", 0) == 0) {
        const auto colon = what.find(':');
        column = std::stoul(what.substr(7, colon - 7));
        what = what.substr(colon + 2);
      }
      throw Error(e.code(), origin_ + ":" + std::to_string(s.line) + ":" + std::to_string(column) + ": " + what);
    }
  }

  std::string identifier(const Slice& s, const char* what) const {
    if (!valid_identifier(s.text)) fail(s, std::string("expected ") + what + ", found '" + std::string(s.text) + "'");
    return std::string(s.text);
  }

  mpq_class constant(const Slice& s) const {
    const Scalar v = expression(s);
    if (!v.is_constant()) fail(s, "equilibrium value must be a rational constant");
    return v.constant_value();
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

const std::set<std::string, std::less<>> kSections = {"name", "states", "inputs", "dynamics", "equilibrium", "hints"};

struct Equation {
  std::string lhs;
  Slice lhs_at;
  Slice rhs_at;
  Scalar rhs;
};

}  // namespace

std::vector<std::string> parse_name_list(std::string_view text) {
  Reader r("<hint>");
  std::vector<std::string> names;
  for (const Slice& s : split(Slice{text, 1, 0}, ',')) names.push_back(r.identifier(s, "a variable name"));
  return names;
}

std::vector<Scalar> parse_expression_list(std::string_view text) {
  Reader r("<hint>");
  std::vector<Scalar> out;
  for (const Slice& s : split(Slice{text, 1, 0}, ';'))
    if (!s.text.empty()) out.push_back(r.expression(s));
  return out;
}

SystemFile parse_system_text(std::string_view text, std::string origin) {
  Reader r(origin);
  SystemFile sf;
  sf.origin = origin;

  // Collect the non-empty entries of every section.
  std::map<std::string, std::vector<Slice>, std::less<>> sections;
  std::map<std::string, Slice, std::less<>> headers;
  std::string current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Slice s = trim(Slice{line, line_no, 0});
    if (s.text.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const auto [key, rest] = split_once(s, ':');
    if (rest && kSections.count(key.text)) {
      current = std::string(key.text);
      if (headers.count(current)) r.fail(key, "section '" + current + "' appears twice");
      headers.emplace(current, key);
      sections[current];
      if (!rest->text.empty()) sections[current].push_back(*rest);
    } else if (current.empty()) {
      r.fail(s, "expected a section header such as 'dynamics:'");
    } else {
      sections[current].push_back(s);
    }
    if (eol == text.size()) break;
  }

  const Slice top{text.substr(0, 0), 1, 0};
  if (!sections.count("dynamics")) r.fail(top, "missing 'dynamics:' section");
  if (!sections.count("inputs")) r.fail(top, "missing 'inputs:' section");

  if (auto it = sections.find("name"); it != sections.end()) {
    for (const Slice& s : it->second) sf.name += (sf.name.empty() ? "" : " ") + std::string(s.text);
  }
  if (sf.name.empty()) {
    const auto slash = origin.find_last_of('/');
    sf.name = slash == std::string::npos ? origin : origin.substr(slash + 1);
  }

  std::map<std::string, Slice> declared_at;
  auto read_names = [&](const char* section, std::vector<std::string>& out) {
    for (const Slice& entry : sections[section])
      for (const Slice& s : split(entry, ',')) {
        std::string v = r.identifier(s, "a variable name");
        if (declared_at.count(v)) r.fail(s, "variable " + v + " is declared twice");
        declared_at.emplace(v, s);
        out.push_back(std::move(v));
      }
  };
  const bool states_given = sections.count("states") > 0;
  if (states_given) read_names("states", sf.states);
  read_names("inputs", sf.inputs);

  std::vector<Equation> eqs;
  for (const Slice& entry : sections["dynamics"]) {
    const auto [lhs, rhs] = split_once(entry, '=');
    if (!rhs) r.fail(entry, "expected 'x+ = expression'");
    if (lhs.text.size() < 2 || lhs.text.back() != '+')
      r.fail(lhs, "left-hand side must be a state followed by '+', e.g. 'x1+'");
    Slice name = trim(Slice{lhs.text.substr(0, lhs.text.size() - 1), lhs.line, lhs.offset});
    std::string v = r.identifier(name, "a state name");
    for (const auto& e : eqs)
      if (e.lhs == v) r.fail(name, "second equation for " + v);
    eqs.push_back(Equation{v, name, *rhs, r.expression(*rhs)});
  }
  if (eqs.empty()) r.fail(headers.at("dynamics"), "no equations");

  if (!states_given) {
    for (const auto& e : eqs) {
      if (declared_at.count(e.lhs)) r.fail(e.lhs_at, e.lhs + " is declared as an input");
      declared_at.emplace(e.lhs, e.lhs_at);
      sf.states.push_back(e.lhs);
    }
  }
  sf.f.assign(sf.states.size(), Scalar());
  std::vector<bool> have(sf.states.size(), false);
  for (const auto& e : eqs) {
    const auto it = std::find(sf.states.begin(), sf.states.end(), e.lhs);
    if (it == sf.states.end()) r.fail(e.lhs_at, e.lhs + " is not a declared state");
    for (const auto& v : e.rhs.variables())
      if (!declared_at.count(v)) r.fail(e.rhs_at, "undeclared variable " + v);
    const auto i = static_cast<std::size_t>(it - sf.states.begin());
    sf.f[i] = e.rhs;
    have[i] = true;
  }
  for (std::size_t i = 0; i < have.size(); ++i)
    if (!have[i]) r.fail(headers.at("dynamics"), "no equation for state " + sf.states[i]);

  if (auto it = sections.find("equilibrium"); it != sections.end()) {
    std::vector<Slice> items;
    for (const Slice& entry : it->second)
      for (const Slice& s : split(entry, ',')) items.push_back(s);
    Point p;
    const bool assignments = !items.empty() && items.front().text.find('=') != std::string_view::npos;
    std::vector<std::string> all = sf.states;
    all.insert(all.end(), sf.inputs.begin(), sf.inputs.end());
    if (assignments) {
      for (const Slice& s : items) {
        const auto [lhs, rhs] = split_once(s, '=');
        if (!rhs) r.fail(s, "expected 'variable = value'");
        std::string v = r.identifier(lhs, "a variable name");
        if (!declared_at.count(v)) r.fail(lhs, "undeclared variable " + v);
        if (p.count(v)) r.fail(lhs, "second value for " + v);
        p.emplace(v, r.constant(*rhs));
      }
      for (const auto& v : all)
        if (!p.count(v)) r.fail(headers.at("equilibrium"), "equilibrium lacks a value for " + v);
    } else {
      if (items.size() != all.size())
        r.fail(headers.at("equilibrium"), "expected " + std::to_string(all.size()) + " values (states then inputs), found " +
                                              std::to_string(items.size()));
      for (std::size_t i = 0; i < items.size(); ++i) p.emplace(all[i], r.constant(items[i]));
    }
    sf.equilibrium = std::move(p);
  }

  if (auto it = sections.find("hints"); it != sections.end()) {
    for (const Slice& entry : it->second) {
      const auto colon = entry.text.find(':');
      const auto eq = entry.text.find('=');
      if (colon != std::string_view::npos && (eq == std::string_view::npos || colon < eq)) {
        const auto [key, rest] = split_once(entry, ':');
        if (key.text == "inverse") {
          for (const Slice& s : split(*rest, ',')) {
            const auto [lhs, rhs] = split_once(s, '=');
            if (!rhs) r.fail(s, "expected 'variable = expression'");
            std::string v = r.identifier(lhs, "a variable name");
            if (sf.chart_hint.inverse.count(v)) r.fail(lhs, "second inverse expression for " + v);
            sf.chart_hint.inverse.emplace(v, r.expression(*rhs));
          }
        } else if (key.text == "integrals") {
          for (const Slice& s : split(*rest, ';'))
            if (!s.text.empty()) sf.integral_hints.push_back(r.expression(s));
        } else {
          r.fail(key, "unknown hint '" + std::string(key.text) + "'");
        }
        continue;
      }
      const auto [key, rest] = split_once(entry, '=');
      if (!rest || key.text != "xi") r.fail(entry, "expected 'xi = ...', 'inverse: ...' or 'integrals: ...'");
      if (!sf.chart_hint.xi_vars.empty()) r.fail(key, "second xi hint");
      for (const Slice& s : split(*rest, ',')) {
        std::string v = r.identifier(s, "a variable name");
        if (!declared_at.count(v)) r.fail(s, "undeclared variable " + v);
        sf.chart_hint.xi_vars.push_back(std::move(v));
      }
    }
  }
  return sf;
}

std::string format_system(const DiscreteSystem& sys) {
  auto join = [](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
    return out;
  };
  std::ostringstream os;
  os << "name: " << sys.name() << "\n";
  os << "states: " << join(sys.states()) << "\n";
  os << "inputs: " << join(sys.inputs()) << "\n";
  os << "dynamics:\n";
  for (std::size_t i = 0; i < sys.n(); ++i) os << "  " << sys.states()[i] << "+ = " << sys.f()[i].to_string() << "\n";
  if (sys.equilibrium()) {
    std::vector<std::string> items;
    for (const auto& v : sys.chart().vars()) items.push_back(v + " = " + sys.equilibrium()->at(v).get_str());
    os << "equilibrium: " << join(items) << "\n";
  }
  const auto& h = sys.hint();
  if (!h.empty()) {
    os << "hints:\n";
    if (!h.xi_vars.empty()) os << "  xi = " << join(h.xi_vars) << "\n";
    if (!h.inverse.empty()) {
      std::vector<std::string> items;
      for (const auto& [v, e] : h.inverse) items.push_back(v + " = " + e.to_string());
      os << "  inverse: " << join(items) << "\n";
    }
  }
  return os.str();
}

DiscreteSystem SystemFile::to_system() const {
  try {
    return DiscreteSystem(name, states, inputs, f, equilibrium, chart_hint);
  } catch (const Error& e) {
    throw Error(e.code(), origin + ": " + e.message());
  }
}

SystemFile read_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_text(buf.str(), path);
}

DiscreteSystem parse_system(const std::string& path) { return read_system_file(path).to_system(); }

}  // namespace fwdflat
