#include "oqsim/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace oqsim {

ModelParseError::ModelParseError(const std::string& msg, int line_number)
    : std::runtime_error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + msg
                                         : msg),
      line(line_number) {}

namespace {

using nlohmann::json;

int line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + int(std::count(text.begin(), text.begin() + long(offset), '\n'));
}

// Line of the n-th (1-based) occurrence of key quoted as a JSON key; 0 when
// not found (the message then goes out without a location).
int line_of_key(const std::string& text, const std::string& key, int occurrence) {
  const std::string needle = "\"" + key + "\"";
  std::size_t pos = 0;
  for (int seen = 0;;) {
    pos = text.find(needle, pos);
    if (pos == std::string::npos) return 0;
    if (++seen == occurrence) return line_at_offset(text, pos);
    pos += needle.size();
  }
}

Complex entry_value(const json& j, const std::string& what, int line) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ModelParseError(what + ": matrix entries must be numbers or [re, im] pairs", line);
}

Matrix read_matrix(const json& j, const std::string& what, int line) {
  if (!j.is_array() || j.empty())
    throw ModelParseError(what + ": expected a non-empty array of rows", line);
  const int rows = int(j.size());
  int cols = -1;
  Matrix m;
  for (int r = 0; r < rows; ++r) {
    const json& row = j[std::size_t(r)];
    if (!row.is_array() || row.empty())
      throw ModelParseError(what + ": row " + std::to_string(r) + " is not a non-empty array",
                            line);
    if (cols < 0) {
      cols = int(row.size());
      m = Matrix::Zero(rows, cols);
    }
    if (int(row.size()) != cols) throw ModelParseError(what + ": rows have unequal length", line);
    for (int c = 0; c < cols; ++c) m(r, c) = entry_value(row[std::size_t(c)], what, line);
  }
  return m;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void require_hermitian_block(const Matrix& m, const std::string& what, int line) {
  if (m.rows() != m.cols()) throw ModelParseError(what + ": not square", line);
  const double defect = hermiticity_defect(m);
  if (defect > 1e-10)
    throw ModelParseError(what + ": not Hermitian (defect " + brief(defect) + ")", line);
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::optional<double> try_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Builtin references (shared by the JSON and one-line forms)

std::string canonical_key(const std::string& k) {
  static const std::map<std::string, std::string> alias = {
      {"ω0", "omega0"},       {"w0", "omega0"},
      {"γ", "gamma"},         {"γ12", "gamma12"},
      {"κ", "kappa"},         {"ω_c", "omega_c"},
      {"wc", "omega_c"},           {"ω", "omega"},
      {"γ_at", "gamma_atom"}, {"gamma_at", "gamma_atom"},
      {"N", "n_atoms"},
  };
  auto it = alias.find(k);
  return it == alias.end() ? k : it->second;
}

int round_int(double v, const std::string& what, int line) {
  double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || std::abs(r) > 1e9)
    throw ModelParseError(what + ": expected an integer, got " + brief(v), line);
  return int(r);
}

ModelSpec build_builtin(const std::string& name, std::map<std::string, double> params,
                        std::map<std::string, std::vector<double>> lists,
                        const std::string& initial, int line) {
  auto take = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (fallback) return *fallback;
      throw ModelParseError(name + ": missing parameter `" + key + "`", line);
    }
    double v = it->second;
    params.erase(it);
    return v;
  };
  auto reject_leftovers = [&] {
    if (!params.empty())
      throw ModelParseError(name + ": unknown parameter `" + params.begin()->first + "`", line);
    if (!lists.empty())
      throw ModelParseError(name + ": unknown list parameter `" + lists.begin()->first + "`",
                            line);
  };

  try {
    if (name == "two_atoms") {
      const double omega0 = take("omega0");
      const double gamma = take("gamma");
      const double gamma12 = take("gamma12", 0.0);
      const double s12 = take("s12", 0.0);
      reject_leftovers();
      return model_two_atoms(omega0, gamma, gamma12, s12, initial.empty() ? "ee" : initial);
    }
    if (name == "damped_cavity") {
      const int n_max = round_int(take("n_max"), "n_max", line);
      const double omega_c = take("omega_c");
      const double kappa = take("kappa");
      const int fock = round_int(take("initial_fock", -1.0), "initial_fock", line);
      if (!initial.empty())
        throw ModelParseError("damped_cavity: use initial_fock=<n> instead of initial=", line);
      reject_leftovers();
      return model_damped_cavity(n_max, omega_c, kappa, fock);
    }
    if (name == "n_atoms_cavity") {
      const int n = round_int(take("n_atoms"), "n_atoms", line);
      std::vector<double> g;
      if (auto it = lists.find("g"); it != lists.end()) {
        g = it->second;
        lists.erase(it);
      } else if (params.count("g")) {
        g.assign(std::size_t(std::max(n, 0)), take("g"));
      } else {
        throw ModelParseError("n_atoms_cavity: missing parameter `g`", line);
      }
      const double omega = take("omega");
      const double kappa = take("kappa");
      const double gamma_atom = take("gamma_atom");
      const int n_photon = round_int(take("n_photon", 1.0), "n_photon", line);
      const int excited = round_int(take("excited_atom", 0.0), "excited_atom", line);
      if (!initial.empty())
        throw ModelParseError("n_atoms_cavity: use excited_atom=<i> instead of initial=", line);
      reject_leftovers();
      return model_n_atoms_cavity(n, g, omega, kappa, gamma_atom, n_photon, excited);
    }
  } catch (const std::invalid_argument& e) {
    throw ModelParseError(e.what(), line);
  }
  throw ModelParseError("unknown builtin model `" + name +
                            "` (expected damped_cavity, two_atoms, or n_atoms_cavity)",
                        line);
}

// ---------------------------------------------------------------------------
// One-line reference form: model = name(key=value, ...)

ModelSpec parse_reference_line(const std::string& s, int line) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || strip(s.substr(0, eq)) != "model")
    throw ModelParseError("expected `model = name(arguments)`", line);
  const std::string rhs = strip(s.substr(eq + 1));
  const auto open = rhs.find('(');
  if (open == std::string::npos || rhs.empty() || rhs.back() != ')')
    throw ModelParseError("expected `model = name(arguments)`", line);
  const std::string name = strip(rhs.substr(0, open));
  const std::string args = rhs.substr(open + 1, rhs.size() - open - 2);

  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= args.size(); ++i) {
    if (i == args.size() || (args[i] == ',' && depth == 0)) {
      std::string piece = strip(args.substr(start, i - start));
      if (!piece.empty()) parts.push_back(std::move(piece));
      start = i + 1;
    } else if (args[i] == '[') {
      ++depth;
    } else if (args[i] == ']') {
      --depth;
    }
  }
  if (depth != 0) throw ModelParseError("unbalanced brackets in argument list", line);

  std::map<std::string, double> params;
  std::map<std::string, std::vector<double>> lists;
  std::string initial;
  for (const std::string& p : parts) {
    const auto peq = p.find('=');
    if (peq == std::string::npos)
      throw ModelParseError("argument `" + p + "` is not key=value", line);
    const std::string key = canonical_key(strip(p.substr(0, peq)));
    std::string val = strip(p.substr(peq + 1));
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']')
        throw ModelParseError("argument `" + key + "`: unterminated list", line);
      std::vector<double> items;
      std::istringstream vs(val.substr(1, val.size() - 2));
      std::string item;
      while (std::getline(vs, item, ',')) {
        auto num = try_number(strip(item));
        if (!num) throw ModelParseError("argument `" + key + "`: `" + strip(item) +
                                            "` is not a number", line);
        items.push_back(*num);
      }
      lists[key] = std::move(items);
    } else if (auto num = try_number(val)) {
      params[key] = *num;
    } else {
      if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'') &&
          val.back() == val.front())
        val = val.substr(1, val.size() - 2);
      if (key != "initial")
        throw ModelParseError("argument `" + key + "` expects a numeric value, got `" + val + "`",
                              line);
      initial = val;
    }
  }
  return build_builtin(name, std::move(params), std::move(lists), initial, line);
}

ModelSpec parse_reference_model(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = strip(raw);
    if (s.empty()) continue;
    return parse_reference_line(s, line_no);
  }
  throw ModelParseError("empty model file", 1);
}

// ---------------------------------------------------------------------------
// JSON form

ModelSpec parse_json_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelParseError(std::string("invalid JSON: ") + e.what(), line_at_offset(text, e.byte));
  }
  if (!doc.is_object()) throw ModelParseError("top level must be a JSON object", 1);
  auto key_line = [&](const char* k) { return line_of_key(text, k, 1); };

  if (doc.contains("builtin")) {
    std::map<std::string, double> params;
    std::map<std::string, std::vector<double>> lists;
    std::string initial;
    const int bline = key_line("builtin");
    if (!doc["builtin"].is_string())
      throw ModelParseError("builtin: expected a model name string", bline);
    if (doc.contains("params")) {
      if (!doc["params"].is_object())
        throw ModelParseError("params: expected an object", key_line("params"));
      for (const auto& [k, v] : doc["params"].items()) {
        const std::string key = canonical_key(k);
        if (v.is_number()) {
          params[key] = v.get<double>();
        } else if (v.is_array()) {
          std::vector<double> items;
          for (const auto& x : v) {
            if (!x.is_number())
              throw ModelParseError("params." + k + ": expected numbers", key_line("params"));
            items.push_back(x.get<double>());
          }
          lists[key] = std::move(items);
        } else if (v.is_string() && key == "initial") {
          initial = v.get<std::string>();
        } else {
          throw ModelParseError("params." + k + ": expected a number or number list",
                                key_line("params"));
        }
      }
    }
    if (doc.contains("initial")) {
      if (!doc["initial"].is_string())
        throw ModelParseError("initial: expected a string", key_line("initial"));
      initial = doc["initial"].get<std::string>();
    }
    ModelSpec m = build_builtin(doc["builtin"].get<std::string>(), std::move(params),
                                std::move(lists), initial, bline);
    if (doc.contains("name") && doc["name"].is_string()) m.name = doc["name"].get<std::string>();
    return m;
  }

  for (const char* k : {"hamiltonian", "couplings", "spectral_tensor", "initial_state"})
    if (!doc.contains(k))
      throw ModelParseError(std::string("missing required key \"") + k + "\"", 1);

  ModelSpec m;
  m.name = doc.value("name", std::string("model"));

  m.h_sys = read_matrix(doc["hamiltonian"], "hamiltonian", key_line("hamiltonian"));
  require_hermitian_block(m.h_sys, "hamiltonian", key_line("hamiltonian"));
  const int d = int(m.h_sys.rows());

  if (doc.contains("dims")) {
    const int dline = key_line("dims");
    if (!doc["dims"].is_array()) throw ModelParseError("dims: expected an array", dline);
    long prod = 1;
    for (const auto& v : doc["dims"]) {
      if (!v.is_number_integer() || v.get<long>() < 1)
        throw ModelParseError("dims: expected positive integers", dline);
      m.dims.push_back(int(v.get<long>()));
      prod *= m.dims.back();
    }
    if (prod != d)
      throw ModelParseError("dims multiply to " + std::to_string(prod) +
                                " but the hamiltonian has dimension " + std::to_string(d),
                            dline);
  } else {
    m.dims = {d};
  }

  const json& cj = doc["couplings"];
  if (!cj.is_array() || cj.empty())
    throw ModelParseError("couplings: expected a non-empty array", key_line("couplings"));
  for (int i = 0; i < int(cj.size()); ++i) {
    const json& c = cj[std::size_t(i)];
    const int cline = line_of_key(text, "matrix", i + 1);
    if (!c.is_object() || !c.contains("matrix"))
      throw ModelParseError("couplings[" + std::to_string(i) + "]: expected {label, matrix}",
                            key_line("couplings"));
    std::string label = c.value("label", "A_" + std::to_string(i + 1));
    Matrix op = read_matrix(c["matrix"], "coupling " + label, cline);
    if (op.rows() != d || op.cols() != d)
      throw ModelParseError("coupling " + label + ": expected " + std::to_string(d) + "x" +
                                std::to_string(d),
                            cline);
    m.couplings.emplace_back(std::move(label), std::move(op));
  }
  const int channels = int(m.couplings.size());

  double beta = std::numeric_limits<double>::infinity();
  if (doc.contains("temperature")) {
    const int tline = key_line("temperature");
    const json& tj = doc["temperature"];
    if (tj.is_string()) {
      if (tj.get<std::string>() != "zero")
        throw ModelParseError(
            "temperature: expected \"zero\" or a positive number (inverse temperature)", tline);
    } else if (tj.is_number()) {
      beta = tj.get<double>();
      if (!(beta > 0.0))
        throw ModelParseError("temperature: inverse temperature must be positive", tline);
    } else {
      throw ModelParseError("temperature: expected \"zero\" or a number", tline);
    }
  }
  const bool zero_temp = std::isinf(beta);

  const json& sj = doc["spectral_tensor"];
  if (!sj.is_array() || sj.empty())
    throw ModelParseError("spectral_tensor: expected a non-empty array",
                          key_line("spectral_tensor"));
  std::vector<SpectralEntry> entries;
  for (int i = 0; i < int(sj.size()); ++i) {
    const int eline = line_of_key(text, "omega", i + 1);
    const std::string where = "spectral_tensor[" + std::to_string(i) + "]";
    const json& ej = sj[std::size_t(i)];
    if (!ej.is_object() || !ej.contains("omega") || !ej["omega"].is_number())
      throw ModelParseError(where + ": missing numeric \"omega\"", key_line("spectral_tensor"));
    SpectralEntry e;
    e.omega = ej["omega"].get<double>();
    e.gamma = ej.contains("gamma") ? read_matrix(ej["gamma"], where + " gamma", eline)
                                   : Matrix(Matrix::Zero(channels, channels));
    e.lamb = ej.contains("S") ? read_matrix(ej["S"], where + " S", eline)
                              : Matrix(Matrix::Zero(channels, channels));
    if (e.gamma.rows() != channels || e.gamma.cols() != channels || e.lamb.rows() != channels ||
        e.lamb.cols() != channels)
      throw ModelParseError(where + ": gamma and S must be " + std::to_string(channels) + "x" +
                                std::to_string(channels) + " (one row per coupling channel)",
                            eline);
    require_hermitian_block(e.gamma, where + " gamma", eline);
    require_hermitian_block(e.lamb, where + " S", eline);
    const double lo = min_hermitian_eigenvalue(e.gamma);
    if (lo < -1e-10)
      throw ModelParseError(where + " gamma: eigenvalue " + brief(lo) +
                                " below zero (not positive semidefinite)",
                            eline);
    if (zero_temp && e.omega < 0.0 && max_abs(e.gamma) > 0.0)
      throw ModelParseError(
          where + ": rates at omega < 0 must vanish when the bath is at zero temperature", eline);
    entries.push_back(std::move(e));
  }
  try {
    m.tensor = make_spectral_tensor(std::move(entries), beta);
  } catch (const std::invalid_argument& e) {
    throw ModelParseError(std::string("spectral_tensor: ") + e.what(),
                          key_line("spectral_tensor"));
  }

  {
    const int iline = key_line("initial_state");
    Matrix rho = read_matrix(doc["initial_state"], "initial_state", iline);
    if (rho.rows() != d || rho.cols() != d)
      throw ModelParseError("initial_state: expected " + std::to_string(d) + "x" +
                                std::to_string(d),
                            iline);
    try {
      require_density(rho, "initial_state");
    } catch (const std::invalid_argument& e) {
      throw ModelParseError(e.what(), iline);
    }
    m.initial_state = std::move(rho);
  }
  return m;
}

}  // namespace

ModelSpec parse_model(const std::string& text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '{') {
      try {
        return parse_json_model(text);
      } catch (const json::exception& e) {
        throw ModelParseError(std::string("invalid model JSON: ") + e.what(), 0);
      }
    }
    break;
  }
  return parse_reference_model(text);
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelParseError(path + ": cannot open", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ModelParseError& e) {
    ModelParseError wrapped(path + ": " + e.what(), 0);
    wrapped.line = e.line;
    throw wrapped;
  }
}

}  // namespace oqsim
