#include "bipdo/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bipdo {

using nlohmann::json;

namespace {

struct TypeError {
  std::string what;
};

int as_int(const json& v) {
  if (!v.is_number_integer()) throw TypeError{"expected an integer"};
  return v.get<int>();
}

double as_real(const json& v) {
  if (!v.is_number()) throw TypeError{"expected a number"};
  return v.get<double>();
}

// p lists accept the string "inf".
double as_exponent(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
  return as_real(v);
}

std::string as_string(const json& v) {
  if (!v.is_string()) throw TypeError{"expected a string"};
  return v.get<std::string>();
}

std::pair<int, int> as_range(const json& v) {
  if (!v.is_array() || v.size() != 2) throw TypeError{"expected [lo, hi]"};
  auto r = std::make_pair(as_int(v[0]), as_int(v[1]));
  if (r.first > r.second) throw TypeError{"range is empty (lo > hi)"};
  return r;
}

template <class F>
auto as_list(const json& v, F item) {
  if (!v.is_array() || v.empty()) throw TypeError{"expected a nonempty array"};
  std::vector<decltype(item(v[0]))> out;
  for (const auto& e : v) out.push_back(item(e));
  return out;
}

using Handler = std::function<void(RunConfig&, const json&)>;

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h = {
      {"experiment",
       [](RunConfig& c, const json& v) {
         c.experiment = as_string(v);
         const auto& names = experiment_names();
         if (std::find(names.begin(), names.end(), c.experiment) == names.end())
           throw TypeError{"unknown experiment '" + c.experiment + "'"};
       }},
      {"name",
       [](RunConfig& c, const json& v) {
         c.name = as_string(v);
         if (c.name.empty() || c.name.find('/') != std::string::npos) throw TypeError{"not a valid file stem"};
       }},
      {"symbol", [](RunConfig& c, const json& v) { c.symbol = as_string(v); }},
      {"params",
       [](RunConfig& c, const json& v) {
         if (!v.is_object()) throw TypeError{"expected an object of numbers"};
         c.params.clear();
         for (auto it = v.begin(); it != v.end(); ++it) c.params[it.key()] = as_real(it.value());
       }},
      {"n1", [](RunConfig& c, const json& v) { c.n1 = as_int(v); }},
      {"n2", [](RunConfig& c, const json& v) { c.n2 = as_int(v); }},
      {"N", [](RunConfig& c, const json& v) { c.N = as_int(v); }},
      {"L", [](RunConfig& c, const json& v) { c.L = as_real(v); }},
      {"N_list", [](RunConfig& c, const json& v) { c.N_list = as_list(v, as_int); }},
      {"j_range", [](RunConfig& c, const json& v) { c.j_range = as_range(v); }},
      {"j",
       [](RunConfig& c, const json& v) {
         if (v.is_array()) {
           c.j = as_list(v, as_int);
           if (c.j.size() > 2) throw TypeError{"expected an integer or a pair"};
         } else {
           c.j = {as_int(v)};
         }
         for (int x : c.j)
           if (x < 0) throw TypeError{"j must be >= 0"};
       }},
      {"ell_range", [](RunConfig& c, const json& v) { c.ell_range = as_range(v); }},
      {"ell_max", [](RunConfig& c, const json& v) { c.ell_max = as_int(v); }},
      {"split_scale", [](RunConfig& c, const json& v) { c.split_scale = as_real(v); }},
      {"x_samples",
       [](RunConfig& c, const json& v) {
         c.x_samples = as_list(v, [](const json& e) { return as_list(e, as_real); });
       }},
      {"b_list", [](RunConfig& c, const json& v) { c.b_list = as_list(v, as_real); }},
      {"m_grid", [](RunConfig& c, const json& v) { c.m_grid = as_list(v, as_real); }},
      {"p_list", [](RunConfig& c, const json& v) { c.p_list = as_list(v, as_exponent); }},
      {"rho", [](RunConfig& c, const json& v) { c.rho = as_real(v); }},
      {"cube",
       [](RunConfig& c, const json& v) {
         if (!v.is_object() || !v.contains("anchor") || !v.contains("side") || v.size() != 2)
           throw TypeError{"expected {\"anchor\": [...], \"side\": s}"};
         DyadicCube q;
         q.anchor = as_list(v["anchor"], as_int);
         q.side = as_int(v["side"]);
         c.cube = q;
       }},
      {"points",
       [](RunConfig& c, const json& v) {
         c.points = as_int(v);
         if (c.points < 1) throw TypeError{"points must be >= 1"};
       }},
      {"seed",
       [](RunConfig& c, const json& v) {
         if (!v.is_number_unsigned()) throw TypeError{"expected a nonnegative 64-bit integer"};
         c.seed = v.get<std::uint64_t>();
       }},
      {"tol",
       [](RunConfig& c, const json& v) {
         c.tol = as_real(v);
         if (!(c.tol > 0.0)) throw TypeError{"tol must be positive"};
       }},
      {"max_iter",
       [](RunConfig& c, const json& v) {
         c.max_iter = as_int(v);
         if (c.max_iter < 1) throw TypeError{"max_iter must be >= 1"};
       }},
      {"output_dir", [](RunConfig& c, const json& v) { c.output_dir = as_string(v); }},
      {"expected_fail",
       [](RunConfig& c, const json& v) {
         if (!v.is_boolean()) throw TypeError{"expected true or false"};
         c.expected_fail = v.get<bool>();
       }},
  };
  return h;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment; '#' inside a JSON string is kept.
std::string strip_comment(const std::string& s) {
  bool in_str = false, esc = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (in_str) {
      if (esc)
        esc = false;
      else if (ch == '\\')
        esc = true;
      else if (ch == '"')
        in_str = false;
    } else if (ch == '"') {
      in_str = true;
    } else if (ch == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"ortho",      "kernel_decay", "l2_uniformity", "bmo",
                                                 "sharpness", "commutator",   "conjugation"};
  return names;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, h] : handlers()) k.push_back(name);
    return k;
  }();
  return keys;
}

Split RunConfig::split() const { return Split{n1.value_or(1), n2.value_or(1)}; }

GridSpec RunConfig::grid() const {
  if (!n1 || !n2 || !N || !L) throw ConfigError("grid needs n1, n2, N and L");
  try {
    return make_grid(*n1, *n2, *N, *L);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void RunConfig::require_for_experiment() const {
  if (experiment.empty()) throw ConfigError("missing required key 'experiment'");
  auto need = [&](bool present, const char* key) {
    if (!present) throw ConfigError(std::string("missing required key '") + key + "' for experiment '" + experiment + "'");
  };
  need(n1.has_value(), "n1");
  need(n2.has_value(), "n2");
  need(L.has_value(), "L");
  const std::string& e = experiment;
  if (e != "sharpness") need(!symbol.empty(), "symbol");
  if (e == "l2_uniformity" || e == "bmo" || e == "sharpness") {
    need(!N_list.empty(), "N_list");
  } else {
    need(N.has_value(), "N");
  }
  if (e == "ortho") need(j_range.has_value(), "j_range");
  if (e == "kernel_decay") {
    need(!j.empty(), "j");
    need(ell_range.has_value(), "ell_range");
    need(!x_samples.empty(), "x_samples");
    if (j.size() != 1) throw ConfigError("kernel_decay takes a single j");
  }
  if (e == "sharpness") {
    need(rho.has_value(), "rho");
    need(!m_grid.empty(), "m_grid");
    need(!p_list.empty(), "p_list");
  }
  if (e == "commutator") {
    need(rho.has_value(), "rho");
    need(cube.has_value(), "cube");
  }
  if (e == "conjugation") {
    need(rho.has_value(), "rho");
    need(j.size() == 2, "j");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, const Handler*> table;
  for (const auto& [name, h] : handlers()) table[name] = &h;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    auto eq = s.find('=');
    auto fail = [&](const std::string& msg) { throw ConfigError("line " + std::to_string(line) + ": " + msg); };
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail("missing key");
    auto it = table.find(key);
    if (it == table.end()) fail("unknown key '" + key + "'");
    if (c.given.contains(key)) fail("duplicate key '" + key + "'");
    if (val.empty()) fail("missing value for '" + key + "'");
    json v;
    try {
      v = json::parse(val);
    } catch (const json::parse_error&) {
      fail("value for '" + key + "' is not valid JSON: " + val);
    }
    try {
      (*it->second)(c, v);
    } catch (const TypeError& e) {
      fail("bad value for '" + key + "': " + e.what);
    } catch (const json::exception& e) {
      fail("bad value for '" + key + "': " + e.what());
    }
    c.given[key] = v;
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::string out;
  for (const auto& key : config_keys())
    if (c.given.contains(key)) out += key + " = " + c.given.at(key).dump() + "\n";
  return out;
}

}  // namespace bipdo
