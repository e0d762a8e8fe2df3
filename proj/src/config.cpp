#include "spectree/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spectree/common.hpp"

namespace spectree {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

struct KV {
  std::string value;
  int line;
  bool used = false;
};

class Sections {
public:
  std::map<std::string, std::map<std::string, KV>> data;
  std::string origin;

  const KV* find(const std::string& sec, const std::string& key) const {
    auto s = data.find(sec);
    if (s == data.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }
  std::string get(const std::string& sec, const std::string& key,
                  const std::string& fallback) {
    auto s = data.find(sec);
    if (s == data.end()) return fallback;
    auto k = s->second.find(key);
    if (k == s->second.end()) return fallback;
    k->second.used = true;
    return k->second.value;
  }
  std::string require(const std::string& sec, const std::string& key) {
    const std::string v = get(sec, key, "\x01");
    if (v == "\x01")
      throw Error("invalid-config", origin + ": missing required key '" +
                                        key + "' in section [" + sec + "]");
    return v;
  }
  double get_num(const std::string& sec, const std::string& key,
                 double fallback) {
    const std::string v = get(sec, key, "");
    if (v.empty()) return fallback;
    return parse_num(sec, key, v);
  }
  double require_num(const std::string& sec, const std::string& key) {
    return parse_num(sec, key, require(sec, key));
  }
  double parse_num(const std::string& sec, const std::string& key,
                   const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      const KV* kv = find(sec, key);
      throw Error("invalid-config",
                  origin + ":" +
                      (kv ? std::to_string(kv->line) : std::string("?")) +
                      ": field '" + key + "' in [" + sec +
                      "] is not a number: '" + v + "'");
    }
  }
  bool get_bool(const std::string& sec, const std::string& key,
                bool fallback) {
    const std::string v = get(sec, key, "");
    if (v.empty()) return fallback;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    const KV* kv = find(sec, key);
    throw Error("invalid-config",
                origin + ":" +
                    (kv ? std::to_string(kv->line) : std::string("?")) +
                    ": field '" + key + "' must be a boolean, got '" + v +
                    "'");
  }
};

Sections tokenize(const std::string& text, const std::string& origin) {
  Sections out;
  out.origin = origin;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("invalid-config", origin + ":" + std::to_string(lineno) +
                                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("invalid-config", origin + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error("invalid-config",
                  origin + ":" + std::to_string(lineno) + ": empty key");
    out.data[section][key] = KV{value, lineno};
  }
  return out;
}

std::vector<double> parse_list(Sections& S, const std::string& sec,
                               const std::string& key,
                               const std::string& text) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ','))
    out.push_back(S.parse_num(sec, key, trim(cur)));
  return out;
}

RegularTree parse_tree(Sections& S) {
  const std::string kind = S.get("tree", "kind", "explicit");
  if (kind == "geometric") {
    const double d = S.require_num("tree", "d");
    const int b = static_cast<int>(S.require_num("tree", "b"));
    const int gens =
        static_cast<int>(S.get_num("tree", "generations", 48));
    return RegularTree::geometric(d, b, gens);
  }
  if (kind == "half_line" || kind == "halfline") return RegularTree::half_line();
  if (kind == "terminal" || kind == "explicit") {
    std::vector<double> t = parse_list(S, "tree", "t", S.require("tree", "t"));
    std::vector<double> braw =
        parse_list(S, "tree", "b", S.require("tree", "b"));
    std::vector<int> b(braw.size());
    for (std::size_t i = 0; i < braw.size(); ++i) {
      b[i] = static_cast<int>(braw[i]);
      if (b[i] != braw[i])
        throw Error("invalid-config", "branching numbers must be integers");
    }
    if (kind == "terminal") return RegularTree::terminal(b, t);
    std::optional<double> d;
    if (S.find("tree", "d")) d = S.require_num("tree", "d");
    return RegularTree(t, b, d);
  }
  throw Error("invalid-config", "unknown tree kind '" + kind +
                                    "' (geometric | terminal | explicit | "
                                    "half_line)");
}

RadialPotential parse_potential(Sections& S) {
  const std::string kind = S.require("potential", "kind");
  RadialPotential V;
  if (kind == "well") {
    V = RadialPotential::square_well(S.require_num("potential", "depth"),
                                     S.get_num("potential", "a", 0.0),
                                     S.require_num("potential", "b"));
  } else if (kind == "gaussian") {
    V = RadialPotential::gaussian(S.require_num("potential", "amplitude"),
                                  S.get_num("potential", "sigma", 1.0));
  } else if (kind == "exp_poly") {
    V = RadialPotential::exp_poly(
        S.require_num("potential", "coeff"),
        static_cast<int>(S.get_num("potential", "power", 0)),
        S.require_num("potential", "rate"),
        S.get_num("potential", "from", 0.0));
  } else {
    throw Error("invalid-config", "unknown potential kind '" + kind +
                                      "' (well | gaussian | exp_poly)");
  }
  // Optional additive second term, e.g. for critical-case constructions.
  if (S.find("potential", "bump_kind")) {
    const std::string bk = S.require("potential", "bump_kind");
    if (bk == "well") {
      V = V.plus(RadialPotential::square_well(
          S.require_num("potential", "bump_depth"),
          S.get_num("potential", "bump_a", 0.0),
          S.require_num("potential", "bump_b")));
    } else if (bk == "gaussian") {
      V = V.plus(RadialPotential::gaussian(
          S.require_num("potential", "bump_amplitude"),
          S.get_num("potential", "bump_sigma", 1.0)));
    } else {
      throw Error("invalid-config", "unknown bump kind '" + bk + "'");
    }
  }
  return V;
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& origin) {
  Sections S = tokenize(text, origin);
  Config cfg;
  cfg.tree = parse_tree(S);
  cfg.potential = parse_potential(S);

  if (S.find("tree", "dimension"))
    cfg.dimension = S.require_num("tree", "dimension");
  else if (cfg.tree.declared_dimension())
    cfg.dimension = *cfg.tree.declared_dimension();
  else
    cfg.dimension = 1.0;

  cfg.numerics.h = S.get_num("numerics", "h", cfg.numerics.h);
  const std::string L = S.get("numerics", "L", "auto");
  cfg.numerics.L = (L == "auto") ? 0.0 : S.parse_num("numerics", "L", L);
  cfg.numerics.auto_truncate =
      S.get_bool("numerics", "auto_truncate", cfg.numerics.auto_truncate);
  cfg.numerics.richardson =
      S.get_bool("numerics", "richardson", cfg.numerics.richardson);
  cfg.numerics.grading = S.get_num("numerics", "grading", cfg.numerics.grading);
  cfg.numerics.bracket_rel =
      S.get_num("numerics", "bracket_rel", cfg.numerics.bracket_rel);
  cfg.numerics.max_nodes = static_cast<std::size_t>(
      S.get_num("numerics", "max_nodes", cfg.numerics.max_nodes));

  cfg.sweep.lambda_min = S.get_num("sweep", "lambda_min", cfg.sweep.lambda_min);
  cfg.sweep.lambda_max = S.get_num("sweep", "lambda_max", cfg.sweep.lambda_max);
  cfg.sweep.points_per_decade = static_cast<int>(
      S.get_num("sweep", "points_per_decade", cfg.sweep.points_per_decade));
  cfg.sweep.lambda = S.get_num("sweep", "lambda", cfg.sweep.lambda);

  cfg.bs.nodes_per_panel = static_cast<int>(
      S.get_num("bs", "nodes_per_panel", cfg.bs.nodes_per_panel));
  if (S.find("bs", "kappas"))
    cfg.bs.kappas = parse_list(S, "bs", "kappas", S.require("bs", "kappas"));

  cfg.k_max = static_cast<int>(S.get_num("decomposition", "k_max", -1));

  for (const auto& [sec, kvs] : S.data)
    for (const auto& [key, kv] : kvs)
      cfg.raw[sec.empty() ? key : sec + "." + key] = kv.value;
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw Error("invalid-config", "cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace spectree
