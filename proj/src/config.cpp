#include "curvkit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "curvkit/suites.hpp"

namespace curvkit {

namespace {

std::string trim(const std::string& s, std::size_t& offset) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    offset = s.size();
    return "";
  }
  const std::size_t b = s.find_last_not_of(" \t\r");
  offset = a;
  return s.substr(a, b - a + 1);
}

struct Value {
  std::string text;
  int line;
  int column;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(line, column, what); }

  long long integer(long long lo, long long hi) const {
    long long v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) fail("expected an integer, got '" + text + "'");
    if (v < lo || v > hi) fail("value " + text + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  double real(bool positive) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) fail("expected a number, got '" + text + "'");
    if (positive && !(v > 0.0)) fail("expected a positive number, got '" + text + "'");
    if (!positive && !(v >= 0.0)) fail("expected a nonnegative number, got '" + text + "'");
    return v;
  }

  bool boolean() const {
    if (text == "true") return true;
    if (text == "false") return false;
    fail("expected true or false, got '" + text + "'");
  }

  std::vector<std::string> items() const {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t off = 0;
      item = trim(item, off);
      if (item.empty()) fail("empty list item");
      out.push_back(item);
    }
    if (out.empty()) fail("expected a non-empty list");
    return out;
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& s : items()) out.push_back(Value{s, line, column}.real(true));
    return out;
  }
};

using Setter = std::function<void(SuiteConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"suite",
       [](SuiteConfig& c, const Value& v) {
         const auto names = suite_names();
         if (v.text != "all" && std::find(names.begin(), names.end(), v.text) == names.end())
           v.fail("unknown suite '" + v.text + "'");
         c.suite = v.text;
       }},
      {"fast", [](SuiteConfig& c, const Value& v) { c.fast = v.boolean(); }},
      {"threads", [](SuiteConfig& c, const Value& v) { c.threads = static_cast<int>(v.integer(0, 4096)); }},
      {"seed", [](SuiteConfig& c, const Value& v) { c.seed = static_cast<std::uint64_t>(v.integer(0, INT64_MAX)); }},
      {"output", [](SuiteConfig& c, const Value& v) { c.output = v.text; }},
      {"format",
       [](SuiteConfig& c, const Value& v) {
         if (v.text != "json" && v.text != "csv") v.fail("format must be json or csv");
         c.format = v.text;
       }},
      {"checks",
       [](SuiteConfig& c, const Value& v) {
         const auto groups = all_check_groups();
         for (const auto& g : v.items())
           if (std::find(groups.begin(), groups.end(), g) == groups.end()) v.fail("unknown check group '" + g + "'");
         c.checks = v.items();
       }},
      {"tensors.points", [](SuiteConfig& c, const Value& v) { c.tensors_points = static_cast<int>(v.integer(1, 1000000)); }},
      {"conformal.fields", [](SuiteConfig& c, const Value& v) { c.conformal_fields = static_cast<int>(v.integer(1, 100000)); }},
      {"gbc.nodes", [](SuiteConfig& c, const Value& v) { c.gbc_nodes = static_cast<int>(v.integer(2, 256)); }},
      {"gbc6.nodes", [](SuiteConfig& c, const Value& v) { c.gbc6_nodes = static_cast<int>(v.integer(2, 64)); }},
      {"expansion.radii", [](SuiteConfig& c, const Value& v) { c.expansion_radii = v.reals(); }},
      {"expansion.radial_nodes",
       [](SuiteConfig& c, const Value& v) { c.expansion_radial_nodes = static_cast<int>(v.integer(2, 256)); }},
      {"expansion.angular_nodes",
       [](SuiteConfig& c, const Value& v) { c.expansion_angular_nodes = static_cast<int>(v.integer(2, 256)); }},
      {"oneill.epsilons", [](SuiteConfig& c, const Value& v) { c.oneill_epsilons = v.reals(); }},
      {"stereographic.points",
       [](SuiteConfig& c, const Value& v) { c.stereographic_points = static_cast<int>(v.integer(1, 10000000)); }},
      {"sobolev.samples", [](SuiteConfig& c, const Value& v) { c.sobolev_samples = static_cast<int>(v.integer(1, 100000)); }},
      {"sobolev.nodes", [](SuiteConfig& c, const Value& v) { c.sobolev_nodes = static_cast<int>(v.integer(4, 256)); }},
      {"yamabe.nodes", [](SuiteConfig& c, const Value& v) { c.yamabe_nodes = static_cast<int>(v.integer(4, 256)); }},
      {"yamabe.iterations", [](SuiteConfig& c, const Value& v) { c.yamabe_iterations = static_cast<int>(v.integer(1, 100000)); }},
      {"kleinian.generators",
       [](SuiteConfig& c, const Value& v) {
         c.kleinian_generators = v.items();
       }},
      {"kleinian.dim", [](SuiteConfig& c, const Value& v) { c.kleinian_dim = static_cast<int>(v.integer(2, 16)); }},
      {"kleinian.length", [](SuiteConfig& c, const Value& v) { c.kleinian_length = v.real(true); }},
      {"kleinian.max_length",
       [](SuiteConfig& c, const Value& v) { c.kleinian_max_length = static_cast<int>(v.integer(3, 64)); }},
      {"kleinian.points", [](SuiteConfig& c, const Value& v) { c.kleinian_points = static_cast<int>(v.integer(1, 10000000)); }},
      {"kleinian.word_length",
       [](SuiteConfig& c, const Value& v) { c.kleinian_word_length = static_cast<int>(v.integer(1, 4096)); }},
      {"kleinian.cyclic_length", [](SuiteConfig& c, const Value& v) { c.kleinian_cyclic_length = v.real(true); }},
      {"kleinian.cyclic_max_length",
       [](SuiteConfig& c, const Value& v) { c.kleinian_cyclic_max_length = static_cast<int>(v.integer(3, 100000)); }},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(int line, int column, const std::string& message)
    : Error("config line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  keys.push_back("tol_abs.<check id>");
  keys.push_back("tol_rel.<check id>");
  return keys;
}

SuiteConfig parse_config(std::istream& in) {
  SuiteConfig config;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  const auto ids = known_check_ids();
  std::map<std::string, std::pair<int, int>> where;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::size_t off = 0;
    if (trim(body, off).empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, static_cast<int>(off) + 1, "expected 'key = value'");
    std::size_t key_off = 0, value_off = 0;
    const std::string key = trim(body.substr(0, eq), key_off);
    const std::string value = trim(body.substr(eq + 1), value_off);
    const int key_col = static_cast<int>(key_off) + 1;
    const int value_col = static_cast<int>(eq + 1 + value_off) + 1;
    if (key.empty()) throw ConfigError(line, key_col, "missing key before '='");
    if (value.empty()) throw ConfigError(line, value_col, "missing value for key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(line, key_col, "duplicate key '" + key + "'");
    const Value v{value, line, value_col};
    where[key] = {line, value_col};
    bool handled = false;
    for (const char* prefix : {"tol_abs.", "tol_rel."}) {
      const std::string p(prefix);
      if (key.rfind(p, 0) == 0) {
        const std::string id = key.substr(p.size());
        if (std::find(ids.begin(), ids.end(), id) == ids.end())
          throw ConfigError(line, key_col + static_cast<int>(p.size()), "unknown check id '" + id + "' in key '" + key + "'");
        (p == "tol_abs." ? config.tolerances[id].abs : config.tolerances[id].rel) = v.real(false);
        handled = true;
      }
    }
    if (!handled) {
      const auto it = setters().find(key);
      if (it == setters().end()) throw ConfigError(line, key_col, "unknown key '" + key + "'");
      it->second(config, v);
    }
  }
  // Generators are checked once the dimension is known.
  for (const auto& g : config.kleinian_generators) {
    try {
      parse_generator(g, config.kleinian_dim);
    } catch (const Error& e) {
      const auto [l, c] = where.at("kleinian.generators");
      throw ConfigError(l, c, e.what());
    }
  }
  return config;
}

SuiteConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

SuiteConfig parse_config_file(const std::string& path) {
  if (path == "-") return parse_config(std::cin);
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  return parse_config(in);
}

}  // namespace curvkit
