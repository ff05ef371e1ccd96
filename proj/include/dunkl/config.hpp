#pragma once

// Run configuration shared by the command-line tool and config files.
//
// File format: one `key = value` per line, `#` starts a comment, blank lines are
// ignored. Lists are comma separated. Every key is also a command-line flag
// `--key value`; flags override file values.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <type_traits>
#include <vector>

#include "dunkl/errors.hpp"

namespace dunkl {

struct RunConfig {
  // root system
  std::string family = "z2n";
  int n = 2;
  int m = 3;
  /// One value per root orbit; empty means 1 for every orbit.
  std::vector<double> k;
  // cones
  double delta = 0.3;
  std::string root_scope = "all_positive";
  // sampling
  std::uint64_t seed = 1;
  std::uint64_t samples = 10000;
  double scale_min = 1e-2;
  /// 0 selects the default of the chosen check.
  double scale_max = 0.0;
  // eval
  std::vector<double> x;
  std::vector<double> y;
  double t = 1.0;
  bool imaginary = false;
  // verify
  std::string which = "all";
  std::string variant = "n_squared";
  int g = 0;
  double T = 1e3;
  int grid_points = 200;
  // cover
  int p_max = 64;
  std::uint64_t min_samples = 100000;
  // asymp
  std::string curve = "ray";
  std::vector<double> u1;
  std::vector<double> u2;
  double rotation_rate = 0.0;
  double t0 = 10.0;
  double t_max = 1e5;
  double tol = 1e-2;
  /// 0 selects the default of the chosen command.
  double rtol = 0.0;
  // output
  std::string output = "-";
  std::string csv;
  bool timing = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto r = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DomainError("config: invalid value '" + text + "' for key '" + key + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  const std::string s = trim(text);
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  if (s.back() == ',') throw DomainError("config: trailing comma in '" + key + "'");
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw DomainError("config: invalid boolean '" + text + "' for key '" + key + "'");
}

} // namespace detail

struct ConfigField {
  std::string key;
  std::string help;
  bool is_flag = false;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

namespace detail {

template <class T>
ConfigField make_field(std::string key, T RunConfig::*member, std::string help) {
  ConfigField f;
  f.key = key;
  f.help = std::move(help);
  if constexpr (std::is_same_v<T, std::string>) {
    f.get = [member](const RunConfig& c) { return c.*member; };
    f.set = [member, key](RunConfig& c, const std::string& v) {
      const std::string s = trim(v);
      if (s.find_first_of("#\n") != std::string::npos) throw DomainError("config: '" + key + "' may not contain '#'");
      c.*member = s;
    };
  } else if constexpr (std::is_same_v<T, bool>) {
    f.is_flag = true;
    f.get = [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); };
    f.set = [member, key](RunConfig& c, const std::string& v) { c.*member = parse_bool(key, v); };
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    f.get = [member](const RunConfig& c) { return format_list(c.*member); };
    f.set = [member, key](RunConfig& c, const std::string& v) { c.*member = parse_list(key, v); };
  } else if constexpr (std::is_same_v<T, double>) {
    f.get = [member](const RunConfig& c) { return format_double(c.*member); };
    f.set = [member, key](RunConfig& c, const std::string& v) { c.*member = parse_number<double>(key, v); };
  } else {
    f.get = [member](const RunConfig& c) { return std::to_string(c.*member); };
    f.set = [member, key](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); };
  }
  return f;
}

} // namespace detail

/// Every configuration key, in serialization order.
inline const std::vector<ConfigField>& config_fields() {
  using detail::make_field;
  static const std::vector<ConfigField> fields = {
      make_field("family", &RunConfig::family, "root system: z2n, a2, b2, i2m"),
      make_field("n", &RunConfig::n, "rank of Z2^n (1..4)"),
      make_field("m", &RunConfig::m, "order parameter of I2(m) (2..512)"),
      make_field("k", &RunConfig::k, "multiplicities per root orbit, comma separated (empty: all 1)"),
      make_field("delta", &RunConfig::delta, "cone parameter of C_delta"),
      make_field("root_scope", &RunConfig::root_scope, "roots in the C_delta condition: all_positive or simple_only"),
      make_field("seed", &RunConfig::seed, "random seed"),
      make_field("samples", &RunConfig::samples, "sample count N (stability checks evaluate 2N)"),
      make_field("scale_min", &RunConfig::scale_min, "smallest sampled |x||y|"),
      make_field("scale_max", &RunConfig::scale_max, "largest sampled |x||y| (0: check default)"),
      make_field("x", &RunConfig::x, "first argument x"),
      make_field("y", &RunConfig::y, "second argument y"),
      make_field("t", &RunConfig::t, "scale t in E_k(t x, g y)"),
      make_field("imaginary", &RunConfig::imaginary, "evaluate E_k(i t x, g y)"),
      make_field("which", &RunConfig::which, "check: ez, d1, boundedness, polytope, main, corollary, all"),
      make_field("variant", &RunConfig::variant, "polytope exponent variant: n or n_squared"),
      make_field("g", &RunConfig::g, "group element index for the boundedness check"),
      make_field("T", &RunConfig::T, "right end of the boundedness grid"),
      make_field("grid_points", &RunConfig::grid_points, "points of the boundedness grid"),
      make_field("p_max", &RunConfig::p_max, "largest covering index tried"),
      make_field("min_samples", &RunConfig::min_samples, "minimum cap grid points for the covering"),
      make_field("curve", &RunConfig::curve, "curve pair kind: ray or rotating_ray"),
      make_field("u1", &RunConfig::u1, "direction of the first curve (default: chamber center)"),
      make_field("u2", &RunConfig::u2, "direction of the second curve (default: chamber center)"),
      make_field("rotation_rate", &RunConfig::rotation_rate, "angle rate r of rotating rays, angle r/t"),
      make_field("t0", &RunConfig::t0, "start of the asymptotic march"),
      make_field("t_max", &RunConfig::t_max, "end of the asymptotic march"),
      make_field("tol", &RunConfig::tol, "convergence tolerance of the limit vector"),
      make_field("rtol", &RunConfig::rtol, "ODE relative tolerance (0: command default)"),
      make_field("output", &RunConfig::output, "JSON output path, - for stdout"),
      make_field("csv", &RunConfig::csv, "optional CSV output path"),
      make_field("timing", &RunConfig::timing, "include runtime_ms in reports"),
  };
  return fields;
}

inline const ConfigField& config_field(const std::string& key) {
  for (const auto& f : config_fields())
    if (f.key == key) return f;
  throw DomainError("config: unknown key '" + key + "'");
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  config_field(key).set(c, value);
}

inline std::string get_config_value(const RunConfig& c, const std::string& key) { return config_field(key).get(c); }

/// `key = value` lines for every key.
inline std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& f : config_fields()) out += f.key + " = " + f.get(c) + "\n";
  return out;
}

/// Applies the lines of `text` on top of `base`.
inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

/// Range checks of every numeric field.
inline void validate_config(const RunConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError("config: " + what);
  };
  need(c.family == "z2n" || c.family == "a2" || c.family == "b2" || c.family == "i2m",
       "family must be z2n, a2, b2 or i2m");
  need(c.n >= 1 && c.n <= 4, "n must be in [1, 4]");
  need(c.m >= 2 && c.m <= 512, "m must be in [2, 512]");
  for (double v : c.k) need(std::isfinite(v) && v >= 0.0, "multiplicities must be finite and >= 0");
  need(c.delta >= 0.0 && c.delta < 1.0, "delta must be in [0, 1)");
  need(c.root_scope == "all_positive" || c.root_scope == "simple_only", "root_scope must be all_positive or simple_only");
  need(c.samples >= 1 && c.samples <= 100000000, "samples must be in [1, 1e8]");
  need(c.scale_min > 0.0, "scale_min must be > 0");
  need(c.scale_max == 0.0 || c.scale_max > c.scale_min, "scale_max must be 0 or > scale_min");
  need(std::isfinite(c.t) && c.t >= 0.0, "t must be finite and >= 0");
  need(c.g >= 0, "g must be >= 0");
  need(c.T > 0.0 && std::isfinite(c.T), "T must be > 0");
  need(c.grid_points >= 30 && c.grid_points <= 100000, "grid_points must be in [30, 1e5]");
  need(c.p_max >= 1 && c.p_max <= 4096, "p_max must be in [1, 4096]");
  need(c.min_samples >= 100 && c.min_samples <= 10000000, "min_samples must be in [100, 1e7]");
  need(c.curve == "ray" || c.curve == "rotating_ray", "curve must be ray or rotating_ray");
  need(std::isfinite(c.rotation_rate), "rotation_rate must be finite");
  need(c.t0 > 0.0 && c.t_max > c.t0 && std::isfinite(c.t_max), "need 0 < t0 < t_max");
  need(c.tol > 0.0, "tol must be > 0");
  need(c.rtol == 0.0 || (c.rtol >= 1e-14 && c.rtol <= 1e-3), "rtol must be 0 or in [1e-14, 1e-3]");
  need(!c.output.empty(), "output must not be empty");
}

} // namespace dunkl
