#pragma once

// Run configuration: a sectioned key = value text file.
//
//   [grid]        n, L, dealias
//   [profile]     kind (constant|tanh|gaussian|sampled), amplitude, width, offset, speed, file
//   [initial]     kind (zero|constant|gaussian|mode|noise|file), amplitude, width, center,
//                 mode, seed, file
//   [time]        t_end, dt, picard_tol, picard_max, linear_only, substep,
//                 convergence_dts, reference_dt
//   [quadrature]  z_max, z_min, panels, order
//   [output]      stride, snapshots, kernel_times, norm_t_min, norm_t_max, norm_samples
//
// '#' and ';' start comments. A key may also be written fully qualified
// (grid.n = 2048) outside any section. Unknown keys are errors.

#include "fowler/evolution.hpp"
#include "fowler/io.hpp"
#include "fowler/nonlocal.hpp"
#include "fowler/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fowler {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SimConfig sim;
  QuadratureSpec quadrature;
  std::vector<double> kernel_times{0.1, 0.5};
  std::vector<double> convergence_dts{4e-3, 2e-3, 1e-3};
  double reference_dt = 1.25e-4;
  bool snapshots = false;
  std::string source;

  // raw values, kept for the echo
  std::size_t n = 1024;
  double length = 40.0;
  std::optional<double> z_max;
  std::string profile_kind = "constant";
  std::string profile_file;
  std::string initial_kind = "gaussian";
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline double parse_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, d);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(d))
    throw ConfigError(key + " must be a finite number, got '" + v + "'");
  return d;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  long long i = 0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, i);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(key + " must be an integer, got '" + v + "'");
  return i;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + " must be true or false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + " must be a non-empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

inline const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = [] {
    std::vector<std::pair<std::string, Setter>> t;
    auto add = [&](const char* k, Setter s) { t.emplace_back(k, std::move(s)); };
    add("grid.n", [](RunConfig& c, auto& k, auto& v) {
      const auto n = parse_int(k, v);
      if (n < 1) throw ConfigError("grid.n must be positive");
      c.n = static_cast<std::size_t>(n);
    });
    add("grid.L", [](RunConfig& c, auto& k, auto& v) { c.length = parse_double(k, v); });
    add("grid.dealias", [](RunConfig& c, auto& k, auto& v) { c.sim.dealias = parse_bool(k, v); });
    add("profile.kind", [](RunConfig& c, auto&, auto& v) { c.profile_kind = v; });
    add("profile.amplitude",
        [](RunConfig& c, auto& k, auto& v) { c.sim.profile.amplitude = parse_double(k, v); });
    add("profile.width",
        [](RunConfig& c, auto& k, auto& v) { c.sim.profile.width = parse_double(k, v); });
    add("profile.offset",
        [](RunConfig& c, auto& k, auto& v) { c.sim.profile.offset = parse_double(k, v); });
    add("profile.speed",
        [](RunConfig& c, auto& k, auto& v) { c.sim.profile.speed = parse_double(k, v); });
    add("profile.file", [](RunConfig& c, auto&, auto& v) { c.profile_file = v; });
    add("initial.kind", [](RunConfig& c, auto&, auto& v) { c.initial_kind = v; });
    add("initial.amplitude",
        [](RunConfig& c, auto& k, auto& v) { c.sim.v0.amplitude = parse_double(k, v); });
    add("initial.width",
        [](RunConfig& c, auto& k, auto& v) { c.sim.v0.width = parse_double(k, v); });
    add("initial.center",
        [](RunConfig& c, auto& k, auto& v) { c.sim.v0.center = parse_double(k, v); });
    add("initial.mode", [](RunConfig& c, auto& k, auto& v) {
      c.sim.v0.mode = static_cast<long>(parse_int(k, v));
    });
    add("initial.seed", [](RunConfig& c, auto& k, auto& v) {
      const auto s = parse_int(k, v);
      if (s < 0) throw ConfigError("initial.seed must be >= 0");
      c.sim.v0.seed = static_cast<std::uint64_t>(s);
    });
    add("initial.file", [](RunConfig& c, auto&, auto& v) { c.sim.v0.path = v; });
    add("time.t_end", [](RunConfig& c, auto& k, auto& v) { c.sim.t_end = parse_double(k, v); });
    add("time.dt", [](RunConfig& c, auto& k, auto& v) { c.sim.dt = parse_double(k, v); });
    add("time.picard_tol",
        [](RunConfig& c, auto& k, auto& v) { c.sim.picard_tol = parse_double(k, v); });
    add("time.picard_max", [](RunConfig& c, auto& k, auto& v) {
      c.sim.picard_max = static_cast<int>(parse_int(k, v));
    });
    add("time.linear_only",
        [](RunConfig& c, auto& k, auto& v) { c.sim.linear_only = parse_bool(k, v); });
    add("time.substep", [](RunConfig& c, auto& k, auto& v) { c.sim.substep = parse_bool(k, v); });
    add("time.convergence_dts",
        [](RunConfig& c, auto& k, auto& v) { c.convergence_dts = parse_list(k, v); });
    add("time.reference_dt",
        [](RunConfig& c, auto& k, auto& v) { c.reference_dt = parse_double(k, v); });
    add("quadrature.z_max", [](RunConfig& c, auto& k, auto& v) { c.z_max = parse_double(k, v); });
    add("quadrature.z_min",
        [](RunConfig& c, auto& k, auto& v) { c.quadrature.z_min = parse_double(k, v); });
    add("quadrature.panels", [](RunConfig& c, auto& k, auto& v) {
      const auto p = parse_int(k, v);
      if (p < 0) throw ConfigError("quadrature.panels must be >= 16");
      c.quadrature.panels = static_cast<std::size_t>(p);
    });
    add("quadrature.order", [](RunConfig& c, auto& k, auto& v) {
      const auto p = parse_int(k, v);
      if (p < 1 || p > 64) throw ConfigError("quadrature.order must be in [1, 64]");
      c.quadrature.order = static_cast<std::size_t>(p);
    });
    add("output.stride", [](RunConfig& c, auto& k, auto& v) {
      const auto s = parse_int(k, v);
      if (s < 1) throw ConfigError("output.stride must be >= 1");
      c.sim.output_stride = static_cast<std::size_t>(s);
    });
    add("output.snapshots", [](RunConfig& c, auto& k, auto& v) { c.snapshots = parse_bool(k, v); });
    add("output.kernel_times",
        [](RunConfig& c, auto& k, auto& v) { c.kernel_times = parse_list(k, v); });
    add("output.norm_t_min",
        [](RunConfig& c, auto& k, auto& v) { c.sim.fit.t_min = parse_double(k, v); });
    add("output.norm_t_max",
        [](RunConfig& c, auto& k, auto& v) { c.sim.fit.t_max = parse_double(k, v); });
    add("output.norm_samples", [](RunConfig& c, auto& k, auto& v) {
      const auto s = parse_int(k, v);
      if (s < 2) throw ConfigError("output.norm_samples must be >= 2");
      c.sim.fit.samples = static_cast<std::size_t>(s);
    });
    return t;
  }();
  return table;
}

inline std::string nearest_key(const std::string& key) {
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& [k, s] : setters()) {
    const std::size_t d = edit_distance(key, k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

/// Convert the raw values into validated runtime objects.
inline void finalize(RunConfig& c) {
  if (c.n % 2 != 0) throw ConfigError("grid.n must be even");
  if (c.n < 8) throw ConfigError("grid.n must be at least 8");
  if (!(c.length > 0.0)) throw ConfigError("grid.L must be > 0");
  c.sim.grid = Grid(c.n, c.length);
  const Grid& g = c.sim.grid;

  WaveProfile& p = c.sim.profile;
  if (c.profile_kind == "constant") p.kind = ProfileKind::constant;
  else if (c.profile_kind == "tanh") p.kind = ProfileKind::tanh_front;
  else if (c.profile_kind == "gaussian") p.kind = ProfileKind::gaussian_bump;
  else if (c.profile_kind == "sampled") p.kind = ProfileKind::sampled;
  else
    throw ConfigError("profile.kind must be one of constant, tanh, gaussian, sampled; got '" +
                      c.profile_kind + "'");
  if (p.kind == ProfileKind::sampled) {
    if (c.profile_file.empty()) throw ConfigError("profile.file is required for profile.kind = sampled");
    auto v = read_samples(c.profile_file);
    if (v.size() != g.n())
      throw ConfigError("profile.file has " + std::to_string(v.size()) +
                        " values, grid.n is " + std::to_string(g.n()));
    p.samples = RealField(g, std::move(v));
  } else if (!c.profile_file.empty()) {
    throw ConfigError("profile.file is only valid with profile.kind = sampled");
  }

  InitialSpec& s = c.sim.v0;
  static const std::map<std::string, InitialKind> kinds{
      {"zero", InitialKind::zero},   {"constant", InitialKind::constant},
      {"gaussian", InitialKind::gaussian}, {"mode", InitialKind::mode},
      {"noise", InitialKind::noise}, {"file", InitialKind::file}};
  const auto it = kinds.find(c.initial_kind);
  if (it == kinds.end())
    throw ConfigError("initial.kind must be one of zero, constant, gaussian, mode, noise, file; got '" +
                      c.initial_kind + "'");
  s.kind = it->second;
  if (s.kind == InitialKind::gaussian && !(s.width > 0.0))
    throw ConfigError("initial.width must be > 0");
  if (s.kind == InitialKind::mode && std::labs(s.mode) >= static_cast<long>(g.n() / 2))
    throw ConfigError("initial.mode must satisfy |mode| < grid.n / 2");
  if (s.kind == InitialKind::file && s.path.empty())
    throw ConfigError("initial.file is required for initial.kind = file");

  c.quadrature.z_max = c.z_max.value_or(0.5 * c.length);
  for (double t : c.kernel_times)
    if (!(t > 0.0)) throw ConfigError("output.kernel_times must all be > 0");
  for (double dt : c.convergence_dts)
    if (!(dt > 0.0)) throw ConfigError("time.convergence_dts must all be > 0");
  if (!(c.reference_dt > 0.0)) throw ConfigError("time.reference_dt must be > 0");

  try {
    c.sim.validate();
    c.quadrature.validate(g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace config_detail

inline RunConfig parse_config_text(const std::string& text, const std::string& source = "<text>") {
  RunConfig c;
  c.source = source;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find_first_of("#;"); h != std::string::npos) line.erase(h);
    const std::string t = config_detail::trim(line);
    if (t.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + "malformed section header '" + t + "'");
      section = config_detail::trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + t + "'");
    const std::string key = config_detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = config_detail::trim(std::string_view(t).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto& table = config_detail::setters();
    const auto s = std::find_if(table.begin(), table.end(),
                                [&](const auto& e) { return e.first == full; });
    if (s == table.end())
      throw ConfigError(where + "unknown key '" + full + "' (nearest valid key: '" +
                        config_detail::nearest_key(full) + "')");
    if (seen.count(full))
      throw ConfigError(where + "duplicate key '" + full + "' (first set on line " +
                        std::to_string(seen[full]) + ")");
    seen[full] = lineno;
    if (value.empty()) throw ConfigError(where + full + " has no value");
    s->second(c, full, value);
  }
  config_detail::finalize(c);
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

/// Fully resolved configuration as (key, value) pairs in schema order.
inline std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& c) {
  using io::format_number;
  const SimConfig& s = c.sim;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::vector<std::pair<std::string, std::string>> e{
      {"grid.n", std::to_string(c.sim.grid.n())},
      {"grid.L", format_number(c.sim.grid.length())},
      {"grid.dealias", b(s.dealias)},
      {"profile.kind", to_string(s.profile.kind)},
      {"profile.amplitude", format_number(s.profile.amplitude)},
      {"profile.width", format_number(s.profile.width)},
      {"profile.offset", format_number(s.profile.offset)},
      {"profile.speed", format_number(s.profile.speed)},
      {"profile.file", c.profile_file},
      {"initial.kind", to_string(s.v0.kind)},
      {"initial.amplitude", format_number(s.v0.amplitude)},
      {"initial.width", format_number(s.v0.width)},
      {"initial.center", format_number(s.v0.center)},
      {"initial.mode", std::to_string(s.v0.mode)},
      {"initial.seed", std::to_string(s.v0.seed)},
      {"initial.file", s.v0.path},
      {"time.t_end", format_number(s.t_end)},
      {"time.dt", format_number(s.dt)},
      {"time.picard_tol", format_number(s.picard_tol)},
      {"time.picard_max", std::to_string(s.picard_max)},
      {"time.linear_only", b(s.linear_only)},
      {"time.substep", b(s.substep)},
      {"time.convergence_dts", io::format_list(c.convergence_dts)},
      {"time.reference_dt", format_number(c.reference_dt)},
      {"quadrature.z_max", format_number(c.quadrature.z_max)},
      {"quadrature.z_min", format_number(c.quadrature.z_min)},
      {"quadrature.panels", std::to_string(c.quadrature.panels)},
      {"quadrature.order", std::to_string(c.quadrature.order)},
      {"output.stride", std::to_string(s.output_stride)},
      {"output.snapshots", b(c.snapshots)},
      {"output.kernel_times", io::format_list(c.kernel_times)},
      {"output.norm_t_min", format_number(s.fit.t_min)},
      {"output.norm_t_max", format_number(s.fit.t_max)},
      {"output.norm_samples", std::to_string(s.fit.samples)},
  };
  return e;
}

}  // namespace fowler
