#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "oldroyd/integrator.hpp"
#include "oldroyd/model.hpp"

namespace oldroyd::harness {

enum class ModelKind { Oldroyd, Hookean, Linearized };
enum class Preset { TaylorGreen, RandomBand, HookeanGeneric };

inline std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Oldroyd: return "oldroyd";
    case ModelKind::Hookean: return "hookean";
    case ModelKind::Linearized: return "linearized";
  }
  return "?";
}

inline std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::TaylorGreen: return "taylor-green";
    case Preset::RandomBand: return "random-band";
    case Preset::HookeanGeneric: return "hookean-generic";
  }
  return "?";
}

inline Preset parse_preset(std::string_view name) {
  if (name == "taylor-green") return Preset::TaylorGreen;
  if (name == "random-band") return Preset::RandomBand;
  if (name == "hookean-generic") return Preset::HookeanGeneric;
  throw BadPreset(std::string(name));
}

/// Directory used when output.dir is relative or unset.
inline constexpr const char* kOutputRootEnv = "OLDROYD_OUTPUT_ROOT";

inline std::filesystem::path default_output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("out");
}

struct RunConfig {
  int n = 32;
  ModelParams params{};
  IntegratorConfig time{};

  Preset preset = Preset::RandomBand;
  double amplitude = 0.01;
  double kmax = 4.0;
  std::uint64_t seed = 42;

  ModelKind model = ModelKind::Oldroyd;
  /// Zero the k = 0 tendency of tau instead of evolving its mean.
  bool project_tau_mean = false;

  std::string output_dir = "run";
  bool snapshots = false;
  int snapshot_interval = 1000;

  /// Late-time fitting window; negative values mean t_end / 2 and t_end.
  double fit_start = -1.0;
  double fit_end = -1.0;
  /// Identity-suite trials appended to report.txt; 0 skips the suite.
  int identity_trials = 0;

  double fit_lo() const { return fit_start < 0.0 ? 0.5 * time.t_end : fit_start; }
  double fit_hi() const { return fit_end < 0.0 ? time.t_end : fit_end; }

  std::filesystem::path output_path() const {
    const std::filesystem::path p(output_dir);
    return p.is_absolute() ? p : default_output_root() / p;
  }

  void validate() const {
    if (n < 8 || n % 2 != 0) throw OutOfRange("grid.n", "must be even and >= 8");
    params.validate();
    time.validate();
    if (!(amplitude >= 0.0)) throw OutOfRange("init.amplitude", "must be >= 0");
    if (!(kmax >= 1.0)) throw OutOfRange("init.kmax", "must be >= 1");
    if (kmax > n / 3.0) throw OutOfRange("init.kmax", "must be <= n/3 to stay alias-free");
    if (snapshot_interval < 1) throw OutOfRange("output.snapshot_interval", "must be >= 1");
    if (snapshots && snapshot_interval % time.diag_interval != 0) {
      throw OutOfRange("output.snapshot_interval", "must be a multiple of time.diag_interval");
    }
    if (fit_start >= 0.0 && fit_end >= 0.0 && !(fit_end > fit_start)) {
      throw OutOfRange("report.fit_end", "must exceed report.fit_start");
    }
    if (identity_trials < 0) throw OutOfRange("report.identity_trials", "must be >= 0");
    if (model == ModelKind::Hookean && preset != Preset::HookeanGeneric &&
        preset != Preset::TaylorGreen) {
      throw OutOfRange("init.preset", "hookean model needs taylor-green or hookean-generic");
    }
    if (model != ModelKind::Hookean && preset == Preset::HookeanGeneric) {
      throw OutOfRange("init.preset", "hookean-generic needs model = hookean");
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw OutOfRange(key, "'" + v + "' is not a number");
  }
  if (pos != v.size()) throw OutOfRange(key, "'" + v + "' is not a number");
  return d;
}

inline long long to_integer(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw OutOfRange(key, "'" + v + "' is not an integer");
  }
  if (pos != v.size()) throw OutOfRange(key, "'" + v + "' is not an integer");
  return i;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw OutOfRange(key, "'" + v + "' is not a boolean");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"grid.n", [](RunConfig& c, const auto& k, const auto& v) { c.n = static_cast<int>(to_integer(k, v)); }},
      {"params.mu", [](RunConfig& c, const auto& k, const auto& v) { c.params.mu = to_double(k, v); }},
      {"params.mu1", [](RunConfig& c, const auto& k, const auto& v) { c.params.mu1 = to_double(k, v); }},
      {"params.mu2", [](RunConfig& c, const auto& k, const auto& v) { c.params.mu2 = to_double(k, v); }},
      {"params.a", [](RunConfig& c, const auto& k, const auto& v) { c.params.a = to_double(k, v); }},
      {"params.b", [](RunConfig& c, const auto& k, const auto& v) { c.params.b = to_double(k, v); }},
      {"time.dt", [](RunConfig& c, const auto& k, const auto& v) { c.time.dt = to_double(k, v); }},
      {"time.t_end", [](RunConfig& c, const auto& k, const auto& v) { c.time.t_end = to_double(k, v); }},
      {"time.diag_interval",
       [](RunConfig& c, const auto& k, const auto& v) { c.time.diag_interval = static_cast<int>(to_integer(k, v)); }},
      {"time.cfl_limit", [](RunConfig& c, const auto& k, const auto& v) { c.time.cfl_limit = to_double(k, v); }},
      {"init.preset", [](RunConfig& c, const auto&, const auto& v) { c.preset = parse_preset(v); }},
      {"init.amplitude", [](RunConfig& c, const auto& k, const auto& v) { c.amplitude = to_double(k, v); }},
      {"init.kmax", [](RunConfig& c, const auto& k, const auto& v) { c.kmax = to_double(k, v); }},
      {"init.seed",
       [](RunConfig& c, const auto& k, const auto& v) {
         const long long s = to_integer(k, v);
         if (s < 0) throw OutOfRange(k, "must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"model",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v == "oldroyd") c.model = ModelKind::Oldroyd;
         else if (v == "hookean") c.model = ModelKind::Hookean;
         else if (v == "linearized") c.model = ModelKind::Linearized;
         else throw OutOfRange(k, "expected oldroyd, hookean or linearized");
       }},
      {"model.tau_mean",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v == "evolve") c.project_tau_mean = false;
         else if (v == "project") c.project_tau_mean = true;
         else throw OutOfRange(k, "expected evolve or project");
       }},
      {"output.dir", [](RunConfig& c, const auto&, const auto& v) { c.output_dir = v; }},
      {"output.snapshots", [](RunConfig& c, const auto& k, const auto& v) { c.snapshots = to_bool(k, v); }},
      {"output.snapshot_interval",
       [](RunConfig& c, const auto& k, const auto& v) { c.snapshot_interval = static_cast<int>(to_integer(k, v)); }},
      {"report.fit_start", [](RunConfig& c, const auto& k, const auto& v) { c.fit_start = to_double(k, v); }},
      {"report.fit_end", [](RunConfig& c, const auto& k, const auto& v) { c.fit_end = to_double(k, v); }},
      {"report.identity_trials",
       [](RunConfig& c, const auto& k, const auto& v) { c.identity_trials = static_cast<int>(to_integer(k, v)); }},
  };
  return table;
}

}  // namespace detail

/// Applies one `key = value` assignment; `line` is only used in errors.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                             int line = 0) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw UnknownKey(line, key);
  it->second(cfg, key, value);
}

/// Line-oriented `key = value` text with `#` comments. Unset keys keep their
/// defaults; the result is validated.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key");
    if (value.empty()) throw ParseError(line, "missing value for '" + key + "'");
    set_config_value(cfg, key, value, line);
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form; parse_config(format_config(c)) reproduces c.
inline std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "grid.n = " << c.n << "\n"
    << "params.mu = " << c.params.mu << "\n"
    << "params.mu1 = " << c.params.mu1 << "\n"
    << "params.mu2 = " << c.params.mu2 << "\n"
    << "params.a = " << c.params.a << "\n"
    << "params.b = " << c.params.b << "\n"
    << "time.dt = " << c.time.dt << "\n"
    << "time.t_end = " << c.time.t_end << "\n"
    << "time.diag_interval = " << c.time.diag_interval << "\n"
    << "time.cfl_limit = " << c.time.cfl_limit << "\n"
    << "init.preset = " << to_string(c.preset) << "\n"
    << "init.amplitude = " << c.amplitude << "\n"
    << "init.kmax = " << c.kmax << "\n"
    << "init.seed = " << c.seed << "\n"
    << "model = " << to_string(c.model) << "\n"
    << "model.tau_mean = " << (c.project_tau_mean ? "project" : "evolve") << "\n"
    << "output.dir = " << c.output_dir << "\n"
    << "output.snapshots = " << (c.snapshots ? "true" : "false") << "\n"
    << "output.snapshot_interval = " << c.snapshot_interval << "\n"
    << "report.fit_start = " << c.fit_start << "\n"
    << "report.fit_end = " << c.fit_end << "\n"
    << "report.identity_trials = " << c.identity_trials << "\n";
  return o.str();
}

}  // namespace oldroyd::harness
