#pragma once

// Scenario configuration: an INI-style text format with sections
//
//   [grid] [disturbance.N] [limit_cycle] [controller] [simulation]
//
// whose keys mirror the type fields (R1_ohm, amplitude_A, phase_rad, mu,
// Hp, tau_s, ...).  Numeric values accept a small expression grammar with
// `pi` and `atan(a/b)` tokens plus + - * / and parentheses, so exact
// constants like `atan(3/4)+pi/2` survive without decimal truncation.
// Unknown sections or keys are errors; every diagnostic carries its line
// number.  Serialization emits the effective config at full double
// precision (17 significant digits), which round-trips bit-exactly.

#include "simulator.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace lcmpc {

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

// ===== Value expressions ===================================================

namespace detail {

class ValueParser {
 public:
  explicit ValueParser(const std::string& text) : s_(text), pos_(0) {}

  double parse() {
    const double v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  double expr() {
    double v = term();
    while (true) {
      skip_ws();
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = factor();
    while (true) {
      skip_ws();
      if (accept('*')) v *= factor();
      else if (accept('/')) v /= factor();
      else return v;
    }
  }

  double factor() {
    skip_ws();
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    if (accept('(')) {
      const double v = expr();
      expect(')');
      return v;
    }
    if (std::isalpha(peek())) {
      const std::string word = ident();
      if (word == "pi") return M_PI;
      if (word == "atan") {
        expect('(');
        const double v = expr();
        expect(')');
        return std::atan(v);
      }
      fail("unknown token '" + word + "'");
    }
    return number();
  }

  double number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(peek()) || peek() == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool accept(char c) {
    if (peek() == c) { ++pos_; return true; }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("cannot parse value '" + s_ + "': " + what);
  }

  std::string s_;
  std::size_t pos_;
};

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace detail

/// Evaluates one config value expression (`0.1`, `pi/2`, `atan(4/3)+pi`).
inline double parse_value(const std::string& text) {
  return detail::ValueParser(text).parse();
}

// ===== Config file =========================================================

namespace detail {

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawSection {
  std::map<std::string, RawEntry> entries;
  int line = 0;
};

inline double take_number(RawSection& sec, const std::string& key, double fallback) {
  auto it = sec.entries.find(key);
  if (it == sec.entries.end()) return fallback;
  it->second.used = true;
  try {
    return parse_value(it->second.value);
  } catch (const std::exception& e) {
    throw ConfigError(it->second.line, e.what());
  }
}

inline std::string take_word(RawSection& sec, const std::string& key,
                             const std::string& fallback) {
  auto it = sec.entries.find(key);
  if (it == sec.entries.end()) return fallback;
  it->second.used = true;
  return it->second.value;
}

inline void check_all_used(const RawSection& sec, const std::string& name) {
  for (const auto& [key, entry] : sec.entries)
    if (!entry.used)
      throw ConfigError(entry.line, "unknown key '" + key + "' in [" + name + "]");
}

}  // namespace detail

/// Parses a scenario config from text.  Missing sections and keys fall back
/// to the default experiment values; malformed input throws ConfigError
/// with the offending line number.
inline SimulationConfig parse_config(const std::string& text) {
  std::map<std::string, detail::RawSection> sections;
  std::vector<std::string> disturbance_sections;

  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line_no, "malformed section header '" + raw + "'");
      current = detail::trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError(line_no, "empty section name");
      const bool known = current == "grid" || current == "limit_cycle" ||
                         current == "controller" || current == "simulation" ||
                         current.rfind("disturbance.", 0) == 0;
      if (!known) throw ConfigError(line_no, "unknown section [" + current + "]");
      if (sections.count(current))
        throw ConfigError(line_no, "duplicate section [" + current + "]");
      sections[current].line = line_no;
      if (current.rfind("disturbance.", 0) == 0) disturbance_sections.push_back(current);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected 'key = value', got '" + raw + "'");
    if (current.empty())
      throw ConfigError(line_no, "key outside any [section]");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(line_no, "empty key or value");
    auto& section = sections[current];
    if (section.entries.count(key))
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    section.entries[key] = detail::RawEntry{value, line_no, false};
  }

  detail::RawSection& grid_sec = sections["grid"];
  GridCircuitParams grid;
  grid.R1 = detail::take_number(grid_sec, "R1_ohm", grid.R1);
  grid.R2 = detail::take_number(grid_sec, "R2_ohm", grid.R2);
  grid.L2 = detail::take_number(grid_sec, "L2_H", grid.L2);
  grid.C2 = detail::take_number(grid_sec, "C2_F", grid.C2);
  grid.f = detail::take_number(grid_sec, "f_Hz", grid.f);
  grid.vs_amplitude = detail::take_number(grid_sec, "vs_amplitude_V", grid.vs_amplitude);
  detail::check_all_used(grid_sec, "grid");

  std::vector<HarmonicComponent> disturbance;
  for (const std::string& name : disturbance_sections) {
    detail::RawSection& sec = sections[name];
    HarmonicComponent c;
    c.order = static_cast<int>(std::lround(detail::take_number(sec, "order", 1)));
    c.amplitude = detail::take_number(sec, "amplitude_A", 0.0);
    c.phase = detail::take_number(sec, "phase_rad", 0.0);
    detail::check_all_used(sec, name);
    disturbance.push_back(c);
  }

  detail::RawSection& lc_sec = sections["limit_cycle"];
  const double mu = detail::take_number(lc_sec, "mu", 1e-2);
  const double alpha = detail::take_number(lc_sec, "alpha", -1e-2);
  detail::check_all_used(lc_sec, "limit_cycle");

  detail::RawSection& ctl_sec = sections["controller"];
  const int hp = static_cast<int>(std::lround(detail::take_number(ctl_sec, "Hp", 200)));
  const int h = static_cast<int>(std::lround(detail::take_number(ctl_sec, "h", 5)));
  detail::check_all_used(ctl_sec, "controller");

  detail::RawSection& sim_sec = sections["simulation"];
  const double tau = detail::take_number(sim_sec, "tau_s", 2e-4);
  const double total_time = detail::take_number(sim_sec, "total_time_s", 0.1);
  const std::string mode_word = detail::take_word(sim_sec, "mode", "compensated");
  const std::string boot_word = detail::take_word(sim_sec, "bootstrap", "oracle");
  const std::string init_word = detail::take_word(sim_sec, "initial_state", "steady_state");
  detail::check_all_used(sim_sec, "simulation");

  RunMode mode;
  if (mode_word == "compensated") mode = RunMode::Compensated;
  else if (mode_word == "uncompensated") mode = RunMode::Uncompensated;
  else throw ConfigError(sim_sec.line, "mode must be compensated|uncompensated");

  BootstrapMode bootstrap;
  if (boot_word == "oracle") bootstrap = BootstrapMode::Oracle;
  else if (boot_word == "zero") bootstrap = BootstrapMode::Zero;
  else throw ConfigError(sim_sec.line, "bootstrap must be oracle|zero");

  InitialStateMode initial_state;
  if (init_word == "steady_state") initial_state = InitialStateMode::SteadyState;
  else if (init_word == "zero") initial_state = InitialStateMode::Zero;
  else throw ConfigError(sim_sec.line, "initial_state must be steady_state|zero");

  try {
    return SimulationConfig(grid, std::move(disturbance), mu, alpha, hp, h, tau,
                            total_time, mode, bootstrap, initial_state);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

inline SimulationConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace detail {
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// Serializes the effective configuration; numbers at 17 significant
/// digits so a reparse reproduces the run bit-exactly.
inline std::string serialize_config(const SimulationConfig& cfg) {
  using detail::g17;
  std::ostringstream out;
  out << "[grid]\n";
  out << "R1_ohm = " << g17(cfg.grid.R1) << "\n";
  out << "R2_ohm = " << g17(cfg.grid.R2) << "\n";
  out << "L2_H = " << g17(cfg.grid.L2) << "\n";
  out << "C2_F = " << g17(cfg.grid.C2) << "\n";
  out << "f_Hz = " << g17(cfg.grid.f) << "\n";
  out << "vs_amplitude_V = " << g17(cfg.grid.vs_amplitude) << "\n";
  for (std::size_t i = 0; i < cfg.disturbance.size(); ++i) {
    out << "\n[disturbance." << (i + 1) << "]\n";
    out << "order = " << cfg.disturbance[i].order << "\n";
    out << "amplitude_A = " << g17(cfg.disturbance[i].amplitude) << "\n";
    out << "phase_rad = " << g17(cfg.disturbance[i].phase) << "\n";
  }
  out << "\n[limit_cycle]\n";
  out << "mu = " << g17(cfg.lc.mu) << "\n";
  out << "alpha = " << g17(cfg.lc.alpha) << "\n";
  out << "\n[controller]\n";
  out << "Hp = " << cfg.hp << "\n";
  out << "h = " << cfg.h << "\n";
  out << "\n[simulation]\n";
  out << "tau_s = " << g17(cfg.tau) << "\n";
  out << "total_time_s = " << g17(cfg.total_time) << "\n";
  out << "mode = " << (cfg.mode == RunMode::Compensated ? "compensated" : "uncompensated")
      << "\n";
  out << "bootstrap = " << (cfg.bootstrap == BootstrapMode::Oracle ? "oracle" : "zero")
      << "\n";
  out << "initial_state = "
      << (cfg.initial_state == InitialStateMode::SteadyState ? "steady_state" : "zero")
      << "\n";
  return out.str();
}

}  // namespace lcmpc
