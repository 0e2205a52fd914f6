#pragma once

// Scenario description and its structured-text file format.
//
//   # comment
//   [section]
//   key = value        # trailing comments allowed
//
// Sections: environment, field, pursuer, evader, game, outputs. Unknown
// sections/keys and duplicated keys are parse errors. `auto` selects a
// derived default. See docs/scenario_format.md for every key and its unit.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wavepursuit/agents.hpp"
#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/field.hpp"
#include "wavepursuit/guidance.hpp"

namespace wavepursuit {

struct FieldConfig {
  double wave_speed = 1.0;                 // a, m/s
  std::optional<double> damping;           // gamma, 1/s; auto = 0.5 a / diagonal
  double boundary_level = 1.0;             // C
  BoundaryMode boundary_mode = BoundaryMode::Dirichlet;
  std::optional<int> substeps;             // field steps per game tick; auto = smallest stable
  std::optional<double> target_radius;     // m; auto = 2h
  std::optional<double> solver_tol;        // auto = 1e-6 C
  double solver_omega = 1.8;
  int solver_max_iters = 200000;
};

struct PursuerConfig {
  StrategyTag strategy = StrategyTag::PursuerWave;
  double speed = 1.0;  // m/s
  Vec2 start;
  CommandMode command = CommandMode::Normalized;
  RegularizerParams regularizer;
};

struct EvaderConfig {
  StrategyTag strategy = StrategyTag::EvaderScripted;
  double speed = 1.0;  // m/s
  Vec2 start;
  ScriptedPath path;
  double d_safe = 4.0;                      // m
  std::optional<double> pursuer_radius;     // m; auto = 2h
  int refresh_every = 1;
  double risk_level = 0.6;
  int candidate_count = 8;
};

struct GameConfig {
  double dt = 0.05;              // s
  double duration = 120.0;       // s
  double capture_radius = 0.25;  // m
  bool stop_on_capture = true;
  std::uint64_t rng_seed = 1;
};

struct OutputConfig {
  std::string trace = "trace.csv";
  std::string report = "report.txt";
};

struct Scenario {
  EnvironmentSpec environment;
  FieldConfig field;
  PursuerConfig pursuer;
  EvaderConfig evader;
  GameConfig game;
  OutputConfig outputs;
};

// ---------------------------------------------------------------------------
// Derived defaults

inline double effective_damping(const Scenario& s) {
  if (s.field.damping) return *s.field.damping;
  return 0.5 * s.field.wave_speed / std::hypot(s.environment.width, s.environment.height);
}

inline double effective_target_radius(const Scenario& s) {
  return s.field.target_radius.value_or(2.0 * s.environment.cell_size);
}

inline double effective_pursuer_radius(const Scenario& s) {
  return s.evader.pursuer_radius.value_or(2.0 * s.environment.cell_size);
}

inline double effective_solver_tol(const Scenario& s) {
  return s.field.solver_tol.value_or(1e-6 * s.field.boundary_level);
}

inline SolverOptions solver_options(const Scenario& s) {
  return SolverOptions{effective_solver_tol(s), s.field.solver_max_iters, s.field.solver_omega};
}

/// Stability bound of the pursuer's time-dependent field (infinity for Laplace).
inline double field_step_bound(const Scenario& s) {
  const double h = s.environment.cell_size;
  switch (field_kind_for(s.pursuer.strategy)) {
    case FieldKind::Wave: return cfl_max_dt(s.field.wave_speed, h);
    case FieldKind::Diffusion: return diffusion_max_dt(s.field.wave_speed, h);
    case FieldKind::Laplace: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

/// Sub-steps per game tick; auto keeps dt_field at or below 0.9 of the bound.
inline int effective_substeps(const Scenario& s) {
  if (s.field.substeps) return *s.field.substeps;
  const double bound = field_step_bound(s);
  if (!std::isfinite(bound)) return 1;
  return std::max(1, static_cast<int>(std::ceil(s.game.dt / (0.9 * bound))));
}

inline std::size_t tick_count(const Scenario& s) {
  return static_cast<std::size_t>(std::ceil(s.game.duration / s.game.dt - 1e-9));
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
  std::string field;
  std::string reason;
};

/// Checks that do not need the rasterized environment.
inline std::optional<ValidationIssue> validate_values(const Scenario& s) {
  const auto bad = [](std::string f, std::string r) { return std::optional<ValidationIssue>{{std::move(f), std::move(r)}}; };
  const double h = s.environment.cell_size;
  if (!(h > 0.0)) return bad("environment.cell_size", "must be > 0");
  if (!(s.environment.width > 0.0)) return bad("environment.width", "must be > 0");
  if (!(s.environment.height > 0.0)) return bad("environment.height", "must be > 0");
  if (!(s.field.wave_speed > 0.0)) return bad("field.wave_speed", "must be > 0");
  if (s.field.damping && !(*s.field.damping >= 0.0)) return bad("field.damping", "must be >= 0");
  if (!(s.field.boundary_level > 0.0)) return bad("field.boundary_level", "must be > 0");
  if (s.field.substeps && *s.field.substeps < 1) return bad("field.substeps", "must be >= 1");
  if (s.field.target_radius && !(*s.field.target_radius >= h)) return bad("field.target_radius", "must be >= cell_size");
  if (s.field.solver_tol && !(*s.field.solver_tol > 0.0)) return bad("field.solver_tol", "must be > 0");
  if (!(s.field.solver_omega > 0.0 && s.field.solver_omega < 2.0)) return bad("field.solver_omega", "must be in (0, 2)");
  if (s.field.solver_max_iters < 1) return bad("field.solver_max_iters", "must be >= 1");
  if (!is_pursuer(s.pursuer.strategy)) return bad("pursuer.strategy", "not a pursuer strategy");
  if (!(s.pursuer.speed >= 0.0)) return bad("pursuer.speed", "must be >= 0");
  if (!(s.pursuer.regularizer.epsilon > 0.0)) return bad("pursuer.epsilon", "must be > 0");
  if (!(s.pursuer.regularizer.rho > s.pursuer.regularizer.epsilon)) return bad("pursuer.rho", "must exceed epsilon");
  if (!is_evader(s.evader.strategy)) return bad("evader.strategy", "not an evader strategy");
  if (!(s.evader.speed >= 0.0)) return bad("evader.speed", "must be >= 0");
  if (!(s.evader.d_safe > 0.0)) return bad("evader.d_safe", "must be > 0");
  if (s.evader.pursuer_radius && !(*s.evader.pursuer_radius >= 0.0)) return bad("evader.pursuer_radius", "must be >= 0");
  if (s.evader.refresh_every < 1) return bad("evader.refresh_every", "must be >= 1");
  if (!(s.evader.risk_level >= 0.0 && s.evader.risk_level <= 1.0)) return bad("evader.risk_level", "must be in [0, 1]");
  if (s.evader.candidate_count < 1) return bad("evader.candidate_count", "must be >= 1");
  if (!(s.game.dt > 0.0)) return bad("game.dt", "must be > 0");
  if (!(s.game.duration > 0.0)) return bad("game.duration", "must be > 0");
  if (!(s.game.capture_radius > 0.0)) return bad("game.capture_radius", "must be > 0");
  if (s.field.substeps) {
    const double bound = field_step_bound(s);
    if (s.game.dt / *s.field.substeps > bound * (1.0 + 1e-12)) {
      return bad("field.substeps", "field step dt/substeps exceeds the stability bound");
    }
  }
  return std::nullopt;
}

/// Checks against the rasterized environment (start cells, scripted path).
inline std::optional<ValidationIssue> validate_against(const Scenario& s, const Environment& env) {
  const auto free_at = [&](const Vec2& p) { return env.in_workspace(p) && env.is_free(env.cell_of(p)); };
  if (!free_at(s.pursuer.start)) return ValidationIssue{"pursuer.start", "not in free space"};
  if (!free_at(s.evader.start)) return ValidationIssue{"evader.start", "not in free space"};
  if (s.evader.strategy == StrategyTag::EvaderScripted) {
    const std::size_t n = tick_count(s);
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = std::min(static_cast<double>(k) * s.game.dt, s.game.duration);
      if (!free_at(scripted_position(s.evader.start, t, s.evader.path))) {
        return ValidationIssue{"evader.path", "scripted path leaves free space at t = " + std::to_string(t)};
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Canonical text

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_vec(const Vec2& v) { return format_number(v.x) + " " + format_number(v.y); }

inline std::string format_shape(const Shape& s) {
  if (const auto* r = std::get_if<Rect>(&s)) {
    return "rect " + format_vec(r->min) + " " + format_vec(r->max);
  }
  const auto& c = std::get<Circle>(s);
  return "circle " + format_vec(c.center) + " " + format_number(c.radius);
}

template <typename T>
std::string format_optional(const std::optional<T>& v) {
  if (!v) return "auto";
  if constexpr (std::is_integral_v<T>) {
    return std::to_string(*v);
  } else {
    return format_number(*v);
  }
}

inline std::string_view path_kind_name(ScriptedPath::Kind k) {
  switch (k) {
    case ScriptedPath::Kind::Stationary: return "stationary";
    case ScriptedPath::Kind::Linear: return "linear";
    case ScriptedPath::Kind::LinearPlusSinusoid: return "linear_sinusoid";
  }
  return "stationary";
}

}  // namespace detail

inline std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  using detail::format_number;
  using detail::format_optional;
  using detail::format_vec;
  out << "[environment]\n";
  out << "width = " << format_number(s.environment.width) << "\n";
  out << "height = " << format_number(s.environment.height) << "\n";
  out << "cell_size = " << format_number(s.environment.cell_size) << "\n";
  out << "obstacles =";
  for (std::size_t k = 0; k < s.environment.obstacles.size(); ++k) {
    out << (k == 0 ? " " : "; ") << detail::format_shape(s.environment.obstacles[k]);
  }
  out << "\n\n[field]\n";
  out << "wave_speed = " << format_number(s.field.wave_speed) << "\n";
  out << "damping = " << format_optional(s.field.damping) << "\n";
  out << "boundary_level = " << format_number(s.field.boundary_level) << "\n";
  out << "boundary_mode = " << (s.field.boundary_mode == BoundaryMode::Dirichlet ? "dirichlet" : "neumann") << "\n";
  out << "substeps = " << format_optional(s.field.substeps) << "\n";
  out << "target_radius = " << format_optional(s.field.target_radius) << "\n";
  out << "solver_tol = " << format_optional(s.field.solver_tol) << "\n";
  out << "solver_omega = " << format_number(s.field.solver_omega) << "\n";
  out << "solver_max_iters = " << s.field.solver_max_iters << "\n";
  out << "\n[pursuer]\n";
  out << "strategy = " << to_string(s.pursuer.strategy) << "\n";
  out << "speed = " << format_number(s.pursuer.speed) << "\n";
  out << "start = " << format_vec(s.pursuer.start) << "\n";
  out << "command = " << (s.pursuer.command == CommandMode::Normalized ? "normalized" : "raw_ode") << "\n";
  out << "rho = " << format_number(s.pursuer.regularizer.rho) << "\n";
  out << "epsilon = " << format_number(s.pursuer.regularizer.epsilon) << "\n";
  out << "\n[evader]\n";
  out << "strategy = " << to_string(s.evader.strategy) << "\n";
  out << "speed = " << format_number(s.evader.speed) << "\n";
  out << "start = " << format_vec(s.evader.start) << "\n";
  out << "path = " << detail::path_kind_name(s.evader.path.kind) << "\n";
  out << "base_velocity = " << format_vec(s.evader.path.base_velocity) << "\n";
  out << "amplitude = " << format_number(s.evader.path.amplitude) << "\n";
  out << "omega = " << format_number(s.evader.path.omega) << "\n";
  out << "phase = " << format_number(s.evader.path.phase) << "\n";
  out << "d_safe = " << format_number(s.evader.d_safe) << "\n";
  out << "pursuer_radius = " << format_optional(s.evader.pursuer_radius) << "\n";
  out << "refresh_every = " << s.evader.refresh_every << "\n";
  out << "risk_level = " << format_number(s.evader.risk_level) << "\n";
  out << "candidate_count = " << s.evader.candidate_count << "\n";
  out << "\n[game]\n";
  out << "dt = " << format_number(s.game.dt) << "\n";
  out << "duration = " << format_number(s.game.duration) << "\n";
  out << "capture_radius = " << format_number(s.game.capture_radius) << "\n";
  out << "stop_on_capture = " << (s.game.stop_on_capture ? "true" : "false") << "\n";
  out << "rng_seed = " << s.game.rng_seed << "\n";
  out << "\n[outputs]\n";
  out << "trace = " << s.outputs.trace << "\n";
  out << "report = " << s.outputs.report << "\n";
  return out.str();
}

/// FNV-1a 64 of the canonical text, as 16 hex digits.
inline std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : emit_scenario(s)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing

struct ParsedScenario {
  Scenario scenario;
  /// "section.key = value" for every key that was not in the file.
  std::vector<std::string> defaults_applied;
};

namespace detail {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // column of the value
};

[[noreturn]] inline void parse_fail(int line, int column, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline double parse_number(const std::string& text, const Entry& e) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    parse_fail(e.line, e.column, "expected a number, got '" + text + "'");
  }
  return v;
}

class SectionReader {
 public:
  SectionReader(std::string name, std::map<std::string, Entry> entries, std::vector<std::string>& defaults)
      : name_(std::move(name)), entries_(std::move(entries)), defaults_(defaults) {}

  const Entry* find(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.push_back(key);
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) throw Error(ErrorCode::ValidationError, name_ + "." + key + ": required key missing");
    return *e;
  }

  void note_default(const std::string& key, const std::string& value) {
    defaults_.push_back(name_ + "." + key + " = " + value);
  }

  double number(const std::string& key, double fallback) {
    const Entry* e = find(key);
    if (!e) {
      note_default(key, format_number(fallback));
      return fallback;
    }
    return parse_number(e->value, *e);
  }

  std::optional<double> auto_number(const std::string& key) {
    const Entry* e = find(key);
    if (!e || e->value == "auto") {
      if (!e) note_default(key, "auto");
      return std::nullopt;
    }
    return parse_number(e->value, *e);
  }

  long long integer(const Entry& e) {
    long long v = 0;
    const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (res.ec != std::errc{} || res.ptr != e.value.data() + e.value.size()) {
      parse_fail(e.line, e.column, "expected an integer, got '" + e.value + "'");
    }
    return v;
  }

  int integer(const std::string& key, int fallback) {
    const Entry* e = find(key);
    if (!e) {
      note_default(key, std::to_string(fallback));
      return fallback;
    }
    return static_cast<int>(integer(*e));
  }

  std::optional<int> auto_integer(const std::string& key) {
    const Entry* e = find(key);
    if (!e || e->value == "auto") {
      if (!e) note_default(key, "auto");
      return std::nullopt;
    }
    return static_cast<int>(integer(*e));
  }

  Vec2 vec(const Entry& e) {
    const auto words = split_words(e.value);
    if (words.size() != 2) parse_fail(e.line, e.column, "expected two numbers 'x y'");
    return Vec2{parse_number(words[0], e), parse_number(words[1], e)};
  }

  Vec2 vec(const std::string& key, const Vec2& fallback) {
    const Entry* e = find(key);
    if (!e) {
      note_default(key, format_vec(fallback));
      return fallback;
    }
    return vec(*e);
  }

  bool boolean(const std::string& key, bool fallback) {
    const Entry* e = find(key);
    if (!e) {
      note_default(key, fallback ? "true" : "false");
      return fallback;
    }
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    parse_fail(e->line, e->column, "expected true or false");
  }

  std::string word(const std::string& key, const std::string& fallback) {
    const Entry* e = find(key);
    if (!e) {
      note_default(key, fallback);
      return fallback;
    }
    return e->value;
  }

  /// Rejects keys that no reader consumed.
  void finish() const {
    for (const auto& [key, e] : entries_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        parse_fail(e.line, 1, "unknown key '" + key + "' in section [" + name_ + "]");
      }
    }
  }

 private:
  std::string name_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> used_;
  std::vector<std::string>& defaults_;
};

inline std::vector<Shape> parse_obstacles(const Entry& e) {
  std::vector<Shape> out;
  if (trim(e.value).empty()) return out;
  std::string_view rest = e.value;
  while (true) {
    const auto semi = rest.find(';');
    const auto item = trim(rest.substr(0, semi));
    const auto words = split_words(item);
    if (words.empty()) parse_fail(e.line, e.column, "empty obstacle entry");
    std::vector<double> nums;
    for (std::size_t k = 1; k < words.size(); ++k) nums.push_back(parse_number(words[k], e));
    if (words[0] == "rect" && nums.size() == 4) {
      out.push_back(Rect{{nums[0], nums[1]}, {nums[2], nums[3]}});
    } else if (words[0] == "circle" && nums.size() == 3) {
      out.push_back(Circle{{nums[0], nums[1]}, nums[2]});
    } else {
      parse_fail(e.line, e.column, "expected 'rect x0 y0 x1 y1' or 'circle cx cy r'");
    }
    if (semi == std::string_view::npos) break;
    rest = rest.substr(semi + 1);
  }
  return out;
}

template <typename Enum>
Enum parse_enum(const Entry& e, std::initializer_list<std::pair<std::string_view, Enum>> options) {
  for (const auto& [name, value] : options) {
    if (e.value == name) return value;
  }
  std::string names;
  for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + std::string(name);
  parse_fail(e.line, e.column, "expected one of: " + names);
}

}  // namespace detail

inline ParsedScenario parse_scenario_text(std::string_view text) {
  using detail::Entry;
  static const std::vector<std::string> kSections = {"environment", "field", "pursuer", "evader", "game", "outputs"};
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = raw.find('#');
    const std::string_view line = detail::trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    if (line.front() == '[') {
      if (line.back() != ']') detail::parse_fail(line_no, indent, "unterminated section header");
      current = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (std::find(kSections.begin(), kSections.end(), current) == kSections.end()) {
        detail::parse_fail(line_no, indent, "unknown section [" + current + "]");
      }
      if (sections.count(current)) detail::parse_fail(line_no, indent, "duplicated section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) detail::parse_fail(line_no, indent, "expected 'key = value'");
    if (current.empty()) detail::parse_fail(line_no, indent, "key outside of any section");
    const std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) detail::parse_fail(line_no, indent, "empty key");
    const std::string value(detail::trim(line.substr(eq + 1)));
    const auto value_offset = raw.find('=') + 1;
    const auto value_start = raw.find_first_not_of(" \t", value_offset);
    const int value_col = static_cast<int>(value_start == std::string_view::npos ? value_offset : value_start) + 1;
    auto& entries = sections[current];
    if (entries.count(key)) detail::parse_fail(line_no, indent, "duplicated key '" + key + "'");
    entries[key] = Entry{value, line_no, value_col};
  }

  ParsedScenario out;
  Scenario& s = out.scenario;
  auto reader = [&](const std::string& name) { return detail::SectionReader(name, sections[name], out.defaults_applied); };

  {
    auto r = reader("environment");
    s.environment.width = detail::parse_number(r.require("width").value, r.require("width"));
    s.environment.height = detail::parse_number(r.require("height").value, r.require("height"));
    s.environment.cell_size = detail::parse_number(r.require("cell_size").value, r.require("cell_size"));
    if (const Entry* e = r.find("obstacles")) {
      s.environment.obstacles = detail::parse_obstacles(*e);
    } else {
      r.note_default("obstacles", "");
    }
    r.finish();
  }
  {
    auto r = reader("field");
    const FieldConfig d;
    s.field.wave_speed = r.number("wave_speed", d.wave_speed);
    s.field.damping = r.auto_number("damping");
    s.field.boundary_level = r.number("boundary_level", d.boundary_level);
    if (const Entry* e = r.find("boundary_mode")) {
      s.field.boundary_mode = detail::parse_enum<BoundaryMode>(
          *e, {{"dirichlet", BoundaryMode::Dirichlet}, {"neumann", BoundaryMode::Neumann}});
    } else {
      r.note_default("boundary_mode", "dirichlet");
    }
    s.field.substeps = r.auto_integer("substeps");
    s.field.target_radius = r.auto_number("target_radius");
    s.field.solver_tol = r.auto_number("solver_tol");
    s.field.solver_omega = r.number("solver_omega", d.solver_omega);
    s.field.solver_max_iters = r.integer("solver_max_iters", d.solver_max_iters);
    r.finish();
  }
  {
    auto r = reader("pursuer");
    const PursuerConfig d;
    s.pursuer.strategy = detail::parse_enum<StrategyTag>(r.require("strategy"),
                                                         {{"wave", StrategyTag::PursuerWave},
                                                          {"diffusion", StrategyTag::PursuerDiffusion},
                                                          {"laplace", StrategyTag::PursuerLaplace},
                                                          {"harmonic", StrategyTag::PursuerHarmonicDuel}});
    s.pursuer.speed = r.number("speed", d.speed);
    s.pursuer.start = r.vec(r.require("start"));
    if (const Entry* e = r.find("command")) {
      s.pursuer.command = detail::parse_enum<CommandMode>(
          *e, {{"normalized", CommandMode::Normalized}, {"raw_ode", CommandMode::RawOde}});
    } else {
      r.note_default("command", "normalized");
    }
    s.pursuer.regularizer.rho = r.number("rho", d.regularizer.rho);
    s.pursuer.regularizer.epsilon = r.number("epsilon", d.regularizer.epsilon);
    r.finish();
  }
  {
    auto r = reader("evader");
    const EvaderConfig d;
    s.evader.strategy = detail::parse_enum<StrategyTag>(
        r.require("strategy"),
        {{"scripted", StrategyTag::EvaderScripted}, {"harmonic", StrategyTag::EvaderHarmonic}, {"random", StrategyTag::EvaderRandom}});
    s.evader.speed = r.number("speed", d.speed);
    s.evader.start = r.vec(r.require("start"));
    if (const Entry* e = r.find("path")) {
      s.evader.path.kind = detail::parse_enum<ScriptedPath::Kind>(*e, {{"stationary", ScriptedPath::Kind::Stationary},
                                                                       {"linear", ScriptedPath::Kind::Linear},
                                                                       {"linear_sinusoid", ScriptedPath::Kind::LinearPlusSinusoid}});
    } else {
      r.note_default("path", "stationary");
    }
    s.evader.path.base_velocity = r.vec("base_velocity", d.path.base_velocity);
    s.evader.path.amplitude = r.number("amplitude", d.path.amplitude);
    s.evader.path.omega = r.number("omega", d.path.omega);
    s.evader.path.phase = r.number("phase", d.path.phase);
    s.evader.d_safe = r.number("d_safe", d.d_safe);
    s.evader.pursuer_radius = r.auto_number("pursuer_radius");
    s.evader.refresh_every = r.integer("refresh_every", d.refresh_every);
    s.evader.risk_level = r.number("risk_level", d.risk_level);
    s.evader.candidate_count = r.integer("candidate_count", d.candidate_count);
    r.finish();
  }
  {
    auto r = reader("game");
    const GameConfig d;
    s.game.dt = r.number("dt", d.dt);
    s.game.duration = r.number("duration", d.duration);
    s.game.capture_radius = r.number("capture_radius", d.capture_radius);
    s.game.stop_on_capture = r.boolean("stop_on_capture", d.stop_on_capture);
    if (const Entry* e = r.find("rng_seed")) {
      std::uint64_t seed = 0;
      const auto res = std::from_chars(e->value.data(), e->value.data() + e->value.size(), seed);
      if (res.ec != std::errc{} || res.ptr != e->value.data() + e->value.size()) {
        detail::parse_fail(e->line, e->column, "expected an unsigned 64-bit seed");
      }
      s.game.rng_seed = seed;
    } else {
      r.note_default("rng_seed", std::to_string(d.rng_seed));
    }
    r.finish();
  }
  {
    auto r = reader("outputs");
    const OutputConfig d;
    s.outputs.trace = r.word("trace", d.trace);
    s.outputs.report = r.word("report", d.report);
    r.finish();
  }

  if (const auto issue = validate_values(s)) {
    throw Error(ErrorCode::ValidationError, issue->field + ": " + issue->reason);
  }
  return out;
}

inline ParsedScenario parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot read scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace wavepursuit
