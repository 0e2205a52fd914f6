#pragma once

// Trace CSV:
//   # scenario_hash = <16 hex>
//   # seed = <u64>
//   # version = wavepursuit 1.0.0
//   t,px,py,ex,ey,dist,vx,vy,V,grad2,dVdt,clearance_p,clearance_e,captured
//   <one row per tick>
//   # rows = <count>
// Numbers use the shortest round-trip representation.

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavepursuit/error.hpp"
#include "wavepursuit/game.hpp"
#include "wavepursuit/scenario.hpp"

namespace wavepursuit {

inline constexpr std::string_view kTraceHeader = "t,px,py,ex,ey,dist,vx,vy,V,grad2,dVdt,clearance_p,clearance_e,captured";
inline constexpr std::size_t kTraceColumns = 14;

inline bool known_version(std::string_view v) { return v == kSoftwareVersion; }

inline std::string format_trace(const GameTrace& trace) {
  using detail::format_number;
  std::string out;
  out += "# scenario_hash = " + trace.meta.scenario_hash + "\n";
  out += "# seed = " + std::to_string(trace.meta.seed) + "\n";
  out += "# version = " + trace.meta.version + "\n";
  out += kTraceHeader;
  out += "\n";
  for (const auto& r : trace.records) {
    const std::array<double, 13> v{r.t,         r.pursuer.x, r.pursuer.y, r.evader.x,  r.evader.y,
                                   r.distance,  r.command.x, r.command.y, r.potential, r.grad_norm2,
                                   r.dvdt,      r.clearance_pursuer,      r.clearance_evader};
    for (const double x : v) {
      out += format_number(x);
      out += ',';
    }
    out += r.captured ? "1\n" : "0\n";
  }
  out += "# rows = " + std::to_string(trace.records.size()) + "\n";
  return out;
}

inline void write_trace(const GameTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write trace '" + path + "'");
  out << format_trace(trace);
  if (!out) throw Error(ErrorCode::IOError, "write failed for '" + path + "'");
}

namespace detail {

[[noreturn]] inline void schema_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line) + ": " + what);
}

inline std::string_view meta_value(std::string_view line, std::string_view key, std::size_t lineno) {
  const std::string prefix = "# " + std::string(key) + " = ";
  if (line.substr(0, prefix.size()) != prefix) schema_fail(lineno, "expected '" + prefix + "...'");
  return line.substr(prefix.size());
}

}  // namespace detail

inline GameTrace parse_trace(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) detail::schema_fail(lines.size() + 1, "missing final newline (truncated file)");
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  if (lines.size() < 5) detail::schema_fail(lines.size(), "too few lines for a trace file");

  GameTrace trace;
  trace.meta.scenario_hash = std::string(detail::meta_value(lines[0], "scenario_hash", 1));
  const auto seed = detail::meta_value(lines[1], "seed", 2);
  const auto sr = std::from_chars(seed.data(), seed.data() + seed.size(), trace.meta.seed);
  if (sr.ec != std::errc{} || sr.ptr != seed.data() + seed.size()) detail::schema_fail(2, "bad seed");
  trace.meta.version = std::string(detail::meta_value(lines[2], "version", 3));
  if (!known_version(trace.meta.version)) detail::schema_fail(3, "unknown trace version '" + trace.meta.version + "'");
  if (lines[3] != kTraceHeader) detail::schema_fail(4, "unexpected column header");

  const std::size_t last = lines.size() - 1;
  const auto rows_text = detail::meta_value(lines[last], "rows", last + 1);
  std::size_t rows = 0;
  const auto rr = std::from_chars(rows_text.data(), rows_text.data() + rows_text.size(), rows);
  if (rr.ec != std::errc{} || rr.ptr != rows_text.data() + rows_text.size()) detail::schema_fail(last + 1, "bad row count");
  if (rows != last - 4) {
    detail::schema_fail(last + 1, "row count " + std::to_string(rows) + " but " + std::to_string(last - 4) + " rows present");
  }

  for (std::size_t k = 4; k < last; ++k) {
    std::array<double, kTraceColumns> v{};
    std::string_view rest = lines[k];
    for (std::size_t c = 0; c < kTraceColumns; ++c) {
      const std::size_t comma = rest.find(',');
      if ((c + 1 < kTraceColumns) == (comma == std::string_view::npos)) {
        detail::schema_fail(k + 1, "expected " + std::to_string(kTraceColumns) + " columns");
      }
      const std::string_view cell = rest.substr(0, comma);
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v[c]);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v[c])) {
        detail::schema_fail(k + 1, "column " + std::to_string(c + 1) + " is not a finite number");
      }
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (v[13] != 0.0 && v[13] != 1.0) detail::schema_fail(k + 1, "captured must be 0 or 1");
    TickRecord r;
    r.t = v[0];
    r.pursuer = {v[1], v[2]};
    r.evader = {v[3], v[4]};
    r.distance = v[5];
    r.command = {v[6], v[7]};
    r.potential = v[8];
    r.grad_norm2 = v[9];
    r.dvdt = v[10];
    r.clearance_pursuer = v[11];
    r.clearance_evader = v[12];
    r.captured = v[13] == 1.0;
    if (!trace.records.empty() && !(r.t > trace.records.back().t)) detail::schema_fail(k + 1, "time is not increasing");
    trace.records.push_back(r);
  }
  return trace;
}

inline GameTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot read trace '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

// ---------------------------------------------------------------------------
// Field grid dump: "# width = W", "# height = H", "# h = h", "# t = t", then one
// row per j (j = 0 first) of comma-separated values, frame included.

inline std::string format_field(const PotentialField& f, const Environment& env) {
  using detail::format_number;
  std::string out = "# width = " + format_number(env.width()) + "\n# height = " + format_number(env.height()) +
                    "\n# h = " + format_number(f.cell_size) + "\n# t = " + format_number(f.t) + "\n";
  for (int j = 0; j < f.values.ny(); ++j) {
    for (int i = 0; i < f.values.nx(); ++i) {
      if (i) out += ',';
      out += format_number(f.values(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_field(const PotentialField& f, const Environment& env, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write field '" + path + "'");
  out << format_field(f, env);
}

}  // namespace wavepursuit
