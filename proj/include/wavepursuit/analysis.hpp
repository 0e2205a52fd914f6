#pragma once

// Numerical checks on computed fields and game traces.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/field.hpp"
#include "wavepursuit/game.hpp"
#include "wavepursuit/guidance.hpp"
#include "wavepursuit/scenario.hpp"

namespace wavepursuit {

// ---------------------------------------------------------------------------
// Lyapunov decrease

struct LyapunovOptions {
  double target_radius = 0.25;   // ticks closer than this are inside the target ball
  double rho = 1e-3;             // decrease is required where |grad V|^2 >= rho
  double decrease_tol = 0.0;     // realized dV/dt must be below this
  double relative_tol = 0.2;     // agreement band around -|grad V|^2
};

struct LyapunovReport {
  std::vector<double> potential;  // V(x(t)) per tick
  std::vector<double> analytic;   // -|grad V|^2 per tick
  std::vector<double> realized;   // forward difference of V along the trace, NaN on the last tick
  std::size_t outside = 0;        // ticks with a successor and distance > target_radius
  std::size_t positivity_violations = 0;
  std::size_t decreasing = 0;     // outside ticks with realized dV/dt < 0
  std::size_t eligible = 0;       // outside ticks with |grad V|^2 >= rho
  std::size_t decrease_violations = 0;
  std::size_t agreeing = 0;       // eligible ticks within relative_tol of -|grad V|^2
  double max_violation = 0.0;     // largest realized dV/dt over eligible ticks (0 if none positive)

  double decrease_fraction() const { return outside ? double(decreasing) / double(outside) : 1.0; }
  double agreement_fraction() const { return eligible ? double(agreeing) / double(eligible) : 1.0; }
};

/// Uses the V and |grad V|^2 columns sampled from the per-tick field snapshots.
inline LyapunovReport lyapunov_check(const GameTrace& trace, const LyapunovOptions& opt = {}) {
  const auto& r = trace.records;
  if (r.size() < 2) throw Error(ErrorCode::MissingSnapshots, "need at least two ticks of sampled potential");
  for (const auto& rec : r) {
    if (!std::isfinite(rec.potential) || !std::isfinite(rec.grad_norm2)) {
      throw Error(ErrorCode::MissingSnapshots, "trace has no sampled potential at t = " + std::to_string(rec.t));
    }
  }
  LyapunovReport out;
  const std::size_t n = r.size();
  out.potential.resize(n);
  out.analytic.resize(n);
  out.realized.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < n; ++k) {
    out.potential[k] = r[k].potential;
    out.analytic[k] = -r[k].grad_norm2;
    if (r[k].distance > opt.target_radius && !(r[k].potential > 0.0)) ++out.positivity_violations;
    if (k + 1 == n) continue;
    const double realized = (r[k + 1].potential - r[k].potential) / (r[k + 1].t - r[k].t);
    out.realized[k] = realized;
    if (r[k].distance <= opt.target_radius) continue;
    ++out.outside;
    if (realized < 0.0) ++out.decreasing;
    if (r[k].grad_norm2 < opt.rho) continue;
    ++out.eligible;
    if (!(realized < opt.decrease_tol)) ++out.decrease_violations;
    out.max_violation = std::max(out.max_violation, realized);
    if (std::abs(realized + r[k].grad_norm2) <= opt.relative_tol * r[k].grad_norm2) ++out.agreeing;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximum principle

struct ExtremumOptions {
  bool eight_neighbourhood = false;
  double tolerance = 0.0;  // a cell must beat every neighbour by more than this
};

/// Unclamped free cells that are strict local extrema of their neighbourhood.
inline std::vector<CellIndex> maximum_principle_check(const PotentialField& f, const Environment& env,
                                                      const ExtremumOptions& opt = {}) {
  static constexpr CellIndex k8[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  const int count = opt.eight_neighbourhood ? 8 : 4;
  std::vector<CellIndex> out;
  for (const CellIndex c : env.free_cells()) {
    if (f.is_clamped(c)) continue;
    const double v = f.values[c];
    bool above = true;
    bool below = true;
    for (int k = 0; k < count; ++k) {
      const CellIndex d{c.i + k8[k].i, c.j + k8[k].j};
      if (!f.values.contains(d.i, d.j) || env.cell(d) == CellClass::Obstacle) continue;
      const double w = f.values[d];
      above = above && v > w + opt.tolerance;
      below = below && v < w - opt.tolerance;
    }
    if (above || below) out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundary avoidance

/// Unit direction of increasing clearance at p (away from the nearest surface).
inline Vec2 clearance_normal(const Environment& env, const Vec2& p) {
  const double s = 1e-4 * env.cell_size();
  const auto c = [&](double dx, double dy) {
    const Vec2 q{std::clamp(p.x + dx, 0.0, env.width()), std::clamp(p.y + dy, 0.0, env.height())};
    return signed_clearance(env, q);
  };
  const Vec2 g{(c(s, 0) - c(-s, 0)) / (2 * s), (c(0, s) - c(0, -s)) / (2 * s)};
  const double len = norm(g);
  return len > 0.0 ? g / len : Vec2{};
}

/// Directional derivative of V along the clearance normal.
inline double normal_derivative(const PotentialField& f, const Environment& env, const Vec2& p) {
  return dot(sample_gradient(f, env, p), clearance_normal(env, p));
}

struct ProbeReport {
  std::size_t probes = 0;
  std::size_t negative = 0;     // dV/dn < 0
  double max_abs = 0.0;         // max |dV/dn|
  double max_value = -std::numeric_limits<double>::infinity();

  double negative_fraction() const { return probes ? double(negative) / double(probes) : 1.0; }
};

/// Probes every unclamped free cell center with clearance in (0, band].
inline ProbeReport probe_boundary_band(const PotentialField& f, const Environment& env, double band) {
  ProbeReport out;
  for (const CellIndex c : env.free_cells()) {
    if (f.is_clamped(c)) continue;
    const Vec2 p = env.cell_center(c);
    const double clearance = signed_clearance(env, p);
    if (!(clearance > 0.0) || clearance > band) continue;
    const double d = normal_derivative(f, env, p);
    ++out.probes;
    if (d < 0.0) ++out.negative;
    out.max_abs = std::max(out.max_abs, std::abs(d));
    out.max_value = std::max(out.max_value, d);
  }
  return out;
}

struct BandSample {
  std::size_t tick = 0;
  double clearance = 0.0;
  double dvdn = 0.0;
};

/// Tick observer that samples dV/dn while the pursuer is inside the band.
class BandRecorder {
 public:
  explicit BandRecorder(double band) : band_(band) {}
  void operator()(const TickView& v) {
    if (v.record.clearance_pursuer >= band_) return;
    samples_.push_back({v.tick, v.record.clearance_pursuer, normal_derivative(v.pursuer_field, v.env, v.record.pursuer)});
  }
  const std::vector<BandSample>& samples() const { return samples_; }

 private:
  double band_;
  std::vector<BandSample> samples_;
};

struct AvoidanceReport {
  double min_clearance_pursuer = std::numeric_limits<double>::infinity();
  double min_clearance_evader = std::numeric_limits<double>::infinity();
  std::size_t obstacle_positions = 0;  // recorded positions outside free cells
  std::vector<BandSample> band;
  std::vector<double> dxn2_dt;         // d(x_n^2)/dt per band sample, NaN on the last tick
  std::size_t negative_dvdn = 0;
  std::size_t receding = 0;            // band samples with d(x_n^2)/dt >= 0
};

inline AvoidanceReport avoidance_margin_check(const GameTrace& trace, const Environment& env,
                                              const std::vector<BandSample>& band) {
  AvoidanceReport out;
  const auto& r = trace.records;
  const auto off_free = [&](const Vec2& p) { return !env.in_workspace(p) || !env.is_free(env.cell_of(p)); };
  for (const auto& rec : r) {
    out.min_clearance_pursuer = std::min(out.min_clearance_pursuer, rec.clearance_pursuer);
    out.min_clearance_evader = std::min(out.min_clearance_evader, rec.clearance_evader);
    out.obstacle_positions += (off_free(rec.pursuer) ? 1 : 0) + (off_free(rec.evader) ? 1 : 0);
  }
  out.band = band;
  for (const auto& b : band) {
    if (b.dvdn < 0.0) ++out.negative_dvdn;
    double rate = std::numeric_limits<double>::quiet_NaN();
    if (b.tick + 1 < r.size()) {
      const double c0 = r[b.tick].clearance_pursuer;
      const double c1 = r[b.tick + 1].clearance_pursuer;
      rate = (c1 * c1 - c0 * c0) / (r[b.tick + 1].t - r[b.tick].t);
      if (rate >= 0.0) ++out.receding;
    }
    out.dxn2_dt.push_back(rate);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Critical points

struct CriticalPoint {
  CellIndex cell;
  Vec2 position;
  double grad_norm = 0.0;
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;
  double lambda_min = 0.0, lambda_max = 0.0;
  bool saddle() const { return lambda_min < 0.0 && lambda_max > 0.0; }
  double trace() const { return hxx + hyy; }
  double hessian_norm() const { return std::max(std::abs(lambda_min), std::abs(lambda_max)); }
};

struct MorseOptions {
  double grad_threshold = 0.0;  // <= 0 selects 1e-3 C / diagonal
  double eigen_floor = 0.0;     // <= 0 selects 1e-6 C / diagonal^2
  double level = 1.0;           // C
};

struct CriticalPointReport {
  std::vector<CriticalPoint> points;
  double grad_threshold = 0.0;
  double eigen_floor = 0.0;
  double min_abs_det = std::numeric_limits<double>::infinity();
  double min_abs_eigen = std::numeric_limits<double>::infinity();
  bool nonsingular = true;
};

/// Critical cells of a grid function: cells whose 8 neighbours are all free and
/// whose central-difference gradient is below the threshold. Connected groups
/// of such cells count once (the cell with the smallest gradient).
inline CriticalPointReport morse_check(const Grid<double>& v, const Environment& env, const MorseOptions& opt = {}) {
  CriticalPointReport out;
  const double h = env.cell_size();
  const double diag = env.diagonal();
  out.grad_threshold = opt.grad_threshold > 0.0 ? opt.grad_threshold : 1e-3 * opt.level / diag;
  out.eigen_floor = opt.eigen_floor > 0.0 ? opt.eigen_floor : 1e-6 * opt.level / (diag * diag);

  Grid<std::uint8_t> flagged(v.nx(), v.ny(), 0);
  Grid<double> gnorm(v.nx(), v.ny(), 0.0);
  for (int j = 1; j + 1 < v.ny(); ++j) {
    for (int i = 1; i + 1 < v.nx(); ++i) {
      bool interior = true;
      for (int dj = -1; dj <= 1 && interior; ++dj)
        for (int di = -1; di <= 1 && interior; ++di) interior = env.is_free({i + di, j + dj});
      if (!interior) continue;
      const double gx = (v(i + 1, j) - v(i - 1, j)) / (2 * h);
      const double gy = (v(i, j + 1) - v(i, j - 1)) / (2 * h);
      gnorm(i, j) = std::hypot(gx, gy);
      if (gnorm(i, j) < out.grad_threshold) flagged(i, j) = 1;
    }
  }

  for (int j = 0; j < v.ny(); ++j) {
    for (int i = 0; i < v.nx(); ++i) {
      if (flagged(i, j) != 1) continue;
      CellIndex best{i, j};
      std::vector<CellIndex> stack{{i, j}};
      flagged(i, j) = 2;
      while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        if (gnorm[c] < gnorm[best]) best = c;
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const CellIndex d{c.i + di, c.j + dj};
            if (flagged.contains(d.i, d.j) && flagged[d] == 1) {
              flagged[d] = 2;
              stack.push_back(d);
            }
          }
        }
      }
      CriticalPoint p;
      p.cell = best;
      p.position = env.cell_center(best);
      p.grad_norm = gnorm[best];
      const int a = best.i, b = best.j;
      p.hxx = (v(a + 1, b) - 2 * v(a, b) + v(a - 1, b)) / (h * h);
      p.hyy = (v(a, b + 1) - 2 * v(a, b) + v(a, b - 1)) / (h * h);
      p.hxy = (v(a + 1, b + 1) - v(a + 1, b - 1) - v(a - 1, b + 1) + v(a - 1, b - 1)) / (4 * h * h);
      const double mean = 0.5 * (p.hxx + p.hyy);
      const double rad = std::hypot(0.5 * (p.hxx - p.hyy), p.hxy);
      p.lambda_min = mean - rad;
      p.lambda_max = mean + rad;
      out.points.push_back(p);
      out.min_abs_det = std::min(out.min_abs_det, std::abs(p.lambda_min * p.lambda_max));
      out.min_abs_eigen = std::min({out.min_abs_eigen, std::abs(p.lambda_min), std::abs(p.lambda_max)});
    }
  }
  out.nonsingular = out.points.empty() || out.min_abs_eigen > out.eigen_floor;
  return out;
}

inline CriticalPointReport morse_check(const PotentialField& f, const Environment& env, MorseOptions opt = {}) {
  opt.level = f.params.boundary_level;
  return morse_check(f.values, env, opt);
}

// ---------------------------------------------------------------------------
// Curvature of the evader path against closure events

struct CurvatureOptions {
  std::size_t window = 10;        // ticks
  double peak_level = 0.5;        // normalized curvature a peak must exceed
  double drop_quantile = 0.1;     // distance increments at or below this quantile are drops
  double motion_threshold = 1e-9; // m, smaller steps count as no motion
};

struct CurvatureReport {
  std::vector<double> curvature;  // normalized to [0, 1]
  std::vector<double> distance;
  std::vector<std::size_t> peaks;
  std::vector<std::size_t> drops;
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (peak tick, nearest drop tick)
  double raw_max = 0.0;           // 1/m

  double fraction() const { return peaks.empty() ? 0.0 : double(matches.size()) / double(peaks.size()); }
};

inline CurvatureReport curvature_closure_correlation(const GameTrace& trace, const CurvatureOptions& opt = {}) {
  const auto& r = trace.records;
  const std::size_t n = r.size();
  std::size_t moving = 0;
  for (std::size_t k = 1; k < n; ++k) moving += norm(r[k].evader - r[k - 1].evader) >= opt.motion_threshold ? 1 : 0;
  if (moving < 3) throw Error(ErrorCode::TraceTooShort, "fewer than 3 ticks of evader motion");

  CurvatureReport out;
  out.curvature.assign(n, 0.0);
  out.distance.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.distance[k] = r[k].distance;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec2 d1 = r[k].evader - r[k - 1].evader;
    const Vec2 d2 = r[k + 1].evader - 2.0 * r[k].evader + r[k - 1].evader;
    const double len = norm(d1);
    if (len < opt.motion_threshold) continue;
    out.curvature[k] = std::abs(cross(d1, d2)) / (len * len * len);
  }
  out.raw_max = *std::max_element(out.curvature.begin(), out.curvature.end());
  if (out.raw_max > 0.0) {
    for (double& c : out.curvature) c /= out.raw_max;
  }

  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double c = out.curvature[k];
    if (c > opt.peak_level && c >= out.curvature[k - 1] && c > out.curvature[k + 1]) out.peaks.push_back(k);
  }

  std::vector<double> inc(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) inc[k] = r[k + 1].distance - r[k].distance;
  std::vector<double> sorted = inc;
  const std::size_t q = static_cast<std::size_t>(std::floor(opt.drop_quantile * double(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + q, sorted.end());
  const double cut = sorted[q];
  for (std::size_t k = 0; k < inc.size(); ++k) {
    if (inc[k] < 0.0 && inc[k] <= cut) out.drops.push_back(k);
  }

  for (const std::size_t p : out.peaks) {
    std::optional<std::size_t> best;
    for (const std::size_t d : out.drops) {
      const std::size_t gap = p > d ? p - d : d - p;
      if (gap > opt.window) continue;
      if (!best || gap < (p > *best ? p - *best : *best - p)) best = d;
    }
    if (best) out.matches.emplace_back(p, *best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report text: "key = value" lines, arrays as space-separated values.

class ReportWriter {
 public:
  template <typename T>
  ReportWriter& add(const std::string& key, const T& value) {
    out_ << key << " = " << scalar(value) << "\n";
    return *this;
  }
  template <typename T>
  ReportWriter& add_array(const std::string& key, const std::vector<T>& values) {
    out_ << key << " = [";
    for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? " " : "") << scalar(values[k]);
    out_ << "]\n";
    return *this;
  }
  ReportWriter& section(const std::string& name) {
    out_ << "[" << name << "]\n";
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string scalar(double v) { return detail::format_number(v); }
  static std::string scalar(bool v) { return v ? "true" : "false"; }
  static std::string scalar(const std::string& v) { return v; }
  static std::string scalar(const char* v) { return v; }
  template <typename T>
    requires std::is_integral_v<T>
  static std::string scalar(T v) {
    return std::to_string(v);
  }
  std::ostringstream out_;
};

inline void write_report(ReportWriter& w, const LyapunovReport& r) {
  w.section("lyapunov")
      .add("outside_ticks", r.outside)
      .add("positivity_violations", r.positivity_violations)
      .add("decrease_fraction", r.decrease_fraction())
      .add("eligible_ticks", r.eligible)
      .add("decrease_violations", r.decrease_violations)
      .add("agreement_fraction", r.agreement_fraction())
      .add("max_violation", r.max_violation)
      .add_array("potential", r.potential)
      .add_array("analytic", r.analytic)
      .add_array("realized", r.realized);
}

inline void write_report(ReportWriter& w, const ProbeReport& r) {
  w.section("boundary_probes")
      .add("probes", r.probes)
      .add("negative", r.negative)
      .add("negative_fraction", r.negative_fraction())
      .add("max_abs_dvdn", r.max_abs);
}

inline void write_report(ReportWriter& w, const AvoidanceReport& r) {
  std::vector<double> dvdn;
  std::vector<double> clearance;
  for (const auto& b : r.band) {
    dvdn.push_back(b.dvdn);
    clearance.push_back(b.clearance);
  }
  w.section("avoidance")
      .add("min_clearance_pursuer", r.min_clearance_pursuer)
      .add("min_clearance_evader", r.min_clearance_evader)
      .add("obstacle_positions", r.obstacle_positions)
      .add("band_samples", r.band.size())
      .add("negative_dvdn", r.negative_dvdn)
      .add("receding", r.receding)
      .add_array("band_clearance", clearance)
      .add_array("band_dvdn", dvdn)
      .add_array("band_dxn2_dt", r.dxn2_dt);
}

inline void write_report(ReportWriter& w, const CriticalPointReport& r) {
  w.section("critical_points")
      .add("count", r.points.size())
      .add("grad_threshold", r.grad_threshold)
      .add("eigen_floor", r.eigen_floor)
      .add("nonsingular", r.nonsingular);
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const auto& p = r.points[k];
    const std::string key = "point" + std::to_string(k);
    w.add_array(key, std::vector<double>{p.position.x, p.position.y, p.grad_norm, p.lambda_min, p.lambda_max, p.trace()});
  }
}

inline void write_report(ReportWriter& w, const CurvatureReport& r) {
  w.section("curvature")
      .add("raw_max", r.raw_max)
      .add("peaks", r.peaks.size())
      .add("drops", r.drops.size())
      .add("matched", r.matches.size())
      .add("fraction", r.fraction())
      .add_array("peak_ticks", r.peaks)
      .add_array("curvature", r.curvature)
      .add_array("distance", r.distance);
}

inline void write_report(ReportWriter& w, const std::vector<CellIndex>& extrema) {
  std::vector<int> flat;
  for (const auto& c : extrema) {
    flat.push_back(c.i);
    flat.push_back(c.j);
  }
  w.section("maximum_principle").add("violations", extrema.size()).add_array("cells", flat);
}

}  // namespace wavepursuit
