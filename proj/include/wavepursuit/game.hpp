#pragma once

// Closed-loop pursuit-evasion simulation with fixed-step explicit Euler
// integration and simultaneous agent updates.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavepursuit/agents.hpp"
#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/field.hpp"
#include "wavepursuit/guidance.hpp"
#include "wavepursuit/scenario.hpp"

namespace wavepursuit {

inline constexpr std::string_view kSoftwareVersion = "wavepursuit 1.0.0";

struct TickRecord {
  double t = 0.0;
  Vec2 pursuer;
  Vec2 evader;
  double distance = 0.0;
  Vec2 command;             // pursuer velocity
  double potential = 0.0;   // V at the pursuer
  double grad_norm2 = 0.0;  // |grad V|^2 at the pursuer
  double dvdt = 0.0;        // dV/dt at the pursuer
  double clearance_pursuer = 0.0;
  double clearance_evader = 0.0;
  bool captured = false;
  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct TraceMetadata {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string version{kSoftwareVersion};
  friend bool operator==(const TraceMetadata&, const TraceMetadata&) = default;
};

struct GameTrace {
  TraceMetadata meta;
  std::vector<TickRecord> records;
  friend bool operator==(const GameTrace&, const GameTrace&) = default;
};

/// Per-tick view handed to observers; the field reference is only valid
/// during the callback.
struct TickView {
  std::size_t tick = 0;
  const TickRecord& record;
  const PotentialField& pursuer_field;
  const Environment& env;
};

struct RunOptions {
  std::function<void(const TickView&)> on_tick;
  /// Overrides game.stop_on_capture when set.
  std::optional<bool> stop_on_capture;
};

/// Explicit Euler step with the obstacle rule: accept a free landing cell;
/// otherwise cancel the velocity component into the blocking boundary cell
/// and retry once; otherwise stay put.
inline Vec2 integrate_with_collision(const Vec2& p, const Vec2& v, double dt, const Environment& env) {
  const Vec2 candidate = p + v * dt;
  const auto free_at = [&](const Vec2& q) { return env.in_workspace(q) && env.is_free(env.cell_of(q)); };
  if (free_at(candidate)) return candidate;
  const CellIndex blocking = env.cell_of(candidate);
  if (env.cell(blocking) != CellClass::Boundary) return p;
  Vec2 n;
  try {
    n = boundary_normal(env, blocking);
  } catch (const Error&) {
    return p;
  }
  const double vn = dot(v, n);
  if (vn >= 0.0) return p;
  const Vec2 slide = p + (v - n * vn) * dt;
  return free_at(slide) ? slide : p;
}

struct CaptureReport {
  std::optional<std::size_t> first_capture_tick;
  double final_distance = 0.0;
  double lock_fraction = 0.0;  // over the last 20% of ticks
};

inline CaptureReport check_capture(const GameTrace& trace, double capture_radius, double lock_threshold) {
  CaptureReport out;
  const auto& r = trace.records;
  if (r.empty()) return out;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k].distance <= capture_radius) {
      out.first_capture_tick = k;
      break;
    }
  }
  out.final_distance = r.back().distance;
  const std::size_t tail = std::max<std::size_t>(1, (r.size() + 4) / 5);
  std::size_t locked = 0;
  for (std::size_t k = r.size() - tail; k < r.size(); ++k) locked += r[k].distance <= lock_threshold ? 1 : 0;
  out.lock_fraction = static_cast<double>(locked) / static_cast<double>(tail);
  return out;
}

namespace detail {

/// Pursuer field plus the state needed to advance it between ticks.
class PursuerFieldDriver {
 public:
  PursuerFieldDriver(const Scenario& s, const Environment& env)
      : env_(env),
        kind_(field_kind_for(s.pursuer.strategy)),
        solver_(solver_options(s)),
        target_radius_(effective_target_radius(s)),
        substeps_(effective_substeps(s)),
        dt_field_(s.game.dt / substeps_) {
    FieldParams params;
    params.boundary_level = s.field.boundary_level;
    params.boundary_mode = s.field.boundary_mode;
    field_ = solve_laplace(env, std::vector<Clamp>{Clamp{{s.evader.start, target_radius_}, 0.0}}, params, solver_);
    if (kind_ != FieldKind::Laplace) {
      field_ = warm_start(std::move(field_), kind_, s.field.wave_speed, effective_damping(s), dt_field_);
    } else {
      field_.params.wave_speed = s.field.wave_speed;
    }
  }

  const PotentialField& field() const { return field_; }
  int substeps() const { return substeps_; }

  void advance(const Vec2& target, double t_end) {
    reset_for_target(field_, env_, TargetFootprint{target, target_radius_});
    switch (kind_) {
      case FieldKind::Laplace:
        relax_laplace(field_, env_, solver_);
        field_.t = t_end;
        break;
      case FieldKind::Diffusion:
        for (int k = 0; k < substeps_; ++k) step_diffusion(field_, env_, dt_field_);
        break;
      case FieldKind::Wave:
        for (int k = 0; k < substeps_; ++k) step_wave(field_, env_, dt_field_);
        break;
    }
  }

 private:
  const Environment& env_;
  FieldKind kind_;
  SolverOptions solver_;
  double target_radius_;
  int substeps_;
  double dt_field_;
  PotentialField field_;
};

}  // namespace detail

inline GameTrace run_game(const Scenario& s, const RunOptions& options = {}) {
  if (const auto issue = validate_values(s)) {
    throw Error(ErrorCode::ScenarioInvalid, issue->field + ": " + issue->reason);
  }
  const Environment env = build_environment(s.environment);
  if (const auto issue = validate_against(s, env)) {
    throw Error(ErrorCode::ScenarioInvalid, issue->field + ": " + issue->reason);
  }
  const bool stop_on_capture = options.stop_on_capture.value_or(s.game.stop_on_capture);
  const std::size_t ticks = tick_count(s);
  const double dt = s.game.dt;

  GameTrace trace;
  trace.meta.scenario_hash = scenario_hash(s);
  trace.meta.seed = s.game.rng_seed;
  trace.records.reserve(ticks + 1);

  std::size_t tick = 0;
  const auto solver_failure = [&](const Error& e) {
    return Error(ErrorCode::SolverFailure, "tick " + std::to_string(tick) + ": " + e.what());
  };

  std::optional<detail::PursuerFieldDriver> driver;
  try {
    driver.emplace(s, env);
  } catch (const Error& e) {
    throw solver_failure(e);
  }

  const bool evader_needs_field =
      s.evader.strategy == StrategyTag::EvaderHarmonic || s.evader.strategy == StrategyTag::EvaderRandom;
  const HarmonicEvaderParams harmonic{s.evader.d_safe, effective_pursuer_radius(s), s.evader.refresh_every};
  RandomEvaderParams random{s.evader.risk_level, s.evader.candidate_count, s.game.rng_seed};
  const SolverOptions evader_solver = solver_options(s);
  Rng rng(s.game.rng_seed);

  Vec2 xp = s.pursuer.start;
  Vec2 xe = s.evader.start;
  std::optional<PotentialField> efield;
  const auto refresh_evader_field = [&] {
    efield = evader_field(env, xe, xp, harmonic.pursuer_radius, evader_solver, efield ? &*efield : nullptr);
  };
  if (evader_needs_field) {
    try {
      refresh_evader_field();
    } catch (const Error& e) {
      throw solver_failure(e);
    }
  }

  for (tick = 0;; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    const PotentialField& pfield = driver->field();

    // Both commands come from the same pre-tick state.
    const PursuerCommand pc =
        pursuer_step(s.pursuer.strategy, pfield, env, xp, s.pursuer.speed, s.pursuer.regularizer, s.pursuer.command);
    Vec2 ve;
    switch (s.evader.strategy) {
      case StrategyTag::EvaderScripted: ve = evader_scripted_step(t, s.evader.path); break;
      case StrategyTag::EvaderHarmonic: ve = evader_harmonic_step(xe, xp, s.evader.speed, harmonic, *efield, env); break;
      case StrategyTag::EvaderRandom:
        ve = evader_random_step(xe, xp, s.evader.speed, dt, random, harmonic, *efield, env, rng).velocity;
        break;
      default: throw Error(ErrorCode::ScenarioInvalid, "evader.strategy: not an evader strategy");
    }

    TickRecord rec;
    rec.t = t;
    rec.pursuer = xp;
    rec.evader = xe;
    rec.distance = distance(xp, xe);
    rec.command = pc.velocity;
    rec.potential = pc.guidance.potential;
    rec.grad_norm2 = pc.guidance.grad_norm2;
    rec.dvdt = pc.guidance.dvdt;
    rec.clearance_pursuer = signed_clearance(env, xp);
    rec.clearance_evader = signed_clearance(env, xe);
    rec.captured = rec.distance <= s.game.capture_radius;
    trace.records.push_back(rec);
    if (options.on_tick) options.on_tick(TickView{tick, trace.records.back(), pfield, env});

    if ((rec.captured && stop_on_capture) || tick == ticks) break;

    xp = integrate_with_collision(xp, pc.velocity, dt, env);
    xe = integrate_with_collision(xe, ve, dt, env);
    try {
      driver->advance(xe, static_cast<double>(tick + 1) * dt);
      if (evader_needs_field && (tick + 1) % static_cast<std::size_t>(harmonic.refresh_every) == 0) {
        refresh_evader_field();
      }
    } catch (const Error& e) {
      throw solver_failure(e);
    }
  }
  return trace;
}

}  // namespace wavepursuit
