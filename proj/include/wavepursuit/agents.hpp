#pragma once

// Pursuer and evader strategies. Every strategy returns a velocity whose
// magnitude is the agent's speed (or zero).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string_view>

#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/field.hpp"
#include "wavepursuit/guidance.hpp"
#include "wavepursuit/vec2.hpp"

namespace wavepursuit {

enum class StrategyTag {
  PursuerWave,
  PursuerDiffusion,
  PursuerLaplace,
  PursuerHarmonicDuel,
  EvaderScripted,
  EvaderHarmonic,
  EvaderRandom,
};

constexpr bool is_pursuer(StrategyTag s) {
  return s == StrategyTag::PursuerWave || s == StrategyTag::PursuerDiffusion || s == StrategyTag::PursuerLaplace ||
         s == StrategyTag::PursuerHarmonicDuel;
}
constexpr bool is_evader(StrategyTag s) { return !is_pursuer(s); }

/// Field kind a pursuer strategy descends.
constexpr FieldKind field_kind_for(StrategyTag s) {
  switch (s) {
    case StrategyTag::PursuerWave: return FieldKind::Wave;
    case StrategyTag::PursuerDiffusion: return FieldKind::Diffusion;
    default: return FieldKind::Laplace;
  }
}

/// How the pursuer turns the guidance vector g into a velocity.
enum class CommandMode {
  Normalized,  // v_p * g / |g|
  RawOde,      // g itself (the unscaled guidance ODE)
};

struct PursuerCommand {
  Vec2 velocity;
  GuidanceCommand guidance;
};

inline PursuerCommand pursuer_step(StrategyTag strategy, const PotentialField& field, const Environment& env,
                                   const Vec2& position, double speed, const RegularizerParams& reg,
                                   CommandMode mode = CommandMode::Normalized) {
  if (!is_pursuer(strategy)) throw Error(ErrorCode::FieldKindMismatch, "evader strategy in pursuer slot");
  if (field.params.kind != field_kind_for(strategy)) {
    throw Error(ErrorCode::FieldKindMismatch, "field kind does not match the pursuer strategy");
  }
  PursuerCommand out;
  if (strategy == StrategyTag::PursuerWave) {
    out.guidance = guidance_regularized(field, env, position, reg);
  } else {
    // Laplace and diffusion pursuers descend the spatial gradient only.
    const Vec2 grad = sample_gradient(field, env, position);
    out.guidance.v = -grad;
    out.guidance.potential = sample_grid(field.values, env, position);
    out.guidance.grad_norm2 = norm2(grad);
    out.guidance.dvdt = sample_time_derivative(field, env, position);
  }
  out.velocity = mode == CommandMode::RawOde ? out.guidance.v : normalize_command(out.guidance.v, speed);
  return out;
}

// ---------------------------------------------------------------------------
// Scripted evader

struct ScriptedPath {
  enum class Kind { Stationary, Linear, LinearPlusSinusoid };
  Kind kind = Kind::Stationary;
  Vec2 base_velocity;      // m/s
  double amplitude = 0.0;  // m
  double omega = 0.0;      // rad/s
  double phase = 0.0;      // rad
};

namespace detail {

/// Unit vector perpendicular (counter-clockwise) to the base velocity; +y when
/// the base velocity is zero.
inline Vec2 path_normal(const ScriptedPath& path) {
  const double len = norm(path.base_velocity);
  if (len == 0.0) return Vec2{0.0, 1.0};
  return Vec2{-path.base_velocity.y / len, path.base_velocity.x / len};
}

}  // namespace detail

inline Vec2 evader_scripted_step(double t, const ScriptedPath& path) {
  switch (path.kind) {
    case ScriptedPath::Kind::Stationary: return Vec2{};
    case ScriptedPath::Kind::Linear: return path.base_velocity;
    case ScriptedPath::Kind::LinearPlusSinusoid:
      return path.base_velocity +
             detail::path_normal(path) * (path.amplitude * path.omega * std::cos(path.omega * t + path.phase));
  }
  return Vec2{};
}

/// Closed-form position of the scripted path (no collisions).
inline Vec2 scripted_position(const Vec2& start, double t, const ScriptedPath& path) {
  switch (path.kind) {
    case ScriptedPath::Kind::Stationary: return start;
    case ScriptedPath::Kind::Linear: return start + path.base_velocity * t;
    case ScriptedPath::Kind::LinearPlusSinusoid:
      return start + path.base_velocity * t +
             detail::path_normal(path) *
                 (path.amplitude * (std::sin(path.omega * t + path.phase) - std::sin(path.phase)));
  }
  return start;
}

// ---------------------------------------------------------------------------
// Harmonic evader

struct HarmonicEvaderParams {
  double d_safe = 4.0;           // m
  double pursuer_radius = 0.2;   // m, radius of the pursuer's high-potential disk
  int refresh_every = 1;         // ticks between re-solves of the evader field
};

/// The evader's own repulsion field: V = 1 on obstacles, the outer wall and the
/// pursuer disk; V = 0 on the single cell the evader occupies.
inline PotentialField evader_field(const Environment& env, const Vec2& evader, const Vec2& pursuer,
                                   double pursuer_radius, const SolverOptions& opt,
                                   const PotentialField* warm = nullptr) {
  std::vector<Clamp> clamps{Clamp{TargetFootprint{pursuer, pursuer_radius}, 1.0},
                            Clamp{TargetFootprint{evader, 0.0}, 0.0}};
  FieldParams params;
  params.boundary_level = 1.0;
  PotentialField f;
  try {
    if (warm) {
      f = *warm;
      set_clamps(f, env, std::move(clamps));
    } else {
      f = make_field(env, params, std::move(clamps));
    }
    relax_laplace(f, env, opt);
  } catch (const Error& e) {
    throw Error(ErrorCode::SolverFailure, std::string("evader field: ") + e.what());
  }
  f.prev_values = f.values;
  f.has_prev = true;
  return f;
}

/// -grad V at the center of the evader's own (zero) cell, unit length or zero.
inline Vec2 escape_direction(const PotentialField& evader_field, const Environment& env, const Vec2& evader) {
  const Vec2 g = cell_gradient(evader_field.values, env, env.cell_of(evader));
  return normalize_command(-g, 1.0);
}

inline Vec2 evader_harmonic_step(const Vec2& evader, const Vec2& pursuer, double speed,
                                 const HarmonicEvaderParams& params, const PotentialField& field,
                                 const Environment& env) {
  if (distance(evader, pursuer) >= params.d_safe) return Vec2{};
  return escape_direction(field, env, evader) * speed;
}

// ---------------------------------------------------------------------------
// Random (risk-thresholded) evader

struct RandomEvaderParams {
  double risk_level = 0.6;
  int candidate_count = 8;
  std::uint64_t rng_seed = 1;
};

using Rng = std::mt19937_64;

/// Uniform angle in [0, 2 pi) from the top 53 bits of one draw.
inline Vec2 random_unit(Rng& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double angle = 2.0 * std::numbers::pi * u;
  return Vec2{std::cos(angle), std::sin(angle)};
}

struct RandomStepResult {
  Vec2 velocity;
  int accepted_candidate = -1;  // -1 when the harmonic fallback was used
};

/// Samples random headings; the first whose one-step look-ahead lies in free
/// space with risk <= risk_level wins. The risk field is the evader field
/// (already bounded to [0, 1]).
inline RandomStepResult evader_random_step(const Vec2& evader, const Vec2& pursuer, double speed, double dt,
                                           const RandomEvaderParams& params, const HarmonicEvaderParams& fallback,
                                           const PotentialField& risk, const Environment& env, Rng& rng) {
  const double lookahead = speed * dt;
  for (int k = 0; k < params.candidate_count; ++k) {
    const Vec2 dir = random_unit(rng);
    const Vec2 q = evader + dir * lookahead;
    if (!env.in_workspace(q) || !env.is_free(env.cell_of(q))) continue;
    if (sample_grid(risk.values, env, q) <= params.risk_level) return {dir * speed, k};
  }
  return {evader_harmonic_step(evader, pursuer, speed, fallback, risk, env), -1};
}

constexpr std::string_view to_string(StrategyTag s) {
  switch (s) {
    case StrategyTag::PursuerWave: return "wave";
    case StrategyTag::PursuerDiffusion: return "diffusion";
    case StrategyTag::PursuerLaplace: return "laplace";
    case StrategyTag::PursuerHarmonicDuel: return "harmonic";
    case StrategyTag::EvaderScripted: return "scripted";
    case StrategyTag::EvaderHarmonic: return "harmonic";
    case StrategyTag::EvaderRandom: return "random";
  }
  return "?";
}

}  // namespace wavepursuit
