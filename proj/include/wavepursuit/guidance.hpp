#pragma once

// Continuous sampling of a field snapshot and the guidance law
//   g = -[grad V + grad V / d(|grad V|^2) * dV/dt]
// with d(s) = s (raw) or d(s) = beta(s) (regularized, finite everywhere).

#include <array>
#include <cmath>
#include <string>

#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/field.hpp"
#include "wavepursuit/vec2.hpp"

namespace wavepursuit {

struct RegularizerParams {
  double rho = 1e-3;      // threshold on |grad V|^2
  double epsilon = 1e-4;  // beta(0)
};

struct GuidanceCommand {
  Vec2 v;
  double potential = 0.0;
  double grad_norm2 = 0.0;
  double dvdt = 0.0;
};

namespace detail {

/// The four cell centers surrounding p and their bilinear weights.
struct Stencil {
  std::array<CellIndex, 4> cells;
  std::array<double, 4> weights;
};

inline Stencil bilinear_stencil(const Environment& env, const Vec2& p) {
  const double h = env.cell_size();
  const double fx = p.x / h + 0.5;
  const double fy = p.y / h + 0.5;
  int i0 = static_cast<int>(std::floor(fx));
  int j0 = static_cast<int>(std::floor(fy));
  i0 = std::clamp(i0, 0, env.cells().nx() - 2);
  j0 = std::clamp(j0, 0, env.cells().ny() - 2);
  const double tx = fx - i0;
  const double ty = fy - j0;
  return Stencil{{CellIndex{i0, j0}, CellIndex{i0 + 1, j0}, CellIndex{i0, j0 + 1}, CellIndex{i0 + 1, j0 + 1}},
                 {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty}};
}

inline void require_free(const Environment& env, const Vec2& p) {
  if (!env.in_workspace(p) || !env.is_free(env.cell_of(p))) {
    throw Error(ErrorCode::QueryInObstacle,
                "query point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is not in free space");
  }
}

/// Cells whose values are usable in a difference stencil.
inline bool stencil_cell(const Environment& env, CellIndex c) {
  if (!env.cells().contains(c.i, c.j)) return false;
  const CellClass k = env.cell(c);
  return k == CellClass::Free || k == CellClass::Boundary;
}

inline double axis_difference(const Grid<double>& v, const Environment& env, CellIndex c, CellIndex d, double h) {
  const CellIndex fwd{c.i + d.i, c.j + d.j};
  const CellIndex bwd{c.i - d.i, c.j - d.j};
  const bool has_f = stencil_cell(env, fwd);
  const bool has_b = stencil_cell(env, bwd);
  if (has_f && has_b) return (v[fwd] - v[bwd]) / (2.0 * h);
  if (has_f) return (v[fwd] - v[c]) / h;
  if (has_b) return (v[c] - v[bwd]) / h;
  return 0.0;
}

}  // namespace detail

/// Central-difference gradient at a cell center, one-sided next to obstacle
/// interiors and the grid edge.
inline Vec2 cell_gradient(const Grid<double>& v, const Environment& env, CellIndex c) {
  const double h = env.cell_size();
  return Vec2{detail::axis_difference(v, env, c, {1, 0}, h), detail::axis_difference(v, env, c, {0, 1}, h)};
}

inline double sample_grid(const Grid<double>& v, const Environment& env, const Vec2& p) {
  const auto st = detail::bilinear_stencil(env, p);
  double out = 0.0;
  for (int k = 0; k < 4; ++k) out += st.weights[k] * v[st.cells[k]];
  return out;
}

inline double sample_potential(const PotentialField& f, const Environment& env, const Vec2& p) {
  detail::require_free(env, p);
  return sample_grid(f.values, env, p);
}

inline Vec2 sample_gradient(const Grid<double>& v, const Environment& env, const Vec2& p) {
  const auto st = detail::bilinear_stencil(env, p);
  Vec2 out;
  for (int k = 0; k < 4; ++k) out += st.weights[k] * cell_gradient(v, env, st.cells[k]);
  return out;
}

inline Vec2 sample_gradient(const PotentialField& f, const Environment& env, const Vec2& p) {
  detail::require_free(env, p);
  return sample_gradient(f.values, env, p);
}

/// Bilinear interpolation of the per-cell backward difference; zero for fields
/// without a recorded previous level (quasi-stationary Laplace snapshots).
inline double sample_time_derivative(const PotentialField& f, const Environment& env, const Vec2& p) {
  detail::require_free(env, p);
  if (f.params.kind == FieldKind::Laplace) return 0.0;
  if (!f.has_prev || !(f.dt > 0.0)) throw Error(ErrorCode::MissingPreviousStep, "no previous time level recorded");
  const auto st = detail::bilinear_stencil(env, p);
  double out = 0.0;
  for (int k = 0; k < 4; ++k) out += st.weights[k] * cell_time_derivative(f, env, st.cells[k]);
  return out;
}

/// Cubic blend with eta(0) = eps, eta(rho) = rho, eta'(0) = 0, eta'(rho) = 1.
inline double eta(double s, const RegularizerParams& p) {
  if (!(s >= 0.0) || s > p.rho) throw Error(ErrorCode::OutOfDomain, "eta is defined on [0, rho]");
  const double rho = p.rho;
  const double eps = p.epsilon;
  return eps + (2.0 * rho - 3.0 * eps) / (rho * rho) * s * s + (2.0 * eps - rho) / (rho * rho * rho) * s * s * s;
}

inline double beta(double s, const RegularizerParams& p) { return s >= p.rho ? s : eta(s, p); }

namespace detail {

template <typename Denominator>
GuidanceCommand guidance_with(const PotentialField& f, const Environment& env, const Vec2& p, Denominator denom) {
  GuidanceCommand cmd;
  const Vec2 grad = sample_gradient(f, env, p);
  cmd.potential = sample_grid(f.values, env, p);
  cmd.dvdt = sample_time_derivative(f, env, p);
  cmd.grad_norm2 = norm2(grad);
  const double scale = cmd.dvdt / denom(cmd.grad_norm2);
  cmd.v = -(grad + grad * scale);
  return cmd;
}

}  // namespace detail

inline GuidanceCommand guidance_raw(const PotentialField& f, const Environment& env, const Vec2& p) {
  return detail::guidance_with(f, env, p, [&](double s) {
    if (s == 0.0) throw Error(ErrorCode::SingularGradient, "|grad V|^2 = 0 at the query point");
    return s;
  });
}

inline GuidanceCommand guidance_regularized(const PotentialField& f, const Environment& env, const Vec2& p,
                                            const RegularizerParams& params) {
  return detail::guidance_with(f, env, p, [&](double s) { return beta(s, params); });
}

/// speed * g / |g|, or zero when g vanishes.
inline Vec2 normalize_command(const Vec2& g, double speed) {
  const double len = norm(g);
  if (len == 0.0) return Vec2{};
  return g * (speed / len);
}

}  // namespace wavepursuit
