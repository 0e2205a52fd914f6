#pragma once

// Potential field over the environment grid, advanced under one of three
// governing relations:
//   Laplace    lap(V) = 0                          (relaxed to convergence)
//   Diffusion  lap(V) = V_t / a^2                  (explicit Euler)
//   Wave       lap(V) = (V_tt + gamma V_t) / a^2   (leapfrog, optional damping)
// Obstacle boundary cells hold V = C (Dirichlet) or mirror their free
// neighbours (homogeneous Neumann). The outer wall frame is always held at C.
// Target footprints are internal clamps, V = 0 for a pursuer target.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/grid.hpp"
#include "wavepursuit/vec2.hpp"

namespace wavepursuit {

enum class FieldKind { Laplace, Diffusion, Wave };
enum class BoundaryMode { Dirichlet, Neumann };

/// Disk of cells clamped to a fixed level. A zero radius clamps only the cell
/// containing the center.
struct TargetFootprint {
  Vec2 center;
  double radius = 0.0;  // m
  friend constexpr bool operator==(const TargetFootprint&, const TargetFootprint&) = default;
};

struct Clamp {
  TargetFootprint region;
  double level = 0.0;
  friend constexpr bool operator==(const Clamp&, const Clamp&) = default;
};

struct FieldParams {
  FieldKind kind = FieldKind::Laplace;
  BoundaryMode boundary_mode = BoundaryMode::Dirichlet;
  double boundary_level = 1.0;  // C
  double wave_speed = 1.0;      // a, m/s
  double damping = 0.0;         // gamma, 1/s
};

struct SolverOptions {
  double tol = 1e-6;  // max per-cell update, field units
  int max_iters = 200000;
  double omega = 1.8;
};

struct SolveStats {
  int iterations = 0;
  double last_update = 0.0;
};

struct StepOptions {
  /// Reject time steps beyond the explicit stability bound.
  bool enforce_stability = true;
};

struct PotentialField {
  Grid<double> values;
  Grid<double> prev_values;
  bool has_prev = false;
  double t = 0.0;   // s
  double dt = 0.0;  // s, size of the step that produced `values` from `prev_values`
  FieldParams params;
  std::vector<Clamp> clamps;
  /// Level of the clamp holding each cell, NaN where the cell is unclamped.
  Grid<double> clamp_level;

  double cell_size = 0.0;

  bool is_clamped(CellIndex c) const { return !std::isnan(clamp_level[c]); }
};

inline double cfl_max_dt(double wave_speed, double h) { return h / (wave_speed * std::sqrt(2.0)); }

/// Stability bound of the explicit 5-point heat update with diffusivity a^2.
inline double diffusion_max_dt(double wave_speed, double h) {
  return h * h / (4.0 * wave_speed * wave_speed);
}

/// Free cells covered by a footprint. Throws when the center is not in free space.
inline std::vector<CellIndex> footprint_cells(const Environment& env, const TargetFootprint& fp) {
  if (!env.in_workspace(fp.center)) throw Error(ErrorCode::TargetInsideObstacle, "target outside the workspace");
  const CellIndex home = env.cell_of(fp.center);
  if (!env.is_free(home)) throw Error(ErrorCode::TargetInsideObstacle, "target center is not in free space");
  std::vector<CellIndex> out{home};
  const double h = env.cell_size();
  const int reach = static_cast<int>(std::ceil(fp.radius / h)) + 1;
  const double r2 = fp.radius * fp.radius;
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const CellIndex c{home.i + di, home.j + dj};
      if (c == home || !env.is_free(c)) continue;
      if (norm2(env.cell_center(c) - fp.center) <= r2) out.push_back(c);
    }
  }
  return out;
}

namespace detail {

inline bool neumann_ghost(const PotentialField& f, const Environment& env, CellIndex c) {
  return f.params.boundary_mode == BoundaryMode::Neumann && env.cell(c) == CellClass::Boundary &&
         !env.is_frame(c);
}

/// Mean of the free 4-neighbours of a boundary cell (mirror condition).
inline double free_neighbour_mean(const Grid<double>& v, const Environment& env, CellIndex c) {
  double sum = 0.0;
  int n = 0;
  for (const auto& d : kNeighbors4) {
    const CellIndex nb{c.i + d.i, c.j + d.j};
    if (env.is_free(nb)) {
      sum += v[nb];
      ++n;
    }
  }
  return n > 0 ? sum / n : v[c];
}

/// Cell lists shared by the sweeps.
struct ActiveCells {
  std::vector<std::size_t> red;    // free, unclamped, (i + j) even
  std::vector<std::size_t> black;  // free, unclamped, (i + j) odd
  std::vector<CellIndex> ghosts;   // Neumann mirror cells
};

inline ActiveCells active_cells(const PotentialField& f, const Environment& env) {
  ActiveCells out;
  const auto& cells = env.cells();
  for (int j = 0; j < cells.ny(); ++j) {
    for (int i = 0; i < cells.nx(); ++i) {
      const CellIndex c{i, j};
      if (cells[c] == CellClass::Free) {
        if (f.is_clamped(c)) continue;
        ((i + j) % 2 == 0 ? out.red : out.black).push_back(cells.index(i, j));
      } else if (neumann_ghost(f, env, c)) {
        out.ghosts.push_back(c);
      }
    }
  }
  return out;
}

inline void apply_ghosts(Grid<double>& v, const Environment& env, const std::vector<CellIndex>& ghosts) {
  for (const auto& g : ghosts) v[g] = free_neighbour_mean(v, env, g);
}

/// Writes boundary levels and clamp levels into `v`.
inline void apply_fixed(const PotentialField& f, const Environment& env, Grid<double>& v) {
  const auto& cells = env.cells();
  const double c_level = f.params.boundary_level;
  for (int j = 0; j < cells.ny(); ++j) {
    for (int i = 0; i < cells.nx(); ++i) {
      const CellIndex c{i, j};
      if (cells[c] != CellClass::Free) {
        if (!neumann_ghost(f, env, c)) v[c] = c_level;
      } else if (f.is_clamped(c)) {
        v[c] = f.clamp_level[c];
      }
    }
  }
}

inline double laplacian_sum(const std::vector<double>& v, std::size_t k, std::size_t stride) {
  return v[k + 1] + v[k - 1] + v[k + stride] + v[k - stride] - 4.0 * v[k];
}

}  // namespace detail

/// Rebuilds the clamp mask for a new clamp set. Later clamps win on overlap.
inline void set_clamps(PotentialField& f, const Environment& env, std::vector<Clamp> clamps) {
  f.clamp_level.fill(std::numeric_limits<double>::quiet_NaN());
  for (const auto& cl : clamps) {
    for (const auto& c : footprint_cells(env, cl.region)) f.clamp_level[c] = cl.level;
  }
  f.clamps = std::move(clamps);
}

/// Field with boundary levels applied, free cells initialised to C.
inline PotentialField make_field(const Environment& env, const FieldParams& params, std::vector<Clamp> clamps) {
  PotentialField f;
  f.params = params;
  f.cell_size = env.cell_size();
  const auto& cells = env.cells();
  f.values = Grid<double>(cells.nx(), cells.ny(), params.boundary_level);
  f.clamp_level = Grid<double>(cells.nx(), cells.ny(), std::numeric_limits<double>::quiet_NaN());
  set_clamps(f, env, std::move(clamps));
  detail::apply_fixed(f, env, f.values);
  const auto active = detail::active_cells(f, env);
  detail::apply_ghosts(f.values, env, active.ghosts);
  f.prev_values = f.values;
  f.has_prev = false;
  return f;
}

/// Red-black SOR on the 5-point stencil, starting from the current values,
/// until the largest per-cell update of a full sweep drops below tol.
inline SolveStats relax_laplace(PotentialField& f, const Environment& env, const SolverOptions& opt) {
  detail::apply_fixed(f, env, f.values);
  const auto active = detail::active_cells(f, env);
  auto& v = f.values.data();
  const std::size_t stride = static_cast<std::size_t>(f.values.nx());
  const double omega = opt.omega;
  SolveStats stats;
  for (int it = 1; it <= opt.max_iters; ++it) {
    double max_update = 0.0;
    for (const auto* color : {&active.red, &active.black}) {
      for (const std::size_t k : *color) {
        const double avg = 0.25 * (v[k + 1] + v[k - 1] + v[k + stride] + v[k - stride]);
        const double delta = omega * (avg - v[k]);
        v[k] += delta;
        max_update = std::max(max_update, std::abs(delta));
      }
    }
    for (const auto& g : active.ghosts) {
      const double next = detail::free_neighbour_mean(f.values, env, g);
      max_update = std::max(max_update, std::abs(next - f.values[g]));
      f.values[g] = next;
    }
    stats.iterations = it;
    stats.last_update = max_update;
    if (max_update < opt.tol) return stats;
  }
  throw Error(ErrorCode::NoConvergence, "SOR hit " + std::to_string(opt.max_iters) +
                                            " iterations, last update " + std::to_string(stats.last_update));
}

inline PotentialField solve_laplace(const Environment& env, std::vector<Clamp> clamps, FieldParams params,
                                    const SolverOptions& opt, SolveStats* stats = nullptr) {
  params.kind = FieldKind::Laplace;
  PotentialField f = make_field(env, params, std::move(clamps));
  const SolveStats s = relax_laplace(f, env, opt);
  if (stats) *stats = s;
  f.prev_values = f.values;
  f.has_prev = true;
  return f;
}

/// Single pursuer target, V = 0 on the footprint.
inline PotentialField solve_laplace(const Environment& env, const TargetFootprint& target,
                                    const FieldParams& params, const SolverOptions& opt) {
  return solve_laplace(env, std::vector<Clamp>{Clamp{target, 0.0}}, params, opt);
}

/// One explicit Euler step V <- V + dt a^2 lap_h(V) on unclamped free cells.
inline void step_diffusion(PotentialField& f, const Environment& env, double dt, const StepOptions& opt = {}) {
  if (f.params.kind != FieldKind::Diffusion) throw Error(ErrorCode::FieldKindMismatch, "step_diffusion on a non-diffusion field");
  const double h = f.cell_size;
  const double a = f.params.wave_speed;
  const double bound = diffusion_max_dt(a, h);
  if (!(dt > 0.0) || (opt.enforce_stability && dt > bound * (1.0 + 1e-12))) {
    throw Error(ErrorCode::UnstableTimeStep,
                "dt = " + std::to_string(dt) + " exceeds diffusion bound " + std::to_string(bound));
  }
  const auto active = detail::active_cells(f, env);
  const std::size_t stride = static_cast<std::size_t>(f.values.nx());
  const double k = dt * a * a / (h * h);
  Grid<double> next = f.values;
  const auto& v = f.values.data();
  auto& out = next.data();
  for (const auto* color : {&active.red, &active.black}) {
    for (const std::size_t idx : *color) out[idx] = v[idx] + k * detail::laplacian_sum(v, idx, stride);
  }
  detail::apply_fixed(f, env, next);
  detail::apply_ghosts(next, env, active.ghosts);
  f.prev_values = std::move(f.values);
  f.values = std::move(next);
  f.has_prev = true;
  f.dt = dt;
  f.t += dt;
}

/// Leapfrog step
///   V+ = 2V - V- + (a dt)^2 lap_h(V) - gamma dt (V - V-)
/// on unclamped free cells. Needs the previous time level.
inline void step_wave(PotentialField& f, const Environment& env, double dt, const StepOptions& opt = {}) {
  if (f.params.kind != FieldKind::Wave) throw Error(ErrorCode::FieldKindMismatch, "step_wave on a non-wave field");
  if (!f.has_prev) throw Error(ErrorCode::MissingPreviousStep, "wave step needs two time levels");
  const double h = f.cell_size;
  const double a = f.params.wave_speed;
  const double bound = cfl_max_dt(a, h);
  if (!(dt > 0.0) || (opt.enforce_stability && dt > bound * (1.0 + 1e-12))) {
    throw Error(ErrorCode::UnstableTimeStep, "dt = " + std::to_string(dt) + " exceeds CFL bound " + std::to_string(bound));
  }
  const auto active = detail::active_cells(f, env);
  const std::size_t stride = static_cast<std::size_t>(f.values.nx());
  const double courant2 = (a * dt / h) * (a * dt / h);
  const double damp = f.params.damping * dt;
  Grid<double> next = f.values;
  const auto& v = f.values.data();
  const auto& vp = f.prev_values.data();
  auto& out = next.data();
  for (const auto* color : {&active.red, &active.black}) {
    for (const std::size_t idx : *color) {
      out[idx] = 2.0 * v[idx] - vp[idx] + courant2 * detail::laplacian_sum(v, idx, stride) - damp * (v[idx] - vp[idx]);
    }
  }
  detail::apply_fixed(f, env, next);
  detail::apply_ghosts(next, env, active.ghosts);
  f.prev_values = std::move(f.values);
  f.values = std::move(next);
  f.dt = dt;
  f.t += dt;
}

/// Backward difference of one cell; exactly zero on Dirichlet boundary cells.
inline double cell_time_derivative(const PotentialField& f, const Environment& env, CellIndex c) {
  if (env.cell(c) != CellClass::Free && !detail::neumann_ghost(f, env, c)) return 0.0;
  return (f.values[c] - f.prev_values[c]) / f.dt;
}

inline Grid<double> time_derivative(const PotentialField& f, const Environment& env) {
  if (!f.has_prev || !(f.dt > 0.0)) throw Error(ErrorCode::MissingPreviousStep, "no previous time level recorded");
  Grid<double> out(f.values.nx(), f.values.ny(), 0.0);
  for (int j = 0; j < out.ny(); ++j) {
    for (int i = 0; i < out.nx(); ++i) out(i, j) = cell_time_derivative(f, env, {i, j});
  }
  return out;
}

/// Moves the zero clamp of a pursuer field to a new target. Cells leaving the
/// footprint keep their last value; cells entering it are zeroed at both levels.
inline void reset_for_target(PotentialField& f, const Environment& env, const TargetFootprint& target) {
  if (f.clamps.size() == 1 && f.clamps.front().region == target) return;
  set_clamps(f, env, {Clamp{target, 0.0}});
  detail::apply_fixed(f, env, f.values);
  detail::apply_fixed(f, env, f.prev_values);
}

/// Turns a converged Laplace field into the initial state of a time-dependent
/// solver: both time levels equal, nominal step `dt`.
inline PotentialField warm_start(PotentialField laplace, FieldKind kind, double wave_speed, double damping, double dt) {
  laplace.params.kind = kind;
  laplace.params.wave_speed = wave_speed;
  laplace.params.damping = damping;
  laplace.prev_values = laplace.values;
  laplace.has_prev = true;
  laplace.dt = dt;
  return laplace;
}

}  // namespace wavepursuit
