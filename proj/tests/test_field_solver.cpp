#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace wavepursuit;
using wp_test::dense_laplace;
using wp_test::sup_diff;

namespace {

FieldParams params(FieldKind kind = FieldKind::Laplace, BoundaryMode mode = BoundaryMode::Dirichlet) {
  FieldParams p;
  p.kind = kind;
  p.boundary_mode = mode;
  return p;
}

SolverOptions tight(double tol = 1e-12) { return SolverOptions{tol, 200000, 1.8}; }

}  // namespace

TEST(Laplace, StripHasLinearProfile) {
  // Obstacles above and below a 3-cell strip, mirror conditions on them; the
  // left wall holds C = 1 and the right column is clamped to 0.
  const Environment env = build_environment({1.0, 0.5, 0.1, {Rect{{0, 0}, {1, 0.1}}, Rect{{0, 0.4}, {1, 0.5}}}});
  std::vector<Clamp> clamps;
  for (double y : {0.15, 0.25, 0.35}) clamps.push_back({{{0.95, y}, 0.0}, 0.0});
  const double tol = 1e-10;
  const auto f = solve_laplace(env, clamps, params(FieldKind::Laplace, BoundaryMode::Neumann), tight(tol));
  for (int j = 2; j <= 4; ++j) {
    for (int i = 0; i <= 10; ++i) EXPECT_NEAR(f.values(i, j), 1.0 - i / 10.0, 100 * tol) << i << "," << j;
  }
}

TEST(Laplace, MatchesDenseSolve) {
  const Environment env = build_environment({0.6, 0.6, 0.1, {}});
  const double tol = 1e-9;
  const auto f = solve_laplace(env, TargetFootprint{{0.25, 0.25}, 0.0}, params(), tight(tol));
  EXPECT_LE(sup_diff(f.values, dense_laplace(f, env)), 10 * tol);
  for (const CellIndex c : env.free_cells()) {
    if (f.is_clamped(c)) continue;
    EXPECT_GT(f.values[c], 0.0);
    EXPECT_LT(f.values[c], 1.0);
  }
}

TEST(Laplace, MatchesDenseSolveNeumann) {
  const Environment env = build_environment({0.8, 0.8, 0.1, {Rect{{0.3, 0.3}, {0.5, 0.5}}}});
  const double tol = 1e-10;
  const auto f = solve_laplace(env, TargetFootprint{{0.15, 0.65}, 0.1}, params(FieldKind::Laplace, BoundaryMode::Neumann), tight(tol));
  EXPECT_LE(sup_diff(f.values, dense_laplace(f, env)), 10 * tol);
}

TEST(Laplace, NoConvergenceIsReported) {
  const Environment env = build_environment({2, 2, 0.1, {}});
  try {
    solve_laplace(env, TargetFootprint{{1, 1}, 0.2}, params(), SolverOptions{1e-12, 3, 1.8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(Laplace, TargetInObstacleRejected) {
  const Environment env = build_environment({2, 2, 0.1, {Rect{{0.5, 0.5}, {1.5, 1.5}}}});
  try {
    solve_laplace(env, TargetFootprint{{1, 1}, 0.2}, params(), tight());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TargetInsideObstacle);
  }
}

TEST(Laplace, NeumannNormalDifferenceVanishes) {
  const Environment env = build_environment({3, 3, 0.1, {Rect{{1, 1}, {2, 2}}}});
  const auto f = solve_laplace(env, TargetFootprint{{0.5, 0.5}, 0.2}, params(FieldKind::Laplace, BoundaryMode::Neumann), tight());
  // Flat faces: the mirror cell copies its single free neighbour exactly.
  for (int j = 12; j <= 19; ++j) {
    EXPECT_DOUBLE_EQ(f.values(11, j), f.values(10, j));
    EXPECT_DOUBLE_EQ(f.values(20, j), f.values(21, j));
  }
}

TEST(Stability, CflBound) {
  EXPECT_NEAR(cfl_max_dt(1, 0.1), 0.0707106781, 1e-9);
  EXPECT_DOUBLE_EQ(cfl_max_dt(2, 0.1), cfl_max_dt(1, 0.1) / 2);
  EXPECT_DOUBLE_EQ(cfl_max_dt(1, 0.2), cfl_max_dt(1, 0.1) * 2);
  EXPECT_DOUBLE_EQ(diffusion_max_dt(1, 0.1), 0.0025);
}

TEST(Diffusion, UniformFieldIsFixed) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Diffusion, 1.0, 0.0, 0.002);
  const auto before = f.values;
  for (int k = 0; k < 10; ++k) step_diffusion(f, env, 0.002);
  EXPECT_TRUE(f.values == before);
  EXPECT_NEAR(f.t, 0.02, 1e-15);
}

TEST(Diffusion, SingleColdCellMatchesStencil) {
  const Environment env = build_environment({0.5, 0.5, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Diffusion, 1.0, 0.0, 0.0025);
  f.values(3, 3) = 0.0;
  f.prev_values = f.values;
  const double dt = 0.002;
  const double k = dt / 0.01;  // dt a^2 / h^2
  step_diffusion(f, env, dt);
  EXPECT_DOUBLE_EQ(f.values(3, 3), 0.0 + k * 4.0);
  EXPECT_DOUBLE_EQ(f.values(2, 3), 1.0 + k * (0.0 - 1.0));
  EXPECT_DOUBLE_EQ(f.values(3, 4), 1.0 + k * (0.0 - 1.0));
  EXPECT_DOUBLE_EQ(f.values(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(f.prev_values(3, 3), 0.0);
  double total = 0;
  for (const CellIndex c : env.free_cells()) total += f.values[c] - f.prev_values[c];
  EXPECT_NEAR(total, 0.0, 1e-12);
}

TEST(Diffusion, SettlesToLaplace) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  const TargetFootprint target{{0.35, 0.55}, 0.1};
  const auto laplace = solve_laplace(env, target, params(), tight());
  auto f = make_field(env, params(FieldKind::Diffusion), {Clamp{target, 0.0}});
  f.prev_values = f.values;
  f.has_prev = true;
  const double dt = 0.9 * diffusion_max_dt(1.0, 0.1);
  for (int k = 0; k < 4000; ++k) step_diffusion(f, env, dt);
  EXPECT_LE(sup_diff(f.values, laplace.values), 1e-4);
}

TEST(Diffusion, RejectsUnstableStep) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Diffusion, 1.0, 0.0, 0.001);
  try {
    step_diffusion(f, env, 0.0026);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnstableTimeStep);
  }
  auto w = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.0, 0.001);
  try {
    step_diffusion(w, env, 0.001);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FieldKindMismatch);
  }
}

TEST(Wave, UniformFieldIsFixed) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.0, 0.05);
  const auto before = f.values;
  for (int k = 0; k < 100; ++k) step_wave(f, env, 0.05);
  EXPECT_TRUE(f.values == before);
}

TEST(Wave, SingleStepMatchesStencil) {
  const Environment env = build_environment({0.5, 0.5, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.5, 0.05);
  f.values(3, 3) = 0.2;
  f.prev_values(3, 3) = 0.4;
  const double dt = 0.05;
  const double c2 = (1.0 * dt / 0.1) * (1.0 * dt / 0.1);
  step_wave(f, env, dt);
  EXPECT_DOUBLE_EQ(f.values(3, 3), 2 * 0.2 - 0.4 + c2 * (4.0 - 0.8) - 0.5 * dt * (0.2 - 0.4));
  EXPECT_DOUBLE_EQ(f.values(2, 3), 2.0 - 1.0 + c2 * (0.2 - 1.0) - 0.0);
  EXPECT_DOUBLE_EQ(f.values(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(f.prev_values(3, 3), 0.2);
}

TEST(Wave, DampedSettlesToLaplace) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  const TargetFootprint target{{0.35, 0.55}, 0.1};
  const auto laplace = solve_laplace(env, target, params(), tight());
  auto f = make_field(env, params(FieldKind::Wave), {Clamp{target, 0.0}});
  f.params.damping = 5.0;
  f.prev_values = f.values;
  f.has_prev = true;
  const double dt = 0.9 * cfl_max_dt(1.0, 0.1);
  for (int k = 0; k < 3000; ++k) step_wave(f, env, dt);
  EXPECT_LE(sup_diff(f.values, laplace.values), 1e-3);
  EXPECT_TRUE(maximum_principle_check(f, env).empty());
}

TEST(Wave, AboveCflBlowsUp) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.0, 0.01);
  f.values(5, 5) = 0.999;
  const double dt = 1.1 * cfl_max_dt(1.0, 0.1);
  EXPECT_THROW(step_wave(f, env, dt), Error);
  double sup = 0;
  for (int k = 0; k < 2000 && sup <= 10.0; ++k) {
    step_wave(f, env, dt, StepOptions{false});
    for (const double v : f.values.data()) sup = std::max(sup, std::abs(v));
  }
  EXPECT_GT(sup, 10.0);
}

TEST(Wave, BelowCflStaysBounded) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.0, 0.01);
  f.values(5, 5) = 0.999;
  const double dt = 0.99 * cfl_max_dt(1.0, 0.1);
  double sup = 0;
  for (int k = 0; k < 2000; ++k) {
    step_wave(f, env, dt);
    for (const double v : f.values.data()) sup = std::max(sup, std::abs(v));
  }
  EXPECT_LT(sup, 10.0);
}

TEST(Wave, NeedsPreviousLevel) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = make_field(env, params(FieldKind::Wave), {});
  try {
    step_wave(f, env, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPreviousStep);
  }
}

TEST(Wave, UndampedEnergyIsConserved) {
  const Environment env = build_environment({2, 2, 0.05, {}});
  const double dt = 0.25 * cfl_max_dt(1.0, 0.05);
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.0, dt);
  for (const CellIndex c : env.free_cells()) {
    const Vec2 p = env.cell_center(c) - Vec2{1, 1};
    f.values[c] = 1.0 - 0.3 * std::exp(-norm2(p) / 0.05);
  }
  f.prev_values = f.values;
  step_wave(f, env, dt);
  const double e0 = wp_test::wave_energy(f, env);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    step_wave(f, env, dt);
    worst = std::max(worst, std::abs(wp_test::wave_energy(f, env) - e0) / e0);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(TimeDerivative, Basics) {
  const Environment env = build_environment({1, 1, 0.1, {Rect{{0.4, 0.4}, {0.6, 0.6}}}});
  auto f = warm_start(make_field(env, params(), {}), FieldKind::Wave, 1.0, 0.0, 0.02);
  auto d = time_derivative(f, env);
  for (const double v : d.data()) EXPECT_EQ(v, 0.0);
  f.values(2, 3) += 0.3;
  d = time_derivative(f, env);
  EXPECT_DOUBLE_EQ(d(2, 3), 0.3 / 0.02);
  f.values(5, 5) = 7.0;  // boundary cell, Dirichlet
  EXPECT_EQ(time_derivative(f, env)(5, 5), 0.0);
  auto fresh = make_field(env, params(FieldKind::Wave), {});
  EXPECT_THROW(time_derivative(fresh, env), Error);
}

TEST(ResetForTarget, MovesTheZeroClamp) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  const TargetFootprint t0{{0.45, 0.45}, 0.1};
  auto f = warm_start(solve_laplace(env, t0, params(), tight()), FieldKind::Diffusion, 1.0, 0.0, 0.002);
  const auto before = f.values;
  reset_for_target(f, env, t0);
  EXPECT_TRUE(f.values == before);

  const TargetFootprint t1{{0.55, 0.45}, 0.1};
  reset_for_target(f, env, t1);
  // Old footprint: (5,5),(4,5),(6,5),(5,4),(5,6); new one shifted by one cell.
  EXPECT_FALSE(f.is_clamped({4, 5}));
  EXPECT_EQ(f.values(4, 5), 0.0);
  EXPECT_TRUE(f.is_clamped({7, 5}));
  EXPECT_EQ(f.values(7, 5), 0.0);
  EXPECT_EQ(f.prev_values(7, 5), 0.0);
  step_diffusion(f, env, 0.002);
  EXPECT_GT(f.values(4, 5), 0.0);
}
