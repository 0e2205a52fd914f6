#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace wavepursuit;

namespace {

GameTrace synthetic(std::size_t n, double dt, const std::function<void(std::size_t, TickRecord&)>& fill) {
  GameTrace t;
  for (std::size_t k = 0; k < n; ++k) {
    TickRecord r;
    r.t = k * dt;
    fill(k, r);
    t.records.push_back(r);
  }
  return t;
}

Grid<double> sampled(const Environment& env, const std::function<double(Vec2)>& fn) {
  Grid<double> g(env.cells().nx(), env.cells().ny(), 0.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) g(i, j) = fn(env.cell_center({i, j}));
  return g;
}

}  // namespace

TEST(Lyapunov, ExactDescentAgrees) {
  // V(t) = exp(-t), |grad V|^2 chosen so that dV/dt = -|grad V|^2 over each step.
  const double dt = 0.01;
  const auto t = synthetic(200, dt, [&](std::size_t k, TickRecord& r) {
    r.potential = std::exp(-r.t);
    r.grad_norm2 = (std::exp(-r.t) - std::exp(-(r.t + dt))) / dt;
    r.distance = 1.0;
    (void)k;
  });
  const auto rep = lyapunov_check(t);
  EXPECT_EQ(rep.outside, 199u);
  EXPECT_EQ(rep.decreasing, 199u);
  EXPECT_DOUBLE_EQ(rep.agreement_fraction(), 1.0);
  EXPECT_EQ(rep.positivity_violations, 0u);
  EXPECT_TRUE(std::isnan(rep.realized.back()));
}

TEST(Lyapunov, DetectsIncrease) {
  const auto t = synthetic(10, 0.1, [](std::size_t k, TickRecord& r) {
    r.potential = k == 5 ? 0.9 : 0.5 - 0.01 * double(k);
    r.grad_norm2 = 0.1;
    r.distance = 2.0;
  });
  const auto rep = lyapunov_check(t);
  EXPECT_EQ(rep.decrease_violations, 1u);
  EXPECT_GT(rep.max_violation, 0.0);
  EXPECT_LT(rep.decrease_fraction(), 1.0);
}

TEST(Lyapunov, InsideTargetBallIgnored) {
  const auto t = synthetic(10, 0.1, [](std::size_t, TickRecord& r) {
    r.potential = 0.0;
    r.distance = 0.1;
  });
  const auto rep = lyapunov_check(t);
  EXPECT_EQ(rep.outside, 0u);
  EXPECT_EQ(rep.positivity_violations, 0u);
}

TEST(Lyapunov, MissingSnapshots) {
  GameTrace one = synthetic(1, 0.1, [](std::size_t, TickRecord&) {});
  try {
    lyapunov_check(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingSnapshots);
  }
  auto t = synthetic(5, 0.1, [](std::size_t, TickRecord& r) { r.potential = 0.3; });
  t.records[2].potential = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(lyapunov_check(t), Error);
}

TEST(MaximumPrinciple, ConvergedLaplaceHasNoInteriorExtrema) {
  const Environment env = build_environment({5, 5, 0.1, {Rect{{1, 1}, {2, 3}}, Circle{{3.5, 3.5}, 0.7}}});
  const auto f = solve_laplace(env, TargetFootprint{{4.2, 1.0}, 0.2}, FieldParams{}, SolverOptions{1e-10, 200000, 1.8});
  EXPECT_TRUE(maximum_principle_check(f, env).empty());
  EXPECT_TRUE(maximum_principle_check(f, env, {.eight_neighbourhood = true}).empty());
}

TEST(MaximumPrinciple, FindsPlantedBump) {
  const Environment env = build_environment({5, 5, 0.1, {}});
  auto f = solve_laplace(env, TargetFootprint{{4.2, 1.0}, 0.2}, FieldParams{}, SolverOptions{1e-10, 200000, 1.8});
  f.values(20, 30) += 0.05;
  f.values(10, 10) -= 0.05;
  const auto ext = maximum_principle_check(f, env);
  ASSERT_EQ(ext.size(), 2u);
}

TEST(BoundaryBand, DirichletFieldRepelsEverywhere) {
  const Environment env = build_environment({5, 5, 0.05, {Rect{{1, 1}, {2, 3}}, Circle{{3.5, 3.5}, 0.7}}});
  const auto f = solve_laplace(env, TargetFootprint{{4.2, 1.0}, 0.1}, FieldParams{}, SolverOptions{1e-10, 400000, 1.9});
  const auto rep = probe_boundary_band(f, env, 2 * env.cell_size());
  EXPECT_GT(rep.probes, 100u);
  EXPECT_GE(rep.negative_fraction(), 0.99);
}

TEST(BoundaryBand, ClearanceNormalPointsAway) {
  const Environment env = build_environment({4, 4, 0.1, {Rect{{1, 1}, {2, 2}}}});
  const Vec2 n = clearance_normal(env, {0.7, 1.5});
  EXPECT_NEAR(n.x, -1.0, 1e-6);
  EXPECT_NEAR(n.y, 0.0, 1e-6);
  const Vec2 w = clearance_normal(env, {0.05, 3.0});
  EXPECT_NEAR(w.x, 1.0, 1e-6);
}

TEST(Avoidance, GameStaysClearOfObstacles) {
  Scenario s;
  s.environment = {10, 10, 0.2, {Rect{{4, 2}, {6, 8}}}};
  s.field.wave_speed = 1.0;
  s.field.damping = 2.0;
  s.pursuer.start = {1, 5};
  s.evader.start = {9, 5};
  s.game.duration = 30.0;
  BandRecorder band(2 * s.environment.cell_size);
  const auto trace = run_game(s, {.on_tick = std::ref(band)});
  const Environment env = build_environment(s.environment);
  const auto rep = avoidance_margin_check(trace, env, band.samples());
  EXPECT_EQ(rep.obstacle_positions, 0u);
  EXPECT_GT(rep.min_clearance_pursuer, 0.0);
  EXPECT_EQ(rep.dxn2_dt.size(), rep.band.size());
}

TEST(Morse, SaddleIsNondegenerate) {
  const Environment env = build_environment({4, 4, 0.1, {}});
  const Vec2 c{2.05, 2.05};
  const auto g = sampled(env, [&](Vec2 p) { return (p.x - c.x) * (p.x - c.x) - 0.5 * (p.y - c.y) * (p.y - c.y); });
  const auto rep = morse_check(g, env);
  ASSERT_EQ(rep.points.size(), 1u);
  EXPECT_TRUE(rep.points[0].saddle());
  EXPECT_NEAR(rep.points[0].position.x, c.x, 1e-12);
  EXPECT_NEAR(rep.points[0].lambda_max, 2.0, 1e-9);
  EXPECT_NEAR(rep.points[0].lambda_min, -1.0, 1e-9);
  EXPECT_TRUE(rep.nonsingular);
}

TEST(Morse, RotatedQuadraticUsesMixedPartial) {
  const Environment env = build_environment({4, 4, 0.1, {}});
  const Vec2 c{2.05, 1.95};
  const auto g = sampled(env, [&](Vec2 p) { return (p.x - c.x) * (p.y - c.y); });
  const auto rep = morse_check(g, env);
  ASSERT_EQ(rep.points.size(), 1u);
  EXPECT_NEAR(rep.points[0].hxy, 1.0, 1e-9);
  EXPECT_NEAR(rep.points[0].lambda_min, -1.0, 1e-9);
}

TEST(Morse, FlatValleyIsDegenerate) {
  const Environment env = build_environment({4, 4, 0.1, {}});
  const auto g = sampled(env, [](Vec2 p) { return (p.y - 2.05) * (p.y - 2.05); });
  const auto rep = morse_check(g, env);
  ASSERT_EQ(rep.points.size(), 1u);  // one connected valley
  EXPECT_FALSE(rep.nonsingular);
}

TEST(Morse, SingleTargetLaplaceHasNoInteriorCriticalPoint) {
  const Environment env = build_environment({4, 4, 0.1, {}});
  const auto f = solve_laplace(env, TargetFootprint{{2.05, 2.05}, 0.0}, FieldParams{}, SolverOptions{1e-12, 400000, 1.9});
  const auto rep = morse_check(f, env);
  // The clamp cell itself is the minimum; nothing else qualifies.
  for (const auto& p : rep.points) EXPECT_LE(distance(p.position, {2.05, 2.05}), 0.15);
  EXPECT_TRUE(rep.nonsingular);
}

TEST(Curvature, TurnsLineUpWithClosure) {
  // Evader zigzags; distance drops right after each turn.
  const auto t = synthetic(120, 0.1, [](std::size_t k, TickRecord& r) {
    const std::size_t leg = k / 20, in = k % 20;
    const double y = leg % 2 == 0 ? double(in) : 20.0 - double(in);
    r.evader = {0.1 * double(k), 0.05 * y};
    r.distance = 5.0 - 0.01 * double(k) - (in < 4 && leg > 0 ? 0.2 * double(in + 1) : 0.0);
  });
  const auto rep = curvature_closure_correlation(t);
  EXPECT_EQ(rep.peaks.size(), 5u);
  EXPECT_DOUBLE_EQ(rep.fraction(), 1.0);
  EXPECT_DOUBLE_EQ(*std::max_element(rep.curvature.begin(), rep.curvature.end()), 1.0);
}

TEST(Curvature, StraightPathHasNoPeaks) {
  const auto t = synthetic(50, 0.1, [](std::size_t k, TickRecord& r) {
    r.evader = {0.1 * double(k), 1.0};
    r.distance = 3.0;
  });
  const auto rep = curvature_closure_correlation(t);
  EXPECT_TRUE(rep.peaks.empty());
  EXPECT_EQ(rep.fraction(), 0.0);
}

TEST(Curvature, StationaryEvaderIsTooShort) {
  const auto t = synthetic(50, 0.1, [](std::size_t, TickRecord& r) { r.evader = {1, 1}; });
  try {
    curvature_closure_correlation(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TraceTooShort);
  }
}

TEST(Report, KeyValueLines) {
  ReportWriter w;
  w.section("s").add("n", std::size_t{3}).add("x", 0.5).add("ok", true).add_array("v", std::vector<int>{1, 2});
  EXPECT_EQ(w.str(), "[s]\nn = 3\nx = 0.5\nok = true\nv = [1 2]\n");
}
