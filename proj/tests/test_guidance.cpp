#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace wavepursuit;

namespace {

/// Field whose every cell (frame included) holds fn(cell center).
template <typename Fn>
PotentialField analytic_field(const Environment& env, Fn fn, FieldKind kind = FieldKind::Laplace) {
  FieldParams p;
  p.kind = kind;
  PotentialField f = make_field(env, p, {});
  for (int j = 0; j < f.values.ny(); ++j)
    for (int i = 0; i < f.values.nx(); ++i) f.values(i, j) = fn(env.cell_center({i, j}));
  f.prev_values = f.values;
  f.has_prev = true;
  f.dt = 0.1;
  return f;
}

}  // namespace

TEST(Sampling, CellCenterAndMidpoint) {
  const Environment env = build_environment({1, 1, 0.1, {}});
  auto f = analytic_field(env, [](Vec2) { return 0.0; });
  f.values(4, 4) = 0.7;
  EXPECT_DOUBLE_EQ(sample_potential(f, env, env.cell_center({4, 4})), 0.7);
  f.values(5, 4) = 1.0;
  f.values(4, 4) = 0.0;
  EXPECT_DOUBLE_EQ(sample_potential(f, env, {0.4, 0.35}), 0.5);
}

TEST(Sampling, LinearFieldIsReproduced) {
  const Environment env = build_environment({2, 2, 0.1, {}});
  const double a = 0.37, b = -1.3;
  const auto f = analytic_field(env, [&](Vec2 p) { return a * p.x + b * p.y; });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 2000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    EXPECT_NEAR(sample_potential(f, env, p), a * p.x + b * p.y, 1e-12);
    const Vec2 g = sample_gradient(f, env, p);
    EXPECT_NEAR(g.x, a, 1e-10);
    EXPECT_NEAR(g.y, b, 1e-10);
  }
}

TEST(Sampling, ConstantAndQuadratic) {
  const Environment env = build_environment({2, 2, 0.02, {}});
  const auto c = analytic_field(env, [](Vec2) { return 0.8; });
  EXPECT_EQ(sample_gradient(c, env, {0.73, 1.21}), (Vec2{0, 0}));
  const auto q = analytic_field(env, [](Vec2 p) { return p.x * p.x; });
  for (const double x : {0.31, 0.77, 1.5}) {
    const double cx = (std::ceil(x / 0.02) - 0.5) * 0.02;  // cell center: central difference exact for x^2
    EXPECT_NEAR(sample_gradient(q, env, {cx, 1.01}).x, 2 * cx, 1e-9);
    EXPECT_NEAR(sample_gradient(q, env, {x, 1.0}).x, 2 * x, 0.02 * 0.02);
  }
}

TEST(Sampling, RejectsObstaclePoints) {
  const Environment env = build_environment({1, 1, 0.1, {Rect{{0.4, 0.4}, {0.6, 0.6}}}});
  const auto f = analytic_field(env, [](Vec2) { return 1.0; });
  try {
    sample_potential(f, env, {0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QueryInObstacle);
  }
  EXPECT_THROW(sample_gradient(f, env, {0.5, 0.5}), Error);
}

TEST(Regularizer, EtaEndpoints) {
  const RegularizerParams p{0.1, 0.01};
  EXPECT_DOUBLE_EQ(eta(0.0, p), 0.01);
  EXPECT_NEAR(eta(0.1, p), 0.1, 1e-15);
  EXPECT_NEAR(eta(0.05, p), 0.0425, 1e-15);
  const double d = 1e-7;
  EXPECT_NEAR((eta(0.1, p) - eta(0.1 - d, p)) / d, 1.0, 1e-5);
  EXPECT_NEAR((eta(d, p) - eta(0.0, p)) / d, 0.0, 1e-5);
  try {
    eta(0.2, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
  EXPECT_THROW(eta(-1e-9, p), Error);
}

TEST(Regularizer, BetaBranches) {
  const RegularizerParams p{0.1, 0.01};
  EXPECT_EQ(beta(0.2, p), 0.2);
  EXPECT_EQ(beta(0.0, p), 0.01);
  const double d = 1e-7;
  EXPECT_NEAR((beta(0.1 + d, p) - beta(0.1, p)) / d, 1.0, 1e-6);
  EXPECT_NEAR((beta(0.1, p) - beta(0.1 - d, p)) / d, 1.0, 1e-5);
  double prev = beta(0.0, p);
  for (int k = 1; k <= 1000; ++k) {
    const double v = beta(0.3 * k / 1000.0, p);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, p.epsilon);
    prev = v;
  }
}

TEST(Guidance, StaticFieldIsPlainDescent) {
  const Environment env = build_environment({2, 2, 0.1, {}});
  const auto f = analytic_field(env, [](Vec2 p) { return 0.3 * p.x - 0.2 * p.y; }, FieldKind::Wave);
  const auto g = guidance_raw(f, env, {1.03, 0.77});
  EXPECT_NEAR(g.v.x, -0.3, 1e-12);
  EXPECT_NEAR(g.v.y, 0.2, 1e-12);
  EXPECT_EQ(g.dvdt, 0.0);
}

TEST(Guidance, TimeTermDoublesCommand) {
  const Environment env = build_environment({2, 2, 0.1, {}});
  auto f = analytic_field(env, [](Vec2 p) { return 0.3 * p.x + 0.4 * p.y; }, FieldKind::Wave);
  // dV/dt = |grad V|^2 = 0.25 everywhere.
  for (double& v : f.prev_values.data()) v -= 0.25 * f.dt;
  const auto g = guidance_raw(f, env, env.cell_center({10, 10}));
  EXPECT_NEAR(g.dvdt, 0.25, 1e-12);
  EXPECT_NEAR(g.v.x, -0.6, 1e-12);
  EXPECT_NEAR(g.v.y, -0.8, 1e-12);
}

TEST(Guidance, RawRejectsFlatGradient) {
  const Environment env = build_environment({2, 2, 0.1, {}});
  const auto f = analytic_field(env, [](Vec2) { return 0.5; }, FieldKind::Wave);
  try {
    guidance_raw(f, env, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularGradient);
  }
  const auto g = guidance_regularized(f, env, {1, 1}, {});
  EXPECT_EQ(g.v, (Vec2{0, 0}));
}

TEST(Guidance, RegularizedBranches) {
  const Environment env = build_environment({2, 2, 0.1, {}});
  const RegularizerParams p{0.1, 0.01};
  // |grad V|^2 = 2 rho: identical to the raw law.
  const double s = std::sqrt(0.2);
  auto f = analytic_field(env, [&](Vec2 q) { return s * q.x; }, FieldKind::Wave);
  for (double& v : f.prev_values.data()) v += 0.03 * f.dt;
  const Vec2 at = env.cell_center({8, 9});
  const auto raw = guidance_raw(f, env, at);
  const auto reg = guidance_regularized(f, env, at, p);
  EXPECT_EQ(raw.v, reg.v);

  // |grad V|^2 = rho / 2: second term scaled by 1 / eta(rho / 2).
  const double s2 = std::sqrt(0.05);
  auto h = analytic_field(env, [&](Vec2 q) { return s2 * q.x; }, FieldKind::Wave);
  for (double& v : h.prev_values.data()) v += 0.03 * h.dt;
  const auto r2 = guidance_regularized(h, env, at, p);
  const double dvdt = -0.03;
  EXPECT_NEAR(r2.v.x, -(s2 + s2 * dvdt / 0.0425), 1e-12);
  EXPECT_NEAR(guidance_raw(h, env, at).v.x, -(s2 + s2 * dvdt / 0.05), 1e-12);
}

TEST(Guidance, NormalizeCommand) {
  const Vec2 v = normalize_command({3, 4}, 1.0);
  EXPECT_DOUBLE_EQ(v.x, 0.6);
  EXPECT_DOUBLE_EQ(v.y, 0.8);
  EXPECT_EQ(normalize_command({0, 0}, 2.0), (Vec2{0, 0}));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000; ++k) EXPECT_NEAR(norm(normalize_command({n(rng), n(rng)}, 1.7)), 1.7, 1e-12);
}

TEST(Guidance, DescendsConvergedLaplace) {
  const Environment env = build_environment({4, 4, 0.1, {Rect{{1.5, 1.5}, {2.5, 2.5}}}});
  const auto f = solve_laplace(env, TargetFootprint{{0.75, 3.25}, 0.2}, FieldParams{}, SolverOptions{1e-10, 200000, 1.8});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  int probed = 0;
  double lipschitz = 0;
  while (probed < 2000) {
    const Vec2 p{u(rng), u(rng)};
    if (!env.is_free(env.cell_of(p))) continue;
    const Vec2 grad = sample_gradient(f, env, p);
    if (norm(grad) == 0.0) continue;
    const auto g = guidance_regularized(f, env, p, {});
    EXPECT_LT(dot(g.v, grad), 0.0);
    const Vec2 q = p + Vec2{1e-3, 0.5e-3};
    if (env.is_free(env.cell_of(q))) {
      lipschitz = std::max(lipschitz, norm(guidance_regularized(f, env, q, {}).v - g.v) / distance(p, q));
    }
    ++probed;
  }
  EXPECT_TRUE(std::isfinite(lipschitz));
  RecordProperty("lipschitz_estimate", std::to_string(lipschitz));
}
