#include <gtest/gtest.h>

#include <cmath>

#include "oracle/shooting.hpp"
#include "robin/closed_form.hpp"
#include "robin/problems.hpp"

using namespace robin;

namespace {

double upper_bound(double p, double alpha) { return (1 - p) * std::pow(alpha, p / (p - 1)); }

}  // namespace

TEST(Minimize, TruncatedHalfLineModel) {
  ProblemSpec s;
  s.grid = graded_grid(0.0, 10.0, true, false, 5.0, 2000);
  s.weight = [](double) { return 1.0; };
  s.p = 2.0;
  s.alpha = 1.0;
  s.left = Endpoint::robin(1.0);
  s.right = Endpoint::natural();
  const auto ev = assemble(s);
  const auto init = default_initializer(s);
  const auto sol = minimize(ev, SolverConfig{}, init);
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.eigenvalue, -1.0, 1e-3);
  EXPECT_LE(sol.eigenvalue, ev.quotient(init));
  EXPECT_NEAR(ev.mass(sol.u), 1.0, 1e-12);
  EXPECT_NEAR(ev.quotient(sol.u), sol.eigenvalue, 1e-10 * std::abs(sol.eigenvalue));
  for (double x : sol.u) EXPECT_GE(x, 0.0);
  // Full Newton steps within rounding of the quotient are accepted.
  for (std::size_t k = 1; k < sol.history.size(); ++k)
    EXPECT_LE(sol.history[k], sol.history[k - 1] + 1e-13 * std::abs(sol.history[k - 1]));
}

TEST(Minimize, ZeroAlphaGivesConstant) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (const Domain& d : {Domain{Interval{2.0}}, Domain{Ball{1.0, 3}}, Domain{Shell{0.5, 1.0, 2}}}) {
      const auto sol = solve_domain(d, p, 0.0, SolverConfig{});
      EXPECT_TRUE(sol.converged);
      EXPECT_EQ(sol.estimate(), 0.0);
      for (double x : sol.u) EXPECT_NEAR(x, sol.u.front(), 1e-14);
    }
  }
  const auto half = solve_domain(HalfLine{}, 2.0, 0.0, SolverConfig{});
  EXPECT_EQ(half.estimate(), 0.0);
}

TEST(Minimize, RejectsZeroInitializer) {
  const auto spec = make_problem(Interval{1.0}, 2.0, 1.0, SolverConfig{});
  const auto ev = assemble(spec);
  EXPECT_THROW(minimize(ev, SolverConfig{}, std::vector<double>(ev.size(), 0.0)), std::invalid_argument);
  EXPECT_THROW(minimize(ev, SolverConfig{}, std::vector<double>(3, 1.0)), std::invalid_argument);
}

TEST(Minimize, IterationCapReportsNonConvergence) {
  SolverConfig cfg;
  cfg.max_iterations = 1;
  cfg.richardson = false;
  const auto spec = make_problem(Ball{1.0, 2}, 1.5, 50.0, cfg);
  const auto ev = assemble(spec);
  std::vector<double> init(ev.size(), 1.0);
  const auto sol = minimize(ev, cfg, init);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_LE(sol.eigenvalue, ev.quotient(init) * (1.0 - 1e-14));
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.shrink = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.quotient_tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Problems, ExponentGuard) {
  EXPECT_THROW(solve_domain(Ball{1.0, 2}, 1.01, 1.0, SolverConfig{}), std::invalid_argument);
  EXPECT_THROW(solve_domain(Ball{1.0, 2}, 20.0, 1.0, SolverConfig{}), std::invalid_argument);
  EXPECT_NO_THROW(solve_domain(Interval{1.0}, 1.02, 1.0, SolverConfig{}));
}

TEST(Problems, SectorHasNoMesh) {
  EXPECT_THROW(make_problem(Sector{1.0}, 2.0, 1.0, SolverConfig{}), std::invalid_argument);
}

TEST(Problems, LayoutsCarrySurfaceFactors) {
  const auto ball = make_problem(Ball{2.0, 3}, 2.0, 1.0, SolverConfig{});
  EXPECT_EQ(ball.left.kind, EndpointKind::Natural);
  EXPECT_EQ(ball.right.kind, EndpointKind::Robin);
  EXPECT_DOUBLE_EQ(ball.right.sigma, 4.0);
  const auto shell = make_problem(Shell{0.5, 2.0, 3}, 2.0, 1.0, SolverConfig{});
  EXPECT_DOUBLE_EQ(shell.left.sigma, 0.25);
  EXPECT_DOUBLE_EQ(shell.right.sigma, 4.0);
  const auto half = make_problem(HalfLine{}, 3.0, 4.0, SolverConfig{});
  EXPECT_NEAR(half.grid.b(), 15.0, 1e-12);
  SolverConfig cap;
  cap.far = FarEndpoint::DirichletCap;
  EXPECT_EQ(make_problem(ModelLayer{{}, 1.0}, 2.0, 1.0, cap).right.kind, EndpointKind::Dirichlet);
}

TEST(Problems, GradedLayerHoldsHalfTheCells) {
  const double p = 3.0, alpha = 16.0;
  const auto spec = make_problem(HalfLine{}, p, alpha, SolverConfig{});
  const double width = 5.0 / layer_rate(p, alpha);
  std::size_t inside = 0;
  for (double t : spec.grid.nodes) inside += t <= width + 1e-12;
  EXPECT_GE(inside, spec.grid.nodes.size() / 2);
}

TEST(Problems, HalfLineMatchesClosedForm) {
  for (double p : {1.5, 2.0, 3.0})
    for (double alpha : {1.0, 4.0, 16.0}) {
      const auto sol = solve_domain(HalfLine{}, p, alpha, SolverConfig{});
      ASSERT_TRUE(sol.converged);
      const double exact = half_line_eigenvalue(p, alpha).value;
      EXPECT_NEAR(sol.estimate(), exact, 1e-6 * std::abs(exact)) << "p=" << p << " alpha=" << alpha;
    }
}

TEST(Problems, DiskMatchesShootingOracle) {
  const auto sol = radial_eigenvalue(Ball{1.0, 2}, 2.0, 2.0, SolverConfig{});
  const double oracle = oracle::ball_eigenvalue(1.0, 2, 2.0);
  EXPECT_NEAR(sol.estimate(), oracle, 1e-4 * std::abs(oracle));
}

TEST(Problems, ThreeBallMatchesClosedProfile) {
  // u = sinh(k r) / r gives k coth(2k) - 1/2 = alpha on the ball of radius 2.
  const double alpha = 4.0;
  const auto sol = radial_eigenvalue(Ball{2.0, 3}, 2.0, alpha, SolverConfig{});
  const double oracle = oracle::ball_eigenvalue(2.0, 3, alpha);
  const double k = std::sqrt(-oracle);
  EXPECT_NEAR(k / std::tanh(2 * k) - 0.5, alpha, 1e-9);
  EXPECT_NEAR(sol.estimate(), oracle, 1e-6 * std::abs(oracle));
}

TEST(Problems, RadialRejectsOtherDomains) {
  EXPECT_THROW(radial_eigenvalue(Interval{1.0}, 2.0, 1.0, SolverConfig{}), std::invalid_argument);
}

TEST(Properties, MonotoneInAlpha) {
  for (double p : {1.5, 2.0, 3.0}) {
    double previous = 0.0;
    for (double alpha : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double lambda = solve_domain(Shell{0.5, 1.0, 2}, p, alpha, SolverConfig{}).estimate();
      EXPECT_LT(lambda, previous) << "p=" << p << " alpha=" << alpha;
      previous = lambda;
    }
  }
}

TEST(Properties, UpperBoundByHalfLineValue) {
  const Domain domains[] = {Interval{1.0}, Ball{1.0, 2}, Shell{0.75, 1.25, 2},
                            ModelLayer{{1.0, 1.0}, 0.5}};
  for (const auto& d : domains)
    for (double p : {1.5, 2.0, 3.0})
      for (double alpha : {0.0, 1.0, 10.0}) {
        const auto sol = solve_domain(d, p, alpha, SolverConfig{});
        ASSERT_TRUE(sol.converged);
        EXPECT_LE(sol.estimate(), upper_bound(p, alpha) + 1e-6 * std::abs(sol.estimate()))
            << kind_name(d) << " p=" << p << " alpha=" << alpha;
      }
}

TEST(Properties, DirichletCapBracketsNeumann) {
  SolverConfig neumann, dirichlet;
  dirichlet.far = FarEndpoint::DirichletCap;
  for (double p : {1.5, 2.0, 3.0})
    for (double alpha : {0.5, 2.0}) {
      const double n = model_layer_eigenvalue(p, alpha, {0.5}, 1.0, neumann).estimate();
      const double d = model_layer_eigenvalue(p, alpha, {0.5}, 1.0, dirichlet).estimate();
      EXPECT_LT(n, d) << "p=" << p << " alpha=" << alpha;
    }
}

TEST(Properties, GridRefinementIsStable) {
  SolverConfig cfg;
  cfg.richardson = false;
  const Domain domains[] = {HalfLine{}, Ball{1.0, 2}, Shell{0.75, 1.25, 2}, ModelLayer{{1.0, 1.0}, 0.5}};
  for (const auto& d : domains)
    for (double p : {1.5, 2.0, 3.0}) {
      const auto spec = make_problem(d, p, 20.0, cfg);
      auto fine = spec;
      fine.grid = refined(spec.grid);
      const double coarse = solve_problem(spec, cfg).eigenvalue;
      const double refined_value = solve_problem(fine, cfg).eigenvalue;
      EXPECT_NEAR(coarse, refined_value, 1e-5 * std::abs(refined_value)) << kind_name(d) << " p=" << p;
    }
}

TEST(Properties, ScalingIdentity) {
  for (double p : {1.5, 2.0, 3.0})
    for (double mu : {0.5, 2.0}) {
      const double alpha = 5.0;
      const double big = radial_eigenvalue(Ball{mu, 2}, p, alpha, SolverConfig{}).estimate();
      const double unit =
          radial_eigenvalue(Ball{1.0, 2}, p, std::pow(mu, p - 1) * alpha, SolverConfig{}).estimate();
      EXPECT_NEAR(big, std::pow(mu, -p) * unit, 1e-6 * std::abs(big)) << "p=" << p << " mu=" << mu;
    }
}

TEST(ModelLayer, FlatWeightIsHalfLine) {
  const auto sol = model_layer_eigenvalue(2.0, 4.0, {}, 10.0, SolverConfig{});
  EXPECT_NEAR(sol.estimate(), -16.0, 1e-3 * 16.0);
}

TEST(ModelLayer, LinearTermIsCurvatureSum) {
  double previous = 1e300;
  for (double alpha : {25.0, 50.0, 100.0}) {
    const double lambda = model_layer_eigenvalue(2.0, alpha, {1.0, 1.0}, 0.5, SolverConfig{}).estimate();
    const double ratio = std::abs((lambda + alpha * alpha + 2 * alpha) / alpha);
    EXPECT_LT(ratio, previous);
    previous = ratio;
  }
  EXPECT_LE(previous, 0.15);
}

TEST(ModelLayer, RequiresPositiveAlpha) {
  EXPECT_THROW(model_layer_eigenvalue(2.0, 0.0, {}, 1.0, SolverConfig{}), std::invalid_argument);
}

TEST(Uniqueness, PerturbedInitializersAgree) {
  SolverConfig cfg;
  cfg.cells = 400;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto spec = make_problem(Shell{0.75, 1.25, 2}, p, 2.0, cfg);
    const auto check = perturbation_check(spec, cfg, 42);
    EXPECT_TRUE(check.consistent) << "p=" << p << " spread=" << check.max_deviation;
  }
}

TEST(Uniqueness, DecoupledLayersAreFlagged) {
  // Layers 50/beta apart: a start tilted towards the inner circle settles
  // there, above the outer-layer value.
  SolverConfig cfg;
  cfg.cells = 400;
  const auto spec = make_problem(Shell{0.75, 1.25, 2}, 1.5, 10.0, cfg);
  const auto check = perturbation_check(spec, cfg, 42);
  EXPECT_FALSE(check.consistent);
  EXPECT_GT(check.max_deviation, 0.01 * std::abs(check.reference));
}

TEST(Richardson, ExtrapolationImprovesOnRawValue) {
  SolverConfig raw;
  raw.richardson = false;
  const double exact = half_line_eigenvalue(3.0, 4.0).value;
  const auto plain = solve_domain(HalfLine{}, 3.0, 4.0, raw);
  const auto extra = solve_domain(HalfLine{}, 3.0, 4.0, SolverConfig{});
  ASSERT_TRUE(extra.extrapolated.has_value());
  EXPECT_FALSE(plain.extrapolated.has_value());
  EXPECT_LT(std::abs(extra.estimate() - exact), std::abs(plain.estimate() - exact));
  EXPECT_EQ(extra.u.size(), 2 * plain.u.size() - 1);
}

TEST(WarmStart, ReproducesColdValue) {
  const auto cold = solve_domain(Ball{1.0, 2}, 3.0, 40.0, SolverConfig{});
  const auto prev = solve_domain(Ball{1.0, 2}, 3.0, 20.0, SolverConfig{});
  const auto warm = solve_domain(Ball{1.0, 2}, 3.0, 40.0, SolverConfig{}, &prev);
  EXPECT_NEAR(warm.estimate(), cold.estimate(), 1e-9 * std::abs(cold.estimate()));
}
