#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dunkl/asymptotics.hpp"

using namespace dunkl;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd polar(double th) { return v2(std::cos(th), std::sin(th)); }

Eigen::VectorXd one(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

KernelContext b2(double k = 1.0) { return KernelContext(build_root_system(Family::b2, {}, {k, k})); }

// Limit of F_id on Z2^1: 2^k Gamma(k + 1/2) / sqrt(pi) e^{-i k pi / 2}.
cd rank_one_limit(double k) {
  return std::pow(2.0, k) * std::tgamma(k + 0.5) / std::sqrt(std::numbers::pi) * std::polar(1.0, -k * std::numbers::pi / 2);
}

} // namespace

TEST(FNormalized, TrivialMultiplicityIsOne) {
  const auto ctx = b2(0.0);
  const auto f = f_normalized(ctx, v2(2, 0.5), v2(0.3, 0.1));
  for (std::size_t g = 0; g < f.size(); ++g) EXPECT_LT(std::abs(f[g] - 1.0), 1e-12);
}

TEST(FNormalized, RankOneModulus) {
  const double k = 0.5;
  const KernelContext ctx(build_root_system(Family::z2n, {.n = 1}, {k}));
  for (double s : {0.5, 8.0, 60.0}) {
    const auto f = f_normalized(ctx, one(s), one(1.0));
    EXPECT_NEAR(std::abs(f[0]), std::abs(e1_bessel_imaginary(s, k)) * std::pow(s, k), 1e-9);
  }
}

TEST(FNormalized, DependsOnlyOnTheProductScale) {
  const auto ctx = b2();
  const Eigen::VectorXd x = v2(1, 0.3), y = v2(0.8, 0.2);
  const auto a = f_normalized(ctx, x, y);
  const auto b = f_normalized(ctx, 4.0 * x, y / 4.0);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FNormalized, RelabelingTheSecondArgument) {
  // F_g(x, h y) = F_{g h}(x, y).
  const auto ctx = b2(0.7);
  const auto& grp = ctx.group();
  const Eigen::VectorXd x = v2(3, 1.2), y = v2(0.9, 0.4);
  const auto base = f_normalized(ctx, x, y);
  for (std::size_t h = 0; h < grp.size(); ++h) {
    const auto moved = f_normalized(ctx, x, grp.act(h, y));
    for (std::size_t g = 0; g < grp.size(); ++g) EXPECT_LT(std::abs(moved[g] - base[grp.multiply(g, h)]), 1e-10);
  }
}

TEST(OdeMatrix, VanishesForTrivialMultiplicity) {
  const auto ctx = b2(0.0);
  const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, v2(2, 1), polar(0.4), 0.3);
  EXPECT_EQ(ode_matrix_A(ctx, c, 5.0).norm(), 0.0);
}

TEST(OdeMatrix, SparsityPattern) {
  const auto ctx = b2();
  const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, v2(2, 1), polar(0.4), 0.3);
  const Eigen::MatrixXcd a = ode_matrix_A(ctx, c, 7.0);
  const auto& grp = ctx.group();
  for (std::size_t g = 0; g < grp.size(); ++g)
    for (std::size_t h = 0; h < grp.size(); ++h) {
      bool linked = false;
      for (std::size_t r = 0; r < ctx.roots().num_positive(); ++r) linked = linked || grp.reflect_left(r, g) == h;
      if (!linked) EXPECT_EQ(std::abs(a(g, h)), 0.0) << g << "," << h;
      else EXPECT_GT(std::abs(a(g, h)), 0.0);
    }
}

TEST(OdeMatrix, RankOneRay) {
  // F_id' = (k / t) e^{-2 i t} F_sigma along x = t, y = 1.
  const double k = 0.6;
  const KernelContext ctx(build_root_system(Family::z2n, {.n = 1}, {k}));
  const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, one(1), one(1), 0.5);
  const double t = 3.7;
  const Eigen::MatrixXcd a = ode_matrix_A(ctx, c, t);
  EXPECT_LT(std::abs(a(0, 1) - (k / t) * std::polar(1.0, -2.0 * t)), 1e-14);
  EXPECT_LT(std::abs(a(1, 0) - (k / t) * std::polar(1.0, 2.0 * t)), 1e-14);
}

TEST(OdeMatrix, MatchesFiniteDifferencesOfF) {
  const auto ctx = b2();
  const auto& rs = ctx.roots();
  const std::vector<AdmissibleCurvePair> curves = {
      make_curve_pair(rs, CurveKind::ray, v2(2, 1), polar(0.4), 0.3),
      make_curve_pair(rs, CurveKind::rotating_ray, polar(0.35), polar(0.52), 0.3, 2.0, 10.0)};
  for (const auto& c : curves) {
    for (double t : {10.5, 23.0, 57.0}) {
      const double h = 1e-4;
      auto F = [&](double s) { return f_normalized(ctx, c.kappa1(s), c.kappa2(s)).values; };
      const Eigen::VectorXcd fd = (F(t + h) - F(t - h)) / (2 * h);
      const Eigen::VectorXcd af = ode_matrix_A(ctx, c, t) * F(t);
      EXPECT_LT((fd - af).cwiseAbs().maxCoeff(), 1e-5 * af.cwiseAbs().maxCoeff()) << to_string(c.kind) << " t=" << t;
    }
  }
}

TEST(IntegrateF, EndpointMatchesDirectEvaluation) {
  const KernelContext z1(build_root_system(Family::z2n, {.n = 1}, {0.5}));
  const auto c1 = make_curve_pair(z1.roots(), CurveKind::ray, one(1), one(1), 0.5);
  const auto ctx = b2();
  const auto c2 = make_curve_pair(ctx.roots(), CurveKind::ray, v2(2, 1), polar(0.4), 0.3);
  for (const auto& [k, c] : {std::pair{&z1, &c1}, std::pair{&ctx, &c2}}) {
    const auto r = integrate_F(*k, *c, 1.0, 1e3, OdeOptions{1e-10, 1e-300});
    const auto direct = f_normalized(*k, c->kappa1(1e3), c->kappa2(1e3));
    EXPECT_LT((r.F.values - direct.values).cwiseAbs().maxCoeff(), 1e-4 * direct.values.cwiseAbs().maxCoeff());
  }
}

TEST(IntegrateF, Reversible) {
  const auto ctx = b2();
  const auto c = make_curve_pair(ctx.roots(), CurveKind::rotating_ray, polar(0.35), polar(0.52), 0.3, 2.0, 10.0);
  const OdeOptions o{1e-11, 1e-300};
  const auto fwd = integrate_F(ctx, c, 10.0, 300.0, o);
  const auto back = integrate_F(ctx, c, 300.0, 10.0, fwd.F, o);
  const auto start = f_normalized(ctx, c.kappa1(10.0), c.kappa2(10.0));
  EXPECT_LT((back.F.values - start.values).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(IntegrateF, TrivialMultiplicityKeepsFConstant) {
  const auto ctx = b2(0.0);
  const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, v2(2, 1), polar(0.4), 0.3);
  const auto r = integrate_F(ctx, c, 1.0, 500.0);
  EXPECT_LT((r.F.values.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT((r.integral.values.array() - 499.0).abs().maxCoeff(), 1e-9);
}

TEST(EstimateV, TrivialMultiplicityGivesOnesExactly) {
  const auto ctx = b2(0.0);
  const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, v2(2, 1), polar(0.4), 0.3);
  const auto e = estimate_v(ctx, c);
  EXPECT_TRUE(e.converged);
  for (std::size_t g = 0; g < e.v.size(); ++g) EXPECT_EQ(e.v[g], cd(1.0, 0.0));
}

TEST(EstimateV, RankOneClosedForm) {
  for (double k : {0.5, 1.0}) {
    const KernelContext ctx(build_root_system(Family::z2n, {.n = 1}, {k}));
    const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, one(1), one(1), 0.5);
    const auto e = estimate_v(ctx, c);
    ASSERT_TRUE(e.converged) << k;
    EXPECT_LT(std::abs(e.v[0] - rank_one_limit(k)), 1e-2) << k;
    EXPECT_LT(std::abs(e.v[1] - std::conj(rank_one_limit(k))), 1e-2) << k;
  }
}

TEST(EstimateV, Z2SquaredFactorizes) {
  const KernelContext ctx(build_root_system(Family::z2n, {.n = 2}, {0.5, 1.0}));
  const auto c = make_curve_pair(ctx.roots(), CurveKind::ray, v2(1, 1), v2(1, 2), 0.3);
  const auto e = estimate_v(ctx, c);
  ASSERT_TRUE(e.converged);
  const cd expected = rank_one_limit(0.5) * rank_one_limit(1.0);
  EXPECT_LT(std::abs(e.v[ReflectionGroup::identity()] - expected), 2e-2);
}

TEST(EstimateV, B2AgreesAcrossCurvePairs) {
  const auto ctx = b2();
  const auto& rs = ctx.roots();
  const auto ray = make_curve_pair(rs, CurveKind::ray, v2(2, 1), polar(0.4), 0.3);
  const auto rot = make_curve_pair(rs, CurveKind::rotating_ray, polar(0.35), polar(0.52), 0.3, 2.0, 10.0);
  const auto e = estimate_v_many(ctx, {ray, rot});
  ASSERT_TRUE(e[0].converged && e[1].converged);
  EXPECT_LT((e[0].v.values - e[1].v.values).cwiseAbs().maxCoeff(), 2e-2);
  EXPECT_GT(e[0].v.values.norm(), 0.0);
  EXPECT_GE(e[0].table.size(), 4u);
}

TEST(Curves, Errors) {
  const auto ctx = b2();
  const auto& rs = ctx.roots();
  EXPECT_THROW(make_curve_pair(rs, CurveKind::ray, v2(1, 0), polar(0.4), 0.3), DomainError);
  EXPECT_THROW(make_curve_pair(rs, CurveKind::rotating_ray, polar(0.35), polar(0.52), 0.3, 2.0, 1.0), DomainError);
  const auto z1 = build_root_system(Family::z2n, {.n = 1}, {1.0});
  EXPECT_THROW(make_curve_pair(z1, CurveKind::rotating_ray, one(1), one(1), 0.3, 1.0), DomainError);
  EXPECT_THROW(parse_curve_kind("spiral"), DomainError);
}

TEST(Curves, RotatingRayDerivatives) {
  const auto c = make_curve_pair(build_root_system(Family::b2, {}, {1.0, 1.0}), CurveKind::rotating_ray, polar(0.35), polar(0.52), 0.3, 2.0, 10.0);
  for (double t : {12.0, 40.0}) {
    const double h = 1e-5 * t;
    EXPECT_LT(((c.kappa1(t + h) - c.kappa1(t - h)) / (2 * h) - c.dkappa1(t)).norm(), 1e-8);
    EXPECT_LT(((c.kappa2(t + h) - c.kappa2(t - h)) / (2 * h) - c.dkappa2(t)).norm(), 1e-8);
  }
}
