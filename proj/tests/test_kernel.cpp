#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "dunkl/kernel.hpp"
#include "dunkl/rank_one.hpp"
#include "dunkl/sampling.hpp"

using namespace dunkl;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

struct Frozen {
  Eigen::VectorXd gy;
  cd value;
};

// Index of the group element with g y = target.
std::size_t element_mapping(const ReflectionGroup& grp, const Eigen::VectorXd& y, const Eigen::VectorXd& target) {
  for (std::size_t g = 0; g < grp.size(); ++g)
    if ((grp.act(g, y) - target).norm() < 1e-12) return g;
  ADD_FAILURE() << "no element maps y to the target";
  return 0;
}

void expect_frozen(const KernelContext& ctx, const Eigen::VectorXd& y, const OrbitVector& got,
                   const std::vector<Frozen>& table, double tol) {
  for (const auto& f : table) {
    const std::size_t g = element_mapping(ctx.group(), y, f.gy);
    EXPECT_LT(rel(got[g], f.value), tol) << "g y = " << f.gy.transpose();
  }
}

KernelContext b2_ctx() { return KernelContext(build_root_system(Family::b2, {}, {1.0, 1.0})); }

} // namespace

TEST(Coupling, VanishesForTrivialMultiplicity) {
  const auto rs = build_root_system(Family::b2, {}, {0.0, 0.0});
  EXPECT_EQ(coupling_operator(rs, generate_group(rs)).norm(), 0.0);
}

TEST(Coupling, RankOneMatrix) {
  const auto rs = build_root_system(Family::z2n, {.n = 1}, {0.7});
  Eigen::MatrixXd expected(2, 2);
  expected << 0.7, -0.7, -0.7, 0.7;
  EXPECT_TRUE(coupling_operator(rs, generate_group(rs)).isApprox(expected));
}

TEST(Coupling, SymmetricPositiveSemidefiniteAndKillsConstants) {
  for (const auto& rs : {build_root_system(Family::b2, {}, {1.0, 0.4}), build_root_system(Family::a2, {}, {0.5}),
                         build_root_system(Family::i2m, {.m = 6}, {0.2, 1.3})}) {
    const KernelContext ctx(rs);
    const Eigen::MatrixXd& l = ctx.coupling();
    EXPECT_LT((l - l.transpose()).norm(), 1e-14);
    EXPECT_LT((l * Eigen::VectorXd::Ones(l.rows())).norm(), 1e-13);
    EXPECT_GT(ctx.coupling_spectrum().minCoeff(), -1e-12);
  }
}

TEST(SeriesCoefficients, TrivialMultiplicityGivesExponentialTaylorCoefficients) {
  const KernelContext ctx(build_root_system(Family::b2, {}, {0.0, 0.0}));
  const Eigen::VectorXd x = v2(0.4, -1.1), y = v2(0.9, 0.3);
  const auto c = series_coefficients(ctx, x, y.cast<cd>(), 12);
  const Eigen::VectorXcd omega = ctx.pairings(x, y.cast<cd>());
  double fact = 1.0;
  for (int m = 0; m <= 12; ++m) {
    if (m > 0) fact *= m;
    for (std::size_t g = 0; g < ctx.order(); ++g)
      EXPECT_NEAR(std::abs(c[m][g] - std::pow(omega[static_cast<Eigen::Index>(g)], m) / fact), 0.0, 1e-14);
  }
}

TEST(SeriesCoefficients, RankOneMatchesTheClosedForm) {
  const double k = 0.65;
  const KernelContext ctx(build_root_system(Family::z2n, {.n = 1}, {k}));
  Eigen::VectorXd x(1), y(1);
  x << 1.3;
  y << -0.7;
  const auto c = series_coefficients(ctx, x, y.cast<cd>(), 20);
  const Rank1Kernel e(k);
  for (int m = 0; m <= 20; ++m)
    EXPECT_NEAR(c[m][0].real(), e.coefficient(m) * std::pow(x[0] * y[0], m), 1e-15 * std::max(1.0, std::abs(c[m][0])));
}

TEST(EvalOrbit, TrivialMultiplicityIsExponential) {
  for (const auto& rs : {build_root_system(Family::z2n, {.n = 2}, {0.0, 0.0}), build_root_system(Family::b2, {}, {0, 0}),
                         build_root_system(Family::a2, {}, {0.0})}) {
    const KernelContext ctx(rs);
    for (double t : {0.5, 7.0, 45.0, 200.0}) {
      const Eigen::VectorXd x = v2(0.6, 0.8), y = v2(-0.3, 0.95);
      const auto ev = eval_orbit(ctx, x, y, t);
      const double mu = pairing_plus(rs, ctx.group(), x, y);
      for (std::size_t g = 0; g < ctx.order(); ++g) {
        // Components far below e^{t mu} carry an absolute error on that scale.
        const double w = t * x.dot(ctx.group().act(g, y));
        EXPECT_LT(std::abs(ev.scaled_values[g] - std::exp(w - t * mu)), 1e-12) << rs.label() << " t=" << t;
      }
    }
  }
}

TEST(EvalOrbit, ZeroArgumentsGiveOne) {
  const auto ctx = b2_ctx();
  const auto ev = eval_orbit(ctx, v2(0, 0), v2(1, 2), 3.0);
  for (std::size_t g = 0; g < ctx.order(); ++g) EXPECT_EQ(ev.result[g], cd(1.0, 0.0));
  const auto ev0 = eval_orbit(ctx, v2(1, 2), v2(1, 2), 0.0);
  EXPECT_EQ(ev0.result[3], cd(1.0, 0.0));
}

TEST(EvalOrbit, ProductStructureOnZ2n) {
  for (int n : {2, 3}) {
    std::vector<double> ks = {0.4, 1.1, 2.0};
    ks.resize(static_cast<std::size_t>(n));
    const KernelContext ctx(build_root_system(Family::z2n, {.n = n}, ks));
    for (std::uint64_t i = 0; i < 30; ++i) {
      SampleRng rng(9, i);
      const Eigen::VectorXd x = rng.unit_vector(n) * rng.uniform(0.5, 4.0);
      const Eigen::VectorXd y = rng.unit_vector(n) * rng.uniform(0.5, 4.0);
      const auto ev = eval_orbit(ctx, x, y, 1.0);
      for (std::size_t g = 0; g < ctx.order(); ++g) {
        const Eigen::VectorXd gy = ctx.group().act(g, y);
        cd expected = 1.0;
        for (int j = 0; j < n; ++j) expected *= e1_series(x[j] * gy[j], ks[static_cast<std::size_t>(j)]);
        EXPECT_LT(rel(ev.result[g], expected), 1e-10);
      }
    }
  }
}

TEST(EvalOrbit, B2FrozenValuesSeriesRegime) {
  const auto ctx = b2_ctx();
  const Eigen::VectorXd x = v2(1, 0.3), y = v2(0.8, 0.2);
  const auto ev = eval_orbit(ctx, x, y, 2.0);
  EXPECT_FALSE(ev.used_ode);
  expect_frozen(ctx, y, ev.result,
                {{v2(0.8, 0.2), 1.6085397559786141909},
                 {v2(0.2, 0.8), 1.323795009607196135},
                 {v2(0.8, -0.2), 1.5181925617934072469},
                 {v2(-0.8, 0.2), 0.84959186419794112407},
                 {v2(-0.2, -0.8), 0.93913035112270648378},
                 {v2(0.2, -0.8), 1.0865637610148627993},
                 {v2(-0.2, 0.8), 1.1209106103079510768},
                 {v2(-0.8, -0.2), 0.81758580575127151009}},
                1e-12);
}

TEST(EvalOrbit, B2FrozenValuesOdeRegime) {
  const auto ctx = b2_ctx();
  const Eigen::VectorXd x = v2(1, 0.3), y = v2(0.8, 0.2);
  const auto ev = eval_orbit(ctx, x, y, 60.0);
  EXPECT_TRUE(ev.used_ode);
  expect_frozen(ctx, y, ev.result,
                {{v2(0.8, 0.2), 732880561916264443.72},
                 {v2(0.2, 0.8), 30406842021645164.419},
                 {v2(0.8, -0.2), 117614175148618547.0},
                 {v2(-0.8, 0.2), 7785945492230197.2065},
                 {v2(-0.2, -0.8), 9601618284084928.9022},
                 {v2(0.2, -0.8), 3175258701139486.5962},
                 {v2(-0.2, 0.8), 3497781682813394.1383},
                 {v2(-0.8, -0.2), 1632716362793568.6498}},
                1e-9);
}

TEST(EvalOrbit, B2FrozenImaginaryValues) {
  const auto ctx = b2_ctx();
  const Eigen::VectorXd x = v2(1, 0.3), y = v2(0.8, 0.2);
  const auto got = eval_imaginary(ctx, x, y, 60.0);
  expect_frozen(ctx, y, got,
                {{v2(0.8, 0.2), {4.3040664245284572511e-6, 3.0604574746757412969e-5}},
                 {v2(0.2, 0.8), {-7.2958165865723839416e-6, -3.6431184871870277205e-5}},
                 {v2(0.8, -0.2), {-2.8573008374882634725e-5, -1.3849934293086421649e-5}},
                 {v2(-0.8, 0.2), {-2.8573008374882634725e-5, 1.3849934293086421649e-5}},
                 {v2(-0.2, -0.8), {-7.2958165865723839416e-6, 3.6431184871870277205e-5}},
                 {v2(0.2, -0.8), {-2.9069413404150490773e-5, -2.4259057678920670484e-5}},
                 {v2(-0.2, 0.8), {-2.9069413404150490773e-5, 2.4259057678920670484e-5}},
                 {v2(-0.8, -0.2), {4.3040664245284572511e-6, -3.0604574746757412969e-5}}},
                1e-8);
}

TEST(EvalOrbit, A2FrozenValues) {
  const KernelContext ctx(build_root_system(Family::a2, {}, {0.5}));
  const Eigen::VectorXd x = v2(0.3, 1.1), y = v2(-0.4, 0.9);
  const auto ev = eval_orbit(ctx, x, y, 3.0);
  expect_frozen(ctx, y, ev.result,
                {{v2(-0.4, 0.9), 4.9921112020760874481},
                 {v2(0.4, 0.9), 7.080670776507080224},
                 {v2(-0.97942286340599478209, -0.10358983848622454129), 1.1282505793067168953},
                 {v2(0.57942286340599478209, -0.79641016151377545871), 0.91387604028900301742},
                 {v2(-0.57942286340599478209, -0.79641016151377545871), 0.8178206836909799394},
                 {v2(0.97942286340599478209, -0.10358983848622454129), 2.0700866500684618327}},
                1e-12);
}

TEST(EvalOrbit, SymmetricInItsArguments) {
  const auto ctx = b2_ctx();
  for (std::uint64_t i = 0; i < 50; ++i) {
    SampleRng rng(4, i);
    const Eigen::VectorXd x = rng.unit_vector(2) * rng.uniform(0.2, 3.0);
    const Eigen::VectorXd y = rng.unit_vector(2) * rng.uniform(0.2, 3.0);
    const double t = rng.uniform(0.5, 8.0);
    EXPECT_LT(rel(eval_orbit(ctx, x, y, t).result[0], eval_orbit(ctx, y, x, t).result[0]), 1e-10);
  }
}

TEST(EvalOrbit, GroupInvariance) {
  const KernelContext ctx(build_root_system(Family::i2m, {.m = 4}, {0.6, 1.4}));
  const auto& grp = ctx.group();
  for (std::uint64_t i = 0; i < 20; ++i) {
    SampleRng rng(6, i);
    const Eigen::VectorXd x = rng.unit_vector(2) * 2.0;
    const Eigen::VectorXd y = rng.unit_vector(2) * 3.0;
    const auto base = eval_orbit(ctx, x, y, 1.0);
    for (std::size_t h = 0; h < grp.size(); ++h) {
      const auto moved = eval_orbit(ctx, grp.act(h, x), grp.act(h, y), 1.0);
      // E(h x, g h y) = E(x, h^-1 g h y).
      for (std::size_t g = 0; g < grp.size(); ++g)
        EXPECT_LT(rel(moved.result[g], base.result[grp.multiply(grp.inverse(h), grp.multiply(g, h))]), 1e-10);
    }
  }
}

TEST(EvalOrbit, SatisfiesTheDunklEigenEquationOnB2) {
  const KernelContext ctx(build_root_system(Family::b2, {}, {0.7, 1.3}));
  const auto& rs = ctx.roots();
  const Eigen::VectorXd y = v2(0.9, -0.4);
  auto f = [&](const Eigen::VectorXd& x) { return eval_orbit(ctx, x, y, 1.0).result[0]; };
  for (std::uint64_t i = 0; i < 10; ++i) {
    SampleRng rng(8, i);
    const Eigen::VectorXd x = rng.unit_vector(2) * rng.uniform(0.5, 3.0);
    const Eigen::VectorXd xi = rng.unit_vector(2);
    const double h = 1e-5;
    cd tf = (f(x + h * xi) - f(x - h * xi)) / (2 * h);
    for (std::size_t a = 0; a < rs.num_positive(); ++a) {
      const Eigen::VectorXd& al = rs.root(a);
      tf += rs.k(a) * al.dot(xi) * (f(x) - f(reflection(al) * x)) / al.dot(x);
    }
    EXPECT_LT(std::abs(tf - xi.dot(y) * f(x)), 1e-7 * std::abs(f(x)) * (1.0 + std::abs(xi.dot(y))));
  }
}

TEST(EvalOrbit, DerivativeMatchesFiniteDifferences) {
  const auto ctx = b2_ctx();
  for (std::uint64_t i = 0; i < 20; ++i) {
    SampleRng rng(12, i);
    const Eigen::VectorXd x = rng.unit_vector(2);
    const Eigen::VectorXcd y = (rng.unit_vector(2) * cd(rng.uniform(), rng.uniform())).eval();
    const double t = rng.uniform(0.5, 30.0);
    const double h = 1e-4 * t;
    const auto fp = eval_orbit(ctx, x, y, t + h).result.values;
    const auto fm = eval_orbit(ctx, x, y, t - h).result.values;
    const auto d = kernel_derivative(ctx, x, y, t, eval_orbit(ctx, x, y, t).result).values;
    const Eigen::VectorXcd fd = (fp - fm) / (2 * h);
    EXPECT_LT((fd - d).cwiseAbs().maxCoeff(), 1e-5 * d.cwiseAbs().maxCoeff());
  }
}

TEST(EvalOrbit, OdeAndSeriesAgreeWhereBothApply) {
  const auto ctx = b2_ctx();
  KernelOptions o;
  o.series_radius = 4.0;
  const auto ode_ctx = ctx.with_options(o);
  for (std::uint64_t i = 0; i < 20; ++i) {
    SampleRng rng(13, i);
    const Eigen::VectorXd x = rng.unit_vector(2), y = rng.unit_vector(2);
    const double t = rng.uniform(6.0, 30.0);
    const auto a = eval_orbit(ctx, x, y, t);
    const auto b = eval_orbit(ode_ctx, x, y, t);
    ASSERT_TRUE(b.used_ode);
    for (std::size_t g = 0; g < ctx.order(); ++g) EXPECT_LT(rel(b.result[g], a.result[g]), 1e-9);
  }
}

TEST(EvalOrbit, RealValuesArePositiveAndBounded) {
  const auto ctx = b2_ctx();
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleRng rng(14, i);
    const Eigen::VectorXd x = rng.unit_vector(2), y = rng.unit_vector(2);
    const double t = rng.log_uniform(0.01, 80.0);
    const auto ev = eval_orbit(ctx, x, y, t);
    const double mu = pairing_plus(ctx.roots(), ctx.group(), x, y);
    for (std::size_t g = 0; g < ctx.order(); ++g) {
      EXPECT_GT(ev.result[g].real(), 0.0);
      EXPECT_LE(ev.scaled_values[g].real(), 1.0 + 1e-9);
    }
    EXPECT_NEAR(ev.scale_exponent, t * mu, 1e-12 * (1.0 + t));
  }
}

TEST(EvalOrbit, ImaginaryValuesHaveModulusAtMostOne) {
  const auto ctx = b2_ctx();
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleRng rng(15, i);
    const Eigen::VectorXd x = rng.unit_vector(2), y = rng.unit_vector(2);
    const auto v = eval_imaginary(ctx, x, y, rng.log_uniform(0.01, 200.0));
    EXPECT_LE(v.values.cwiseAbs().maxCoeff(), 1.0 + 1e-9);
  }
}

TEST(EvalOrbit, RankOneImaginaryMatchesBessel) {
  const KernelContext ctx(build_root_system(Family::z2n, {.n = 1}, {0.5}));
  Eigen::VectorXd x(1), y(1);
  x << 1.0;
  y << 1.0;
  for (double t : {3.0, 40.0, 150.0, 900.0}) {
    const auto v = eval_imaginary(ctx, x, y, t);
    EXPECT_LT(rel(v[0], e1_bessel_imaginary(t, 0.5)), 1e-9) << t;
    EXPECT_LT(rel(v[1], e1_bessel_imaginary(-t, 0.5)), 1e-9) << t;
  }
}

TEST(EvalOrbit, LargeArgumentsReturnScaledValues) {
  const auto ctx = b2_ctx();
  const auto ev = eval_orbit(ctx, v2(1, 0.3), v2(0.8, 0.2), 2000.0);
  EXPECT_TRUE(ev.scaled);
  EXPECT_GT(ev.scale_exponent, 700.0);
  for (std::size_t g = 0; g < ctx.order(); ++g) EXPECT_TRUE(std::isfinite(ev.result[g].real()));
}

TEST(EvalOrbit, RejectsBadInput) {
  const auto ctx = b2_ctx();
  Eigen::VectorXd x3(3);
  x3 << 1, 2, 3;
  EXPECT_THROW(eval_orbit(ctx, x3, v2(1, 0), 1.0), DomainError);
  EXPECT_THROW(eval_orbit(ctx, v2(1, 0), v2(1, 0), -1.0), DomainError);
  EXPECT_THROW(eval_orbit(ctx, v2(std::nan(""), 0), v2(1, 0), 1.0), DomainError);
}
