#pragma once

// Dunkl kernel of a finite reflection group, evaluated on a whole orbit at once.
//
// For fixed x, y put F_g(t) = E_k(t x, g y), g in G. Applying the Dunkl operator
// in direction x at the point t x and using E_k(sigma x, y) = E_k(x, sigma y)
// gives the coupled system
//
//   t F_g'(t) = t <x, g y> F_g(t) - sum_{a in R+} k(a) (F_g(t) - F_{sigma_a g}(t)),
//
// i.e. t F' = t D F - L F with L = sum k(a) (I - P_{sigma_a}). Its solution that is
// regular at 0 with F(0) = 1 is the power series sum c_m t^m, (m I + L) c_m = D c_{m-1}.
// Small arguments are summed directly; larger ones bootstrap from the series and
// continue with an adaptive Runge-Kutta march. The march runs on the scaled
// unknown H = e^{-t mu} F, mu = <x+, (Re y)+>, which is bounded by 1 in modulus.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/errors.hpp"
#include "dunkl/ode.hpp"
#include "dunkl/rank_one.hpp"
#include "dunkl/root_system.hpp"

namespace dunkl {

using cd = std::complex<double>;

/// A complex value for every element of the group, indexed like the group.
struct OrbitVector {
  Eigen::VectorXcd values;

  OrbitVector() = default;
  explicit OrbitVector(Eigen::VectorXcd v) : values(std::move(v)) {}

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  cd& operator[](std::size_t g) { return values[static_cast<Eigen::Index>(g)]; }
  const cd& operator[](std::size_t g) const { return values[static_cast<Eigen::Index>(g)]; }
};

struct KernelOptions {
  /// Direct summation is used while t |x| |y| stays below this radius.
  double series_radius = 40.0;
  /// Upper bound on the log of the series cancellation factor
  /// e^{t (max_g |<x,gy>| - mu)} accepted before switching to the ODE.
  double cancellation_budget = 8.0;
  /// Results carry the factor e^{t mu} only while t mu stays below this.
  double overflow_exponent = 700.0;
  int max_series_terms = 20000;
  OdeOptions ode{};
};

/// L = sum_{a in R+} k(a) (I - P_{sigma_a}), (P_sigma c)_g = c_{sigma g}.
inline Eigen::MatrixXd coupling_operator(const RootSystem& rs, const ReflectionGroup& group) {
  const auto n = static_cast<Eigen::Index>(group.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < rs.num_positive(); ++a) {
    const double k = rs.k(a);
    if (k == 0.0) continue;
    for (std::size_t g = 0; g < group.size(); ++g) {
      l(g, g) += k;
      l(g, group.reflect_left(a, g)) -= k;
    }
  }
  return l;
}

/// Read-only evaluation context shared by many evaluations: the root system,
/// its group, and the spectral factorization of L used for the shifted solves.
class KernelContext {
public:
  explicit KernelContext(const RootSystem& rs, KernelOptions opts = {})
      : KernelContext(rs, generate_group(rs), opts) {}

  KernelContext(const RootSystem& rs, ReflectionGroup group, KernelOptions opts = {})
      : shared_(std::make_shared<Shared>()), opts_(opts) {
    auto& s = *shared_;
    s.rs = rs;
    s.group = std::move(group);
    s.coupling = coupling_operator(s.rs, s.group);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.coupling);
    if (eig.info() != Eigen::Success) throw NumericError("coupling operator: eigendecomposition failed");
    s.eigenvalues = eig.eigenvalues();
    s.eigenvectors = eig.eigenvectors();
    for (std::size_t a = 0; a < s.rs.num_positive(); ++a) {
      if (s.rs.k(a) != 0.0) s.active_roots.push_back(a);
    }
  }

  const RootSystem& roots() const { return shared_->rs; }
  const ReflectionGroup& group() const { return shared_->group; }
  const Eigen::MatrixXd& coupling() const { return shared_->coupling; }
  const Eigen::VectorXd& coupling_spectrum() const { return shared_->eigenvalues; }
  const KernelOptions& options() const { return opts_; }
  std::size_t order() const { return shared_->group.size(); }

  KernelContext with_options(KernelOptions opts) const {
    KernelContext c = *this;
    c.opts_ = opts;
    return c;
  }

  /// (m I + L)^{-1} v through L = Q diag(lambda) Q^T.
  Eigen::VectorXcd shifted_solve(double m, const Eigen::VectorXcd& v) const {
    const auto& s = *shared_;
    const Eigen::VectorXcd w = s.eigenvectors.transpose() * v;
    const Eigen::VectorXcd scaled = w.cwiseQuotient((s.eigenvalues.array() + m).matrix().cast<cd>());
    return s.eigenvectors * scaled;
  }

  /// out = L in, using the sparse reflection tables.
  void apply_coupling(const cd* in, cd* out) const {
    const auto& s = *shared_;
    const std::size_t n = s.group.size();
    for (std::size_t g = 0; g < n; ++g) out[g] = 0.0;
    for (std::size_t a : s.active_roots) {
      const double k = s.rs.k(a);
      for (std::size_t g = 0; g < n; ++g) out[g] += k * (in[g] - in[s.group.reflect_left(a, g)]);
    }
  }

  /// omega_g = <x, g y> (bilinear, y complex).
  Eigen::VectorXcd pairings(const Eigen::VectorXd& x, const Eigen::VectorXcd& y) const {
    const auto& grp = shared_->group;
    Eigen::VectorXcd w(static_cast<Eigen::Index>(grp.size()));
    for (std::size_t g = 0; g < grp.size(); ++g) {
      w[static_cast<Eigen::Index>(g)] = x.cast<cd>().dot(grp[g].matrix * y);  // x real: no conjugation
    }
    return w;
  }

private:
  struct Shared {
    RootSystem rs;
    ReflectionGroup group;
    Eigen::MatrixXd coupling;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::vector<std::size_t> active_roots;
  };
  std::shared_ptr<Shared> shared_;
  KernelOptions opts_;
};

/// c_0..c_M of E_k(t x, g y) = sum_m c_{g,m} t^m.
inline std::vector<OrbitVector> series_coefficients(const KernelContext& ctx, const Eigen::VectorXd& x,
                                                     const Eigen::VectorXcd& y, int order) {
  if (order < 0) throw DomainError("series_coefficients: order must be >= 0");
  const Eigen::VectorXcd omega = ctx.pairings(x, y);
  std::vector<OrbitVector> c;
  c.emplace_back(Eigen::VectorXcd::Ones(omega.size()));
  for (int m = 1; m <= order; ++m) {
    c.emplace_back(ctx.shifted_solve(m, omega.cwiseProduct(c.back().values)));
  }
  return c;
}

struct KernelEvaluation {
  Eigen::VectorXd x;
  Eigen::VectorXcd y;
  double t = 0.0;
  /// E_k(t x, g y) when !scaled, e^{-scale_exponent} E_k(t x, g y) when scaled.
  OrbitVector result;
  /// e^{-scale_exponent} E_k(t x, g y), always available.
  OrbitVector scaled_values;
  bool scaled = false;
  /// t <x+, (Re y)+>.
  double scale_exponent = 0.0;
  bool used_ode = false;
  std::size_t ode_steps = 0;
};

namespace detail {

// Sum of b_m = c_m tau^m for unit x, y with pairings omega.
inline Eigen::VectorXcd orbit_series(const KernelContext& ctx, const Eigen::VectorXcd& omega, double tau,
                                     double omega_max) {
  Eigen::VectorXcd term = Eigen::VectorXcd::Ones(omega.size());
  Eigen::VectorXcd sum = term;
  int small = 0;
  for (int m = 1; m <= ctx.options().max_series_terms; ++m) {
    term = ctx.shifted_solve(m, tau * omega.cwiseProduct(term));
    sum += term;
    const double tn = term.cwiseAbs().maxCoeff();
    const double sn = sum.cwiseAbs().maxCoeff();
    if (m > tau * omega_max && tn < 1e-16 * sn) {
      if (++small >= 3) return sum;
    } else {
      small = 0;
    }
  }
  throw NumericError("orbit series: no convergence within max_series_terms");
}

} // namespace detail

/// Right-hand side of the orbit system for F_g(t) = E_k(t x, g y):
/// F' = D F - L F / t.
inline OrbitVector kernel_derivative(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXcd& y,
                                     double t, const OrbitVector& values) {
  const Eigen::VectorXcd omega = ctx.pairings(x, y);
  Eigen::VectorXcd lf(omega.size());
  ctx.apply_coupling(values.values.data(), lf.data());
  return OrbitVector(omega.cwiseProduct(values.values) - lf / t);
}

/// All E_k(t x, g y), g in G, for real x and complex y.
inline KernelEvaluation eval_orbit(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXcd& y,
                                   double t) {
  const int n = ctx.roots().rank();
  if (x.size() != n || y.size() != n) throw DomainError("eval_orbit: dimension mismatch");
  if (!x.allFinite() || !y.allFinite() || !std::isfinite(t)) throw DomainError("eval_orbit: non-finite input");
  if (t < 0.0) throw DomainError("eval_orbit: t must be >= 0");

  KernelEvaluation ev;
  ev.x = x;
  ev.y = y;
  ev.t = t;
  const auto order = static_cast<Eigen::Index>(ctx.order());
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0 || t == 0.0) {
    ev.result = OrbitVector(Eigen::VectorXcd::Ones(order));
    ev.scaled_values = ev.result;
    return ev;
  }

  // E_k(t x, g y) = E_k(tau xh, g yh) with unit xh, yh.
  const Eigen::VectorXd xh = x / nx;
  const Eigen::VectorXcd yh = y / ny;
  const double tau = t * nx * ny;
  const Eigen::VectorXcd omega = ctx.pairings(xh, yh);
  const double omega_max = omega.cwiseAbs().maxCoeff();
  const Eigen::VectorXd yre = yh.real();
  const double mu = yre.norm() > 0.0 ? pairing_plus(ctx.roots(), ctx.group(), xh, yre) : 0.0;

  const auto& opts = ctx.options();
  double tau_series = opts.series_radius;
  if (omega_max - mu > 0.0) tau_series = std::min(tau_series, opts.cancellation_budget / (omega_max - mu));

  Eigen::VectorXcd h;
  if (tau <= tau_series) {
    h = detail::orbit_series(ctx, omega, tau, omega_max) * std::exp(-tau * mu);
  } else {
    h = detail::orbit_series(ctx, omega, tau_series, omega_max) * std::exp(-tau_series * mu);
    ComplexState state(h.data(), h.data() + h.size());
    const Eigen::VectorXcd rate = omega.array() - mu;
    const std::size_t m = ctx.order();
    auto rhs = [&](const ComplexState& s, ComplexState& ds, double tt) {
      ctx.apply_coupling(s.data(), ds.data());
      const double inv = 1.0 / tt;
      for (std::size_t g = 0; g < m; ++g) ds[g] = rate[static_cast<Eigen::Index>(g)] * s[g] - inv * ds[g];
    };
    // Chunks of about one oscillation period of the fastest component.
    const double chunk = 2.0 * std::numbers::pi / std::max(omega_max, 1e-3);
    ev.ode_steps = integrate_complex(rhs, state, tau_series, tau, opts.ode, [chunk](double) { return chunk; });
    ev.used_ode = true;
    h = Eigen::Map<Eigen::VectorXcd>(state.data(), static_cast<Eigen::Index>(state.size()));
  }

  ev.scale_exponent = tau * mu;
  ev.scaled_values = OrbitVector(h);
  if (ev.scale_exponent > opts.overflow_exponent) {
    ev.scaled = true;
    ev.result = ev.scaled_values;
  } else {
    ev.result = OrbitVector(h * std::exp(ev.scale_exponent));
  }
  return ev;
}

inline KernelEvaluation eval_orbit(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   double t) {
  return eval_orbit(ctx, x, Eigen::VectorXcd(y.cast<cd>()), t);
}

/// E_k(i t x, g y) for real x, y; every modulus is at most 1.
inline OrbitVector eval_imaginary(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  double t) {
  const Eigen::VectorXcd iy = y.cast<cd>() * cd(0.0, 1.0);
  return eval_orbit(ctx, x, iy, t).result;
}

/// Rank-one E_k(z): the series oracle while it is accurate, the orbit
/// evaluator on Z2^1 beyond its radius or precision.
inline cd rank_one_kernel(cd z, double k) {
  if (std::abs(z) <= Rank1Options{}.radius) {
    try {
      return e1_series(z, k);
    } catch (const NumericError&) {
    }
  }
  const KernelContext ctx(build_root_system(Family::z2n, {.n = 1}, {k}));
  Eigen::VectorXd x(1);
  x << 1.0;
  Eigen::VectorXcd y(1);
  y << z;
  const auto ev = eval_orbit(ctx, x, y, 1.0);
  if (ev.scaled) throw NumericError("rank_one_kernel: value overflows double");
  return ev.result[ReflectionGroup::identity()];
}

} // namespace dunkl
