#pragma once

// Large-argument behaviour of the imaginary kernel.
//
// F_g(x, y) = sqrt(w_k(x) w_k(y)) e^{-i <x, g y>} E_k(i x, g y). Along a pair of
// curves kappa = (kappa_1, kappa_2) in C_delta, F(t) = F(kappa_1(t), kappa_2(t))
// solves F' = A(t) F with
//
//   A_{g, s_a g}(t) = k(a) (<a,k1'>/<a,k1> + <a,g k2'>/<a,g k2>) exp(-i (2/|a|^2) <a,k1> <a,g k2>)
//
// and zero elsewhere. F(t) converges to a non-zero limit vector v as t -> oo.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/errors.hpp"
#include "dunkl/geometry.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/ode.hpp"
#include "dunkl/root_system.hpp"
#include "dunkl/sampling.hpp"

namespace dunkl {

enum class CurveKind { ray, rotating_ray };

inline std::string to_string(CurveKind k) { return k == CurveKind::ray ? "ray" : "rotating_ray"; }

inline CurveKind parse_curve_kind(const std::string& s) {
  if (s == "ray") return CurveKind::ray;
  if (s == "rotating_ray" || s == "rotating") return CurveKind::rotating_ray;
  throw DomainError("unknown curve kind '" + s + "' (expected ray or rotating_ray)");
}

/// kappa_1(t) = t R(theta) u1, kappa_2(t) = R(-theta) u2 with theta = rate / t, R the
/// rotation of the first coordinate plane. A ray has rate 0: kappa_1 = t u1, kappa_2 = u2,
/// so |kappa_1||kappa_2| = t.
struct AdmissibleCurvePair {
  CurveKind kind = CurveKind::ray;
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
  double rotation_rate = 0.0;
  double delta = 0.0;
  double t_min = 1.0;

  double angle(double t) const { return kind == CurveKind::ray ? 0.0 : rotation_rate / t; }

  static Eigen::VectorXd rotate(const Eigen::VectorXd& u, double theta) {
    Eigen::VectorXd r = u;
    const double c = std::cos(theta), s = std::sin(theta);
    r[0] = c * u[0] - s * u[1];
    r[1] = s * u[0] + c * u[1];
    return r;
  }

  // J v: rotation of the first plane by a quarter turn.
  static Eigen::VectorXd quarter(const Eigen::VectorXd& v) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(v.size());
    r[0] = -v[1];
    r[1] = v[0];
    return r;
  }

  Eigen::VectorXd kappa1(double t) const {
    return kind == CurveKind::ray ? Eigen::VectorXd(t * u1) : Eigen::VectorXd(t * rotate(u1, angle(t)));
  }
  Eigen::VectorXd kappa2(double t) const { return kind == CurveKind::ray ? u2 : rotate(u2, -angle(t)); }

  Eigen::VectorXd dkappa1(double t) const {
    if (kind == CurveKind::ray) return u1;
    const Eigen::VectorXd d = rotate(u1, angle(t));
    return d - (rotation_rate / t) * quarter(d);
  }
  Eigen::VectorXd dkappa2(double t) const {
    if (kind == CurveKind::ray) return Eigen::VectorXd::Zero(u2.size());
    return (rotation_rate / (t * t)) * quarter(rotate(u2, -angle(t)));
  }
};

/// Builds a curve pair and checks that both directions stay in C_delta for t >= t_min.
inline AdmissibleCurvePair make_curve_pair(const RootSystem& rs, CurveKind kind, Eigen::VectorXd u1, Eigen::VectorXd u2,
                                           double delta, double rotation_rate = 0.0, double t_min = 1.0) {
  const int n = rs.rank();
  if (u1.size() != n || u2.size() != n) throw DomainError("curve pair: dimension mismatch");
  if (!(u1.norm() > 0.0) || !(u2.norm() > 0.0)) throw DomainError("curve pair: zero direction");
  if (!(t_min > 0.0)) throw DomainError("curve pair: t_min must be > 0");
  if (kind == CurveKind::rotating_ray && n < 2) throw DomainError("curve pair: rotating rays need rank >= 2");
  if (kind == CurveKind::ray) rotation_rate = 0.0;
  AdmissibleCurvePair c{kind, u1 / u1.norm(), u2 / u2.norm(), rotation_rate, delta, t_min};
  const ConeSpec spec{delta, RootScope::all_positive};
  for (int j = 0; j <= 64; ++j) {
    const double t = t_min * std::pow(1e6, j / 64.0);
    if (!in_cone_delta(rs, spec, c.kappa1(t)) || !in_cone_delta(rs, spec, c.kappa2(t)))
      throw DomainError("curve pair leaves C_delta near t = " + std::to_string(t));
  }
  if (!in_cone_delta(rs, spec, c.u1) || !in_cone_delta(rs, spec, c.u2))
    throw DomainError("curve pair: limiting directions are not in C_delta");
  return c;
}

/// F_g(x, y) for every g.
inline OrbitVector f_normalized(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto& rs = ctx.roots();
  const double lw = 0.5 * (log_weight_w_k(rs, x) + log_weight_w_k(rs, y));
  if (!std::isfinite(lw)) throw DomainError("f_normalized: w_k vanishes (x or y on a reflecting hyperplane)");
  const OrbitVector e = eval_imaginary(ctx, x, y, 1.0);
  const Eigen::VectorXcd omega = ctx.pairings(x, y.cast<cd>());
  OrbitVector f(Eigen::VectorXcd(e.values.size()));
  for (std::size_t g = 0; g < e.size(); ++g) {
    const double phase = omega[static_cast<Eigen::Index>(g)].real();
    f[g] = std::exp(lw) * std::polar(1.0, -phase) * e[g];
  }
  return f;
}

namespace detail {

// Per-stage data of A(t): coefficient and phase rate for every (root, g).
struct CurveFrame {
  std::vector<cd> coeff;  // indexed a * |G| + g
  double max_rate = 0.0;  // fastest phase speed
};

inline CurveFrame curve_frame(const KernelContext& ctx, const AdmissibleCurvePair& c, double t) {
  const auto& rs = ctx.roots();
  const auto& grp = ctx.group();
  const std::size_t m = grp.size();
  const Eigen::VectorXd k1 = c.kappa1(t), d1 = c.dkappa1(t), k2 = c.kappa2(t), d2 = c.dkappa2(t);
  CurveFrame f;
  f.coeff.assign(rs.num_positive() * m, cd(0.0));
  for (std::size_t a = 0; a < rs.num_positive(); ++a) {
    const Eigen::VectorXd& al = rs.root(a);
    const double scale = 2.0 / al.squaredNorm();
    const double p1 = al.dot(k1);
    if (!(std::abs(p1) > 0.0)) throw NumericError("A(t): <a, kappa_1> vanishes at t = " + std::to_string(t));
    const double log1 = al.dot(d1) / p1;
    for (std::size_t g = 0; g < m; ++g) {
      const double p2 = al.dot(grp[g].matrix * k2);
      if (!(std::abs(p2) > 0.0)) throw NumericError("A(t): <a, g kappa_2> vanishes at t = " + std::to_string(t));
      const double q2 = al.dot(grp[g].matrix * d2);
      f.max_rate = std::max(f.max_rate, scale * std::abs(al.dot(d1) * p2 + p1 * q2));
      const double k = rs.k(a);
      if (k == 0.0) continue;
      f.coeff[a * m + g] = k * (log1 + q2 / p2) * std::polar(1.0, -scale * p1 * p2);
    }
  }
  return f;
}

} // namespace detail

/// A(t) as a dense |G| x |G| matrix.
inline Eigen::MatrixXcd ode_matrix_A(const KernelContext& ctx, const AdmissibleCurvePair& curve, double t) {
  if (!(t > 0.0)) throw DomainError("ode_matrix_A: t must be > 0");
  const auto f = detail::curve_frame(ctx, curve, t);
  const std::size_t m = ctx.order();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < ctx.roots().num_positive(); ++r)
    for (std::size_t g = 0; g < m; ++g)
      a(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(ctx.group().reflect_left(r, g))) += f.coeff[r * m + g];
  return a;
}

/// Local oscillation period of A(t), the chunk length of the march.
inline double oscillation_period(const KernelContext& ctx, const AdmissibleCurvePair& curve, double t) {
  const double rate = detail::curve_frame(ctx, curve, t).max_rate;
  return rate > 0.0 ? 2.0 * std::numbers::pi / rate : 1e3;
}

struct IntegrationResult {
  OrbitVector F;
  /// Integral of F over [t0, t1] (filled when requested).
  OrbitVector integral;
  std::size_t steps = 0;
};

namespace detail {

// March of F' = A F (and optionally I' = F) from t0 to t1.
inline std::size_t march(const KernelContext& ctx, const AdmissibleCurvePair& curve, ComplexState& state, double t0,
                         double t1, bool with_integral, const OdeOptions& opts) {
  const std::size_t m = ctx.order();
  const std::size_t na = ctx.roots().num_positive();
  auto rhs = [&](const ComplexState& s, ComplexState& ds, double t) {
    const auto f = curve_frame(ctx, curve, t);
    for (std::size_t g = 0; g < m; ++g) {
      cd acc = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const cd c = f.coeff[a * m + g];
        if (c != 0.0) acc += c * s[ctx.group().reflect_left(a, g)];
      }
      ds[g] = acc;
      if (with_integral) ds[m + g] = s[g];
    }
  };
  auto chunk = [&](double t) { return std::min(oscillation_period(ctx, curve, t), std::max(1.0, 0.5 * t)); };
  return integrate_complex(rhs, state, t0, t1, opts, chunk);
}

} // namespace detail

/// F(t1) from F(t0) = F0 along the curve pair.
inline IntegrationResult integrate_F(const KernelContext& ctx, const AdmissibleCurvePair& curve, double t0, double t1,
                                     const OrbitVector& F0, const OdeOptions& opts = {}) {
  if (!(t0 >= curve.t_min) || !(t1 >= curve.t_min)) throw DomainError("integrate_F: t below the curve's t_min");
  const std::size_t m = ctx.order();
  if (F0.size() != m) throw DomainError("integrate_F: initial vector has the wrong size");
  ComplexState state(2 * m, cd(0.0));
  std::copy(F0.values.data(), F0.values.data() + m, state.begin());
  IntegrationResult r;
  r.steps = detail::march(ctx, curve, state, t0, t1, true, opts);
  r.F = OrbitVector(Eigen::Map<Eigen::VectorXcd>(state.data(), static_cast<Eigen::Index>(m)));
  r.integral = OrbitVector(Eigen::Map<Eigen::VectorXcd>(state.data() + m, static_cast<Eigen::Index>(m)));
  return r;
}

/// As above, starting from the directly evaluated F(t0).
inline IntegrationResult integrate_F(const KernelContext& ctx, const AdmissibleCurvePair& curve, double t0, double t1,
                                     const OdeOptions& opts = {}) {
  return integrate_F(ctx, curve, t0, t1, f_normalized(ctx, curve.kappa1(t0), curve.kappa2(t0)), opts);
}

struct AsymptoticOptions {
  double tol = 1e-2;
  double t0 = 10.0;
  double t_max = 1e5;
  OdeOptions ode{1e-10, 1e-300};
};

struct ConvergenceRow {
  double t = 0.0;
  Eigen::VectorXcd F;
  /// Mean of F over [t_{j-1}, t_j].
  Eigen::VectorXcd window_mean;
  /// 2 m_j - m_{j-1}: removes the c/t part of the window means.
  Eigen::VectorXcd extrapolated;
  bool has_mean = false;
  bool has_extrapolation = false;
};

struct LimitEstimate {
  OrbitVector v;
  bool converged = false;
  double tol = 0.0;
  double t_final = 0.0;
  double last_change = 0.0;
  std::size_t steps = 0;
  std::vector<ConvergenceRow> table;
};

/// Limit of F along the curve pair. F is marched over t_j = t0 2^j together with its
/// integral; window means m_j over [t_{j-1}, t_j] average out the oscillation, and
/// r_j = 2 m_j - m_{j-1} cancels the remaining c/t drift. Converged once two
/// successive changes of r_j stay below tol/4 in every component.
inline LimitEstimate estimate_v(const KernelContext& ctx, const AdmissibleCurvePair& curve,
                                const AsymptoticOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw DomainError("estimate_v: tol must be > 0");
  if (!(opts.t0 >= curve.t_min) || !(opts.t_max > opts.t0)) throw DomainError("estimate_v: need t_min <= t0 < t_max");
  const std::size_t m = ctx.order();
  LimitEstimate est;
  est.tol = opts.tol;
  if (ctx.roots().trivial_multiplicity()) {
    // A vanishes and F is identically one.
    est.v = OrbitVector(Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(m)));
    est.converged = true;
    est.t_final = opts.t0;
    est.table.push_back({opts.t0, est.v.values, {}, {}, false, false});
    return est;
  }

  const OrbitVector F0 = f_normalized(ctx, curve.kappa1(opts.t0), curve.kappa2(opts.t0));
  ComplexState state(2 * m, cd(0.0));
  std::copy(F0.values.data(), F0.values.data() + m, state.begin());
  est.table.push_back({opts.t0, F0.values, {}, {}, false, false});

  double t = opts.t0;
  Eigen::VectorXcd prev_integral = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
  int quiet = 0;
  while (2.0 * t <= opts.t_max * (1.0 + 1e-12)) {
    const double next = 2.0 * t;
    est.steps += detail::march(ctx, curve, state, t, next, true, opts.ode);
    const Eigen::VectorXcd F = Eigen::Map<Eigen::VectorXcd>(state.data(), static_cast<Eigen::Index>(m));
    const Eigen::VectorXcd integral = Eigen::Map<Eigen::VectorXcd>(state.data() + m, static_cast<Eigen::Index>(m));
    ConvergenceRow row{next, F, (integral - prev_integral) / (next - t), {}, true, false};
    const ConvergenceRow& last = est.table.back();
    if (last.has_mean) {
      row.extrapolated = 2.0 * row.window_mean - last.window_mean;
      row.has_extrapolation = true;
      if (last.has_extrapolation) {
        est.last_change = (row.extrapolated - last.extrapolated).cwiseAbs().maxCoeff();
        quiet = est.last_change < opts.tol / 4.0 ? quiet + 1 : 0;
      }
    }
    prev_integral = integral;
    t = next;
    est.table.push_back(row);
    if (quiet >= 2) {
      est.converged = true;
      break;
    }
  }
  est.t_final = t;
  const ConvergenceRow& fin = est.table.back();
  est.v = OrbitVector(fin.has_extrapolation ? fin.extrapolated : fin.F);
  return est;
}

/// Independent curve pairs in parallel.
inline std::vector<LimitEstimate> estimate_v_many(const KernelContext& ctx, const std::vector<AdmissibleCurvePair>& curves,
                                                  const AsymptoticOptions& opts = {}) {
  std::vector<LimitEstimate> out(curves.size());
  parallel_for(curves.size(), [&](std::size_t i) { out[i] = estimate_v(ctx, curves[i], opts); });
  return out;
}

} // namespace dunkl
