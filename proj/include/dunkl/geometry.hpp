#pragma once

// Chamber and cone geometry: the Weyl chamber C, the truncated cones C_delta,
// open simplicial cones Lambda_{v_1..v_n}, and the constructive covering
// C_delta subset Lambda^{p0} with Lambda^p spanned by v_{p,i} = lambda_i + lambda / p.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/errors.hpp"
#include "dunkl/root_system.hpp"
#include "dunkl/sampling.hpp"

namespace dunkl {

enum class RootScope { all_positive, simple_only };

/// C_delta = {x in C : <x, a> >= delta |x| for every a in the scope}.
struct ConeSpec {
  double delta = 0.0;
  RootScope root_scope = RootScope::all_positive;
};

/// Open chamber: every dual-basis coordinate <x, alpha_i> is positive.
inline bool in_chamber(const RootSystem& rs, const Eigen::VectorXd& x) {
  for (int i = 0; i < rs.rank(); ++i) {
    if (!(rs.simple_root(i).dot(x) > 0.0)) return false;
  }
  return true;
}

inline bool in_cone_delta(const RootSystem& rs, const ConeSpec& spec, const Eigen::VectorXd& x) {
  if (!in_chamber(rs, x)) return false;
  const double bound = spec.delta * x.norm() - 1e-12;
  if (spec.root_scope == RootScope::simple_only) {
    for (int i = 0; i < rs.rank(); ++i) {
      if (rs.simple_root(i).dot(x) < bound) return false;
    }
  } else {
    for (const auto& a : rs.positive_roots) {
      if (a.dot(x) < bound) return false;
    }
  }
  return true;
}

/// The open cone of positive combinations of n independent generators.
class Polytope {
public:
  explicit Polytope(const std::vector<Eigen::VectorXd>& generators) {
    if (generators.empty()) throw DomainError("polytope: no generators");
    const auto n = generators.front().size();
    if (static_cast<std::size_t>(n) != generators.size()) throw DomainError("polytope: need exactly n generators in R^n");
    basis_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (generators[static_cast<std::size_t>(i)].size() != n) throw DomainError("polytope: dimension mismatch");
      basis_.col(i) = generators[static_cast<std::size_t>(i)];
    }
    if (!(std::abs(basis_.determinant()) > 1e-12)) throw DomainError("polytope: generators are not independent");
    inverse_ = basis_.inverse();
  }

  int dim() const { return static_cast<int>(basis_.cols()); }
  Eigen::VectorXd generator(int i) const { return basis_.col(i); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }

  Eigen::VectorXd coordinates(const Eigen::VectorXd& x) const { return inverse_ * x; }
  Eigen::VectorXd point(const Eigen::VectorXd& coords) const { return basis_ * coords; }
  bool contains(const Eigen::VectorXd& x) const { return (coordinates(x).array() > 0.0).all(); }

  std::vector<Eigen::VectorXd> generators() const {
    std::vector<Eigen::VectorXd> g;
    for (int i = 0; i < dim(); ++i) g.push_back(generator(i));
    return g;
  }

private:
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd inverse_;
};

/// Coordinates of x in the generators of p: x = sum c_i v_i.
inline Eigen::VectorXd coordinates_in_basis(const Polytope& p, const Eigen::VectorXd& x) { return p.coordinates(x); }

/// Lambda^p, generated by v_{p,i} = lambda_i + lambda / p, lambda = sum lambda_i.
inline Polytope covering_polytope(const RootSystem& rs, int p) {
  if (p < 1) throw DomainError("covering_polytope: p must be >= 1");
  const auto lam = dual_basis(rs);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(rs.rank());
  for (const auto& l : lam) total += l;
  std::vector<Eigen::VectorXd> v;
  for (const auto& l : lam) v.push_back(l + total / static_cast<double>(p));
  return Polytope(v);
}

/// Column i holds v_{p,i} in the basis (v_{p+1,j})_j, from an exact linear solve.
inline Eigen::MatrixXd nesting_coefficients(const RootSystem& rs, int p) {
  const Polytope next = covering_polytope(rs, p + 1);
  const Polytope cur = covering_polytope(rs, p);
  return next.inverse() * cur.basis();
}

/// v_{p,i} = v_{p+1,i} + a sum_j v_{p+1,j} with a = 1 / (p (n + p + 1)).
inline double nesting_coefficient_derived(int n, int p) { return 1.0 / (static_cast<double>(p) * (n + p + 1)); }

/// The alternate closed form 1 / (p (2p + 1)); equal to
/// the derived one only when n = p.
inline double nesting_coefficient_alternate(int p) { return 1.0 / (static_cast<double>(p) * (2 * p + 1)); }

/// x* = sum |x_i| v_i for x = sum x_i v_i.
inline Eigen::VectorXd x_star(const Polytope& p, const Eigen::VectorXd& x) {
  return p.point(p.coordinates(x).cwiseAbs());
}

struct CoveringOptions {
  int p_max = 64;
  std::size_t min_samples = 100000;
  std::size_t max_grid = 40000000;
};

/// Grid on the unit sphere: radial projection of cell centres on the faces of
/// [-1,1]^n. Every sphere point lies within `mesh` (chordal) of a grid point.
struct CapSample {
  Eigen::MatrixXd points;  // n x N, grid points within `mesh` of Pi_delta
  double mesh = 0.0;
  std::size_t strict = 0;  // grid points inside Pi_delta itself
};

namespace detail {

template <class Visit>
void sphere_grid(int n, long cells, Visit&& visit) {
  Eigen::VectorXd u(n);
  if (n == 1) {
    u[0] = 1.0;
    visit(u);
    u[0] = -1.0;
    visit(u);
    return;
  }
  const double s = 2.0 / static_cast<double>(cells);
  std::vector<long> idx(static_cast<std::size_t>(n - 1), 0);
  for (int face = 0; face < 2 * n; ++face) {
    const int axis = face / 2;
    const double sign = (face % 2 == 0) ? 1.0 : -1.0;
    std::fill(idx.begin(), idx.end(), 0L);
    while (true) {
      int j = 0;
      for (int c = 0; c < n; ++c) {
        if (c == axis) {
          u[c] = sign;
        } else {
          u[c] = -1.0 + s * (static_cast<double>(idx[static_cast<std::size_t>(j)]) + 0.5);
          ++j;
        }
      }
      visit(u / u.norm());
      int d = 0;
      while (d < n - 1 && ++idx[static_cast<std::size_t>(d)] == cells) idx[static_cast<std::size_t>(d++)] = 0;
      if (d == n - 1) break;
    }
  }
}

inline bool relaxed_member(const RootSystem& rs, const ConeSpec& spec, const Eigen::VectorXd& u, double h) {
  for (int i = 0; i < rs.rank(); ++i) {
    const auto& a = rs.simple_root(i);
    if (a.dot(u) < -a.norm() * h) return false;
  }
  auto check = [&](const Eigen::VectorXd& a) { return a.dot(u) >= spec.delta - a.norm() * h; };
  if (spec.root_scope == RootScope::simple_only) {
    for (int i = 0; i < rs.rank(); ++i)
      if (!check(rs.simple_root(i))) return false;
  } else {
    for (const auto& a : rs.positive_roots)
      if (!check(a)) return false;
  }
  return true;
}

} // namespace detail

/// Grid points near the cap Pi_delta = {|x| = 1} cap C_delta, refined until at least
/// `min_samples` of them fall in the mesh-neighbourhood of the cap.
inline CapSample sample_cap(const RootSystem& rs, const ConeSpec& spec, std::size_t min_samples,
                            std::size_t max_grid = 40000000) {
  const int n = rs.rank();
  long cells = 64;
  auto mesh_of = [n](long c) { return n == 1 ? 0.0 : (2.0 / static_cast<double>(c)) * std::sqrt(n - 1.0) / 2.0; };
  auto total_of = [n](long c) { return 2.0 * n * std::pow(static_cast<double>(c), n - 1); };
  if (n > 1) {
    while (true) {
      const double h = mesh_of(cells);
      std::size_t count = 0;
      detail::sphere_grid(n, cells, [&](const Eigen::VectorXd& u) { count += detail::relaxed_member(rs, spec, u, h); });
      if (count >= min_samples) break;
      const double factor = count == 0 ? 4.0 : std::pow(static_cast<double>(min_samples) / count, 1.0 / (n - 1)) * 1.1;
      const long next = static_cast<long>(std::ceil(cells * std::max(factor, 1.1)));
      if (total_of(next) > static_cast<double>(max_grid)) break;
      cells = next;
    }
  }
  CapSample out;
  out.mesh = mesh_of(cells);
  std::vector<Eigen::VectorXd> pts;
  detail::sphere_grid(n, cells, [&](const Eigen::VectorXd& u) {
    if (detail::relaxed_member(rs, spec, u, out.mesh)) {
      pts.push_back(u);
      if (in_cone_delta(rs, spec, u)) ++out.strict;
    }
  });
  out.points.resize(n, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.points.col(static_cast<Eigen::Index>(i)) = pts[i];
  return out;
}

struct CoveringResult {
  int p0 = 0;
  Polytope polytope;
  /// Certified lower bound of min_i min_{x in Pi_delta} (coordinate i of x in Lambda^{p0}).
  double margin = 0.0;
  /// The same minimum located by local descent (an upper estimate of the true minimum).
  double estimated_min = 0.0;
  double mesh = 0.0;
  std::size_t samples = 0;
};

namespace detail {

// Local pattern search for min l(u) over the cap, starting from a feasible u.
inline double descend_on_cap(const RootSystem& rs, const ConeSpec& spec, const Eigen::VectorXd& l, Eigen::VectorXd u,
                             double step) {
  const int n = rs.rank();
  double best = l.dot(u);
  while (step > 1e-13) {
    bool moved = false;
    for (int j = 0; j < n && !moved; ++j) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        d[j] = sgn;
        d -= u * u.dot(d);
        if (d.norm() < 1e-14) continue;
        Eigen::VectorXd cand = u + step * d / d.norm();
        cand /= cand.norm();
        const double v = l.dot(cand);
        if (v < best && in_cone_delta(rs, spec, cand)) {
          u = cand;
          best = v;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

} // namespace detail

/// Smallest p <= p_max with Pi_delta inside Lambda^p, certified by grid sampling:
/// each coordinate is a linear functional l_i, and its minimum over the cap is at
/// least (grid minimum) - |l_i| * mesh. Then C_delta subset Lambda^p by convexity.
inline CoveringResult lemma_covering(const RootSystem& rs, const ConeSpec& spec, const CoveringOptions& opts = {}) {
  if (!(spec.delta > 0.0)) throw DomainError("lemma_covering: delta must be > 0");
  const CapSample cap = sample_cap(rs, spec, opts.min_samples, opts.max_grid);
  if (cap.strict == 0) throw DomainError("lemma_covering: Pi_delta is empty (no sampled point satisfies the cone condition)");

  for (int p = 1; p <= opts.p_max; ++p) {
    const Polytope poly = covering_polytope(rs, p);
    const Eigen::MatrixXd coords = poly.inverse() * cap.points;
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rs.rank(); ++i) {
      const double lower = coords.row(i).minCoeff() - poly.inverse().row(i).norm() * cap.mesh;
      margin = std::min(margin, lower);
    }
    if (margin > 0.0) {
      CoveringResult r{p, poly, margin, std::numeric_limits<double>::infinity(), cap.mesh,
                       static_cast<std::size_t>(cap.points.cols())};
      for (int i = 0; i < rs.rank(); ++i) {
        const Eigen::VectorXd l = poly.inverse().row(i).transpose();
        // start from the best strictly feasible grid point
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index arg = -1;
        for (Eigen::Index c = 0; c < cap.points.cols(); ++c) {
          if (coords(i, c) < best && in_cone_delta(rs, spec, cap.points.col(c))) {
            best = coords(i, c);
            arg = c;
          }
        }
        if (arg >= 0)
          r.estimated_min = std::min(r.estimated_min, detail::descend_on_cap(rs, spec, l, cap.points.col(arg), 4 * cap.mesh + 1e-6));
      }
      return r;
    }
  }
  throw NumericError("lemma_covering: no covering with p <= p_max");
}

inline CoveringResult lemma_covering(const RootSystem& rs, double delta, const CoveringOptions& opts = {}) {
  return lemma_covering(rs, ConeSpec{delta, RootScope::all_positive}, opts);
}

struct HConstantResult {
  double c = 0.0;       // sup over all samples
  double c_base = 0.0;  // sup over the first half
  int q = 0;            // xi_i = v_{q,i}
  Polytope xi;
  std::size_t samples = 0;
};

/// Enclosing cone Lambda^q (smallest q) containing every generator of `poly` strictly.
inline int enclosing_covering_index(const RootSystem& rs, const Polytope& poly, int q_max = 64) {
  for (int q = 1; q <= q_max; ++q) {
    const Polytope xi = covering_polytope(rs, q);
    bool ok = true;
    for (int j = 0; j < poly.dim() && ok; ++j) ok = (xi.coordinates(poly.generator(j)).array() > 1e-12).all();
    if (ok) return q;
  }
  throw DomainError("h_constant: polytope touches a chamber wall (no enclosing Lambda^q, q <= 64)");
}

/// Smallest sampled c with <x, a> <= c (prod_i x_i)^{1/n} for all a in R+ and x in
/// Lambda_v, x_i the coordinates of x in an enclosing Lambda_xi with xi_i in C.
inline HConstantResult h_constant(const RootSystem& rs, const Polytope& poly, std::size_t samples = 20000,
                                  std::uint64_t seed = 1) {
  const int n = rs.rank();
  const int q = enclosing_covering_index(rs, poly);
  HConstantResult r{0.0, 0.0, q, covering_polytope(rs, q), samples};
  auto ratio = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xc = r.xi.coordinates(x);
    if ((xc.array() <= 0.0).any()) throw NumericError("h_constant: sample outside the enclosing cone");
    const double geo = std::exp(xc.array().log().sum() / n);
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& a : rs.positive_roots) top = std::max(top, a.dot(x));
    return top / geo;
  };
  std::vector<double> vals(2 * samples);
  parallel_for(2 * samples, [&](std::size_t i) {
    SampleRng rng(seed, i);
    vals[i] = ratio(poly.point(rng.simplex(n)));
  });
  for (int j = 0; j < n; ++j) r.c_base = std::max(r.c_base, ratio(poly.generator(j)));
  r.c = r.c_base;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!std::isfinite(vals[i])) throw NumericError("h_constant: unbounded ratio");
    if (i < samples) r.c_base = std::max(r.c_base, vals[i]);
    r.c = std::max(r.c, vals[i]);
  }
  return r;
}

} // namespace dunkl
