#pragma once

// Root systems of rank <= 4, their reflection groups, and the orbit geometry
// used by the kernel: dual basis, chamber representatives, the weight w_k.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/errors.hpp"

namespace dunkl {

enum class Family { z2n, a2, b2, i2m };

inline Family parse_family(std::string_view name) {
  if (name == "z2n") return Family::z2n;
  if (name == "a2") return Family::a2;
  if (name == "b2") return Family::b2;
  if (name == "i2m") return Family::i2m;
  throw DomainError("unknown root system family '" + std::string(name) + "' (expected z2n, a2, b2, i2m)");
}

inline std::string family_name(Family f) {
  switch (f) {
    case Family::z2n: return "z2n";
    case Family::a2: return "a2";
    case Family::b2: return "b2";
    case Family::i2m: return "i2m";
  }
  return "?";
}

/// Family-specific sizes: `n` is the rank of Z2^n, `m` the order parameter of I2(m).
struct FamilyParams {
  int n = 2;
  int m = 3;
};

/// A reduced root system R spanning R^n, with a fixed positive subsystem, its
/// simple roots and a G-invariant multiplicity function given per root orbit.
///
/// Normalization: Z2^n uses the unit vectors e_i; B2 uses simple roots
/// {e1-e2, e2} (long roots have squared norm 2, short roots 1); I2(m) and A2 = I2(3)
/// use unit roots at angles pi*j/m, j = 0..m-1.
struct RootSystem {
  Family family = Family::z2n;
  int family_param = 0;
  std::vector<Eigen::VectorXd> positive_roots;
  std::vector<std::size_t> simple;      // indices into positive_roots, ordered alpha_1..alpha_n
  std::vector<std::size_t> root_orbit;  // orbit class of each positive root
  std::vector<std::string> orbit_names;
  std::vector<double> orbit_k;          // multiplicity per orbit class

  int rank() const { return static_cast<int>(simple.size()); }
  std::size_t num_positive() const { return positive_roots.size(); }
  const Eigen::VectorXd& root(std::size_t a) const { return positive_roots[a]; }
  const Eigen::VectorXd& simple_root(std::size_t i) const { return positive_roots[simple[i]]; }
  double k(std::size_t a) const { return orbit_k[root_orbit[a]]; }

  /// gamma_k = sum of k over the positive roots.
  double gamma() const {
    double g = 0.0;
    for (std::size_t a = 0; a < positive_roots.size(); ++a) g += k(a);
    return g;
  }

  bool trivial_multiplicity() const {
    return std::all_of(orbit_k.begin(), orbit_k.end(), [](double v) { return v == 0.0; });
  }

  /// Simple roots as the columns of an n x n matrix.
  Eigen::MatrixXd simple_matrix() const {
    Eigen::MatrixXd s(rank(), rank());
    for (int i = 0; i < rank(); ++i) s.col(i) = simple_root(i);
    return s;
  }

  std::string label() const {
    switch (family) {
      case Family::z2n: return "Z2^" + std::to_string(family_param);
      case Family::a2: return "A2";
      case Family::b2: return "B2";
      case Family::i2m: return "I2(" + std::to_string(family_param) + ")";
    }
    return "?";
  }
};

namespace detail {

inline Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

inline void build_dihedral(RootSystem& rs, int m) {
  for (int j = 0; j < m; ++j) {
    const double th = std::numbers::pi * j / m;
    rs.positive_roots.push_back(vec2(std::cos(th), std::sin(th)));
    rs.root_orbit.push_back((m % 2 == 0) ? static_cast<std::size_t>(j % 2) : 0U);
  }
  rs.simple = {0, static_cast<std::size_t>(m - 1)};
  if (m % 2 == 0)
    rs.orbit_names = {"even", "odd"};
  else
    rs.orbit_names = {"all"};
}

} // namespace detail

/// Number of root orbits, i.e. of multiplicities build_root_system expects.
inline std::size_t orbit_count(Family family, FamilyParams params) {
  switch (family) {
    case Family::z2n: return static_cast<std::size_t>(std::max(params.n, 0));
    case Family::b2: return 2;
    case Family::a2: return 1;
    case Family::i2m: return params.m % 2 == 0 ? 2 : 1;
  }
  return 0;
}

/// Builds one of the supported root systems. `multiplicities` lists k per root
/// orbit, in the order of `RootSystem::orbit_names`:
///   z2n: one value per coordinate (e1..en);  b2: (long, short);
///   i2m: one value for odd m, (even, odd) for even m;  a2: one value.
inline RootSystem build_root_system(Family family, FamilyParams params, const std::vector<double>& multiplicities) {
  RootSystem rs;
  rs.family = family;
  switch (family) {
    case Family::z2n: {
      const int n = params.n;
      if (n < 1 || n > 4) throw DomainError("z2n: rank n must lie in [1, 4]");
      rs.family_param = n;
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[i] = 1.0;
        rs.positive_roots.push_back(e);
        rs.simple.push_back(static_cast<std::size_t>(i));
        rs.root_orbit.push_back(static_cast<std::size_t>(i));
        rs.orbit_names.push_back("e" + std::to_string(i + 1));
      }
      break;
    }
    case Family::b2: {
      rs.family_param = 2;
      using detail::vec2;
      rs.positive_roots = {vec2(1, -1), vec2(0, 1), vec2(1, 0), vec2(1, 1)};
      rs.root_orbit = {0, 1, 1, 0};
      rs.simple = {0, 1};
      rs.orbit_names = {"long", "short"};
      break;
    }
    case Family::a2:
      rs.family_param = 3;
      detail::build_dihedral(rs, 3);
      break;
    case Family::i2m: {
      const int m = params.m;
      if (m < 2 || m > 512) throw DomainError("i2m: m must lie in [2, 512]");
      rs.family_param = m;
      detail::build_dihedral(rs, m);
      break;
    }
  }
  if (multiplicities.size() != rs.orbit_names.size()) {
    throw DomainError(rs.label() + " expects " + std::to_string(rs.orbit_names.size()) +
                      " multiplicities, got " + std::to_string(multiplicities.size()));
  }
  for (double k : multiplicities) {
    if (!std::isfinite(k) || k < 0.0) throw DomainError("multiplicities must be finite and nonnegative");
  }
  rs.orbit_k = multiplicities;
  return rs;
}

/// Matrix of the reflection x -> x - 2 <a,x>/<a,a> a.
inline Eigen::MatrixXd reflection(const Eigen::VectorXd& alpha) {
  const double nn = alpha.squaredNorm();
  if (!(nn > 0.0)) throw DomainError("reflection: root vector must be nonzero");
  const auto n = alpha.size();
  return Eigen::MatrixXd::Identity(n, n) - (2.0 / nn) * alpha * alpha.transpose();
}

/// Dual basis (lambda_i) of the simple roots: <lambda_i, alpha_j> = delta_ij.
inline std::vector<Eigen::VectorXd> dual_basis(const RootSystem& rs) {
  const Eigen::MatrixXd s = rs.simple_matrix();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s.transpose());
  if (!lu.isInvertible()) throw DomainError("dual_basis: simple roots are not a basis");
  const Eigen::MatrixXd lam = lu.inverse();  // columns are lambda_i
  const Eigen::MatrixXd check = lam.transpose() * s;
  if ((check - Eigen::MatrixXd::Identity(rs.rank(), rs.rank())).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericError("dual_basis: simple-root matrix is ill conditioned");
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < rs.rank(); ++i) out.push_back(lam.col(i));
  return out;
}

/// rho = sum of the dual basis; lies in the open chamber.
inline Eigen::VectorXd chamber_center(const RootSystem& rs) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(rs.rank());
  for (const auto& l : dual_basis(rs)) r += l;
  return r;
}

/// w_k(x) = prod_{a in R+} |<a,x>|^{2 k(a)}.
inline double weight_w_k(const RootSystem& rs, const Eigen::VectorXd& x) {
  double w = 1.0;
  for (std::size_t a = 0; a < rs.num_positive(); ++a) {
    if (rs.k(a) == 0.0) continue;
    w *= std::pow(std::abs(rs.root(a).dot(x)), 2.0 * rs.k(a));
  }
  return w;
}

/// log w_k(x); -inf on a hyperplane with positive multiplicity.
inline double log_weight_w_k(const RootSystem& rs, const Eigen::VectorXd& x) {
  double lw = 0.0;
  for (std::size_t a = 0; a < rs.num_positive(); ++a) {
    if (rs.k(a) == 0.0) continue;
    lw += 2.0 * rs.k(a) * std::log(std::abs(rs.root(a).dot(x)));
  }
  return lw;
}

struct GroupElement {
  Eigen::MatrixXd matrix;
  std::vector<int> word;  // simple-reflection indices; matrix = s_{word[0]} * s_{word[1]} * ...
};

/// The finite reflection group generated by the simple reflections, with
/// the left-multiplication tables g -> sigma_a g for every positive root.
class ReflectionGroup {
public:
  std::size_t size() const { return elements_.size(); }
  const GroupElement& operator[](std::size_t g) const { return elements_[g]; }
  const std::vector<GroupElement>& elements() const { return elements_; }
  static constexpr std::size_t identity() { return 0; }

  std::optional<std::size_t> find(const Eigen::MatrixXd& m, double tol = 1e-10) const {
    const double key = (m * probe_)[0];
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), key - 1e-8,
                               [](const auto& e, double v) { return e.first < v; });
    for (; lo != keys_.end() && lo->first <= key + 1e-8; ++lo) {
      if ((elements_[lo->second].matrix - m).cwiseAbs().maxCoeff() <= tol) return lo->second;
    }
    return std::nullopt;
  }

  /// Index of sigma_a * g for positive root a.
  std::size_t reflect_left(std::size_t root, std::size_t g) const { return left_[root][g]; }
  /// Index of the reflection sigma_a itself.
  std::size_t reflection_index(std::size_t root) const { return left_[root][identity()]; }

  std::size_t multiply(std::size_t g, std::size_t h) const {
    auto idx = find(elements_[g].matrix * elements_[h].matrix);
    if (!idx) throw NumericError("group is not closed under multiplication");
    return *idx;
  }

  std::size_t inverse(std::size_t g) const {
    auto idx = find(elements_[g].matrix.transpose());
    if (!idx) throw NumericError("group is not closed under inversion");
    return *idx;
  }

  Eigen::VectorXd act(std::size_t g, const Eigen::VectorXd& x) const { return elements_[g].matrix * x; }

private:
  void insert(GroupElement e) {
    const double key = (e.matrix * probe_)[0];
    const std::size_t idx = elements_.size();
    elements_.push_back(std::move(e));
    auto pos = std::lower_bound(keys_.begin(), keys_.end(), key,
                                [](const auto& p, double v) { return p.first < v; });
    keys_.insert(pos, {key, idx});
  }

  std::vector<GroupElement> elements_;
  std::vector<std::pair<double, std::size_t>> keys_;
  std::vector<std::vector<std::size_t>> left_;
  Eigen::VectorXd probe_;

  friend ReflectionGroup generate_group(const RootSystem&, std::size_t);
};

/// Breadth-first closure of the simple reflections. Throws if more than
/// `cap` elements appear.
inline ReflectionGroup generate_group(const RootSystem& rs, std::size_t cap = 1024) {
  const int n = rs.rank();
  ReflectionGroup grp;
  // A generic interior direction separates group elements through g*probe.
  grp.probe_ = chamber_center(rs);
  for (int i = 0; i < n; ++i) grp.probe_[i] *= 1.0 + 0.1234567 * (i + 1);

  std::vector<Eigen::MatrixXd> gens;
  for (int i = 0; i < n; ++i) gens.push_back(reflection(rs.simple_root(i)));

  grp.insert({Eigen::MatrixXd::Identity(n, n), {}});
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t g = queue.front();
    queue.pop_front();
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd m = gens[i] * grp.elements_[g].matrix;
      if (grp.find(m)) continue;
      if (grp.size() >= cap) throw DomainError("group closure exceeded cap of " + std::to_string(cap) + " elements");
      std::vector<int> word{i};
      word.insert(word.end(), grp.elements_[g].word.begin(), grp.elements_[g].word.end());
      grp.insert({std::move(m), std::move(word)});
      queue.push_back(grp.size() - 1);
    }
  }

  grp.left_.resize(rs.num_positive());
  for (std::size_t a = 0; a < rs.num_positive(); ++a) {
    const Eigen::MatrixXd s = reflection(rs.root(a));
    grp.left_[a].resize(grp.size());
    for (std::size_t g = 0; g < grp.size(); ++g) {
      auto idx = grp.find(s * grp.elements_[g].matrix);
      if (!idx) throw NumericError("root reflection outside the generated group");
      grp.left_[a][g] = *idx;
    }
  }
  return grp;
}

/// Index of the element g maximizing <g x, rho>; g x is then the chamber representative.
inline std::size_t orbit_rep_index(const RootSystem& rs, const ReflectionGroup& group, const Eigen::VectorXd& x) {
  const Eigen::VectorXd rho = chamber_center(rs);
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < group.size(); ++g) {
    const double v = (group[g].matrix * x).dot(rho);
    if (v > best_val + 1e-14 * (1.0 + std::abs(v))) {
      best_val = v;
      best = g;
    }
  }
  return best;
}

/// x+ : the point of the orbit G.x in the closed fundamental chamber.
inline Eigen::VectorXd orbit_rep_plus(const RootSystem& rs, const ReflectionGroup& group, const Eigen::VectorXd& x) {
  return group.act(orbit_rep_index(rs, group, x), x);
}

/// <x+, y+>, which equals max_g <x, g y>.
inline double pairing_plus(const RootSystem& rs, const ReflectionGroup& group, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
  return orbit_rep_plus(rs, group, x).dot(orbit_rep_plus(rs, group, y));
}

/// +1 for beta in R+, -1 for beta in R-. Throws if beta is not a root.
inline int sign_of_root(const RootSystem& rs, const Eigen::VectorXd& beta, double tol = 1e-9) {
  bool is_root = false;
  for (const auto& a : rs.positive_roots) {
    if ((a - beta).norm() <= tol || (a + beta).norm() <= tol) {
      is_root = true;
      break;
    }
  }
  if (!is_root) throw DomainError("sign_of_root: vector is not a root");
  const Eigen::VectorXd c = rs.simple_matrix().fullPivLu().solve(beta);
  if ((c.array() >= -tol).all()) return 1;
  if ((c.array() <= tol).all()) return -1;
  throw NumericError("sign_of_root: mixed-sign simple-root coefficients");
}

/// The order the closure must produce for each family.
inline std::size_t expected_group_order(const RootSystem& rs) {
  switch (rs.family) {
    case Family::z2n: return std::size_t{1} << rs.family_param;
    case Family::b2: return 8;
    case Family::a2: return 6;
    case Family::i2m: return 2 * static_cast<std::size_t>(rs.family_param);
  }
  return 0;
}

} // namespace dunkl
