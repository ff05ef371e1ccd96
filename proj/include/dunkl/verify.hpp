#pragma once

// Sampling harness for the kernel estimates. Every check evaluates a ratio that
// the corresponding estimate claims to be bounded, over seeded samples, and
// reports its supremum. Stability checks evaluate 2N samples and compare the
// sup over the first N with the sup over all 2N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/errors.hpp"
#include "dunkl/geometry.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/rank_one.hpp"
#include "dunkl/report.hpp"
#include "dunkl/root_system.hpp"
#include "dunkl/sampling.hpp"

namespace dunkl {

struct VerifyOptions {
  /// Products |x||y| are drawn log-uniformly from [scale_min, scale_max].
  double scale_min = 1e-2;
  double scale_max = 1e3;
  /// Absolute cap on any accepted supremum.
  double cap = 1e6;
  /// Largest accepted relative change of the sup from N to 2N samples.
  double stability = 0.1;
  OdeOptions ode{1e-8, 1e-300};
  /// When set, receives every sampled ratio in sample order.
  std::vector<double>* ratios = nullptr;
};

enum class ExponentVariant {
  n,          // prod_{i,j} (x_i y_j)^{gamma/n} = (prod x_i)^gamma (prod y_j)^gamma
  n_squared,  // prod_{i,j} (x_i y_j)^{gamma/n^2} = (prod x_i)^{gamma/n} (prod y_j)^{gamma/n}
};

inline std::string to_string(ExponentVariant v) { return v == ExponentVariant::n ? "n" : "n_squared"; }

inline ExponentVariant parse_exponent_variant(const std::string& s) {
  if (s == "n") return ExponentVariant::n;
  if (s == "n_squared" || s == "n2") return ExponentVariant::n_squared;
  throw DomainError("unknown exponent variant '" + s + "' (expected n or n_squared)");
}

/// Uniform direction on the unit-sphere slice of C_delta: fold a uniform direction
/// into the chamber, then reject points outside the cone.
inline Eigen::VectorXd sample_cone_direction(const RootSystem& rs, const ReflectionGroup& group, const ConeSpec& spec,
                                             SampleRng& rng, int max_tries = 100000) {
  for (int i = 0; i < max_tries; ++i) {
    const Eigen::VectorXd u = orbit_rep_plus(rs, group, rng.unit_vector(rs.rank()));
    if (in_cone_delta(rs, spec, u)) return u;
  }
  throw DomainError("sample_cone_direction: C_delta looks empty (delta too large)");
}

/// Direction of a uniform point of the simplex spanned by the generators.
inline Eigen::VectorXd sample_polytope_direction(const Polytope& poly, SampleRng& rng) {
  const Eigen::VectorXd x = poly.point(rng.simplex(poly.dim()));
  return x / x.norm();
}

inline Eigen::VectorXcd complex_scaled(const Eigen::VectorXd& y, cd z) { return y.cast<cd>() * z; }

namespace detail {

struct RatioValue {
  double ratio = 0.0;
  std::size_t g = 0;
};

struct PairSample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  cd z{1.0, 0.0};
};

inline nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd json_vec(const nlohmann::json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

inline nlohmann::json sample_json(const PairSample& s, std::size_t g) {
  return {{"x", vec_json(s.x)}, {"y", vec_json(s.y)}, {"z", {s.z.real(), s.z.imag()}}, {"g", g}};
}

inline PairSample json_sample(const nlohmann::json& j) {
  PairSample s{json_vec(j.at("x")), json_vec(j.at("y")), {1.0, 0.0}};
  if (j.contains("z")) s.z = {j["z"][0].get<double>(), j["z"][1].get<double>()};
  return s;
}

// Splits the product scale between x and y.
inline PairSample scaled_pair(const Eigen::VectorXd& ux, const Eigen::VectorXd& uy, SampleRng& rng,
                              const VerifyOptions& opts) {
  const double prod = rng.log_uniform(opts.scale_min, opts.scale_max);
  const double r = std::sqrt(prod) * rng.log_uniform(0.5, 2.0);
  return {ux * r, uy * (prod / r), {1.0, 0.0}};
}

inline std::string describe(const PairSample& s) { return sample_json(s, 0).dump(); }

struct SupScan {
  double all = 0.0;
  double base = 0.0;
  std::size_t arg = 0;
};

inline SupScan scan(const std::vector<RatioValue>& v, std::size_t base_count) {
  SupScan s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].ratio)) {
      s.all = std::numeric_limits<double>::infinity();
      s.arg = i;
      return s;
    }
    if (i < base_count) s.base = std::max(s.base, v[i].ratio);
    if (v[i].ratio > s.all) {
      s.all = v[i].ratio;
      s.arg = i;
    }
  }
  return s;
}

template <class Draw, class Ratio>
void run_samples(std::size_t total, std::uint64_t seed, Draw&& draw, Ratio&& ratio, std::vector<PairSample>& samples,
                 std::vector<RatioValue>& values) {
  samples.resize(total);
  values.resize(total);
  parallel_for(total, [&](std::size_t i) {
    SampleRng rng(seed, i);
    samples[i] = draw(rng, i);
    try {
      values[i] = ratio(samples[i], i);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at sample " + describe(samples[i]));
    }
  });
}

inline void export_ratios(const VerifyOptions& opts, const std::vector<RatioValue>& values) {
  if (!opts.ratios) return;
  opts.ratios->clear();
  for (const auto& v : values) opts.ratios->push_back(v.ratio);
}

// Fills the stability fields: pass iff finite, under the cap, and the sup moves
// by less than opts.stability from N to 2N samples.
inline void finish_stability(VerificationReport& r, const SupScan& s, const VerifyOptions& opts) {
  r.empirical_sup = s.all;
  r.sup_base = s.base;
  const double change = s.base > 0.0 ? s.all / s.base - 1.0 : (s.all > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.margin = std::isfinite(s.all) ? opts.stability - change : -std::numeric_limits<double>::infinity();
  r.pass = std::isfinite(s.all) && s.all <= opts.cap && change < opts.stability;
  r.details["relative_change"] = change;
  r.details["cap"] = opts.cap;
  r.details["stability"] = opts.stability;
}

inline std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

inline KernelContext tuned(const KernelContext& ctx, const VerifyOptions& opts) {
  KernelOptions ko = ctx.options();
  ko.ode = opts.ode;
  return ctx.with_options(ko);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Ratio functions. Each is a pure function of its sample, so a report's
// arg_sup can be evaluated again and must give back empirical_sup.

/// max_g |E_k(z x, g y)| e^{-Re(z) <x+, y+>}.
inline detail::RatioValue ez_ratio(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y, cd z) {
  const auto ev = eval_orbit(ctx, x, complex_scaled(y, z), 1.0);
  const double shift = ev.scale_exponent - z.real() * pairing_plus(ctx.roots(), ctx.group(), x, y);
  detail::RatioValue best;
  for (std::size_t g = 0; g < ev.scaled_values.size(); ++g) {
    const double r = std::abs(ev.scaled_values[g]) * std::exp(shift);
    if (g == 0 || r > best.ratio) best = {r, g};
  }
  return best;
}

/// max_g E_k(x, g y) sqrt(w_k(x) w_k(y)) e^{-<x,y>}, and the smallest E_k(x, g y) e^{-<x+,y+>}.
inline detail::RatioValue main_theorem_ratio(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                             double* min_scaled = nullptr) {
  const auto& rs = ctx.roots();
  const double lw = 0.5 * (log_weight_w_k(rs, x) + log_weight_w_k(rs, y));
  if (!std::isfinite(lw)) throw NumericError("main theorem ratio: w_k vanishes at a sampled point");
  const auto ev = eval_orbit(ctx, x, y, 1.0);
  detail::RatioValue best;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < ev.scaled_values.size(); ++g) {
    const double v = ev.scaled_values[g].real();
    lowest = std::min(lowest, v);
    const double r = std::max(v, 0.0) * std::exp(ev.scale_exponent - x.dot(y) + lw);
    if (g == 0 || r > best.ratio) best = {r, g};
  }
  if (min_scaled) *min_scaled = lowest;
  return best;
}

/// max_g E_k(x, g y) e^{-<x,y>} prod_{i,j} (x_i y_j)^{e}, x_i, y_j coordinates in the polytope.
inline detail::RatioValue lemma_polytope_ratio(const KernelContext& ctx, const Polytope& poly, ExponentVariant variant,
                                               const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                               double* min_scaled = nullptr) {
  const int n = ctx.roots().rank();
  const Eigen::VectorXd cx = poly.coordinates(x);
  const Eigen::VectorXd cy = poly.coordinates(y);
  if ((cx.array() <= 0.0).any() || (cy.array() <= 0.0).any())
    throw NumericError("lemma polytope ratio: sample outside the polytope");
  const double gamma = ctx.roots().gamma();
  const double power = variant == ExponentVariant::n ? gamma : gamma / n;
  const double ld = power * (cx.array().log().sum() + cy.array().log().sum());
  const auto ev = eval_orbit(ctx, x, y, 1.0);
  detail::RatioValue best;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < ev.scaled_values.size(); ++g) {
    const double v = ev.scaled_values[g].real();
    lowest = std::min(lowest, v);
    const double r = std::max(v, 0.0) * std::exp(ev.scale_exponent - x.dot(y) + ld);
    if (g == 0 || r > best.ratio) best = {r, g};
  }
  if (min_scaled) *min_scaled = lowest;
  return best;
}

/// max_g |E_k(i x, g y)| sqrt(w_k(x) w_k(y)).
inline detail::RatioValue corollary_ratio(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto& rs = ctx.roots();
  const double lw = 0.5 * (log_weight_w_k(rs, x) + log_weight_w_k(rs, y));
  if (!std::isfinite(lw)) throw NumericError("corollary ratio: w_k vanishes at a sampled point");
  const OrbitVector v = eval_imaginary(ctx, x, y, 1.0);
  detail::RatioValue best;
  for (std::size_t g = 0; g < v.size(); ++g) {
    const double r = std::abs(v[g]) * std::exp(lw);
    if (g == 0 || r > best.ratio) best = {r, g};
  }
  return best;
}

/// t^gamma e^{-t <x,y>} E_k(t x, g y).
inline double boundedness_value(const KernelContext& ctx, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                std::size_t g, double t) {
  const auto ev = eval_orbit(ctx, x, y, t);
  const double lt = ctx.roots().gamma() == 0.0 ? 0.0 : ctx.roots().gamma() * std::log(t);
  return ev.scaled_values[g].real() * std::exp(lt + ev.scale_exponent - t * x.dot(y));
}

// ---------------------------------------------------------------------------

/// |E_k(z x, y)| <= e^{Re(z) <x+, y+>} for z in {t, i t, t (1+i)/sqrt 2}.
inline VerificationReport verify_ez(const KernelContext& context, std::uint64_t samples, std::uint64_t seed,
                                    VerifyOptions opts = {.scale_max = 50.0}) {
  if (samples == 0) throw DomainError("verify_ez: samples must be > 0");
  const auto start = std::chrono::steady_clock::now();
  const KernelContext ctx = detail::tuned(context, opts);
  const int n = ctx.roots().rank();
  const cd kinds[3] = {cd(1.0, 0.0), cd(0.0, 1.0), cd(std::sqrt(0.5), std::sqrt(0.5))};
  std::vector<detail::PairSample> xs;
  std::vector<detail::RatioValue> vals;
  detail::run_samples(
      samples, seed,
      [&](SampleRng& rng, std::size_t i) {
        auto s = detail::scaled_pair(rng.unit_vector(n), rng.unit_vector(n), rng, opts);
        s.z = kinds[i % 3];
        return s;
      },
      [&](const detail::PairSample& s, std::size_t) { return ez_ratio(ctx, s.x, s.y, s.z); }, xs, vals);
  detail::export_ratios(opts, vals);

  const auto scan = detail::scan(vals, vals.size());
  const double bound = 1.0 + 1e-9;
  std::uint64_t violations = 0;
  double kind_sup[3] = {0, 0, 0};
  for (std::size_t i = 0; i < vals.size(); ++i) {
    violations += !(vals[i].ratio <= bound);
    kind_sup[i % 3] = std::max(kind_sup[i % 3], vals[i].ratio);
  }
  VerificationReport r;
  r.check_name = "ez";
  r.sample_count = samples;
  r.empirical_sup = scan.all;
  r.sup_base = scan.all;
  r.arg_sup = detail::sample_json(xs[scan.arg], vals[scan.arg].g);
  r.margin = bound - scan.all;
  r.pass = violations == 0;
  r.seed = seed;
  r.details = {{"violations", violations}, {"bound", bound},     {"sup_real", kind_sup[0]},
               {"sup_imaginary", kind_sup[1]}, {"sup_diagonal", kind_sup[2]}, {"scale_max", opts.scale_max}};
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

struct BoundednessOptions {
  /// The grid spans [T 10^-decades, T].
  double decades = 5.0;
  /// Largest accepted ratio between the sup increments of the last two decades.
  double increment_ratio = 0.5;
  double cap = 1e6;
  OdeOptions ode{1e-10, 1e-300};
};

/// t -> t^gamma e^{-t <x,y>} E_k(t x, g y) on a geometric grid of N points in (0, T].
/// With s_1, s_2, s_3 the sups over the last three decades, the function shows no
/// growth trend when s_3 <= s_2, or when the increments shrink geometrically:
/// s_3 - s_2 <= increment_ratio (s_2 - s_1). A bounded function approaching its
/// plateau like 1/t shrinks them tenfold per decade; log or power growth does not.
inline VerificationReport verify_lemma_boundedness(const KernelContext& context, const Eigen::VectorXd& x,
                                                   const Eigen::VectorXd& y, std::size_t g, double T, std::size_t N,
                                                   BoundednessOptions opts = {}) {
  const auto& rs = context.roots();
  if (!(T > 0.0) || N < 2) throw DomainError("verify_lemma_boundedness: need T > 0 and N >= 2");
  if (g >= context.order()) throw DomainError("verify_lemma_boundedness: group index out of range");
  if (!in_chamber(rs, x) || !in_chamber(rs, y)) throw DomainError("verify_lemma_boundedness: x and y must lie in C");
  if (opts.decades < 3.0) throw DomainError("verify_lemma_boundedness: need at least three decades");
  const auto start = std::chrono::steady_clock::now();
  KernelOptions ko = context.options();
  ko.ode = opts.ode;
  const KernelContext ctx = context.with_options(ko);

  std::vector<double> ts(N), fs(N);
  for (std::size_t j = 0; j < N; ++j)
    ts[j] = T * std::pow(10.0, -opts.decades * static_cast<double>(N - 1 - j) / static_cast<double>(N - 1));
  parallel_for(N, [&](std::size_t j) { fs[j] = boundedness_value(ctx, x, y, g, ts[j]); });

  constexpr double none = -std::numeric_limits<double>::infinity();
  double sup = none;
  double decade[3] = {none, none, none};  // [T/1000, T/100), [T/100, T/10), [T/10, T]
  std::size_t arg = 0;
  bool finite = true;
  for (std::size_t j = 0; j < N; ++j) {
    finite = finite && std::isfinite(fs[j]);
    if (fs[j] > sup) {
      sup = fs[j];
      arg = j;
    }
    const double rel = ts[j] / T * (1.0 + 1e-12);
    if (rel >= 0.1) decade[2] = std::max(decade[2], fs[j]);
    else if (rel >= 0.01) decade[1] = std::max(decade[1], fs[j]);
    else if (rel >= 0.001) decade[0] = std::max(decade[0], fs[j]);
  }
  if (decade[0] == none || decade[1] == none)
    throw DomainError("verify_lemma_boundedness: N too small to populate the last three decades");
  const double inc_last = decade[2] - decade[1];
  const double inc_prev = decade[1] - decade[0];
  double ratio = 0.0;
  if (inc_last > 0.0) ratio = inc_prev > 0.0 ? inc_last / inc_prev : std::numeric_limits<double>::infinity();
  const double projected = ratio < 1.0 ? decade[2] + std::max(inc_last, 0.0) * ratio / (1.0 - ratio)
                                       : std::numeric_limits<double>::infinity();

  VerificationReport r;
  r.check_name = "lemma_boundedness";
  r.sample_count = N;
  r.empirical_sup = sup;
  r.sup_base = decade[1];
  r.arg_sup = {{"x", detail::vec_json(x)}, {"y", detail::vec_json(y)}, {"g", g}, {"t", ts[arg]}};
  r.margin = opts.increment_ratio - ratio;
  r.pass = finite && sup <= opts.cap && ratio <= opts.increment_ratio;
  r.details = {{"T", T},
               {"decade_sups", {decade[0], decade[1], decade[2]}},
               {"increment_ratio", ratio},
               {"projected_sup", projected},
               {"value_at_T", fs.back()},
               {"value_at_t_min", fs.front()},
               {"t_min", ts.front()}};
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

/// E_k(x, g y) prod (x_i y_j)^e e^{-<x,y>} on the polytope, for both readings of the exponent.
inline VerificationReport verify_lemma_polytope(const KernelContext& context, const Polytope& poly, std::uint64_t samples,
                                                ExponentVariant variant, std::uint64_t seed,
                                                VerifyOptions opts = {.scale_max = 1e4}) {
  if (samples == 0) throw DomainError("verify_lemma_polytope: samples must be > 0");
  for (int i = 0; i < poly.dim(); ++i)
    if (!in_chamber(context.roots(), poly.generator(i)))
      throw DomainError("verify_lemma_polytope: polytope generators must lie in C");
  const auto start = std::chrono::steady_clock::now();
  const KernelContext ctx = detail::tuned(context, opts);
  std::vector<detail::PairSample> xs;
  std::vector<detail::RatioValue> vals;
  std::vector<double> lows(2 * samples);
  detail::run_samples(
      2 * samples, seed,
      [&](SampleRng& rng, std::size_t) {
        const Eigen::VectorXd ux = sample_polytope_direction(poly, rng);
        const Eigen::VectorXd uy = sample_polytope_direction(poly, rng);
        return detail::scaled_pair(ux, uy, rng, opts);
      },
      [&](const detail::PairSample& s, std::size_t i) {
        double low = 0.0;
        const auto v = lemma_polytope_ratio(ctx, poly, variant, s.x, s.y, &low);
        lows[i] = low;
        return v;
      },
      xs, vals);
  detail::export_ratios(opts, vals);

  const auto scan = detail::scan(vals, samples);
  const double lowest = *std::min_element(lows.begin(), lows.end());
  VerificationReport r;
  r.check_name = "lemma_polytope_" + to_string(variant);
  r.sample_count = samples;
  r.arg_sup = detail::sample_json(xs[scan.arg], vals[scan.arg].g);
  r.arg_sup["generators"] = nlohmann::json::array();
  for (int i = 0; i < poly.dim(); ++i) r.arg_sup["generators"].push_back(detail::vec_json(poly.generator(i)));
  r.arg_sup["variant"] = to_string(variant);
  r.seed = seed;
  detail::finish_stability(r, scan, opts);
  r.details["min_scaled_kernel"] = lowest;
  r.details["positivity_ok"] = lowest >= -1e-12;
  r.details["variant"] = to_string(variant);
  // Doubling N at a fixed scale range cannot see growth in |x||y|, so the sups
  // of the two top scale decades are reported as well.
  double top = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double sc = xs[i].x.norm() * xs[i].y.norm();
    if (sc >= opts.scale_max / 10.0) top = std::max(top, vals[i].ratio);
    else if (sc >= opts.scale_max / 100.0) prev = std::max(prev, vals[i].ratio);
  }
  const double growth = prev > 0.0 ? top / prev : std::numeric_limits<double>::infinity();
  r.details["top_decade_sups"] = {prev, top};
  r.details["scale_growth"] = growth;
  r.details["bounded_in_scale"] = growth <= 1.5;
  r.pass = r.pass && lowest >= -1e-12;
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

/// E_k(x, g y) sqrt(w_k(x) w_k(y)) e^{-<x,y>} for x, y in the polytope.
inline VerificationReport verify_main_theorem(const KernelContext& context, const Polytope& poly, std::uint64_t samples,
                                              std::uint64_t seed, VerifyOptions opts = {}) {
  if (samples == 0) throw DomainError("verify_main_theorem: samples must be > 0");
  for (int i = 0; i < poly.dim(); ++i)
    if (!in_chamber(context.roots(), poly.generator(i)))
      throw DomainError("verify_main_theorem: polytope generators must lie in C");
  const auto start = std::chrono::steady_clock::now();
  const KernelContext ctx = detail::tuned(context, opts);
  std::vector<detail::PairSample> xs;
  std::vector<detail::RatioValue> vals;
  std::vector<double> lows(2 * samples);
  detail::run_samples(
      2 * samples, seed,
      [&](SampleRng& rng, std::size_t) {
        const Eigen::VectorXd ux = sample_polytope_direction(poly, rng);
        const Eigen::VectorXd uy = sample_polytope_direction(poly, rng);
        return detail::scaled_pair(ux, uy, rng, opts);
      },
      [&](const detail::PairSample& s, std::size_t i) {
        double low = 0.0;
        const auto v = main_theorem_ratio(ctx, s.x, s.y, &low);
        lows[i] = low;
        return v;
      },
      xs, vals);
  detail::export_ratios(opts, vals);

  const auto scan = detail::scan(vals, samples);
  const double lowest = *std::min_element(lows.begin(), lows.end());
  VerificationReport r;
  r.check_name = "main_theorem";
  r.sample_count = samples;
  r.arg_sup = detail::sample_json(xs[scan.arg], vals[scan.arg].g);
  r.seed = seed;
  detail::finish_stability(r, scan, opts);
  r.details["min_scaled_kernel"] = lowest;
  r.details["positivity_ok"] = lowest >= -1e-12;
  r.details["scale_max"] = opts.scale_max;
  r.pass = r.pass && lowest >= -1e-12;
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

/// |E_k(i x, g y)| sqrt(w_k(x) w_k(y)) over x, y in C_delta, |x||y| in [scale_min, scale_max].
inline VerificationReport verify_corollary_imaginary(const KernelContext& context, const ConeSpec& spec,
                                                     std::uint64_t samples, std::uint64_t seed,
                                                     VerifyOptions opts = {.scale_max = 1e4}) {
  if (!(spec.delta > 0.0)) throw DomainError("verify_corollary_imaginary: delta must be > 0");
  if (samples == 0) throw DomainError("verify_corollary_imaginary: samples must be > 0");
  const auto start = std::chrono::steady_clock::now();
  const KernelContext ctx = detail::tuned(context, opts);
  const auto& rs = ctx.roots();
  std::vector<detail::PairSample> xs;
  std::vector<detail::RatioValue> vals;
  detail::run_samples(
      2 * samples, seed,
      [&](SampleRng& rng, std::size_t) {
        const Eigen::VectorXd ux = sample_cone_direction(rs, ctx.group(), spec, rng);
        const Eigen::VectorXd uy = sample_cone_direction(rs, ctx.group(), spec, rng);
        return detail::scaled_pair(ux, uy, rng, opts);
      },
      [&](const detail::PairSample& s, std::size_t) { return corollary_ratio(ctx, s.x, s.y); }, xs, vals);
  detail::export_ratios(opts, vals);

  const auto scan = detail::scan(vals, samples);
  // Small-argument branch: (Ez) gives |E| <= 1, so the ratio is at most sqrt(w w).
  double small_violation = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double sw = std::sqrt(weight_w_k(rs, xs[i].x) * weight_w_k(rs, xs[i].y));
    small_violation = std::max(small_violation, vals[i].ratio - sw * (1.0 + 1e-9));
  }
  VerificationReport r;
  r.check_name = "corollary_imaginary";
  r.sample_count = samples;
  r.arg_sup = detail::sample_json(xs[scan.arg], vals[scan.arg].g);
  r.seed = seed;
  detail::finish_stability(r, scan, opts);
  r.details["delta"] = spec.delta;
  r.details["root_scope"] = spec.root_scope == RootScope::all_positive ? "all_positive" : "simple_only";
  r.details["scale_min"] = opts.scale_min;
  r.details["scale_max"] = opts.scale_max;
  r.details["ez_consistent"] = small_violation <= 0.0;
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

/// Evaluates the ratio at a report's arg_sup again.
inline double reevaluate_arg_sup(const KernelContext& context, const VerificationReport& r,
                                 const VerifyOptions& opts = {}) {
  const KernelContext ctx = detail::tuned(context, opts);
  const auto& a = r.arg_sup;
  if (r.check_name == "d1_estimates") {
    const double z = a.at("z").get<double>();
    const double k = a.at("k").get<double>();
    return d1_real_ratio(Rank1Kernel(k), z);
  }
  if (r.check_name == "lemma_boundedness") {
    BoundednessOptions bo;
    KernelOptions ko = context.options();
    ko.ode = bo.ode;
    return boundedness_value(context.with_options(ko), detail::json_vec(a.at("x")), detail::json_vec(a.at("y")),
                             a.at("g").get<std::size_t>(), a.at("t").get<double>());
  }
  const auto s = detail::json_sample(a);
  if (r.check_name == "ez") return ez_ratio(ctx, s.x, s.y, s.z).ratio;
  if (r.check_name == "main_theorem") return main_theorem_ratio(ctx, s.x, s.y).ratio;
  if (r.check_name == "corollary_imaginary") return corollary_ratio(ctx, s.x, s.y).ratio;
  if (r.check_name.rfind("lemma_polytope_", 0) == 0) {
    std::vector<Eigen::VectorXd> gens;
    for (const auto& gj : a.at("generators")) gens.push_back(detail::json_vec(gj));
    return lemma_polytope_ratio(ctx, Polytope(gens), parse_exponent_variant(a.at("variant").get<std::string>()), s.x, s.y)
        .ratio;
  }
  throw DomainError("reevaluate_arg_sup: unknown check '" + r.check_name + "'");
}

} // namespace dunkl
