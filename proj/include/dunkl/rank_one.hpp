#pragma once

// Rank-one Dunkl kernel E_k(z), z = xy.
//
// Three independent routes:
//   * e1_series: the power series a_0 = 1, a_{m+1} = a_m / (m + 1 + 2k[m even]),
//     obtained from D f = f with D f(z) = f'(z) + k (f(z) - f(-z)) / z. This is
//     the ground truth of the module. It is summed in extended precision so
//     that imaginary arguments, whose terms grow like e^|z| while the sum stays
//     O(|z|^-k), keep full double accuracy.
//   * e1_hyp1f1: e^{xy} 1F1(a, 2k+1, -2xy) with a = 2k or a = k.
//   * e1_bessel_imaginary: E_k(iy) = Gamma(k+1/2) (2/|y|)^{k-1/2}
//     (J_{k-1/2}(|y|) + i sgn(y) J_{k+1/2}(|y|)).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dunkl/errors.hpp"
#include "dunkl/report.hpp"
#include "dunkl/sampling.hpp"

namespace dunkl {

#if defined(__SIZEOF_FLOAT128__)
using wide_real = __float128;
inline constexpr double wide_epsilon = 1.925929944387235853e-34;  // 2^-112
#else
using wide_real = long double;
inline constexpr double wide_epsilon = std::numeric_limits<long double>::epsilon();
#endif

struct Rank1Options {
  double truncation_tol = 1e-22;
  int max_terms = 6000;
  double radius = 200.0;
  /// Largest accepted estimate of the cancellation error relative to |E|.
  double max_precision_loss = 1e-13;
};

class Rank1Kernel {
public:
  explicit Rank1Kernel(double k, Rank1Options opts = {}) : k_(k), opts_(opts) {
    if (!std::isfinite(k) || k < 0.0) throw DomainError("rank-one kernel: k must be finite and >= 0");
    if (!(opts.truncation_tol > 0.0)) throw DomainError("rank-one kernel: truncation_tol must be > 0");
    if (opts.max_terms <= 0) throw DomainError("rank-one kernel: max_terms must be > 0");
  }

  double k() const { return k_; }
  const Rank1Options& options() const { return opts_; }

  /// Series coefficient a_m.
  double coefficient(int m) const {
    double a = 1.0;
    for (int j = 0; j < m; ++j) a /= (j + 1) + ((j % 2 == 0) ? 2.0 * k_ : 0.0);
    return a;
  }

  std::complex<double> series(std::complex<double> z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("e1_series: non-finite argument");
    if (std::abs(z) > opts_.radius) throw DomainError("e1_series: |z| exceeds the series radius");
    const wide_real zr = z.real();
    const wide_real zi = z.imag();
    wide_real tr = 1, ti = 0;  // current term
    wide_real sr = 1, si = 0;  // partial sum
    double abs_sum = 1.0;
    int small = 0;
    for (int m = 0; m < opts_.max_terms; ++m) {
      // The denominators must be exact in wide precision: rounding them to double
      // costs a relative 1e-16 per factor, which the cancellation then amplifies.
      const wide_real d = static_cast<wide_real>(m + 1) + ((m % 2 == 0) ? 2 * static_cast<wide_real>(k_) : wide_real(0));
      const wide_real nr = (tr * zr - ti * zi) / d;
      const wide_real ni = (tr * zi + ti * zr) / d;
      tr = nr;
      ti = ni;
      sr += tr;
      si += ti;
      const double term = std::hypot(static_cast<double>(tr), static_cast<double>(ti));
      const double sum = std::hypot(static_cast<double>(sr), static_cast<double>(si));
      abs_sum += term;
      if (term < opts_.truncation_tol * sum) {
        if (++small >= 3) {
          if (4.0 * wide_epsilon * abs_sum > opts_.max_precision_loss * sum)
            throw NumericError("e1_series: cancellation exceeds working precision at |z| = " +
                               std::to_string(std::abs(z)));
          return {static_cast<double>(sr), static_cast<double>(si)};
        }
      } else {
        small = 0;
      }
    }
    throw NumericError("e1_series: no convergence within max_terms");
  }

  std::complex<double> operator()(std::complex<double> z) const { return series(z); }

private:
  double k_;
  Rank1Options opts_;
};

inline std::complex<double> e1_series(std::complex<double> z, double k, const Rank1Options& opts = {}) {
  return Rank1Kernel(k, opts).series(z);
}

/// E_k(iy) for real y through Bessel functions of order k -+ 1/2.
inline std::complex<double> e1_bessel_imaginary(double y, double k) {
  if (!std::isfinite(y)) throw DomainError("e1_bessel_imaginary: non-finite argument");
  if (k < 0.0) throw DomainError("e1_bessel_imaginary: k must be >= 0");
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, 0.0};
  const double pref = boost::math::tgamma(k + 0.5) * std::pow(2.0 / ay, k - 0.5);
  const double even = pref * boost::math::cyl_bessel_j(k - 0.5, ay);
  const double odd = pref * boost::math::cyl_bessel_j(k + 0.5, ay);
  return {even, y > 0 ? odd : -odd};
}

enum class Hyp1F1Variant {
  alternate, // 1F1(2k, 2k+1, -2xy)
  standard,  // 1F1(k, 2k+1, -2xy)
};

inline std::string to_string(Hyp1F1Variant v) { return v == Hyp1F1Variant::alternate ? "1F1(2k,2k+1,-2xy)" : "1F1(k,2k+1,-2xy)"; }

/// Power series of 1F1(a, b, z) for z >= 0 and a, b > 0: all terms are positive.
inline long double hyp1f1_positive_series(double a, double b, double z, int max_terms = 20000) {
  long double term = 1.0L, sum = 1.0L;
  int small = 0;
  for (int m = 0; m < max_terms; ++m) {
    term *= (static_cast<long double>(a) + m) / (static_cast<long double>(b) + m) * z / (m + 1);
    sum += term;
    if (m > z && term < 1e-19L * sum) {
      if (++small >= 3) return sum;
    } else {
      small = 0;
    }
  }
  throw NumericError("1F1 series: no convergence");
}

/// log of 1F1(a, b, z) for real z, using Kummer's transform
/// 1F1(a,b,z) = e^z 1F1(b-a,b,-z) when z < 0 so the summed series never alternates.
inline long double log_hyp1f1(double a, double b, double z) {
  if (z < 0.0) return z + std::log(hyp1f1_positive_series(b - a, b, -z));
  return std::log(hyp1f1_positive_series(a, b, z));
}

/// e^{xy} 1F1(a, 2k+1, -2xy) with a chosen by `variant`.
inline double e1_hyp1f1(double x, double y, double k, Hyp1F1Variant variant = Hyp1F1Variant::standard) {
  if (!(k > 0.0)) throw DomainError("e1_hyp1f1: k must be > 0");
  const double z = x * y;
  if (!std::isfinite(z)) throw DomainError("e1_hyp1f1: non-finite argument");
  const double a = variant == Hyp1F1Variant::alternate ? 2.0 * k : k;
  const double b = 2.0 * k + 1.0;
  const long double lg = z + log_hyp1f1(a, b, -2.0 * z);
  const double v = static_cast<double>(std::exp(lg));
  if (!std::isfinite(v)) throw NumericError("e1_hyp1f1: overflow");
  return v;
}

/// |E_k(z)| |z|^k e^{-|z|} for real z.
inline double d1_real_ratio(const Rank1Kernel& kernel, double z) {
  const double k = kernel.k();
  const double mag = std::abs(z);
  try {
    return std::abs(kernel.series(z)) * std::pow(mag, k) * std::exp(-mag);
  } catch (const NumericError&) {
    // Cancellation near the negative axis: use the positive Kummer-form series.
    const long double log_e = k == 0.0 ? z : z + log_hyp1f1(k, 2.0 * k + 1.0, -2.0 * z);
    return static_cast<double>(std::exp(log_e + k * std::log(mag) - mag));
  }
}

/// Samples |z| log-uniformly in [0.1, 100] and reports
///   real side: sup |E_k(z)| |z|^k e^{-|z|}  (z of both signs),
///   imaginary side: sup |E_k(iz)| |z|^k.
/// Passes when both sups are finite and change by < 10% from N to 2N samples.
inline VerificationReport check_d1_estimates(double k, std::uint64_t sample_count, std::uint64_t seed) {
  if (!(k >= 0.0)) throw DomainError("check_d1_estimates: k must be >= 0");
  if (sample_count == 0) throw DomainError("check_d1_estimates: sample_count must be > 0");
  const auto start = std::chrono::steady_clock::now();
  const Rank1Kernel kernel(k);
  const std::uint64_t total = 2 * sample_count;
  std::vector<double> re(total), im(total), zs(total);
  parallel_for(total, [&](std::size_t i) {
    SampleRng rng(seed, i);
    const double mag = rng.log_uniform(0.1, 100.0);
    const double z = rng.uniform() < 0.5 ? -mag : mag;
    zs[i] = z;
    re[i] = d1_real_ratio(kernel, z);
    im[i] = std::abs(e1_bessel_imaginary(z, k)) * std::pow(mag, k);
  });

  double re_base = 0, re_all = 0, im_base = 0, im_all = 0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::isfinite(re[i]) || !std::isfinite(im[i]))
      throw NumericError("check_d1_estimates: overflow at z = " + std::to_string(zs[i]));
    if (i < sample_count) {
      re_base = std::max(re_base, re[i]);
      im_base = std::max(im_base, im[i]);
    }
    if (re[i] > re_all) {
      re_all = re[i];
      arg = i;
    }
    im_all = std::max(im_all, im[i]);
  }
  const double re_change = re_all / re_base - 1.0;
  const double im_change = im_all / im_base - 1.0;

  VerificationReport r;
  r.check_name = "d1_estimates";
  r.sample_count = sample_count;
  r.empirical_sup = re_all;
  r.sup_base = re_base;
  r.arg_sup = {{"z", zs[arg]}, {"k", k}};
  r.margin = 0.1 - std::max(re_change, im_change);
  r.pass = r.margin > 0.0;
  r.seed = seed;
  r.details = {{"real_sup", re_all}, {"real_sup_base", re_base}, {"imag_sup", im_all}, {"imag_sup_base", im_base}};
  r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

} // namespace dunkl
