#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "dunkl/errors.hpp"

namespace dunkl {

using ComplexState = std::vector<std::complex<double>>;

struct OdeOptions {
  double rtol = 1e-12;
  // Effectively relative control: imaginary-argument kernels decay like a power of t.
  double atol = 1e-300;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) march of x' = rhs(x, t) from t0 to t1
/// (either direction). No step crosses a chunk boundary, chunks being no longer
/// than chunk(t), so oscillatory right-hand sides are never stepped over blind;
/// the step size carries over from chunk to chunk. The state is checked for
/// NaN/Inf after every chunk. Returns the number of accepted steps.
template <class Rhs, class Chunk>
std::size_t integrate_complex(Rhs&& rhs, ComplexState& x, double t0, double t1, const OdeOptions& opts, Chunk&& chunk) {
  namespace odeint = boost::numeric::odeint;
  if (t0 == t1) return 0;
  auto stepper = odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_fehlberg78<ComplexState>());
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double dt = dir * std::min(std::abs(t1 - t0), chunk(t0)) / 16.0;
  std::size_t steps = 0;
  auto system = [&rhs](const ComplexState& s, ComplexState& ds, double tt) { rhs(s, ds, tt); };
  while (dir * (t1 - t) > 0.0) {
    const double len = std::min(std::abs(t1 - t), chunk(t));
    const double next = (std::abs(t1 - t) <= len) ? t1 : t + dir * len;
    int rejected = 0;
    while (dir * (next - t) > 0.0) {
      const bool truncated = dir * (t + dt - next) > 0.0;
      double trial = truncated ? next - t : dt;
      const double before = t;
      if (stepper.try_step(system, x, t, trial) == odeint::success) {
        ++steps;
        rejected = 0;
        if (truncated) t = next;  // land exactly on the boundary
        if (!truncated || dir * (trial - dt) > 0.0) dt = trial;
      } else {
        dt = trial;
        if (++rejected > 500 || std::abs(dt) <= 1e-14 * std::max(1.0, std::abs(before)))
          throw NumericError("ODE step size underflow near t = " + std::to_string(before));
      }
    }
    for (const auto& v : x) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericError("ODE state became non-finite near t = " + std::to_string(next));
    }
  }
  return steps;
}

} // namespace dunkl
