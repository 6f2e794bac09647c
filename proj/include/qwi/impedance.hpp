#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "qwi/potential.hpp"
#include "qwi/units.hpp"

namespace qwi {

using cplx = std::complex<double>;

// Characteristic impedance z = sqrt((E - U) / m) (principal branch, E - U + i0) and
// propagation constant gamma = i * (m / hbar) * z. For E < U, z = +i|z| and gamma = -kappa.
struct RegionWaveParams {
  cplx z;
  cplx gamma;
  double mu = 0.0;  // m / hbar, see mass_over_hbar()

  bool is_zero() const { return z == cplx(0.0, 0.0); }
};

inline RegionWaveParams wave_params(double energy, double level, double mass) {
  const double mu = mass_over_hbar(mass);
  const cplx z = std::sqrt(cplx((energy - level) / mass, 0.0));
  return {z, cplx(0.0, mu) * z, mu};
}

inline RegionWaveParams wave_params(const PiecewiseConstantPotential& u, double energy,
                                    std::size_t region) {
  return wave_params(energy, u.level(region), u.mass());
}

// Z = p / q. q == 0 is a pole of Z (a node of psi). The pair is kept at max(|p|, |q|) == 1;
// log_norm accumulates the log of the magnitudes divided out, so that
// exp(log_norm) * (p, q) follows (psi' / (i mu), psi) up to a unit phase.
struct ImpedanceState {
  cplx p{0.0, 0.0};
  cplx q{1.0, 0.0};
  double log_norm = 0.0;

  static ImpedanceState from_value(cplx z) { return ImpedanceState{z, 1.0, 0.0}.normalized(); }
  static ImpedanceState pole() { return {cplx(1.0, 0.0), cplx(0.0, 0.0), 0.0}; }

  cplx value() const { return p / q; }
  bool is_pole() const { return q == cplx(0.0, 0.0); }

  ImpedanceState normalized() const {
    const double s = std::max(std::abs(p), std::abs(q));
    if (s == 0.0 || !std::isfinite(s)) return *this;
    return {p / s, q / s, log_norm + std::log(s)};
  }
};

// |p q' - p' q| <= tol * max(|p q'|, |p' q|, floor)
inline bool projective_equal(const ImpedanceState& a, const ImpedanceState& b, double tol,
                             double floor = std::numeric_limits<double>::min()) {
  const cplx lhs = a.p * b.q;
  const cplx rhs = b.p * a.q;
  return std::abs(lhs - rhs) <= tol * std::max({std::abs(lhs), std::abs(rhs), floor});
}

inline double projective_distance(const ImpedanceState& a, const ImpedanceState& b) {
  const cplx lhs = a.p * b.q;
  const cplx rhs = b.p * a.q;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

namespace detail {

inline constexpr double tanh_saturation = 20.0;

inline cplx saturating_tanh(cplx w) {
  if (w.real() > tanh_saturation) return {1.0, 0.0};
  if (w.real() < -tanh_saturation) return {-1.0, 0.0};
  return std::tanh(w);
}

// log |cosh w|
inline double log_abs_cosh(cplx w) {
  const double re = std::abs(w.real());
  if (re > tanh_saturation) return re - std::log(2.0);
  return std::log(std::abs(std::cosh(w)));
}

// One region of width dx; direction = -1 moves the reference point left, +1 moves it
// right. Acts on the pair as the (psi'/(i mu), psi) transfer
//   [ch, d z sh; d sh/z, ch],  d = direction,
// divided by cosh(gamma dx) when that is real and positive (evanescent regions).
inline ImpedanceState step(const ImpedanceState& in, const RegionWaveParams& w, double dx,
                           int direction) {
  if (dx == 0.0) return in;
  const double sgn = static_cast<double>(direction);
  ImpedanceState out;
  double log_scale = 0.0;
  if (w.is_zero()) {
    // Linear psi: Z -> Z / (1 -/+ i mu dx Z).
    out.p = in.p;
    out.q = in.q + cplx(0.0, sgn * w.mu * dx) * in.p;
  } else if (w.gamma.real() == 0.0) {
    // oscillatory: undivided, cos changes sign
    const cplx gd = w.gamma * dx;
    const cplx c = std::cosh(gd);
    const cplx sh = std::sinh(gd);
    out.p = c * in.p + sgn * w.z * sh * in.q;
    out.q = c * in.q + sgn * (sh / w.z) * in.p;
  } else {
    const cplx gd = w.gamma * dx;
    const cplx t = saturating_tanh(gd);
    out.p = in.p + sgn * w.z * t * in.q;
    out.q = in.q + sgn * (t / w.z) * in.p;
    log_scale = log_abs_cosh(gd);
  }
  if (out.p == cplx(0.0, 0.0) && out.q == cplx(0.0, 0.0)) {
    // Input was the exactly-annihilated eigenvector (Z = -/+ z with saturated tanh),
    // which is a fixed point of the exact map.
    return in;
  }
  out.log_norm = in.log_norm + log_scale;
  return out.normalized();
}

}  // namespace detail

// Impedance at the left edge of a region of width dx whose right-edge impedance is z_right.
inline ImpedanceState step_left(const ImpedanceState& z_right, const RegionWaveParams& w,
                                double dx) {
  return detail::step(z_right, w, dx, -1);
}

// Impedance at the right edge of a region of width dx whose left-edge impedance is z_left.
inline ImpedanceState step_right(const ImpedanceState& z_left, const RegionWaveParams& w,
                                 double dx) {
  return detail::step(z_left, w, dx, +1);
}

// Z(x_0) from the load Z(x_N), stepping through interior regions N..1.
inline ImpedanceState cascade(const PiecewiseConstantPotential& u, double energy,
                              const ImpedanceState& load) {
  ImpedanceState z = load;
  for (std::size_t i = u.interior_count(); i >= 1; --i) {
    z = step_left(z, wave_params(u, energy, i), u.width(i));
  }
  return z;
}

// Z at every boundary: result[i] = Z(x_i), i = 0..N, with result[N] = load.
inline std::vector<ImpedanceState> cascade_profile(const PiecewiseConstantPotential& u,
                                                   double energy, const ImpedanceState& load) {
  const std::size_t n = u.interior_count();
  std::vector<ImpedanceState> out(n + 1);
  out[n] = load;
  for (std::size_t i = n; i >= 1; --i) {
    out[i - 1] = step_left(out[i], wave_params(u, energy, i), u.width(i));
  }
  return out;
}

// Z(x_N) from Z(x_0), stepping through interior regions 1..N.
inline ImpedanceState cascade_right(const PiecewiseConstantPotential& u, double energy,
                                    const ImpedanceState& start) {
  ImpedanceState z = start;
  for (std::size_t i = 1; i <= u.interior_count(); ++i) {
    z = step_right(z, wave_params(u, energy, i), u.width(i));
  }
  return z;
}

}  // namespace qwi
