#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "qwi/errors.hpp"
#include "qwi/impedance.hpp"
#include "qwi/potential.hpp"

namespace qwi {

enum class Incidence { left, right };

struct ScatteringResult {
  double energy = 0.0;
  cplx r;          // reflection amplitude referenced to the entry boundary
  double T = 0.0;  // transmission probability
  double R = 0.0;  // reflection probability
};

struct Resonance {
  double energy = 0.0;
  double width_hint = 0.0;  // half-width at T = 1/2; NaN when T never drops to 1/2 nearby
  double transmission = 0.0;
};

// r_m = exp(2 gamma_m x_m) (z_m - Z(x_m)) / (z_m + Z(x_m))
inline cplx reflection_amplitude_at(cplx impedance, const RegionWaveParams& w, double x) {
  const cplx den = w.z + impedance;
  if (den == cplx(0.0, 0.0)) {
    throw PoleError("reflection amplitude has a pole: Z = -z");
  }
  return std::exp(2.0 * w.gamma * x) * (w.z - impedance) / den;
}

// phi with Z = z tanh(gamma x + phi). The imaginary part is reduced to (-pi/2, pi/2].
// A one-directional wave (Z = +z or Z = -z) yields +inf or -inf in the real part.
inline cplx phase_from_impedance(const ImpedanceState& impedance, const RegionWaveParams& w,
                                 double x) {
  if (w.is_zero()) {
    throw DomainError("phase undefined where E equals the region level");
  }
  const cplx num = w.z * impedance.q + impedance.p;
  const cplx den = w.z * impedance.q - impedance.p;
  const double inf = std::numeric_limits<double>::infinity();
  if (den == cplx(0.0, 0.0)) return {inf, 0.0};
  if (num == cplx(0.0, 0.0)) return {-inf, 0.0};
  cplx phi = 0.5 * std::log(num / den) - w.gamma * x;
  double im = std::remainder(phi.imag(), std::numbers::pi);
  if (im <= -std::numbers::pi / 2) im += std::numbers::pi;
  return {phi.real(), im};
}

inline cplx phase_from_impedance(cplx impedance, const RegionWaveParams& w, double x) {
  return phase_from_impedance(ImpedanceState::from_value(impedance), w, x);
}

namespace detail {

inline void require_propagating(const PiecewiseConstantPotential& u, double energy) {
  if (!(energy > u.levels().front() && energy > u.levels().back())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "energy " << energy << " eV is not above both exterior levels ("
        << u.levels().front() << ", " << u.levels().back()
        << "); use bound-state analysis for evanescent exteriors";
    throw DomainError(msg.str(), energy);
  }
}

}  // namespace detail

// Transmission and reflection for a wave incident from the given side. T uses the
// flux carried by the cascade's accumulated norm, so it keeps relative precision for
// opaque structures where 1 - |r|^2 would cancel.
inline ScatteringResult transmission(const PiecewiseConstantPotential& u, double energy,
                                     Incidence incidence = Incidence::left) {
  detail::require_propagating(u, energy);
  const std::size_t last = u.region_count() - 1;
  const double z_left = wave_params(u, energy, 0).z.real();
  const double z_right = wave_params(u, energy, last).z.real();

  ScatteringResult out;
  out.energy = energy;
  if (incidence == Incidence::left) {
    const auto z0 = cascade(u, energy, ImpedanceState::from_value(z_right));
    const cplx plus = z_left * z0.q + z0.p;
    out.r = (z_left * z0.q - z0.p) / plus;
    out.T = 4.0 * z_left * z_right * std::exp(-2.0 * z0.log_norm) / std::norm(plus);
  } else {
    const auto zn = cascade_right(u, energy, ImpedanceState::from_value(-z_left));
    const cplx minus = z_right * zn.q - zn.p;
    out.r = (z_right * zn.q + zn.p) / minus;
    out.T = 4.0 * z_left * z_right * std::exp(-2.0 * zn.log_norm) / std::norm(minus);
  }
  out.R = std::norm(out.r);
  return out;
}

inline std::vector<ScatteringResult> sweep(const PiecewiseConstantPotential& u,
                                           std::span<const double> energies,
                                           Incidence incidence = Incidence::left) {
  std::vector<ScatteringResult> out;
  out.reserve(energies.size());
  for (double e : energies) out.push_back(transmission(u, e, incidence));
  return out;
}

struct ResonanceOptions {
  double peak_threshold = 1e-6;  // keep peaks with T >= 1 - peak_threshold
  double dip_threshold = 1e-3;   // T must dip below 1 - dip_threshold around a peak
  Incidence incidence = Incidence::left;
};

// 64 points per eV, at least 16.
inline int default_resonance_grid(double lo, double hi) {
  return std::max(16, static_cast<int>(std::ceil(64.0 * (hi - lo))));
}

namespace detail {

template <class F>
double golden_section_max(F&& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200; ++it) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

// Bisection for f(x) = 0 given f(a), f(b) of opposite sign.
template <class F>
double bisect(F&& f, double a, double b, double fa) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Local maxima of T on a uniform grid over [lo, hi], each refined by golden-section search
// and kept when T >= 1 - peak_threshold. Peaks narrower than the grid spacing can be missed
// only if their Lorentzian tail does not lift the nearest grid point above its neighbours.
inline std::vector<Resonance> find_resonances(const PiecewiseConstantPotential& u, double lo,
                                              double hi, int grid_points,
                                              const ResonanceOptions& opt = {}) {
  if (grid_points < 16) throw DomainError("resonance search needs at least 16 grid points");
  if (!(hi > lo)) throw DomainError("empty resonance search interval");
  detail::require_propagating(u, lo);

  const auto T = [&](double e) { return transmission(u, e, opt.incidence).T; };
  const int n = grid_points;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> e(n), t(n);
  for (int i = 0; i < n; ++i) {
    e[i] = i == n - 1 ? hi : lo + h * i;
    t[i] = T(e[i]);
  }

  std::vector<Resonance> out;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(t[i] > t[i - 1] && t[i] >= t[i + 1])) continue;
    int l = i - 1;
    while (l > 0 && t[l - 1] <= t[l]) --l;
    int r = i + 1;
    while (r + 1 < n && t[r + 1] <= t[r]) ++r;
    if (std::min(t[l], t[r]) >= 1.0 - opt.dip_threshold) continue;

    const double peak = detail::golden_section_max(T, e[i - 1], e[i + 1]);
    const double t_peak = T(peak);
    if (t_peak < 1.0 - opt.peak_threshold) continue;

    const auto half = [&](double x) { return T(x) - 0.5; };
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = left;
    for (double x = peak - h, prev = peak; x >= e[l] - 0.5 * h; prev = x, x -= h) {
      const double xx = std::max(x, e[l]);
      if (half(xx) < 0.0) {
        left = detail::bisect(half, xx, prev, half(xx));
        break;
      }
      if (xx == e[l]) break;
    }
    for (double x = peak + h, prev = peak; x <= e[r] + 0.5 * h; prev = x, x += h) {
      const double xx = std::min(x, e[r]);
      if (half(xx) < 0.0) {
        right = detail::bisect(half, prev, xx, half(prev));
        break;
      }
      if (xx == e[r]) break;
    }
    double width = std::numeric_limits<double>::quiet_NaN();
    if (!std::isnan(left) && !std::isnan(right)) {
      width = 0.5 * (right - left);
    } else if (!std::isnan(left)) {
      width = peak - left;
    } else if (!std::isnan(right)) {
      width = right - peak;
    }

    if (!out.empty() && std::abs(out.back().energy - peak) < 1e-9) continue;
    out.push_back({peak, width, t_peak});
  }
  return out;
}

}  // namespace qwi
