#pragma once

// Transfer-matrix solver used to cross-check the impedance cascade. It depends only on the
// potential type and the unit constant; wave numbers are recomputed here.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qwi/errors.hpp"
#include "qwi/potential.hpp"
#include "qwi/units.hpp"

namespace qwi::oracle {

using cplx = std::complex<double>;

// Maps plane-wave coefficients (A_0, B_0) of the left exterior, referenced at x_0, to
// (A_{N+1}, B_{N+1}) of the right exterior, referenced at x_N. det = k_0 / k_{N+1}.
struct TransferMatrix {
  cplx m11, m12, m21, m22;

  cplx determinant() const { return m11 * m22 - m12 * m21; }
};

struct TmScattering {
  double T = 0.0;
  double R = 0.0;
};

namespace detail {

// k^2 in nm^-2.
inline double wave_number_sq(const PiecewiseConstantPotential& u, double energy,
                             std::size_t region) {
  return u.mass() * (energy - u.level(region)) / hbar_sq_over_2m0;
}

// (psi, psi') across a region of width d, real matrix times exp(log_scale).
struct RegionPropagator {
  std::array<double, 4> m{};  // row-major [[m0, m1], [m2, m3]]
  double log_scale = 0.0;
};

inline RegionPropagator propagator(double k2, double d) {
  RegionPropagator p;
  if (k2 > 0.0) {
    const double k = std::sqrt(k2);
    const double c = std::cos(k * d);
    const double s = std::sin(k * d);
    p.m = {c, s / k, -k * s, c};
  } else if (k2 < 0.0) {
    const double kappa = std::sqrt(-k2);
    const double e = std::exp(-2.0 * kappa * d);
    const double ch = 0.5 * (1.0 + e);
    const double sh = 0.5 * (1.0 - e);
    p.m = {ch, sh / kappa, kappa * sh, ch};
    p.log_scale = kappa * d;
  } else {
    p.m = {1.0, d, 0.0, 1.0};
  }
  return p;
}

// Inverse propagator (right edge to left edge); det of the forward matrix is 1 up to scale.
inline RegionPropagator inverse(const RegionPropagator& p) {
  RegionPropagator q;
  q.m = {p.m[3], -p.m[1], -p.m[2], p.m[0]};
  q.log_scale = p.log_scale;
  return q;
}

template <class V>
std::array<V, 2> propagate(const RegionPropagator& p, const std::array<V, 2>& v) {
  return {p.m[0] * v[0] + p.m[1] * v[1], p.m[2] * v[0] + p.m[3] * v[1]};
}

template <class V>
double rescale(std::array<V, 2>& v) {
  const double s = std::max(std::abs(v[0]), std::abs(v[1]));
  if (s == 0.0) return 0.0;
  v[0] /= s;
  v[1] /= s;
  return std::log(s);
}

inline void require_propagating(const PiecewiseConstantPotential& u, double energy) {
  if (!(energy > u.levels().front() && energy > u.levels().back())) {
    throw DomainError("transfer matrix scattering needs propagating exteriors", energy);
  }
}

}  // namespace detail

// Plain product without rescaling; overflows for very opaque structures.
inline TransferMatrix tm_matrix(const PiecewiseConstantPotential& u, double energy) {
  detail::require_propagating(u, energy);
  const std::size_t last = u.region_count() - 1;
  const double k0 = std::sqrt(detail::wave_number_sq(u, energy, 0));
  const double kn = std::sqrt(detail::wave_number_sq(u, energy, last));
  // P: (psi, psi')(x_0) -> (psi, psi')(x_N)
  std::array<double, 4> p{1.0, 0.0, 0.0, 1.0};
  for (std::size_t i = 1; i < last; ++i) {
    const auto r = detail::propagator(detail::wave_number_sq(u, energy, i), u.width(i));
    const double f = std::exp(r.log_scale);
    const std::array<double, 4> m{r.m[0] * f, r.m[1] * f, r.m[2] * f, r.m[3] * f};
    p = {m[0] * p[0] + m[1] * p[2], m[0] * p[1] + m[1] * p[3],
         m[2] * p[0] + m[3] * p[2], m[2] * p[1] + m[3] * p[3]};
  }
  const cplx i{0.0, 1.0};
  // (A, B) -> (psi, psi') = (A + B, i k (A - B)); inverse: A = (psi + psi'/(ik)) / 2, ...
  const std::array<cplx, 4> s0{1.0, 1.0, i * k0, -i * k0};
  std::array<cplx, 4> ps{p[0] * s0[0] + p[1] * s0[2], p[0] * s0[1] + p[1] * s0[3],
                         p[2] * s0[0] + p[3] * s0[2], p[2] * s0[1] + p[3] * s0[3]};
  const cplx inv_ik = 1.0 / (i * kn);
  return {0.5 * (ps[0] + inv_ik * ps[2]), 0.5 * (ps[1] + inv_ik * ps[3]),
          0.5 * (ps[0] - inv_ik * ps[2]), 0.5 * (ps[1] - inv_ik * ps[3])};
}

// Left incidence, flux-normalized: outgoing wave (1, 0) on the right is propagated back
// to the left exterior with per-region rescaling.
inline TmScattering tm_scattering(const PiecewiseConstantPotential& u, double energy) {
  detail::require_propagating(u, energy);
  const std::size_t last = u.region_count() - 1;
  const double k0 = std::sqrt(detail::wave_number_sq(u, energy, 0));
  const double kn = std::sqrt(detail::wave_number_sq(u, energy, last));
  const cplx i{0.0, 1.0};
  std::array<cplx, 2> v{1.0, i * kn};
  double log_scale = 0.0;
  for (std::size_t r = last - 1; r >= 1; --r) {
    const auto p =
        detail::inverse(detail::propagator(detail::wave_number_sq(u, energy, r), u.width(r)));
    v = detail::propagate(p, v);
    log_scale += p.log_scale + detail::rescale(v);
  }
  const cplx a = 0.5 * (v[0] + v[1] / (i * k0));
  const cplx b = 0.5 * (v[0] - v[1] / (i * k0));
  TmScattering out;
  out.R = std::norm(b / a);
  out.T = (kn / k0) * std::exp(-2.0 * log_scale) / std::norm(a);
  return out;
}

namespace detail {

struct Shot {
  double match = 0.0;  // psi' + kappa_right psi at x_N, on the rescaled vector
  int nodes = 0;
};

// Zeros of the pure-exponential tail solution on (-inf, x_N] plus the right exterior.
inline int tail_nodes(double psi, double dpsi, double kappa) {
  // psi = alpha e^{-kappa s} + beta e^{kappa s}, s = x - x_N > 0
  const double beta = 0.5 * (psi + dpsi / kappa);
  const double alpha = 0.5 * (psi - dpsi / kappa);
  if (beta == 0.0) return 0;
  const double ratio = -alpha / beta;
  return ratio > 1.0 ? 1 : 0;
}

// Shoot from the left exterior (psi = e^{kappa_0 (x - x_0)}) to x_N, counting zeros of psi
// on (x_0, x_N] and in the right exterior.
inline Shot shoot(const PiecewiseConstantPotential& u, double energy) {
  const std::size_t last = u.region_count() - 1;
  const double kappa0 = std::sqrt(-wave_number_sq(u, energy, 0));
  const double kappan = std::sqrt(-wave_number_sq(u, energy, last));
  std::array<double, 2> v{1.0, kappa0};
  int nodes = 0;
  for (std::size_t r = 1; r < last; ++r) {
    const double k2 = wave_number_sq(u, energy, r);
    const double d = u.width(r);
    const auto p = propagator(k2, d);
    const auto next = propagate(p, v);
    if (k2 > 0.0) {
      // psi(s) = R sin(k s + w)
      const double k = std::sqrt(k2);
      const double w = std::atan2(v[0], v[1] / k);
      const double pi = std::numbers::pi;
      nodes += static_cast<int>(std::floor((k * d + w) / pi) - std::floor(w / pi));
    } else {
      // At most one zero; it lies in (0, d] iff psi changes sign (or hits zero at d).
      if (next[1] == 0.0 && next[0] == 0.0) {
      } else if (next[0] == 0.0 || (v[0] != 0.0 && (next[0] < 0.0) != (v[0] < 0.0))) {
        ++nodes;
      }
    }
    v = next;
    rescale(v);
  }
  nodes += tail_nodes(v[0], v[1], kappan);
  return {v[1] + kappan * v[0], nodes};
}

}  // namespace detail

inline int tm_states_below(const PiecewiseConstantPotential& u, double energy) {
  if (u.interior_count() == 0 || energy <= u.min_interior_level()) return 0;
  return detail::shoot(u, energy).nodes;
}

inline double tm_match(const PiecewiseConstantPotential& u, double energy) {
  return detail::shoot(u, energy).match;
}

// Eigenenergies: grid scan with Sturm counts, cells holding several levels are split,
// each single-level cell is bisected on the matching function.
inline std::vector<double> tm_bound_states(const PiecewiseConstantPotential& u,
                                           int grid_points = 512, double margin = 1e-9) {
  if (u.interior_count() == 0) return {};
  const double lo = u.min_interior_level() + margin;
  const double hi = u.min_exterior_level() - margin;
  if (!(lo < hi)) return {};

  std::vector<double> out;
  const auto solve_cell = [&](double a, double b) {
    double fa = tm_match(u, a);
    const double fb = tm_match(u, b);
    if ((fa < 0.0) == (fb < 0.0)) {
      const int ca = tm_states_below(u, a);
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        (tm_states_below(u, m) > ca ? b : a) = m;
      }
      out.push_back(0.5 * (a + b));
      return;
    }
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = tm_match(u, m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.push_back(0.5 * (a + b));
  };
  const auto split = [&](auto&& self, double a, double b, int ca, int cb, int depth) -> void {
    if (cb <= ca) return;
    if (cb - ca == 1 || depth > 120) {
      solve_cell(a, b);
      return;
    }
    const double m = 0.5 * (a + b);
    const int cm = tm_states_below(u, m);
    self(self, a, m, ca, cm, depth + 1);
    self(self, m, b, cm, cb, depth + 1);
  };

  const double h = (hi - lo) / (grid_points - 1);
  double prev_e = lo;
  int prev_c = tm_states_below(u, lo);
  for (int i = 1; i < grid_points; ++i) {
    const double e = i == grid_points - 1 ? hi : lo + h * i;
    const int c = tm_states_below(u, e);
    split(split, prev_e, e, prev_c, c, 0);
    prev_e = e;
    prev_c = c;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qwi::oracle
