#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "qwi/errors.hpp"
#include "qwi/impedance.hpp"
#include "qwi/potential.hpp"
#include "qwi/scattering.hpp"

namespace qwi {

// Symmetric double barrier (U_b > 0) or double well (U_b < 0): level U_b on
// (-a-b, -a) and (a, a+b), zero elsewhere.
struct DoubleStructure {
  double a = 0.0;
  double b = 0.0;
  double U_b = 0.0;
  double mass = 1.0;
};

inline DoubleStructure make_double_structure(double a, double b, double U_b, double mass) {
  if (!(a > 0.0)) throw ValidationError("double structure: a must be positive");
  if (!(b > 0.0)) throw ValidationError("double structure: b must be positive");
  if (!(mass > 0.0)) throw ValidationError("double structure: mass must be positive");
  if (U_b == 0.0 || !std::isfinite(U_b)) throw ValidationError("double structure: U_b must be nonzero");
  return {a, b, U_b, mass};
}

inline PiecewiseConstantPotential to_potential(const DoubleStructure& s) {
  return build_potential({-s.a - s.b, -s.a, s.a, s.a + s.b}, {0.0, s.U_b, 0.0, s.U_b, 0.0},
                         s.mass);
}

struct GFactors {
  cplx g1, g2, g3, g4;
};

namespace detail {

struct DoubleParams {
  RegionWaveParams outer;    // level 0: z_a, gamma_a
  RegionWaveParams barrier;  // level U_b: z_b, gamma_b
};

inline DoubleParams double_params(double energy, const DoubleStructure& s) {
  return {wave_params(energy, 0.0, s.mass), wave_params(energy, s.U_b, s.mass)};
}

}  // namespace detail

//   G1 = ch(2 g_b b) ch(2 g_a a) - ch^2(g_b b) sh(2 g_a a)
//   G2 = sh(2 g_a a) - ch^2(g_b b) sh(2 g_a a)
//   G3 = sh(2 g_b b) ch(2 g_a a) - sh(2 g_b b) sh(2 g_a a) / 2
//   G4 = sh(2 g_b b) sh(2 g_a a) / 2
inline GFactors g_factors(double energy, const DoubleStructure& s) {
  const auto [outer, barrier] = detail::double_params(energy, s);
  const cplx ga = outer.gamma * s.a;
  const cplx gb = barrier.gamma * s.b;
  const cplx ch_b = std::cosh(gb);
  const cplx ch_2b = std::cosh(2.0 * gb);
  const cplx sh_2b = std::sinh(2.0 * gb);
  const cplx ch_2a = std::cosh(2.0 * ga);
  const cplx sh_2a = std::sinh(2.0 * ga);
  return {ch_2b * ch_2a - ch_b * ch_b * sh_2a,
          sh_2a - ch_b * ch_b * sh_2a,
          sh_2b * ch_2a - 0.5 * sh_2b * sh_2a,
          0.5 * sh_2b * sh_2a};
}

// Z(-a-b) for the load z_a at a+b, assembled from the G factors.
inline ImpedanceState double_barrier_impedance(double energy, const DoubleStructure& s) {
  if (!(energy > 0.0) || energy == s.U_b) {
    throw DomainError("closed form needs E > 0 and E != U_b", energy);
  }
  const auto [outer, barrier] = detail::double_params(energy, s);
  const cplx za = outer.z;
  const cplx zb = barrier.z;
  const auto g = g_factors(energy, s);
  const cplx num = za * za * zb * g.g1 + zb * zb * zb * g.g2 - za * zb * zb * g.g3 +
                   za * za * za * g.g4;
  const cplx den = zb * zb * za * g.g1 + za * za * za * g.g2 - zb * za * za * g.g3 +
                   zb * zb * zb * g.g4;
  return ImpedanceState{zb * num, den, 0.0}.normalized();
}

// The same Z(-a-b) via three impedance steps (b, 2a, b) from the load z_a.
inline ImpedanceState double_barrier_cascade(double energy, const DoubleStructure& s) {
  const auto [outer, barrier] = detail::double_params(energy, s);
  auto z = ImpedanceState::from_value(outer.z);
  z = step_left(z, barrier, s.b);
  z = step_left(z, outer, 2.0 * s.a);
  return step_left(z, barrier, s.b);
}

// T = 1 - |(z_a - Z) / (z_a + Z)|^2. The closed-form pair (z_b num, den) is z_a z_b^2 times
// a unimodular transfer of the load (z_a, 1), so Re(p conj q) = z_a (z_a z_b^2)^2 exactly and
// T = 4 z_a^2 (z_a z_b^2)^2 / |z_a den + z_b num|^2 without cancellation.
inline double double_barrier_transmission(double energy, const DoubleStructure& s) {
  if (!(energy > 0.0) || energy == s.U_b) {
    throw DomainError("closed form needs E > 0 and E != U_b", energy);
  }
  const auto [outer, barrier] = detail::double_params(energy, s);
  const double za = outer.z.real();
  const cplx zb = barrier.z;
  const auto g = g_factors(energy, s);
  const cplx num = za * za * zb * g.g1 + zb * zb * zb * g.g2 - za * zb * zb * g.g3 +
                   za * za * za * g.g4;
  const cplx den = zb * zb * za * g.g1 + za * za * za * g.g2 - zb * za * za * g.g3 +
                   zb * zb * zb * g.g4;
  const double lambda = za * (zb * zb).real();
  return 4.0 * za * za * lambda * lambda / std::norm(za * den + zb * num);
}

struct ParityResiduals {
  double even = 0.0;  // z_a th(g_a a) - Y
  double odd = 0.0;   // z_a cth(g_a a) - Y
};

namespace detail {

inline void require_double_well_window(double energy, const DoubleStructure& s) {
  if (!(s.U_b < 0.0) || !(energy > s.U_b && energy < 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "energy " << energy << " eV is outside the double-well window (" << s.U_b
        << ", 0)";
    throw DomainError(msg.str(), energy);
  }
}

inline double imaginary_part_checked(cplx v, const char* what) {
  if (std::abs(v.real()) > 1e-10 * std::max(1.0, std::abs(v))) {
    throw ConsistencyError(std::string(what) + " is not purely imaginary");
  }
  return v.imag();
}

}  // namespace detail

// Y = z_b (z_a - z_b th(g_b b)) / (z_b - z_a th(g_b b)); the even class solves
// z_a th(g_a a) = Y and the odd class z_a cth(g_a a) = Y.
inline ParityResiduals double_well_eigencondition(double energy, const DoubleStructure& s) {
  detail::require_double_well_window(energy, s);
  const auto [outer, barrier] = detail::double_params(energy, s);
  const cplx za = outer.z;
  const cplx zb = barrier.z;
  const cplx tb = std::tanh(barrier.gamma * s.b);
  const cplx ta = std::tanh(outer.gamma * s.a);
  const cplx y = zb * (za - zb * tb) / (zb - za * tb);
  return {detail::imaginary_part_checked(za * ta - y, "even residual"),
          detail::imaginary_part_checked(za / ta - y, "odd residual")};
}

// Residuals multiplied through by ch(g_b b) (z_b - z_a th(g_b b)) and, for the odd class,
// th(g_a a): same zeros, no poles.
inline ParityResiduals double_well_eigencondition_cleared(double energy,
                                                          const DoubleStructure& s) {
  detail::require_double_well_window(energy, s);
  const auto [outer, barrier] = detail::double_params(energy, s);
  const cplx za = outer.z;
  const cplx zb = barrier.z;
  const cplx cb = std::cosh(barrier.gamma * s.b);
  const cplx sb = std::sinh(barrier.gamma * s.b);
  const cplx ta = detail::saturating_tanh(outer.gamma * s.a);
  const cplx den = zb * cb - za * sb;
  const cplx num = zb * (za * cb - zb * sb);
  return {detail::imaginary_part_checked(za * ta * den - num, "even residual"),
          detail::imaginary_part_checked(za * den - ta * num, "odd residual")};
}

enum class Parity { even, odd };

struct DoubleWellLevel {
  double energy = 0.0;
  Parity parity = Parity::even;
};

// Roots of both parity conditions on (U_b, 0), ascending.
inline std::vector<DoubleWellLevel> double_well_energies(const DoubleStructure& s,
                                                         int grid_points = 4000,
                                                         double margin = 1e-9) {
  if (!(s.U_b < 0.0)) throw DomainError("double-well levels need U_b < 0");
  const double lo = s.U_b + margin;
  const double hi = -margin;
  std::vector<DoubleWellLevel> out;
  for (Parity parity : {Parity::even, Parity::odd}) {
    const auto f = [&](double e) {
      const auto r = double_well_eigencondition_cleared(e, s);
      return parity == Parity::even ? r.even : r.odd;
    };
    const double h = (hi - lo) / (grid_points - 1);
    double prev_e = lo;
    double prev_f = f(lo);
    for (int i = 1; i < grid_points; ++i) {
      const double e = i == grid_points - 1 ? hi : lo + h * i;
      const double fe = f(e);
      if (fe == 0.0) {
        out.push_back({e, parity});
      } else if (prev_f != 0.0 && (fe < 0.0) != (prev_f < 0.0)) {
        out.push_back({detail::bisect(f, prev_e, e, prev_f), parity});
      }
      prev_e = e;
      prev_f = fe;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const DoubleWellLevel& l, const DoubleWellLevel& r) { return l.energy < r.energy; });
  return out;
}

// phi_1 = gamma_b (a + b) - atanh(z_a / z_b), from z_b th(-gamma_b (a+b) + phi_1) = -z_a.
inline cplx double_well_phi1(double energy, const DoubleStructure& s) {
  const auto [outer, barrier] = detail::double_params(energy, s);
  const cplx ratio = outer.z / barrier.z;
  if (barrier.is_zero() || std::abs(std::abs(ratio) - 1.0) == 0.0) {
    throw DomainError("atanh(z_a / z_b) is singular", energy);
  }
  return barrier.gamma * (s.a + s.b) - std::atanh(ratio);
}

// phi_3 from the right condition z_b th(gamma_b (a+b) + phi_3) = z_a.
inline cplx double_well_phi3(double energy, const DoubleStructure& s) {
  const auto [outer, barrier] = detail::double_params(energy, s);
  const cplx ratio = outer.z / barrier.z;
  if (barrier.is_zero() || std::abs(std::abs(ratio) - 1.0) == 0.0) {
    throw DomainError("atanh(z_a / z_b) is singular", energy);
  }
  return std::atanh(ratio) - barrier.gamma * (s.a + s.b);
}

}  // namespace qwi
