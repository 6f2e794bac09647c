#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qwi/bound_states.hpp"
#include "qwi/closed_form.hpp"

namespace qwi::testing {

// [1 + U^2 sinh^2(kappa b) / (4 E (U - E))]^-1
inline double barrier_T(double e, double ub, double b, double m) {
  const double kappa = std::sqrt(m * (ub - e) / hbar_sq_over_2m0);
  const double s = std::sinh(kappa * b);
  return 1.0 / (1.0 + ub * ub * s * s / (4.0 * e * (ub - e)));
}

// Parity of a double-well state from the inner-region phase: the nearer of 0 and i pi/2
// modulo i pi, with the distance to it. Near-degenerate pairs make the phase sensitive to
// the last bits of the energy, so the distance is not at roundoff level there.
struct PhaseParity {
  Parity parity = Parity::even;
  double distance = 0.0;
};

inline PhaseParity parity_from_phase(cplx phi) {
  const double im = std::remainder(phi.imag(), std::numbers::pi);
  const double to_even = std::hypot(phi.real(), im);
  const double to_odd = std::hypot(phi.real(), std::abs(im) - std::numbers::pi / 2);
  return to_even <= to_odd ? PhaseParity{Parity::even, to_even} : PhaseParity{Parity::odd, to_odd};
}

struct RelationCheck {
  double worst = 0.0;
  int points = 0;
};

// 5-point derivative of psi divided by i mu psi, against the cascade Z(x), relative to
// max(|Z|, |z|), at 20 points per interior region. Points right next to a node are skipped.
inline RelationCheck defining_relation(const PiecewiseConstantPotential& u, const BoundState& s) {
  const double h = 1e-3;
  RelationCheck out;
  for (std::size_t r = 1; r <= u.interior_count(); ++r) {
    const double x0 = u.boundaries()[r - 1], x1 = u.boundaries()[r];
    for (int j = 1; j <= 20; ++j) {
      const double x = x0 + (x1 - x0) * j / 21.0;
      if (x - 2 * h <= x0 || x + 2 * h >= x1) continue;
      const std::vector<double> xs{x - 2 * h, x - h, x, x + h, x + 2 * h};
      const auto psi = wavefunction_unnormalized(u, s.energy, s.phases, xs);
      if (std::abs(psi[2]) < 1e-3) continue;
      const double d = (psi[0] - 8 * psi[1] + 8 * psi[3] - psi[4]) / (12 * h);
      const auto w = wave_params(u, s.energy, r);
      const cplx z_fd = d / (cplx(0.0, w.mu) * psi[2]);
      const cplx z = impedance_profile(u, s.energy, std::vector<double>{x})[0].value();
      out.worst = std::max(out.worst, std::abs(z_fd - z) / std::max(std::abs(z), std::abs(w.z)));
      ++out.points;
    }
  }
  return out;
}

inline double psi_norm(const BoundState& s) {
  std::vector<double> xs, psi;
  for (const auto& w : s.psi) {
    xs.push_back(w.x);
    psi.push_back(w.psi);
  }
  return trapezoid_norm(xs, psi);
}

}  // namespace qwi::testing
