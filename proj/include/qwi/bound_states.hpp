#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "qwi/errors.hpp"
#include "qwi/impedance.hpp"
#include "qwi/potential.hpp"
#include "qwi/scattering.hpp"

namespace qwi {

struct WaveSample {
  double x = 0.0;
  double psi = 0.0;
};

struct BoundState {
  double energy = 0.0;
  std::vector<cplx> phases;  // phi_1 .. phi_N
  int node_count = 0;
  std::vector<WaveSample> psi;
};

struct EnergyWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// (min interior level, min exterior level), shrunk by margin at both ends.
inline std::optional<EnergyWindow> bound_state_window(const PiecewiseConstantPotential& u,
                                                      double margin = 1e-9) {
  if (u.interior_count() == 0) return std::nullopt;
  const double lo = u.min_interior_level() + margin;
  const double hi = u.min_exterior_level() - margin;
  if (!(lo < hi)) return std::nullopt;
  return EnergyWindow{lo, hi};
}

namespace detail {

inline void require_bound_window(const PiecewiseConstantPotential& u, double energy) {
  const bool inside = u.interior_count() > 0 && energy > u.min_interior_level() &&
                      energy < u.min_exterior_level();
  if (!inside) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "energy " << energy << " eV is outside the bound-state window";
    throw DomainError(msg.str(), energy);
  }
}

inline ImpedanceState decaying_load(const PiecewiseConstantPotential& u, double energy) {
  return ImpedanceState::from_value(wave_params(u, energy, u.region_count() - 1).z);
}

// Nodes of psi on x in (x_R - width, x_R], given Z(x_R) = i a / b in a region with
// parameters w. width = +inf for the left exterior.
inline int nodes_in_region(const ImpedanceState& right_edge, const RegionWaveParams& w,
                           double width) {
  const double a = right_edge.p.imag();
  const double b = right_edge.q.real();
  if (w.is_zero()) {
    if (a == 0.0) return 0;
    const double s = -b / (w.mu * a);  // distance from x_R to the node of the linear psi
    return (s >= 0.0 && s < width) ? 1 : 0;
  }
  if (w.z.imag() == 0.0) {
    // Oscillatory: psi ~ cos(alpha), alpha decreasing by k per unit length going left.
    const double k = w.mu * w.z.real();
    const double alpha = std::atan2(a, b * w.z.real());
    const double pi = std::numbers::pi;
    return static_cast<int>(std::floor((alpha - pi / 2) / pi) -
                            std::floor((alpha - k * width - pi / 2) / pi));
  }
  // Evanescent: psi ~ sinh(r + kappa s) when |Z / z| > 1, at most one node.
  const double zeta = w.z.imag();
  if (!(std::abs(zeta * b) < std::abs(a))) return 0;
  const double kappa = w.mu * zeta;
  const double r = std::atanh(zeta * b / a);
  return (r <= 0.0 && -r < kappa * width) ? 1 : 0;
}

}  // namespace detail

// q Im(Z(x_0) + z_0) on the normalized cascade pair, with the decaying load z_{N+1} at x_N.
// For bound-state energies p is imaginary and q real, so this is continuous in E (no poles)
// and vanishes exactly at eigenenergies.
inline double mismatch(const PiecewiseConstantPotential& u, double energy) {
  detail::require_bound_window(u, energy);
  const auto z0 = cascade(u, energy, detail::decaying_load(u, energy));
  const double zeta0 = wave_params(u, energy, 0).z.imag();
  return z0.p.imag() + zeta0 * z0.q.real();
}

// Number of eigenvalues strictly below energy: the node count of the solution that decays
// on the right, read off the poles of Z(x).
inline int states_below(const PiecewiseConstantPotential& u, double energy) {
  if (u.interior_count() == 0 || energy <= u.min_interior_level()) return 0;
  if (!(energy < u.min_exterior_level())) {
    throw DomainError("state count needs an energy below both exterior levels", energy);
  }
  const auto profile = cascade_profile(u, energy, detail::decaying_load(u, energy));
  int nodes = 0;
  for (std::size_t i = u.interior_count(); i >= 1; --i) {
    nodes += detail::nodes_in_region(profile[i], wave_params(u, energy, i), u.width(i));
  }
  nodes += detail::nodes_in_region(profile[0], wave_params(u, energy, 0),
                                   std::numeric_limits<double>::infinity());
  return nodes;
}

namespace detail {

// Z at every boundary carried in from the left (from -z_0) and in from the right (from the
// decaying load). Each walk is only trusted up to the boundary where the two agree best.
struct TwoSidedProfile {
  std::vector<ImpedanceState> from_left;
  std::vector<ImpedanceState> from_right;
  std::size_t match = 0;
  double residual = 0.0;
};

inline TwoSidedProfile two_sided_profile(const PiecewiseConstantPotential& u, double energy) {
  const std::size_t n = u.interior_count();
  TwoSidedProfile out;
  out.from_right = cascade_profile(u, energy, decaying_load(u, energy));
  out.from_left.resize(n + 1);
  out.from_left[0] = ImpedanceState::from_value(-wave_params(u, energy, 0).z);
  for (std::size_t i = 1; i <= n; ++i) {
    out.from_left[i] = step_right(out.from_left[i - 1], wave_params(u, energy, i), u.width(i));
  }
  out.residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    const double d = projective_distance(out.from_left[i], out.from_right[i]);
    if (d < out.residual) {
      out.residual = d;
      out.match = i;
    }
  }
  return out;
}

inline void require_eigenenergy(const TwoSidedProfile& p, double energy, double tol) {
  if (!(p.residual <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "energy " << energy << " eV is not an eigenenergy: matching residual " << p.residual;
    throw ConsistencyError(msg.str());
  }
}

}  // namespace detail

// phi_1..phi_N, each from the side whose walk is stable in that region; the best agreement
// of the two walks is the residual checked against tol.
inline std::vector<cplx> recover_phases(const PiecewiseConstantPotential& u, double energy,
                                        double tol = 1e-8) {
  detail::require_bound_window(u, energy);
  const auto prof = detail::two_sided_profile(u, energy);
  detail::require_eigenenergy(prof, energy, tol);
  std::vector<cplx> phases;
  phases.reserve(u.interior_count());
  const auto& x = u.boundaries();
  for (std::size_t i = 1; i <= u.interior_count(); ++i) {
    const auto w = wave_params(u, energy, i);
    phases.push_back(i <= prof.match ? phase_from_impedance(prof.from_left[i - 1], w, x[i - 1])
                                     : phase_from_impedance(prof.from_right[i], w, x[i]));
  }
  return phases;
}

namespace detail {

inline cplx log_cosh(cplx w) {
  if (w.real() < 0.0) w = -w;
  return w + std::log(1.0 + std::exp(-2.0 * w)) - std::numbers::ln2;
}

inline cplx log_sinh(cplx w) {
  if (w.real() < 0.0) return log_sinh(-w) + cplx(0.0, std::numbers::pi);
  return w + std::log(1.0 - std::exp(-2.0 * w)) - std::numbers::ln2;
}

// psi(x) = C_i cosh(gamma_i x + phi_i) in region i, exponential tails outside, psi(x_0) = 1.
class WaveReconstruction {
 public:
  WaveReconstruction(const PiecewiseConstantPotential& u, double energy,
                     std::span<const cplx> phases)
      : u_(&u), energy_(energy), phases_(phases.begin(), phases.end()) {
    const std::size_t n = u.interior_count();
    if (phases_.size() != n) throw DomainError("one phase per interior region required");
    if (n == 0) throw DomainError("no interior regions");
    params_.reserve(n + 2);
    for (std::size_t i = 0; i <= n + 1; ++i) {
      params_.push_back(wave_params(u, energy, i));
      if (i >= 1 && i <= n && params_.back().is_zero()) {
        throw DomainError("energy coincides with an interior level", energy);
      }
    }
    kappa_left_ = params_.front().mu * params_.front().z.imag();
    kappa_right_ = params_.back().mu * params_.back().z.imag();

    log_c_.assign(n + 1, cplx{});
    log_c_[1] = -log_cosh(theta(1, u.boundaries()[0]));
    for (std::size_t i = 2; i <= n; ++i) {
      const double x = u.boundaries()[i - 1];
      const cplx left = theta(i - 1, x);
      const cplx right = theta(i, x);
      if (std::abs(std::cosh(right)) >= 1e-3 * std::abs(std::sinh(right)) ||
          std::abs(right.real()) > 20.0) {
        log_c_[i] = log_c_[i - 1] + log_cosh(left) - log_cosh(right);
      } else {
        // Node at the boundary: match psi' instead.
        log_c_[i] = log_c_[i - 1] + std::log(params_[i - 1].gamma) + log_sinh(left) -
                    std::log(params_[i].gamma) - log_sinh(right);
      }
    }
    log_right_ = log_psi_in_region(n, u.right_edge());
  }

  double kappa_left() const { return kappa_left_; }
  double kappa_right() const { return kappa_right_; }

  cplx theta(std::size_t region, double x) const {
    return params_[region].gamma * x + phases_[region - 1];
  }

  // log psi evaluated with the formula of the given region (extended past its edges).
  cplx log_psi_in_region(std::size_t region, double x) const {
    const std::size_t n = u_->interior_count();
    if (region == 0) return {kappa_left_ * (x - u_->left_edge()), 0.0};
    if (region == n + 1) return log_right_ - cplx(kappa_right_ * (x - u_->right_edge()), 0.0);
    return log_c_[region] + log_cosh(theta(region, x));
  }

  // log psi' with the same region convention.
  cplx log_dpsi_in_region(std::size_t region, double x) const {
    const std::size_t n = u_->interior_count();
    if (region == 0) return log_psi_in_region(0, x) + std::log(kappa_left_);
    if (region == n + 1) {
      return log_psi_in_region(n + 1, x) + std::log(-kappa_right_ + cplx(0.0, 0.0));
    }
    return log_c_[region] + std::log(params_[region].gamma) + log_sinh(theta(region, x));
  }

  cplx log_psi(double x) const { return log_psi_in_region(u_->region_index(x), x); }

 private:
  const PiecewiseConstantPotential* u_;
  double energy_;
  std::vector<cplx> phases_;
  std::vector<RegionWaveParams> params_;
  std::vector<cplx> log_c_;
  cplx log_right_;
  double kappa_left_ = 0.0;
  double kappa_right_ = 0.0;
};

}  // namespace detail

// Padded sampling window: 6 decay lengths beyond the outer boundaries.
inline EnergyWindow sampling_window(const PiecewiseConstantPotential& u, double energy) {
  detail::require_bound_window(u, energy);
  const double mu = mass_over_hbar(u.mass());
  const double kl = mu * wave_params(u, energy, 0).z.imag();
  const double kr = mu * wave_params(u, energy, u.region_count() - 1).z.imag();
  return {u.left_edge() - 6.0 / kl, u.right_edge() + 6.0 / kr};
}

inline std::vector<double> sample_grid(const PiecewiseConstantPotential& u, double energy,
                                       int points) {
  const auto win = sampling_window(u, energy);
  std::vector<double> xs(points);
  const double h = (win.hi - win.lo) / (points - 1);
  for (int i = 0; i < points; ++i) xs[i] = i == points - 1 ? win.hi : win.lo + h * i;
  return xs;
}

// psi at the given points, scaled so that max |psi| over them is 1 and the left tail is
// positive. No normalization integral.
inline std::vector<double> wavefunction_unnormalized(const PiecewiseConstantPotential& u,
                                                     double energy,
                                                     std::span<const cplx> phases,
                                                     std::span<const double> xs) {
  const auto win = sampling_window(u, energy);
  const double slack = 1e-9 * std::max(1.0, win.hi - win.lo);
  const detail::WaveReconstruction rec(u, energy, phases);
  std::vector<cplx> logs;
  logs.reserve(xs.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    if (x < win.lo - slack || x > win.hi + slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "sample x = " << x << " nm lies outside the padded window [" << win.lo << ", "
          << win.hi << "]";
      throw DomainError(msg.str(), energy);
    }
    logs.push_back(rec.log_psi(x));
    if (std::isfinite(logs.back().real())) top = std::max(top, logs.back().real());
  }
  std::vector<double> out;
  out.reserve(xs.size());
  for (const cplx& l : logs) {
    out.push_back(std::isfinite(l.real()) ? std::exp(l - top).real() : 0.0);
  }
  return out;
}

inline double trapezoid_norm(std::span<const double> xs, std::span<const double> psi) {
  double acc = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    acc += 0.5 * (xs[i] - xs[i - 1]) * (psi[i] * psi[i] + psi[i - 1] * psi[i - 1]);
  }
  return acc;
}

// Real bound-state wave function on ascending samples xs, normalized so the trapezoidal
// integral of psi^2 over xs is 1.
inline std::vector<double> wavefunction(const PiecewiseConstantPotential& u, double energy,
                                        std::span<const cplx> phases,
                                        std::span<const double> xs) {
  if (xs.size() < 2 || !std::is_sorted(xs.begin(), xs.end())) {
    throw DomainError("wavefunction needs at least two ascending samples", energy);
  }
  auto psi = wavefunction_unnormalized(u, energy, phases, xs);
  const double scale = 1.0 / std::sqrt(trapezoid_norm(xs, psi));
  for (double& v : psi) v *= scale;
  return psi;
}

// Z(x) of the bound state at an eigenenergy, cascaded from both sides as in recover_phases.
inline std::vector<ImpedanceState> impedance_profile(const PiecewiseConstantPotential& u,
                                                     double energy,
                                                     std::span<const double> xs,
                                                     double tol = 1e-8) {
  detail::require_bound_window(u, energy);
  const auto prof = detail::two_sided_profile(u, energy);
  detail::require_eigenenergy(prof, energy, tol);
  const std::size_t last = u.region_count() - 1;
  std::vector<ImpedanceState> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const std::size_t region = u.region_index(x);
    const auto w = wave_params(u, energy, region);
    if (region == 0) {
      out.push_back(ImpedanceState::from_value(-w.z));
    } else if (region == last) {
      out.push_back(ImpedanceState::from_value(w.z));
    } else if (region <= prof.match) {
      out.push_back(step_right(prof.from_left[region - 1], w, x - u.boundaries()[region - 1]));
    } else {
      out.push_back(step_left(prof.from_right[region], w, u.boundaries()[region] - x));
    }
  }
  return out;
}

inline int count_sign_changes(std::span<const double> values) {
  int changes = 0;
  double last = 0.0;
  for (double v : values) {
    if (v == 0.0) continue;
    if (last != 0.0 && (v < 0.0) != (last < 0.0)) ++changes;
    last = v;
  }
  return changes;
}

struct BoundStateOptions {
  int samples = 2000;            // psi samples per state
  double root_check = 1e-6;      // |mismatch| accepted at a refined root
  double phase_tol = 1e-8;       // matching residual for recover_phases
  double dedupe = 1e-10;         // eV
  double window_margin = 1e-9;   // eV
};

// All bound states, ascending. Grid scan of the window; cells holding more than one
// eigenvalue (by states_below) are split until each holds one, then bisected on mismatch.
inline std::vector<BoundState> find_bound_states(const PiecewiseConstantPotential& u,
                                                 int grid_points = 256,
                                                 const BoundStateOptions& opt = {}) {
  if (grid_points < 64) throw DomainError("bound-state search needs at least 64 grid points");
  if (opt.samples < 2) throw DomainError("bound-state sampling needs at least two points");
  const auto win = bound_state_window(u, opt.window_margin);
  if (!win) return {};

  const auto g = [&](double e) { return mismatch(u, e); };
  std::vector<double> roots;

  const auto refine = [&](double a, double b) {
    const double ga = g(a);
    const double gb = g(b);
    double root;
    if (ga == 0.0) {
      root = a;
    } else if (gb == 0.0) {
      root = b;
    } else if ((ga < 0.0) != (gb < 0.0)) {
      root = detail::bisect(g, a, b, ga);
    } else {
      // Same sign at both ends despite one eigenvalue inside: bisect on the state count.
      const int ca = states_below(u, a);
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        (states_below(u, m) > ca ? b : a) = m;
      }
      root = 0.5 * (a + b);
    }
    // g can be steep enough that adjacent doubles straddle a jump far larger than
    // root_check; the two-sided matching residual decides then.
    if (std::abs(g(root)) <= opt.root_check) {
      roots.push_back(root);
      return;
    }
    try {
      recover_phases(u, root, opt.phase_tol);
      roots.push_back(root);
    } catch (const ConsistencyError&) {
    }
  };

  const auto split = [&](auto&& self, double a, double b, int ca, int cb, int depth) -> void {
    if (cb <= ca) return;
    if (cb - ca == 1 || depth > 120) {
      refine(a, b);
      return;
    }
    const double m = 0.5 * (a + b);
    const int cm = states_below(u, m);
    self(self, a, m, ca, cm, depth + 1);
    self(self, m, b, cm, cb, depth + 1);
  };

  const int n = grid_points;
  const double h = (win->hi - win->lo) / (n - 1);
  double prev_e = win->lo;
  int prev_c = states_below(u, prev_e);
  for (int i = 1; i < n; ++i) {
    const double e = i == n - 1 ? win->hi : win->lo + h * i;
    const int c = states_below(u, e);
    split(split, prev_e, e, prev_c, c, 0);
    prev_e = e;
    prev_c = c;
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || r - unique.back() > opt.dedupe) unique.push_back(r);
  }

  std::vector<BoundState> out;
  out.reserve(unique.size());
  for (std::size_t index = 0; index < unique.size(); ++index) {
    BoundState s;
    s.energy = unique[index];
    s.phases = recover_phases(u, s.energy, opt.phase_tol);
    int points = std::max(2000, 64 * static_cast<int>(index + 2));
    for (int attempt = 0; attempt < 4; ++attempt, points *= 4) {
      const auto xs = sample_grid(u, s.energy, points);
      s.node_count = count_sign_changes(wavefunction(u, s.energy, s.phases, xs));
      if (s.node_count == static_cast<int>(index)) break;
    }
    {
      const auto xs = sample_grid(u, s.energy, opt.samples);
      const auto psi = wavefunction(u, s.energy, s.phases, xs);
      s.psi.reserve(xs.size());
      for (std::size_t k = 0; k < xs.size(); ++k) s.psi.push_back({xs[k], psi[k]});
    }
    if (s.node_count != static_cast<int>(index)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "state " << index << " at " << s.energy << " eV has " << s.node_count
          << " nodes";
      throw ConsistencyError(msg.str());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace qwi
