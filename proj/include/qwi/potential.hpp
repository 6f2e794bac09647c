#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qwi/errors.hpp"

namespace qwi {

// U(x) = levels[0] for x < boundaries[0], levels[i] on [boundaries[i-1], boundaries[i]),
// levels[N+1] for x >= boundaries[N]. Region i in 1..N is an interior region.
class PiecewiseConstantPotential {
 public:
  const std::vector<double>& boundaries() const { return boundaries_; }
  const std::vector<double>& levels() const { return levels_; }
  double mass() const { return mass_; }

  // Number of interior regions N (regions 1..N); the exterior regions are 0 and N+1.
  std::size_t interior_count() const { return boundaries_.size() - 1; }
  std::size_t region_count() const { return levels_.size(); }

  double level(std::size_t region) const { return levels_.at(region); }
  double left_edge() const { return boundaries_.front(); }
  double right_edge() const { return boundaries_.back(); }

  // Width of interior region i (1 <= i <= N).
  double width(std::size_t region) const {
    return boundaries_.at(region) - boundaries_.at(region - 1);
  }

  // Boundary points belong to the region on their right.
  std::size_t region_index(double x) const {
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
    return static_cast<std::size_t>(it - boundaries_.begin());
  }

  double operator()(double x) const { return levels_[region_index(x)]; }

  double min_interior_level() const {
    return *std::min_element(levels_.begin() + 1, levels_.end() - 1);
  }
  double min_exterior_level() const { return std::min(levels_.front(), levels_.back()); }

  PiecewiseConstantPotential translated(double dx) const {
    auto b = boundaries_;
    for (auto& x : b) x += dx;
    return PiecewiseConstantPotential(std::move(b), levels_, mass_);
  }

  PiecewiseConstantPotential shifted(double dU) const {
    auto l = levels_;
    for (auto& u : l) u += dU;
    return PiecewiseConstantPotential(boundaries_, std::move(l), mass_);
  }

  // x -> -x
  PiecewiseConstantPotential mirrored() const {
    std::vector<double> b(boundaries_.rbegin(), boundaries_.rend());
    for (auto& x : b) x = -x;
    std::vector<double> l(levels_.rbegin(), levels_.rend());
    return PiecewiseConstantPotential(std::move(b), std::move(l), mass_);
  }

  friend bool operator==(const PiecewiseConstantPotential&,
                         const PiecewiseConstantPotential&) = default;

 private:
  PiecewiseConstantPotential(std::vector<double> boundaries, std::vector<double> levels,
                             double mass)
      : boundaries_(std::move(boundaries)), levels_(std::move(levels)), mass_(mass) {}

  friend PiecewiseConstantPotential build_potential(std::vector<double>, std::vector<double>,
                                                    double);

  std::vector<double> boundaries_;
  std::vector<double> levels_;
  double mass_ = 1.0;
};

inline PiecewiseConstantPotential build_potential(std::vector<double> boundaries,
                                                  std::vector<double> levels, double mass) {
  if (boundaries.empty()) {
    throw ValidationError("potential needs at least one boundary");
  }
  if (levels.size() != boundaries.size() + 1) {
    throw ValidationError("levels has " + std::to_string(levels.size()) +
                          " entries, expected boundaries + 1 = " +
                          std::to_string(boundaries.size() + 1));
  }
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!std::isfinite(boundaries[i])) {
      throw ValidationError("boundary " + std::to_string(i) + " is not finite", i);
    }
    if (i > 0 && !(boundaries[i] > boundaries[i - 1])) {
      throw ValidationError("boundaries not strictly increasing at index " + std::to_string(i),
                            i);
    }
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) {
      throw ValidationError("level " + std::to_string(i) + " is not finite", i);
    }
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ValidationError("mass must be positive");
  }
  return PiecewiseConstantPotential(std::move(boundaries), std::move(levels), mass);
}

}  // namespace qwi
