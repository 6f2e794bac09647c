#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "qwi/closed_form.hpp"
#include "qwi/potential.hpp"

namespace qwi {

// Random potentials for cross-validation runs. Draws go through std::mt19937_64 and the
// standard distributions, so sequences are reproducible for a given standard library.

struct RandomScatteringCase {
  PiecewiseConstantPotential potential;
  std::vector<double> energies;  // all above both exterior levels
};

// 1..max_interior interior regions, levels in [-1, 1] eV, widths in [0.1, 5] nm.
inline RandomScatteringCase random_scattering_case(std::mt19937_64& rng, int energies = 20,
                                                   int max_interior = 8) {
  std::uniform_int_distribution<int> count(1, max_interior);
  std::uniform_real_distribution<double> level(-1.0, 1.0);
  std::uniform_real_distribution<double> width(0.1, 5.0);
  std::uniform_real_distribution<double> start(-10.0, 10.0);
  std::uniform_real_distribution<double> mass(0.05, 0.5);

  const int n = count(rng);
  std::vector<double> boundaries{start(rng)};
  for (int i = 0; i < n; ++i) boundaries.push_back(boundaries.back() + width(rng));
  std::vector<double> levels;
  for (int i = 0; i < n + 2; ++i) levels.push_back(level(rng));
  auto u = build_potential(std::move(boundaries), std::move(levels), mass(rng));

  const double floor = std::max(u.levels().front(), u.levels().back());
  std::uniform_real_distribution<double> energy(floor + 1e-3, floor + 2.0);
  std::vector<double> es;
  for (int i = 0; i < energies; ++i) es.push_back(energy(rng));
  std::sort(es.begin(), es.end());
  return {std::move(u), std::move(es)};
}

// 1..max_interior interior regions with at least one level below both exteriors.
// Exterior levels in [0, 0.5] eV, interior levels in [-1, 1] eV, widths in [0.1, 5] nm.
inline PiecewiseConstantPotential random_well_potential(std::mt19937_64& rng,
                                                        int max_interior = 6) {
  std::uniform_int_distribution<int> count(1, max_interior);
  std::uniform_real_distribution<double> exterior(0.0, 0.5);
  std::uniform_real_distribution<double> level(-1.0, 1.0);
  std::uniform_real_distribution<double> deep(-1.0, -0.1);
  std::uniform_real_distribution<double> width(0.1, 5.0);
  std::uniform_real_distribution<double> start(-10.0, 10.0);
  std::uniform_real_distribution<double> mass(0.05, 1.0);

  const int n = count(rng);
  std::vector<double> boundaries{start(rng)};
  for (int i = 0; i < n; ++i) boundaries.push_back(boundaries.back() + width(rng));
  std::vector<double> levels{exterior(rng)};
  std::uniform_int_distribution<int> which(1, n);
  const int well = which(rng);
  for (int i = 1; i <= n; ++i) levels.push_back(i == well ? deep(rng) : level(rng));
  levels.push_back(exterior(rng));
  return build_potential(std::move(boundaries), std::move(levels), mass(rng));
}

// a in [0.2, 2] nm, b in [0.5, 3] nm, U_b in [-1, -0.1] eV, mass in [0.05, 1].
inline DoubleStructure random_double_well(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.2, 2.0);
  std::uniform_real_distribution<double> b(0.5, 3.0);
  std::uniform_real_distribution<double> depth(-1.0, -0.1);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  const double aa = a(rng);
  const double bb = b(rng);
  const double uu = depth(rng);
  return make_double_structure(aa, bb, uu, mass(rng));
}

}  // namespace qwi
