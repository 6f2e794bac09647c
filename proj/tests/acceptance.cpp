// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
// usage: acceptance <path-to-qwi-cli> <configs-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qwi/oracle/transfer_matrix.hpp"
#include "qwi/qwi.hpp"
#include "qwi/random_structures.hpp"
#include "support.hpp"

using namespace qwi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Double-barrier geometries: (b, d) with a = d / 2, U_b = 0.956 eV, mass 0.1.
struct Geometry {
  double b, d;
};
constexpr Geometry barrier_geometries[] = {{3, 10}, {3, 5}, {1, 10}, {1, 5}};
constexpr double double_barrier_barrier = 0.956;

std::vector<Resonance> sub_barrier(const std::vector<Resonance>& all) {
  std::vector<Resonance> out;
  for (const auto& r : all) {
    if (r.energy < double_barrier_barrier) out.push_back(r);
  }
  return out;
}

Outcome double_barrier_sweeps() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  std::vector<double> es;
  for (int k = 1; k <= 2000; ++k) es.push_back(0.01 + (2.0 - 0.01) * k / 2000);

  double worst = 0.0;
  std::vector<std::vector<Resonance>> peaks;
  for (const auto& g : barrier_geometries) {
    const auto u = to_potential(make_double_structure(g.d / 2, g.b, double_barrier_barrier, 0.1));
    for (const auto& r : sweep(u, es)) {
      worst = std::max(worst, std::abs(r.T - oracle::tm_scattering(u, r.energy).T));
    }
    peaks.push_back(sub_barrier(find_resonances(u, 0.01, 2.0, default_resonance_grid(0.01, 2.0))));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const bool a = worst <= 1e-9;
  bool b = true;
  for (const auto& p : peaks) {
    bool any = false;
    for (const auto& r : p) any = any || r.transmission >= 1.0 - 1e-6;
    b = b && any;
  }
  const bool c = peaks[0].size() > peaks[1].size();
  // b = 3 against b = 1 at the same d, k-th sub-barrier peak against k-th
  bool d = true;
  int pairs = 0;
  for (const auto& [thick, thin] : {std::pair{0, 2}, std::pair{1, 3}}) {
    for (std::size_t k = 0; k < std::min(peaks[thick].size(), peaks[thin].size()); ++k) {
      ++pairs;
      d = d && peaks[thick][k].width_hint < peaks[thin][k].width_hint;
    }
  }
  d = d && pairs > 0;
  const bool fast = seconds < 10.0;
  o.pass = a && b && c && d && fast;
  o.detail = fmt(
      "max|dT|=%.2e (a:%s) sub-barrier peaks (3,10)=%zu (3,5)=%zu (1,10)=%zu (1,5)=%zu (b:%s c:%s) "
      "width pairs=%d (d:%s) time=%.2fs",
      worst, a ? "ok" : "no", peaks[0].size(), peaks[1].size(), peaks[2].size(), peaks[3].size(),
      b ? "ok" : "no", c ? "ok" : "no", pairs, d ? "ok" : "no", seconds);
  return o;
}

Outcome closed_form() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(0.1, 5.0), b(0.1, 5.0), ub(-1.5, 1.5), m(0.05, 1.0),
      e(1e-3, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const DoubleStructure s{a(rng), b(rng), ub(rng), m(rng)};
    const double en = e(rng);
    if (en == s.U_b) continue;
    worst = std::max(worst, projective_distance(double_barrier_impedance(en, s),
                                                double_barrier_cascade(en, s)));
  }
  return {worst <= 1e-12, fmt("500 tuples, max projective error %.2e", worst)};
}

Outcome single_barrier() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ub(0.05, 2.0), frac(0.01, 0.99), width(0.1, 10.0),
      mass(0.02, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double u0 = ub(rng), e = frac(rng) * u0, b = width(rng), m = mass(rng);
    const double expected = qwi::testing::barrier_T(e, u0, b, m);
    const double t = transmission(build_potential({0, b}, {0, u0, 0}, m), e).T;
    worst = std::max(worst, std::abs(t - expected) / expected);
  }
  return {worst <= 1e-12, fmt("100 barriers, max relative error %.2e", worst)};
}

Outcome double_well() {
  std::mt19937_64 rng(4);
  double worst = 0.0, phase_distance = 0.0;
  int levels = 0;
  bool counts = true, parities = true;
  for (int k = 0; k < 20; ++k) {
    const auto s = random_double_well(rng);
    const auto closed = double_well_energies(s);
    const auto general = find_bound_states(to_potential(s));
    if (closed.size() != general.size()) {
      counts = false;
      continue;
    }
    for (std::size_t i = 0; i < closed.size(); ++i) {
      ++levels;
      worst = std::max(worst, std::abs(closed[i].energy - general[i].energy));
      const auto p = qwi::testing::parity_from_phase(general[i].phases[1]);
      phase_distance = std::max(phase_distance, p.distance);
      parities = parities && p.parity == closed[i].parity && p.distance < 1e-3;
    }
  }
  return {counts && parities && worst <= 1e-10,
          fmt("20 wells, %d levels, counts %s, max |dE|=%.2e eV, parity %s (phi_2 within %.1e "
              "of its class)",
              levels, counts ? "equal" : "DIFFER", worst, parities ? "matches" : "MISMATCH",
              phase_distance)};
}

struct WellRun {
  std::vector<PiecewiseConstantPotential> potentials;
  std::vector<std::vector<BoundState>> states;
};

WellRun random_wells() {
  std::mt19937_64 rng(5);
  WellRun run;
  for (int k = 0; k < 50; ++k) {
    run.potentials.push_back(random_well_potential(rng, 6));
    run.states.push_back(find_bound_states(run.potentials.back()));
  }
  return run;
}

Outcome bound_oracle(const WellRun& run) {
  double worst = 0.0;
  int mismatched = 0, levels = 0;
  for (std::size_t k = 0; k < run.potentials.size(); ++k) {
    const auto oracle = oracle::tm_bound_states(run.potentials[k]);
    if (oracle.size() != run.states[k].size()) {
      ++mismatched;
      continue;
    }
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      ++levels;
      worst = std::max(worst, std::abs(oracle[i] - run.states[k][i].energy));
    }
  }
  return {mismatched == 0 && worst <= 1e-8,
          fmt("50 potentials, %d levels, count mismatches %d, max |dE|=%.2e eV", levels,
              mismatched, worst)};
}

Outcome unitarity() {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto c = random_scattering_case(rng, 20);
    for (double e : c.energies) {
      const auto r = transmission(c.potential, e);
      worst = std::max(worst, std::abs(r.T + r.R - 1.0));
    }
  }
  return {worst <= 1e-10, fmt("200 x 20, max |T+R-1|=%.2e", worst)};
}

Outcome invariance() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(-1.0, 1.0), m(0.05, 1.0), dx(0.0, 5.0),
      shift(-50.0, 50.0);
  const auto params = [&] { return wave_params(v(rng), v(rng), m(rng)); };
  const auto random_z = [&] { return ImpedanceState::from_value({3 * v(rng), 3 * v(rng)}); };

  double branch = 0.0, matched = 0.0, inversion = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto w = params();
    const RegionWaveParams flipped{-w.z, -w.gamma, w.mu};
    const double d = dx(rng);
    const auto z = random_z();
    branch = std::max({branch, projective_distance(step_left(z, w, d), step_left(z, flipped, d)),
                       projective_distance(step_right(z, w, d), step_right(z, flipped, d))});
    if (!w.is_zero()) {
      const auto load = ImpedanceState::from_value(w.z);
      matched = std::max(matched, projective_distance(step_left(load, w, 8 * d), load));
    }
    // inversion only where the step is well conditioned: |Re gamma dx| <= 2
    const double di = std::abs(w.gamma.real()) * d > 2.0 ? 2.0 / std::abs(w.gamma.real()) : d;
    inversion = std::max({inversion, projective_distance(step_right(step_left(z, w, di), w, di), z),
                          projective_distance(step_left(step_right(z, w, di), w, di), z)});
  }

  double t_shift = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto c = random_scattering_case(rng, 3);
    const auto moved = c.potential.translated(shift(rng));
    for (double e : c.energies) {
      const double t = transmission(c.potential, e).T;
      t_shift = std::max(t_shift, std::abs(transmission(moved, e).T - t) / t);
    }
  }

  double spectrum_shift = 0.0;
  bool counts = true;
  for (int i = 0; i < 100; ++i) {
    const auto u = random_well_potential(rng, 4);
    const auto base = find_bound_states(u);
    const auto moved = find_bound_states(u.translated(shift(rng)));
    if (base.size() != moved.size()) {
      counts = false;
      continue;
    }
    for (std::size_t k = 0; k < base.size(); ++k) {
      spectrum_shift = std::max(spectrum_shift, std::abs(base[k].energy - moved[k].energy));
    }
  }

  const bool pass = branch <= 1e-12 && matched <= 1e-13 && inversion <= 1e-12 &&
                    t_shift <= 1e-10 && counts && spectrum_shift <= 1e-10;
  return {pass, fmt("100 trials each: branch flip %.2e, matched load %.2e, left/right inversion "
                    "%.2e, translated T %.2e, translated spectra %.2e eV%s",
                    branch, matched, inversion, t_shift, spectrum_shift,
                    counts ? "" : " (COUNT CHANGED)")};
}

Outcome wave_functions(const WellRun& run) {
  double worst = 0.0, norm = 0.0;
  int states = 0, points = 0;
  bool increasing = true;
  for (std::size_t k = 0; k < run.potentials.size(); ++k) {
    const auto& list = run.states[k];
    for (std::size_t i = 0; i < list.size(); ++i) {
      ++states;
      const auto rel = qwi::testing::defining_relation(run.potentials[k], list[i]);
      worst = std::max(worst, rel.worst);
      points += rel.points;
      norm = std::max(norm, std::abs(qwi::testing::psi_norm(list[i]) - 1.0));
      if (i > 0) increasing = increasing && list[i].node_count > list[i - 1].node_count;
    }
  }
  return {worst <= 1e-6 && norm <= 1e-6 && increasing,
          fmt("%d states, %d interior points, max relative |Z_fd - Z|=%.2e, max |norm-1|=%.2e, "
              "node counts %s",
              states, points, worst, norm, increasing ? "increasing" : "NOT increasing")};
}

int run_cli(const std::string& cmd) {
  const int status = std::system((cmd + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli(const std::string& exe, const std::string& configs) {
  const fs::path dir = fs::temp_directory_path() / "qwi_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::string> commands{
      "transmit --config " + configs + "/double_barrier_b3_d10.json --emin 0.01 --emax 2 --points 2000",
      "resonances --config " + configs + "/double_barrier_b3_d5.json --emin 0.01 --emax 2",
      "bound --config " + configs + "/double_well.json",
      "wavefunction --config " + configs + "/single_well.json --points 300",
      "validate --seed 0 --count 20",
      "doublecheck --config " + configs + "/double_well.json --points 200"};
  bool identical = true, exits = true;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::string> runs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path sub = dir / ("run" + std::to_string(rep));
      fs::create_directories(sub);
      const fs::path out = sub / ("out" + std::to_string(i) + ".csv");
      exits = exits && run_cli(exe + " " + commands[i] + " --out " + out.string()) == 0;
      std::string all;
      for (const auto& entry : fs::directory_iterator(sub)) {
        if (entry.path().filename().string().rfind("out" + std::to_string(i), 0) == 0) {
          all += entry.path().filename().string() + "\n" + slurp(entry.path());
        }
      }
      runs.push_back(all);
    }
    identical = identical && !runs[0].empty() && runs[0] == runs[1];
  }

  // largest abs_diff of the validate run, then a threshold just below it
  std::istringstream lines(slurp(dir / "run0" / "out4.csv"));
  std::string line;
  std::getline(lines, line);
  double observed = 0.0;
  while (std::getline(lines, line)) observed = std::max(observed, std::stod(line.substr(line.rfind(',') + 1)));
  const double below = observed > 0.0 ? 0.5 * observed : -1.0;
  const int status = run_cli(exe + " validate --seed 0 --count 20 --threshold " + fmt("%.17g", below) +
                             " --out " + (dir / "threshold.csv").string());
  fs::remove_all(dir);
  return {identical && exits && status != 0,
          fmt("%zu commands run twice: outputs %s, exit codes %s; validate with threshold %.3g "
              "(observed max %.3g) exits %d",
              commands.size(), identical ? "byte-identical" : "DIFFER", exits ? "0" : "NONZERO",
              below, observed, status)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <qwi-cli> <configs-dir>\n");
    return 2;
  }
  const std::string exe = argv[1];
  const std::string configs = argv[2];
  bool all = true;
  const auto report = [&](int n, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %d %s [%s]: %s\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, "double-barrier sweeps", double_barrier_sweeps);
  report(2, "closed form vs cascade", closed_form);
  report(3, "single barrier analytic", single_barrier);
  report(4, "double-well spectrum", double_well);
  WellRun wells;
  try {
    wells = random_wells();
  } catch (const std::exception& e) {
    std::printf("random well solve failed: %s\n", e.what());
  }
  report(5, "bound states vs oracle", [&] { return bound_oracle(wells); });
  report(6, "unitarity", unitarity);
  report(7, "invariances", invariance);
  report(8, "wave-function relation", [&] { return wave_functions(wells); });
  report(9, "CLI determinism", [&] { return cli(exe, configs); });
  return all ? 0 : 1;
}
