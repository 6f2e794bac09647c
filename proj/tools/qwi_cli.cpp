#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qwi/io.hpp"
#include "qwi/oracle/transfer_matrix.hpp"
#include "qwi/qwi.hpp"
#include "qwi/random_structures.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, domain_error = 3, threshold_exceeded = 4, inconsistent = 5 };

struct Options {
  std::string config;
  std::string out;
  std::optional<double> emin;
  std::optional<double> emax;
  std::optional<int> points;
  unsigned long long seed = 0;
  double threshold = 1e-8;
  std::optional<double> grid_density;
  int count = 20;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output sink: the --out file, or stdout when no path was given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError("--out: cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

qwi::io::LoadedConfig require_config(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required for this command");
  return qwi::io::load_config(o.config);
}

// points energies on (lo, hi]: lo + (hi - lo) * k / points, k = 1..points.
std::vector<double> energy_grid(double lo, double hi, int points) {
  if (!(lo < hi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "--emin " << lo << " must be below --emax " << hi;
    throw UsageError(msg.str());
  }
  if (points < 2) throw UsageError("--points must be at least 2");
  std::vector<double> es(points);
  for (int k = 1; k <= points; ++k) es[k - 1] = k == points ? hi : lo + (hi - lo) * k / points;
  return es;
}

std::vector<double> sweep_grid(const Options& o) {
  if (!o.emin || !o.emax) throw UsageError("--emin and --emax are required for this command");
  return energy_grid(*o.emin, *o.emax, o.points.value_or(2000));
}

std::string stem_of(const std::string& out) {
  if (out.size() > 4 && out.compare(out.size() - 4, 4, ".csv") == 0) {
    return out.substr(0, out.size() - 4);
  }
  return out;
}

int run_transmit(const Options& o) {
  const auto cfg = require_config(o);
  const auto es = sweep_grid(o);
  const auto results = qwi::sweep(cfg.potential, es);
  Output out(o.out);
  qwi::io::CsvWriter csv(out.stream());
  csv.row({"energy_eV", "T", "R"});
  for (const auto& r : results) csv.row({r.energy, r.T, r.R});
  return ok;
}

int run_resonances(const Options& o) {
  const auto cfg = require_config(o);
  if (!o.emin || !o.emax) throw UsageError("--emin and --emax are required for this command");
  const double lo = *o.emin;
  const double hi = *o.emax;
  if (!(lo < hi)) throw UsageError("--emin must be below --emax");
  int grid = qwi::default_resonance_grid(lo, hi);
  if (o.grid_density) {
    grid = std::max(16, static_cast<int>(std::ceil(*o.grid_density * (hi - lo))));
  }
  if (o.points) grid = std::max(16, *o.points);
  const auto peaks = qwi::find_resonances(cfg.potential, lo, hi, grid);
  Output out(o.out);
  qwi::io::CsvWriter csv(out.stream());
  csv.row({"energy_eV", "width_hint_eV", "T_at_peak"});
  for (const auto& p : peaks) csv.row({p.energy, p.width_hint, p.transmission});
  return ok;
}

int bound_grid(const Options& o, const qwi::PiecewiseConstantPotential& u) {
  if (!o.grid_density) return 256;
  const auto win = qwi::bound_state_window(u);
  const double span = win ? win->hi - win->lo : 0.0;
  return std::max(64, static_cast<int>(std::ceil(*o.grid_density * span)));
}

int run_bound(const Options& o) {
  const auto cfg = require_config(o);
  const auto states = qwi::find_bound_states(cfg.potential, bound_grid(o, cfg.potential));
  Output out(o.out);
  qwi::io::CsvWriter csv(out.stream());
  csv.row({"index", "energy_eV", "node_count"});
  for (std::size_t i = 0; i < states.size(); ++i) {
    csv.row({static_cast<long long>(i), states[i].energy,
             static_cast<long long>(states[i].node_count)});
  }
  return ok;
}

int run_wavefunction(const Options& o) {
  const auto cfg = require_config(o);
  if (o.out.empty()) throw UsageError("--out is required for wavefunction (file stem)");
  qwi::BoundStateOptions bo;
  if (o.points) {
    if (*o.points < 2) throw UsageError("--points must be at least 2");
    bo.samples = *o.points;
  }
  const auto states = qwi::find_bound_states(cfg.potential, bound_grid(o, cfg.potential), bo);
  if (states.empty()) std::cerr << "qwi: no bound states, no files written\n";
  const std::string stem = stem_of(o.out);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string path = stem + "_" + std::to_string(i) + ".csv";
    Output out(path);
    qwi::io::CsvWriter csv(out.stream());
    csv.row({"x_nm", "psi"});
    for (const auto& s : states[i].psi) csv.row({s.x, s.psi});
  }
  return ok;
}

int run_validate(const Options& o) {
  struct Row {
    double e, t_imp, t_tm;
  };
  std::vector<Row> rows;
  const auto check = [&](const qwi::PiecewiseConstantPotential& u, const std::vector<double>& es) {
    for (double e : es) {
      rows.push_back({e, qwi::transmission(u, e).T, qwi::oracle::tm_scattering(u, e).T});
    }
  };
  if (!o.config.empty()) {
    const auto cfg = require_config(o);
    check(cfg.potential, sweep_grid(o));
  } else {
    if (o.count < 1) throw UsageError("--count must be positive");
    std::mt19937_64 rng(o.seed);
    for (int k = 0; k < o.count; ++k) {
      const auto c = qwi::random_scattering_case(rng);
      check(c.potential, c.energies);
    }
  }
  Output out(o.out);
  qwi::io::CsvWriter csv(out.stream());
  csv.row({"energy_eV", "T_impedance", "T_oracle", "abs_diff"});
  double worst = 0.0;
  for (const auto& r : rows) {
    const double d = std::abs(r.t_imp - r.t_tm);
    worst = std::max(worst, std::isnan(d) ? INFINITY : d);
    csv.row({r.e, r.t_imp, r.t_tm, d});
  }
  out.stream().flush();
  if (worst > o.threshold) {
    std::fprintf(stderr, "qwi: max abs_diff %.17g exceeds threshold %.17g\n", worst, o.threshold);
    return threshold_exceeded;
  }
  return ok;
}

int run_doublecheck(const Options& o) {
  const auto cfg = require_config(o);
  if (!cfg.double_structure) {
    throw UsageError("doublecheck needs a double-structure config (a_nm, b_nm, U_b_eV, mass)");
  }
  const auto& s = *cfg.double_structure;
  const double lo = o.emin.value_or(0.0);
  const double hi = o.emax.value_or(2.0 * std::abs(s.U_b));
  const auto es = energy_grid(lo, hi, o.points.value_or(2000));

  Output out(o.out);
  qwi::io::CsvWriter csv(out.stream());
  csv.row({"energy_eV", "Z_closed_re", "Z_closed_im", "Z_cascade_re", "Z_cascade_im",
           "projective_diff"});
  for (double e : es) {
    if (e == s.U_b) continue;
    const auto closed = qwi::double_barrier_impedance(e, s);
    const auto cascade = qwi::double_barrier_cascade(e, s);
    const qwi::cplx zc = closed.value();
    const qwi::cplx zs = cascade.value();
    csv.row({e, zc.real(), zc.imag(), zs.real(), zs.imag(),
             qwi::projective_distance(closed, cascade)});
  }
  if (!(s.U_b < 0.0)) return ok;

  const auto closed = qwi::double_well_energies(s);
  const auto general = qwi::find_bound_states(qwi::to_potential(s), bound_grid(o, qwi::to_potential(s)));
  const std::string path = (o.out.empty() ? std::string("doublecheck") : stem_of(o.out)) + "_roots.csv";
  Output roots(path);
  qwi::io::CsvWriter rc(roots.stream());
  rc.row({"index", "parity", "energy_closed_eV", "energy_solver_eV", "abs_diff"});
  const std::size_t n = std::max(closed.size(), general.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const double ec = i < closed.size() ? closed[i].energy : nan;
    const double eg = i < general.size() ? general[i].energy : nan;
    const std::string parity =
        i < closed.size() ? (closed[i].parity == qwi::Parity::even ? "even" : "odd") : "";
    rc.row({static_cast<long long>(i), parity, ec, eg, std::abs(ec - eg)});
  }
  if (closed.size() != general.size()) {
    std::fprintf(stderr, "qwi: closed-form levels %zu, general solver levels %zu\n",
                 closed.size(), general.size());
    return inconsistent;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum wave impedance solver for piecewise constant 1D potentials"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON potential definition");
    sub->add_option("--out", o.out, "output CSV path (stdout if omitted)");
  };
  const auto energies = [&o](CLI::App* sub) {
    sub->add_option("--emin", o.emin, "lower energy bound, eV (exclusive)");
    sub->add_option("--emax", o.emax, "upper energy bound, eV");
    sub->add_option("--points", o.points, "number of energies");
  };

  auto* transmit = app.add_subcommand("transmit", "T and R on an energy grid");
  common(transmit);
  energies(transmit);

  auto* resonances = app.add_subcommand("resonances", "transmission peaks");
  common(resonances);
  energies(resonances);
  resonances->add_option("--grid-density", o.grid_density, "scan points per eV");

  auto* bound = app.add_subcommand("bound", "bound-state energies");
  common(bound);
  bound->add_option("--grid-density", o.grid_density, "scan points per eV");

  auto* wave = app.add_subcommand("wavefunction", "bound-state wave functions, one CSV per state");
  common(wave);
  wave->add_option("--points", o.points, "samples per state");
  wave->add_option("--grid-density", o.grid_density, "scan points per eV");

  auto* validate = app.add_subcommand("validate", "impedance T against the transfer-matrix oracle");
  common(validate);
  energies(validate);
  validate->add_option("--seed", o.seed, "seed for random potentials (used without --config)");
  validate->add_option("--count", o.count, "number of random potentials");
  validate->add_option("--threshold", o.threshold, "largest accepted abs_diff");

  auto* doublecheck = app.add_subcommand("doublecheck", "closed form against the general solvers");
  common(doublecheck);
  energies(doublecheck);
  doublecheck->add_option("--grid-density", o.grid_density, "bound-state scan points per eV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "transmit") return run_transmit(o);
    if (name == "resonances") return run_resonances(o);
    if (name == "bound") return run_bound(o);
    if (name == "wavefunction") return run_wavefunction(o);
    if (name == "validate") return run_validate(o);
    return run_doublecheck(o);
  } catch (const qwi::io::ConfigError& e) {
    std::cerr << "qwi: config error: " << e.what() << '\n';
    return config_error;
  } catch (const UsageError& e) {
    std::cerr << "qwi: " << e.what() << '\n';
    return config_error;
  } catch (const qwi::ValidationError& e) {
    std::cerr << "qwi: invalid input: " << e.what() << '\n';
    return config_error;
  } catch (const qwi::DomainError& e) {
    std::cerr << "qwi: domain error: " << e.what() << '\n';
    return domain_error;
  } catch (const qwi::ConsistencyError& e) {
    std::cerr << "qwi: inconsistency: " << e.what() << '\n';
    return inconsistent;
  }
}
