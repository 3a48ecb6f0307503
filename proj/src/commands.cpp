#include "ep/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ep/csv.hpp"
#include "ep/field3d.hpp"
#include "ep/fields_analytic.hpp"
#include "ep/iteration.hpp"

namespace ep {

namespace {

const char* const kEquationNames[6] = {"mass",    "momentum_r", "momentum_th",
                                       "momentum_x3", "entropy", "potential"};
const char* const kEulerPoissonNames[7] = {"mass",        "momentum_r", "momentum_th",
                                           "momentum_x3", "entropy",    "bernoulli",
                                           "potential"};
const char* const kDecompositionNames[7] = {"entropy_transport",   "bernoulli_transport",
                                            "curl2",               "curl3",
                                            "vorticity_transport", "deformation",
                                            "potential"};

std::string regime_name(const FlowRegime& r) {
  if (std::holds_alternative<Subsonic>(r)) return "subsonic";
  if (std::holds_alternative<TransonicCandidate>(r)) return "transonic_candidate";
  if (const auto* t = std::get_if<Transonic>(&r))
    return "transonic (sonic radius " + format_sig(t->r_c) + ")";
  return "invalid: " + std::get<Invalid>(r).reason;
}

void cmd_background(const RunConfig& cfg, const std::string& outdir) {
  const BackgroundProfile p = integrate_background(cfg.inlet, cfg.n_nodes);
  const std::vector<MachState> mach = mach_profile(p);
  CsvFile csv;
  csv.header({"r", "rho", "u1", "u2", "E", "Phi", "M1sq", "M2sq"});
  for (int k = 0; k < p.n(); ++k)
    csv.num_row({p.r_nodes[k], p.rho[k], p.u1[k], p.u2[k], p.e_field[k], p.phi[k],
                 mach[k].m1_sq, mach[k].m2_sq});
  csv.write(outdir + "/background.csv");
  std::cout << "regime: " << regime_name(p.regime) << "\n";
}

void cmd_sonic(const RunConfig& cfg, const std::string& outdir) {
  const BackgroundProfile p = integrate_background(cfg.inlet, cfg.n_nodes);
  const std::optional<double> rc = find_sonic_radius(p);
  CsvFile csv;
  csv.header({"r_c"});
  if (rc) csv.num_row({*rc});
  csv.write(outdir + "/sonic.csv");
  if (rc)
    std::cout << "sonic radius: " << format_sig(*rc) << "\n";
  else
    std::cout << "none\n";
}

void write_solve_outputs(const SolveReport& rep, const Grid2D& g, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    CsvFile csv;
    csv.header({"iteration", "increment_sup", "increment_c1", "ratio"});
    for (std::size_t k = 0; k < rep.increments_sup.size(); ++k) {
      const double ratio = k ? rep.increments_sup[k] / rep.increments_sup[k - 1]
                             : std::numeric_limits<double>::quiet_NaN();
      csv.row({std::to_string(k + 1), format_sig(rep.increments_sup[k]),
               format_sig(rep.increments_c1[k]), format_sig(ratio)});
    }
    csv.write(dir + "/report.csv");
  }
  {
    CsvFile csv;
    csv.header({"r", "x3", "W1", "W2", "W3", "W4", "W5", "W6"});
    const DeviationField& w = rep.field;
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nz; ++j)
        csv.num_row({g.r(i), g.z(j), w.W1(g, i, j), w.W2(g, i, j), w.W3(g, i, j),
                     w.W4(g, i, j), w.W5(g, i, j), w.W6(g, i, j)});
    csv.write(dir + "/fields.csv");
  }
  {
    CsvFile csv;
    csv.header({"equation", "sup", "l2"});
    for (int e = 0; e < 6; ++e)
      csv.row({kEquationNames[e], format_sig(rep.residuals.sup[e]),
               format_sig(rep.residuals.l2[e])});
    csv.write(dir + "/residuals.csv");
  }
}

void cmd_solve(const RunConfig& cfg, const std::string& outdir) {
  const BackgroundProfile p = integrate_background(cfg.inlet, cfg.n_nodes);
  const BoundaryPerturbation bc = cfg.boundary();
  SolveOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.delta_guard = cfg.delta_guard;
  opts.grid = cfg.grid();
  const SolveReport rep = fixed_point_solve(p, bc, opts);
  write_solve_outputs(rep, opts.grid, outdir);
  std::cout << "converged in " << rep.iters << " iterations, contraction ratio "
            << format_sig(rep.contraction_ratio) << "\n";
}

void cmd_residual(const RunConfig& cfg, const std::string& outdir) {
  const BackgroundProfile p = integrate_background(cfg.inlet, cfg.n_nodes);
  const BoundaryPerturbation bc = cfg.boundary();
  CsvFile csv;
  csv.header({"grid", "equation", "sup", "l2"});
  for (int lvl = 0; lvl < 2; ++lvl) {
    const int nr = lvl ? 2 * cfg.nr - 1 : cfg.nr;
    const int nz = lvl ? 2 * cfg.nz - 1 : cfg.nz;
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.delta_guard = cfg.delta_guard;
    opts.grid = Grid2D(nr, nz, cfg.inlet.r0, cfg.inlet.r1);
    const SolveReport rep = fixed_point_solve(p, bc, opts);
    const std::string tag = std::to_string(nr) + "x" + std::to_string(nz);
    for (int e = 0; e < 6; ++e)
      csv.row({tag, kEquationNames[e], format_sig(rep.residuals.sup[e]),
               format_sig(rep.residuals.l2[e])});
  }
  csv.write(outdir + "/residual_study.csv");
}

CylField3D make_check3d_field(const RunConfig& cfg, int nr, int nth, int nz) {
  const std::string& name = cfg.check3d_preset;
  if (name == "background") {
    if (!cfg.check3d_params.empty())
      fail(errc::config_error, "check3d: the background preset takes no parameters");
    return lift_background(cfg.inlet, nr, nth, nz);
  }
  if (name == "swirl") {
    SwirlExact p;
    for (const auto& [key, value] : cfg.check3d_params) {
      if (key == "gamma") p.gamma = value;
      else if (key == "a0") p.a0 = value;
      else if (key == "kappa") p.kappa = value;
      else if (key == "m") p.m = value;
      else if (key == "g0") p.g0 = value;
      else if (key == "g1") p.g1 = value;
      else if (key == "k_base") p.k_base = value;
      else fail(errc::config_error, "check3d: unknown swirl parameter '" + key + "'");
    }
    return sample_field(p, nr, nth, nz, cfg.inlet.r0, cfg.inlet.r1);
  }
  if (name == "uniform") {
    UniformFlow p;
    for (const auto& [key, value] : cfg.check3d_params) {
      if (key == "gamma") p.gamma = value;
      else if (key == "u1") p.u1c = value;
      else if (key == "u2") p.u2c = value;
      else if (key == "u3") p.u3c = value;
      else if (key == "rho") p.rho_c = value;
      else if (key == "a") p.a_c = value;
      else fail(errc::config_error, "check3d: unknown uniform parameter '" + key + "'");
    }
    return sample_field(p, nr, nth, nz, cfg.inlet.r0, cfg.inlet.r1);
  }
  fail(errc::config_error, "check3d: unknown preset '" + name + "'");
}

void cmd_check3d(const RunConfig& cfg, const std::string& outdir) {
  CsvFile csv;
  csv.header({"preset", "nr", "nth", "nz", "family", "equation", "sup"});
  const int levels[2] = {cfg.nr, 2 * cfg.nr - 1};
  for (int nr3 : levels) {
    const int nth = nr3 - 1;
    const int nz3 = nr3;
    const CylField3D f = make_check3d_field(cfg, nr3, nth, nz3);
    const EquivalenceReport rep = equivalence_check(f);
    const std::string snr = std::to_string(nr3), snth = std::to_string(nth),
                      snz = std::to_string(nz3);
    for (int e = 0; e < 7; ++e)
      csv.row({cfg.check3d_preset, snr, snth, snz, "euler_poisson", kEulerPoissonNames[e],
               format_sig(rep.euler_poisson_sup[e])});
    for (int e = 0; e < 7; ++e)
      csv.row({cfg.check3d_preset, snr, snth, snz, "decomposition", kDecompositionNames[e],
               format_sig(rep.decomposition_sup[e])});
  }
  csv.write(outdir + "/equivalence.csv");
}

void cmd_sweep(const RunConfig& cfg, const std::string& outdir) {
  const BackgroundProfile p = integrate_background(cfg.inlet, cfg.n_nodes);
  const int n_cases = static_cast<int>(cfg.sweep_eps.size());
  struct Row {
    int iters = 0;
    double ratio = 0.0, w_sup = 0.0;
  };
  std::vector<Row> rows(n_cases);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    for (int idx = next.fetch_add(1); idx < n_cases; idx = next.fetch_add(1)) {
      try {
        RunConfig local = cfg;
        local.eps = cfg.sweep_eps[idx];
        const BoundaryPerturbation bc = local.boundary();
        SolveOptions opts;
        opts.tol = cfg.tol;
        opts.max_iter = cfg.max_iter;
        opts.delta_guard = cfg.delta_guard;
        opts.grid = cfg.grid();
        const SolveReport rep = fixed_point_solve(p, bc, opts);
        write_solve_outputs(rep, opts.grid, outdir + "/case_" + std::to_string(idx));
        rows[idx] = {rep.iters, rep.contraction_ratio, rep.field.sup_norm()};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min(thread_cap(), n_cases));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  CsvFile csv;
  csv.header({"eps", "iters", "contraction_ratio", "w_sup", "w_sup_over_eps", "linearity"});
  const double response0 = rows[0].w_sup / cfg.sweep_eps[0];
  for (int idx = 0; idx < n_cases; ++idx) {
    const double eps = cfg.sweep_eps[idx];
    const double response = rows[idx].w_sup / eps;
    csv.row({format_sig(eps), std::to_string(rows[idx].iters), format_sig(rows[idx].ratio),
             format_sig(rows[idx].w_sup), format_sig(response),
             format_sig(response0 != 0.0 ? response / response0 : 1.0)});
  }
  csv.write(outdir + "/sweep.csv");
}

} // namespace

int thread_cap() {
  const char* env = std::getenv("EP_ANNULUS_THREADS");
  if (env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

int run_command(const std::string& command, const RunConfig& cfg, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  if (command == "background") cmd_background(cfg, outdir);
  else if (command == "sonic") cmd_sonic(cfg, outdir);
  else if (command == "solve") cmd_solve(cfg, outdir);
  else if (command == "check3d") cmd_check3d(cfg, outdir);
  else if (command == "residual") cmd_residual(cfg, outdir);
  else if (command == "sweep") cmd_sweep(cfg, outdir);
  else fail(errc::config_error, "unknown command '" + command + "'");
  return 0;
}

} // namespace ep
