#include "ep/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>


namespace ep {

namespace {

DeviationField sweep(const EllipticWorkspace& ws, const DeviationField& w,
                     const BackgroundOnGrid& bg, const BoundaryPerturbation& bc,
                     double delta_guard) {
  const double sup = w.sup_norm();
  if (sup > delta_guard)
    fail(errc::trust_region_exceeded, "input deviation sup " + std::to_string(sup) +
                                          " exceeds the trust-region radius " +
                                          std::to_string(delta_guard));
  const TransportSolution tr = solve_transport(w.W1, w.W3, bg, bc);
  const GTerms g = eval_g_terms(w, tr, bg, bc);
  const ScalarField2D psi1 = ws.solve_psi1(g.G2);
  const CoupledSources src = compute_coupled_sources(g, psi1, tr, bg, bc);
  const CoupledSolution sol = ws.solve_coupled(src, bc);
  RecoveredDeviation rec = recover_deviation(sol.psi, sol.phi, psi1, bc, bg.grid);

  DeviationField out(bg.grid);
  out.W1 = std::move(rec.W1);
  out.W2 = tr.W2;
  out.W3 = std::move(rec.W3);
  out.W4 = tr.W4;
  out.W5 = tr.W5;
  out.W6 = std::move(rec.W6);
  return out;
}

DeviationField subtract(const DeviationField& x, const DeviationField& y) {
  DeviationField d(x.grid);
  const std::size_t n = x.grid.size();
  const ScalarField2D* xs[6] = {&x.W1, &x.W2, &x.W3, &x.W4, &x.W5, &x.W6};
  const ScalarField2D* ys[6] = {&y.W1, &y.W2, &y.W3, &y.W4, &y.W5, &y.W6};
  ScalarField2D* ds[6] = {&d.W1, &d.W2, &d.W3, &d.W4, &d.W5, &d.W6};
  for (int c = 0; c < 6; ++c)
    for (std::size_t k = 0; k < n; ++k) ds[c]->v[k] = xs[c]->v[k] - ys[c]->v[k];
  return d;
}

double c1_norm(const Grid2D& g, const DeviationField& w) {
  const ScalarField2D* f[6] = {&w.W1, &w.W2, &w.W3, &w.W4, &w.W5, &w.W6};
  double out = 0.0;
  for (int c = 0; c < 6; ++c) out = std::max(out, norms(g, *f[c]).c1);
  return out;
}

} // namespace

DeviationField apply_map(const DeviationField& w_sharp, const BackgroundOnGrid& bg,
                         const BoundaryPerturbation& bc, double delta_guard) {
  const CoupledCoefficients co = make_coefficients(bg);
  const EllipticWorkspace ws(co, bg.grid);
  return sweep(ws, w_sharp, bg, bc, delta_guard);
}

SolveReport fixed_point_solve(const BackgroundProfile& profile, const BoundaryPerturbation& bc,
                              const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) fail(errc::invalid_argument, "tol must be positive");
  if (opts.max_iter < 1) fail(errc::invalid_argument, "max_iter must be at least 1");
  const Grid2D& grid = opts.grid;
  const BackgroundOnGrid bg = sample_background(profile, grid);
  const CoupledCoefficients co = make_coefficients(bg);
  const EllipticWorkspace ws(co, grid);
  const double delta = opts.delta_guard > 0.0
                           ? opts.delta_guard
                           : (bc.eps > 0.0 ? 100.0 * bc.eps
                                           : std::numeric_limits<double>::infinity());

  SolveReport rep;
  DeviationField w(grid);
  std::vector<double> ratios;
  int non_contracting_streak = 0;
  bool converged = false;
  for (int k = 1; k <= opts.max_iter; ++k) {
    DeviationField wn;
    try {
      wn = sweep(ws, w, bg, bc, delta);
    } catch (const solver_error& e) {
      if (e.code() == errc::vacuum_state || e.code() == errc::degenerate_radial_velocity)
        fail(errc::no_contraction,
             std::string("iterate left the admissible state region: ") + e.what());
      throw;
    }
    const DeviationField diff = subtract(wn, w);
    const double inc = diff.sup_norm();
    rep.increments_sup.push_back(inc);
    rep.increments_c1.push_back(c1_norm(grid, diff));
    if (rep.increments_sup.size() >= 2) {
      const double prev = rep.increments_sup[rep.increments_sup.size() - 2];
      if (prev > 0.0) {
        const double ratio = inc / prev;
        ratios.push_back(ratio);
        if (ratio >= 1.0) {
          if (++non_contracting_streak >= 5)
            fail(errc::no_contraction, "increment ratio stayed at or above one for 5 "
                                       "consecutive iterations");
        } else {
          non_contracting_streak = 0;
        }
      }
    }
    w = std::move(wn);
    rep.iters = k;
    if (inc <= opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(errc::max_iter_exceeded,
         "no convergence to tol " + std::to_string(opts.tol) + " within " +
             std::to_string(opts.max_iter) + " iterations");

  if (!ratios.empty()) {
    const int m = std::min<int>(3, static_cast<int>(ratios.size()));
    double prod = 1.0;
    for (int t = 0; t < m; ++t) prod *= ratios[ratios.size() - 1 - t];
    rep.contraction_ratio = std::pow(prod, 1.0 / m);
  }
  rep.field = std::move(w);
  rep.residuals = full_residual(rep.field, bg, bc);
  return rep;
}

ResidualNorms full_residual(const DeviationField& w, const BackgroundOnGrid& bg,
                            const BoundaryPerturbation& bc) {
  const Grid2D& g = bg.grid;
  ScalarField2D U1(g), U2(g), U3(g), A(g), P(g), Phi(g), Rho(g), FluxR(g), FluxZ(g), B(g);
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      const double u1 = bg.u1[i] + w.W1(g, i, j);
      const double u2 = bg.u2[i] + w.W2(g, i, j);
      const double u3 = w.W3(g, i, j);
      const double a = bg.a0 + w.W4(g, i, j);
      const double phi = bg.phi[i] + w.W6(g, i, j);
      const double rho = perturbed_density(bg, i, w.W1(g, i, j), w.W2(g, i, j), w.W3(g, i, j),
                                           w.W4(g, i, j), w.W5(g, i, j), w.W6(g, i, j));
      U1(g, i, j) = u1;
      U2(g, i, j) = u2;
      U3(g, i, j) = u3;
      A(g, i, j) = a;
      P(g, i, j) = a * std::pow(rho, bg.gamma);
      Phi(g, i, j) = phi;
      Rho(g, i, j) = rho;
      FluxR(g, i, j) = r * rho * u1;
      FluxZ(g, i, j) = r * rho * u3;
      B(g, i, j) = bg.b0 + bc.eps * bc.b_tilde(r, g.z(j));
    }
  }

  const ScalarField2D dU1r = d_r(g, U1), dU1z = d_z(g, U1);
  const ScalarField2D dU2r = d_r(g, U2), dU2z = d_z(g, U2);
  const ScalarField2D dU3r = d_r(g, U3), dU3z = d_z(g, U3);
  const ScalarField2D dAr = d_r(g, A), dAz = d_z(g, A);
  const ScalarField2D dPr = d_r(g, P), dPz = d_z(g, P);
  const ScalarField2D dPhir = d_r(g, Phi), dPhiz = d_z(g, Phi);
  const ScalarField2D dPhirr = d_rr(g, Phi), dPhizz = d_zz(g, Phi);
  const ScalarField2D dFluxR = d_r(g, FluxR), dFluxZ = d_z(g, FluxZ);

  ResidualNorms out;
  double acc[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 1; i < g.nr - 1; ++i) {
    const double r = g.r(i);
    for (int j = 1; j < g.nz - 1; ++j) {
      const std::size_t k = g.idx(i, j);
      const double rho = Rho.v[k];
      const double u1 = U1.v[k], u2 = U2.v[k], u3 = U3.v[k];
      const double eq[6] = {
          dFluxR.v[k] + dFluxZ.v[k],
          rho * (u1 * dU1r.v[k] + u3 * dU1z.v[k]) + dPr.v[k] - rho * u2 * u2 / r -
              rho * dPhir.v[k],
          rho * (u1 * dU2r.v[k] + u3 * dU2z.v[k]) + rho * u1 * u2 / r,
          rho * (u1 * dU3r.v[k] + u3 * dU3z.v[k]) + dPz.v[k] - rho * dPhiz.v[k],
          rho * (u1 * dAr.v[k] + u3 * dAz.v[k]),
          dPhirr.v[k] + dPhir.v[k] / r + dPhizz.v[k] - (rho - B.v[k]),
      };
      for (int e = 0; e < 6; ++e) {
        out.sup[e] = std::max(out.sup[e], std::fabs(eq[e]));
        acc[e] += eq[e] * eq[e];
      }
    }
  }
  for (int e = 0; e < 6; ++e) out.l2[e] = std::sqrt(acc[e] * g.hr * g.hz);
  return out;
}

StreamlineDrift streamline_invariants(const DeviationField& w, const BackgroundOnGrid& bg,
                                      const BoundaryPerturbation& bc, int n_lines,
                                      unsigned seed) {
  if (n_lines < 1) fail(errc::invalid_argument, "need at least one streamline");
  const Grid2D& g = bg.grid;
  ScalarField2D u1tot(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) u1tot(g, i, j) = bg.u1[i] + w.W1(g, i, j);

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pick_i(1, g.nr - 2);
  std::uniform_int_distribution<int> pick_j(1, g.nz - 2);
  StreamlineDrift out;
  for (int s = 0; s < n_lines; ++s) {
    const int i = pick_i(rng);
    const int j = pick_j(rng);
    const CharacteristicFoot foot =
        trace_characteristic(g, u1tot, w.W3, g.r(i), g.z(j));
    const double z0 = foot.z3_0;
    out.k = std::max(out.k, std::fabs(w.W5(g, i, j) - bc.eps * bc.k_en.eval(z0)));
    out.a = std::max(out.a, std::fabs(w.W4(g, i, j) - bc.eps * bc.a_en.eval(z0)));
    out.ru2 = std::max(out.ru2,
                       std::fabs(g.r(i) * w.W2(g, i, j) - g.r0 * bc.eps * bc.u2_en.eval(z0)));
  }
  return out;
}

} // namespace ep
