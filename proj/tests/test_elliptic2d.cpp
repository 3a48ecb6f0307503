#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ep/background.hpp"
#include "ep/boundary.hpp"
#include "ep/elliptic2d.hpp"
#include "ep/grid2d.hpp"
#include "ep/transport2d.hpp"
#include "manufactured.hpp"
#include "support.hpp"

using namespace ep;
using namespace eptest;

namespace {

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

} // namespace

TEST_CASE("coefficients from a subsonic background are positive and consistent") {
  const BackgroundOnGrid bg = anchor_background(33, 17);
  const CoupledCoefficients co = make_coefficients(bg);
  REQUIRE(co.a.size() == 33);
  for (int i = 0; i < 33; ++i) {
    const double r = bg.grid.r(i);
    const double m1sq = bg.u1[i] * bg.u1[i] / bg.c2[i];
    CHECK(co.a[i] > 0.0);
    CHECK(co.b[i] > 0.0);
    CHECK(co.c[i] > 0.0);
    CHECK(co.d[i] > 0.0);
    CHECK(co.a[i] == doctest::Approx(r * bg.rho[i] * (1.0 - m1sq)).epsilon(1e-14));
    CHECK(co.b[i] == doctest::Approx(r * bg.rho[i]).epsilon(1e-14));
    CHECK(co.c[i] == doctest::Approx(r * bg.rho[i] * bg.u1[i] / bg.c2[i]).epsilon(1e-14));
    CHECK(co.d[i] == doctest::Approx(r * bg.rho[i] / bg.c2[i]).epsilon(1e-14));
  }
}

TEST_CASE("radial flux coefficient stays positive across the sonic radius") {
  // The total Mach number crosses one on this background, the radial one
  // does not, so the elliptic coefficients remain admissible everywhere.
  const BackgroundProfile p = integrate_background(transonic_inlet(), 4097);
  REQUIRE(std::holds_alternative<Transonic>(p.regime));
  const Grid2D g(65, 17, 1.0, 6.0);
  const BackgroundOnGrid bg = sample_background(p, g);
  const CoupledCoefficients co = make_coefficients(bg);
  double min_a = co.a[0];
  for (double x : co.a) min_a = std::min(min_a, x);
  CHECK(min_a > 0.0);
}

TEST_CASE("coefficient validation rejects malformed arrays") {
  CoupledCoefficients co = make_coefficients(anchor_background(17, 9));

  SUBCASE("length mismatch") {
    co.b.pop_back();
    CHECK_THROWS_WITH_AS(co.validate(), doctest::Contains("radial node count"), solver_error);
  }
  SUBCASE("radial flux coefficient crossing zero names the node") {
    co.a[3] = 0.0;
    try {
      co.validate();
      FAIL("expected the degenerate coefficient to be rejected");
    } catch (const solver_error& e) {
      CHECK(e.code() == errc::invalid_argument);
      CHECK(std::string(e.what()).find("node 3") != std::string::npos);
    }
  }
  SUBCASE("non-positive mass weight") {
    co.d[5] = -1.0;
    CHECK_THROWS_WITH_AS(co.validate(), doctest::Contains("must be positive"), solver_error);
  }
}

TEST_CASE("zero corrector source yields the zero corrector") {
  const Grid2D g(17, 17, 1.0, 2.0);
  const ScalarField2D zero(g);
  const ScalarField2D sol = solve_psi1(zero, g);
  CHECK(sup_abs(sol.v) == 0.0);
}

TEST_CASE("corrector solve recovers a manufactured solution at second order") {
  const double e17 = psi1_solve_error(17);
  const double e33 = psi1_solve_error(33);
  const double e65 = psi1_solve_error(65);
  CHECK(e17 > 1e-6); // the manufactured field is not in the discrete kernel
  CHECK(eptest::order_between(e17, e33) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(eptest::order_between(e33, e65) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("corrector solution honours its boundary conditions") {
  const Grid2D g(33, 33, 1.0, 2.0);
  const ScalarField2D src = eptest::sample2d(g, psi1_source);
  const ScalarField2D sol = solve_psi1(src, g);
  for (int j = 0; j < g.nz; ++j) CHECK(std::abs(sol(g, g.nr - 1, j)) <= 1e-12);
  // odd symmetry of the extension pins the wall rows to zero
  for (int i = 0; i < g.nr; ++i) {
    CHECK(std::abs(sol(g, i, 0)) <= 1e-9);
    CHECK(std::abs(sol(g, i, g.nz - 1)) <= 1e-9);
  }
}

TEST_CASE("corrector source with a wall trace is rejected") {
  const Grid2D g(17, 17, 1.0, 2.0);
  const ScalarField2D ones(g, 1.0);
  try {
    solve_psi1(ones, g);
    FAIL("expected the odd-extension guard to fire");
  } catch (const solver_error& e) {
    CHECK(e.code() == errc::odd_extension_mismatch);
    CHECK(std::string(e.what()).find("wall trace") != std::string::npos);
  }
}

TEST_CASE("assembled coupled system matches an independent flux balance") {
  const int n = 17;
  const Grid2D g(n, n, 1.0, 2.0);
  const CoupledCoefficients co = make_coefficients(anchor_background(n, n));
  BoundaryPerturbation bc;
  bc.eps = 0.3;
  bc.u3_en = Profile1D::sinpi(0.7, 2);
  bc.u1_ex = Profile1D::cospi(0.4, 1);

  std::mt19937 rng(20240818u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const auto random_field = [&] {
    ScalarField2D f(g);
    for (double& x : f.v) x = uni(rng);
    return f;
  };
  const ScalarField2D gt1 = random_field();
  const ScalarField2D gt3 = random_field();
  const ScalarField2D gt4 = random_field();

  const SparseSystem sys = assemble_coupled(co, gt1, gt3, gt4, bc, g);
  REQUIRE(sys.n == 2 * n * n);

  const int block = n * n;
  const auto psi_k = [&](int i, int j) { return static_cast<int>(g.idx(i, j)); };
  const auto phi_k = [&](int i, int j) { return block + static_cast<int>(g.idx(i, j)); };
  const auto trace = [&](int j) {
    return bc.eps * (bc.u3_en.antideriv(g.z(j)) - bc.u3_en.antideriv(0.0));
  };

  // Unknown vector with the boundary values the elimination assumed.
  std::vector<double> x(sys.n);
  for (double& v : x) v = uni(rng);
  for (int j = 0; j < n; ++j) {
    x[psi_k(0, j)] = trace(j);
    x[phi_k(0, j)] = 0.0;
    x[phi_k(n - 1, j)] = 0.0;
  }

  std::vector<double> assembled(sys.n, 0.0);
  for (std::size_t k = 0; k < sys.vals.size(); ++k)
    assembled[sys.rows[k]] += sys.vals[k] * x[sys.cols[k]];
  for (int k = 0; k < sys.n; ++k) assembled[k] -= sys.rhs[k];

  // Fresh evaluation of every flux balance, written out face by face.
  const auto psi_at = [&](int i, int j) { return x[psi_k(i, j)]; };
  const auto phi_at = [&](int i, int j) { return x[phi_k(i, j)]; };
  std::vector<double> fresh(sys.n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // psi row
      if (i == 0) {
        fresh[psi_k(i, j)] = psi_at(i, j) - trace(j);
      } else {
        const double dz = (j == 0 || j == n - 1) ? 0.5 * g.hz : g.hz;
        const double dr = (i == n - 1) ? 0.5 * g.hr : g.hr;
        double acc = 0.0;
        if (i < n - 1) {
          const double af = 0.5 * (co.a[i] + co.a[i + 1]);
          const double cf = 0.5 * (co.c[i] + co.c[i + 1]);
          acc += af * (psi_at(i + 1, j) - psi_at(i, j)) / g.hr * dz;
          acc += 0.5 * cf * (phi_at(i, j) + phi_at(i + 1, j)) * dz;
          acc -= 0.5 * (gt1(g, i, j) + gt1(g, i + 1, j)) * dz;
        } else {
          acc += co.a[i] * bc.eps * bc.u1_ex.eval(g.z(j)) * dz;
          acc -= gt1(g, i, j) * dz;
        }
        {
          const double af = 0.5 * (co.a[i - 1] + co.a[i]);
          const double cf = 0.5 * (co.c[i - 1] + co.c[i]);
          acc -= af * (psi_at(i, j) - psi_at(i - 1, j)) / g.hr * dz;
          acc -= 0.5 * cf * (phi_at(i, j) + phi_at(i - 1, j)) * dz;
          acc += 0.5 * (gt1(g, i - 1, j) + gt1(g, i, j)) * dz;
        }
        if (j < n - 1) {
          acc += co.b[i] * (psi_at(i, j + 1) - psi_at(i, j)) / g.hz * dr;
          acc -= 0.5 * (gt3(g, i, j) + gt3(g, i, j + 1)) * dr;
        } else {
          acc -= gt3(g, i, j) * dr;
        }
        if (j > 0) {
          acc -= co.b[i] * (psi_at(i, j) - psi_at(i, j - 1)) / g.hz * dr;
          acc += 0.5 * (gt3(g, i, j - 1) + gt3(g, i, j)) * dr;
        } else {
          acc += gt3(g, i, j) * dr;
        }
        fresh[psi_k(i, j)] = acc;
      }
      // phi row
      if (i == 0 || i == n - 1) {
        fresh[phi_k(i, j)] = phi_at(i, j);
      } else {
        const double dz = (j == 0 || j == n - 1) ? 0.5 * g.hz : g.hz;
        const double dr = g.hr;
        const double r = g.r(i);
        double acc = 0.0;
        acc += (r + 0.5 * g.hr) * (phi_at(i + 1, j) - phi_at(i, j)) / g.hr * dz;
        acc -= (r - 0.5 * g.hr) * (phi_at(i, j) - phi_at(i - 1, j)) / g.hr * dz;
        if (j < n - 1) acc += r * (phi_at(i, j + 1) - phi_at(i, j)) / g.hz * dr;
        if (j > 0) acc -= r * (phi_at(i, j) - phi_at(i, j - 1)) / g.hz * dr;
        acc += co.c[i] * (psi_at(i + 1, j) - psi_at(i - 1, j)) * dr * dz / (2.0 * g.hr);
        acc -= co.d[i] * phi_at(i, j) * dr * dz;
        acc -= gt4(g, i, j) * dr * dz;
        fresh[phi_k(i, j)] = acc;
      }
    }
  }

  double worst = 0.0;
  for (int k = 0; k < sys.n; ++k) worst = std::max(worst, std::abs(assembled[k] - fresh[k]));
  CHECK(worst <= 1e-11);
}

TEST_CASE("psi-psi and phi-phi blocks are symmetric") {
  const int n = 17;
  const Grid2D g(n, n, 1.0, 2.0);
  const CoupledCoefficients co = make_coefficients(anchor_background(n, n));
  const ScalarField2D zero(g);
  const BoundaryPerturbation bc;
  const SparseSystem sys = assemble_coupled(co, zero, zero, zero, bc, g);

  const int block = n * n;
  std::vector<std::vector<std::pair<int, double>>> cols_of(sys.n);
  for (std::size_t k = 0; k < sys.vals.size(); ++k)
    cols_of[sys.rows[k]].push_back({sys.cols[k], sys.vals[k]});
  const auto entry = [&](int r, int c) {
    double v = 0.0;
    for (const auto& [cc, vv] : cols_of[r])
      if (cc == c) v += vv;
    return v;
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < sys.vals.size(); ++k) {
    const int r = sys.rows[k], c = sys.cols[k];
    const bool both_psi = r < block && c < block;
    const bool both_phi = r >= block && c >= block;
    if (!both_psi && !both_phi) continue;
    worst = std::max(worst, std::abs(entry(r, c) - entry(c, r)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("zero sources and zero amplitude produce the zero solution") {
  const Grid2D g(17, 17, 1.0, 2.0);
  const CoupledCoefficients co = make_coefficients(anchor_background(17, 17));
  const ScalarField2D zero(g);
  const BoundaryPerturbation bc;
  const SparseSystem sys = assemble_coupled(co, zero, zero, zero, bc, g);
  CHECK(sup_abs(sys.rhs) == 0.0);
  const CoupledSolution sol = solve_coupled(sys, g);
  CHECK(sup_abs(sol.psi.v) == 0.0);
  CHECK(sup_abs(sol.phi.v) == 0.0);
}

TEST_CASE("coupled solve recovers a manufactured pair at second order") {
  const CoupledErrors e17 = coupled_solve_error(17);
  const CoupledErrors e33 = coupled_solve_error(33);
  const CoupledErrors e65 = coupled_solve_error(65);
  CHECK(e17.psi > 1e-6);
  CHECK(e17.phi > 1e-6);
  CHECK(eptest::order_between(e17.psi, e33.psi) == doctest::Approx(2.0).epsilon(0.2));
  CHECK(eptest::order_between(e33.psi, e65.psi) == doctest::Approx(2.0).epsilon(0.2));
  CHECK(eptest::order_between(e17.phi, e33.phi) == doctest::Approx(2.0).epsilon(0.2));
  CHECK(eptest::order_between(e33.phi, e65.phi) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("coupled solve pins the integrated tangential trace at the inner cylinder") {
  const CoupledCase cc = manufactured_coupled(33);
  const SparseSystem sys =
      assemble_coupled(cc.co, cc.gt1, cc.gt3, cc.gt4, cc.bc, cc.grid);
  const CoupledSolution sol = solve_coupled(sys, cc.grid);
  for (int j = 0; j < cc.grid.nz; ++j) {
    const double want = std::cos(M_PI * cc.grid.z(j)) - 1.0;
    CHECK(std::abs(sol.psi(cc.grid, 0, j) - want) <= 1e-13);
    CHECK(sol.phi(cc.grid, 0, j) == 0.0);
    CHECK(sol.phi(cc.grid, cc.grid.nr - 1, j) == 0.0);
  }
}

TEST_CASE("solve_coupled rejects a system sized for a different grid") {
  const Grid2D g(9, 9, 1.0, 2.0);
  SparseSystem sys;
  sys.n = 7;
  CHECK_THROWS_WITH_AS(solve_coupled(sys, g), doctest::Contains("dimension"), solver_error);
}

TEST_CASE("a structurally singular system is reported as such") {
  const Grid2D g(9, 9, 1.0, 2.0);
  SparseSystem sys;
  sys.n = 2 * 9 * 9;
  // identity everywhere except one empty row, with incompatible data there
  for (int k = 0; k < sys.n - 1; ++k) {
    sys.rows.push_back(k);
    sys.cols.push_back(k);
    sys.vals.push_back(1.0);
  }
  sys.rhs.assign(sys.n, 0.0);
  sys.rhs[sys.n - 1] = 1.0;
  try {
    solve_coupled(sys, g);
    FAIL("expected the singular system to be rejected");
  } catch (const solver_error& e) {
    CHECK(e.code() == errc::singular_system);
  }
}

TEST_CASE("recovered deviation reproduces exact derivative fields") {
  const Grid2D g(17, 17, 1.0, 2.0);
  const ScalarField2D psi = eptest::sample2d(g, [](double r, double) { return 0.5 * r * r; });
  const ScalarField2D zero(g);
  const BoundaryPerturbation bc;
  const RecoveredDeviation w = recover_deviation(psi, zero, zero, bc, g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) {
      CHECK(std::abs(w.W1(g, i, j) - g.r(i)) <= 1e-13);
      CHECK(w.W3(g, i, j) == 0.0);
      CHECK(w.W6(g, i, j) == 0.0);
    }
}

TEST_CASE("recovered curl reproduces the corrector source at second order") {
  // W1 = d_r psi - d_z psi1 and W3 = d_z psi + d_r psi1 are built so that
  // d_r W3 - d_z W1 returns the corrector source; the psi contribution
  // cancels exactly because the tensor-product derivatives commute. The
  // order is measured two rings in, where both stencils are centered; the
  // ring next to the wall mixes one-sided and centered stencils and the
  // composition is only first order there.
  const auto residual = [](int n) {
    const Grid2D g(n, n, 1.0, 2.0);
    const ScalarField2D psi =
        eptest::sample2d(g, [](double r, double z) { return std::cos(r + z) + r * z * z; });
    const ScalarField2D psi1 = eptest::sample2d(g, psi1_exact);
    const BoundaryPerturbation bc;
    const RecoveredDeviation w = recover_deviation(psi, ScalarField2D(g), psi1, bc, g);
    const ScalarField2D lhs_r = d_r(g, w.W3);
    const ScalarField2D lhs_z = d_z(g, w.W1);
    double m = 0.0;
    for (int i = 2; i < g.nr - 2; ++i)
      for (int j = 2; j < g.nz - 2; ++j)
        m = std::max(m, std::abs(lhs_r(g, i, j) - lhs_z(g, i, j) -
                                 psi1_source(g.r(i), g.z(j))));
    return m;
  };
  const double r17 = residual(17);
  const double r33 = residual(33);
  CHECK(r17 / r33 > 2.5);
  CHECK(r17 / r33 < 6.5);
}

TEST_CASE("coercivity probes stay positive and the mixed terms cancel") {
  SUBCASE("subsonic annulus") {
    const BackgroundOnGrid bg = anchor_background(65, 65);
    const CoupledCoefficients co = make_coefficients(bg);
    const CoercivityReport rep = coercivity_probe(co, bg.grid, 100);
    CHECK(rep.min_quotient > 0.0);
    CHECK(rep.worst_cancellation <= 1e-12);

    // same probes on a finer grid: the quotient is a property of the
    // continuum form, so it moves only by quadrature error
    const BackgroundOnGrid fine = anchor_background(129, 129);
    const CoercivityReport rep2 = coercivity_probe(make_coefficients(fine), fine.grid, 100);
    CHECK(rep2.min_quotient > 0.0);
    CHECK(std::abs(rep2.min_quotient - rep.min_quotient) <=
          0.25 * std::max(rep.min_quotient, rep2.min_quotient));
  }
  SUBCASE("transonic annulus") {
    const BackgroundProfile p = integrate_background(transonic_inlet(), 4097);
    const Grid2D g(65, 65, 1.0, 6.0);
    const CoupledCoefficients co = make_coefficients(sample_background(p, g));
    const CoercivityReport rep = coercivity_probe(co, g, 100);
    CHECK(rep.min_quotient > 0.0);
    CHECK(rep.worst_cancellation <= 1e-12);
  }
  SUBCASE("sample count is validated") {
    const BackgroundOnGrid bg = anchor_background(17, 17);
    CHECK_THROWS_WITH_AS(coercivity_probe(make_coefficients(bg), bg.grid, 0),
                         doctest::Contains("probe sample"), solver_error);
  }
}

TEST_CASE("system dump is deterministic and line-formatted") {
  const Grid2D g(9, 9, 1.0, 2.0);
  const CoupledCoefficients co = make_coefficients(anchor_background(9, 9));
  const ScalarField2D zero(g);
  const BoundaryPerturbation bc;
  const SparseSystem s1 = assemble_coupled(co, zero, zero, zero, bc, g);
  const SparseSystem s2 = assemble_coupled(co, zero, zero, zero, bc, g);
  CHECK(s1.rows == s2.rows);
  CHECK(s1.cols == s2.cols);
  CHECK(s1.vals == s2.vals);

  std::ostringstream o1, o2;
  dump_system(s1, o1);
  dump_system(s2, o2);
  CHECK(o1.str() == o2.str());
  REQUIRE(!o1.str().empty());

  std::istringstream first_line(o1.str().substr(0, o1.str().find('\n')));
  int r = -1, c = -1;
  double v = 0.0;
  first_line >> r >> c >> v;
  CHECK(!first_line.fail());
  CHECK(r >= 0);
  CHECK(c >= 0);
}

TEST_CASE("boundary potential blend interpolates the two traces") {
  const Grid2D g(17, 17, 1.0, 2.0);
  BoundaryPerturbation bc;
  bc.eps = 0.5;
  bc.phi_en = Profile1D::cospi(0.3, 1);
  bc.phi_ex = Profile1D::poly({0.2});
  const ScalarField2D f = phi1_blend(bc, g);
  for (int j = 0; j < g.nz; ++j) {
    const double z = g.z(j);
    CHECK(f(g, 0, j) == doctest::Approx(0.5 * 0.3 * std::cos(M_PI * z)).epsilon(1e-14));
    CHECK(f(g, g.nr - 1, j) == doctest::Approx(0.5 * 0.2).epsilon(1e-14));
    const int mid = (g.nr - 1) / 2;
    CHECK(f(g, mid, j) ==
          doctest::Approx(0.25 * (0.3 * std::cos(M_PI * z) + 0.2)).epsilon(1e-13));
  }
}

TEST_CASE("workspace solves agree with the one-shot functions") {
  const int n = 33;
  const Grid2D g(n, n, 1.0, 2.0);
  const CoupledCoefficients co = make_coefficients(anchor_background(n, n));
  const EllipticWorkspace ws(co, g);

  const ScalarField2D src = eptest::sample2d(g, psi1_source);
  const ScalarField2D direct = solve_psi1(src, g);
  const ScalarField2D cached = ws.solve_psi1(src);
  CHECK(eptest::sup_diff(direct, cached) <= 1e-12);

  const CoupledCase cc = manufactured_coupled(n);
  const SparseSystem sys =
      assemble_coupled(cc.co, cc.gt1, cc.gt3, cc.gt4, cc.bc, cc.grid);
  const CoupledSolution one_shot = solve_coupled(sys, cc.grid);
  const EllipticWorkspace ws2(cc.co, cc.grid);
  const CoupledSolution cached2 = ws2.solve_coupled({cc.gt1, cc.gt3, cc.gt4}, cc.bc);
  CHECK(eptest::sup_diff(one_shot.psi, cached2.psi) <= 1e-12);
  CHECK(eptest::sup_diff(one_shot.phi, cached2.phi) <= 1e-12);
}
