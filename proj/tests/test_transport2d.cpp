#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ep/background.hpp"
#include "ep/boundary.hpp"
#include "ep/grid2d.hpp"
#include "ep/transport2d.hpp"
#include "support.hpp"

using namespace ep;

namespace {

InletData anchor_inlet() {
  InletData in;
  in.gamma = 2.0;
  in.rho0 = 1.0;
  in.u10 = 0.5;
  in.u20 = 0.5;
  in.a0 = 1.0;
  in.e0 = 0.1;
  in.b0 = 0.5;
  in.r0 = 1.0;
  in.r1 = 2.0;
  return in;
}

BackgroundOnGrid anchor_background(int nr, int nz) {
  const Grid2D g(nr, nz, 1.0, 2.0);
  return sample_background(integrate_background(anchor_inlet(), 2049), g);
}

ScalarField2D fill(const Grid2D& g, double (*fn)(double, double)) {
  ScalarField2D f(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) f(g, i, j) = fn(g.r(i), g.z(j));
  return f;
}

// Independent fixed-step RK4 on the analytic slope (no interpolation), used
// as the oracle for the characteristic tracer.
double trace_oracle(double (*u1)(double, double), double (*w3)(double, double),
                    double r_start, double z_start, double r0, int steps) {
  double r = r_start, z = z_start;
  const double h = (r_start - r0) / steps;
  for (int s = 0; s < steps; ++s) {
    const auto f = [&](double rr, double zz) { return w3(rr, zz) / u1(rr, zz); };
    const double k1 = f(r, z);
    const double k2 = f(r - 0.5 * h, z - 0.5 * h * k1);
    const double k3 = f(r - 0.5 * h, z - 0.5 * h * k2);
    const double k4 = f(r - h, z - h * k3);
    z -= h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    r -= h;
  }
  return z;
}

double u1_bilinear(double r, double z) { return 1.5 + 0.1 * r + 0.05 * z; }
double w3_bilinear(double r, double z) { return 0.005 + 0.03 * r - 0.02 * z + 0.01 * r * z; }

} // namespace

TEST_CASE("background resampling onto solver grids") {
  auto bg = anchor_background(17, 9);
  CHECK(bg.gamma == 2.0);
  CHECK(bg.k0 == doctest::Approx(2.25).epsilon(1e-14)); // |U0|^2/2 + 2
  CHECK(bg.m1 == 0.5);
  CHECK(bg.m2 == 0.5);

  SUBCASE("flux constants survive the resampling") {
    for (int i = 0; i < bg.grid.nr; ++i) {
      const double r = bg.grid.r(i);
      CHECK(r * bg.rho[i] * bg.u1[i] == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(r * bg.u2[i] == doctest::Approx(0.5).epsilon(1e-14));
    }
  }

  SUBCASE("coinciding nodes are copied verbatim") {
    auto p = integrate_background(anchor_inlet(), 2049);
    const Grid2D g(17, 9, 1.0, 2.0); // every 128th profile node
    auto bg2 = sample_background(p, g);
    for (int i = 0; i < g.nr; ++i) CHECK(bg2.rho[i] == p.rho[128 * i]);
  }

  SUBCASE("off-node radii match a dense independent run") {
    auto p = integrate_background(anchor_inlet(), 2049);
    const Grid2D g(30, 9, 1.0, 2.0); // nodes fall between profile nodes
    auto bg2 = sample_background(p, g);
    auto oracle = eptest::rk4_oracle(anchor_inlet(), 29 * 32 + 1);
    for (int i = 0; i < g.nr; ++i)
      CHECK(std::fabs(bg2.rho[i] - oracle.rho[32 * i]) <= 1e-10);
  }

  SUBCASE("mismatched radial extent is rejected") {
    auto p = integrate_background(anchor_inlet(), 257);
    const Grid2D g(17, 9, 1.0, 1.5);
    CHECK_THROWS_AS(sample_background(p, g), solver_error);
  }
}

TEST_CASE("characteristic tracing") {
  SUBCASE("zero axial velocity keeps x3 frozen") {
    const Grid2D g(17, 17, 1.0, 2.0);
    ScalarField2D u1(g, 1.5), w3(g);
    auto foot = trace_characteristic(g, u1, w3, 2.0, 0.3);
    CHECK(foot.valid);
    CHECK(foot.z3_0 == 0.3);
    CHECK(foot.r_start == 2.0);
  }

  SUBCASE("walls are invariant when the wall rows vanish") {
    const Grid2D g(17, 17, 1.0, 2.0);
    ScalarField2D u1(g, 1.5);
    auto w3 = fill(g, [](double, double z) { return 0.05 * (1.0 - z * z); });
    CHECK(trace_characteristic(g, u1, w3, 2.0, 1.0).z3_0 == 1.0);
    CHECK(trace_characteristic(g, u1, w3, 2.0, -1.0).z3_0 == -1.0);
    CHECK(trace_characteristic(g, u1, w3, 1.7, 1.0).z3_0 == 1.0);
  }

  SUBCASE("bilinear fields reproduce the analytic flow map") {
    // Bilinear data is interpolated exactly, so the only error left is the
    // RK4 step truncation of the tracer itself.
    const Grid2D g(129, 129, 1.0, 2.0);
    auto u1 = fill(g, u1_bilinear);
    auto w3 = fill(g, w3_bilinear);
    for (double z0 : {-0.6, 0.0, 0.45}) {
      const double lib = trace_characteristic(g, u1, w3, 2.0, z0).z3_0;
      const double ref = trace_oracle(u1_bilinear, w3_bilinear, 2.0, z0, 1.0, 32768);
      CHECK(std::fabs(lib - ref) <= 1e-8);
    }
    // Interior starting radius as well.
    const double lib = trace_characteristic(g, u1, w3, 1.625, 0.2).z3_0;
    const double ref = trace_oracle(u1_bilinear, w3_bilinear, 1.625, 0.2, 1.0, 32768);
    CHECK(std::fabs(lib - ref) <= 1e-8);
  }

  SUBCASE("degenerate radial velocity is rejected") {
    const Grid2D g(17, 17, 1.0, 2.0);
    ScalarField2D u1(g, 1.5), w3(g);
    u1(g, 8, 8) = 1e-13;
    try {
      trace_characteristic(g, u1, w3, 2.0, 0.0);
      FAIL("expected degenerate_radial_velocity");
    } catch (const solver_error& e) {
      CHECK(e.code() == errc::degenerate_radial_velocity);
    }
  }
}

TEST_CASE("transported triple") {
  auto bg = anchor_background(17, 17);
  const Grid2D& g = bg.grid;
  BoundaryPerturbation bc;
  bc.eps = 1e-3;
  bc.u2_en = Profile1D::cospi(1.0, 1);
  bc.a_en = Profile1D::cospi(0.7, 2);
  bc.k_en = Profile1D::cospi(0.4, 1);
  bc.check_compatibility();

  SUBCASE("straight characteristics evaluate the inflow data in place") {
    ScalarField2D zero(g);
    auto sol = solve_transport(zero, zero, bg, bc);
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nz; ++j) {
        CHECK(sol.feet(g, i, j) == g.z(j));
        CHECK(sol.W4(g, i, j) == doctest::Approx(bc.eps * bc.a_en.eval(g.z(j))).epsilon(1e-15));
        CHECK(sol.W5(g, i, j) == doctest::Approx(bc.eps * bc.k_en.eval(g.z(j))).epsilon(1e-15));
        CHECK(sol.W2(g, i, j) ==
              doctest::Approx(bc.eps * g.r0 * bc.u2_en.eval(g.z(j)) / g.r(i)).epsilon(1e-15));
      }
  }

  SUBCASE("the swirl carries the circulation factor r0/r") {
    ScalarField2D zero(g);
    auto sol = solve_transport(zero, zero, bg, bc);
    for (int j = 0; j < g.nz; ++j) {
      const double at_r0 = sol.W2(g, 0, j);
      for (int i = 1; i < g.nr; ++i)
        CHECK(g.r(i) * sol.W2(g, i, j) == doctest::Approx(g.r0 * at_r0).epsilon(1e-14));
    }
  }

  SUBCASE("doubling eps doubles the triple exactly") {
    auto w1 = fill(g, [](double r, double z) { return 0.01 * (2.0 - r) * (1.0 + 0.2 * z); });
    auto w3 = fill(g, [](double r, double z) { return 0.02 * (1.0 - z * z) * (r - 1.0); });
    auto lo = solve_transport(w1, w3, bg, bc);
    BoundaryPerturbation bc2 = bc;
    bc2.eps = 2.0 * bc.eps;
    auto hi = solve_transport(w1, w3, bg, bc2);
    for (std::size_t m = 0; m < lo.W2.v.size(); ++m) {
      CHECK(hi.W2.v[m] == 2.0 * lo.W2.v[m]);
      CHECK(hi.W4.v[m] == 2.0 * lo.W4.v[m]);
      CHECK(hi.W5.v[m] == 2.0 * lo.W5.v[m]);
      CHECK(hi.feet.v[m] == lo.feet.v[m]);
    }
  }

  SUBCASE("the triple is invariant along curved characteristics") {
    // (U1 d_r + W3 d_z) W5 should vanish at the discretization order.
    double sup[2];
    const int sizes[2] = {33, 65};
    for (int lvl = 0; lvl < 2; ++lvl) {
      auto bgl = anchor_background(sizes[lvl], sizes[lvl]);
      const Grid2D& gl = bgl.grid;
      ScalarField2D w1(gl);
      auto w3 = fill(gl, [](double r, double z) {
        return 0.05 * (1.0 - z * z) * (r - 1.0) * (2.0 - r);
      });
      auto sol = solve_transport(w1, w3, bgl, bc);
      const auto dw5r = d_r(gl, sol.W5);
      const auto dw5z = d_z(gl, sol.W5);
      double worst = 0.0;
      for (int i = 1; i + 1 < gl.nr; ++i)
        for (int j = 1; j + 1 < gl.nz; ++j) {
          const double res =
              bgl.u1[i] * dw5r(gl, i, j) + w3(gl, i, j) * dw5z(gl, i, j);
          worst = std::max(worst, std::fabs(res));
        }
      sup[lvl] = worst / bc.eps;
    }
    const double ratio = sup[0] / sup[1];
    CHECK(ratio >= 2.3);
    CHECK(ratio <= 7.0);
  }

  SUBCASE("degenerate total radial velocity is rejected") {
    auto w1 = fill(g, [](double r, double) { return -1.0 * r; });
    ScalarField2D zero(g);
    try {
      solve_transport(w1, zero, bg, bc);
      FAIL("expected degenerate_radial_velocity");
    } catch (const solver_error& e) {
      CHECK(e.code() == errc::degenerate_radial_velocity);
    }
  }
}

TEST_CASE("source terms of the elliptic half") {
  auto bg = anchor_background(17, 17);
  const Grid2D& g = bg.grid;

  SUBCASE("zero deviation and zero data give exactly zero sources") {
    BoundaryPerturbation bc;
    bc.eps = 0.0;
    DeviationField w(g);
    auto sol = solve_transport(w.W1, w.W3, bg, bc);
    auto gt = eval_g_terms(w, sol, bg, bc);
    // The anchored Bernoulli inversion reproduces the background density
    // bitwise, so every term is a product with a zero factor.
    for (std::size_t m = 0; m < gt.G1.v.size(); ++m) {
      CHECK(gt.G1.v[m] == 0.0);
      CHECK(gt.G2.v[m] == 0.0);
      CHECK(gt.G3.v[m] == 0.0);
      CHECK(gt.G4.v[m] == 0.0);
    }
  }

  SUBCASE("the ion-density perturbation enters G4 alone") {
    BoundaryPerturbation bc;
    bc.eps = 1e-2;
    bc.b_radial = Profile1D::poly({0.3, 0.2});
    bc.b_axial = Profile1D::cospi(0.8, 1);
    DeviationField w(g);
    auto sol = solve_transport(w.W1, w.W3, bg, bc);
    auto gt = eval_g_terms(w, sol, bg, bc);
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nz; ++j) {
        const double r = g.r(i), z = g.z(j);
        const double expected = -bc.eps * (0.3 + 0.2 * r) * 0.8 * std::cos(std::acos(-1.0) * z);
        CHECK(std::fabs(gt.G4(g, i, j) - expected) <= 1e-14);
        CHECK(gt.G2(g, i, j) == 0.0);
        CHECK(gt.G3(g, i, j) == 0.0);
      }
  }

  SUBCASE("full algebra agrees with an independent evaluation") {
    BoundaryPerturbation bc;
    bc.eps = 1e-2;
    bc.u2_en = Profile1D::cospi(0.7, 1);
    bc.a_en = Profile1D::cospi(0.5, 2);
    bc.k_en = Profile1D::cospi(0.3, 1);
    bc.b_radial = Profile1D::poly({0.2, 0.1});
    bc.b_axial = Profile1D::cospi(0.4, 1);

    DeviationField w(g);
    w.W1 = fill(g, [](double r, double z) { return 0.01 * std::cos(std::acos(-1.0) * z) * (r - 1.5); });
    w.W3 = fill(g, [](double r, double z) { return 0.01 * (1.0 - z * z) * std::sin(r); });
    w.W6 = fill(g, [](double r, double z) { return 0.01 * std::cos(2.0 * std::acos(-1.0) * z) * r; });

    auto sol = solve_transport(w.W1, w.W3, bg, bc);
    auto gt = eval_g_terms(w, sol, bg, bc);

    // Fresh evaluation of the same formulas, organized differently.
    const ScalarField2D dzfoot = d_z(g, sol.feet);
    const double gm1 = bg.gamma - 1.0;
    double worst = 0.0;
    for (int i = 0; i < g.nr; ++i) {
      const double r = g.r(i);
      for (int j = 0; j < g.nz; ++j) {
        const double w1s = w.W1(g, i, j), w3s = w.W3(g, i, j), w6s = w.W6(g, i, j);
        const double w2 = sol.W2(g, i, j), w4 = sol.W4(g, i, j), w5 = sol.W5(g, i, j);
        const double u1t = bg.u1[i], u2t = bg.u2[i], rho_t = bg.rho[i], c2t = bg.c2[i];
        const double u1tot = u1t + w1s;
        const double u2tot = u2t + w2;
        const double arg = bg.k0 + w5 + bg.phi[i] + w6s -
                           0.5 * (u1tot * u1tot + u2tot * u2tot + w3s * w3s);
        const double arg0 = bg.k0 + bg.phi[i] - 0.5 * (u1t * u1t + u2t * u2t);
        const double H = rho_t * std::pow((arg * bg.a0) / (arg0 * (bg.a0 + w4)), 1.0 / gm1);
        const double qhat = rho_t * (w4 / (gm1 * bg.a0) +
                                     (u1t * w1s + u2t * w2 - w5 - w6s) / c2t);
        const double foot = sol.feet(g, i, j);
        const double df = dzfoot(g, i, j);
        const double g1 = -(H - rho_t) * w1s - (H - rho_t + qhat) * u1t;
        const double g2 = (u2tot * (g.r0 * bc.eps / r) * bc.u2_en.deriv(foot) * df +
                           std::pow(H, gm1) / gm1 * bc.eps * bc.a_en.deriv(foot) * df -
                           bc.eps * bc.k_en.deriv(foot) * df) /
                          u1tot;
        const double g3 = -(H - rho_t) * w3s;
        const double g4 = H - rho_t + qhat -
                          bc.eps * bc.b_radial.eval(r) * bc.b_axial.eval(g.z(j));
        worst = std::max(worst, std::fabs(gt.G1(g, i, j) - g1));
        worst = std::max(worst, std::fabs(gt.G2(g, i, j) - g2));
        worst = std::max(worst, std::fabs(gt.G3(g, i, j) - g3));
        worst = std::max(worst, std::fabs(gt.G4(g, i, j) - g4));
      }
    }
    CHECK(worst <= 1e-12);

    SUBCASE("the feet-reusing overload is identical") {
      auto gt2 = eval_g_terms(w, sol.W2, sol.W4, sol.W5, bg, bc);
      for (std::size_t m = 0; m < gt.G1.v.size(); ++m) {
        CHECK(gt2.G1.v[m] == gt.G1.v[m]);
        CHECK(gt2.G2.v[m] == gt.G2.v[m]);
        CHECK(gt2.G3.v[m] == gt.G3.v[m]);
        CHECK(gt2.G4.v[m] == gt.G4.v[m]);
      }
    }
  }

  SUBCASE("a large negative potential deviation empties the flow") {
    BoundaryPerturbation bc;
    bc.eps = 0.0;
    DeviationField w(g);
    for (double& v : w.W6.v) v = -10.0;
    auto sol = solve_transport(w.W1, w.W3, bg, bc);
    try {
      eval_g_terms(w, sol, bg, bc);
      FAIL("expected vacuum_state");
    } catch (const solver_error& e) {
      CHECK(e.code() == errc::vacuum_state);
    }
  }
}

TEST_CASE("wall compatibility of the source terms") {
  auto bg = anchor_background(17, 17);
  const Grid2D& g = bg.grid;
  BoundaryPerturbation bc;
  bc.eps = 1e-2;
  bc.u2_en = Profile1D::cospi(0.7, 1);
  bc.a_en = Profile1D::cospi(0.5, 2);
  bc.k_en = Profile1D::cospi(0.3, 1);
  bc.u3_en = Profile1D::sinpi(0.6, 1);
  bc.b_radial = Profile1D::poly({0.2, 0.1});
  bc.b_axial = Profile1D::cospi(0.4, 1);
  bc.check_compatibility();

  SUBCASE("x3-independent deviations with wall-flat W3 score machine zeros") {
    DeviationField w(g);
    w.W1 = fill(g, [](double r, double) { return 0.05 * (2.0 - r); });
    w.W6 = fill(g, [](double r, double) { return 0.03 * r * r; });
    w.W3 = fill(g, [](double r, double z) {
      const double q = 1.0 - z * z;
      return 0.04 * q * q * std::sin(r);
    });
    auto sol = solve_transport(w.W1, w.W3, bg, bc);
    auto wc = g_wall_compat(w, sol, bg, bc);
    CHECK(wc.g2 <= 1e-12);
    CHECK(wc.g3 <= 1e-12);
    CHECK(wc.d3_g1 <= 1e-12);
    CHECK(wc.d3_g4 <= 1e-12);
  }

  SUBCASE("a wall-violating deviation is flagged") {
    DeviationField w(g);
    w.W3 = fill(g, [](double, double z) { return 0.05 * (1.0 + z); }); // nonzero at z = 1
    auto sol = solve_transport(w.W1, w.W3, bg, bc);
    auto wc = g_wall_compat(w, sol, bg, bc);
    CHECK(wc.g3 > 1e-6);
  }
}

TEST_CASE("incompatible inflow data is named in the error") {
  BoundaryPerturbation bc;
  bc.eps = 1e-3;
  bc.u3_en = Profile1D::poly({1.0, 0.0}); // u3_en(1) = 1
  CHECK_THROWS_WITH_AS(bc.check_compatibility(), doctest::Contains("u3_en(1)"), solver_error);
  try {
    bc.check_compatibility();
  } catch (const solver_error& e) {
    CHECK(e.code() == errc::config_error);
  }
}

TEST_CASE("deviation field sup norm") {
  const Grid2D g(9, 9, 1.0, 2.0);
  DeviationField w(g);
  CHECK(w.sup_norm() == 0.0);
  w.W4(g, 3, 4) = -0.25;
  w.W1(g, 0, 0) = 0.125;
  CHECK(w.sup_norm() == 0.25);
}
