#include "ep/field3d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ep {

namespace {

constexpr double kU1Floor = 1e-12;

void check_u1_floor(const CylField3D& f) {
  for (double u : f.U1)
    if (u < kU1Floor)
      fail(errc::degenerate_radial_velocity,
           "U1 = " + std::to_string(u) + " is below the floor " + std::to_string(kU1Floor));
}

} // namespace

Grid3D::Grid3D(int nr_, int nth_, int nz_, double r0_, double r1_)
    : nr(nr_), nth(nth_), nz(nz_), r0(r0_), r1(r1_) {
  if (nr < 5 || nth < 4 || nz < 5) fail(errc::invalid_argument, "3D grid too small");
  if (!(r0 > 0.0) || !(r1 > r0)) fail(errc::invalid_argument, "need 0 < r0 < r1");
  hr = (r1 - r0) / (nr - 1);
  hth = 2.0 * std::acos(-1.0) / nth;
  hz = 2.0 / (nz - 1);
}

void CylField3D::validate() const {
  for (double x : rho)
    if (!(x > 0.0)) fail(errc::non_positive_density, "rho <= 0 in 3D field");
  for (double x : U1)
    if (!(x > 0.0)) fail(errc::invalid_argument, "U1 <= 0 in 3D field");
}

std::vector<double> d3_r(const Grid3D& g, const std::vector<double>& f) {
  std::vector<double> out(g.size());
  const double h2 = 2.0 * g.hr;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        double v;
        if (i == 0)
          v = (-11.0 * f[g.idx(0, j, k)] + 18.0 * f[g.idx(1, j, k)] - 9.0 * f[g.idx(2, j, k)] +
               2.0 * f[g.idx(3, j, k)]) /
              (3.0 * h2);
        else if (i == g.nr - 1)
          v = (11.0 * f[g.idx(i, j, k)] - 18.0 * f[g.idx(i - 1, j, k)] +
               9.0 * f[g.idx(i - 2, j, k)] - 2.0 * f[g.idx(i - 3, j, k)]) /
              (3.0 * h2);
        else
          v = (f[g.idx(i + 1, j, k)] - f[g.idx(i - 1, j, k)]) / h2;
        out[g.idx(i, j, k)] = v;
      }
  return out;
}

std::vector<double> d3_th(const Grid3D& g, const std::vector<double>& f) {
  std::vector<double> out(g.size());
  const double h2 = 2.0 * g.hth;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j) {
      const int jp = (j + 1) % g.nth;
      const int jm = (j + g.nth - 1) % g.nth;
      for (int k = 0; k < g.nz; ++k)
        out[g.idx(i, j, k)] = (f[g.idx(i, jp, k)] - f[g.idx(i, jm, k)]) / h2;
    }
  return out;
}

std::vector<double> d3_z(const Grid3D& g, const std::vector<double>& f) {
  std::vector<double> out(g.size());
  const double h2 = 2.0 * g.hz;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        double v;
        if (k == 0)
          v = (-3.0 * f[g.idx(i, j, 0)] + 4.0 * f[g.idx(i, j, 1)] - f[g.idx(i, j, 2)]) / h2;
        else if (k == g.nz - 1)
          v = (3.0 * f[g.idx(i, j, k)] - 4.0 * f[g.idx(i, j, k - 1)] + f[g.idx(i, j, k - 2)]) / h2;
        else
          v = (f[g.idx(i, j, k + 1)] - f[g.idx(i, j, k - 1)]) / h2;
        out[g.idx(i, j, k)] = v;
      }
  return out;
}

namespace {

// Second derivative along r or x3: central interior, 4-point one-sided rows
// at the ends (still 2nd order).
std::vector<double> d3_rr(const Grid3D& g, const std::vector<double>& f) {
  std::vector<double> out(g.size());
  const double hh = g.hr * g.hr;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        double v;
        if (i == 0)
          v = (2.0 * f[g.idx(0, j, k)] - 5.0 * f[g.idx(1, j, k)] + 4.0 * f[g.idx(2, j, k)] -
               f[g.idx(3, j, k)]) / hh;
        else if (i == g.nr - 1)
          v = (2.0 * f[g.idx(i, j, k)] - 5.0 * f[g.idx(i - 1, j, k)] +
               4.0 * f[g.idx(i - 2, j, k)] - f[g.idx(i - 3, j, k)]) / hh;
        else
          v = (f[g.idx(i + 1, j, k)] - 2.0 * f[g.idx(i, j, k)] + f[g.idx(i - 1, j, k)]) / hh;
        out[g.idx(i, j, k)] = v;
      }
  return out;
}

std::vector<double> d3_thth(const Grid3D& g, const std::vector<double>& f) {
  std::vector<double> out(g.size());
  const double hh = g.hth * g.hth;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j) {
      const int jp = (j + 1) % g.nth;
      const int jm = (j + g.nth - 1) % g.nth;
      for (int k = 0; k < g.nz; ++k)
        out[g.idx(i, j, k)] =
            (f[g.idx(i, jp, k)] - 2.0 * f[g.idx(i, j, k)] + f[g.idx(i, jm, k)]) / hh;
    }
  return out;
}

std::vector<double> d3_zz(const Grid3D& g, const std::vector<double>& f) {
  std::vector<double> out(g.size());
  const double hh = g.hz * g.hz;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        double v;
        if (k == 0)
          v = (2.0 * f[g.idx(i, j, 0)] - 5.0 * f[g.idx(i, j, 1)] + 4.0 * f[g.idx(i, j, 2)] -
               f[g.idx(i, j, 3)]) / hh;
        else if (k == g.nz - 1)
          v = (2.0 * f[g.idx(i, j, k)] - 5.0 * f[g.idx(i, j, k - 1)] +
               4.0 * f[g.idx(i, j, k - 2)] - f[g.idx(i, j, k - 3)]) / hh;
        else
          v = (f[g.idx(i, j, k + 1)] - 2.0 * f[g.idx(i, j, k)] + f[g.idx(i, j, k - 1)]) / hh;
        out[g.idx(i, j, k)] = v;
      }
  return out;
}

} // namespace

double interior_sup(const Grid3D& g, const std::vector<double>& f) {
  double out = 0.0;
  for (int i = 1; i + 1 < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j)
      for (int k = 1; k + 1 < g.nz; ++k)
        out = std::max(out, std::fabs(f[g.idx(i, j, k)]));
  return out;
}

double bernoulli_density(double gamma, double A, double K, double Phi, double speed_sq) {
  if (!(A > 0.0)) fail(errc::invalid_argument, "entropy A must be positive");
  const double arg = K + Phi - 0.5 * speed_sq;
  if (!(arg > 0.0))
    fail(errc::vacuum_state, "Bernoulli argument " + std::to_string(arg) + " <= 0");
  return std::pow((gamma - 1.0) / (gamma * A) * arg, 1.0 / (gamma - 1.0));
}

EulerPoissonResiduals euler_poisson_residual(const CylField3D& f) {
  f.validate();
  const Grid3D& g = f.grid;
  const std::size_t n = g.size();

  std::vector<double> P(n);
  for (std::size_t m = 0; m < n; ++m) P[m] = f.A[m] * std::pow(f.rho[m], f.gamma);

  std::vector<double> rho_u1(n), rho_u2(n), rho_u3(n);
  for (std::size_t m = 0; m < n; ++m) {
    rho_u1[m] = f.rho[m] * f.U1[m];
    rho_u2[m] = f.rho[m] * f.U2[m];
    rho_u3[m] = f.rho[m] * f.U3[m];
  }

  const auto du1r = d3_r(g, f.U1), du1t = d3_th(g, f.U1), du1z = d3_z(g, f.U1);
  const auto du2r = d3_r(g, f.U2), du2t = d3_th(g, f.U2), du2z = d3_z(g, f.U2);
  const auto du3r = d3_r(g, f.U3), du3t = d3_th(g, f.U3), du3z = d3_z(g, f.U3);
  const auto dPr = d3_r(g, P), dPt = d3_th(g, P), dPz = d3_z(g, P);
  const auto dAr = d3_r(g, f.A), dAt = d3_th(g, f.A), dAz = d3_z(g, f.A);
  const auto dKr = d3_r(g, f.K), dKt = d3_th(g, f.K), dKz = d3_z(g, f.K);
  const auto dFr = d3_r(g, f.Phi), dFt = d3_th(g, f.Phi), dFz = d3_z(g, f.Phi);
  const auto dru1 = d3_r(g, rho_u1), dtu2 = d3_th(g, rho_u2), dzu3 = d3_z(g, rho_u3);
  const auto dFrr = d3_rr(g, f.Phi), dFtt = d3_thth(g, f.Phi), dFzz = d3_zz(g, f.Phi);

  EulerPoissonResiduals out;
  for (auto& e : out.eq) e.assign(n, 0.0);

  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        const double rho = f.rho[m];
        const auto conv = [&](const std::vector<double>& fr, const std::vector<double>& ft,
                              const std::vector<double>& fz) {
          return f.U1[m] * fr[m] + f.U2[m] / r * ft[m] + f.U3[m] * fz[m];
        };
        out.eq[0][m] = dru1[m] + dtu2[m] / r + rho_u1[m] / r + dzu3[m];
        out.eq[1][m] = rho * conv(du1r, du1t, du1z) + dPr[m] - rho * f.U2[m] * f.U2[m] / r -
                       rho * dFr[m];
        out.eq[2][m] = rho * conv(du2r, du2t, du2z) + dPt[m] / r + rho * f.U1[m] * f.U2[m] / r -
                       rho * dFt[m] / r;
        out.eq[3][m] = rho * conv(du3r, du3t, du3z) + dPz[m] - rho * dFz[m];
        out.eq[4][m] = rho * conv(dAr, dAt, dAz);
        out.eq[5][m] = rho * conv(dKr, dKt, dKz);
        out.eq[6][m] = dFrr[m] + dFr[m] / r + dFtt[m] / (r * r) + dFzz[m] - (rho - f.b[m]);
      }
  }
  return out;
}

VorticityField3D curl_field(const CylField3D& f) {
  const Grid3D& g = f.grid;
  const auto du1t = d3_th(g, f.U1), du1z = d3_z(g, f.U1);
  const auto du2r = d3_r(g, f.U2), du2z = d3_z(g, f.U2);
  const auto du3r = d3_r(g, f.U3), du3t = d3_th(g, f.U3);

  VorticityField3D w;
  w.w1.resize(g.size());
  w.w2.resize(g.size());
  w.w3.resize(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        w.w1[m] = du3t[m] / r - du2z[m];
        w.w2[m] = du1z[m] - du3r[m];
        w.w3[m] = du2r[m] - du1t[m] / r + f.U2[m] / r;
      }
  }
  return w;
}

std::pair<std::vector<double>, std::vector<double>> vorticity_algebraic(const CylField3D& f) {
  check_u1_floor(f);
  const Grid3D& g = f.grid;
  const VorticityField3D w = curl_field(f);
  const auto dKt = d3_th(g, f.K), dKz = d3_z(g, f.K);
  const auto dAt = d3_th(g, f.A), dAz = d3_z(g, f.A);

  std::vector<double> w2(g.size()), w3(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        const double rg = std::pow(f.rho[m], f.gamma - 1.0) / (f.gamma - 1.0);
        w2[m] = (f.U2[m] * w.w1[m] + dKz[m] - rg * dAz[m]) / f.U1[m];
        w3[m] = (f.U3[m] * w.w1[m] - dKt[m] / r + rg * dAt[m] / r) / f.U1[m];
      }
  }
  return {std::move(w2), std::move(w3)};
}

std::vector<double> vorticity_divergence(const Grid3D& g, const VorticityField3D& w) {
  const auto dw1r = d3_r(g, w.w1);
  const auto dw2t = d3_th(g, w.w2);
  const auto dw3z = d3_z(g, w.w3);
  std::vector<double> out(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        out[m] = dw1r[m] + w.w1[m] / r + dw2t[m] / r + dw3z[m];
      }
  }
  return out;
}

std::vector<double> deformation_residual(const CylField3D& f) {
  const Grid3D& g = f.grid;
  const auto du1r = d3_r(g, f.U1), du1t = d3_th(g, f.U1), du1z = d3_z(g, f.U1);
  const auto du2r = d3_r(g, f.U2), du2t = d3_th(g, f.U2), du2z = d3_z(g, f.U2);
  const auto du3r = d3_r(g, f.U3), du3t = d3_th(g, f.U3), du3z = d3_z(g, f.U3);
  const auto dKr = d3_r(g, f.K), dKt = d3_th(g, f.K), dKz = d3_z(g, f.K);
  const auto dAr = d3_r(g, f.A), dAt = d3_th(g, f.A), dAz = d3_z(g, f.A);
  const auto dFr = d3_r(g, f.Phi), dFt = d3_th(g, f.Phi), dFz = d3_z(g, f.Phi);

  std::vector<double> out(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        const double u1 = f.U1[m], u2 = f.U2[m], u3 = f.U3[m];
        const double qsq = u1 * u1 + u2 * u2 + u3 * u3;
        const double arg = f.K[m] + f.Phi[m] - 0.5 * qsq;
        if (!(arg > 0.0)) fail(errc::vacuum_state, "sound speed argument <= 0");
        const double c2 = (f.gamma - 1.0) * arg;

        const double d11 = du1r[m];
        const double d22 = du2t[m] / r;
        const double d33 = du3z[m];
        const double d12 = 0.5 * (du2r[m] + du1t[m] / r);
        const double d13 = 0.5 * (du3r[m] + du1z[m]);
        const double d23 = 0.5 * (du3t[m] / r + du2z[m]);
        const double md = (c2 - u1 * u1) * d11 + (c2 - u2 * u2) * d22 + (c2 - u3 * u3) * d33 -
                          2.0 * (u1 * u2 * d12 + u1 * u3 * d13 + u2 * u3 * d23);

        const auto conv = [&](const std::vector<double>& fr, const std::vector<double>& ft,
                              const std::vector<double>& fz) {
          return u1 * fr[m] + u2 / r * ft[m] + u3 * fz[m];
        };
        // The K, Phi, A convection terms complete the Frobenius form so the
        // expression equals (c^2/H) times the continuity residual on any
        // smooth field, not only on exact solutions.
        out[m] = md + c2 * u1 / r + conv(dKr, dKt, dKz) + conv(dFr, dFt, dFz) -
                 c2 / ((f.gamma - 1.0) * f.A[m]) * conv(dAr, dAt, dAz);
      }
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> transport_residuals(const CylField3D& f) {
  const Grid3D& g = f.grid;
  const auto dKr = d3_r(g, f.K), dKt = d3_th(g, f.K), dKz = d3_z(g, f.K);
  const auto dAr = d3_r(g, f.A), dAt = d3_th(g, f.A), dAz = d3_z(g, f.A);
  std::vector<double> kres(g.size()), ares(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        kres[m] = f.U1[m] * dKr[m] + f.U2[m] / r * dKt[m] + f.U3[m] * dKz[m];
        ares[m] = f.U1[m] * dAr[m] + f.U2[m] / r * dAt[m] + f.U3[m] * dAz[m];
      }
  }
  return {std::move(kres), std::move(ares)};
}

std::vector<double> omega1_transport_residual(const CylField3D& f) {
  check_u1_floor(f);
  const Grid3D& g = f.grid;
  const std::size_t n = g.size();
  const VorticityField3D w = curl_field(f);

  std::vector<double> inv_u1(n), u2_over_u1(n), u3_over_u1(n), rg_over_u1(n);
  for (std::size_t m = 0; m < n; ++m) {
    inv_u1[m] = 1.0 / f.U1[m];
    u2_over_u1[m] = f.U2[m] / f.U1[m];
    u3_over_u1[m] = f.U3[m] / f.U1[m];
    rg_over_u1[m] = std::pow(f.rho[m], f.gamma - 1.0) / f.U1[m];
  }

  const auto dw1r = d3_r(g, w.w1), dw1t = d3_th(g, w.w1), dw1z = d3_z(g, w.w1);
  const auto d_u2u1_t = d3_th(g, u2_over_u1);
  const auto d_u3u1_z = d3_z(g, u3_over_u1);
  const auto d_invu1_t = d3_th(g, inv_u1), d_invu1_z = d3_z(g, inv_u1);
  const auto d_rg_t = d3_th(g, rg_over_u1), d_rg_z = d3_z(g, rg_over_u1);
  const auto dKt = d3_th(g, f.K), dKz = d3_z(g, f.K);
  const auto dAt = d3_th(g, f.A), dAz = d3_z(g, f.A);

  std::vector<double> out(n);
  const double gm1 = f.gamma - 1.0;
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        const double advect =
            dw1r[m] + u2_over_u1[m] / r * dw1t[m] + u3_over_u1[m] * dw1z[m];
        const double stretch = (1.0 / r + d_u2u1_t[m] / r + d_u3u1_z[m]) * w.w1[m];
        const double k_bracket = d_invu1_t[m] / r * dKz[m] - d_invu1_z[m] * dKt[m] / r;
        const double a_bracket =
            -d_rg_t[m] / (gm1 * r) * dAz[m] + d_rg_z[m] / gm1 * dAt[m] / r;
        out[m] = advect + stretch + k_bracket + a_bracket;
      }
  }
  return out;
}

std::vector<double> poisson_residual(const CylField3D& f) {
  const Grid3D& g = f.grid;
  const auto dFr = d3_r(g, f.Phi);
  const auto dFrr = d3_rr(g, f.Phi), dFtt = d3_thth(g, f.Phi), dFzz = d3_zz(g, f.Phi);
  std::vector<double> out(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nth; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t m = g.idx(i, j, k);
        const double qsq = f.U1[m] * f.U1[m] + f.U2[m] * f.U2[m] + f.U3[m] * f.U3[m];
        const double H = bernoulli_density(f.gamma, f.A[m], f.K[m], f.Phi[m], qsq);
        out[m] = dFrr[m] + dFr[m] / r + dFtt[m] / (r * r) + dFzz[m] - (H - f.b[m]);
      }
  }
  return out;
}

EquivalenceReport equivalence_check(const CylField3D& f) {
  f.validate();
  const Grid3D& g = f.grid;
  EquivalenceReport rep;

  const EulerPoissonResiduals ep = euler_poisson_residual(f);
  for (int q = 0; q < 7; ++q) rep.euler_poisson_sup[q] = interior_sup(g, ep.eq[q]);

  const auto [kres, ares] = transport_residuals(f);
  const VorticityField3D w = curl_field(f);
  const auto [w2a, w3a] = vorticity_algebraic(f);
  std::vector<double> curl2(g.size()), curl3(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    curl2[m] = w.w2[m] - w2a[m];
    curl3[m] = w.w3[m] - w3a[m];
  }
  rep.decomposition_sup[0] = interior_sup(g, ares);
  rep.decomposition_sup[1] = interior_sup(g, kres);
  rep.decomposition_sup[2] = interior_sup(g, curl2);
  rep.decomposition_sup[3] = interior_sup(g, curl3);
  rep.decomposition_sup[4] = interior_sup(g, omega1_transport_residual(f));
  rep.decomposition_sup[5] = interior_sup(g, deformation_residual(f));
  rep.decomposition_sup[6] = interior_sup(g, poisson_residual(f));
  return rep;
}

CylField3D lift_background(const InletData& inlet, int nr, int nth, int nz) {
  constexpr int kSub = 16;
  const BackgroundProfile p = integrate_background(inlet, (nr - 1) * kSub + 1);

  CylField3D f;
  f.grid = Grid3D(nr, nth, nz, inlet.r0, inlet.r1);
  f.gamma = inlet.gamma;
  const std::size_t n = f.grid.size();
  f.U1.resize(n);
  f.U2.resize(n);
  f.U3.assign(n, 0.0);
  f.rho.resize(n);
  f.A.assign(n, inlet.a0);
  f.Phi.resize(n);
  f.b.assign(n, inlet.b0);

  const double k0 = 0.5 * (inlet.u10 * inlet.u10 + inlet.u20 * inlet.u20) +
                    inlet.gamma * inlet.a0 * std::pow(inlet.rho0, inlet.gamma - 1.0) /
                        (inlet.gamma - 1.0);
  f.K.assign(n, k0);

  for (int i = 0; i < nr; ++i) {
    const int src = i * kSub;
    for (int j = 0; j < nth; ++j)
      for (int k = 0; k < nz; ++k) {
        const std::size_t m = f.grid.idx(i, j, k);
        f.U1[m] = p.u1[src];
        f.U2[m] = p.u2[src];
        f.rho[m] = p.rho[src];
        f.Phi[m] = p.phi[src];
      }
  }
  return f;
}

} // namespace ep
