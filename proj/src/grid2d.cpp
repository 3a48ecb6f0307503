#include "ep/grid2d.hpp"

#include <algorithm>
#include <cmath>

namespace ep {

Grid2D::Grid2D(int nr_, int nz_, double r0_, double r1_, double z0_, double z1_)
    : nr(nr_), nz(nz_), r0(r0_), r1(r1_), z0(z0_), z1(z1_) {
  if (nr < 9 || nz < 9) fail(errc::invalid_argument, "grid needs nr, nz >= 9");
  if (!(r0 > 0.0) || !(r1 > r0)) fail(errc::invalid_argument, "need 0 < r0 < r1");
  if (!(z1 > z0)) fail(errc::invalid_argument, "need z0 < z1");
  hr = (r1 - r0) / (nr - 1);
  hz = (z1 - z0) / (nz - 1);
}

namespace {

// One-sided 2nd-order endpoint stencils keep the operator exact on quadratics.
// Boundary rows use 4-point (3rd-order) one-sided stencils so that a first
// derivative of a first derivative stays 2nd order up to the walls.
inline double diff_line(const double* f, int n, int k, double h) {
  if (k == 0) return (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * h);
  if (k == n - 1)
    return (11.0 * f[n - 1] - 18.0 * f[n - 2] + 9.0 * f[n - 3] - 2.0 * f[n - 4]) / (6.0 * h);
  return (f[k + 1] - f[k - 1]) / (2.0 * h);
}

inline double diff2_line(const double* f, int n, int k, double h) {
  const double h2 = h * h;
  if (k == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  if (k == n - 1)
    return (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return (f[k + 1] - 2.0 * f[k] + f[k - 1]) / h2;
}

} // namespace

ScalarField2D d_r(const Grid2D& g, const ScalarField2D& f) {
  ScalarField2D out(g);
  std::vector<double> line(g.nr);
  for (int j = 0; j < g.nz; ++j) {
    for (int i = 0; i < g.nr; ++i) line[i] = f.v[g.idx(i, j)];
    for (int i = 0; i < g.nr; ++i) out.v[g.idx(i, j)] = diff_line(line.data(), g.nr, i, g.hr);
  }
  return out;
}

ScalarField2D d_z(const Grid2D& g, const ScalarField2D& f) {
  ScalarField2D out(g);
  for (int i = 0; i < g.nr; ++i) {
    const double* row = f.v.data() + g.idx(i, 0);
    for (int j = 0; j < g.nz; ++j) out.v[g.idx(i, j)] = diff_line(row, g.nz, j, g.hz);
  }
  return out;
}

ScalarField2D d_rr(const Grid2D& g, const ScalarField2D& f) {
  ScalarField2D out(g);
  std::vector<double> line(g.nr);
  for (int j = 0; j < g.nz; ++j) {
    for (int i = 0; i < g.nr; ++i) line[i] = f.v[g.idx(i, j)];
    for (int i = 0; i < g.nr; ++i) out.v[g.idx(i, j)] = diff2_line(line.data(), g.nr, i, g.hr);
  }
  return out;
}

ScalarField2D d_zz(const Grid2D& g, const ScalarField2D& f) {
  ScalarField2D out(g);
  for (int i = 0; i < g.nr; ++i) {
    const double* row = f.v.data() + g.idx(i, 0);
    for (int j = 0; j < g.nz; ++j) out.v[g.idx(i, j)] = diff2_line(row, g.nz, j, g.hz);
  }
  return out;
}

Extended2D extend_symmetric(const Grid2D& g, const ScalarField2D& f, parity p,
                            double wall_tol) {
  if (p == parity::odd) {
    for (int i = 0; i < g.nr; ++i) {
      const double lo = std::fabs(f.v[g.idx(i, 0)]);
      const double hi = std::fabs(f.v[g.idx(i, g.nz - 1)]);
      if (lo > wall_tol || hi > wall_tol)
        fail(errc::odd_extension_mismatch,
             "wall trace " + std::to_string(std::max(lo, hi)) + " exceeds " +
                 std::to_string(wall_tol));
    }
  }

  Extended2D out;
  out.grid = Grid2D(g.nr, 3 * (g.nz - 1) + 1, g.r0, g.r1, -3.0, 3.0);
  out.offset = g.nz - 1;
  out.field = ScalarField2D(out.grid);
  const double sign = (p == parity::odd) ? -1.0 : 1.0;
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j)
      out.field.v[out.grid.idx(i, out.offset + j)] = f.v[g.idx(i, j)];
    // x3 in [-3, -1): mirror about the lower wall, x3 -> -2 - x3.
    for (int j = 0; j < g.nz - 1; ++j)
      out.field.v[out.grid.idx(i, j)] = sign * f.v[g.idx(i, g.nz - 1 - j)];
    // x3 in (1, 3]: mirror about the upper wall, x3 -> 2 - x3.
    for (int j = 1; j < g.nz; ++j)
      out.field.v[out.grid.idx(i, 2 * (g.nz - 1) + j)] = sign * f.v[g.idx(i, g.nz - 1 - j)];
  }
  return out;
}

FieldNorms norms(const Grid2D& g, const ScalarField2D& f, bool r_weighted) {
  FieldNorms out;
  for (double x : f.v) out.sup = std::max(out.sup, std::fabs(x));
  double acc = 0.0;
  for (int i = 0; i < g.nr; ++i) {
    const double wr = (i == 0 || i == g.nr - 1) ? 0.5 : 1.0;
    const double rw = r_weighted ? g.r(i) : 1.0;
    for (int j = 0; j < g.nz; ++j) {
      const double wz = (j == 0 || j == g.nz - 1) ? 0.5 : 1.0;
      const double x = f.v[g.idx(i, j)];
      acc += wr * wz * rw * x * x;
    }
  }
  out.l2 = std::sqrt(acc * g.hr * g.hz);
  const ScalarField2D fr = d_r(g, f);
  const ScalarField2D fz = d_z(g, f);
  double dsup = 0.0;
  for (double x : fr.v) dsup = std::max(dsup, std::fabs(x));
  for (double x : fz.v) dsup = std::max(dsup, std::fabs(x));
  out.c1 = out.sup + dsup;
  return out;
}

double integrate(const Grid2D& g, const ScalarField2D& f, bool r_weighted) {
  double acc = 0.0;
  for (int i = 0; i < g.nr; ++i) {
    const double wr = (i == 0 || i == g.nr - 1) ? 0.5 : 1.0;
    const double rw = r_weighted ? g.r(i) : 1.0;
    for (int j = 0; j < g.nz; ++j) {
      const double wz = (j == 0 || j == g.nz - 1) ? 0.5 : 1.0;
      acc += wr * wz * rw * f.v[g.idx(i, j)];
    }
  }
  return acc * g.hr * g.hz;
}

} // namespace ep
