#pragma once

#include <cstddef>
#include <vector>

#include "ep/errors.hpp"

namespace ep {

// Uniform tensor grid on [r0, r1] x [z0, z1], nodes on all four boundaries.
// The physical domain is [r0, r1] x [-1, 1]; wider z extents appear only as
// symmetric extensions. i indexes r (0..nr-1), j indexes x3 (0..nz-1).
struct Grid2D {
  int nr = 0;
  int nz = 0;
  double r0 = 0.0;
  double r1 = 0.0;
  double z0 = -1.0;
  double z1 = 1.0;
  double hr = 0.0;
  double hz = 0.0;

  Grid2D() = default;
  Grid2D(int nr_, int nz_, double r0_, double r1_, double z0_ = -1.0, double z1_ = 1.0);

  double r(int i) const { return r0 + hr * i; }
  double z(int j) const { return z0 + hz * j; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * nz + j; }
  std::size_t size() const { return static_cast<std::size_t>(nr) * nz; }
};

// Plain node-aligned scalar field. Storage is row-major in (i, j).
struct ScalarField2D {
  std::vector<double> v;

  ScalarField2D() = default;
  explicit ScalarField2D(const Grid2D& g, double fill = 0.0) : v(g.size(), fill) {}

  double& operator()(const Grid2D& g, int i, int j) { return v[g.idx(i, j)]; }
  double operator()(const Grid2D& g, int i, int j) const { return v[g.idx(i, j)]; }
};

enum class parity { even, odd };

// d/dr and d/dx3: 2nd-order central in the interior, 3rd-order one-sided on
// the boundary rows (exact on cubics), so compositions of two first
// derivatives keep 2nd-order accuracy up to the walls.
ScalarField2D d_r(const Grid2D& g, const ScalarField2D& f);
ScalarField2D d_z(const Grid2D& g, const ScalarField2D& f);

// Second derivatives, same accuracy layout (4-point one-sided at the ends).
ScalarField2D d_rr(const Grid2D& g, const ScalarField2D& f);
ScalarField2D d_zz(const Grid2D& g, const ScalarField2D& f);

// Symmetric extension across both walls x3 = +-1 onto x3 in [-3, 3]:
//   even:  f(r, -2-x3) and f(r, 2-x3)
//   odd:  -f(r, -2-x3) and -f(r, 2-x3)
// The extended grid has 3*(nz-1)+1 nodes in x3. Odd parity requires a zero
// wall trace (|f| <= wall_tol there), otherwise the extension would be
// discontinuous.
struct Extended2D {
  Grid2D grid;               // spans x3 in [-3, 3]
  ScalarField2D field;
  int offset = 0;            // j-offset of the original x3 = -1 row
};
Extended2D extend_symmetric(const Grid2D& g, const ScalarField2D& f, parity p,
                            double wall_tol = 1e-10);

struct FieldNorms {
  double sup = 0.0;
  double l2 = 0.0;   // trapezoid-weighted, optionally r-weighted
  double c1 = 0.0;   // sup of |f| plus sup of |d_r f| and |d_z f|
};
FieldNorms norms(const Grid2D& g, const ScalarField2D& f, bool r_weighted = false);

// Trapezoid quadrature of f (optionally r-weighted) over the rectangle.
double integrate(const Grid2D& g, const ScalarField2D& f, bool r_weighted = false);

} // namespace ep
