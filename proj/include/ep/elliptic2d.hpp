#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "ep/boundary.hpp"
#include "ep/grid2d.hpp"
#include "ep/transport2d.hpp"

namespace ep {

// Radial coefficient arrays of the coupled (psi, phi) system:
//   a = r*rho*(1 - M1^2)   (psi radial flux weight)
//   b = r*rho              (psi axial flux weight)
//   c = r*rho*U1/c^2       (coupling weight)
//   d = r*rho/c^2          (phi mass weight)
// All four stay positive as long as the radial Mach number stays below one,
// which holds on the full annulus in the subsonic regime and on the truncated
// annulus in the transonic one.
struct CoupledCoefficients {
  Grid2D grid;
  std::vector<double> a, b, c, d; // indexed by the radial node

  void validate() const;
};
CoupledCoefficients make_coefficients(const BackgroundOnGrid& bg);

// Coordinate-format sparse system. Unknown ordering: the psi block
// (nr*nz unknowns, row-major radial-then-axial) followed by the phi block.
struct SparseSystem {
  int n = 0;
  std::vector<int> rows, cols;
  std::vector<double> vals;
  std::vector<double> rhs;
};

// One "i j value" line per stored entry, 0-based indices.
void dump_system(const SparseSystem& sys, std::ostream& out);

// (d_rr + d_zz) psi1 = g2 with psi1(r1,.) = 0, d_r psi1(r0,.) = 0 and
// psi1(.,+-1) = 0. Solved on the odd symmetric extension x3 in [-3,3]
// (Dirichlet zero at the extension ends) and restricted back, which keeps
// the corner behaviour of the continuum construction; g2 must carry a
// near-zero wall trace or the odd extension guard rejects it.
ScalarField2D solve_psi1(const ScalarField2D& g2, const Grid2D& grid);

// eps * ((r1 - r)*phi_en(x3) + (r - r0)*phi_ex(x3)) / (r1 - r0)
ScalarField2D phi1_blend(const BoundaryPerturbation& bc, const Grid2D& grid);

// Right-hand sides of the coupled system, assembled from the transport
// sources, the psi1 corrector, the freshly transported triple, and the phi1
// boundary lift.
struct CoupledSources {
  ScalarField2D gt1, gt3, gt4;
};
CoupledSources compute_coupled_sources(const GTerms& g, const ScalarField2D& psi1,
                                       const TransportSolution& transported,
                                       const BackgroundOnGrid& bg,
                                       const BoundaryPerturbation& bc);

// Vertex-centered finite-volume discretization, written as raw flux balances
// (not divided by cell area) so the psi-psi and phi-phi blocks come out
// symmetric. Boundary encoding: psi Dirichlet at r0 (the tangential inflow
// condition d3 psi = eps*u3_en integrated to a trace vanishing at x3 = 0),
// known flux a*eps*u1_ex at r1, zero-flux walls; phi vanishes at r0 and r1,
// zero-flux walls. Dirichlet rows are identity rows and their columns are
// eliminated into the right-hand side.
SparseSystem assemble_coupled(const CoupledCoefficients& coeffs, const ScalarField2D& gt1,
                              const ScalarField2D& gt3, const ScalarField2D& gt4,
                              const BoundaryPerturbation& bc, const Grid2D& grid);

struct CoupledSolution {
  ScalarField2D psi, phi;
};

// Sparse LU first, BiCGStab fallback. A solution is accepted only when
// ||Ax - b||_inf <= 1e-10 * ||b||_inf.
CoupledSolution solve_coupled(const SparseSystem& sys, const Grid2D& grid);

struct RecoveredDeviation {
  ScalarField2D W1, W3, W6;
};
// W1 = d_r psi - d_z psi1, W3 = d_z psi + d_r psi1, W6 = phi + phi1.
RecoveredDeviation recover_deviation(const ScalarField2D& psi, const ScalarField2D& phi,
                                     const ScalarField2D& psi1,
                                     const BoundaryPerturbation& bc, const Grid2D& grid);

// Discrete quadratic form of the coupled system evaluated on random smooth
// probe pairs (psi normalized to r-weighted mean zero, phi vanishing at
// r0/r1). min_quotient is the smallest B / (||psi||_H1^2 + ||phi||_H1^2)
// over the samples; worst_cancellation is the largest relative defect
// between the two mixed coupling terms, which cancel pointwise.
struct CoercivityReport {
  double min_quotient = 0.0;
  double worst_cancellation = 0.0;
};
CoercivityReport coercivity_probe(const CoupledCoefficients& coeffs, const Grid2D& grid,
                                  int n_samples, unsigned seed = 20240801u);

// Caches the two factorizations reused across fixed-point sweeps: the
// extended psi1 Laplacian depends only on the grid, the coupled matrix only
// on the coefficients. Right-hand sides are rebuilt per sweep.
class EllipticWorkspace {
public:
  EllipticWorkspace(const CoupledCoefficients& coeffs, const Grid2D& grid);
  ~EllipticWorkspace();
  EllipticWorkspace(const EllipticWorkspace&) = delete;
  EllipticWorkspace& operator=(const EllipticWorkspace&) = delete;

  ScalarField2D solve_psi1(const ScalarField2D& g2) const;
  CoupledSolution solve_coupled(const CoupledSources& src, const BoundaryPerturbation& bc) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace ep
