#pragma once

#include <array>
#include <limits>
#include <vector>

#include "ep/elliptic2d.hpp"
#include "ep/transport2d.hpp"

namespace ep {

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 60;
  double delta_guard = 0.0; // <= 0 picks the default 100 * eps
  Grid2D grid;
};

// Interior norms (one boundary layer excluded) of the six steady equations
// evaluated on the total flow: mass, radial/azimuthal/axial momentum,
// entropy transport, and the potential equation. The density is recovered
// pointwise from the Bernoulli relation.
struct ResidualNorms {
  std::array<double, 6> sup{};
  std::array<double, 6> l2{};
};

struct SolveReport {
  DeviationField field;
  int iters = 0;
  std::vector<double> increments_sup; // per-iteration sup of W^{k+1} - W^k
  std::vector<double> increments_c1;  // the same increments in the C1 norm
  double contraction_ratio = 0.0;     // geometric mean of the last ratios (up to 3)
  ResidualNorms residuals;
};

// One sweep of the fixed-point map: transport the hyperbolic triple along
// the current streamlines, assemble the source terms, solve the axial
// corrector and the coupled elliptic pair, and recover the new deviation
// field. Rejects an input beyond the trust-region radius.
DeviationField apply_map(const DeviationField& w_sharp, const BackgroundOnGrid& bg,
                         const BoundaryPerturbation& bc,
                         double delta_guard = std::numeric_limits<double>::infinity());

// Fixed-point iteration from the zero field until the sup increment falls
// below tol. An iterate that leaves the admissible state region (vacuum or
// a vanished radial velocity) counts as failure to contract.
SolveReport fixed_point_solve(const BackgroundProfile& profile, const BoundaryPerturbation& bc,
                              const SolveOptions& opts);

ResidualNorms full_residual(const DeviationField& w, const BackgroundOnGrid& bg,
                            const BoundaryPerturbation& bc);

// Largest drift of the streamline invariants (Bernoulli deviation, entropy
// deviation, angular momentum r*W2) between random interior nodes and their
// traced inflow data.
struct StreamlineDrift {
  double k = 0.0;
  double a = 0.0;
  double ru2 = 0.0;
};
StreamlineDrift streamline_invariants(const DeviationField& w, const BackgroundOnGrid& bg,
                                      const BoundaryPerturbation& bc, int n_lines,
                                      unsigned seed = 7u);

} // namespace ep
