#pragma once

#include <vector>

#include "ep/background.hpp"
#include "ep/boundary.hpp"
#include "ep/grid2d.hpp"

namespace ep {

// Radial background resampled at the radial nodes of a 2D grid, via cubic
// Hermite interpolation with slopes from the governing ODE (so the
// resampling keeps the profile's accuracy order). c2 is the squared sound
// speed; k0 is the constant Bernoulli value of the background.
struct BackgroundOnGrid {
  Grid2D grid;
  std::vector<double> rho, u1, u2, e, phi, c2; // indexed by the radial node i
  double gamma = 0.0;
  double a0 = 0.0;
  double k0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double b0 = 0.0;
};
BackgroundOnGrid sample_background(const BackgroundProfile& p, const Grid2D& g);

// The deviation unknowns (W1..W6) of the perturbed axisymmetric problem:
// radial velocity, swirl, axial velocity, entropy, Bernoulli, potential.
struct DeviationField {
  Grid2D grid;
  ScalarField2D W1, W2, W3, W4, W5, W6;

  DeviationField() = default;
  explicit DeviationField(const Grid2D& g)
      : grid(g), W1(g), W2(g), W3(g), W4(g), W5(g), W6(g) {}

  double sup_norm() const;
};

struct CharacteristicFoot {
  double r_start = 0.0;
  double z_start = 0.0;
  double z3_0 = 0.0; // inflow coordinate reached at r = r0
  bool valid = false;
};

// Backward RK4 along dx3/dr = W3#/U1 from (r_start, z_start) down to r0,
// bilinear interpolation between nodes, path clamped to [-1, 1]. Step = hr,
// quartered within 2*hr of the inner boundary. Walls are invariant when the
// wall rows of w3_sharp vanish.
CharacteristicFoot trace_characteristic(const Grid2D& g, const ScalarField2D& u1_total,
                                        const ScalarField2D& w3_sharp, double r_start,
                                        double z_start);

// Transported triple: at each node, r*W2 = r0*eps*u2_en(z3^0),
// W4 = eps*a_en(z3^0), W5 = eps*k_en(z3^0) with z3^0 the traced foot.
struct TransportSolution {
  ScalarField2D W2, W4, W5;
  ScalarField2D feet;
};
TransportSolution solve_transport(const ScalarField2D& w1_sharp, const ScalarField2D& w3_sharp,
                                  const BackgroundOnGrid& bg, const BoundaryPerturbation& bc);

struct GTerms {
  ScalarField2D G1, G2, G3, G4;
};

// Density of the perturbed state at radial node i, via the Bernoulli
// relation in ratio form anchored to the sampled background: zero deviations
// return bg.rho[i] exactly. Throws on vacuum states, non-positive entropy,
// and a radial velocity below the division floor.
double perturbed_density(const BackgroundOnGrid& bg, int i, double w1, double w2, double w3,
                         double w4, double w5, double w6);

// Source terms of the elliptic half. The x3 derivatives of the transported
// triple inside G2 are assembled by the chain rule through the boundary
// profiles (analytic derivative at the traced foot times the finite
// difference of the foot field), so wall compatibility of the data carries
// to machine precision. The G4 term includes -eps*b_tilde.
GTerms eval_g_terms(const DeviationField& w_sharp, const ScalarField2D& W2,
                    const ScalarField2D& W4, const ScalarField2D& W5,
                    const BackgroundOnGrid& bg, const BoundaryPerturbation& bc);

// Variant reusing feet already traced by solve_transport (identical result,
// skips the second trace).
GTerms eval_g_terms(const DeviationField& w_sharp, const TransportSolution& transported,
                    const BackgroundOnGrid& bg, const BoundaryPerturbation& bc);

// Sup over the two wall rows of |G2|, |G3|, |d3 G1|, |d3 G4|, with the x3
// derivatives of G1 and G4 expanded analytically through the chain rule.
// Compatible inputs score machine zeros.
struct WallCompat {
  double g2 = 0.0;
  double g3 = 0.0;
  double d3_g1 = 0.0;
  double d3_g4 = 0.0;
};
WallCompat g_wall_compat(const DeviationField& w_sharp, const TransportSolution& transported,
                         const BackgroundOnGrid& bg, const BoundaryPerturbation& bc);

} // namespace ep
