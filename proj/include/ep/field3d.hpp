#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "ep/background.hpp"
#include "ep/errors.hpp"

namespace ep {

// Tensor grid in (r, theta, x3): r and x3 include their endpoints, theta is
// periodic on [0, 2*pi) with no duplicate node.
struct Grid3D {
  int nr = 0;
  int nth = 0;
  int nz = 0;
  double r0 = 0.0;
  double r1 = 0.0;
  double hr = 0.0;
  double hth = 0.0;
  double hz = 0.0;

  Grid3D() = default;
  Grid3D(int nr_, int nth_, int nz_, double r0_, double r1_);

  double r(int i) const { return r0 + hr * i; }
  double th(int j) const { return hth * j; }
  double z(int k) const { return -1.0 + hz * k; }
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * nth + j) * nz + k;
  }
  std::size_t size() const { return static_cast<std::size_t>(nr) * nth * nz; }
};

// Full cylindrical state: velocity, density, entropy A, Bernoulli K,
// electrostatic potential Phi, and ion density b, all node-aligned.
struct CylField3D {
  Grid3D grid;
  double gamma = 0.0;
  std::vector<double> U1, U2, U3, rho, A, K, Phi, b;

  void validate() const; // rho > 0 and U1 > 0 everywhere
};

struct VorticityField3D {
  std::vector<double> w1, w2, w3;
};

// Node-aligned residual arrays for the seven-equation system, in the order
// continuity, r/theta/x3 momentum, A transport, K transport, Poisson.
struct EulerPoissonResiduals {
  std::array<std::vector<double>, 7> eq;
};

// Residuals of the deformation-curl-Poisson set: A and K transport, the two
// algebraic curl constraints, the omega1 transport identity, the deformation
// (continuity) identity, and the Poisson equation with Bernoulli density.
struct DecompositionResiduals {
  std::vector<double> a_transport;
  std::vector<double> k_transport;
  std::vector<double> curl2;
  std::vector<double> curl3;
  std::vector<double> omega1_transport;
  std::vector<double> deformation;
  std::vector<double> poisson;
};

struct EquivalenceReport {
  std::array<double, 7> euler_poisson_sup{};
  std::array<double, 7> decomposition_sup{};
};

// Periodic-in-theta 2nd-order differences; one-sided 2nd-order rows at the
// r and x3 ends.
std::vector<double> d3_r(const Grid3D& g, const std::vector<double>& f);
std::vector<double> d3_th(const Grid3D& g, const std::vector<double>& f);
std::vector<double> d3_z(const Grid3D& g, const std::vector<double>& f);

// Max |.| over nodes interior in r and x3 (theta unrestricted).
double interior_sup(const Grid3D& g, const std::vector<double>& f);

EulerPoissonResiduals euler_poisson_residual(const CylField3D& f);

VorticityField3D curl_field(const CylField3D& f);

// omega2/omega3 from the algebraic constraints (omega1 taken from the curl);
// errors with degenerate_radial_velocity if U1 dips below the division floor.
std::pair<std::vector<double>, std::vector<double>> vorticity_algebraic(const CylField3D& f);

// div omega in cylindrical coordinates (used by the div-curl property).
std::vector<double> vorticity_divergence(const Grid3D& g, const VorticityField3D& w);

// rho = ((gamma-1)/(gamma*A) * (K + Phi - speed_sq/2))^(1/(gamma-1));
// errors with vacuum_state when the argument is not positive.
double bernoulli_density(double gamma, double A, double K, double Phi, double speed_sq);

std::vector<double> deformation_residual(const CylField3D& f);

// (K transport, A transport): U.grad of each along the flow.
std::pair<std::vector<double>, std::vector<double>> transport_residuals(const CylField3D& f);

std::vector<double> omega1_transport_residual(const CylField3D& f);

// Laplacian(Phi) - (H(A,K,Phi,|U|^2) - b), density through the Bernoulli law.
std::vector<double> poisson_residual(const CylField3D& f);

EquivalenceReport equivalence_check(const CylField3D& f);

// Radial background lifted to the 3D grid (theta- and x3-independent). The
// radial ODE is integrated with 16 substeps per radial cell so the sampled
// values carry negligible integration error.
CylField3D lift_background(const InletData& inlet, int nr, int nth, int nz);

} // namespace ep
