#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ep/errors.hpp"

namespace ep {

// Inflow state on the inner cylinder r = r0 plus the geometry. The entropy
// a0 and the two flux constants m1 = r0*rho0*u10, m2 = r0*u20 determine the
// radial profile together with the electric field ODE.
struct InletData {
  double gamma = 0.0;
  double rho0 = 0.0;
  double u10 = 0.0;
  double u20 = 0.0;
  double a0 = 0.0;
  double e0 = 0.0;
  double b0 = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;

  void validate() const;
  double sound_speed_sq() const; // gamma * a0 * rho0^(gamma-1)
};

struct Subsonic {};
struct TransonicCandidate {};
struct Transonic {
  double r_c = 0.0;
};
struct Invalid {
  std::string reason;
};
using FlowRegime = std::variant<Subsonic, TransonicCandidate, Transonic, Invalid>;

struct MachState {
  double m1_sq = 0.0;
  double m2_sq = 0.0;
};

// Radial profile sampled on a uniform grid. u1, u2 are reconstructed from the
// flux constants at every node, so r*rho*u1 = m1 and r*u2 = m2 hold exactly.
struct BackgroundProfile {
  std::vector<double> r_nodes;
  std::vector<double> rho;
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<double> e_field;
  std::vector<double> phi; // phi[0] = 0
  double m1 = 0.0;
  double m2 = 0.0;
  double a_const = 0.0;
  double gamma = 0.0;
  double b0 = 0.0;
  FlowRegime regime;

  int n() const { return static_cast<int>(r_nodes.size()); }
  double h() const { return r_nodes.size() > 1 ? r_nodes[1] - r_nodes[0] : 0.0; }
  double sound_speed_sq(int k) const;
  MachState mach(int k) const;
};

// Pre-integration candidate classification from the inlet inequalities alone.
FlowRegime classify_inlet(const InletData& inlet);

// Classical fixed-step RK4 for (rho, r*E) on a uniform n_nodes grid; phi by
// composite trapezoid of E. Throws radial_sonic_degeneracy if 1 - M1^2 drops
// below 1e-8 and non_positive_density if rho <= 0 at any stage point.
BackgroundProfile integrate_background(const InletData& inlet, int n_nodes = 2049);

std::vector<MachState> mach_profile(const BackgroundProfile& p);

// Bisection on |M|^2 - 1 between the bracketing nodes, to |g| <= 1e-10.
// nullopt when there is no sign change; multiple_crossings if more than one.
std::optional<double> find_sonic_radius(const BackgroundProfile& p);

// Max over nodes of f(r) - r0^2 f(r0) / r^2 with f = |M|^2; the transonic
// decay bound predicts this stays <= ~1e-8.
double check_decay_bound(const BackgroundProfile& p);

// Central finite differences of M1^2, M2^2, |M|^2 against their closed-form
// derivative laws; returns the max absolute mismatch over interior nodes.
double cross_check_mach_ode(const BackgroundProfile& p);

// Closed-form derivative of |M|^2 at node k (used by the sign property and
// the cross-check).
double mach_total_sq_derivative(const BackgroundProfile& p, int k);

// ODE slopes (d rho/dr, d(r*E)/dr) at radius r for a given state; exposed so
// profile resampling onto solver grids can use Hermite interpolation with
// exact slopes instead of finite-difference ones.
struct RadialSlopes {
  double drho = 0.0;
  double dre = 0.0;
};
RadialSlopes radial_slopes(const BackgroundProfile& p, double r, double rho, double re);

} // namespace ep
