#pragma once

// Reference computations shared by the test suites. Everything here is
// written directly from the governing relations and shares no code with the
// library internals, so agreement between the two is evidence, not
// tautology.

#include <cmath>
#include <random>
#include <vector>

#include "ep/background.hpp"
#include "ep/grid2d.hpp"

namespace eptest {

// Independent classical RK4 for the radial state y = (rho, r*E):
//   rho' = rho*(U1^2 + U2^2 + E*r) / (r*(c^2 - U1^2)),  (r*E)' = r*(rho - b0)
// with U1 = m1/(r*rho), U2 = m2/r, c^2 = gamma*a0*rho^(gamma-1).
struct RadialOracle {
  std::vector<double> r, rho, re;
};

inline RadialOracle rk4_oracle(const ep::InletData& in, int n) {
  const double m1 = in.r0 * in.rho0 * in.u10;
  const double m2 = in.r0 * in.u20;
  const auto slope = [&](double r, double rho, double re, double* drho, double* dre) {
    const double u1 = m1 / (r * rho);
    const double u2 = m2 / r;
    const double c2 = in.gamma * in.a0 * std::pow(rho, in.gamma - 1.0);
    const double e = re / r;
    *drho = rho * (u1 * u1 + u2 * u2 + e * r) / (r * (c2 - u1 * u1));
    *dre = r * (rho - in.b0);
  };
  RadialOracle out;
  out.r.resize(n);
  out.rho.resize(n);
  out.re.resize(n);
  const double h = (in.r1 - in.r0) / (n - 1);
  double rho = in.rho0, re = in.r0 * in.e0;
  for (int k = 0; k < n; ++k) {
    const double r = in.r0 + h * k;
    out.r[k] = r;
    out.rho[k] = rho;
    out.re[k] = re;
    if (k + 1 == n) break;
    double k1r, k1e, k2r, k2e, k3r, k3e, k4r, k4e;
    slope(r, rho, re, &k1r, &k1e);
    slope(r + 0.5 * h, rho + 0.5 * h * k1r, re + 0.5 * h * k1e, &k2r, &k2e);
    slope(r + 0.5 * h, rho + 0.5 * h * k2r, re + 0.5 * h * k2e, &k3r, &k3e);
    slope(r + h, rho + h * k3r, re + h * k3e, &k4r, &k4e);
    rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    re += h / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
  }
  return out;
}

inline double oracle_mach_total_sq(const ep::InletData& in, double r, double rho) {
  const double m1 = in.r0 * in.rho0 * in.u10;
  const double m2 = in.r0 * in.u20;
  const double u1 = m1 / (r * rho);
  const double u2 = m2 / r;
  const double c2 = in.gamma * in.a0 * std::pow(rho, in.gamma - 1.0);
  return (u1 * u1 + u2 * u2) / c2;
}

// Richardson-extrapolated endpoint values (the base scheme is order 4, so
// the n and 2n-1 runs combine as (16*fine - coarse)/15).
struct EndpointOracle {
  double rho_end = 0.0;
  double mach_sq_end = 0.0;
};

inline EndpointOracle richardson_endpoint(const ep::InletData& in, int n) {
  const RadialOracle coarse = rk4_oracle(in, n);
  const RadialOracle fine = rk4_oracle(in, 2 * n - 1);
  const double rho = (16.0 * fine.rho.back() - coarse.rho.back()) / 15.0;
  EndpointOracle out;
  out.rho_end = rho;
  out.mach_sq_end = oracle_mach_total_sq(in, in.r1, rho);
  return out;
}

inline double order_between(double coarse, double fine) {
  return std::log2(coarse / fine);
}

// Admissible random inlets. The subsonic family satisfies
// c0^2 > u10^2 + u20^2, the transonic one u10^2 < c0^2 < u10^2 + u20^2;
// both keep rho0 > b0 > 0 and e0 > 0.
inline ep::InletData random_subsonic_inlet(std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ep::InletData in;
  in.gamma = 1.3 + 1.2 * uni(rng);
  in.rho0 = 0.6 + 1.2 * uni(rng);
  in.a0 = 0.6 + 0.9 * uni(rng);
  in.b0 = in.rho0 * (0.1 + 0.8 * uni(rng));
  in.e0 = 0.02 + 0.38 * uni(rng);
  in.r0 = 1.0;
  in.r1 = 2.0;
  const double c0_sq = in.gamma * in.a0 * std::pow(in.rho0, in.gamma - 1.0);
  const double q = c0_sq * (0.05 + 0.75 * uni(rng)); // total speed squared
  const double split = 0.2 + 0.7 * uni(rng);
  in.u10 = std::sqrt(q * split);
  in.u20 = std::sqrt(q * (1.0 - split));
  return in;
}

// gamma stays at or above 2: softer pressure laws let the density run away
// at finite radius once rho > b0, which would cut the domain short of r1.
inline ep::InletData random_transonic_inlet(std::mt19937& rng, double r1_over_r0 = 10.0) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ep::InletData in;
  in.gamma = 2.0 + 1.0 * uni(rng);
  in.rho0 = 0.6 + 1.2 * uni(rng);
  in.a0 = 0.6 + 0.9 * uni(rng);
  in.b0 = in.rho0 * (0.1 + 0.8 * uni(rng));
  in.e0 = 0.02 + 0.38 * uni(rng);
  in.r0 = 1.0;
  in.r1 = r1_over_r0;
  const double c0_sq = in.gamma * in.a0 * std::pow(in.rho0, in.gamma - 1.0);
  const double s = 0.15 + 0.55 * uni(rng); // u10^2 / c0^2
  const double t = 1.1 + 1.1 * uni(rng);   // (u10^2 + u20^2) / c0^2
  in.u10 = std::sqrt(c0_sq * s);
  in.u20 = std::sqrt(c0_sq * (t - s));
  return in;
}

template <class F>
ep::ScalarField2D sample2d(const ep::Grid2D& g, F f) {
  ep::ScalarField2D out(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) out(g, i, j) = f(g.r(i), g.z(j));
  return out;
}

inline double sup_diff(const ep::ScalarField2D& x, const ep::ScalarField2D& y) {
  double m = 0.0;
  for (std::size_t k = 0; k < x.v.size(); ++k) m = std::max(m, std::abs(x.v[k] - y.v[k]));
  return m;
}

inline double interior_sup2d(const ep::Grid2D& g, const ep::ScalarField2D& f) {
  double m = 0.0;
  for (int i = 1; i + 1 < g.nr; ++i)
    for (int j = 1; j + 1 < g.nz; ++j) m = std::max(m, std::abs(f(g, i, j)));
  return m;
}

} // namespace eptest
