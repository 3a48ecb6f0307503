#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "ep/field3d.hpp"
#include "ep/jet.hpp"

namespace ep {

// Pointwise analytic state, evaluated with T = double for sampling and with
// T = Jet<3> when exact derivatives are needed.
template <class T>
struct AnalyticState {
  T u1, u2, u3, rho, a, k, phi;
};

// Constant state with Phi = 0 and b = rho; K follows from the Bernoulli law
// so the density relation holds exactly.
struct UniformFlow {
  double gamma = 2.0;
  double u1c = 1.0;
  double u2c = 0.0;
  double u3c = 0.0;
  double rho_c = 1.0;
  double a_c = 1.0;

  template <class T>
  AnalyticState<T> state(T, T, T) const {
    const double q2 = u1c * u1c + u2c * u2c + u3c * u3c;
    const double kk =
        0.5 * q2 + gamma * a_c * std::pow(rho_c, gamma - 1.0) / (gamma - 1.0);
    AnalyticState<T> s;
    s.u1 = T(u1c);
    s.u2 = T(u2c);
    s.u3 = T(u3c);
    s.rho = T(rho_c);
    s.a = T(a_c);
    s.k = T(kk);
    s.phi = T(0.0);
    return s;
  }

  double source(double, double, double) const { return rho_c; }
};

// Purely radial velocity with a genuinely (theta, x3)-dependent magnitude:
//   U1^2 = g0 + g1/r^2 + 2*kappa*cos(theta)*cos(pi*x3),  U2 = U3 = 0,
//   rho = m/(r*U1),  A = a0,  K = k_base + kappa*cos(theta)*cos(pi*x3),
//   Phi from the Bernoulli law, b = rho - Laplacian(Phi).
// Every equation of both formulations vanishes identically: continuity since
// r*rho*U1 = m, the momentum equations since grad K recombines them through
// the Bernoulli law, the transports since A is constant and K does not vary
// along the purely radial flow, and Poisson by the choice of b.
struct SwirlExact {
  double gamma = 5.0 / 3.0;
  double a0 = 1.0;
  double kappa = 0.1;
  double m = 1.0;
  double g0 = 2.0;
  double g1 = 1.0;
  double k_base = 3.0;

  template <class T>
  AnalyticState<T> state(T r, T th, T z) const {
    const double pi = std::acos(-1.0);
    const T sigma = cos(th) * cos(pi * z);
    const T u1sq = g0 + g1 * inverse(r * r) + 2.0 * kappa * sigma;
    AnalyticState<T> s;
    s.u1 = sqrt(u1sq);
    s.u2 = T(0.0);
    s.u3 = T(0.0);
    s.rho = m * inverse(r * s.u1);
    s.a = T(a0);
    s.k = k_base + kappa * sigma;
    s.phi = gamma * a0 / (gamma - 1.0) * pow(s.rho, gamma - 1.0) + 0.5 * u1sq - s.k;
    return s;
  }

  double source(double r, double th, double z) const {
    using J = Jet<3>;
    const AnalyticState<J> s =
        state(J::variable(r, 0), J::variable(th, 1), J::variable(z, 2));
    const double lap =
        s.phi.h[0][0] + s.phi.d[0] / r + s.phi.h[1][1] / (r * r) + s.phi.h[2][2];
    return s.rho.v - lap;
  }
};

// Seeded smooth trigonometric fields, theta-periodic through integer mode
// numbers. Not a solution of anything; used to exercise the discrete
// operators against exact derivatives. Base values keep densities, entropy,
// and the Bernoulli argument safely positive.
struct RandomSmooth {
  double gamma = 1.4;

  struct Series {
    double base = 0.0;
    std::array<double, 3> amp{}, ar{}, br{}, az{}, bz{}, ph{};
    std::array<int, 3> mth{};

    template <class T>
    T eval(T r, T th, T z) const {
      T out(base);
      for (int t = 0; t < 3; ++t)
        out = out + amp[t] * cos(double(mth[t]) * th + ph[t]) *
                        cos(ar[t] * r + br[t]) * cos(az[t] * z + bz[t]);
      return out;
    }
  };

  Series u1s, u2s, u3s, rhos, as, ks, phis, bs;

  explicit RandomSmooth(std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ufreq(0.5, 2.0);
    std::uniform_real_distribution<double> uphase(0.0, 6.2831853);
    std::uniform_int_distribution<int> umode(0, 3);
    const auto make = [&](double base, double amp_scale) {
      Series s;
      s.base = base;
      std::uniform_real_distribution<double> uamp(0.3 * amp_scale, amp_scale);
      for (int t = 0; t < 3; ++t) {
        s.amp[t] = uamp(rng);
        s.mth[t] = umode(rng);
        s.ar[t] = ufreq(rng);
        s.br[t] = uphase(rng);
        s.az[t] = ufreq(rng);
        s.bz[t] = uphase(rng);
        s.ph[t] = uphase(rng);
      }
      return s;
    };
    u1s = make(1.5, 0.05);
    u2s = make(0.0, 0.05);
    u3s = make(0.0, 0.05);
    rhos = make(1.0, 0.05);
    as = make(1.0, 0.05);
    ks = make(3.0, 0.05);
    phis = make(0.0, 0.05);
    bs = make(0.5, 0.05);
  }

  template <class T>
  AnalyticState<T> state(T r, T th, T z) const {
    AnalyticState<T> s;
    s.u1 = u1s.eval(r, th, z);
    s.u2 = u2s.eval(r, th, z);
    s.u3 = u3s.eval(r, th, z);
    s.rho = rhos.eval(r, th, z);
    s.a = as.eval(r, th, z);
    s.k = ks.eval(r, th, z);
    s.phi = phis.eval(r, th, z);
    return s;
  }

  double source(double r, double th, double z) const { return bs.eval(r, th, z); }
};

template <class Preset>
CylField3D sample_field(const Preset& p, int nr, int nth, int nz, double r0, double r1) {
  CylField3D f;
  f.grid = Grid3D(nr, nth, nz, r0, r1);
  f.gamma = p.gamma;
  const std::size_t n = f.grid.size();
  f.U1.resize(n);
  f.U2.resize(n);
  f.U3.resize(n);
  f.rho.resize(n);
  f.A.resize(n);
  f.K.resize(n);
  f.Phi.resize(n);
  f.b.resize(n);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nth; ++j)
      for (int k = 0; k < nz; ++k) {
        const double r = f.grid.r(i);
        const double th = f.grid.th(j);
        const double z = f.grid.z(k);
        const AnalyticState<double> s = p.state(r, th, z);
        const std::size_t m = f.grid.idx(i, j, k);
        f.U1[m] = s.u1;
        f.U2[m] = s.u2;
        f.U3[m] = s.u3;
        f.rho[m] = s.rho;
        f.A[m] = s.a;
        f.K[m] = s.k;
        f.Phi[m] = s.phi;
        f.b[m] = p.source(r, th, z);
      }
  return f;
}

} // namespace ep
