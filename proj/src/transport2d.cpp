#include "ep/transport2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ep {

namespace {

constexpr double kU1Floor = 1e-12;
constexpr double kVacuumFloor = 1e-10;

double bilinear(const Grid2D& g, const ScalarField2D& f, double r, double z) {
  const double rc = std::clamp(r, g.r0, g.r1);
  const double zc = std::clamp(z, g.z0, g.z1);
  int i = static_cast<int>((rc - g.r0) / g.hr);
  int j = static_cast<int>((zc - g.z0) / g.hz);
  i = std::clamp(i, 0, g.nr - 2);
  j = std::clamp(j, 0, g.nz - 2);
  const double tr = std::clamp((rc - g.r(i)) / g.hr, 0.0, 1.0);
  const double tz = std::clamp((zc - g.z(j)) / g.hz, 0.0, 1.0);
  return (1.0 - tr) * (1.0 - tz) * f(g, i, j) + tr * (1.0 - tz) * f(g, i + 1, j) +
         (1.0 - tr) * tz * f(g, i, j + 1) + tr * tz * f(g, i + 1, j + 1);
}

void check_u1_floor(const ScalarField2D& u1_total) {
  for (double u : u1_total.v)
    if (u < kU1Floor)
      fail(errc::degenerate_radial_velocity,
           "U1 = " + std::to_string(u) + " below the tracing floor");
}

// Trace without re-validating the whole field (the caller did that once).
CharacteristicFoot trace_unchecked(const Grid2D& g, const ScalarField2D& u1_total,
                                   const ScalarField2D& w3_sharp, double r_start,
                                   double z_start) {
  const auto slope = [&](double r, double z) {
    return bilinear(g, w3_sharp, r, z) / bilinear(g, u1_total, r, z);
  };
  double r = std::clamp(r_start, g.r0, g.r1);
  double z = std::clamp(z_start, g.z0, g.z1);
  const double stop = g.r0 + 1e-14 * (g.r1 - g.r0);
  while (r > stop) {
    double h = (r - g.r0 <= 2.0 * g.hr) ? 0.25 * g.hr : g.hr;
    h = std::min(h, r - g.r0);
    const double k1 = slope(r, z);
    const double k2 = slope(r - 0.5 * h, z - 0.5 * h * k1);
    const double k3 = slope(r - 0.5 * h, z - 0.5 * h * k2);
    const double k4 = slope(r - h, z - h * k3);
    z -= h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    z = std::clamp(z, g.z0, g.z1);
    r -= h;
  }
  CharacteristicFoot foot;
  foot.r_start = r_start;
  foot.z_start = z_start;
  foot.z3_0 = z;
  foot.valid = std::isfinite(z);
  return foot;
}

// Intermediates of the G-term algebra at one node.
struct GNode {
  double u1tot = 0.0;
  double h = 0.0;    // Bernoulli density of the perturbed state
  double qhat = 0.0; // linear part of H - H_t
  double arg = 0.0;  // K + Phi - |U|^2/2 of the perturbed state
};

GNode g_node(const BackgroundOnGrid& bg, int i, double w1s, double w2, double w3s, double w4,
             double w5, double w6s) {
  const double rho_t = bg.rho[i];
  const double u1t = bg.u1[i];
  const double u2t = bg.u2[i];
  const double c2t = bg.c2[i];
  GNode nd;
  nd.u1tot = u1t + w1s;
  if (nd.u1tot < kU1Floor)
    fail(errc::degenerate_radial_velocity,
         "U1 = " + std::to_string(nd.u1tot) + " below the division floor");
  const double a_h = bg.a0 + w4;
  if (!(a_h > 0.0)) fail(errc::vacuum_state, "entropy A = " + std::to_string(a_h));
  const double u2_tot = u2t + w2;
  // One evaluation path for the Bernoulli argument of both states, so the
  // unperturbed inputs land on bit-identical intermediates.
  const auto bern_arg = [&](double v1, double v2, double v3, double kv, double pv) {
    return (bg.k0 + kv) + (bg.phi[i] + pv) - 0.5 * (v1 * v1 + v2 * v2 + v3 * v3);
  };
  nd.arg = bern_arg(nd.u1tot, u2_tot, w3s, w5, w6s);
  if (nd.arg < kVacuumFloor)
    fail(errc::vacuum_state, "Bernoulli argument " + std::to_string(nd.arg) +
                                 " below floor " + std::to_string(kVacuumFloor));
  // Ratio form of the Bernoulli inversion, anchored to the sampled density:
  // zero deviation data reproduces rho_t bitwise, so the map's source terms
  // vanish identically on the unperturbed state instead of inheriting the
  // profile's quadrature drift.
  const double arg0 = bern_arg(u1t, u2t, 0.0, 0.0, 0.0);
  if (!(arg0 > 0.0))
    fail(errc::vacuum_state, "background Bernoulli argument " + std::to_string(arg0));
  nd.h = rho_t * std::pow(nd.arg / arg0 * (bg.a0 / a_h), 1.0 / (bg.gamma - 1.0));
  nd.qhat = rho_t / ((bg.gamma - 1.0) * bg.a0) * w4 - rho_t / c2t * w5 - rho_t / c2t * w6s +
            rho_t * u1t / c2t * w1s + rho_t * u2t / c2t * w2;
  return nd;
}

} // namespace

double DeviationField::sup_norm() const {
  double out = 0.0;
  for (const ScalarField2D* f : {&W1, &W2, &W3, &W4, &W5, &W6})
    for (double v : f->v) out = std::max(out, std::fabs(v));
  return out;
}

BackgroundOnGrid sample_background(const BackgroundProfile& p, const Grid2D& g) {
  if (p.n() < 2) fail(errc::not_enough_nodes, "profile has fewer than 2 nodes");
  const double span = p.r_nodes.back() - p.r_nodes.front();
  if (std::fabs(p.r_nodes.front() - g.r0) > 1e-12 * span ||
      std::fabs(p.r_nodes.back() - g.r1) > 1e-12 * span)
    fail(errc::invalid_argument, "grid radial extent differs from the profile's");

  const int np = p.n();
  const double hp = p.h();
  std::vector<double> drho(np), dre(np);
  for (int k = 0; k < np; ++k) {
    const RadialSlopes s =
        radial_slopes(p, p.r_nodes[k], p.rho[k], p.r_nodes[k] * p.e_field[k]);
    drho[k] = s.drho;
    dre[k] = s.dre;
  }

  BackgroundOnGrid bg;
  bg.grid = g;
  bg.gamma = p.gamma;
  bg.a0 = p.a_const;
  bg.m1 = p.m1;
  bg.m2 = p.m2;
  bg.b0 = p.b0;
  bg.k0 = 0.5 * (p.u1[0] * p.u1[0] + p.u2[0] * p.u2[0]) +
          p.gamma * p.a_const * std::pow(p.rho[0], p.gamma - 1.0) / (p.gamma - 1.0);

  bg.rho.resize(g.nr);
  bg.u1.resize(g.nr);
  bg.u2.resize(g.nr);
  bg.e.resize(g.nr);
  bg.phi.resize(g.nr);
  bg.c2.resize(g.nr);
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    int k = static_cast<int>((r - p.r_nodes.front()) / hp);
    k = std::clamp(k, 0, np - 2);
    const double t = (r - p.r_nodes[k]) / hp;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);

    const double rho = h00 * p.rho[k] + hp * h10 * drho[k] + h01 * p.rho[k + 1] +
                       hp * h11 * drho[k + 1];
    const double re_k = p.r_nodes[k] * p.e_field[k];
    const double re_k1 = p.r_nodes[k + 1] * p.e_field[k + 1];
    const double re = h00 * re_k + hp * h10 * dre[k] + h01 * re_k1 + hp * h11 * dre[k + 1];
    const double phi = h00 * p.phi[k] + hp * h10 * p.e_field[k] + h01 * p.phi[k + 1] +
                       hp * h11 * p.e_field[k + 1];

    if (!(rho > 0.0)) fail(errc::non_positive_density, "resampled rho <= 0");
    bg.rho[i] = rho;
    bg.u1[i] = p.m1 / (r * rho);
    bg.u2[i] = p.m2 / r;
    bg.e[i] = re / r;
    bg.phi[i] = phi;
    bg.c2[i] = p.gamma * p.a_const * std::pow(rho, p.gamma - 1.0);
  }
  return bg;
}

CharacteristicFoot trace_characteristic(const Grid2D& g, const ScalarField2D& u1_total,
                                        const ScalarField2D& w3_sharp, double r_start,
                                        double z_start) {
  check_u1_floor(u1_total);
  return trace_unchecked(g, u1_total, w3_sharp, r_start, z_start);
}

TransportSolution solve_transport(const ScalarField2D& w1_sharp, const ScalarField2D& w3_sharp,
                                  const BackgroundOnGrid& bg, const BoundaryPerturbation& bc) {
  const Grid2D& g = bg.grid;
  ScalarField2D u1tot(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) u1tot(g, i, j) = bg.u1[i] + w1_sharp(g, i, j);
  check_u1_floor(u1tot);

  TransportSolution out{ScalarField2D(g), ScalarField2D(g), ScalarField2D(g), ScalarField2D(g)};
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      const CharacteristicFoot foot = trace_unchecked(g, u1tot, w3_sharp, r, g.z(j));
      out.feet(g, i, j) = foot.z3_0;
      out.W2(g, i, j) = g.r0 * bc.eps * bc.u2_en.eval(foot.z3_0) / r;
      out.W4(g, i, j) = bc.eps * bc.a_en.eval(foot.z3_0);
      out.W5(g, i, j) = bc.eps * bc.k_en.eval(foot.z3_0);
    }
  }
  return out;
}

double perturbed_density(const BackgroundOnGrid& bg, int i, double w1, double w2, double w3,
                         double w4, double w5, double w6) {
  return g_node(bg, i, w1, w2, w3, w4, w5, w6).h;
}

GTerms eval_g_terms(const DeviationField& w_sharp, const TransportSolution& transported,
                    const BackgroundOnGrid& bg, const BoundaryPerturbation& bc) {
  const Grid2D& g = bg.grid;
  const ScalarField2D dzfoot = d_z(g, transported.feet);
  GTerms out{ScalarField2D(g), ScalarField2D(g), ScalarField2D(g), ScalarField2D(g)};
  const double gm1 = bg.gamma - 1.0;
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      const double w1s = w_sharp.W1(g, i, j);
      const double w3s = w_sharp.W3(g, i, j);
      const double w6s = w_sharp.W6(g, i, j);
      const double w2 = transported.W2(g, i, j);
      const double w4 = transported.W4(g, i, j);
      const double w5 = transported.W5(g, i, j);
      const GNode nd = g_node(bg, i, w1s, w2, w3s, w4, w5, w6s);
      const double dh = nd.h - bg.rho[i];

      const double foot = transported.feet(g, i, j);
      const double df = dzfoot(g, i, j);
      const double d3w2 = g.r0 * bc.eps / r * bc.u2_en.deriv(foot) * df;
      const double d3w4 = bc.eps * bc.a_en.deriv(foot) * df;
      const double d3w5 = bc.eps * bc.k_en.deriv(foot) * df;

      out.G1(g, i, j) = -dh * w1s - (dh + nd.qhat) * bg.u1[i];
      out.G2(g, i, j) =
          ((bg.u2[i] + w2) * d3w2 + std::pow(nd.h, gm1) / gm1 * d3w4 - d3w5) / nd.u1tot;
      out.G3(g, i, j) = -dh * w3s;
      out.G4(g, i, j) = dh + nd.qhat - bc.eps * bc.b_tilde(r, g.z(j));
    }
  }
  return out;
}

GTerms eval_g_terms(const DeviationField& w_sharp, const ScalarField2D& W2,
                    const ScalarField2D& W4, const ScalarField2D& W5,
                    const BackgroundOnGrid& bg, const BoundaryPerturbation& bc) {
  const Grid2D& g = bg.grid;
  ScalarField2D u1tot(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) u1tot(g, i, j) = bg.u1[i] + w_sharp.W1(g, i, j);
  check_u1_floor(u1tot);

  TransportSolution transported{W2, W4, W5, ScalarField2D(g)};
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j)
      transported.feet(g, i, j) =
          trace_unchecked(g, u1tot, w_sharp.W3, g.r(i), g.z(j)).z3_0;
  return eval_g_terms(w_sharp, transported, bg, bc);
}

WallCompat g_wall_compat(const DeviationField& w_sharp, const TransportSolution& transported,
                         const BackgroundOnGrid& bg, const BoundaryPerturbation& bc) {
  const Grid2D& g = bg.grid;
  const ScalarField2D dzfoot = d_z(g, transported.feet);
  const ScalarField2D d3w1s = d_z(g, w_sharp.W1);
  const ScalarField2D d3w3s = d_z(g, w_sharp.W3);
  const ScalarField2D d3w6s = d_z(g, w_sharp.W6);
  const double gm1 = bg.gamma - 1.0;

  WallCompat wc;
  for (int j : {0, g.nz - 1}) {
    const double z = g.z(j);
    for (int i = 0; i < g.nr; ++i) {
      const double r = g.r(i);
      const double w1s = w_sharp.W1(g, i, j);
      const double w3s = w_sharp.W3(g, i, j);
      const double w6s = w_sharp.W6(g, i, j);
      const double w2 = transported.W2(g, i, j);
      const double w4 = transported.W4(g, i, j);
      const double w5 = transported.W5(g, i, j);
      const GNode nd = g_node(bg, i, w1s, w2, w3s, w4, w5, w6s);
      const double dh_val = nd.h - bg.rho[i];

      const double foot = transported.feet(g, i, j);
      const double df = dzfoot(g, i, j);
      const double d3w2 = g.r0 * bc.eps / r * bc.u2_en.deriv(foot) * df;
      const double d3w4 = bc.eps * bc.a_en.deriv(foot) * df;
      const double d3w5 = bc.eps * bc.k_en.deriv(foot) * df;

      const double g2 =
          ((bg.u2[i] + w2) * d3w2 + std::pow(nd.h, gm1) / gm1 * d3w4 - d3w5) / nd.u1tot;
      const double g3 = -dh_val * w3s;

      // Chain rule for d3 of H and of the linear part Qhat.
      const double dq2 = 2.0 * nd.u1tot * d3w1s(g, i, j) +
                         2.0 * (bg.u2[i] + w2) * d3w2 + 2.0 * w3s * d3w3s(g, i, j);
      const double dH = -nd.h / (gm1 * (bg.a0 + w4)) * d3w4 +
                        nd.h / (gm1 * nd.arg) * (d3w5 + d3w6s(g, i, j) - 0.5 * dq2);
      const double rho_t = bg.rho[i];
      const double dQ = rho_t / (gm1 * bg.a0) * d3w4 -
                        rho_t / bg.c2[i] * (d3w5 + d3w6s(g, i, j)) +
                        rho_t * bg.u1[i] / bg.c2[i] * d3w1s(g, i, j) +
                        rho_t * bg.u2[i] / bg.c2[i] * d3w2;
      const double d3g1 = -dH * w1s - dh_val * d3w1s(g, i, j) - (dH + dQ) * bg.u1[i];
      const double d3g4 = dH + dQ - bc.eps * bc.b_radial.eval(r) * bc.b_axial.deriv(z);

      wc.g2 = std::max(wc.g2, std::fabs(g2));
      wc.g3 = std::max(wc.g3, std::fabs(g3));
      wc.d3_g1 = std::max(wc.d3_g1, std::fabs(d3g1));
      wc.d3_g4 = std::max(wc.d3_g4, std::fabs(d3g4));
    }
  }
  return wc;
}

} // namespace ep
