#include "ep/background.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ep {

namespace {

constexpr double kSonicDenominatorFloor = 1e-8; // abort threshold on 1 - M1^2
constexpr double kSonicBisectTol = 1e-10;

struct OdeState {
  double rho;
  double re; // r * E
};

struct OdeRhs {
  double drho;
  double dre;
};

// Right-hand side of the radial system; guards fire here so RK4 stage points
// are covered too.
OdeRhs rhs_at(const InletData& in, double m1, double m2, double r, const OdeState& y) {
  if (!std::isfinite(y.rho) || !std::isfinite(y.re))
    fail(errc::non_positive_density,
         "density diverged near r = " + std::to_string(r) + " (no smooth continuation)");
  if (!(y.rho > 0.0))
    fail(errc::non_positive_density, "rho = " + std::to_string(y.rho) + " at r = " + std::to_string(r));
  const double u1 = m1 / (r * y.rho);
  const double u2 = m2 / r;
  const double c2 = in.gamma * in.a0 * std::pow(y.rho, in.gamma - 1.0);
  const double one_minus_m1sq = 1.0 - u1 * u1 / c2;
  if (one_minus_m1sq < kSonicDenominatorFloor)
    fail(errc::radial_sonic_degeneracy,
         "1 - M1^2 = " + std::to_string(one_minus_m1sq) + " at r = " + std::to_string(r));
  const double e = y.re / r;
  OdeRhs out;
  out.drho = y.rho * (u1 * u1 + u2 * u2 + e * r) / (r * (c2 - u1 * u1));
  out.dre = r * (y.rho - in.b0);
  return out;
}

OdeState rk4_step(const InletData& in, double m1, double m2, double r, const OdeState& y,
                  double h) {
  const OdeRhs k1 = rhs_at(in, m1, m2, r, y);
  const OdeRhs k2 = rhs_at(in, m1, m2, r + 0.5 * h,
                           {y.rho + 0.5 * h * k1.drho, y.re + 0.5 * h * k1.dre});
  const OdeRhs k3 = rhs_at(in, m1, m2, r + 0.5 * h,
                           {y.rho + 0.5 * h * k2.drho, y.re + 0.5 * h * k2.dre});
  const OdeRhs k4 = rhs_at(in, m1, m2, r + h, {y.rho + h * k3.drho, y.re + h * k3.dre});
  return {y.rho + h / 6.0 * (k1.drho + 2.0 * (k2.drho + k3.drho) + k4.drho),
          y.re + h / 6.0 * (k1.dre + 2.0 * (k2.dre + k3.dre) + k4.dre)};
}

} // namespace

void InletData::validate() const {
  if (!(gamma > 1.0)) fail(errc::invalid_argument, "gamma must exceed 1");
  if (!(rho0 > 0.0)) fail(errc::invalid_argument, "rho0 must be positive");
  if (!(u10 > 0.0)) fail(errc::invalid_argument, "u10 must be positive");
  if (!(a0 > 0.0)) fail(errc::invalid_argument, "a0 must be positive");
  if (!(e0 > 0.0)) fail(errc::invalid_argument, "e0 must be positive");
  if (!(r0 > 0.0) || !(r1 > r0)) fail(errc::invalid_argument, "need 0 < r0 < r1");
}

double InletData::sound_speed_sq() const {
  return gamma * a0 * std::pow(rho0, gamma - 1.0);
}

double BackgroundProfile::sound_speed_sq(int k) const {
  return gamma * a_const * std::pow(rho[k], gamma - 1.0);
}

MachState BackgroundProfile::mach(int k) const {
  const double c2 = sound_speed_sq(k);
  return {u1[k] * u1[k] / c2, u2[k] * u2[k] / c2};
}

FlowRegime classify_inlet(const InletData& inlet) {
  inlet.validate();
  if (!(inlet.rho0 > inlet.b0)) return Invalid{"rho0 <= b0"};
  const double c0_sq = inlet.sound_speed_sq();
  const double u1_sq = inlet.u10 * inlet.u10;
  const double q_sq = u1_sq + inlet.u20 * inlet.u20;
  if (c0_sq > q_sq) return Subsonic{};
  if (!(c0_sq > u1_sq)) return Invalid{"c0^2 <= u10^2"};
  if (c0_sq < q_sq) return TransonicCandidate{};
  return Invalid{"c0^2 == u10^2 + u20^2 (sonic inlet)"};
}

BackgroundProfile integrate_background(const InletData& inlet, int n_nodes) {
  const FlowRegime candidate = classify_inlet(inlet);
  if (std::holds_alternative<Invalid>(candidate))
    fail(errc::invalid_argument,
         "inlet is not integrable: " + std::get<Invalid>(candidate).reason);
  if (n_nodes < 16) fail(errc::invalid_argument, "need at least 16 nodes");

  BackgroundProfile p;
  p.m1 = inlet.r0 * inlet.rho0 * inlet.u10;
  p.m2 = inlet.r0 * inlet.u20;
  p.a_const = inlet.a0;
  p.gamma = inlet.gamma;
  p.b0 = inlet.b0;
  const int n = n_nodes;
  p.r_nodes.resize(n);
  p.rho.resize(n);
  p.u1.resize(n);
  p.u2.resize(n);
  p.e_field.resize(n);
  p.phi.resize(n);

  const double h = (inlet.r1 - inlet.r0) / (n - 1);
  OdeState y{inlet.rho0, inlet.r0 * inlet.e0};
  for (int k = 0; k < n; ++k) {
    const double r = inlet.r0 + h * k;
    p.r_nodes[k] = r;
    p.rho[k] = y.rho;
    p.u1[k] = p.m1 / (r * y.rho);
    p.u2[k] = p.m2 / r;
    p.e_field[k] = y.re / r;
    p.phi[k] = (k == 0) ? 0.0
                        : p.phi[k - 1] + 0.5 * h * (p.e_field[k - 1] + p.e_field[k]);
    if (k + 1 < n) y = rk4_step(inlet, p.m1, p.m2, r, y, h);
  }

  if (std::holds_alternative<Subsonic>(candidate)) {
    bool subsonic_everywhere = true;
    for (int k = 0; k < n; ++k) {
      const MachState m = p.mach(k);
      if (m.m1_sq + m.m2_sq >= 1.0) subsonic_everywhere = false;
    }
    p.regime = subsonic_everywhere
                   ? FlowRegime{Subsonic{}}
                   : FlowRegime{Invalid{"subsonic candidate crossed |M| = 1"}};
  } else {
    p.regime = TransonicCandidate{};
    if (const auto rc = find_sonic_radius(p)) p.regime = Transonic{*rc};
  }
  return p;
}

std::vector<MachState> mach_profile(const BackgroundProfile& p) {
  std::vector<MachState> out(p.n());
  for (int k = 0; k < p.n(); ++k) out[k] = p.mach(k);
  return out;
}

double mach_total_sq_derivative(const BackgroundProfile& p, int k) {
  const MachState m = p.mach(k);
  const double msq = m.m1_sq + m.m2_sq;
  const double r = p.r_nodes[k];
  const double c2 = p.sound_speed_sq(k);
  const double om = 1.0 - m.m1_sq;
  const double g = p.gamma;
  return -msq / (r * om) * ((g - 1.0) * msq + 2.0) -
         ((g + 1.0) * m.m1_sq + (g - 1.0) * m.m2_sq) * p.e_field[k] / (c2 * om);
}

namespace {

double mach1_sq_derivative(const BackgroundProfile& p, int k) {
  const MachState m = p.mach(k);
  const double r = p.r_nodes[k];
  const double e = p.e_field[k] * r / p.sound_speed_sq(k);
  const double g = p.gamma;
  return -m.m1_sq / (r * (1.0 - m.m1_sq)) *
         ((g - 1.0) * m.m1_sq + (g + 1.0) * m.m2_sq + (g + 1.0) * e + 2.0);
}

double mach2_sq_derivative(const BackgroundProfile& p, int k) {
  const MachState m = p.mach(k);
  const double r = p.r_nodes[k];
  const double e = p.e_field[k] * r / p.sound_speed_sq(k);
  const double g = p.gamma;
  return -m.m2_sq / (r * (1.0 - m.m1_sq)) *
         ((g - 3.0) * m.m1_sq + (g - 1.0) * m.m2_sq + (g - 1.0) * e + 2.0);
}

// Cubic Hermite value of |M|^2 - 1 inside [r_k, r_{k+1}], using the exact
// derivative law at the endpoints.
double sonic_gap_hermite(const BackgroundProfile& p, int k, double r) {
  const double h = p.r_nodes[k + 1] - p.r_nodes[k];
  const double t = (r - p.r_nodes[k]) / h;
  const MachState ma = p.mach(k);
  const MachState mb = p.mach(k + 1);
  const double ya = ma.m1_sq + ma.m2_sq - 1.0;
  const double yb = mb.m1_sq + mb.m2_sq - 1.0;
  const double da = mach_total_sq_derivative(p, k) * h;
  const double db = mach_total_sq_derivative(p, k + 1) * h;
  const double t2 = t * t, t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * ya + (t3 - 2.0 * t2 + t) * da +
         (-2.0 * t3 + 3.0 * t2) * yb + (t3 - t2) * db;
}

} // namespace

std::optional<double> find_sonic_radius(const BackgroundProfile& p) {
  const int n = p.n();
  std::vector<double> gap(n);
  for (int k = 0; k < n; ++k) {
    const MachState m = p.mach(k);
    gap[k] = m.m1_sq + m.m2_sq - 1.0;
  }

  // A node where the gap vanishes exactly is itself the sonic radius.
  std::vector<int> exact;
  std::vector<int> brackets; // k with a strict sign change on (r_k, r_{k+1})
  for (int k = 0; k < n; ++k)
    if (gap[k] == 0.0) exact.push_back(k);
  for (int k = 0; k + 1 < n; ++k)
    if (gap[k] * gap[k + 1] < 0.0) brackets.push_back(k);

  const std::size_t crossings = exact.size() + brackets.size();
  if (crossings == 0) return std::nullopt;
  if (crossings > 1)
    fail(errc::multiple_crossings,
         std::to_string(crossings) + " sonic crossings found; profile is corrupted");
  if (!exact.empty()) return p.r_nodes[exact.front()];

  const int k = brackets.front();
  double lo = p.r_nodes[k], hi = p.r_nodes[k + 1];
  double glo = gap[k];
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = sonic_gap_hermite(p, k, mid);
    if (std::fabs(gm) <= kSonicBisectTol) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double check_decay_bound(const BackgroundProfile& p) {
  if (std::holds_alternative<Subsonic>(p.regime) ||
      std::holds_alternative<Invalid>(p.regime))
    fail(errc::invalid_argument, "decay bound applies to transonic profiles");
  const MachState m0 = p.mach(0);
  const double f0 = m0.m1_sq + m0.m2_sq;
  const double r0 = p.r_nodes[0];
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < p.n(); ++k) {
    const MachState m = p.mach(k);
    const double f = m.m1_sq + m.m2_sq;
    const double bound = r0 * r0 * f0 / (p.r_nodes[k] * p.r_nodes[k]);
    worst = std::max(worst, f - bound);
  }
  return worst;
}

double cross_check_mach_ode(const BackgroundProfile& p) {
  const int n = p.n();
  if (n < 3) fail(errc::not_enough_nodes, "need at least 3 nodes for central differences");
  const double h = p.h();
  double worst = 0.0;
  for (int k = 1; k + 1 < n; ++k) {
    const MachState prev = p.mach(k - 1);
    const MachState next = p.mach(k + 1);
    const double fd1 = (next.m1_sq - prev.m1_sq) / (2.0 * h);
    const double fd2 = (next.m2_sq - prev.m2_sq) / (2.0 * h);
    const double fdt = (next.m1_sq + next.m2_sq - prev.m1_sq - prev.m2_sq) / (2.0 * h);
    worst = std::max(worst, std::fabs(fd1 - mach1_sq_derivative(p, k)));
    worst = std::max(worst, std::fabs(fd2 - mach2_sq_derivative(p, k)));
    worst = std::max(worst, std::fabs(fdt - mach_total_sq_derivative(p, k)));
  }
  return worst;
}

RadialSlopes radial_slopes(const BackgroundProfile& p, double r, double rho, double re) {
  InletData in;
  in.gamma = p.gamma;
  in.a0 = p.a_const;
  in.b0 = p.b0;
  const OdeRhs k = rhs_at(in, p.m1, p.m2, r, {rho, re});
  return {k.drho, k.dre};
}

} // namespace ep
