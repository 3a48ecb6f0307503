#pragma once

#include <array>
#include <cmath>

namespace ep {

// Forward-mode scalar carrying value, gradient, and Hessian with respect to N
// independent variables. Enough machinery to push analytic field definitions
// through first and second derivatives exactly (up to rounding), which is how
// the manufactured ion-density fields and the analytic-derivative oracles are
// built.
template <int N>
struct Jet {
  double v = 0.0;
  std::array<double, N> d{};
  std::array<std::array<double, N>, N> h{};

  Jet() = default;
  Jet(double value) : v(value) {}

  static Jet variable(double value, int index) {
    Jet out(value);
    out.d[index] = 1.0;
    return out;
  }
};

template <int N>
Jet<N> operator+(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> out(a.v + b.v);
  for (int i = 0; i < N; ++i) {
    out.d[i] = a.d[i] + b.d[i];
    for (int j = 0; j < N; ++j) out.h[i][j] = a.h[i][j] + b.h[i][j];
  }
  return out;
}

template <int N>
Jet<N> operator-(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> out(a.v - b.v);
  for (int i = 0; i < N; ++i) {
    out.d[i] = a.d[i] - b.d[i];
    for (int j = 0; j < N; ++j) out.h[i][j] = a.h[i][j] - b.h[i][j];
  }
  return out;
}

template <int N>
Jet<N> operator-(const Jet<N>& a) {
  Jet<N> out(-a.v);
  for (int i = 0; i < N; ++i) {
    out.d[i] = -a.d[i];
    for (int j = 0; j < N; ++j) out.h[i][j] = -a.h[i][j];
  }
  return out;
}

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> out(a.v * b.v);
  for (int i = 0; i < N; ++i) {
    out.d[i] = a.d[i] * b.v + a.v * b.d[i];
    for (int j = 0; j < N; ++j)
      out.h[i][j] = a.h[i][j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] + a.v * b.h[i][j];
  }
  return out;
}

// Composition with a scalar function given f(u), f'(u), f''(u).
template <int N>
Jet<N> compose(const Jet<N>& u, double f, double fp, double fpp) {
  Jet<N> out(f);
  for (int i = 0; i < N; ++i) {
    out.d[i] = fp * u.d[i];
    for (int j = 0; j < N; ++j) out.h[i][j] = fpp * u.d[i] * u.d[j] + fp * u.h[i][j];
  }
  return out;
}

template <int N>
Jet<N> inverse(const Jet<N>& u) {
  const double iv = 1.0 / u.v;
  return compose(u, iv, -iv * iv, 2.0 * iv * iv * iv);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  return a * inverse(b);
}

template <int N> Jet<N> operator+(const Jet<N>& a, double s) { return a + Jet<N>(s); }
template <int N> Jet<N> operator+(double s, const Jet<N>& a) { return Jet<N>(s) + a; }
template <int N> Jet<N> operator-(const Jet<N>& a, double s) { return a - Jet<N>(s); }
template <int N> Jet<N> operator-(double s, const Jet<N>& a) { return Jet<N>(s) - a; }
template <int N> Jet<N> operator*(const Jet<N>& a, double s) { return a * Jet<N>(s); }
template <int N> Jet<N> operator*(double s, const Jet<N>& a) { return Jet<N>(s) * a; }
template <int N> Jet<N> operator/(const Jet<N>& a, double s) { return a * Jet<N>(1.0 / s); }
template <int N> Jet<N> operator/(double s, const Jet<N>& a) { return Jet<N>(s) * inverse(a); }

template <int N>
Jet<N> sin(const Jet<N>& u) {
  return compose(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v));
}

template <int N>
Jet<N> cos(const Jet<N>& u) {
  return compose(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v));
}

template <int N>
Jet<N> exp(const Jet<N>& u) {
  const double e = std::exp(u.v);
  return compose(u, e, e, e);
}

template <int N>
Jet<N> log(const Jet<N>& u) {
  return compose(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
}

template <int N>
Jet<N> sqrt(const Jet<N>& u) {
  const double s = std::sqrt(u.v);
  return compose(u, s, 0.5 / s, -0.25 / (s * u.v));
}

template <int N>
Jet<N> pow(const Jet<N>& u, double p) {
  const double f = std::pow(u.v, p);
  return compose(u, f, p * f / u.v, p * (p - 1.0) * f / (u.v * u.v));
}

// double overloads so templated field definitions evaluate on plain scalars.
inline double inverse(double u) { return 1.0 / u; }
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

} // namespace ep
