#include "ep/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "ep/errors.hpp"

namespace ep {

namespace {
const double kPi = std::acos(-1.0);
constexpr double kCompatTol = 1e-10;
} // namespace

Profile1D Profile1D::cospi(double amp, int k) {
  Profile1D p;
  p.kind_ = Kind::cospi;
  p.amp_ = amp;
  p.k_ = k;
  return p;
}

Profile1D Profile1D::sinpi(double amp, int k) {
  Profile1D p;
  p.kind_ = Kind::sinpi;
  p.amp_ = amp;
  p.k_ = k;
  return p;
}

Profile1D Profile1D::poly(std::vector<double> coeffs) {
  Profile1D p;
  p.kind_ = Kind::poly;
  p.coef_ = std::move(coeffs);
  return p;
}

Profile1D Profile1D::table(std::vector<double> x, std::vector<double> y) {
  if (x.size() < 2 || x.size() != y.size())
    fail(errc::config_error, "table preset needs matching x/y lists with >= 2 knots");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1]))
      fail(errc::config_error, "table preset knots must be strictly increasing");

  Profile1D p;
  p.kind_ = Kind::table;
  p.xs_ = std::move(x);
  p.ys_ = std::move(y);

  // Natural cubic spline: tridiagonal solve for the knot second derivatives.
  const int n = static_cast<int>(p.xs_.size());
  p.m2_.assign(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n - 2), rhs(n - 2), sub(n - 2), sup(n - 2);
    for (int i = 1; i + 1 < n; ++i) {
      const double hl = p.xs_[i] - p.xs_[i - 1];
      const double hu = p.xs_[i + 1] - p.xs_[i];
      sub[i - 1] = hl;
      diag[i - 1] = 2.0 * (hl + hu);
      sup[i - 1] = hu;
      rhs[i - 1] = 6.0 * ((p.ys_[i + 1] - p.ys_[i]) / hu - (p.ys_[i] - p.ys_[i - 1]) / hl);
    }
    for (int i = 1; i < n - 2; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (int i = n - 3; i >= 0; --i) {
      double v = rhs[i];
      if (i + 1 < n - 2) v -= sup[i] * p.m2_[i + 2];
      p.m2_[i + 1] = v / diag[i];
    }
  }

  // Accumulated antiderivative at the knots.
  p.acc_.assign(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double h = p.xs_[i + 1] - p.xs_[i];
    p.acc_[i + 1] = p.acc_[i] + 0.5 * h * (p.ys_[i] + p.ys_[i + 1]) -
                    h * h * h * (p.m2_[i] + p.m2_[i + 1]) / 24.0;
  }
  return p;
}

int Profile1D::segment(double x) const {
  const int n = static_cast<int>(xs_.size());
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  int i = static_cast<int>(it - xs_.begin()) - 1;
  return std::clamp(i, 0, n - 2);
}

double Profile1D::eval(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::cospi:
      return amp_ * std::cos(k_ * kPi * x);
    case Kind::sinpi:
      return amp_ * std::sin(k_ * kPi * x);
    case Kind::poly: {
      double v = 0.0;
      for (std::size_t j = coef_.size(); j-- > 0;) v = v * x + coef_[j];
      return v;
    }
    case Kind::table: {
      const int i = segment(x);
      const double h = xs_[i + 1] - xs_[i];
      const double a = xs_[i + 1] - x;
      const double b = x - xs_[i];
      return m2_[i] * a * a * a / (6.0 * h) + m2_[i + 1] * b * b * b / (6.0 * h) +
             (ys_[i] / h - m2_[i] * h / 6.0) * a + (ys_[i + 1] / h - m2_[i + 1] * h / 6.0) * b;
    }
  }
  return 0.0;
}

double Profile1D::deriv(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::cospi:
      return -amp_ * k_ * kPi * std::sin(k_ * kPi * x);
    case Kind::sinpi:
      return amp_ * k_ * kPi * std::cos(k_ * kPi * x);
    case Kind::poly: {
      double v = 0.0;
      for (std::size_t j = coef_.size(); j-- > 1;) v = v * x + coef_[j] * static_cast<double>(j);
      return v;
    }
    case Kind::table: {
      const int i = segment(x);
      const double h = xs_[i + 1] - xs_[i];
      const double a = xs_[i + 1] - x;
      const double b = x - xs_[i];
      return -m2_[i] * a * a / (2.0 * h) + m2_[i + 1] * b * b / (2.0 * h) -
             (ys_[i] / h - m2_[i] * h / 6.0) + (ys_[i + 1] / h - m2_[i + 1] * h / 6.0);
    }
  }
  return 0.0;
}

double Profile1D::deriv2(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::cospi:
      return -amp_ * k_ * k_ * kPi * kPi * std::cos(k_ * kPi * x);
    case Kind::sinpi:
      return -amp_ * k_ * k_ * kPi * kPi * std::sin(k_ * kPi * x);
    case Kind::poly: {
      double v = 0.0;
      for (std::size_t j = coef_.size(); j-- > 2;)
        v = v * x + coef_[j] * static_cast<double>(j) * static_cast<double>(j - 1);
      return v;
    }
    case Kind::table: {
      const int i = segment(x);
      const double h = xs_[i + 1] - xs_[i];
      return m2_[i] * (xs_[i + 1] - x) / h + m2_[i + 1] * (x - xs_[i]) / h;
    }
  }
  return 0.0;
}

double Profile1D::antideriv(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::cospi:
      if (k_ == 0) return amp_ * (x + 1.0);
      return amp_ * (std::sin(k_ * kPi * x) + std::sin(k_ * kPi * 1.0)) / (k_ * kPi);
    case Kind::sinpi:
      if (k_ == 0) return 0.0;
      return -amp_ * (std::cos(k_ * kPi * x) - std::cos(k_ * kPi * 1.0)) / (k_ * kPi);
    case Kind::poly: {
      double vx = 0.0, v1 = 0.0;
      for (std::size_t j = coef_.size(); j-- > 0;) {
        vx = vx * x + coef_[j] / static_cast<double>(j + 1);
        v1 = v1 * (-1.0) + coef_[j] / static_cast<double>(j + 1);
      }
      return vx * x - v1 * (-1.0);
    }
    case Kind::table: {
      const int i = segment(x);
      const double h = xs_[i + 1] - xs_[i];
      const double a = xs_[i + 1] - x;
      const double b = x - xs_[i];
      return acc_[i] + m2_[i] * (h * h * h * h - a * a * a * a) / (24.0 * h) +
             m2_[i + 1] * b * b * b * b / (24.0 * h) +
             (ys_[i] / h - m2_[i] * h / 6.0) * 0.5 * (h * h - a * a) +
             (ys_[i + 1] / h - m2_[i + 1] * h / 6.0) * 0.5 * b * b;
    }
  }
  return 0.0;
}

void BoundaryPerturbation::check_compatibility() const {
  struct Check {
    double value;
    const char* message;
  };
  const Check checks[] = {
      {u3_en.eval(1.0), "u3_en(1) != 0"},
      {u3_en.eval(-1.0), "u3_en(-1) != 0"},
      {u3_en.deriv2(1.0), "u3_en''(1) != 0"},
      {u3_en.deriv2(-1.0), "u3_en''(-1) != 0"},
      {u1_ex.deriv(1.0), "u1_ex'(1) != 0"},
      {u1_ex.deriv(-1.0), "u1_ex'(-1) != 0"},
      {u2_en.deriv(1.0), "u2_en'(1) != 0"},
      {u2_en.deriv(-1.0), "u2_en'(-1) != 0"},
      {k_en.deriv(1.0), "k_en'(1) != 0"},
      {k_en.deriv(-1.0), "k_en'(-1) != 0"},
      {a_en.deriv(1.0), "a_en'(1) != 0"},
      {a_en.deriv(-1.0), "a_en'(-1) != 0"},
      {phi_en.deriv(1.0), "phi_en'(1) != 0"},
      {phi_en.deriv(-1.0), "phi_en'(-1) != 0"},
      {phi_ex.deriv(1.0), "phi_ex'(1) != 0"},
      {phi_ex.deriv(-1.0), "phi_ex'(-1) != 0"},
      {b_axial.deriv(1.0), "b_axial'(1) != 0"},
      {b_axial.deriv(-1.0), "b_axial'(-1) != 0"},
  };
  for (const Check& c : checks)
    if (std::fabs(c.value) > kCompatTol) fail(errc::config_error, c.message);
}

} // namespace ep
