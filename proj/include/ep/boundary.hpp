#pragma once

#include <string>
#include <vector>

namespace ep {

// Smooth one-dimensional profile with closed-form first and second
// derivatives and antiderivative. Wall-compatibility checks go through the
// analytic derivatives, so compatible data yields machine zeros instead of
// finite-difference leftovers.
class Profile1D {
public:
  Profile1D() = default; // identically zero

  static Profile1D cospi(double amp, int k);  // amp * cos(k*pi*x)
  static Profile1D sinpi(double amp, int k);  // amp * sin(k*pi*x)
  static Profile1D poly(std::vector<double> coeffs); // sum_j coeffs[j] * x^j
  // Natural cubic spline through (x[i], y[i]); x strictly increasing.
  static Profile1D table(std::vector<double> x, std::vector<double> y);

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  // Antiderivative F with F(-1) = 0 for the analytic presets and F(first
  // knot) = 0 for tables; callers only ever use differences of F.
  double antideriv(double x) const;

private:
  enum class Kind { zero, cospi, sinpi, poly, table };
  Kind kind_ = Kind::zero;
  double amp_ = 0.0;
  int k_ = 0;
  std::vector<double> coef_;
  std::vector<double> xs_, ys_, m2_, acc_;
  int segment(double x) const;
};

// The inhomogeneous data of the perturbed problem: traces on the inner and
// outer cylinders (functions of x3), the ion-density perturbation
// b_tilde(r, x3) = b_radial(r) * b_axial(x3), and the amplitude eps that
// scales all of it.
struct BoundaryPerturbation {
  double eps = 0.0;
  Profile1D u2_en, u3_en, a_en, k_en, phi_en; // traces at r = r0
  Profile1D u1_ex, phi_ex;                    // traces at r = r1
  Profile1D b_radial = Profile1D::poly({1.0});
  Profile1D b_axial;                          // zero by default, so b_tilde = 0

  double b_tilde(double r, double x3) const {
    return b_radial.eval(r) * b_axial.eval(x3);
  }

  // Wall conditions at x3 = +-1 that keep the scheme's corner terms regular:
  //   u3_en = u3_en'' = 0;  u1_ex' = u2_en' = k_en' = a_en' = 0;
  //   phi_en' = phi_ex' = b_axial' = 0.
  // Throws config_error naming the first violated condition.
  void check_compatibility() const;
};

} // namespace ep
