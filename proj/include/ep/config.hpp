#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ep/background.hpp"
#include "ep/boundary.hpp"
#include "ep/grid2d.hpp"

namespace ep {

// Serializable description of a boundary profile. The analytic kinds keep
// their parameters so compatibility can be checked exactly and the config
// can be re-emitted canonically; "table" is the escape hatch for sampled
// data and is checked numerically at the walls.
struct ProfileSpec {
  std::string kind = "zero"; // zero | cospi | sinpi | poly | table
  double amp = 0.0;
  int k = 1;
  std::vector<double> coeffs; // poly: sum_j coeffs[j] * x^j
  std::vector<double> xs, ys; // table knots

  Profile1D build() const;
};

struct RunConfig {
  InletData inlet;
  int n_nodes = 2049;

  int nr = 65;
  int nz = 65;

  double eps = 0.0;
  ProfileSpec u2_en, u3_en, a_en, k_en, phi_en; // inner-boundary data
  ProfileSpec u1_ex, phi_ex;                    // outer-boundary data
  ProfileSpec b_radial{"poly", 0.0, 1, {1.0}, {}, {}};
  ProfileSpec b_axial;

  // 3D residual check: analytic preset plus optional numeric parameter
  // overrides, kept sorted by name for canonical serialization.
  std::string check3d_preset = "background"; // background | swirl | uniform
  std::vector<std::pair<std::string, double>> check3d_params;

  double tol = 1e-10;
  int max_iter = 60;
  double delta_guard = 0.0; // <= 0: solver default
  std::string outdir = "out";

  std::vector<double> sweep_eps{1e-3, 5e-4, 2.5e-4};

  // Builds the boundary data and runs the wall compatibility checks.
  BoundaryPerturbation boundary() const;
  Grid2D grid() const { return Grid2D(nr, nz, inlet.r0, inlet.r1); }
};

// TOML subset: [section] and [section.sub] headers, key = value lines,
// strings, numbers, booleans, single-line arrays and inline tables,
// # comments. Syntax errors report the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, 17-significant-digit numbers.
// parse_config(write_config(c)) re-serializes to identical bytes.
std::string write_config(const RunConfig& cfg);

} // namespace ep
