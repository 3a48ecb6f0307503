#pragma once

#include <stdexcept>
#include <string>

namespace ep {

// Failure categories surfaced by the numerical kernels. Each maps onto one of
// the guard conditions the solvers enforce instead of silently clamping.
enum class errc {
  radial_sonic_degeneracy,   // 1 - M1^2 fell below the ODE denominator floor
  non_positive_density,
  multiple_crossings,        // more than one sonic sign change in a profile
  not_enough_nodes,
  degenerate_radial_velocity, // U1 below the division floor
  vacuum_state,               // Bernoulli density argument <= 0
  odd_extension_mismatch,     // nonzero wall trace passed to an odd extension
  singular_system,
  iterative_no_convergence,
  trust_region_exceeded,
  no_contraction,
  max_iter_exceeded,
  invalid_argument,
  config_error,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::radial_sonic_degeneracy: return "RadialSonicDegeneracy";
    case errc::non_positive_density: return "NonPositiveDensity";
    case errc::multiple_crossings: return "MultipleCrossings";
    case errc::not_enough_nodes: return "NotEnoughNodes";
    case errc::degenerate_radial_velocity: return "DegenerateRadialVelocity";
    case errc::vacuum_state: return "VacuumState";
    case errc::odd_extension_mismatch: return "OddExtensionMismatch";
    case errc::singular_system: return "SingularSystem";
    case errc::iterative_no_convergence: return "IterativeNoConvergence";
    case errc::trust_region_exceeded: return "TrustRegionExceeded";
    case errc::no_contraction: return "NoContraction";
    case errc::max_iter_exceeded: return "MaxIterExceeded";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

class solver_error : public std::runtime_error {
public:
  solver_error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw solver_error(code, what);
}

} // namespace ep
