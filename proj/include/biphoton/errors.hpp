// biphoton/errors.hpp
// Error taxonomy for the library. Each failure mode gets its own type so
// callers can branch on catch clauses instead of parsing messages.
#pragma once

#include <stdexcept>

namespace biphoton {

// Base of everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition on constructor or operation inputs was violated.
struct invalid_parameter_error : error {
  using error::error;
};

// A formula was evaluated at a pole of one of its denominators.
struct singular_denominator_error : error {
  using error::error;
};

// A channel required for the requested quantity has zero strength, so the
// corresponding time scale is infinite and the quantity undefined.
struct decoupled_error : error {
  using error::error;
};

// The compact two-photon exchange kernel was requested inside its divergent
// near zone; the spectral quadrature is the valid route there.
struct near_field_error : error {
  using error::error;
};

// The spectral integrand has a pole inside the integration window.
struct pole_error : error {
  using error::error;
};

// Geometry lies where a kernel's defining expression is undefined (both
// step-function gates closed).
struct geometry_domain_error : error {
  using error::error;
};

// Adaptive refinement exhausted its depth budget before reaching tolerance.
struct non_convergence_error : error {
  using error::error;
};

// The ODE step controller shrank the step below representable resolution.
struct step_underflow_error : error {
  using error::error;
};

// The ODE step budget was exhausted before reaching the end of the span.
struct max_steps_error : error {
  using error::error;
};

// A non-finite value appeared mid-computation; message carries diagnostics.
struct nan_error : error {
  using error::error;
};

// A trajectory is too short for the requested reduction.
struct degenerate_trajectory_error : error {
  using error::error;
};

// A run configuration failed to parse or violated one of its invariants.
struct config_error : error {
  using error::error;
};

// The filesystem refused a read or write we depend on.
struct io_error : error {
  using error::error;
};

}  // namespace biphoton
