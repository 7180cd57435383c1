#pragma once

#include <stdexcept>
#include <string>

namespace enbs {

/// Base class for every diagnostic the library raises.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A rate parameter (|g_eff|, kappa_s, kappa_i) or seed magnitude is negative.
struct NegativeRateError : Error {
  using Error::Error;
};

/// A parameter field is NaN or infinite.
struct NonFiniteError : Error {
  using Error::Error;
};

/// |g_eff|*t exceeded the configured gain bound; the requested point lies in
/// an unphysical amplification regime.
struct OverflowError : Error {
  using Error::Error;
};

/// Truncated Fock representation lost more probability weight than allowed.
struct TruncationError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

/// Tensor composition was asked to mix pure-state and density registers.
struct MixedRepresentationError : Error {
  using Error::Error;
};

/// An adaptive integrator could not meet its tolerance above the minimum step.
struct StepFailureError : Error {
  using Error::Error;
};

/// An input violates a structural invariant (e.g. a corrupted density matrix).
struct DomainError : Error {
  using Error::Error;
};

/// Malformed parameter file or unknown key/override.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace enbs
