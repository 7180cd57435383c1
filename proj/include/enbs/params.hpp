#pragma once

#include <complex>

#include "enbs/errors.hpp"

namespace enbs {

/// Reduce an angle to [0, 2*pi). Idempotent: wrapping a wrapped value is a
/// no-op at the bit level.
double wrap_phase(double rad);

/// Smallest distance between two angles on the circle, in [0, pi].
double circular_distance(double a, double b);

/// Coherent seed injected into an idler port: alpha = |alpha| e^{i phi}.
struct SeedField {
  double amplitude_mag = 0.0;  ///< |alpha|, dimensionless, >= 0
  double phase = 0.0;          ///< phi_alpha in [0, 2*pi)

  /// Checked constructor: wraps the phase, rejects negative or non-finite
  /// magnitudes.
  static SeedField polar(double amplitude_mag, double phase_rad);

  std::complex<double> value() const;
};

/// Full physical configuration of the two-unit ENBS system. All rates are
/// angular frequencies in rad/s; conversion from a "hz" unit tag happens at
/// the config layer, never here.
struct EnbsParams {
  double g_eff_mag = 0.0;  ///< |g_eff|, rad/s
  double pump_phase_1 = 0.0;
  double pump_phase_2 = 0.0;
  double signal_phase_1 = 0.0;
  double signal_phase_2 = 0.0;
  SeedField seed_1{};
  SeedField seed_2{};
  double kappa_s = 0.0;  ///< signal supermode decay rate, rad/s
  double kappa_i = 0.0;  ///< idler decay rate, rad/s
  int comb_bins = 0;     ///< N, half-width of the 2N+1 signal frequency bins

  const SeedField& seed(int arm) const { return arm == 1 ? seed_1 : seed_2; }
  double pump_phase(int arm) const { return arm == 1 ? pump_phase_1 : pump_phase_2; }
  double signal_phase(int arm) const { return arm == 1 ? signal_phase_1 : signal_phase_2; }
};

/// Derived phase parameters. Arm 2 is the conventional fixed reference
/// (all reference-arm phases zero in the presets), but the general difference
/// forms are computed here so asymmetric configurations work unchanged.
struct PhaseSet {
  double phi_n_1 = 0.0;     ///< Phi_N,1 = phi_p,1 - phi_alpha,1
  double phi_n_2 = 0.0;     ///< Phi_N,2 = phi_p,2 - phi_alpha,2
  double phi_global = 0.0;  ///< Phi = dphi_p - (dphi_sd + dphi_s)
  double dphi_sd = 0.0;     ///< phi_alpha,1 - phi_alpha,2
};

/// Local, global and seeding phases of a parameter set, wrapped to [0, 2*pi).
PhaseSet derive_phases(const EnbsParams& params);

/// Returns a normalized copy (all phases wrapped). Throws NegativeRateError
/// if any of g_eff_mag / kappa_s / kappa_i / seed magnitudes is negative,
/// NonFiniteError if any field is NaN or infinite, DomainError for a negative
/// comb_bins.
EnbsParams validate_params(const EnbsParams& params);

}  // namespace enbs
