#include "enbs/params.hpp"

#include <cmath>
#include <numbers>

namespace enbs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_phase(double rad) {
  double w = std::fmod(rad, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can return exactly 2*pi after the negative correction when rad is a
  // tiny negative number; fold that back to zero.
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

double circular_distance(double a, double b) {
  double d = std::fabs(wrap_phase(a) - wrap_phase(b));
  return d > std::numbers::pi ? kTwoPi - d : d;
}

SeedField SeedField::polar(double amplitude_mag, double phase_rad) {
  if (!std::isfinite(amplitude_mag) || !std::isfinite(phase_rad))
    throw NonFiniteError("seed field: non-finite amplitude or phase");
  if (amplitude_mag < 0.0)
    throw NegativeRateError("seed field: amplitude magnitude must be >= 0");
  return SeedField{amplitude_mag, wrap_phase(phase_rad)};
}

std::complex<double> SeedField::value() const {
  return std::polar(amplitude_mag, phase);
}

PhaseSet derive_phases(const EnbsParams& params) {
  PhaseSet ps;
  ps.phi_n_1 = wrap_phase(params.pump_phase_1 - params.seed_1.phase);
  ps.phi_n_2 = wrap_phase(params.pump_phase_2 - params.seed_2.phase);
  ps.dphi_sd = wrap_phase(params.seed_1.phase - params.seed_2.phase);
  const double dphi_p = params.pump_phase_1 - params.pump_phase_2;
  const double dphi_sd = params.seed_1.phase - params.seed_2.phase;
  const double dphi_s = params.signal_phase_1 - params.signal_phase_2;
  ps.phi_global = wrap_phase(dphi_p - (dphi_sd + dphi_s));
  return ps;
}

EnbsParams validate_params(const EnbsParams& params) {
  const double fields[] = {params.g_eff_mag,      params.pump_phase_1,
                           params.pump_phase_2,   params.signal_phase_1,
                           params.signal_phase_2, params.seed_1.amplitude_mag,
                           params.seed_1.phase,   params.seed_2.amplitude_mag,
                           params.seed_2.phase,   params.kappa_s,
                           params.kappa_i};
  for (double f : fields)
    if (!std::isfinite(f)) throw NonFiniteError("params: non-finite field");
  if (params.g_eff_mag < 0.0)
    throw NegativeRateError("params: g_eff_mag must be >= 0");
  if (params.kappa_s < 0.0)
    throw NegativeRateError("params: kappa_s must be >= 0");
  if (params.kappa_i < 0.0)
    throw NegativeRateError("params: kappa_i must be >= 0");
  if (params.seed_1.amplitude_mag < 0.0 || params.seed_2.amplitude_mag < 0.0)
    throw NegativeRateError("params: seed amplitude must be >= 0");
  if (params.comb_bins < 0)
    throw DomainError("params: comb_bins must be >= 0");

  EnbsParams out = params;
  out.pump_phase_1 = wrap_phase(out.pump_phase_1);
  out.pump_phase_2 = wrap_phase(out.pump_phase_2);
  out.signal_phase_1 = wrap_phase(out.signal_phase_1);
  out.signal_phase_2 = wrap_phase(out.signal_phase_2);
  out.seed_1.phase = wrap_phase(out.seed_1.phase);
  out.seed_2.phase = wrap_phase(out.seed_2.phase);
  return out;
}

}  // namespace enbs
