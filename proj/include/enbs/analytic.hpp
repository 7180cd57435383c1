#pragma once

#include <complex>

#include "enbs/params.hpp"

namespace enbs::analytic {

/// Guard on |g_eff|*t before evaluating sinh^2; beyond this the model is in
/// an unphysical gain regime (~5e12 photons) and n_sig throws OverflowError.
inline constexpr double kGainArgumentBound = 30.0;

/// Photon-number floor below which the g2 denominator is treated as the
/// singular N_sig -> 0 set.
inline constexpr double kNsigFloor = 1e-12;

/// Single-output detection-rate decomposition: total mean photon number and
/// the magnitude of the interference cross term.
struct RateTerms {
  double n_sum = 0.0;
  double interference_mag = 0.0;
};

/// One sampled time point of the standard observable set. A divergent g2 is
/// stored as +infinity.
struct ObservablePoint {
  double time = 0.0;
  double n_sig_1 = 0.0;
  double n_sig_2 = 0.0;
  double g2 = 0.0;
  RateTerms rate_terms{};
};

/// Damped signal photon number of one unit,
///   [1 + |alpha|^2 + 2|alpha| cos(phi_n)] sinh^2(|g|t) e^{-kappa_s t}.
/// kappa_s = 0 gives the ideal (undamped) expression.
double n_sig(double t, const SeedField& seed, double phi_n, double g_eff_mag,
             double kappa_s, double gain_bound = kGainArgumentBound);

/// Overlap of coherent fields, exp(-|a1-a2|^2/2 + i Im[a1* a2]); in the
/// standard convention this is the <alpha1|alpha2> inner product.
std::complex<double> coherent_overlap(std::complex<double> alpha1,
                                      std::complex<double> alpha2);

/// Conditional fidelity between the idler branches,
///   |a1* a2 + 1| / sqrt((1+|a1|^2)(1+|a2|^2)) * exp(-|a1-a2|^2).
double fidelity(std::complex<double> alpha1, std::complex<double> alpha2);

/// Symmetric-amplitude specialization of fidelity, evaluated in real
/// arithmetic so the exact zero at |alpha| = 1, dphi_sd = pi is hit exactly.
double fidelity_symmetric(double alpha_mag, double dphi_sd);

/// Zero-delay second-order correlation of the combined signal output.
/// divergent marks the N_sig -> 0 regime where the bunching term blows up.
struct G2Value {
  double value = 0.0;
  bool divergent = false;
};

G2Value g2_zero_delay(double t, const EnbsParams& params,
                      double nsig_floor = kNsigFloor,
                      double gain_bound = kGainArgumentBound);

/// Single-output count rate behind the combining beam splitter, up to a
/// constant: n1 + n2 + 2 Re[e^{i dphi_sd} cross].
double detection_rate(double dphi_sd, double n1, double n2,
                      std::complex<double> cross);

/// Fringe visibility 2|cross| / (n1 + n2); zero when both rates vanish.
double fringe_visibility(double n1, double n2, std::complex<double> cross);

/// First-moment solution <A(t)> of the damped unit with coherent idler seed
/// alpha and vacuum signal input. Undamped limit: -i e^{i phi_p} sinh(|g|t) alpha*.
std::complex<double> mean_signal_amplitude(double t, std::complex<double> alpha,
                                           double pump_phase, double g_eff_mag,
                                           double kappa_s, double kappa_i);

/// <A_1^dag A_2> = <A_1>* <A_2> for statistically independent units.
std::complex<double> cross_correlator(double t, const EnbsParams& params);

}  // namespace enbs::analytic
