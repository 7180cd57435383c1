#include "enbs/analytic.hpp"

#include <cmath>

namespace enbs::analytic {

using std::complex;

double n_sig(double t, const SeedField& seed, double phi_n, double g_eff_mag,
             double kappa_s, double gain_bound) {
  if (t < 0.0) throw DomainError("n_sig: t must be >= 0");
  const double arg = g_eff_mag * t;
  if (arg > gain_bound)
    throw OverflowError("n_sig: |g_eff|*t exceeds gain bound");
  const double a = seed.amplitude_mag;
  const double prefactor = 1.0 + a * a + 2.0 * a * std::cos(phi_n);
  const double sh = std::sinh(arg);
  const double undamped = std::max(0.0, prefactor) * sh * sh;
  return undamped * std::exp(-kappa_s * t);
}

complex<double> coherent_overlap(complex<double> alpha1, complex<double> alpha2) {
  const double dist_sq = std::norm(alpha1 - alpha2);
  const complex<double> cross = std::conj(alpha1) * alpha2;
  return std::exp(-0.5 * dist_sq) * std::polar(1.0, cross.imag());
}

double fidelity(complex<double> alpha1, complex<double> alpha2) {
  const double n1 = std::norm(alpha1);
  const double n2 = std::norm(alpha2);
  const double num = std::abs(std::conj(alpha1) * alpha2 + 1.0);
  const double dist_sq = std::norm(alpha1 - alpha2);
  return num / std::sqrt((1.0 + n1) * (1.0 + n2)) * std::exp(-dist_sq);
}

double fidelity_symmetric(double alpha_mag, double dphi_sd) {
  if (alpha_mag < 0.0) throw DomainError("fidelity_symmetric: alpha_mag must be >= 0");
  const double m2 = alpha_mag * alpha_mag;
  const double c = std::cos(dphi_sd);
  if (c == 1.0) return 1.0;
  // | m2 e^{i d} + 1 | via the real quadratic form; at m2 = 1, cos = -1 the
  // argument is exactly zero.
  const double mag_sq = m2 * m2 + 2.0 * m2 * c + 1.0;
  const double num = std::sqrt(std::max(0.0, mag_sq));
  return num / (1.0 + m2) * std::exp(-2.0 * m2 * (1.0 - c));
}

G2Value g2_zero_delay(double t, const EnbsParams& params, double nsig_floor,
                      double gain_bound) {
  if (t < 0.0) throw DomainError("g2_zero_delay: t must be >= 0");
  const PhaseSet ph = derive_phases(params);
  const double n1 =
      n_sig(t, params.seed_1, ph.phi_n_1, params.g_eff_mag, params.kappa_s, gain_bound);
  const double n2 =
      n_sig(t, params.seed_2, ph.phi_n_2, params.g_eff_mag, params.kappa_s, gain_bound);
  const double f = fidelity(params.seed_1.value(), params.seed_2.value());
  const double s = std::sin(ph.phi_global);
  const double a1 = params.seed_1.amplitude_mag;
  const double a2 = params.seed_2.amplitude_mag;
  const double numerator = f * a1 * a1 * a2 * a2 * s * s;
  if (numerator == 0.0) return G2Value{1.0, false};
  if (std::min(n1, n2) < nsig_floor) return G2Value{0.0, true};
  return G2Value{1.0 + numerator / (n1 * n2), false};
}

double detection_rate(double dphi_sd, double n1, double n2, complex<double> cross) {
  if (n1 < 0.0 || n2 < 0.0) throw DomainError("detection_rate: rates must be >= 0");
  return n1 + n2 + 2.0 * (std::polar(1.0, dphi_sd) * cross).real();
}

double fringe_visibility(double n1, double n2, complex<double> cross) {
  const double total = n1 + n2;
  if (total <= 0.0) return 0.0;
  return 2.0 * std::abs(cross) / total;
}

complex<double> mean_signal_amplitude(double t, complex<double> alpha,
                                      double pump_phase, double g_eff_mag,
                                      double kappa_s, double kappa_i) {
  if (t < 0.0) throw DomainError("mean_signal_amplitude: t must be >= 0");
  // d/dt (<A>, <a^dag>) = [[-ks/2, -iG], [iG*, -ki/2]] (<A>, <a^dag>), with
  // <A>(0) = 0 and <a^dag>(0) = alpha*. Splitting off the mean decay leaves a
  // traceless 2x2 block whose exponential is cosh/sinh in
  // Omega = sqrt(|g|^2 + delta^2), delta = (ks - ki)/4.
  const complex<double> g = std::polar(g_eff_mag, pump_phase);
  const double mean_decay = 0.25 * (kappa_s + kappa_i);
  const double delta = 0.25 * (kappa_s - kappa_i);
  const double omega = std::sqrt(g_eff_mag * g_eff_mag + delta * delta);
  double sinc;  // sinh(omega t)/omega, finite at omega = 0
  if (omega * t < 1e-8) {
    sinc = t;
  } else {
    sinc = std::sinh(omega * t) / omega;
  }
  return std::exp(-mean_decay * t) * (complex<double>(0.0, -1.0) * g) *
         std::conj(alpha) * sinc;
}

complex<double> cross_correlator(double t, const EnbsParams& params) {
  const complex<double> a1 =
      mean_signal_amplitude(t, params.seed_1.value(), params.pump_phase_1,
                            params.g_eff_mag, params.kappa_s, params.kappa_i);
  const complex<double> a2 =
      mean_signal_amplitude(t, params.seed_2.value(), params.pump_phase_2,
                            params.g_eff_mag, params.kappa_s, params.kappa_i);
  return std::conj(a1) * a2;
}

}  // namespace enbs::analytic
