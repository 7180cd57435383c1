#pragma once

#include <complex>

#include "enbs/errors.hpp"

namespace enbs::qinfo {

/// Reduced signal-mode state in the single-photon path basis
/// {|1,0>_s, |0,1>_s}. Trace one, |rho12|^2 <= rho11 rho22.
struct SignalDensityMatrix {
  double rho11 = 0.5;
  double rho22 = 0.5;
  std::complex<double> rho12 = 0.0;

  double trace() const { return rho11 + rho22; }
  double purity() const { return rho11 * rho11 + rho22 * rho22 + 2.0 * std::norm(rho12); }
  double min_eigenvalue() const;
};

/// Wave-particle-entanglement measures of a signal qubit. The triality
/// identity V^2 + P^2 + E^2 = 1 holds by construction; mu_s_sq = P^2 + V^2
/// and state_purity = Tr(rho^2) are reported separately (they coincide for
/// states of this family, mu_s_sq = 2 Tr(rho^2) - 1 in general).
struct TrialityMeasures {
  double visibility = 0.0;     ///< V = 2|rho12|
  double predictability = 0.0; ///< P = |rho11 - rho22|
  double entanglement = 0.0;   ///< E = sqrt(1 - V^2 - P^2)
  double mu_s_sq = 0.0;        ///< P^2 + V^2
  double state_purity = 0.0;   ///< Tr(rho^2)
};

/// Signal qubit obtained by tracing the idler branches out of the two-branch
/// joint state. Diagonals (1+|a_j|^2)/(2+|a_1|^2+|a_2|^2); the coherence
/// magnitude is weighted by the branch fidelity and its phase carries the
/// photon-added branch overlap arg(a1* a2 + 1) + Im(a1* a2).
SignalDensityMatrix reduced_signal_dm(std::complex<double> alpha1,
                                      std::complex<double> alpha2);

/// Throws DomainError if V^2 + P^2 > 1 + 1e-12 (corrupted input state).
TrialityMeasures triality(const SignalDensityMatrix& dm);

/// Alternate entanglement normalization E^2 = 2 rho11 rho22 (1 - F^2); kept
/// so sweep outputs can report both conventions side by side.
double entanglement_halved_convention(double rho11, double rho22, double fidelity);

/// Low-gain approximation of the signal output: a single-photon
/// path-entangled state (|1,0> + e^{i dphi_i} |0,1>)/sqrt(2).
struct BellStateApprox {
  std::complex<double> c10;
  std::complex<double> c01;
  SignalDensityMatrix to_dm() const;
};

BellStateApprox bell_state_approx(double dphi_i);

}  // namespace enbs::qinfo
