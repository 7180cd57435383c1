#include "enbs/qinfo.hpp"

#include <cmath>

#include "enbs/analytic.hpp"

namespace enbs::qinfo {

using std::complex;

double SignalDensityMatrix::min_eigenvalue() const {
  const double mean = 0.5 * (rho11 + rho22);
  const double half_gap = 0.5 * (rho11 - rho22);
  return mean - std::sqrt(half_gap * half_gap + std::norm(rho12));
}

SignalDensityMatrix reduced_signal_dm(complex<double> alpha1, complex<double> alpha2) {
  const double n1 = std::norm(alpha1);
  const double n2 = std::norm(alpha2);
  const double denom = 2.0 + n1 + n2;
  SignalDensityMatrix dm;
  dm.rho11 = (1.0 + n1) / denom;
  dm.rho22 = (1.0 + n2) / denom;
  const double f = analytic::fidelity(alpha1, alpha2);
  const double mag = std::sqrt((1.0 + n1) * (1.0 + n2)) / denom * f;
  const complex<double> b = std::conj(alpha1) * alpha2;
  const double phase = std::arg(b + 1.0) + b.imag();
  dm.rho12 = std::polar(mag, phase);
  return dm;
}

TrialityMeasures triality(const SignalDensityMatrix& dm) {
  if (std::fabs(dm.trace() - 1.0) > 1e-9)
    throw DomainError("triality: density matrix trace differs from one");
  TrialityMeasures tm;
  tm.visibility = 2.0 * std::abs(dm.rho12);
  tm.predictability = std::fabs(dm.rho11 - dm.rho22);
  const double vp = tm.visibility * tm.visibility + tm.predictability * tm.predictability;
  if (vp > 1.0 + 1e-12)
    throw DomainError("triality: V^2 + P^2 exceeds one, state is not physical");
  tm.entanglement = std::sqrt(std::max(0.0, 1.0 - vp));
  tm.mu_s_sq = vp;
  tm.state_purity = dm.purity();
  return tm;
}

double entanglement_halved_convention(double rho11, double rho22, double fidelity) {
  return std::sqrt(std::max(0.0, 2.0 * rho11 * rho22 * (1.0 - fidelity * fidelity)));
}

SignalDensityMatrix BellStateApprox::to_dm() const {
  SignalDensityMatrix dm;
  dm.rho11 = std::norm(c10);
  dm.rho22 = std::norm(c01);
  dm.rho12 = c10 * std::conj(c01);
  return dm;
}

BellStateApprox bell_state_approx(double dphi_i) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return BellStateApprox{inv_sqrt2, std::polar(inv_sqrt2, dphi_i)};
}

}  // namespace enbs::qinfo
