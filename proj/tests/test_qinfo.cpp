#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "enbs/analytic.hpp"
#include "enbs/fockspace.hpp"
#include "enbs/qinfo.hpp"

using namespace enbs;
using namespace enbs::qinfo;
using Cx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

/// Brute-force reduced signal qubit: build the two-branch joint state with an
/// explicit path label, branch weight sqrt(1+|alpha_j|^2), the photon-added
/// record in one shared mode and the coherent record in another, then trace
/// the records out.
SignalDensityMatrix dm_by_partial_trace(Cx alpha1, Cx alpha2, int dim) {
  using namespace enbs::fock;
  const double w1 = std::sqrt(1.0 + std::norm(alpha1));
  const double w2 = std::sqrt(1.0 + std::norm(alpha2));
  const FockRegister b1 = tensor(
      {fock_basis_state(0, 2), spacs(alpha1, dim), coherent_state(alpha1, dim)});
  const FockRegister b2 = tensor(
      {fock_basis_state(1, 2), spacs(alpha2, dim), coherent_state(alpha2, dim)});
  const double norm = std::sqrt(w1 * w1 + w2 * w2);
  const FockRegister joint = superpose({w1 / norm, w2 / norm}, {b1, b2});
  const FockRegister reduced = partial_trace(joint, {0});
  SignalDensityMatrix dm;
  dm.rho11 = reduced.rho()(0, 0).real();
  dm.rho22 = reduced.rho()(1, 1).real();
  dm.rho12 = reduced.rho()(0, 1);
  return dm;
}

}  // namespace

TEST_CASE("reduced dm for balanced symmetric seeding is pure") {
  for (double mag : {0.0, 1.0, 2.0}) {
    const Cx a(mag, 0.0);
    const SignalDensityMatrix dm = reduced_signal_dm(a, a);
    CHECK(dm.rho11 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dm.rho22 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(dm.rho12) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("reduced dm for one-sided seeding") {
  const SignalDensityMatrix dm = reduced_signal_dm(Cx(1.0, 0.0), Cx(0.0, 0.0));
  CHECK(dm.rho11 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(dm.rho22 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(dm.rho12) ==
        doctest::Approx(std::exp(-1.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("opposite unit seeds give the maximally mixed qubit") {
  const SignalDensityMatrix dm = reduced_signal_dm(Cx(-1.0, 0.0), Cx(1.0, 0.0));
  CHECK(dm.rho11 == doctest::Approx(0.5));
  CHECK(dm.rho22 == doctest::Approx(0.5));
  CHECK(std::abs(dm.rho12) == 0.0);
}

TEST_CASE("reduced dm invariants on a random grid") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> mag(0.0, 2.0), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 100; ++i) {
    const SignalDensityMatrix dm = reduced_signal_dm(
        std::polar(mag(rng), ang(rng)), std::polar(mag(rng), ang(rng)));
    CHECK(dm.trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dm.min_eigenvalue() >= -1e-14);
    CHECK(std::norm(dm.rho12) <= dm.rho11 * dm.rho22 + 1e-14);
  }
}

TEST_CASE("reduced dm matches the brute-force partial trace") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> mag(0.0, 2.0), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 10; ++i) {
    const Cx a1 = std::polar(mag(rng), ang(rng));
    const Cx a2 = std::polar(mag(rng), ang(rng));
    const SignalDensityMatrix dm = reduced_signal_dm(a1, a2);
    const SignalDensityMatrix oracle = dm_by_partial_trace(a1, a2, 40);
    CHECK(std::fabs(dm.rho11 - oracle.rho11) < 1e-8);
    CHECK(std::fabs(dm.rho22 - oracle.rho22) < 1e-8);
    CHECK(std::fabs(std::abs(dm.rho12) - std::abs(oracle.rho12)) < 1e-8);
  }
}

TEST_CASE("rho12 carries the photon-added branch overlap phase") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> mag(0.2, 2.0), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 20; ++i) {
    const Cx a1 = std::polar(mag(rng), ang(rng));
    const Cx a2 = std::polar(mag(rng), ang(rng));
    const SignalDensityMatrix dm = reduced_signal_dm(a1, a2);
    const Cx b = std::conj(a1) * a2;
    if (std::abs(dm.rho12) < 1e-14) continue;
    const double expected = std::arg((b + 1.0) * std::polar(1.0, b.imag()));
    CHECK(std::fabs(std::remainder(std::arg(dm.rho12) - expected,
                                   2.0 * kPi)) < 1e-12);
  }
}

TEST_CASE("triality of the named states") {
  const TrialityMeasures pure = triality({0.5, 0.5, Cx(0.5, 0.0)});
  CHECK(pure.visibility == doctest::Approx(1.0));
  CHECK(pure.predictability == 0.0);
  CHECK(pure.entanglement == doctest::Approx(0.0));

  const TrialityMeasures mixed = triality({0.5, 0.5, Cx(0.0, 0.0)});
  CHECK(mixed.visibility == 0.0);
  CHECK(mixed.predictability == 0.0);
  CHECK(mixed.entanglement == doctest::Approx(1.0));
  CHECK(mixed.state_purity == doctest::Approx(0.5));
}

TEST_CASE("triality of the one-sided seeding state") {
  const SignalDensityMatrix dm = reduced_signal_dm(Cx(1.0, 0.0), Cx(0.0, 0.0));
  const TrialityMeasures tm = triality(dm);
  CHECK(tm.visibility == doctest::Approx(2.0 * std::exp(-1.0) / 3.0).epsilon(1e-12));
  CHECK(tm.predictability == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Independent route: E^2 = 4 rho11 rho22 (1 - F^2), F = e^{-1}/sqrt(2).
  const double f = std::exp(-1.0) / std::sqrt(2.0);
  const double e_sq = 4.0 * (2.0 / 3.0) * (1.0 / 3.0) * (1.0 - f * f);
  CHECK(tm.entanglement == doctest::Approx(std::sqrt(e_sq)).epsilon(1e-12));
  CHECK(tm.entanglement == doctest::Approx(0.9104).epsilon(1e-4));
}

TEST_CASE("triality identity and the fidelity form of E") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> mag(0.0, 2.0), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 50; ++i) {
    const Cx a1 = std::polar(mag(rng), ang(rng));
    const Cx a2 = std::polar(mag(rng), ang(rng));
    const SignalDensityMatrix dm = reduced_signal_dm(a1, a2);
    const TrialityMeasures tm = triality(dm);
    const double vpe = tm.visibility * tm.visibility +
                       tm.predictability * tm.predictability +
                       tm.entanglement * tm.entanglement;
    CHECK(std::fabs(vpe - 1.0) < 1e-12);
    CHECK(tm.mu_s_sq ==
          doctest::Approx(2.0 * tm.state_purity - 1.0).epsilon(1e-12));

    const double f = analytic::fidelity(a1, a2);
    const double e_sq = 4.0 * dm.rho11 * dm.rho22 * (1.0 - f * f);
    CHECK(std::fabs(tm.entanglement * tm.entanglement - e_sq) < 1e-10);
  }
}

TEST_CASE("symmetric seeding collapses V to F") {
  std::mt19937 rng(67);
  std::uniform_real_distribution<double> mag(0.0, 2.5), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 50; ++i) {
    const double m = mag(rng);
    const double d = ang(rng);
    const SignalDensityMatrix dm =
        reduced_signal_dm(std::polar(m, d), Cx(m, 0.0));
    const TrialityMeasures tm = triality(dm);
    const double f = analytic::fidelity_symmetric(m, d);
    CHECK(std::fabs(tm.visibility - f) < 1e-12);
    CHECK(std::fabs(tm.predictability) < 1e-15);
    // sqrt(1 - F^2) loses half the digits as F -> 1.
    CHECK(std::fabs(tm.entanglement - std::sqrt(1.0 - f * f)) < 1e-7);
  }
}

TEST_CASE("entanglement peaks and visibility dips at dphi_sd = pi") {
  const double m = 2.0;
  double best_d_e = -1.0, best_e = -1.0, best_d_v = -1.0, best_v = 2.0;
  for (double d = 0.0; d <= 2.0 * kPi; d += 1e-3) {
    const SignalDensityMatrix dm = reduced_signal_dm(std::polar(m, d), Cx(m, 0.0));
    const TrialityMeasures tm = triality(dm);
    if (tm.entanglement > best_e) {
      best_e = tm.entanglement;
      best_d_e = d;
    }
    if (tm.visibility < best_v) {
      best_v = tm.visibility;
      best_d_v = d;
    }
  }
  CHECK(std::fabs(best_d_e - kPi) < 0.3);  // flat peak, coarse localization
  CHECK(std::fabs(best_d_v - kPi) < 2e-3);
}

TEST_CASE("corrupted density matrices are rejected") {
  CHECK_THROWS_AS(triality({0.5, 0.5, Cx(0.9, 0.0)}), DomainError);
  CHECK_THROWS_AS(triality({0.8, 0.5, Cx(0.0, 0.0)}), DomainError);
}

TEST_CASE("bell state approximation") {
  const BellStateApprox flat = bell_state_approx(0.0);
  CHECK(flat.c10.real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(flat.c01.real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  const BellStateApprox anti = bell_state_approx(kPi);
  CHECK(anti.c01.real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(std::fabs(anti.c01.imag()) < 1e-15);

  const BellStateApprox quarter = bell_state_approx(kPi / 2.0);
  const TrialityMeasures tm = triality(quarter.to_dm());
  CHECK(tm.visibility == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tm.entanglement == doctest::Approx(0.0));
}

TEST_CASE("alternate entanglement normalization") {
  CHECK(entanglement_halved_convention(0.5, 0.5, 0.0) ==
        doctest::Approx(std::sqrt(0.5)));
  CHECK(entanglement_halved_convention(0.5, 0.5, 1.0) == 0.0);
}
