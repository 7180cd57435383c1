#pragma once

#include <complex>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "enbs/analytic.hpp"
#include "enbs/fockspace.hpp"
#include "enbs/params.hpp"

namespace enbs::dynamics {

/// First and second moments of M bosonic modes in the operator ordering
/// xi = (a_0 ... a_{M-1}, a^dag_0 ... a^dag_{M-1}):
///   mean[i]       = <xi_i>
///   second(i, j)  = <xi_i xi_j>   (not symmetrized; the commutation content
///                                  <a_i a^dag_j> - <a^dag_j a_i> = delta_ij
///                                  lives inside the matrix)
struct GaussianMoments {
  Eigen::VectorXcd mean;
  Eigen::MatrixXcd second;

  int modes() const { return static_cast<int>(mean.size()) / 2; }
  std::complex<double> mode_mean(int k) const { return mean[k]; }
  /// <a_k^dag a_k>
  double occupation(int k) const { return second(modes() + k, k).real(); }
  /// <a_k a_k>
  std::complex<double> anomalous(int k) const { return second(k, k); }
  /// <a_j^dag a_k>
  std::complex<double> cross(int j, int k) const { return second(modes() + j, k); }
  /// max_ij |<a_i a^dag_j> - <a^dag_j a_i> - delta_ij|
  double commutation_defect() const;
  /// max violation of <xi_i xi_j> = conj(<xi_j^dag xi_i^dag>) pairing
  double hermiticity_defect() const;
};

/// Zero-delay autocorrelation of mode k from the moment set, by Wick
/// decomposition of the fluctuations about the mean. Exact for Gaussian
/// states (everything reachable from coherent/vacuum inputs under this
/// model); an approximation for photon-added initial states. Returns
/// +infinity when the occupation sits below nsig_floor.
double wick_g2(const GaussianMoments& m, int k, double nsig_floor = analytic::kNsigFloor);

enum class InitialState {
  vacuum_coherent,    ///< vacuum signal (x) coherent idler (default reading)
  spacs_idler,        ///< vacuum signal (x) photon-added coherent idler
  coherent_coherent,  ///< coherent signal (amplitude = seed) (x) coherent idler
};

struct Diagnostics {
  /// Fock backend: worst |trace - initial trace|. Gaussian backend: worst
  /// drift of the commutation constraint (its conserved structure).
  double trace_error = 0.0;
  double hermiticity_error = 0.0;  ///< worst |rho - rho^dag| entry (Fock only)
  double truncation_tail = 0.0;    ///< worst top-Fock-level population / trace
  long step_count = 0;
};

struct StepControl {
  double step_scale = 0.02;    ///< h * max(g, kappa) per RK4 step
  double error_target = 1e-9;  ///< allowed error per unit time (1/rate units)
  int max_halvings = 12;
  bool check_positivity = false;
  double positivity_floor = -1e-8;  ///< min eigenvalue / trace allowed
  double truncation_limit = 1e-6;   ///< top-level population / trace allowed
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<analytic::ObservablePoint> observables;
  std::vector<std::complex<double>> mean_signal_1;  ///< <A_1(t)>
  std::vector<std::complex<double>> mean_signal_2;  ///< <A_2(t)>, two-unit runs
  std::vector<std::complex<double>> cross_12;       ///< <A_1^dag A_2>(t)
  std::vector<double> trace_error_t;      ///< per-sample conservation drift
  std::vector<double> truncation_tail_t;  ///< per-sample top-level population
  std::variant<fock::FockRegister, GaussianMoments> final_state;
  Diagnostics diagnostics;

  const fock::FockRegister& final_register() const {
    return std::get<fock::FockRegister>(final_state);
  }
  const GaussianMoments& final_moments() const {
    return std::get<GaussianMoments>(final_state);
  }
};

/// H / hbar = |g| sum_j (e^{i phi_p,j} A_j^dag a_j^dag + h.c.) as a sparse
/// operator. dims must have 2 entries (single unit: signal, idler; the
/// selected arm's pump phase applies) or 4 (both units: signal-1, idler-1,
/// signal-2, idler-2).
fock::Sparse build_hamiltonian(const EnbsParams& params, const std::vector<int>& dims,
                               int arm = 1);

/// Integrate d rho/dt = -i[H, rho] + sum kappa D[L] rho with classical RK4;
/// the step is validated by Richardson extrapolation on the first segment and
/// halved until the error target holds. Observables are sampled at t_grid.
/// Throws TruncationError when the top Fock level of any mode carries more
/// than truncation_limit of the trace, StepFailureError when halving bottoms
/// out.
EvolutionResult lindblad_evolve(const fock::FockRegister& initial,
                                const EnbsParams& params,
                                std::span<const double> t_grid,
                                const StepControl& control = {}, int arm = 1);

/// Integrate the closed linear moment system (exact for this quadratic model)
/// on the same RK4 core. initial.modes() selects single-unit (2 modes) or
/// two-unit (4 modes, ordering s1 i1 s2 i2) dynamics.
EvolutionResult gaussian_evolve(const GaussianMoments& initial,
                                const EnbsParams& params,
                                std::span<const double> t_grid,
                                const StepControl& control = {}, int arm = 1);

/// Moment set of one unit (modes: signal, idler) in the given initial state.
GaussianMoments unit_initial_moments(InitialState choice, std::complex<double> alpha);

/// Two independent units side by side (modes: s1, i1, s2, i2).
GaussianMoments two_unit_initial_moments(InitialState choice, const EnbsParams& params);

/// Truncated register of one unit (modes: signal, idler) in the given
/// initial state, as a density operator.
fock::FockRegister unit_initial_register(InitialState choice, std::complex<double> alpha,
                                         int dim_signal, int dim_idler);

/// Truncation dimensions adequate for seeds up to |alpha| and gains up to
/// |g_eff| t = gt_max (validated by the physicality tests).
std::pair<int, int> suggested_unit_dims(double alpha_mag, double gt_max);

/// Uniform supermode coefficients over the 2N+1 signal bins,
/// e^{-i phi_g0} / sqrt(2N+1) each.
std::vector<std::complex<double>> supermode_coefficients(int n_bins_half, double phi_g0);

/// Convenience wrapper: evolve both units with the chosen backend and zip the
/// observables. Fock runs keep one 2-mode register per unit (the units share
/// no modes) and form the cross correlator from the product <A_1>*<A_2>; the
/// returned final_state is unit 1's register.
enum class Backend { gaussian, fock };
EvolutionResult evolve_two_units(Backend backend, InitialState choice,
                                 const EnbsParams& params,
                                 std::span<const double> t_grid,
                                 const StepControl& control = {});

}  // namespace enbs::dynamics
