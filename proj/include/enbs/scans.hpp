#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "enbs/dynamics.hpp"
#include "enbs/params.hpp"

namespace enbs::scans {

inline constexpr const char* kVersion = "0.1.0";

/// Fidelity values below this are written as 0 in CSV output (they underflow
/// any plotting use and would otherwise print as denormal noise).
inline constexpr double kFidelityClamp = 1e-30;

enum class Target {
  nsig_time,
  g2_phase_grid,
  fidelity_phase,
  triality_phase,
  validate_backends,
};

/// One scan axis. Inclusive grids place count points on [start, stop] with
/// both endpoints on the grid; periodic grids place count points on
/// [start, stop) with spacing (stop-start)/count.
struct Axis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool periodic = false;
};

struct ScanSpec {
  Target target = Target::nsig_time;
  std::string preset_name;  ///< empty for ad-hoc specs
  std::vector<Axis> axes;
  EnbsParams fixed{};
  double time_s = 75e-12;                      ///< evaluation time for phase grids
  std::vector<double> fidelity_alphas{1, 4, 10};  ///< curve set for fidelity_phase
  std::string output_path;
};

std::vector<double> axis_points(const Axis& axis);

/// Named presets: fig2 | fig3 | fig4 | fig5 | methods | validate.
ScanSpec preset(const std::string& name);
std::vector<std::string> preset_names();

/// Golden file name for a preset, e.g. "fig4.csv".
std::string golden_filename(const std::string& preset_name);

/// Run the scan and write the deterministic CSV (header comment block with
/// the resolved parameters, then fixed 17-significant-digit rows).
void run_scan(const ScanSpec& spec, std::ostream& os);

/// Render the scan to a string (used by golden-file checks).
std::string run_scan_to_string(const ScanSpec& spec);

/// Compare a freshly generated scan against a golden file byte by byte.
/// Returns an explanation on mismatch, std::nullopt when identical.
std::optional<std::string> check_against_golden(const ScanSpec& spec,
                                                const std::string& golden_path);

/// One row of the backend cross-validation report.
struct BackendComparison {
  dynamics::InitialState initial_state;
  double alpha_mag = 0.0;
  double gt = 0.0;  ///< |g_eff| * t
  double kappa_ratio = 0.0;  ///< kappa_s / |g_eff|
  double nsig_analytic = 0.0;
  double nsig_gaussian = 0.0;
  double nsig_fock = 0.0;
  double nsig_gap_backends = 0.0;  ///< |gaussian - fock|
  double nsig_gap_model = 0.0;     ///< |analytic - gaussian|
  double g2_analytic = 0.0;        ///< closed form (infinity when divergent)
  double g2_gaussian = 0.0;
  double g2_fock = 0.0;
  double g2_gap_backends = 0.0;
};

/// Grid for validate_backends. The analytic reference is evaluated at the
/// stated local/global phases with symmetric seeding; backends evolve one
/// unit from the chosen initial state. Regime limited to Fock feasibility.
struct ValidateSpec {
  std::vector<dynamics::InitialState> initial_states{
      dynamics::InitialState::vacuum_coherent,
      dynamics::InitialState::spacs_idler,
      dynamics::InitialState::coherent_coherent};
  std::vector<double> alpha_mags{0.0, 1.0, 2.0};
  std::vector<double> gts{0.1, 0.3, 0.6};
  double g_eff_mag = 0.0;  ///< filled by preset; rad/s
  double kappa_s = 0.0;
  double kappa_i = 0.0;
  double phi_n = 0.0;          ///< local phase of the analytic reference
  double phi_global = 0.0;     ///< global phase of the analytic reference
  int threads = 0;             ///< 0 = hardware concurrency
};

std::vector<BackendComparison> validate_backends(const ValidateSpec& spec);

/// Trajectory dump for evolution results.
void write_trajectory_csv(const dynamics::EvolutionResult& result,
                          const std::vector<std::pair<std::string, std::string>>& meta,
                          std::ostream& os);

/// Fixed 17-significant-digit float (deterministic CSV cells).
std::string format_float(double v);
/// Shortest round-trip representation (point-mode output, config dumps).
std::string format_float_shortest(double v);

}  // namespace enbs::scans
