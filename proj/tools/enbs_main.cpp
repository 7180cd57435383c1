// Command-line front end: single-point observables, evolution runs, figure
// sweeps and the backend cross-validation report.

#include <complex>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "enbs/analytic.hpp"
#include "enbs/config.hpp"
#include "enbs/dynamics.hpp"
#include "enbs/qinfo.hpp"
#include "enbs/scans.hpp"

namespace {

using enbs::EnbsParams;
using enbs::scans::format_float_shortest;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CommonOpts {
  std::string params_file;
  std::vector<std::string> sets;
  std::string out;
  bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--params", o.params_file, "parameter file (key = value format)");
  cmd->add_option("--set", o.sets, "override, e.g. --set arm1.seed_mag=2")
      ->take_all();
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_flag("--dump-config", o.dump_config,
                "print the resolved parameter set and exit");
}

EnbsParams resolve_params(const CommonOpts& o) {
  EnbsParams p;
  p.g_eff_mag = kTwoPi * 1e9;  // default rate scale, overridable
  if (!o.params_file.empty()) p = enbs::config::load_params_file(o.params_file);
  for (const auto& s : o.sets) enbs::config::apply_override(p, s);
  return enbs::validate_params(p);
}

struct OutputStream {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit OutputStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) throw enbs::ConfigError("cannot open output file '" + path + "'");
      os = &file;
    }
  }
  std::ostream& get() { return *os; }
};

/// Returns true when --dump-config consumed the invocation.
bool maybe_dump(const CommonOpts& o, const EnbsParams& p) {
  if (!o.dump_config) return false;
  OutputStream out(o.out);
  enbs::config::dump_config(p, out.get());
  return true;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"enbs - entangled nonlinear biphoton source simulator"};
  app.require_subcommand(1);

  // nsig
  auto* nsig_cmd = app.add_subcommand("nsig", "mean signal photon number per arm");
  CommonOpts nsig_common;
  add_common(nsig_cmd, nsig_common);
  double nsig_t = 75e-12;
  nsig_cmd->add_option("--t", nsig_t, "evaluation time in seconds")
      ->capture_default_str();

  // g2
  auto* g2_cmd = app.add_subcommand("g2", "zero-delay second-order correlation");
  CommonOpts g2_common;
  add_common(g2_cmd, g2_common);
  double g2_t = 75e-12;
  g2_cmd->add_option("--t", g2_t, "evaluation time in seconds")
      ->capture_default_str();

  // fidelity
  auto* fid_cmd = app.add_subcommand("fidelity", "idler-branch fidelity");
  CommonOpts fid_common;
  add_common(fid_cmd, fid_common);
  std::string fid_alpha_mag, fid_dphi;
  std::string fid_a1_mag, fid_a1_phase, fid_a2_mag, fid_a2_phase;
  fid_cmd->add_option("--alpha-mag", fid_alpha_mag, "symmetric seed magnitude");
  fid_cmd->add_option("--dphi-sd", fid_dphi,
                      "seeding phase difference (accepts pi literals)");
  fid_cmd->add_option("--alpha1-mag", fid_a1_mag, "arm-1 seed magnitude");
  fid_cmd->add_option("--alpha1-phase", fid_a1_phase, "arm-1 seed phase");
  fid_cmd->add_option("--alpha2-mag", fid_a2_mag, "arm-2 seed magnitude");
  fid_cmd->add_option("--alpha2-phase", fid_a2_phase, "arm-2 seed phase");

  // triality
  auto* tri_cmd =
      app.add_subcommand("triality", "signal-qubit V/P/E measures from the seeds");
  CommonOpts tri_common;
  add_common(tri_cmd, tri_common);
  std::string tri_a1_mag = "1", tri_a1_phase = "0", tri_a2_mag = "1",
              tri_a2_phase = "0";
  tri_cmd->add_option("--alpha1-mag", tri_a1_mag, "arm-1 seed magnitude");
  tri_cmd->add_option("--alpha1-phase", tri_a1_phase, "arm-1 seed phase");
  tri_cmd->add_option("--alpha2-mag", tri_a2_mag, "arm-2 seed magnitude");
  tri_cmd->add_option("--alpha2-phase", tri_a2_phase, "arm-2 seed phase");

  // evolve
  auto* evo_cmd = app.add_subcommand("evolve", "time evolution trajectory CSV");
  CommonOpts evo_common;
  add_common(evo_cmd, evo_common);
  std::string evo_backend = "gaussian";
  std::string evo_initial = "vacuum_coherent";
  double evo_tmax = 75e-12;
  int evo_samples = 151;
  evo_cmd->add_option("--backend", evo_backend, "gaussian | fock")
      ->check(CLI::IsMember({"gaussian", "fock"}))
      ->capture_default_str();
  evo_cmd
      ->add_option("--initial", evo_initial,
                   "vacuum_coherent | spacs_idler | coherent_coherent")
      ->check(CLI::IsMember({"vacuum_coherent", "spacs_idler", "coherent_coherent"}))
      ->capture_default_str();
  evo_cmd->add_option("--t-max", evo_tmax, "final time in seconds")
      ->capture_default_str();
  evo_cmd->add_option("--samples", evo_samples, "number of sample times")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "figure-reproduction sweeps");
  CommonOpts scan_common;
  add_common(scan_cmd, scan_common);
  std::string scan_preset;
  bool scan_check = false;
  std::string golden_dir = "data/golden";
  scan_cmd->add_option("--preset", scan_preset, "fig2 | fig3 | fig4 | fig5 | methods")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "methods"}));
  scan_cmd->add_flag("--check", scan_check,
                     "regenerate and diff against the committed golden CSV");
  scan_cmd->add_option("--golden-dir", golden_dir, "golden CSV directory")
      ->capture_default_str();

  // validate
  auto* val_cmd =
      app.add_subcommand("validate", "backend cross-validation report CSV");
  CommonOpts val_common;
  add_common(val_cmd, val_common);
  bool val_check = false;
  std::string val_golden_dir = "data/golden";
  val_cmd->add_flag("--check", val_check,
                    "regenerate and diff against the committed golden CSV");
  val_cmd->add_option("--golden-dir", val_golden_dir, "golden CSV directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n";
    std::cerr << app.help() << std::endl;
    return 2;
  }

  try {
    if (nsig_cmd->parsed()) {
      const EnbsParams p = resolve_params(nsig_common);
      if (maybe_dump(nsig_common, p)) return 0;
      const enbs::PhaseSet ph = enbs::derive_phases(p);
      OutputStream out(nsig_common.out);
      out.get() << "n_sig_1 = "
                << format_float_shortest(enbs::analytic::n_sig(
                       nsig_t, p.seed_1, ph.phi_n_1, p.g_eff_mag, p.kappa_s))
                << "\n";
      out.get() << "n_sig_2 = "
                << format_float_shortest(enbs::analytic::n_sig(
                       nsig_t, p.seed_2, ph.phi_n_2, p.g_eff_mag, p.kappa_s))
                << "\n";
      return 0;
    }

    if (g2_cmd->parsed()) {
      const EnbsParams p = resolve_params(g2_common);
      if (maybe_dump(g2_common, p)) return 0;
      const auto g2 = enbs::analytic::g2_zero_delay(g2_t, p);
      OutputStream out(g2_common.out);
      if (g2.divergent)
        out.get() << "divergent\n";
      else
        out.get() << format_float_shortest(g2.value) << "\n";
      return 0;
    }

    if (fid_cmd->parsed()) {
      const EnbsParams p = resolve_params(fid_common);
      if (maybe_dump(fid_common, p)) return 0;
      OutputStream out(fid_common.out);
      double f = 0.0;
      if (!fid_alpha_mag.empty()) {
        if (fid_dphi.empty())
          throw enbs::ConfigError("--alpha-mag requires --dphi-sd");
        f = enbs::analytic::fidelity_symmetric(
            enbs::config::parse_double(fid_alpha_mag),
            enbs::config::parse_phase(fid_dphi));
      } else if (!fid_a1_mag.empty() || !fid_a2_mag.empty()) {
        auto angle = [](const std::string& s) {
          return s.empty() ? 0.0 : enbs::config::parse_phase(s);
        };
        auto mag = [](const std::string& s) {
          return s.empty() ? 0.0 : enbs::config::parse_double(s);
        };
        f = enbs::analytic::fidelity(
            std::polar(mag(fid_a1_mag), angle(fid_a1_phase)),
            std::polar(mag(fid_a2_mag), angle(fid_a2_phase)));
      } else {
        f = enbs::analytic::fidelity(p.seed_1.value(), p.seed_2.value());
      }
      out.get() << format_float_shortest(f) << "\n";
      return 0;
    }

    if (tri_cmd->parsed()) {
      const EnbsParams p = resolve_params(tri_common);
      if (maybe_dump(tri_common, p)) return 0;
      const std::complex<double> a1 =
          std::polar(enbs::config::parse_double(tri_a1_mag),
                     enbs::config::parse_phase(tri_a1_phase));
      const std::complex<double> a2 =
          std::polar(enbs::config::parse_double(tri_a2_mag),
                     enbs::config::parse_phase(tri_a2_phase));
      const auto dm = enbs::qinfo::reduced_signal_dm(a1, a2);
      const auto tri = enbs::qinfo::triality(dm);
      const double f = enbs::analytic::fidelity(a1, a2);
      OutputStream out(tri_common.out);
      out.get() << "f = " << format_float_shortest(f) << "\n"
                << "v = " << format_float_shortest(tri.visibility) << "\n"
                << "p = " << format_float_shortest(tri.predictability) << "\n"
                << "e = " << format_float_shortest(tri.entanglement) << "\n"
                << "mu_s_sq = " << format_float_shortest(tri.mu_s_sq) << "\n"
                << "state_purity = " << format_float_shortest(tri.state_purity)
                << "\n";
      return 0;
    }

    if (evo_cmd->parsed()) {
      const EnbsParams p = resolve_params(evo_common);
      if (maybe_dump(evo_common, p)) return 0;
      std::vector<double> t_grid(static_cast<size_t>(evo_samples));
      for (int i = 0; i < evo_samples; ++i)
        t_grid[i] = evo_tmax * double(i + 1) / double(evo_samples);
      const auto backend = evo_backend == "fock"
                               ? enbs::dynamics::Backend::fock
                               : enbs::dynamics::Backend::gaussian;
      enbs::dynamics::InitialState initial =
          enbs::dynamics::InitialState::vacuum_coherent;
      if (evo_initial == "spacs_idler")
        initial = enbs::dynamics::InitialState::spacs_idler;
      else if (evo_initial == "coherent_coherent")
        initial = enbs::dynamics::InitialState::coherent_coherent;
      const auto result =
          enbs::dynamics::evolve_two_units(backend, initial, p, t_grid);
      OutputStream out(evo_common.out);
      enbs::scans::write_trajectory_csv(
          result, {{"backend", evo_backend}, {"initial", evo_initial}}, out.get());
      return 0;
    }

    auto run_scan_cmd = [&](const CommonOpts& common, const std::string& preset_name,
                            bool check, const std::string& dir) -> int {
      auto spec = enbs::scans::preset(preset_name);
      spec.fixed = [&] {
        EnbsParams p = spec.fixed;
        for (const auto& s : common.sets) enbs::config::apply_override(p, s);
        return p;
      }();
      if (!common.params_file.empty())
        throw enbs::ConfigError("presets fix their parameters; use --set overrides");
      if (common.dump_config) {
        OutputStream out(common.out);
        enbs::config::dump_config(spec.fixed, out.get());
        return 0;
      }
      if (check) {
        const std::string path =
            dir + "/" + enbs::scans::golden_filename(preset_name);
        const auto mismatch = enbs::scans::check_against_golden(spec, path);
        if (mismatch) {
          std::cerr << "check failed for " << preset_name << ": " << *mismatch
                    << "\n";
          return 1;
        }
        std::cout << "ok: " << preset_name << " matches " << path << "\n";
        return 0;
      }
      OutputStream out(common.out);
      enbs::scans::run_scan(spec, out.get());
      return 0;
    };

    if (scan_cmd->parsed())
      return run_scan_cmd(scan_common, scan_preset, scan_check, golden_dir);
    if (val_cmd->parsed())
      return run_scan_cmd(val_common, "validate", val_check, val_golden_dir);
  } catch (const enbs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
