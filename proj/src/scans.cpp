#include "enbs/scans.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "enbs/analytic.hpp"
#include "enbs/qinfo.hpp"

namespace enbs::scans {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGigaHz = 1e9;

std::string to_chars_string(double v, int precision) {
  char buf[64];
  std::to_chars_result res;
  if (precision < 0)
    res = std::to_chars(buf, buf + sizeof(buf), v);
  else
    res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                        precision);
  return std::string(buf, res.ptr);
}

const char* initial_state_name(dynamics::InitialState s) {
  switch (s) {
    case dynamics::InitialState::vacuum_coherent: return "vacuum_coherent";
    case dynamics::InitialState::spacs_idler: return "spacs_idler";
    case dynamics::InitialState::coherent_coherent: return "coherent_coherent";
  }
  return "unknown";
}

void write_meta(std::ostream& os, const ScanSpec& spec,
                const std::vector<std::pair<std::string, std::string>>& extra) {
  os << "# enbs " << kVersion << "\n";
  if (!spec.preset_name.empty()) os << "# preset = " << spec.preset_name << "\n";
  const EnbsParams& p = spec.fixed;
  os << "# g_eff_mag_rad_per_s = " << format_float_shortest(p.g_eff_mag) << "\n";
  os << "# kappa_s_rad_per_s = " << format_float_shortest(p.kappa_s) << "\n";
  os << "# kappa_i_rad_per_s = " << format_float_shortest(p.kappa_i) << "\n";
  os << "# pump_phase_1 = " << format_float_shortest(p.pump_phase_1) << "\n";
  os << "# pump_phase_2 = " << format_float_shortest(p.pump_phase_2) << "\n";
  os << "# signal_phase_1 = " << format_float_shortest(p.signal_phase_1) << "\n";
  os << "# signal_phase_2 = " << format_float_shortest(p.signal_phase_2) << "\n";
  os << "# seed_1 = " << format_float_shortest(p.seed_1.amplitude_mag) << " @ "
     << format_float_shortest(p.seed_1.phase) << "\n";
  os << "# seed_2 = " << format_float_shortest(p.seed_2.amplitude_mag) << " @ "
     << format_float_shortest(p.seed_2.phase) << "\n";
  for (const auto& a : spec.axes)
    os << "# axis " << a.name << " = [" << format_float_shortest(a.start) << ", "
       << format_float_shortest(a.stop) << (a.periodic ? ")" : "]") << " x "
       << a.count << "\n";
  for (const auto& [k, v] : extra) os << "# " << k << " = " << v << "\n";
}

/// Run fn(i) for i in [0, n) over a small thread pool; results land in
/// caller-owned storage indexed by i, so output order never depends on
/// scheduling.
template <class Fn>
void parallel_for(long n, int threads, const Fn& fn) {
  int hw = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  hw = std::max(1, std::min<int>(hw, static_cast<int>(n)));
  if (hw == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < hw; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void scan_nsig_time(const ScanSpec& spec, std::ostream& os) {
  const Axis& axis = spec.axes.at(0);
  const auto ts = axis_points(axis);
  const EnbsParams& p = spec.fixed;
  const PhaseSet ph = derive_phases(p);
  write_meta(os, spec, {{"columns", "t_s,nsig_undamped,nsig_damped"}});
  os << "t_s,nsig_undamped,nsig_damped\n";
  for (double t : ts) {
    const double undamped =
        analytic::n_sig(t, p.seed_1, ph.phi_n_1, p.g_eff_mag, 0.0);
    const double damped =
        analytic::n_sig(t, p.seed_1, ph.phi_n_1, p.g_eff_mag, p.kappa_s);
    os << format_float(t) << "," << format_float(undamped) << ","
       << format_float(damped) << "\n";
  }
}

/// Parameter set whose derived phases equal the requested (phi_n, phi):
/// both pump phases carry phi_n (so both local phases match and dphi_sd
/// stays 0), and the arm-1 signal phase absorbs -phi.
EnbsParams params_at_phases(const EnbsParams& base, double phi_n, double phi) {
  EnbsParams p = base;
  p.pump_phase_1 = wrap_phase(phi_n);
  p.pump_phase_2 = wrap_phase(phi_n);
  p.seed_1.phase = 0.0;
  p.seed_2.phase = 0.0;
  p.signal_phase_1 = wrap_phase(-phi);
  p.signal_phase_2 = 0.0;
  return p;
}

void scan_g2_phase_grid(const ScanSpec& spec, std::ostream& os) {
  const auto phi_n_pts = axis_points(spec.axes.at(0));
  const auto phi_pts = axis_points(spec.axes.at(1));
  write_meta(os, spec,
             {{"t_s", format_float_shortest(spec.time_s)},
              {"columns", "phi_n,phi,g2,is_divergent"}});
  os << "phi_n,phi,g2,is_divergent\n";
  for (double phi_n : phi_n_pts) {
    for (double phi : phi_pts) {
      const EnbsParams p = params_at_phases(spec.fixed, phi_n, phi);
      const analytic::G2Value g2 = analytic::g2_zero_delay(spec.time_s, p);
      os << format_float(phi_n) << "," << format_float(phi) << ",";
      if (g2.divergent)
        os << ",1\n";
      else
        os << format_float(g2.value) << ",0\n";
    }
  }
}

void scan_fidelity_phase(const ScanSpec& spec, std::ostream& os) {
  const auto pts = axis_points(spec.axes.at(0));
  std::string header = "dphi_sd";
  for (double a : spec.fidelity_alphas)
    header += ",f_alpha" + to_chars_string(a, -1);
  write_meta(os, spec, {{"columns", header}});
  os << header << "\n";
  for (double d : pts) {
    os << format_float(d);
    for (double a : spec.fidelity_alphas) {
      double f = analytic::fidelity_symmetric(a, d);
      if (f < kFidelityClamp) f = 0.0;  // underflow clamp, documented
      os << "," << format_float(f);
    }
    os << "\n";
  }
}

void scan_triality_phase(const ScanSpec& spec, std::ostream& os) {
  const auto pts = axis_points(spec.axes.at(0));
  const double mag = spec.fixed.seed_1.amplitude_mag;
  write_meta(os, spec,
             {{"columns", "dphi_sd,f,v,p,e_triality,e_methods"}});
  os << "dphi_sd,f,v,p,e_triality,e_methods\n";
  for (double d : pts) {
    const std::complex<double> a1 = std::polar(mag, d);
    const std::complex<double> a2(mag, 0.0);
    const double f = analytic::fidelity(a1, a2);
    const auto dm = qinfo::reduced_signal_dm(a1, a2);
    const auto tri = qinfo::triality(dm);
    const double e_methods =
        qinfo::entanglement_halved_convention(dm.rho11, dm.rho22, f);
    os << format_float(d) << "," << format_float(f) << ","
       << format_float(tri.visibility) << "," << format_float(tri.predictability)
       << "," << format_float(tri.entanglement) << "," << format_float(e_methods)
       << "\n";
  }
}

void scan_validate(const ScanSpec& spec, std::ostream& os) {
  ValidateSpec vs;
  vs.g_eff_mag = spec.fixed.g_eff_mag;
  vs.kappa_s = spec.fixed.kappa_s;
  vs.kappa_i = spec.fixed.kappa_i;
  vs.phi_n = 0.0;
  vs.phi_global = 0.5 * std::numbers::pi;
  const auto rows = validate_backends(vs);
  write_meta(os, spec,
             {{"phi_n", format_float_shortest(vs.phi_n)},
              {"phi_global", format_float_shortest(vs.phi_global)},
              {"columns",
               "initial_state,alpha_mag,g_t,kappa_ratio,nsig_analytic,nsig_gaussian,"
               "nsig_fock,nsig_gap_backends,nsig_gap_model,g2_analytic,g2_gaussian,"
               "g2_fock,g2_gap_backends"}});
  os << "initial_state,alpha_mag,g_t,kappa_ratio,nsig_analytic,nsig_gaussian,"
        "nsig_fock,nsig_gap_backends,nsig_gap_model,g2_analytic,g2_gaussian,"
        "g2_fock,g2_gap_backends\n";
  for (const auto& r : rows) {
    os << initial_state_name(r.initial_state) << "," << format_float(r.alpha_mag)
       << "," << format_float(r.gt) << "," << format_float(r.kappa_ratio) << ","
       << format_float(r.nsig_analytic) << "," << format_float(r.nsig_gaussian)
       << "," << format_float(r.nsig_fock) << ","
       << format_float(r.nsig_gap_backends) << "," << format_float(r.nsig_gap_model)
       << "," << format_float(r.g2_analytic) << "," << format_float(r.g2_gaussian)
       << "," << format_float(r.g2_fock) << "," << format_float(r.g2_gap_backends)
       << "\n";
  }
}

}  // namespace

std::string format_float(double v) { return to_chars_string(v, 17); }
std::string format_float_shortest(double v) { return to_chars_string(v, -1); }

std::vector<double> axis_points(const Axis& axis) {
  if (axis.count < 2) throw DomainError("scan axis: count must be >= 2");
  if (!(axis.start < axis.stop)) throw DomainError("scan axis: start must be < stop");
  std::vector<double> pts(static_cast<size_t>(axis.count));
  if (axis.periodic) {
    const double step = (axis.stop - axis.start) / axis.count;
    for (int i = 0; i < axis.count; ++i) pts[i] = axis.start + i * step;
  } else {
    const double step = (axis.stop - axis.start) / (axis.count - 1);
    for (int i = 0; i < axis.count; ++i) pts[i] = axis.start + i * step;
    pts.back() = axis.stop;
  }
  return pts;
}

ScanSpec preset(const std::string& name) {
  ScanSpec spec;
  spec.preset_name = name;
  EnbsParams p;
  p.g_eff_mag = kTwoPi * 1.0 * kGigaHz;

  if (name == "fig2") {
    // Gain saturation window: |alpha| = 5, kappa_s/(2pi) = 3 GHz, 75 ps.
    spec.target = Target::nsig_time;
    p.seed_1 = SeedField{5.0, 0.0};
    p.seed_2 = SeedField{5.0, 0.0};
    p.kappa_s = kTwoPi * 3.0 * kGigaHz;
    spec.fixed = p;
    spec.axes = {Axis{"t_s", 0.0, 75e-12, 501, false}};
    return spec;
  }
  if (name == "methods") {
    // Same observable with the alternative rate reading:
    // |g_eff|/(2pi) = 10 GHz, kappa_s/(2pi) = 2.5 GHz.
    spec.target = Target::nsig_time;
    p.g_eff_mag = kTwoPi * 10.0 * kGigaHz;
    p.seed_1 = SeedField{5.0, 0.0};
    p.seed_2 = SeedField{5.0, 0.0};
    p.kappa_s = kTwoPi * 2.5 * kGigaHz;
    spec.fixed = p;
    spec.axes = {Axis{"t_s", 0.0, 75e-12, 501, false}};
    return spec;
  }
  if (name == "fig3") {
    spec.target = Target::g2_phase_grid;
    p.seed_1 = SeedField{2.0, 0.0};
    p.seed_2 = SeedField{2.0, 0.0};
    spec.fixed = p;
    spec.time_s = 75e-12;
    spec.axes = {Axis{"phi_n", 0.0, kTwoPi, 201, true},
                 Axis{"phi", 0.0, kTwoPi, 201, true}};
    return spec;
  }
  if (name == "fig4") {
    spec.target = Target::fidelity_phase;
    spec.fixed = p;
    spec.fidelity_alphas = {1.0, 4.0, 10.0};
    spec.axes = {Axis{"dphi_sd", 0.0, kTwoPi, 501, false}};
    return spec;
  }
  if (name == "fig5") {
    spec.target = Target::triality_phase;
    p.seed_1 = SeedField{2.0, 0.0};
    p.seed_2 = SeedField{2.0, 0.0};
    spec.fixed = p;
    spec.axes = {Axis{"dphi_sd", 0.0, kTwoPi, 501, false}};
    return spec;
  }
  if (name == "validate") {
    spec.target = Target::validate_backends;
    spec.fixed = p;
    return spec;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "methods", "validate"};
}

std::string golden_filename(const std::string& preset_name) {
  return preset_name + ".csv";
}

void run_scan(const ScanSpec& spec, std::ostream& os) {
  switch (spec.target) {
    case Target::nsig_time: scan_nsig_time(spec, os); return;
    case Target::g2_phase_grid: scan_g2_phase_grid(spec, os); return;
    case Target::fidelity_phase: scan_fidelity_phase(spec, os); return;
    case Target::triality_phase: scan_triality_phase(spec, os); return;
    case Target::validate_backends: scan_validate(spec, os); return;
  }
  throw DomainError("run_scan: unknown target");
}

std::string run_scan_to_string(const ScanSpec& spec) {
  std::ostringstream os;
  run_scan(spec, os);
  return os.str();
}

std::optional<std::string> check_against_golden(const ScanSpec& spec,
                                                const std::string& golden_path) {
  std::ifstream in(golden_path, std::ios::binary);
  if (!in) return "cannot open golden file " + golden_path;
  std::ostringstream golden;
  golden << in.rdbuf();
  const std::string expected = golden.str();
  const std::string actual = run_scan_to_string(spec);
  if (expected == actual) return std::nullopt;
  // Locate the first differing line for the diagnostic.
  std::istringstream ea(expected), aa(actual);
  std::string el, al;
  long line = 0;
  while (true) {
    ++line;
    const bool eg = static_cast<bool>(std::getline(ea, el));
    const bool ag = static_cast<bool>(std::getline(aa, al));
    if (!eg && !ag) break;
    if (el != al || eg != ag)
      return "mismatch at line " + std::to_string(line) + ": golden '" +
             (eg ? el : std::string("<eof>")) + "' vs generated '" +
             (ag ? al : std::string("<eof>")) + "'";
  }
  return "golden file differs in size only";
}

std::vector<BackendComparison> validate_backends(const ValidateSpec& spec) {
  if (spec.g_eff_mag <= 0.0)
    throw DomainError("validate_backends: g_eff_mag must be > 0");
  for (double a : spec.alpha_mags)
    if (a > 2.0 + 1e-12)
      throw DomainError("validate_backends: |alpha| > 2 outside Fock feasibility");
  for (double gt : spec.gts)
    if (gt > 0.6 + 1e-12)
      throw DomainError("validate_backends: |g|t > 0.6 outside Fock feasibility");

  struct Task {
    dynamics::InitialState state;
    double alpha;
  };
  std::vector<Task> tasks;
  for (auto s : spec.initial_states)
    for (double a : spec.alpha_mags) tasks.push_back({s, a});

  const size_t per_task = spec.gts.size();
  std::vector<BackendComparison> rows(tasks.size() * per_task);

  std::vector<double> t_grid(spec.gts.size());
  for (size_t i = 0; i < spec.gts.size(); ++i) t_grid[i] = spec.gts[i] / spec.g_eff_mag;

  parallel_for(static_cast<long>(tasks.size()), spec.threads, [&](long ti) {
    const Task& task = tasks[ti];
    EnbsParams p;
    p.g_eff_mag = spec.g_eff_mag;
    p.kappa_s = spec.kappa_s;
    p.kappa_i = spec.kappa_i;
    p.seed_1 = SeedField{task.alpha, 0.0};
    p.seed_2 = SeedField{task.alpha, 0.0};
    p.pump_phase_1 = wrap_phase(spec.phi_n);
    p.pump_phase_2 = wrap_phase(spec.phi_n);
    p.signal_phase_1 = wrap_phase(-spec.phi_global);

    const std::complex<double> alpha = p.seed_1.value();
    const auto gauss = dynamics::gaussian_evolve(
        dynamics::unit_initial_moments(task.state, alpha), p, t_grid);

    const double gt_max = spec.gts.back();
    auto [ds, di] = dynamics::suggested_unit_dims(task.alpha, gt_max);
    if (task.state == dynamics::InitialState::coherent_coherent) {
      // Coherent signal seeding amplifies the mean field itself.
      const double mu = task.alpha * std::exp(gt_max);
      ds = std::max(ds, static_cast<int>(std::ceil(mu * mu + 7.0 * mu + 10.0)));
    }
    if (task.state == dynamics::InitialState::spacs_idler) di += 3;
    const auto init = dynamics::unit_initial_register(task.state, alpha, ds, di);
    const auto fockr = dynamics::lindblad_evolve(init, p, t_grid);

    for (size_t gi = 0; gi < per_task; ++gi) {
      BackendComparison row;
      row.initial_state = task.state;
      row.alpha_mag = task.alpha;
      row.gt = spec.gts[gi];
      row.kappa_ratio = spec.kappa_s / spec.g_eff_mag;
      const double t = t_grid[gi];
      const PhaseSet ph = derive_phases(p);
      row.nsig_analytic =
          analytic::n_sig(t, p.seed_1, ph.phi_n_1, p.g_eff_mag, p.kappa_s);
      row.nsig_gaussian = gauss.observables[gi].n_sig_1;
      row.nsig_fock = fockr.observables[gi].n_sig_1;
      row.nsig_gap_backends = std::fabs(row.nsig_gaussian - row.nsig_fock);
      row.nsig_gap_model = std::fabs(row.nsig_analytic - row.nsig_gaussian);
      const auto g2a = analytic::g2_zero_delay(t, p);
      row.g2_analytic =
          g2a.divergent ? std::numeric_limits<double>::infinity() : g2a.value;
      row.g2_gaussian = gauss.observables[gi].g2;
      row.g2_fock = fockr.observables[gi].g2;
      row.g2_gap_backends = std::fabs(row.g2_gaussian - row.g2_fock);
      rows[ti * per_task + gi] = row;
    }
  });
  return rows;
}

void write_trajectory_csv(const dynamics::EvolutionResult& result,
                          const std::vector<std::pair<std::string, std::string>>& meta,
                          std::ostream& os) {
  os << "# enbs " << kVersion << "\n";
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << "\n";
  os << "time_s,n_sig_1,n_sig_2,g2,re_cross,im_cross,trace_error,truncation_tail\n";
  for (size_t i = 0; i < result.times.size(); ++i) {
    const auto& pt = result.observables[i];
    os << format_float(pt.time) << "," << format_float(pt.n_sig_1) << ","
       << format_float(pt.n_sig_2) << ",";
    if (std::isfinite(pt.g2)) os << format_float(pt.g2);
    os << "," << format_float(result.cross_12[i].real()) << ","
       << format_float(result.cross_12[i].imag()) << ","
       << format_float(result.trace_error_t.empty() ? 0.0 : result.trace_error_t[i])
       << ","
       << format_float(result.truncation_tail_t.empty() ? 0.0
                                                        : result.truncation_tail_t[i])
       << "\n";
  }
}

}  // namespace enbs::scans
