#include "enbs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace enbs::dynamics {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using fock::FockRegister;
using fock::Sparse;

namespace {

constexpr Complex kI{0.0, 1.0};

struct UnitSpec {
  int signal_mode;
  int idler_mode;
  Complex g;  // |g_eff| e^{i phi_p}
};

std::vector<UnitSpec> units_for(const EnbsParams& p, int mode_count, int arm) {
  if (mode_count == 2) {
    const double phi = arm == 1 ? p.pump_phase_1 : p.pump_phase_2;
    return {UnitSpec{0, 1, std::polar(p.g_eff_mag, phi)}};
  }
  if (mode_count == 4) {
    return {UnitSpec{0, 1, std::polar(p.g_eff_mag, p.pump_phase_1)},
            UnitSpec{2, 3, std::polar(p.g_eff_mag, p.pump_phase_2)}};
  }
  throw DimensionMismatchError("dynamics: register must have 2 or 4 modes");
}

double rate_scale(const EnbsParams& p) {
  return std::max({p.g_eff_mag, p.kappa_s, p.kappa_i});
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw DomainError("dynamics: empty time grid");
  if (t_grid.front() < 0.0) throw DomainError("dynamics: negative time");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw DomainError("dynamics: time grid must be strictly increasing");
}

/// Preallocated stage storage so the large density matrices are never
/// reallocated inside the stepping loop.
struct Rk4Buffers {
  Matrix k1, k2, k3, k4, stage;
  void resize_like(const Matrix& y) {
    k1.resizeLike(y);
    k2.resizeLike(y);
    k3.resizeLike(y);
    k4.resizeLike(y);
    stage.resizeLike(y);
  }
};

/// Rhs callables have the signature void(const Matrix& in, Matrix& out) with
/// out presized.
template <class Rhs>
void rk4_step(Matrix& y, double h, const Rhs& rhs, Rk4Buffers& b) {
  rhs(y, b.k1);
  b.stage = y + (0.5 * h) * b.k1;
  rhs(b.stage, b.k2);
  b.stage = y + (0.5 * h) * b.k2;
  rhs(b.stage, b.k3);
  b.stage = y + h * b.k3;
  rhs(b.stage, b.k4);
  y += (h / 6.0) * (b.k1 + 2.0 * b.k2 + 2.0 * b.k3 + b.k4);
}

template <class Rhs>
void integrate_span(Matrix& y, double t0, double t1, double h_max, const Rhs& rhs,
                    Rk4Buffers& b, long& steps) {
  if (t1 <= t0) return;
  const double span = t1 - t0;
  long n = 1;
  if (std::isfinite(h_max) && h_max > 0.0)
    n = std::max<long>(1, static_cast<long>(std::ceil(span / h_max)));
  const double h = span / static_cast<double>(n);
  for (long k = 0; k < n; ++k) rk4_step(y, h, rhs, b);
  steps += n;
}

/// One-step Richardson estimate: integrate a single step of size h and two of
/// h/2 from the same state and return the worst entry difference.
template <class Rhs>
double local_error(const Matrix& state, double h, const Rhs& rhs, Rk4Buffers& b) {
  Matrix coarse = state;
  rk4_step(coarse, h, rhs, b);
  Matrix fine = state;
  rk4_step(fine, 0.5 * h, rhs, b);
  rk4_step(fine, 0.5 * h, rhs, b);
  return (coarse - fine).cwiseAbs().maxCoeff();
}

/// Shared driver: at the head of each segment the step is calibrated by
/// one-step Richardson extrapolation against the per-unit-time error target
/// (halving until it holds, throwing StepFailureError past the cap), then the
/// segment runs at that step and every grid time is sampled.
template <class Rhs, class Sampler>
long drive(Matrix& state, std::span<const double> t_grid, double rate,
           const StepControl& control, const Rhs& rhs, const Sampler& sample) {
  long steps = 0;
  double h = rate > 0.0 ? control.step_scale / rate
                        : std::numeric_limits<double>::infinity();
  int halvings = 0;
  Rk4Buffers buffers;
  buffers.resize_like(state);

  double t_prev = 0.0;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_prev;
    if (span > 0.0 && rate > 0.0) {
      const double scale = std::max(1.0, state.cwiseAbs().maxCoeff());
      for (;;) {
        const double h_try = std::min(h, span);
        const double err = local_error(state, h_try, rhs, buffers);
        const double allowed =
            std::max(control.error_target * rate * h_try * scale, 1e-300);
        if (err <= allowed) break;
        if (++halvings > control.max_halvings)
          throw StepFailureError(
              "dynamics: step halving cannot reach error target");
        h *= 0.5;
      }
    }
    integrate_span(state, t_prev, t_grid[i], h, rhs, buffers, steps);
    t_prev = t_grid[i];
    sample(t_grid[i], state);
  }
  return steps;
}

std::vector<Eigen::Index> mode_strides(const std::vector<int>& dims) {
  std::vector<Eigen::Index> s(dims.size(), 1);
  for (int m = static_cast<int>(dims.size()) - 2; m >= 0; --m)
    s[m] = s[m + 1] * dims[m + 1];
  return s;
}

int digit_of(Eigen::Index flat, Eigen::Index stride, int dim) {
  return static_cast<int>((flat / stride) % dim);
}

}  // namespace

double GaussianMoments::commutation_defect() const {
  const int m = modes();
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Complex c = second(i, m + j) - second(m + j, i);
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(c - target));
    }
  return worst;
}

double GaussianMoments::hermiticity_defect() const {
  const int m = modes();
  auto dag = [m](int i) { return i < m ? i + m : i - m; };
  double worst = 0.0;
  for (int i = 0; i < 2 * m; ++i)
    for (int j = 0; j < 2 * m; ++j)
      worst = std::max(worst,
                       std::abs(second(i, j) - std::conj(second(dag(j), dag(i)))));
  return worst;
}

double wick_g2(const GaussianMoments& m, int k, double nsig_floor) {
  const int M = m.modes();
  const Complex mu = m.mean[k];
  const double mu_sq = std::norm(mu);
  const double n_fl = (m.second(M + k, k) - std::conj(mu) * mu).real();
  const Complex m_fl = m.second(k, k) - mu * mu;
  const double total = mu_sq + n_fl;
  if (total < nsig_floor) return std::numeric_limits<double>::infinity();
  const double fourth = mu_sq * mu_sq + 4.0 * mu_sq * n_fl +
                        2.0 * (std::conj(mu) * std::conj(mu) * m_fl).real() +
                        2.0 * n_fl * n_fl + std::norm(m_fl);
  return fourth / (total * total);
}

fock::Sparse build_hamiltonian(const EnbsParams& params, const std::vector<int>& dims,
                               int arm) {
  const auto units = units_for(params, static_cast<int>(dims.size()), arm);
  Eigen::Index d = 1;
  for (int m : dims) d *= m;
  Sparse h(d, d);
  for (const auto& u : units) {
    const Sparse raise_s =
        fock::embed(fock::creation(u.signal_mode, dims[u.signal_mode]), dims);
    const Sparse raise_i =
        fock::embed(fock::creation(u.idler_mode, dims[u.idler_mode]), dims);
    const Sparse pair_up = (raise_s * raise_i).pruned();
    const Sparse pair_down = pair_up.adjoint();
    const Sparse term = Sparse(u.g * pair_up) + Sparse(std::conj(u.g) * pair_down);
    h = Sparse(h + term);
  }
  h.makeCompressed();
  return h;
}

namespace {

/// Lindblad right-hand side over strided ladder kernels. The pair raise and
/// lower maps of H shift the flat index by a constant (the sum of the two
/// mode strides) with an occupation-dependent factor, and every jump map is a
/// constant diagonal shift, so the whole generator runs as a handful of
/// contiguous passes instead of sparse matrix products.
struct FockWorkspace {
  std::vector<int> dims;
  std::vector<Eigen::Index> strides;
  struct PairCoupling {
    Complex g;                   // |g| e^{i phi_p}
    Eigen::Index shift;          // stride_signal + stride_idler
    Eigen::VectorXd raise_f;     // sqrt(n_s n_i), 0 where a digit is 0
    Eigen::VectorXd lower_f;     // sqrt((n_s+1)(n_i+1)), 0 at the tops
  };
  std::vector<PairCoupling> pairs;
  struct Jump {
    double kappa;
    Eigen::Index shift;        // mode stride
    Eigen::VectorXd gain_f;    // sqrt(n+1), 0 at the top level
    Eigen::VectorXd occupation;
  };
  std::vector<Jump> jumps;

  // x = H rho
  void apply_hamiltonian(const Matrix& rho, Matrix& x) const {
    const Eigen::Index d = rho.rows();
    x.setZero();
    for (const auto& p : pairs) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const Complex* src = rho.col(c).data();
        Complex* dst = x.col(c).data();
        for (Eigen::Index r = p.shift; r < d; ++r)
          if (p.raise_f[r] != 0.0)
            dst[r] += p.g * p.raise_f[r] * src[r - p.shift];
        for (Eigen::Index r = 0; r < d - p.shift; ++r)
          if (p.lower_f[r] != 0.0)
            dst[r] += std::conj(p.g) * p.lower_f[r] * src[r + p.shift];
      }
    }
  }

  mutable Matrix hrho;  // scratch for H rho; one evolution owns the workspace

  void rhs(const Matrix& rho, Matrix& out) const {
    const Eigen::Index d = rho.rows();
    if (!pairs.empty()) {
      if (hrho.rows() != d) hrho.resize(d, d);
      apply_hamiltonian(rho, hrho);
      out = -kI * (hrho - hrho.adjoint());
    } else {
      out.setZero();
    }
    for (const auto& j : jumps) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const double occ_c = j.occupation[c];
        const Complex* col = rho.col(c).data();
        Complex* dst = out.col(c).data();
        // - kappa/2 {L^dag L, rho}
        for (Eigen::Index r = 0; r < d; ++r)
          dst[r] -= (0.5 * j.kappa) * (j.occupation[r] + occ_c) * col[r];
        // + kappa L rho L^dag
        if (j.gain_f[c] == 0.0) continue;
        const Complex* src = rho.col(c + j.shift).data();
        const double gc = j.gain_f[c];
        for (Eigen::Index r = 0; r < d - j.shift; ++r)
          if (j.gain_f[r] != 0.0)
            dst[r] += j.kappa * gc * j.gain_f[r] * src[r + j.shift];
      }
    }
  }
};

FockWorkspace make_workspace(const FockRegister& reg, const EnbsParams& params,
                             int arm) {
  FockWorkspace w;
  w.dims = reg.mode_dims();
  w.strides = mode_strides(w.dims);
  const auto units = units_for(params, static_cast<int>(w.dims.size()), arm);
  const Eigen::Index d = reg.dim();

  if (params.g_eff_mag != 0.0) {
    for (const auto& u : units) {
      FockWorkspace::PairCoupling p;
      p.g = u.g;
      p.shift = w.strides[u.signal_mode] + w.strides[u.idler_mode];
      p.raise_f = Eigen::VectorXd::Zero(d);
      p.lower_f = Eigen::VectorXd::Zero(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const int ns = digit_of(i, w.strides[u.signal_mode], w.dims[u.signal_mode]);
        const int ni = digit_of(i, w.strides[u.idler_mode], w.dims[u.idler_mode]);
        if (ns > 0 && ni > 0) p.raise_f[i] = std::sqrt(double(ns) * double(ni));
        if (ns + 1 < w.dims[u.signal_mode] && ni + 1 < w.dims[u.idler_mode])
          p.lower_f[i] = std::sqrt(double(ns + 1) * double(ni + 1));
      }
      w.pairs.push_back(std::move(p));
    }
  }

  auto add_jump = [&](int mode, double kappa) {
    if (kappa == 0.0) return;
    FockWorkspace::Jump j;
    j.kappa = kappa;
    j.shift = w.strides[mode];
    j.gain_f = Eigen::VectorXd::Zero(d);
    j.occupation = Eigen::VectorXd(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const int n = digit_of(i, w.strides[mode], w.dims[mode]);
      j.occupation[i] = n;
      if (n + 1 < w.dims[mode]) j.gain_f[i] = std::sqrt(double(n + 1));
    }
    w.jumps.push_back(std::move(j));
  };
  for (const auto& u : units) {
    add_jump(u.signal_mode, params.kappa_s);
    add_jump(u.idler_mode, params.kappa_i);
  }
  return w;
}

struct RegisterObservables {
  double n_sig_1 = 0.0;
  double n_sig_2 = 0.0;
  double g2_num = 0.0;  // <A1^dag A1^dag A1 A1>
  Complex mean_1 = 0.0;
  Complex mean_2 = 0.0;
  Complex cross = 0.0;  // <A_1^dag A_2>, 4-mode registers only
  double trace = 0.0;
  double top_level = 0.0;  // worst top-Fock population over modes
};

RegisterObservables measure(const Matrix& rho, const std::vector<int>& dims,
                            const std::vector<Eigen::Index>& strides) {
  RegisterObservables obs;
  const Eigen::Index d = rho.rows();
  const int modes = static_cast<int>(dims.size());
  std::vector<double> top(modes, 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double p = rho(i, i).real();
    obs.trace += p;
    const int ns1 = digit_of(i, strides[0], dims[0]);
    obs.n_sig_1 += p * ns1;
    obs.g2_num += p * ns1 * (ns1 - 1);
    if (modes == 4) obs.n_sig_2 += p * digit_of(i, strides[2], dims[2]);
    for (int m = 0; m < modes; ++m)
      if (digit_of(i, strides[m], dims[m]) == dims[m] - 1) top[m] += p;
    if (ns1 >= 1) obs.mean_1 += std::sqrt(double(ns1)) * rho(i, i - strides[0]);
    if (modes == 4) {
      const int ns2 = digit_of(i, strides[2], dims[2]);
      if (ns2 >= 1) obs.mean_2 += std::sqrt(double(ns2)) * rho(i, i - strides[2]);
      // <A_1^dag A_2> = sum_a rho(a, b) sqrt(n1+1) sqrt(n2),
      // b = a + stride_s1 - stride_s2.
      if (ns2 >= 1 && ns1 + 1 < dims[0]) {
        const Eigen::Index b = i + strides[0] - strides[2];
        obs.cross +=
            std::sqrt(double(ns1 + 1)) * std::sqrt(double(ns2)) * rho(i, b);
      }
    }
  }
  obs.top_level = *std::max_element(top.begin(), top.end());
  return obs;
}

}  // namespace

EvolutionResult lindblad_evolve(const FockRegister& initial, const EnbsParams& params,
                                std::span<const double> t_grid,
                                const StepControl& control, int arm) {
  check_grid(t_grid);
  if (!initial.is_density())
    throw DimensionMismatchError("lindblad_evolve: initial state must be a density");
  const FockWorkspace w = make_workspace(initial, params, arm);
  const double trace0 = initial.rho().trace().real();

  Matrix rho = initial.rho();
  auto rhs = [&w](const Matrix& r, Matrix& out) { w.rhs(r, out); };

  EvolutionResult result{.times = {},
                         .observables = {},
                         .mean_signal_1 = {},
                         .mean_signal_2 = {},
                         .cross_12 = {},
                         .trace_error_t = {},
                         .truncation_tail_t = {},
                         .final_state = initial,
                         .diagnostics = {}};
  Diagnostics diag;
  diag.truncation_tail = initial.truncation_tail();

  auto sample = [&](double t, const Matrix& r) {
    const auto obs = measure(r, w.dims, w.strides);
    analytic::ObservablePoint pt;
    pt.time = t;
    pt.n_sig_1 = obs.n_sig_1;
    pt.n_sig_2 = obs.n_sig_2;
    pt.g2 = obs.n_sig_1 < analytic::kNsigFloor
                ? std::numeric_limits<double>::infinity()
                : obs.g2_num / (obs.n_sig_1 * obs.n_sig_1);
    pt.rate_terms = {obs.n_sig_1 + obs.n_sig_2, std::abs(obs.cross)};
    result.observables.push_back(pt);
    result.times.push_back(t);
    result.mean_signal_1.push_back(obs.mean_1);
    result.mean_signal_2.push_back(obs.mean_2);
    result.cross_12.push_back(obs.cross);
    result.trace_error_t.push_back(std::fabs(obs.trace - trace0));
    result.truncation_tail_t.push_back(obs.top_level / obs.trace);

    diag.trace_error = std::max(diag.trace_error, std::fabs(obs.trace - trace0));
    diag.hermiticity_error = std::max(
        diag.hermiticity_error, (r - r.adjoint()).cwiseAbs().maxCoeff());
    const double tail = obs.top_level / obs.trace;
    diag.truncation_tail = std::max(diag.truncation_tail, tail);
    if (tail > control.truncation_limit)
      throw TruncationError("lindblad_evolve: top Fock level carries " +
                            std::to_string(tail) +
                            " of the trace; enlarge the register");
    if (control.check_positivity) {
      const Matrix sym = 0.5 * (r + r.adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
      const double lam = es.eigenvalues().minCoeff() / obs.trace;
      if (lam < control.positivity_floor)
        throw DomainError("lindblad_evolve: density lost positivity, min eig " +
                          std::to_string(lam));
    }
  };

  diag.step_count = drive(rho, t_grid, rate_scale(params), control, rhs, sample);

  result.final_state =
      FockRegister::density(w.dims, std::move(rho), initial.truncation_tail());
  result.diagnostics = diag;
  return result;
}

namespace {

struct GaussianGenerator {
  Matrix drift;  // W, 2M x 2M
  Matrix noise;  // D, 2M x 2M
};

GaussianGenerator make_generator(const EnbsParams& p, int modes, int arm) {
  const auto units = units_for(p, modes, arm);
  const int m = modes;
  GaussianGenerator gen{Matrix::Zero(2 * m, 2 * m), Matrix::Zero(2 * m, 2 * m)};
  for (const auto& u : units) {
    const int s = u.signal_mode, i = u.idler_mode;
    gen.drift(s, s) = -0.5 * p.kappa_s;
    gen.drift(i, i) = -0.5 * p.kappa_i;
    gen.drift(m + s, m + s) = -0.5 * p.kappa_s;
    gen.drift(m + i, m + i) = -0.5 * p.kappa_i;
    gen.drift(s, m + i) = -kI * u.g;
    gen.drift(i, m + s) = -kI * u.g;
    gen.drift(m + s, i) = kI * std::conj(u.g);
    gen.drift(m + i, s) = kI * std::conj(u.g);
    gen.noise(s, m + s) = p.kappa_s;
    gen.noise(i, m + i) = p.kappa_i;
  }
  return gen;
}

}  // namespace

EvolutionResult gaussian_evolve(const GaussianMoments& initial,
                                const EnbsParams& params,
                                std::span<const double> t_grid,
                                const StepControl& control, int arm) {
  check_grid(t_grid);
  const int m = initial.modes();
  if (initial.mean.size() != 2 * m || initial.second.rows() != 2 * m ||
      initial.second.cols() != 2 * m)
    throw DimensionMismatchError("gaussian_evolve: inconsistent moment shapes");
  if (initial.commutation_defect() > 1e-8)
    throw DomainError("gaussian_evolve: initial moments violate commutation");

  // The moment system is tiny, so a finer step than the register integrator's
  // costs nothing and keeps the exact-model error near rounding level.
  StepControl fine = control;
  fine.step_scale = std::min(fine.step_scale, 0.005);

  const GaussianGenerator gen = make_generator(params, m, arm);
  const Matrix drift_t = gen.drift.transpose();

  // Packed state: rows [0, 2M) hold <xi xi^T>, the last row holds mean^T.
  Matrix state(2 * m + 1, 2 * m);
  state.topRows(2 * m) = initial.second;
  state.row(2 * m) = initial.mean.transpose();

  auto rhs = [&](const Matrix& x, Matrix& dx) {
    dx.noalias() = x * drift_t;
    dx.topRows(2 * m) += gen.drift * x.topRows(2 * m) + gen.noise;
  };

  auto unpack = [m](const Matrix& x) {
    GaussianMoments g;
    g.second = x.topRows(2 * m);
    g.mean = x.row(2 * m).transpose();
    return g;
  };

  EvolutionResult result{.times = {},
                         .observables = {},
                         .mean_signal_1 = {},
                         .mean_signal_2 = {},
                         .cross_12 = {},
                         .trace_error_t = {},
                         .truncation_tail_t = {},
                         .final_state = initial,
                         .diagnostics = {}};
  Diagnostics diag;

  auto sample = [&](double t, const Matrix& x) {
    const GaussianMoments g = unpack(x);
    analytic::ObservablePoint pt;
    pt.time = t;
    pt.n_sig_1 = g.occupation(0);
    pt.n_sig_2 = m == 4 ? g.occupation(2) : 0.0;
    pt.g2 = wick_g2(g, 0);
    const Complex cross = m == 4 ? g.cross(0, 2) : Complex(0.0, 0.0);
    pt.rate_terms = {pt.n_sig_1 + pt.n_sig_2, std::abs(cross)};
    result.observables.push_back(pt);
    result.times.push_back(t);
    result.mean_signal_1.push_back(g.mean[0]);
    result.mean_signal_2.push_back(m == 4 ? g.mean[2] : Complex(0.0, 0.0));
    result.cross_12.push_back(cross);
    const double defect = g.commutation_defect();
    result.trace_error_t.push_back(defect);
    result.truncation_tail_t.push_back(0.0);
    diag.trace_error = std::max(diag.trace_error, defect);
  };

  diag.step_count = drive(state, t_grid, rate_scale(params), fine, rhs, sample);

  result.final_state = unpack(state);
  result.diagnostics = diag;
  return result;
}

namespace {

struct SingleModeMoments {
  Complex mean;
  Complex dd;  // <delta a delta a>
  double dn;   // <delta a^dag delta a>
};

SingleModeMoments coherent_mode(Complex alpha) { return {alpha, 0.0, 0.0}; }

SingleModeMoments spacs_mode(Complex alpha) {
  const double n = std::norm(alpha);
  const double w = 1.0 + n;
  const Complex mean = alpha * (2.0 + n) / w;
  const double occ = (n * n + 3.0 * n + 1.0) / w;
  const Complex aa = alpha * alpha * (3.0 + n) / w;
  return {mean, aa - mean * mean, occ - std::norm(mean)};
}

GaussianMoments assemble_moments(const std::vector<SingleModeMoments>& ms) {
  const int m = static_cast<int>(ms.size());
  GaussianMoments g;
  g.mean = Vector::Zero(2 * m);
  for (int k = 0; k < m; ++k) {
    g.mean[k] = ms[k].mean;
    g.mean[m + k] = std::conj(ms[k].mean);
  }
  g.second = g.mean * g.mean.transpose();
  for (int k = 0; k < m; ++k) {
    g.second(k, k) += ms[k].dd;
    g.second(m + k, m + k) += std::conj(ms[k].dd);
    g.second(m + k, k) += ms[k].dn;
    g.second(k, m + k) += ms[k].dn + 1.0;  // [a, a^dag] = 1
  }
  return g;
}

std::vector<SingleModeMoments> unit_modes(InitialState choice, Complex alpha) {
  switch (choice) {
    case InitialState::vacuum_coherent:
      return {coherent_mode(0.0), coherent_mode(alpha)};
    case InitialState::spacs_idler:
      return {coherent_mode(0.0), spacs_mode(alpha)};
    case InitialState::coherent_coherent:
      return {coherent_mode(alpha), coherent_mode(alpha)};
  }
  throw DomainError("unknown initial state");
}

}  // namespace

GaussianMoments unit_initial_moments(InitialState choice, Complex alpha) {
  return assemble_moments(unit_modes(choice, alpha));
}

GaussianMoments two_unit_initial_moments(InitialState choice, const EnbsParams& p) {
  auto m1 = unit_modes(choice, p.seed_1.value());
  auto m2 = unit_modes(choice, p.seed_2.value());
  m1.insert(m1.end(), m2.begin(), m2.end());
  return assemble_moments(m1);
}

FockRegister unit_initial_register(InitialState choice, Complex alpha, int dim_signal,
                                   int dim_idler) {
  FockRegister signal = choice == InitialState::coherent_coherent
                            ? fock::coherent_state(alpha, dim_signal)
                            : fock::vacuum_state(dim_signal);
  FockRegister idler = choice == InitialState::spacs_idler
                           ? fock::spacs(alpha, dim_idler)
                           : fock::coherent_state(alpha, dim_idler);
  return fock::tensor({signal, idler}).to_density();
}

std::pair<int, int> suggested_unit_dims(double alpha_mag, double gt_max) {
  // Mean occupations after the full gain window, plus a nine-sigma-ish
  // headroom for the thermal-like spread. Keeps the top-level population a
  // couple of decades under the 1e-6 truncation limit for |alpha| <= 2,
  // |g|t <= 0.6 (checked by the backend-equivalence tests).
  const double sh = std::sinh(gt_max);
  const double gain = sh * sh;
  const double mean_signal = (1.0 + alpha_mag * alpha_mag) * gain;
  const double mean_idler = alpha_mag * alpha_mag + mean_signal;
  auto headroom = [](double mean) {
    return static_cast<int>(std::ceil(mean + 9.0 * std::sqrt(mean + 1.0))) + 6;
  };
  const int dim_signal = std::max(12, headroom(mean_signal));
  const int dim_idler = std::max(fock::suggested_dim(alpha_mag),
                                 headroom(mean_idler));
  return {dim_signal, dim_idler};
}

std::vector<Complex> supermode_coefficients(int n_bins_half, double phi_g0) {
  if (n_bins_half < 0) throw DomainError("supermode_coefficients: N must be >= 0");
  const int count = 2 * n_bins_half + 1;
  const Complex c = std::polar(1.0 / std::sqrt(double(count)), -phi_g0);
  return std::vector<Complex>(static_cast<size_t>(count), c);
}

EvolutionResult evolve_two_units(Backend backend, InitialState choice,
                                 const EnbsParams& params,
                                 std::span<const double> t_grid,
                                 const StepControl& control) {
  if (backend == Backend::gaussian) {
    return gaussian_evolve(two_unit_initial_moments(choice, params), params, t_grid,
                           control);
  }

  const double gt = params.g_eff_mag * t_grid.back();
  auto run_unit = [&](int arm) {
    const Complex alpha = arm == 1 ? params.seed_1.value() : params.seed_2.value();
    const auto [ds, di] = suggested_unit_dims(std::abs(alpha), gt);
    const FockRegister init = unit_initial_register(choice, alpha, ds, di);
    return lindblad_evolve(init, params, t_grid, control, arm);
  };
  EvolutionResult r1 = run_unit(1);
  const EvolutionResult r2 = run_unit(2);

  for (size_t i = 0; i < r1.observables.size(); ++i) {
    auto& pt = r1.observables[i];
    pt.n_sig_2 = r2.observables[i].n_sig_1;
    r1.mean_signal_2[i] = r2.mean_signal_1[i];
    r1.cross_12[i] = std::conj(r1.mean_signal_1[i]) * r2.mean_signal_1[i];
    pt.rate_terms = {pt.n_sig_1 + pt.n_sig_2, std::abs(r1.cross_12[i])};
    r1.trace_error_t[i] = std::max(r1.trace_error_t[i], r2.trace_error_t[i]);
    r1.truncation_tail_t[i] =
        std::max(r1.truncation_tail_t[i], r2.truncation_tail_t[i]);
  }
  r1.diagnostics.trace_error =
      std::max(r1.diagnostics.trace_error, r2.diagnostics.trace_error);
  r1.diagnostics.hermiticity_error =
      std::max(r1.diagnostics.hermiticity_error, r2.diagnostics.hermiticity_error);
  r1.diagnostics.truncation_tail =
      std::max(r1.diagnostics.truncation_tail, r2.diagnostics.truncation_tail);
  r1.diagnostics.step_count += r2.diagnostics.step_count;
  return r1;
}

}  // namespace enbs::dynamics
