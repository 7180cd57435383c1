#include "enbs/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <unsupported/Eigen/KroneckerProduct>

namespace enbs::fock {

namespace {

Eigen::Index product_dim(const std::vector<int>& dims) {
  Eigen::Index d = 1;
  for (int m : dims) {
    if (m < 1) throw DimensionMismatchError("fock: mode dimension must be >= 1");
    d *= m;
  }
  return d;
}

/// stride of a mode = product of dimensions of all faster-varying modes.
std::vector<Eigen::Index> strides(const std::vector<int>& dims) {
  std::vector<Eigen::Index> s(dims.size(), 1);
  for (int m = static_cast<int>(dims.size()) - 2; m >= 0; --m)
    s[m] = s[m + 1] * dims[m + 1];
  return s;
}

}  // namespace

FockRegister FockRegister::pure(std::vector<int> mode_dims, Vector amplitudes,
                                double truncation_tail) {
  if (amplitudes.size() != product_dim(mode_dims))
    throw DimensionMismatchError("fock: amplitude vector does not match mode dims");
  FockRegister r;
  r.dims_ = std::move(mode_dims);
  r.is_density_ = false;
  r.vec_ = std::move(amplitudes);
  r.tail_ = truncation_tail;
  return r;
}

FockRegister FockRegister::density(std::vector<int> mode_dims, Matrix rho,
                                   double truncation_tail) {
  const Eigen::Index d = product_dim(mode_dims);
  if (rho.rows() != d || rho.cols() != d)
    throw DimensionMismatchError("fock: density matrix does not match mode dims");
  FockRegister r;
  r.dims_ = std::move(mode_dims);
  r.is_density_ = true;
  r.mat_ = std::move(rho);
  r.tail_ = truncation_tail;
  return r;
}

Eigen::Index FockRegister::dim() const { return product_dim(dims_); }

const Vector& FockRegister::amplitudes() const {
  if (is_density_) throw DimensionMismatchError("fock: register is a density operator");
  return vec_;
}

const Matrix& FockRegister::rho() const {
  if (!is_density_) throw DimensionMismatchError("fock: register is a pure state");
  return mat_;
}

double FockRegister::norm() const {
  return is_density_ ? mat_.trace().real() : vec_.norm();
}

FockRegister FockRegister::to_density() const {
  if (is_density_) return *this;
  return density(dims_, vec_ * vec_.adjoint(), tail_);
}

Eigen::Index FockRegister::flat_index(const std::vector<int>& occupation) const {
  if (occupation.size() != dims_.size())
    throw DimensionMismatchError("fock: occupation tuple has wrong length");
  Eigen::Index idx = 0;
  for (size_t m = 0; m < dims_.size(); ++m) {
    if (occupation[m] < 0 || occupation[m] >= dims_[m])
      throw DimensionMismatchError("fock: occupation out of range");
    idx = idx * dims_[m] + occupation[m];
  }
  return idx;
}

Sparse annihilation_matrix(int dim) {
  Sparse a(dim, dim);
  a.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (int n = 1; n < dim; ++n) a.insert(n - 1, n) = std::sqrt(double(n));
  a.makeCompressed();
  return a;
}

Sparse creation_matrix(int dim) {
  Sparse c = annihilation_matrix(dim).adjoint();
  c.makeCompressed();
  return c;
}

Sparse number_matrix(int dim) {
  Sparse n(dim, dim);
  n.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (int k = 1; k < dim; ++k) n.insert(k, k) = double(k);
  n.makeCompressed();
  return n;
}

Sparse identity_matrix(int dim) {
  Sparse id(dim, dim);
  id.setIdentity();
  return id;
}

ModeOperator annihilation(int mode_index, int dim) {
  return ModeOperator{mode_index, annihilation_matrix(dim)};
}

ModeOperator creation(int mode_index, int dim) {
  return ModeOperator{mode_index, creation_matrix(dim)};
}

int suggested_dim(double alpha_mag) {
  return static_cast<int>(std::ceil(alpha_mag * alpha_mag + 8.0 * alpha_mag + 10.0));
}

FockRegister coherent_state(Complex alpha, int dim, double tail_bound) {
  if (dim < 2) throw DimensionMismatchError("coherent_state: dim must be >= 2");
  Vector c(dim);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
  const double kept = c.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept);
  if (tail > tail_bound)
    throw TruncationError("coherent_state: truncation tail " + std::to_string(tail) +
                          " exceeds bound");
  c /= std::sqrt(kept);
  return FockRegister::pure({dim}, std::move(c), tail);
}

FockRegister spacs(Complex alpha, int dim, double tail_bound) {
  if (dim < 3) throw DimensionMismatchError("spacs: dim must be >= 3");
  // Unnormalized amplitudes of a^dag |alpha> built from the exact coherent
  // series, so the lost weight is accounted against the exact norm
  // 1 + |alpha|^2.
  Vector coh(dim);
  coh[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) coh[n] = coh[n - 1] * alpha / std::sqrt(double(n));
  Vector added = Vector::Zero(dim);
  for (int n = 1; n < dim; ++n) added[n] = std::sqrt(double(n)) * coh[n - 1];
  const double exact_norm_sq = 1.0 + std::norm(alpha);
  const double kept = added.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept / exact_norm_sq);
  if (tail > tail_bound)
    throw TruncationError("spacs: truncation tail " + std::to_string(tail) +
                          " exceeds bound");
  added /= std::sqrt(kept);
  return FockRegister::pure({dim}, std::move(added), tail);
}

FockRegister vacuum_state(int dim) { return fock_basis_state(0, dim); }

FockRegister fock_basis_state(int n, int dim) {
  if (n < 0 || n >= dim) throw DimensionMismatchError("fock_basis_state: n out of range");
  Vector v = Vector::Zero(dim);
  v[n] = 1.0;
  return FockRegister::pure({dim}, std::move(v), 0.0);
}

FockRegister tensor(const std::vector<FockRegister>& regs) {
  if (regs.empty()) throw DimensionMismatchError("tensor: empty register list");
  const bool density = regs.front().is_density();
  for (const auto& r : regs)
    if (r.is_density() != density)
      throw MixedRepresentationError("tensor: mixed pure/density inputs");

  std::vector<int> dims;
  double tail = 0.0;
  for (const auto& r : regs) {
    dims.insert(dims.end(), r.mode_dims().begin(), r.mode_dims().end());
    tail += r.truncation_tail();
  }

  if (!density) {
    Vector acc = regs.front().amplitudes();
    for (size_t k = 1; k < regs.size(); ++k) {
      Vector next(acc.size() * regs[k].amplitudes().size());
      Eigen::Index i = 0;
      for (Eigen::Index a = 0; a < acc.size(); ++a)
        for (Eigen::Index b = 0; b < regs[k].amplitudes().size(); ++b)
          next[i++] = acc[a] * regs[k].amplitudes()[b];
      acc = std::move(next);
    }
    return FockRegister::pure(std::move(dims), std::move(acc), tail);
  }

  Matrix acc = regs.front().rho();
  for (size_t k = 1; k < regs.size(); ++k)
    acc = Eigen::kroneckerProduct(acc, regs[k].rho()).eval();
  return FockRegister::density(std::move(dims), std::move(acc), tail);
}

FockRegister superpose(const std::vector<Complex>& coeffs,
                       const std::vector<FockRegister>& regs) {
  if (coeffs.size() != regs.size() || regs.empty())
    throw DimensionMismatchError("superpose: coefficient/register count mismatch");
  const auto& dims = regs.front().mode_dims();
  double tail = 0.0;
  Vector acc = Vector::Zero(regs.front().dim());
  for (size_t k = 0; k < regs.size(); ++k) {
    if (regs[k].is_density())
      throw MixedRepresentationError("superpose: density register");
    if (regs[k].mode_dims() != dims)
      throw DimensionMismatchError("superpose: incompatible dims");
    acc += coeffs[k] * regs[k].amplitudes();
    tail += regs[k].truncation_tail();
  }
  return FockRegister::pure(dims, std::move(acc), tail);
}

FockRegister normalized(const FockRegister& reg) {
  if (reg.is_density()) {
    Matrix m = reg.rho() / reg.rho().trace().real();
    return FockRegister::density(reg.mode_dims(), std::move(m), reg.truncation_tail());
  }
  Vector v = reg.amplitudes() / reg.amplitudes().norm();
  return FockRegister::pure(reg.mode_dims(), std::move(v), reg.truncation_tail());
}

Complex overlap(const FockRegister& bra, const FockRegister& ket) {
  if (bra.is_density() || ket.is_density())
    throw MixedRepresentationError("overlap: pure states required");
  if (bra.mode_dims() != ket.mode_dims())
    throw DimensionMismatchError("overlap: incompatible dims");
  return bra.amplitudes().dot(ket.amplitudes());
}

Sparse embed(const ModeOperator& op, const std::vector<int>& dims, EmbedPath path) {
  const int modes = static_cast<int>(dims.size());
  if (op.mode_index < 0 || op.mode_index >= modes)
    throw DimensionMismatchError("embed: mode index out of range");
  if (op.matrix.rows() != dims[op.mode_index] || op.matrix.cols() != dims[op.mode_index])
    throw DimensionMismatchError("embed: operator does not match mode dimension");

  if (path == EmbedPath::automatic)
    path = modes <= 2 ? EmbedPath::dense : EmbedPath::sparse;

  if (path == EmbedPath::dense) {
    Matrix acc = Matrix::Identity(1, 1);
    for (int m = 0; m < modes; ++m) {
      Matrix factor = (m == op.mode_index) ? Matrix(op.matrix)
                                           : Matrix(Matrix::Identity(dims[m], dims[m]));
      acc = Eigen::kroneckerProduct(acc, factor).eval();
    }
    return acc.sparseView();
  }

  Sparse acc = identity_matrix(1);
  for (int m = 0; m < modes; ++m) {
    Sparse factor = (m == op.mode_index) ? op.matrix : identity_matrix(dims[m]);
    acc = Eigen::kroneckerProduct(acc, factor).eval();
  }
  acc.makeCompressed();
  return acc;
}

FockRegister apply(const FockRegister& reg, const ModeOperator& op, EmbedPath path) {
  Sparse full = embed(op, reg.mode_dims(), path);
  if (reg.is_density())
    return FockRegister::density(reg.mode_dims(), full * reg.rho(),
                                 reg.truncation_tail());
  return FockRegister::pure(reg.mode_dims(), full * reg.amplitudes(),
                            reg.truncation_tail());
}

Complex expectation(const FockRegister& reg,
                    const std::vector<ModeOperator>& op_product) {
  // Apply the ordered product right-to-left to the ket (or to rho from the
  // left), then close with <psi| / trace.
  if (reg.is_density()) {
    Matrix acc = reg.rho();
    for (auto it = op_product.rbegin(); it != op_product.rend(); ++it)
      acc = embed(*it, reg.mode_dims()) * acc;
    return acc.trace();
  }
  Vector ket = reg.amplitudes();
  for (auto it = op_product.rbegin(); it != op_product.rend(); ++it)
    ket = embed(*it, reg.mode_dims()) * ket;
  return reg.amplitudes().dot(ket);
}

FockRegister partial_trace(const FockRegister& reg,
                           const std::vector<int>& keep_modes) {
  const auto& dims = reg.mode_dims();
  const int modes = static_cast<int>(dims.size());
  std::vector<bool> keep(modes, false);
  for (int m : keep_modes) {
    if (m < 0 || m >= modes)
      throw DimensionMismatchError("partial_trace: keep mode out of range");
    if (keep[m]) throw DimensionMismatchError("partial_trace: duplicate keep mode");
    keep[m] = true;
  }

  std::vector<int> keep_dims, env_dims;
  std::vector<int> keep_list, env_list;
  for (int m = 0; m < modes; ++m) {
    if (keep[m]) {
      keep_dims.push_back(dims[m]);
      keep_list.push_back(m);
    } else {
      env_dims.push_back(dims[m]);
      env_list.push_back(m);
    }
  }
  if (keep_list.empty())
    throw DimensionMismatchError("partial_trace: must keep at least one mode");
  if (env_list.empty()) return reg.to_density();

  const Eigen::Index dk = product_dim(keep_dims);
  const Eigen::Index de = product_dim(env_dims);
  const auto st = strides(dims);

  // Flat full-register index of (keep multi-index k, env multi-index e).
  std::vector<Eigen::Index> keep_offset(dk), env_offset(de);
  for (Eigen::Index k = 0; k < dk; ++k) {
    Eigen::Index rem = k, off = 0;
    for (int m = static_cast<int>(keep_list.size()) - 1; m >= 0; --m) {
      off += (rem % keep_dims[m]) * st[keep_list[m]];
      rem /= keep_dims[m];
    }
    keep_offset[k] = off;
  }
  for (Eigen::Index e = 0; e < de; ++e) {
    Eigen::Index rem = e, off = 0;
    for (int m = static_cast<int>(env_list.size()) - 1; m >= 0; --m) {
      off += (rem % env_dims[m]) * st[env_list[m]];
      rem /= env_dims[m];
    }
    env_offset[e] = off;
  }

  Matrix out = Matrix::Zero(dk, dk);
  if (reg.is_density()) {
    const Matrix& rho = reg.rho();
    for (Eigen::Index i = 0; i < dk; ++i)
      for (Eigen::Index j = 0; j < dk; ++j) {
        Complex sum = 0.0;
        for (Eigen::Index e = 0; e < de; ++e)
          sum += rho(keep_offset[i] + env_offset[e], keep_offset[j] + env_offset[e]);
        out(i, j) = sum;
      }
  } else {
    // Tr_env |psi><psi| = M M^dag with M(k, e) = psi(k, e); never forms the
    // full outer product.
    const Vector& psi = reg.amplitudes();
    Matrix m(dk, de);
    for (Eigen::Index k = 0; k < dk; ++k)
      for (Eigen::Index e = 0; e < de; ++e)
        m(k, e) = psi[keep_offset[k] + env_offset[e]];
    out = m * m.adjoint();
  }
  return FockRegister::density(std::move(keep_dims), std::move(out),
                               reg.truncation_tail());
}

void dump_amplitudes_csv(const FockRegister& reg, std::ostream& os) {
  const auto& dims = reg.mode_dims();
  for (size_t m = 0; m < dims.size(); ++m) os << "n" << m << ",";
  os << "re,im\n";
  const Eigen::Index d = reg.dim();
  std::vector<int> occ(dims.size(), 0);
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index rem = i;
    for (int m = static_cast<int>(dims.size()) - 1; m >= 0; --m) {
      occ[m] = static_cast<int>(rem % dims[m]);
      rem /= dims[m];
    }
    Complex a = reg.is_density() ? reg.rho()(i, i) : reg.amplitudes()[i];
    for (int n : occ) os << n << ",";
    os << a.real() << "," << a.imag() << "\n";
  }
}

}  // namespace enbs::fock
