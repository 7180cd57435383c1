#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "enbs/errors.hpp"

namespace enbs::fock {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Sparse = Eigen::SparseMatrix<Complex>;

/// Truncated multi-mode bosonic state. Mode 0 is the slowest-varying tensor
/// index: the flat index of occupation (n_0, ..., n_{M-1}) is
/// ((n_0 * d_1 + n_1) * d_2 + n_2) * ... . Registers are immutable values;
/// operator application returns new registers.
class FockRegister {
 public:
  static FockRegister pure(std::vector<int> mode_dims, Vector amplitudes,
                           double truncation_tail = 0.0);
  static FockRegister density(std::vector<int> mode_dims, Matrix rho,
                              double truncation_tail = 0.0);

  bool is_density() const { return is_density_; }
  int mode_count() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& mode_dims() const { return dims_; }
  Eigen::Index dim() const;

  const Vector& amplitudes() const;
  const Matrix& rho() const;

  /// Probability weight lost to truncation when the state was constructed.
  double truncation_tail() const { return tail_; }

  /// Vector 2-norm for pure states, trace (real part) for densities.
  double norm() const;

  FockRegister to_density() const;

  /// Flat index of a joint occupation-number tuple.
  Eigen::Index flat_index(const std::vector<int>& occupation) const;

 private:
  FockRegister() = default;
  std::vector<int> dims_;
  bool is_density_ = false;
  Vector vec_;
  Matrix mat_;
  double tail_ = 0.0;
};

/// <n-1| a |n> = sqrt(n), zero elsewhere.
Sparse annihilation_matrix(int dim);
Sparse creation_matrix(int dim);
Sparse number_matrix(int dim);
Sparse identity_matrix(int dim);

/// A single-mode operator tagged with the register mode it acts on.
struct ModeOperator {
  int mode_index = 0;
  Sparse matrix;
};

ModeOperator annihilation(int mode_index, int dim);
ModeOperator creation(int mode_index, int dim);

/// Per-mode truncation dimension that keeps coherent tails below ~1e-10 for
/// |alpha| <= 5.
int suggested_dim(double alpha_mag);

/// Coherent state |alpha> with amplitudes c_n = e^{-|a|^2/2} a^n / sqrt(n!),
/// renormalized after truncation. Throws TruncationError when the discarded
/// tail exceeds tail_bound.
FockRegister coherent_state(Complex alpha, int dim, double tail_bound = 1e-10);

/// Single-photon-added coherent state a^dag|alpha> / sqrt(1+|alpha|^2).
FockRegister spacs(Complex alpha, int dim, double tail_bound = 1e-10);

FockRegister vacuum_state(int dim);
FockRegister fock_basis_state(int n, int dim);

/// Kronecker composite of registers (all pure or all density).
FockRegister tensor(const std::vector<FockRegister>& regs);

/// Linear combination of pure registers with identical dims (state assembly
/// for superposition constructions). Does not normalize.
FockRegister superpose(const std::vector<Complex>& coeffs,
                       const std::vector<FockRegister>& regs);

/// Normalized copy of a pure register.
FockRegister normalized(const FockRegister& reg);

/// <bra|ket> for pure registers of identical dims.
Complex overlap(const FockRegister& bra, const FockRegister& ket);

/// <psi| O_1 O_2 ... O_k |psi> or Tr(rho O_1 ... O_k) for the ordered
/// operator product.
Complex expectation(const FockRegister& reg,
                    const std::vector<ModeOperator>& op_product);

/// Reduced state over keep_modes (ascending order preserved). Pure inputs are
/// traced without materializing the full outer product.
FockRegister partial_trace(const FockRegister& reg,
                           const std::vector<int>& keep_modes);

/// Embed a single-mode operator into the full register space. Registers with
/// at most two modes take a dense Kronecker path, larger ones a sparse one;
/// results are identical and the choice can be forced for testing.
enum class EmbedPath { automatic, dense, sparse };
Sparse embed(const ModeOperator& op, const std::vector<int>& dims,
             EmbedPath path = EmbedPath::automatic);

/// Apply an embedded single-mode operator: O|psi> or O*rho (left side).
FockRegister apply(const FockRegister& reg, const ModeOperator& op,
                   EmbedPath path = EmbedPath::automatic);

/// Debugging dump: one row per basis state, columns are the occupation
/// indices followed by the amplitude's real and imaginary parts.
void dump_amplitudes_csv(const FockRegister& reg, std::ostream& os);

}  // namespace enbs::fock
