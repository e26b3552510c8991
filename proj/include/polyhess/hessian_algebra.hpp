#pragma once

// Pointwise algebra of the k-Hessian.
//
// For a symmetric N x N matrix A with eigenvalues L_1..L_N, sigma_k is the k-th
// elementary symmetric polynomial of the L_i, which equals the sum of all k x k
// principal minors of A.  sk_partials returns the matrix S with
//
//     S_ij = d sigma_k / d a_ij,
//
// where a_ij and a_ji are treated as independent entries.  With that convention
// S is the sum over principal k-subsets of the cofactor matrices, and
// sum_ij a_ij S_ij = k sigma_k.  A joint symmetric perturbation of a_ij and a_ji
// by eps changes sigma_k by 2 eps S_ij for i != j, so a finite-difference check
// that perturbs both entries must halve the off-diagonal quotient.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace polyhess {

inline constexpr int kMaxMatrixDim = 8;

/// Dense real symmetric matrix of dimension 1..8 stored inline (no heap).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  /// Zero matrix of the given dimension.
  explicit SymmetricMatrix(int dim);
  /// From row-major entries; throws DomainError unless exactly symmetric.
  SymmetricMatrix(int dim, std::span<const double> row_major);
  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymmetricMatrix identity(int dim);
  static SymmetricMatrix diagonal(std::span<const double> diag);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[i * kMaxMatrixDim + j]; }
  /// Sets a_ij and a_ji together.
  void set(int i, int j, double v) {
    a_[i * kMaxMatrixDim + j] = v;
    a_[j * kMaxMatrixDim + i] = v;
  }
  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  SymmetricMatrix operator+(const SymmetricMatrix& o) const;
  SymmetricMatrix operator-(const SymmetricMatrix& o) const;
  SymmetricMatrix operator*(double s) const;
  /// Frobenius norm.
  double norm() const;
  /// sum_ij a_ij b_ij.
  double contract(const SymmetricMatrix& o) const;

 private:
  int dim_ = 0;
  std::array<double, kMaxMatrixDim * kMaxMatrixDim> a_{};
};

using EigenvalueVector = std::vector<double>;

/// k-th elementary symmetric polynomial; sigma_0 = 1.  Throws DomainError if k > N or k < 0.
double sigma_k(std::span<const double> lambda, int k);

/// Sum of the k x k principal minors of A.
double sk_of_matrix(const SymmetricMatrix& a, int k);

/// S_ij = d sigma_k(A) / d a_ij (independent-entry convention, see header comment).  1 <= k <= N.
SymmetricMatrix sk_partials(const SymmetricMatrix& a, int k);

/// d/de sk_partials(A + e M, k) at e = 0.  Equivalently the gradient with respect to A of
/// sum_ij M_ij S_ij(A).  Exact for the polynomial entries (no truncation error).
SymmetricMatrix sk_partials_derivative(const SymmetricMatrix& a, const SymmetricMatrix& m, int k);

/// Both sides of sigma_k(A - mu I) = sum_i C(N-i, k-i) sigma_i(A) (-mu)^(k-i).
std::pair<double, double> shifted_trace_identity(const SymmetricMatrix& a, double mu, int k);

/// Determinant of a small dense matrix given row-major (n <= 8).
double small_determinant(std::span<const double> row_major, int n);

/// Binomial coefficient as a double (exact for the small arguments used here).
double binomial(int n, int r);

}  // namespace polyhess
