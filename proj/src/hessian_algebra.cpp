#include "polyhess/hessian_algebra.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "polyhess/errors.hpp"

namespace polyhess {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxMatrixDim) {
    throw DomainError("matrix dimension must be in 1.." + std::to_string(kMaxMatrixDim) +
                      ", got " + std::to_string(dim));
  }
}

void check_order(int k, int lo, int n) {
  if (k < lo || k > n) {
    throw DomainError("k-Hessian order " + std::to_string(k) + " outside " + std::to_string(lo) +
                      ".." + std::to_string(n));
  }
}

// Cofactor (Laplace) expansion along the first row; used for n <= 4.
double laplace_det(const double* m, int n, int stride) {
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return m[0];
    case 2:
      return m[0] * m[stride + 1] - m[1] * m[stride];
    case 3: {
      const double* r0 = m;
      const double* r1 = m + stride;
      const double* r2 = m + 2 * stride;
      return r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0]) +
             r0[2] * (r1[0] * r2[1] - r1[1] * r2[0]);
    }
    default: {
      double minor[9];
      double det = 0.0;
      for (int c = 0; c < n; ++c) {
        int idx = 0;
        for (int r = 1; r < n; ++r) {
          for (int cc = 0; cc < n; ++cc) {
            if (cc != c) minor[idx++] = m[r * stride + cc];
          }
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        det += sign * m[c] * laplace_det(minor, n - 1, n - 1);
      }
      return det;
    }
  }
}

double lu_det(const double* m, int n, int stride) {
  double a[kMaxMatrixDim * kMaxMatrixDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i * n + j] = m[i * stride + j];
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      det = -det;
    }
    const double p = a[c * n + c];
    det *= p;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / p;
      for (int j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

double det_strided(const double* m, int n, int stride) {
  return n <= 4 ? laplace_det(m, n, stride) : lu_det(m, n, stride);
}

// Gathers the principal submatrix of `a` on the index set encoded by `mask`.
int gather(const SymmetricMatrix& a, unsigned mask, int* idx, double* sub) {
  int k = 0;
  for (int i = 0; i < a.dim(); ++i)
    if (mask & (1u << i)) idx[k++] = i;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) sub[p * k + q] = a(idx[p], idx[q]);
  return k;
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(int dim) : dim_(dim) { check_dim(dim); }

SymmetricMatrix::SymmetricMatrix(int dim, std::span<const double> row_major) : dim_(dim) {
  check_dim(dim);
  if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
    throw DomainError("expected " + std::to_string(dim * dim) + " entries");
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (row_major[i * dim + j] != row_major[j * dim + i]) {
        throw DomainError("matrix is not symmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      }
      a_[i * kMaxMatrixDim + j] = row_major[i * dim + j];
    }
  }
}

SymmetricMatrix::SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n) throw DomainError("matrix rows must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  *this = SymmetricMatrix(n, flat);
}

SymmetricMatrix SymmetricMatrix::identity(int dim) {
  SymmetricMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
  SymmetricMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, diag[i]);
  return m;
}

SymmetricMatrix SymmetricMatrix::operator+(const SymmetricMatrix& o) const {
  SymmetricMatrix r(*this);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r.a_[i * kMaxMatrixDim + j] += o(i, j);
  return r;
}

SymmetricMatrix SymmetricMatrix::operator-(const SymmetricMatrix& o) const { return *this + o * -1.0; }

SymmetricMatrix SymmetricMatrix::operator*(double s) const {
  SymmetricMatrix r(*this);
  for (auto& v : r.a_) v *= s;
  return r;
}

double SymmetricMatrix::norm() const { return std::sqrt(contract(*this)); }

double SymmetricMatrix::contract(const SymmetricMatrix& o) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * o(i, j);
  return s;
}

double sigma_k(std::span<const double> lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  check_order(k, 0, n);
  // Coefficients of prod_i (1 + lambda_i t), truncated at degree k.
  std::array<double, 64> e{};
  std::vector<double> big;
  double* c = e.data();
  if (k + 1 > static_cast<int>(e.size())) {
    big.assign(k + 1, 0.0);
    c = big.data();
  }
  c[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::min(i + 1, k); j >= 1; --j) c[j] += lambda[i] * c[j - 1];
  }
  return c[k];
}

double small_determinant(std::span<const double> row_major, int n) {
  if (n < 0 || n > kMaxMatrixDim || row_major.size() < static_cast<std::size_t>(n * n)) {
    throw DomainError("small_determinant: bad size");
  }
  return det_strided(row_major.data(), n, n);
}

double sk_of_matrix(const SymmetricMatrix& a, int k) {
  const int n = a.dim();
  check_order(k, 0, n);
  if (k == 0) return 1.0;
  int idx[kMaxMatrixDim];
  double sub[kMaxMatrixDim * kMaxMatrixDim];
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    gather(a, mask, idx, sub);
    sum += det_strided(sub, k, k);
  }
  return sum;
}

SymmetricMatrix sk_partials(const SymmetricMatrix& a, int k) {
  const int n = a.dim();
  check_order(k, 1, n);
  SymmetricMatrix s(n);
  int idx[kMaxMatrixDim];
  double sub[kMaxMatrixDim * kMaxMatrixDim];
  double minor[kMaxMatrixDim * kMaxMatrixDim];
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    gather(a, mask, idx, sub);
    // Cofactor matrix of the k x k principal block; symmetric because the block is.
    for (int p = 0; p < k; ++p) {
      for (int q = p; q < k; ++q) {
        int m = 0;
        for (int r = 0; r < k; ++r) {
          if (r == p) continue;
          for (int c = 0; c < k; ++c) {
            if (c == q) continue;
            minor[m++] = sub[r * k + c];
          }
        }
        const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
        const double cof = sign * det_strided(minor, k - 1, k - 1);
        s.add(idx[p], idx[q], cof);
      }
    }
  }
  return s;
}

SymmetricMatrix sk_partials_derivative(const SymmetricMatrix& a, const SymmetricMatrix& m, int k) {
  const int n = a.dim();
  check_order(k, 1, n);
  if (m.dim() != n) throw DomainError("sk_partials_derivative: dimension mismatch");
  const double mnorm = m.norm();
  if (mnorm == 0.0 || k == 1) return SymmetricMatrix(n);
  // Entries of sk_partials(A + eM) are polynomials of degree k-1 in e, so the
  // central difference of order 2p with 2p >= k-1 recovers the derivative exactly.
  static constexpr double kWeights[4][4] = {
      {1.0 / 2.0, 0, 0, 0},
      {2.0 / 3.0, -1.0 / 12.0, 0, 0},
      {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0, 0},
      {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0},
  };
  const int p = std::max(1, k / 2);
  const double anorm = a.norm();
  const double step = (anorm > 0.0 ? anorm : 1.0) / mnorm;
  SymmetricMatrix d(n);
  for (int j = 1; j <= p; ++j) {
    const SymmetricMatrix plus = sk_partials(a + m * (j * step), k);
    const SymmetricMatrix minus = sk_partials(a - m * (j * step), k);
    d = d + (plus - minus) * (kWeights[p - 1][j - 1] / step);
  }
  return d;
}

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return std::round(b);
}

std::pair<double, double> shifted_trace_identity(const SymmetricMatrix& a, double mu, int k) {
  const int n = a.dim();
  check_order(k, 0, n);
  const double lhs = sk_of_matrix(a - SymmetricMatrix::identity(n) * mu, k);
  double rhs = 0.0;
  for (int i = 0; i <= k; ++i) {
    rhs += binomial(n - i, k - i) * sk_of_matrix(a, i) * std::pow(-mu, k - i);
  }
  return {lhs, rhs};
}

}  // namespace polyhess
