#pragma once

// Test-side reference computations, written independently of the library code.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Elementary symmetric polynomial by enumerating k-subsets with a bitmask.
inline double esym_subsets(const std::vector<double>& x, int k) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<unsigned>(k)) continue;
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) p *= x[i];
    total += p;
  }
  return total;
}

inline std::vector<double> eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + a.rows()};
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
  return a;
}

/// Sum of k x k principal minors via Eigen determinants.
inline double principal_minor_sum(const Eigen::MatrixXd& a, int k) {
  const int n = static_cast<int>(a.rows());
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<unsigned>(k)) continue;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    Eigen::MatrixXd m(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) m(r, c) = a(idx[r], idx[c]);
    total += k == 0 ? 1.0 : m.determinant();
  }
  return total;
}

inline long long gcd_ll(long long a, long long b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a < 0 ? -a : a;
}

/// ceil(p / q) for q > 0 in plain integer arithmetic.
inline long long ceil_div(long long p, long long q) { return p >= 0 ? (p + q - 1) / q : -((-p) / q); }

/// "p/q" in lowest terms.
inline std::string reduced(long long p, long long q) {
  const long long g = gcd_ll(p, q);
  return std::to_string(p / g) + "/" + std::to_string(q / g);
}

// Integer-only reference values for the alpha formulas.
inline long long alpha_weak(long long N, long long k) { return ceil_div(N * k - N + 4 * k, 2 * k + 2); }

inline long long alpha_main(long long N, long long k) {
  if (2 * k > N) return ceil_div(4 * k + (k - 2) * N, 2 * k);
  if (2 * k == N) return N / 2;
  return alpha_weak(N, k);
}

inline long long alpha_summable(long long N, long long k) {
  return k <= (2 * N) / 3 ? ceil_div(N + 1, 2) : ceil_div(N + 2, 2);
}

}  // namespace oracle
