#pragma once

// Sparse assembly and factorisation of A = (-1)^alpha Lap^alpha with the same
// zero-extension stencil as polyharmonic().  A is symmetric positive definite;
// solve() maps an L2 gradient to its Sobolev representative.

#include <memory>

#include "polyhess/grid.hpp"

namespace polyhess {

class PolyharmonicSolver {
 public:
  PolyharmonicSolver(const BoxDomain& domain, int alpha);
  ~PolyharmonicSolver();
  PolyharmonicSolver(PolyharmonicSolver&&) noexcept;
  PolyharmonicSolver& operator=(PolyharmonicSolver&&) noexcept;

  const BoxDomain& domain() const;
  int alpha() const;
  /// (-1)^alpha polyharmonic(u, alpha), via the assembled matrix.
  ScalarField apply(const ScalarField& u) const;
  /// Solves A x = r.
  ScalarField solve(const ScalarField& r) const;
  /// cell volume * a^T A b, which equals the half_order inner product.
  double energy_inner(const ScalarField& a, const ScalarField& b) const;
  double energy_norm(const ScalarField& a) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace polyhess
