#include "polyhess/riesz.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "polyhess/errors.hpp"

namespace polyhess {

struct PolyharmonicSolver::Impl {
  BoxDomain domain;
  int alpha = 0;
  Eigen::SparseMatrix<double> a;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

namespace {

struct StencilEntry {
  Index offset;
  double weight;
};

// Impulse response of Lap^alpha with the domain's spacing, signed by (-1)^alpha.
std::vector<StencilEntry> polyharmonic_stencil(const BoxDomain& d, int alpha) {
  BoxDomain probe = d;
  for (int a = 0; a < d.dim; ++a) {
    probe.nodes[a] = 1;
    probe.extent[a] = 2.0 * d.spacing(a);
  }
  ExtendedField e(probe, 0);
  e.ref(Index{0, 0, 0}) = 1.0;
  for (int i = 0; i < alpha; ++i) e = laplacian(e);
  const double sign = alpha % 2 == 0 ? 1.0 : -1.0;
  std::vector<StencilEntry> out;
  e.for_each([&](const Index& idx) {
    const double w = e.get(idx);
    if (w != 0.0) out.push_back({idx, sign * w});
  });
  return out;
}

Eigen::Map<const Eigen::VectorXd> view(const ScalarField& u) {
  return {u.values().data(), static_cast<Eigen::Index>(u.size())};
}

}  // namespace

PolyharmonicSolver::PolyharmonicSolver(const BoxDomain& domain, int alpha) : impl_(std::make_unique<Impl>()) {
  validate(domain);
  if (alpha < 1) throw ContractError("PolyharmonicSolver: alpha must be positive");
  impl_->domain = domain;
  impl_->alpha = alpha;
  const auto stencil = polyharmonic_stencil(domain, alpha);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(domain.size() * stencil.size());
  for_each_node(domain, [&](const Index& idx, std::size_t row) {
    for (const auto& s : stencil) {
      Index j{idx[0] + s.offset[0], idx[1] + s.offset[1], idx[2] + s.offset[2]};
      bool inside = true;
      for (int a = 0; a < 3; ++a) inside = inside && j[a] >= 0 && j[a] < domain.nodes[a];
      if (inside) triplets.emplace_back(static_cast<int>(row), static_cast<int>(domain.flat(j)), s.weight);
    }
  });
  const auto n = static_cast<Eigen::Index>(domain.size());
  impl_->a.resize(n, n);
  impl_->a.setFromTriplets(triplets.begin(), triplets.end());
  impl_->ldlt.compute(impl_->a);
  if (impl_->ldlt.info() != Eigen::Success) throw ContractError("polyharmonic factorisation failed");
}

PolyharmonicSolver::~PolyharmonicSolver() = default;
PolyharmonicSolver::PolyharmonicSolver(PolyharmonicSolver&&) noexcept = default;
PolyharmonicSolver& PolyharmonicSolver::operator=(PolyharmonicSolver&&) noexcept = default;

const BoxDomain& PolyharmonicSolver::domain() const { return impl_->domain; }
int PolyharmonicSolver::alpha() const { return impl_->alpha; }

ScalarField PolyharmonicSolver::apply(const ScalarField& u) const {
  if (!(u.domain() == impl_->domain)) throw ContractError("PolyharmonicSolver::apply: grid mismatch");
  Eigen::VectorXd r = impl_->a * view(u);
  return ScalarField(u.domain(), u.ghost_width(), std::vector<double>(r.data(), r.data() + r.size()));
}

ScalarField PolyharmonicSolver::solve(const ScalarField& r) const {
  if (!(r.domain() == impl_->domain)) throw ContractError("PolyharmonicSolver::solve: grid mismatch");
  Eigen::VectorXd x = impl_->ldlt.solve(view(r));
  return ScalarField(r.domain(), impl_->alpha, std::vector<double>(x.data(), x.data() + x.size()));
}

double PolyharmonicSolver::energy_inner(const ScalarField& a, const ScalarField& b) const {
  return impl_->domain.cell_volume() * view(a).dot(impl_->a * view(b));
}

double PolyharmonicSolver::energy_norm(const ScalarField& a) const {
  return std::sqrt(std::max(0.0, energy_inner(a, a)));
}

}  // namespace polyhess
