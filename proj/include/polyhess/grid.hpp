#pragma once

// Finite differences on a box with homogeneous clamped boundary conditions.
//
// A ScalarField holds values on the interior nodes x_i = (i + 1) h, i = 0..n-1, of
// each axis.  Every read outside the interior returns exactly zero; with a
// ghost width of alpha this encodes u = d_n u = ... = d_n^(alpha-1) u = 0 to
// discretisation order.
//
// Intermediate quantities such as Lap u are nonzero on a few layers of nodes
// outside the interior.  They live in an ExtendedField, which covers the
// interior plus `pad` layers on each side.  Keeping those layers is what makes
// the discrete quadratic form exact:
//
//     integrate(u * (-1)^alpha polyharmonic(u, alpha)) == seminorm(u, alpha)^2
//
// up to roundoff, for every alpha.  Even alpha uses Lap^(alpha/2) u; odd alpha
// uses forward differences of Lap^((alpha-1)/2) u, whose adjoint sum is the
// compact Laplacian.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polyhess/hessian_algebra.hpp"

namespace polyhess {

using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

struct BoxDomain {
  int dim = 2;
  std::array<int, 3> nodes{64, 64, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};

  static BoxDomain cube(int dim, int n, double extent = 1.0);

  double spacing(int axis) const { return extent[axis] / (nodes[axis] + 1); }
  double cell_volume() const;
  std::size_t size() const;
  /// Physical coordinate of interior index i along `axis`.
  double coord(int axis, int i) const { return (i + 1) * spacing(axis); }
  Point point(const Index& idx) const;
  std::size_t flat(const Index& idx) const;
  Index unflat(std::size_t flat) const;

  bool operator==(const BoxDomain& o) const;
};

/// dim in {2, 3}, n >= 8 on every active axis, positive extents.  Throws DomainError.
void validate(const BoxDomain& d);

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const BoxDomain& domain, int ghost_width);
  ScalarField(const BoxDomain& domain, int ghost_width, std::vector<double> values);

  const BoxDomain& domain() const { return domain_; }
  int ghost_width() const { return ghost_width_; }
  void set_ghost_width(int g) { ghost_width_ = g; }
  std::size_t size() const { return values_.size(); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Value at an integer node index; zero outside the interior.
  double at(const Index& idx) const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o);
  double max_abs() const;

 private:
  BoxDomain domain_;
  int ghost_width_ = 0;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Throws ContractError unless both fields live on the same grid.
void require_same_domain(const ScalarField& a, const ScalarField& b, const char* what);

/// Values on the interior plus `pad` ghost layers per active axis.
class ExtendedField {
 public:
  ExtendedField(const BoxDomain& domain, int pad);
  static ExtendedField from_interior(const ScalarField& u, int pad);

  const BoxDomain& domain() const { return domain_; }
  int pad() const { return pad_; }
  int lo(int axis) const { return axis < domain_.dim ? -pad_ : 0; }
  int hi(int axis) const { return domain_.nodes[axis] - 1 + (axis < domain_.dim ? pad_ : 0); }
  bool contains(const Index& idx) const;
  double get(const Index& idx) const;  // zero outside the stored range
  double& ref(const Index& idx);
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double sum_squares() const;
  ScalarField interior(int ghost_width) const;

  template <class F>
  void for_each(F&& fn) const {
    for (int i = lo(0); i <= hi(0); ++i)
      for (int j = lo(1); j <= hi(1); ++j)
        for (int l = lo(2); l <= hi(2); ++l) fn(Index{i, j, l});
  }

 private:
  std::size_t offset(const Index& idx) const;
  BoxDomain domain_;
  int pad_ = 0;
  std::array<int, 3> ext_{};
  std::vector<double> values_;
};

/// One symmetric matrix per interior node.
struct MatrixField {
  BoxDomain domain;
  std::vector<SymmetricMatrix> values;
};

template <class F>
void for_each_node(const BoxDomain& d, F&& fn) {
  std::size_t flat = 0;
  for (int i = 0; i < d.nodes[0]; ++i)
    for (int j = 0; j < d.nodes[1]; ++j)
      for (int l = 0; l < d.nodes[2]; ++l) fn(Index{i, j, l}, flat++);
}

/// Samples fn at interior nodes.
ScalarField sample(const BoxDomain& d, int ghost_width, const std::function<double(const Point&)>& fn);

// --- stencil operators -----------------------------------------------------

/// Compact (2N+1)-point Laplacian with zero extension, evaluated on the interior.
ScalarField laplacian(const ScalarField& u);
/// Laplacian of an extended field; the result carries one more ghost layer.
ExtendedField laplacian(const ExtendedField& u);
/// Lap^alpha u on the interior (sign (-1)^alpha NOT applied).  Requires ghost_width >= alpha.
ScalarField polyharmonic(const ScalarField& u, int alpha);
/// Centered first differences, one field per axis.
std::vector<ScalarField> gradient(const ScalarField& u);
/// Adjoint of `gradient`: returns g with sum_p g_p u_p = sum_m sum_i v_i(m) (D_i u)(m).
ScalarField gradient_transpose(const std::vector<ScalarField>& v);
/// Discrete Hessian: compact second differences on the diagonal, 4-point cross stencil off it.
MatrixField hessian(const ScalarField& u);
/// Adjoint of `hessian` under the full contraction sum_ab P_ab H_ab.
ScalarField hessian_transpose(const MatrixField& p);
/// Pointwise sigma_k of the discrete Hessian.
ScalarField sk_field(const ScalarField& u, int k);

struct HalfOrder {
  bool is_vector = false;
  std::vector<ExtendedField> components;
  double norm_squared() const;  // cell volume times the sum of squares over every component
};

/// Lap^(alpha/2) u for even alpha, grad Lap^((alpha-1)/2) u (forward differences) for odd.
/// Requires ghost_width >= ceil(alpha/2).
HalfOrder half_order(const ScalarField& u, int alpha);
/// Discrete W^{alpha,2}_0 seminorm ||half_order(u, alpha)||_2.
double seminorm(const ScalarField& u, int alpha);

/// Midpoint quadrature: cell volume times the sum of interior values.
double integrate(const ScalarField& u);
/// integrate(a * b)
double inner(const ScalarField& a, const ScalarField& b);
/// sqrt(integrate(u^2))
double l2_norm(const ScalarField& u);

/// amplitude * (-1)^(sign_exponent+1) * exp(-1 / (1 - s^2)) with s = |x - center| / radius.
/// Throws DomainError unless the ball lies strictly inside the box.
ScalarField bump_field(const BoxDomain& d, const Point& center, double radius, double amplitude,
                       int sign_exponent, int ghost_width);

}  // namespace polyhess
