#include "polyhess/grid.hpp"

#include <cmath>
#include <string>

#include "polyhess/errors.hpp"

namespace polyhess {

namespace {

Index shifted(Index idx, int axis, int by) {
  idx[axis] += by;
  return idx;
}

}  // namespace

// --- BoxDomain --------------------------------------------------------------

BoxDomain BoxDomain::cube(int dim, int n, double extent) {
  BoxDomain d;
  d.dim = dim;
  for (int a = 0; a < 3; ++a) {
    d.nodes[a] = a < dim ? n : 1;
    d.extent[a] = extent;
  }
  validate(d);
  return d;
}

double BoxDomain::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

std::size_t BoxDomain::size() const {
  return static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2];
}

Point BoxDomain::point(const Index& idx) const {
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) p[a] = coord(a, idx[a]);
  return p;
}

std::size_t BoxDomain::flat(const Index& idx) const {
  return (static_cast<std::size_t>(idx[0]) * nodes[1] + idx[1]) * nodes[2] + idx[2];
}

Index BoxDomain::unflat(std::size_t f) const {
  Index idx{};
  idx[2] = static_cast<int>(f % nodes[2]);
  f /= nodes[2];
  idx[1] = static_cast<int>(f % nodes[1]);
  idx[0] = static_cast<int>(f / nodes[1]);
  return idx;
}

bool BoxDomain::operator==(const BoxDomain& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < 3; ++a) {
    if (nodes[a] != o.nodes[a]) return false;
    if (a < dim && extent[a] != o.extent[a]) return false;
  }
  return true;
}

void validate(const BoxDomain& d) {
  if (d.dim != 2 && d.dim != 3) throw DomainError("grid dimension must be 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a < d.dim) {
      if (d.nodes[a] < 8) throw DomainError("need at least 8 interior nodes per axis");
      if (!(d.extent[a] > 0.0)) throw DomainError("box extent must be positive");
    } else if (d.nodes[a] != 1) {
      throw DomainError("inactive axes must carry a single node");
    }
  }
}

// --- ScalarField ------------------------------------------------------------

ScalarField::ScalarField(const BoxDomain& domain, int ghost_width)
    : domain_(domain), ghost_width_(ghost_width), values_(domain.size(), 0.0) {}

ScalarField::ScalarField(const BoxDomain& domain, int ghost_width, std::vector<double> values)
    : domain_(domain), ghost_width_(ghost_width), values_(std::move(values)) {
  if (values_.size() != domain_.size()) {
    throw ContractError("field has " + std::to_string(values_.size()) + " values, grid has " +
                        std::to_string(domain_.size()) + " nodes");
  }
}

double ScalarField::at(const Index& idx) const {
  for (int a = 0; a < 3; ++a)
    if (idx[a] < 0 || idx[a] >= domain_.nodes[a]) return 0.0;
  return values_[domain_.flat(idx)];
}

void require_same_domain(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.domain() == b.domain())) throw ContractError(std::string(what) + ": fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return axpy(1.0, o); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return axpy(-1.0, o); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
  require_same_domain(*this, o, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
  return *this;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_domain(a, b, "hadamard");
  ScalarField r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= b[i];
  return r;
}

ScalarField sample(const BoxDomain& d, int ghost_width, const std::function<double(const Point&)>& fn) {
  ScalarField u(d, ghost_width);
  for_each_node(d, [&](const Index& idx, std::size_t f) { u[f] = fn(d.point(idx)); });
  return u;
}

// --- ExtendedField ----------------------------------------------------------

ExtendedField::ExtendedField(const BoxDomain& domain, int pad) : domain_(domain), pad_(pad) {
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    ext_[a] = hi(a) - lo(a) + 1;
    total *= ext_[a];
  }
  values_.assign(total, 0.0);
}

ExtendedField ExtendedField::from_interior(const ScalarField& u, int pad) {
  ExtendedField e(u.domain(), pad);
  for_each_node(u.domain(), [&](const Index& idx, std::size_t f) { e.ref(idx) = u[f]; });
  return e;
}

bool ExtendedField::contains(const Index& idx) const {
  for (int a = 0; a < 3; ++a)
    if (idx[a] < lo(a) || idx[a] > hi(a)) return false;
  return true;
}

std::size_t ExtendedField::offset(const Index& idx) const {
  return (static_cast<std::size_t>(idx[0] - lo(0)) * ext_[1] + (idx[1] - lo(1))) * ext_[2] +
         (idx[2] - lo(2));
}

double ExtendedField::get(const Index& idx) const { return contains(idx) ? values_[offset(idx)] : 0.0; }

double& ExtendedField::ref(const Index& idx) { return values_[offset(idx)]; }

double ExtendedField::sum_squares() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

ScalarField ExtendedField::interior(int ghost_width) const {
  ScalarField u(domain_, ghost_width);
  for_each_node(domain_, [&](const Index& idx, std::size_t f) { u[f] = values_[offset(idx)]; });
  return u;
}

// --- stencils ---------------------------------------------------------------

ExtendedField laplacian(const ExtendedField& u) {
  const BoxDomain& d = u.domain();
  ExtendedField out(d, u.pad() + 1);
  double inv_h2[3];
  for (int a = 0; a < d.dim; ++a) inv_h2[a] = 1.0 / (d.spacing(a) * d.spacing(a));
  out.for_each([&](const Index& idx) {
    const double c = u.get(idx);
    double s = 0.0;
    for (int a = 0; a < d.dim; ++a)
      s += (u.get(shifted(idx, a, 1)) - 2.0 * c + u.get(shifted(idx, a, -1))) * inv_h2[a];
    out.ref(idx) = s;
  });
  return out;
}

ScalarField laplacian(const ScalarField& u) {
  return laplacian(ExtendedField::from_interior(u, 0)).interior(u.ghost_width());
}

ScalarField polyharmonic(const ScalarField& u, int alpha) {
  if (alpha < 0) throw ContractError("polyharmonic: negative order");
  if (u.ghost_width() < alpha) {
    throw ContractError("polyharmonic: ghost width " + std::to_string(u.ghost_width()) +
                        " is smaller than alpha = " + std::to_string(alpha));
  }
  ExtendedField e = ExtendedField::from_interior(u, 0);
  for (int i = 0; i < alpha; ++i) e = laplacian(e);
  return e.interior(u.ghost_width());
}

std::vector<ScalarField> gradient(const ScalarField& u) {
  const BoxDomain& d = u.domain();
  std::vector<ScalarField> g;
  for (int a = 0; a < d.dim; ++a) {
    ScalarField ga(d, u.ghost_width());
    const double inv = 1.0 / (2.0 * d.spacing(a));
    for_each_node(d, [&](const Index& idx, std::size_t f) {
      ga[f] = (u.at(shifted(idx, a, 1)) - u.at(shifted(idx, a, -1))) * inv;
    });
    g.push_back(std::move(ga));
  }
  return g;
}

ScalarField gradient_transpose(const std::vector<ScalarField>& v) {
  if (v.empty()) throw ContractError("gradient_transpose: no components");
  const BoxDomain& d = v[0].domain();
  ScalarField g(d, v[0].ghost_width());
  for (int a = 0; a < static_cast<int>(v.size()); ++a) {
    const double inv = 1.0 / (2.0 * d.spacing(a));
    for_each_node(d, [&](const Index& idx, std::size_t f) {
      g[f] += (v[a].at(shifted(idx, a, -1)) - v[a].at(shifted(idx, a, 1))) * inv;
    });
  }
  return g;
}

namespace {

// Applies the diagonal or cross second-difference stencil for (a, b) to a
// zero-extended nodal function `get`.
template <class Get>
double second_difference(const BoxDomain& d, const Index& idx, int a, int b, Get&& get) {
  if (a == b) {
    const double h = d.spacing(a);
    return (get(shifted(idx, a, 1)) - 2.0 * get(idx) + get(shifted(idx, a, -1))) / (h * h);
  }
  const Index pp = shifted(shifted(idx, a, 1), b, 1);
  const Index pm = shifted(shifted(idx, a, 1), b, -1);
  const Index mp = shifted(shifted(idx, a, -1), b, 1);
  const Index mm = shifted(shifted(idx, a, -1), b, -1);
  return (get(pp) - get(pm) - get(mp) + get(mm)) / (4.0 * d.spacing(a) * d.spacing(b));
}

}  // namespace

MatrixField hessian(const ScalarField& u) {
  const BoxDomain& d = u.domain();
  MatrixField m{d, std::vector<SymmetricMatrix>(d.size(), SymmetricMatrix(d.dim))};
  auto get = [&](const Index& i) { return u.at(i); };
  for_each_node(d, [&](const Index& idx, std::size_t f) {
    SymmetricMatrix& h = m.values[f];
    for (int a = 0; a < d.dim; ++a)
      for (int b = a; b < d.dim; ++b) h.set(a, b, second_difference(d, idx, a, b, get));
  });
  return m;
}

ScalarField hessian_transpose(const MatrixField& p) {
  const BoxDomain& d = p.domain;
  ScalarField g(d, 0);
  for (int a = 0; a < d.dim; ++a) {
    for (int b = a; b < d.dim; ++b) {
      auto get = [&](const Index& i) {
        for (int ax = 0; ax < 3; ++ax)
          if (i[ax] < 0 || i[ax] >= d.nodes[ax]) return 0.0;
        return p.values[d.flat(i)](a, b);
      };
      // Off-diagonal pairs appear twice in the full contraction.
      const double w = a == b ? 1.0 : 2.0;
      for_each_node(d, [&](const Index& idx, std::size_t f) {
        g[f] += w * second_difference(d, idx, a, b, get);
      });
    }
  }
  return g;
}

ScalarField sk_field(const ScalarField& u, int k) {
  const BoxDomain& d = u.domain();
  if (k < 1 || k > d.dim) throw DomainError("sk_field: k must be in 1..N");
  const MatrixField h = hessian(u);
  ScalarField s(d, u.ghost_width());
  for (std::size_t f = 0; f < d.size(); ++f) s[f] = sk_of_matrix(h.values[f], k);
  return s;
}

double HalfOrder::norm_squared() const {
  if (components.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : components) s += c.sum_squares();
  return s * components.front().domain().cell_volume();
}

HalfOrder half_order(const ScalarField& u, int alpha) {
  if (alpha < 1) throw ContractError("half_order: alpha must be positive");
  if (u.ghost_width() < (alpha + 1) / 2) {
    throw ContractError("half_order: ghost width smaller than ceil(alpha/2)");
  }
  ExtendedField e = ExtendedField::from_interior(u, 0);
  for (int i = 0; i < alpha / 2; ++i) e = laplacian(e);
  HalfOrder r;
  if (alpha % 2 == 0) {
    r.components.push_back(std::move(e));
    return r;
  }
  r.is_vector = true;
  const BoxDomain& d = u.domain();
  for (int a = 0; a < d.dim; ++a) {
    // Forward differences reach one layer further on the low side.
    ExtendedField g(d, e.pad() + 1);
    const double inv = 1.0 / d.spacing(a);
    g.for_each([&](const Index& idx) { g.ref(idx) = (e.get(shifted(idx, a, 1)) - e.get(idx)) * inv; });
    r.components.push_back(std::move(g));
  }
  return r;
}

double seminorm(const ScalarField& u, int alpha) { return std::sqrt(half_order(u, alpha).norm_squared()); }

double integrate(const ScalarField& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * u.domain().cell_volume();
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_domain(a, b, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.domain().cell_volume();
}

double l2_norm(const ScalarField& u) { return std::sqrt(inner(u, u)); }

ScalarField bump_field(const BoxDomain& d, const Point& center, double radius, double amplitude,
                       int sign_exponent, int ghost_width) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  for (int a = 0; a < d.dim; ++a) {
    if (!(center[a] - radius > 0.0 && center[a] + radius < d.extent[a])) {
      throw DomainError("bump ball is not strictly inside the box");
    }
  }
  const double sign = (sign_exponent + 1) % 2 == 0 ? 1.0 : -1.0;
  return sample(d, ghost_width, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < d.dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    const double s2 = r2 / (radius * radius);
    if (s2 >= 1.0) return 0.0;
    return sign * amplitude * std::exp(-1.0 / (1.0 - s2));
  });
}

}  // namespace polyhess
