#include "rcm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "rcm/errors.hpp"

namespace rcm {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw ValidationError("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                          std::to_string(d));
  }
}

}  // namespace

Vertex::Vertex(int d) : dim(d) { check_dim(d); }

Vertex::Vertex(std::initializer_list<Coord> c) : dim(static_cast<int>(c.size())) {
  check_dim(dim);
  std::copy(c.begin(), c.end(), coords.begin());
}

Vertex Vertex::unit(int d, int direction, Coord step) {
  Vertex v(d);
  v[direction] = step;
  return v;
}

Vertex Vertex::shifted(int direction, Coord step) const {
  Vertex v = *this;
  v[direction] += step;
  return v;
}

Vertex Vertex::operator+(const Vertex& other) const {
  Vertex v = *this;
  for (int i = 0; i < dim; ++i) v[i] += other[i];
  return v;
}

Vertex Vertex::operator-(const Vertex& other) const {
  Vertex v = *this;
  for (int i = 0; i < dim; ++i) v[i] -= other[i];
  return v;
}

Vertex Vertex::scaled(Coord factor) const {
  Vertex v = *this;
  for (int i = 0; i < dim; ++i) v[i] *= factor;
  return v;
}

Coord Vertex::sup_norm() const {
  Coord m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(coords[static_cast<std::size_t>(i)]));
  return m;
}

bool Vertex::operator==(const Vertex& other) const {
  if (dim != other.dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (coords[static_cast<std::size_t>(i)] != other.coords[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

std::string Vertex::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << coords[static_cast<std::size_t>(i)];
  os << ')';
  return os.str();
}

Bond Bond::between(const Vertex& a, const Vertex& b) {
  if (a.dim != b.dim) throw RegionError("bond endpoints of different dimension");
  int dir = -1;
  Coord step = 0;
  for (int i = 0; i < a.dim; ++i) {
    const Coord diff = b[i] - a[i];
    if (diff == 0) continue;
    if (dir != -1 || std::abs(diff) != 1) {
      throw RegionError("vertices " + a.str() + " and " + b.str() + " are not nearest neighbours");
    }
    dir = i;
    step = diff;
  }
  if (dir == -1) throw RegionError("degenerate bond " + a.str());
  return step > 0 ? Bond{a, dir} : Bond{b, dir};
}

Box::Box(const Vertex& center, Coord radius) : center_(center), radius_(radius) {
  check_dim(center.dim);
  if (radius < 0) throw ValidationError("box radius must be nonnegative");
  size_ = 1;
  for (int i = 0; i < center.dim; ++i) size_ *= static_cast<std::size_t>(side());
}

std::size_t Box::bond_count() const {
  if (radius_ == 0) return 0;
  std::size_t face = 1;
  for (int i = 1; i < dim(); ++i) face *= static_cast<std::size_t>(side());
  return static_cast<std::size_t>(dim()) * face * static_cast<std::size_t>(2 * radius_);
}

bool Box::contains(const Vertex& x) const {
  if (x.dim != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (std::abs(x[i] - center_[i]) > radius_) return false;
  }
  return true;
}

bool Box::contains(const Box& inner) const {
  if (inner.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (std::abs(inner.center()[i] - center_[i]) + inner.radius() > radius_) return false;
  }
  return true;
}

std::size_t Box::index(const Vertex& x) const {
  if (!contains(x)) throw RegionError("vertex " + x.str() + " outside box of radius " + std::to_string(radius_));
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int i = 0; i < dim(); ++i) {
    idx += static_cast<std::size_t>(x[i] - center_[i] + radius_) * stride;
    stride *= static_cast<std::size_t>(side());
  }
  return idx;
}

Vertex Box::vertex(std::size_t index) const {
  Vertex x(dim());
  const auto s = static_cast<std::size_t>(side());
  for (int i = 0; i < dim(); ++i) {
    x[i] = static_cast<Coord>(index % s) - radius_ + center_[i];
    index /= s;
  }
  return x;
}

bool Box::on_boundary(const Vertex& x) const {
  if (!contains(x)) return false;
  for (int i = 0; i < dim(); ++i) {
    if (std::abs(x[i] - center_[i]) == radius_) return true;
  }
  return false;
}

std::vector<Vertex> Box::vertices() const {
  std::vector<Vertex> out;
  out.reserve(size_);
  for_each_vertex([&](const Vertex& x) { out.push_back(x); });
  return out;
}

std::vector<Bond> Box::bonds() const {
  std::vector<Bond> out;
  out.reserve(bond_count());
  for_each_bond([&](const Bond& e) { out.push_back(e); });
  return out;
}

std::vector<Vertex> boundary(const Box& box) {
  return vertices_where(box, [&](const Vertex& x) { return box.on_boundary(x); });
}

std::vector<Bond> shell_bonds(const Vertex& center, Coord m) {
  if (m < 0) throw ValidationError("shell index must be nonnegative");
  std::vector<Bond> out;
  const Box inner(center, m);
  for (const Vertex& x : boundary(inner)) {
    for (int k = 0; k < x.dim; ++k) {
      const Coord rel = x[k] - center[k];
      if (rel == m) out.push_back(Bond{x, k});
      if (rel == -m && m > 0) out.push_back(Bond{x.shifted(k, -1), k});
      if (m == 0) out.push_back(Bond{x.shifted(k, -1), k});
    }
  }
  return out;
}

std::vector<Vertex> vertices_where(const Box& outer, const std::function<bool(const Vertex&)>& keep) {
  std::vector<Vertex> out;
  outer.for_each_vertex([&](const Vertex& x) {
    if (keep(x)) out.push_back(x);
  });
  return out;
}

std::vector<Bond> bonds_where(const Box& outer, const std::function<bool(const Vertex&)>& keep) {
  std::vector<Bond> out;
  outer.for_each_bond([&](const Bond& e) {
    if (keep(e.lower) && keep(e.upper())) out.push_back(e);
  });
  return out;
}

std::vector<Vertex> annulus_vertices(const Vertex& center, Coord lo, Coord hi) {
  return vertices_where(Box(center, hi), [&](const Vertex& x) { return (x - center).sup_norm() >= lo; });
}

std::vector<Bond> annulus_bonds(const Vertex& center, Coord lo, Coord hi) {
  return bonds_where(Box(center, hi), [&](const Vertex& x) { return (x - center).sup_norm() >= lo; });
}

ScalarField::ScalarField(const Box& box, double fill) : box_(box), values_(box.size(), fill) {}

ScalarField::ScalarField(const Box& box, std::vector<double> values) : box_(box), values_(std::move(values)) {
  if (values_.size() != box_.size()) throw ValidationError("scalar field size does not match its box");
}

ScalarField ScalarField::from_function(const Box& box, const std::function<double(const Vertex&)>& f) {
  ScalarField out(box);
  for (std::size_t i = 0; i < box.size(); ++i) out.values_[i] = f(box.vertex(i));
  return out;
}

double ScalarField::operator()(const Vertex& x) const { return values_[box_.index(x)]; }

double& ScalarField::at(const Vertex& x) { return values_[box_.index(x)]; }

ScalarField ScalarField::restricted(const Box& sub) const {
  if (!box_.contains(sub)) throw RegionError("restriction box not contained in field box");
  return from_function(sub, [&](const Vertex& x) { return (*this)(x); });
}

BondField::BondField(const Box& box, double fill)
    : box_(box), values_(box.size() * static_cast<std::size_t>(box.dim()), fill) {}

BondField BondField::from_function(const Box& box, const std::function<double(const Bond&)>& f) {
  BondField out(box);
  box.for_each_bond([&](const Bond& e) { out.values_[box.bond_slot(e)] = f(e); });
  return out;
}

double BondField::operator()(const Bond& e) const {
  if (!box_.contains(e)) throw RegionError("bond at " + e.lower.str() + " outside bond field region");
  return values_[box_.bond_slot(e)];
}

double& BondField::at(const Bond& e) {
  if (!box_.contains(e)) throw RegionError("bond at " + e.lower.str() + " outside bond field region");
  return values_[box_.bond_slot(e)];
}

BondField gradient(const ScalarField& f) {
  return BondField::from_function(f.box(), [&](const Bond& e) { return f(e.upper()) - f(e.lower); });
}

ScalarField divergence(const BondField& f) {
  const Box& outer = f.box();
  if (outer.radius() < 1) throw RegionError("divergence needs a bond field on a box of radius >= 1");
  const Box inner(outer.center(), outer.radius() - 1);
  return ScalarField::from_function(inner, [&](const Vertex& x) {
    double acc = 0.0;
    for (int i = 0; i < x.dim; ++i) {
      acc += f(Bond{x.shifted(i, -1), i}) - f(Bond{x, i});
    }
    return acc;
  });
}

BondField bond_average(const ScalarField& h) {
  return BondField::from_function(h.box(), [&](const Bond& e) { return 0.5 * (h(e.upper()) + h(e.lower)); });
}

BondField bond_abs_average(const ScalarField& h) {
  return BondField::from_function(h.box(),
                                  [&](const Bond& e) { return 0.5 * (std::abs(h(e.upper())) + std::abs(h(e.lower))); });
}

double lp_norm(std::span<const double> values, double s, Averaging averaging) {
  if (values.empty()) throw RegionError("norm over an empty region");
  if (!(s > 0.0)) throw ValidationError("norm exponent must be positive");
  if (std::isinf(s)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  if (s == 1.0) {
    for (double v : values) acc += std::abs(v);
  } else if (s == 2.0) {
    for (double v : values) acc += v * v;
  } else {
    for (double v : values) acc += std::pow(std::abs(v), s);
  }
  if (averaging == Averaging::kMean) acc /= static_cast<double>(values.size());
  if (s == 1.0) return acc;
  if (s == 2.0) return std::sqrt(acc);
  return std::pow(acc, 1.0 / s);
}

double norm(const ScalarField& f, double s, Averaging averaging) { return lp_norm(f.values(), s, averaging); }

double norm(const ScalarField& f, const Box& region, double s, Averaging averaging) {
  std::vector<double> v;
  v.reserve(region.size());
  region.for_each_vertex([&](const Vertex& x) { v.push_back(f(x)); });
  return lp_norm(v, s, averaging);
}

double norm(const ScalarField& f, std::span<const Vertex> region, double s, Averaging averaging) {
  std::vector<double> v;
  v.reserve(region.size());
  for (const Vertex& x : region) v.push_back(f(x));
  return lp_norm(v, s, averaging);
}

double norm(const BondField& f, double s, Averaging averaging) { return norm(f, f.box(), s, averaging); }

double norm(const BondField& f, const Box& region, double s, Averaging averaging) {
  std::vector<double> v;
  v.reserve(region.bond_count());
  region.for_each_bond([&](const Bond& e) { v.push_back(f(e)); });
  return lp_norm(v, s, averaging);
}

double norm(const BondField& f, std::span<const Bond> region, double s, Averaging averaging) {
  std::vector<double> v;
  v.reserve(region.size());
  for (const Bond& e : region) v.push_back(f(e));
  return lp_norm(v, s, averaging);
}

double mean(const ScalarField& f, const Box& region) {
  double acc = 0.0;
  region.for_each_vertex([&](const Vertex& x) { acc += f(x); });
  return acc / static_cast<double>(region.size());
}

}  // namespace rcm
