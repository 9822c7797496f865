#pragma once

// Discrete calculus on Z^d: vertices, canonically oriented bonds, boxes,
// scalar and bond fields, gradient, divergence and L^s norms.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rcm {

inline constexpr int kMaxDim = 4;
using Coord = std::int64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Vertex {
  std::array<Coord, kMaxDim> coords{};
  int dim = 0;

  Vertex() = default;
  explicit Vertex(int d);
  Vertex(std::initializer_list<Coord> c);

  static Vertex origin(int d) { return Vertex(d); }
  static Vertex unit(int d, int direction, Coord step = 1);

  Coord operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
  Coord& operator[](int i) { return coords[static_cast<std::size_t>(i)]; }

  Vertex shifted(int direction, Coord step) const;
  Vertex operator+(const Vertex& other) const;
  Vertex operator-(const Vertex& other) const;
  Vertex scaled(Coord factor) const;

  /// max_i |x_i|
  Coord sup_norm() const;

  bool operator==(const Vertex& other) const;
  bool operator!=(const Vertex& other) const { return !(*this == other); }

  std::string str() const;
};

/// Nearest-neighbour bond in canonical form: upper = lower + e_direction.
struct Bond {
  Vertex lower;
  int direction = 0;

  Vertex upper() const { return lower.shifted(direction, 1); }

  /// Canonical bond joining two nearest neighbours; throws if a, b are not
  /// adjacent.
  static Bond between(const Vertex& a, const Vertex& b);

  bool operator==(const Bond& other) const {
    return direction == other.direction && lower == other.lower;
  }
};

/// B(y, n) = y + ([-n, n] ∩ Z)^d.
class Box {
 public:
  Box() = default;
  Box(const Vertex& center, Coord radius);
  static Box centered(int d, Coord radius) { return Box(Vertex::origin(d), radius); }

  int dim() const { return center_.dim; }
  Coord radius() const { return radius_; }
  const Vertex& center() const { return center_; }
  Coord side() const { return 2 * radius_ + 1; }

  std::size_t size() const { return size_; }
  /// Number of bonds with both endpoints in the box: d (2n+1)^{d-1} 2n.
  std::size_t bond_count() const;

  bool contains(const Vertex& x) const;
  bool contains(const Bond& e) const { return contains(e.lower) && contains(e.upper()); }
  bool contains(const Box& inner) const;

  /// Lexicographic index with the first coordinate running fastest.
  std::size_t index(const Vertex& x) const;
  Vertex vertex(std::size_t index) const;

  /// Slot of a bond in a BondField over this box: index(lower) * d + direction.
  std::size_t bond_slot(const Bond& e) const { return index(e.lower) * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(e.direction); }

  bool on_boundary(const Vertex& x) const;

  std::vector<Vertex> vertices() const;
  std::vector<Bond> bonds() const;

  template <class F>
  void for_each_vertex(F&& f) const {
    for (std::size_t i = 0; i < size_; ++i) f(vertex(i));
  }

  /// Calls f(bond) for every bond with both endpoints inside, in slot order.
  template <class F>
  void for_each_bond(F&& f) const {
    const int d = dim();
    for (std::size_t i = 0; i < size_; ++i) {
      const Vertex x = vertex(i);
      for (int k = 0; k < d; ++k) {
        if (x[k] - center_[k] < radius_) f(Bond{x, k});
      }
    }
  }

 private:
  Vertex center_;
  Coord radius_ = 0;
  std::size_t size_ = 0;
};

/// ∂S = {x ∈ S : some neighbour of x lies outside S}.
std::vector<Vertex> boundary(const Box& box);

/// S(m): bonds joining ∂B(c, m) to ∂B(c, m+1). Both outward orientations are
/// included, so the set is exactly where a radial cutoff η̂(|x - c|_∞) varies
/// between levels m and m+1.
std::vector<Bond> shell_bonds(const Vertex& center, Coord m);

/// Vertices of `outer` satisfying `keep`, in index order.
std::vector<Vertex> vertices_where(const Box& outer, const std::function<bool(const Vertex&)>& keep);
/// Bonds of `outer` whose two endpoints both satisfy `keep`.
std::vector<Bond> bonds_where(const Box& outer, const std::function<bool(const Vertex&)>& keep);

/// Vertices x with lo <= |x - c|_∞ <= hi.
std::vector<Vertex> annulus_vertices(const Vertex& center, Coord lo, Coord hi);
/// Bonds with both endpoints in the annulus lo <= |x - c|_∞ <= hi.
std::vector<Bond> annulus_bonds(const Vertex& center, Coord lo, Coord hi);

/// Real-valued function on the vertices of a box.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Box& box, double fill = 0.0);
  ScalarField(const Box& box, std::vector<double> values);

  static ScalarField from_function(const Box& box, const std::function<double(const Vertex&)>& f);

  const Box& box() const { return box_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool defined_at(const Vertex& x) const { return box_.contains(x); }
  /// Throws RegionError outside the box.
  double operator()(const Vertex& x) const;
  double& at(const Vertex& x);
  double value(std::size_t index) const { return values_[index]; }

  ScalarField restricted(const Box& sub) const;

 private:
  Box box_;
  std::vector<double> values_;
};

/// Real-valued function on the bonds of a box (both endpoints inside).
class BondField {
 public:
  BondField() = default;
  explicit BondField(const Box& box, double fill = 0.0);

  static BondField from_function(const Box& box, const std::function<double(const Bond&)>& f);

  const Box& box() const { return box_; }

  bool defined_at(const Bond& e) const { return box_.contains(e); }
  double operator()(const Bond& e) const;
  double& at(const Bond& e);

  template <class F>
  void for_each(F&& f) const {
    box_.for_each_bond([&](const Bond& e) { f(e, values_[box_.bond_slot(e)]); });
  }

 private:
  Box box_;
  std::vector<double> values_;  // slot = vertex index * d + direction
};

/// ∇f(e) = f(upper) - f(lower) on every bond of f's box.
BondField gradient(const ScalarField& f);

/// ∇*F(x) = Σ_i F({x - e_i, x}) - F({x, x + e_i}) on the vertices of
/// B(center, radius - 1), the vertices whose incident bonds all lie in F's box.
ScalarField divergence(const BondField& f);

/// h(e) = (h(upper) + h(lower)) / 2.
BondField bond_average(const ScalarField& h);
/// |h|(e) = (|h(upper)| + |h(lower)|) / 2.
BondField bond_abs_average(const ScalarField& h);

enum class Averaging { kSum, kMean };

/// (Σ |v|^s)^{1/s}, or the mean version when averaging is kMean; s = ∞ gives
/// max |v|. Any s in (0, ∞] is accepted. Throws RegionError if empty.
double lp_norm(std::span<const double> values, double s, Averaging averaging);

double norm(const ScalarField& f, double s, Averaging averaging);
double norm(const ScalarField& f, const Box& region, double s, Averaging averaging);
double norm(const ScalarField& f, std::span<const Vertex> region, double s, Averaging averaging);
double norm(const BondField& f, double s, Averaging averaging);
double norm(const BondField& f, const Box& region, double s, Averaging averaging);
double norm(const BondField& f, std::span<const Bond> region, double s, Averaging averaging);

/// (f)_S, the average of f over the vertices of `region`.
double mean(const ScalarField& f, const Box& region);

}  // namespace rcm
