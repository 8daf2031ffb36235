#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "loctens/tensor.hpp"

namespace loctens {

/// Raised for lower-dimensional or otherwise unusable point sets.
class DegenerateError : public std::runtime_error {
 public:
  DegenerateError(const std::string& what, int affine_rank)
      : std::runtime_error(what), affine_rank_(affine_rank) {}
  int affine_rank() const { return affine_rank_; }

 private:
  int affine_rank_;
};

/// {y : <y, normal> <= offset}
struct Halfspace {
  Vec normal;
  double offset = 0.0;
  double signed_distance(const Vec& y) const { return y.dot(normal) - offset; }
};

struct PointCone {
  Vec u;
};

/// u(alpha) = cos(alpha) p + sin(alpha) q for alpha in [a0, a1].
struct Arc {
  Vec p;
  Vec q;
  double a0 = 0.0;
  double a1 = 0.0;

  Vec at(double alpha) const { return std::cos(alpha) * p + std::sin(alpha) * q; }
  double length() const { return a1 - a0; }
  Arc sub(double b0, double b1) const { return Arc{p, q, b0, b1}; }
};

/// Geodesic polygon on S^2, vertices counterclockwise seen from outside.
struct SphericalPolygon {
  std::vector<Vec> vertices;
};

using NormalCone = std::variant<PointCone, Arc, SphericalPolygon>;

struct Face {
  int dim = 0;
  /// Edges: endpoints. Facets of a 3-polytope: boundary cycle,
  /// counterclockwise seen from outside.
  std::vector<int> vertices;
  /// Orthonormal basis of the direction space L(F).
  std::vector<Vec> direction_basis;
  /// H^k(F); 1 for vertices.
  double measure = 0.0;
  NormalCone cone;
};

class Polytope {
 public:
  /// Convex hull of a full-dimensional point set in R^2 or R^3.
  static Polytope hull(std::span<const Vec> points);
  static Polytope hull(std::initializer_list<Vec> points);

  /// Builds the lattice from vertices and facet cycles. In R^2 the single
  /// cycle is the boundary, counterclockwise; in R^3 each facet cycle is
  /// counterclockwise seen from outside.
  static Polytope from_cycles(int dim, std::vector<Vec> vertices,
                              std::vector<std::vector<int>> cycles);

  int dim() const { return dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const Vec& vertex(int i) const { return vertices_[i]; }
  /// Faces of dimension k, 0 <= k < dim.
  const std::vector<Face>& faces(int k) const;
  const std::vector<Face>& facets() const { return faces(dim_ - 1); }
  const std::vector<std::vector<int>>& cycles() const { return cycles_; }

  /// Facet halfspaces, in facet order.
  std::vector<Halfspace> halfspaces() const;

  double volume() const { return volume_; }
  double diameter() const { return diameter_; }
  bool contains(const Vec& x, double tol = 1e-12) const;

  /// Default unit vector of edge e: larger endpoint minus smaller,
  /// lexicographically.
  Vec edge_vector(int e) const;

 private:
  int dim_ = 0;
  std::vector<Vec> vertices_;
  std::vector<std::vector<int>> cycles_;
  std::array<std::vector<Face>, 3> faces_;
  std::vector<Vec> facet_normals_;
  std::vector<double> facet_offsets_;
  double volume_ = 0.0;
  double diameter_ = 0.0;
};

bool lex_less(const Vec& a, const Vec& b);
Vec default_edge_vector(const Vec& a, const Vec& b);

const NormalCone& normal_cone(const Polytope& p, int k, int face);
/// Arc length or spherical area of a cone; 1 for point cones.
double cone_measure(const NormalCone& c);

SymTensor segment_moment(const Vec& a, const Vec& b, int r);
/// Convex planar polygon given in boundary order.
SymTensor polygon_moment(std::span<const Vec> pts, int r);
SymTensor face_moment(const Polytope& p, const Face& f, int r);
/// Integral of x^r over the polytope.
SymTensor volume_moment(const Polytope& p, int r);
/// Exact moment of a simplex via the complete homogeneous expansion.
SymTensor simplex_moment(std::span<const Vec> vertices, int r);

Polytope clip_halfspace(const Polytope& p, const Halfspace& h);
Polytope minkowski_sum(const Polytope& a, const Polytope& b);
Polytope minkowski_sum(const Polytope& a, std::span<const Vec> points);
Polytope scale(const Polytope& p, double lambda);
Polytope translate(const Polytope& p, const Vec& t);
Polytope apply_rotation(const Polytope& p, const Rotation& theta);

}  // namespace loctens
