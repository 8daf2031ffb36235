#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "loctens/polytope.hpp"
#include "loctens/tensor.hpp"

namespace loctens {

/// {u : <u, c> >= tau}
struct Cap {
  Vec c;
  double tau = 0.0;
  bool contains(const Vec& u) const { return u.dot(c) >= tau; }
};

/// Product of an x-set (intersection of halfspaces) and a u-set
/// (intersection of caps). Empty lists mean no constraint.
struct RegionProduct {
  std::vector<Halfspace> xset;
  std::vector<Cap> caps;

  bool contains(const Vec& x, const Vec& u) const;
  static RegionProduct box(const Vec& lo, const Vec& hi);
};

/// Borel set of support elements: everything, or a finite union of products.
class RegionSpec {
 public:
  RegionSpec() = default;
  static RegionSpec full();
  static RegionSpec union_of(std::vector<RegionProduct> products);

  bool is_full() const { return full_; }
  const std::vector<RegionProduct>& products() const { return products_; }
  bool contains(const Vec& x, const Vec& u) const;

  struct Term {
    double sign;
    RegionProduct product;
  };
  /// Inclusion-exclusion expansion into signed products.
  std::vector<Term> expand() const;

  RegionSpec rotated(const Rotation& theta) const;
  RegionSpec translated(const Vec& t) const;
  RegionSpec scaled(double lambda) const;

 private:
  bool full_ = true;
  std::vector<RegionProduct> products_;
};

/// Spherical weight f(u) = g(<u, axis>) with g = 0 below tau0, 1 above tau1
/// and a cosine taper in between; or a constant.
class WeightFn {
 public:
  static WeightFn constant(double c = 1.0);
  static WeightFn taper(const Vec& axis, double tau0, double tau1);

  double operator()(const Vec& u) const;
  double profile(double x) const;

  bool is_constant() const { return constant_; }
  double constant_value() const { return value_; }
  const Vec& axis() const { return axis_; }
  double tau0() const { return tau0_; }
  double tau1() const { return tau1_; }
  /// Levels of <u, axis> where the profile is not smooth.
  std::vector<double> knots() const;
  bool identically_zero() const { return constant_ && value_ == 0.0; }

  WeightFn rotated(const Rotation& theta) const;

 private:
  bool constant_ = true;
  double value_ = 1.0;
  Vec axis_;
  double tau0_ = 0.0;
  double tau1_ = 0.0;
};

enum class ExtraKind { None, CrossWith, Ubar };

/// Optional linear factor E(u) multiplied into u^s: v x u or ubar.
struct ArcExtra {
  ExtraKind kind = ExtraKind::None;
  Vec v;

  static ArcExtra none() { return {}; }
  static ArcExtra cross_with(const Vec& v) { return {ExtraKind::CrossWith, v}; }
  static ArcExtra ubar() { return {ExtraKind::Ubar, Vec()}; }
  Vec apply(const Vec& u) const;
  int rank() const { return kind == ExtraKind::None ? 0 : 1; }
};

/// Integral of cos^a sin^b over [a0, a1] by the reduction recursion.
/// Entry [a][b] for a + b <= degree.
std::vector<std::vector<double>> trig_moments(int degree, double a0, double a1);

/// Unweighted moment over the whole arc from antiderivatives.
SymTensor arc_moment_exact(const Arc& arc, int s, const ArcExtra& extra);
/// Nodal Gauss-Legendre evaluation of the weighted integrand on the arc.
SymTensor arc_moment_nodal(const Arc& arc, int s, const ArcExtra& extra, const WeightFn& w,
                           int order = 64);
/// Moment over arc ∩ caps with weight; intervals are resolved exactly.
SymTensor arc_moment(const Arc& arc, int s, const ArcExtra& extra, std::span<const Cap> caps,
                     const WeightFn& w);
/// Same, with the u-part of a region.
SymTensor arc_moment(const Arc& arc, int s, const ArcExtra& extra, const RegionSpec& region,
                     const WeightFn& w);

/// Range of <u, c> over the arc.
std::pair<double, double> arc_dot_range(const Arc& arc, const Vec& c);

/// Angle intervals of the arc lying in every cap.
std::vector<Arc> clip_arc(const Arc& arc, std::span<const Cap> caps);
/// Sub-arcs of the arc inside the u-projection of the region.
std::vector<Arc> restrict(const Arc& arc, const RegionSpec& region);

struct SphQuadOptions {
  double rel_tol = 1e-10;
  int max_depth = 30;
  int base_degree = 11;
  int polar_order = 20;
};

class RefinementError : public std::runtime_error {
 public:
  RefinementError(const std::string& what, double previous, double last)
      : std::runtime_error(what), previous_(previous), last_(last) {}
  double previous() const { return previous_; }
  double last() const { return last_; }

 private:
  double previous_;
  double last_;
};

/// Moment of u^s over a spherical polygon ∩ caps, weighted.
SymTensor spherical_polygon_moment(const SphericalPolygon& poly, int s, std::span<const Cap> caps,
                                   const WeightFn& w, const SphQuadOptions& opt = {});
SymTensor spherical_polygon_moment(const SphericalPolygon& poly, int s, const RegionSpec& region,
                                   const WeightFn& w, const SphQuadOptions& opt = {});

/// Area by Girard's formula.
double spherical_area(const SphericalPolygon& poly);

}  // namespace loctens
