#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loctens/polytope.hpp"
#include "loctens/quadrature.hpp"
#include "loctens/spherical.hpp"

using namespace loctens;

namespace {

Vec random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = nd(rng);
  return v.normalized();
}

Arc random_arc(std::mt19937_64& rng) {
  Vec p = random_unit(rng, 3);
  Vec q = random_unit(rng, 3);
  q = (q - q.dot(p) * p).normalized();
  std::uniform_real_distribution<double> u(0.05, 3.0);
  double a0 = u(rng) - 1.5;
  return Arc{p, q, a0, a0 + u(rng)};
}

Polytope unit_cube() {
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  return Polytope::hull(pts);
}

const SphericalPolygon& cone_at(const Polytope& P, const Vec& v) {
  for (const Face& f : P.faces(0))
    if ((P.vertex(f.vertices[0]) - v).norm() < 1e-12) return std::get<SphericalPolygon>(f.cone);
  throw std::logic_error("no such vertex");
}

// Monte Carlo over the sphere of u^s restricted to the polygon (all edges of
// a convex spherical polygon have the interior on the left).
SymTensor monte_carlo(const SphericalPolygon& poly, int s, const WeightFn& w, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SymTensor acc(3, s);
  const auto& V = poly.vertices;
  for (int i = 0; i < n; ++i) {
    Vec u = random_unit(rng, 3);
    bool in = true;
    for (std::size_t k = 0; k < V.size() && in; ++k) in = cross3(V[k], V[(k + 1) % V.size()]).dot(u) >= 0;
    if (in) acc.axpy(w(u), vector_power(u, s));
  }
  acc *= 4 * M_PI / n;
  return acc;
}

}  // namespace

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const QuadRule& g = gauss_legendre(10);
  for (int d = 0; d < 20; ++d) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * std::pow(g.nodes[i], d);
    double want = d % 2 ? 0.0 : 2.0 / (d + 1);
    EXPECT_NEAR(sum, want, 1e-14) << d;
  }
}

TEST(Quadrature, TriangleRuleExactness) {
  const TriangleRule& t = triangle_rule(11);
  for (int a = 0; a <= 11; ++a)
    for (int b = 0; a + b <= 11; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < t.points.size(); ++i)
        sum += t.weights[i] * std::pow(t.points[i].first, a) * std::pow(t.points[i].second, b);
      // Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!.
      double want = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
      EXPECT_NEAR(sum, want, 1e-15) << a << " " << b;
    }
}

TEST(ArcMoment, CrossWithExample) {
  Arc arc{vec3(0, 1, 0), vec3(0, 0, 1), M_PI, 1.5 * M_PI};
  SymTensor t = arc_moment_exact(arc, 0, ArcExtra::cross_with(vec3(1, 0, 0)));
  EXPECT_TRUE(t.approx_equal(vector_tensor(vec3(0, 1, -1)), 1e-14, 0.0));
}

TEST(ArcMoment, UbarExample) {
  Arc arc{vec2(1, 0), vec2(0, 1), 0.0, M_PI / 2};
  SymTensor t = arc_moment_exact(arc, 0, ArcExtra::ubar());
  EXPECT_TRUE(t.approx_equal(vector_tensor(vec2(-1, 1)), 1e-14, 0.0));
}

TEST(ArcMoment, ScalarIsArcLength) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 5; ++i) {
    Arc a = random_arc(rng);
    EXPECT_NEAR(arc_moment_exact(a, 0, ArcExtra::none()).coeffs()[0], a.length(), 1e-14);
    EXPECT_NEAR(arc_moment_nodal(a, 0, ArcExtra::none(), WeightFn::constant()).coeffs()[0], a.length(), 1e-14);
  }
}

TEST(ArcMoment, TrigMomentsMatchQuadrature) {
  const QuadRule& g = gauss_legendre(40);
  double a0 = -0.4, a1 = 1.9;
  auto m = trig_moments(8, a0, a1);
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double t = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * g.nodes[i];
        sum += 0.5 * (a1 - a0) * g.weights[i] * std::pow(std::cos(t), a) * std::pow(std::sin(t), b);
      }
      EXPECT_NEAR(m[a][b], sum, 1e-13);
    }
}

TEST(ArcMoment, ClosedFormAgreesWithQuadrature) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    Arc a = random_arc(rng);
    Vec v = random_unit(rng, 3);
    for (int s = 0; s <= 6; ++s)
      for (const ArcExtra& ex : {ArcExtra::none(), ArcExtra::cross_with(v)}) {
        SymTensor exact = arc_moment_exact(a, s, ex);
        SymTensor nodal = arc_moment_nodal(a, s, ex, WeightFn::constant());
        EXPECT_LT((exact - nodal).max_norm(), 1e-11) << "s " << s;
      }
  }
  for (int trial = 0; trial < 10; ++trial) {
    Vec p = random_unit(rng, 2);
    Arc a{p, ubar2(p), 0.0, 0.1 + 0.3 * trial};
    for (int s = 0; s <= 6; ++s) {
      SymTensor exact = arc_moment_exact(a, s, ArcExtra::ubar());
      SymTensor nodal = arc_moment_nodal(a, s, ArcExtra::ubar(), WeightFn::constant());
      EXPECT_LT((exact - nodal).max_norm(), 1e-11);
    }
  }
}

TEST(ArcMoment, SplittingIsAdditive) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    Arc a = random_arc(rng);
    double mid = a.a0 + 0.37 * a.length();
    WeightFn w = WeightFn::taper(random_unit(rng, 3), -0.3, 0.4);
    for (int s = 0; s <= 4; ++s) {
      SymTensor whole = arc_moment(a, s, ArcExtra::none(), std::span<const Cap>(), w);
      SymTensor parts = arc_moment(a.sub(a.a0, mid), s, ArcExtra::none(), std::span<const Cap>(), w) +
                        arc_moment(a.sub(mid, a.a1), s, ArcExtra::none(), std::span<const Cap>(), w);
      EXPECT_LT((whole - parts).max_norm(), 1e-10);
    }
  }
}

TEST(ArcMoment, RotationEquivariance) {
  std::mt19937_64 rng(24);
  Rotation r = Rotation::about_axis(vec3(0.2, -1, 0.4), 0.8);
  for (int trial = 0; trial < 5; ++trial) {
    Arc a = random_arc(rng);
    Arc ra{r.apply(a.p), r.apply(a.q), a.a0, a.a1};
    Vec c = random_unit(rng, 3);
    std::vector<Cap> caps{Cap{c, 0.1}};
    std::vector<Cap> rcaps{Cap{r.apply(c), 0.1}};
    WeightFn w = WeightFn::taper(random_unit(rng, 3), -0.5, 0.2);
    for (int s = 0; s <= 4; ++s) {
      SymTensor m = arc_moment(a, s, ArcExtra::none(), caps, w);
      SymTensor rm = arc_moment(ra, s, ArcExtra::none(), rcaps, w.rotated(r));
      EXPECT_LT((rm - rotate_tensor(m, r)).max_norm(), 1e-9);
    }
  }
}

TEST(ArcMoment, WeightedAgainstFineNodal) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    Arc a = random_arc(rng);
    WeightFn w = WeightFn::taper(random_unit(rng, 3), -0.2, 0.5);
    for (int s = 0; s <= 3; ++s) {
      SymTensor got = arc_moment(a, s, ArcExtra::none(), std::span<const Cap>(), w);
      // Many small panels of the plain nodal rule.
      SymTensor ref(3, s);
      const int panels = 400;
      for (int k = 0; k < panels; ++k) {
        double b0 = a.a0 + a.length() * k / panels, b1 = a.a0 + a.length() * (k + 1) / panels;
        ref += arc_moment_nodal(a.sub(b0, b1), s, ArcExtra::none(), w, 8);
      }
      EXPECT_LT((got - ref).max_norm(), 1e-9);
    }
  }
}

TEST(ClipArc, Examples) {
  Arc quarter{vec3(1, 0, 0), vec3(0, 0, -1), -0.3, M_PI / 2};
  std::vector<Cap> containing{Cap{vec3(1, 0, 0), -0.9}};
  auto same = clip_arc(quarter, containing);
  ASSERT_EQ(same.size(), 1u);
  EXPECT_NEAR(same[0].a0, quarter.a0, 1e-15);
  EXPECT_NEAR(same[0].a1, quarter.a1, 1e-15);
  std::vector<Cap> disjoint{Cap{vec3(0, 1, 0), 0.5}};
  EXPECT_TRUE(clip_arc(quarter, disjoint).empty());
  // Lower hemisphere: <u(alpha), -e3> = sin(alpha) >= 0.
  std::vector<Cap> lower{Cap{vec3(0, 0, -1), 0.0}};
  auto cut = clip_arc(quarter, lower);
  ASSERT_EQ(cut.size(), 1u);
  EXPECT_NEAR(cut[0].a0, 0.0, 1e-14);
  EXPECT_NEAR(cut[0].a1, M_PI / 2, 1e-14);
}

TEST(SphericalPolygon, OctantArea) {
  Polytope c = unit_cube();
  const auto& oct = cone_at(c, vec3(1, 1, 1));
  EXPECT_NEAR(spherical_area(oct), M_PI / 2, 1e-14);
  SymTensor a = spherical_polygon_moment(oct, 0, std::span<const Cap>(), WeightFn::constant());
  EXPECT_NEAR(a.coeffs()[0], M_PI / 2, 1e-10);
}

TEST(SphericalPolygon, OctantFirstMoment) {
  Polytope c = unit_cube();
  const auto& oct = cone_at(c, vec3(1, 1, 1));
  SymTensor m = spherical_polygon_moment(oct, 1, std::span<const Cap>(), WeightFn::constant());
  // Integral of u1 over the octant: quarter of the hemisphere integral pi.
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.coeffs()[i], M_PI / 4, 1e-10);
  SymTensor mc = monte_carlo(oct, 1, WeightFn::constant(), 400000, 5);
  EXPECT_LT((m - mc).max_norm(), 0.01);
}

TEST(SphericalPolygon, CubeConesSumToSphereMoments) {
  Polytope c = unit_cube();
  for (int s = 0; s <= 4; ++s) {
    SymTensor sum(3, s);
    for (const Face& v : c.faces(0))
      sum += spherical_polygon_moment(std::get<SphericalPolygon>(v.cone), s, std::span<const Cap>(),
                                      WeightFn::constant());
    // Sphere moments of u^s: zero for odd s; 4 pi Q / 3 for s = 2; 4 pi Q^2 / 5 for s = 4.
    SymTensor want(3, s);
    if (s == 0) want = SymTensor::scalar(3, 4 * M_PI);
    if (s == 2) want = (4 * M_PI / 3) * metric_Q(3);
    if (s == 4) want = (4 * M_PI / 5) * metric_power(3, 2);
    EXPECT_LT((sum - want).max_norm(), 1e-9) << s;
  }
}

TEST(SphericalPolygon, CapsAndWeightsAgainstMonteCarlo) {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> nd;
  std::vector<Vec> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(vec3(nd(rng), nd(rng), nd(rng)));
  Polytope P = Polytope::hull(pts);
  WeightFn w = WeightFn::taper(vec3(0, 0.6, 0.8), -0.4, 0.3);
  for (const Face& v : P.faces(0)) {
    const auto& poly = std::get<SphericalPolygon>(v.cone);
    if (spherical_area(poly) < 1.0) continue;
    std::vector<Cap> caps{Cap{poly.vertices[0], 0.3}};
    SymTensor got = spherical_polygon_moment(poly, 2, caps, w);
    std::mt19937_64 mrng(7);
    SymTensor acc(3, 2);
    const int n = 400000;
    const auto& V = poly.vertices;
    for (int i = 0; i < n; ++i) {
      Vec u = random_unit(mrng, 3);
      bool in = caps[0].contains(u);
      for (std::size_t k = 0; k < V.size() && in; ++k) in = cross3(V[k], V[(k + 1) % V.size()]).dot(u) >= 0;
      if (in) acc.axpy(w(u), vector_power(u, 2));
    }
    acc *= 4 * M_PI / n;
    EXPECT_LT((got - acc).max_norm(), 0.01);
    return;
  }
  FAIL() << "no large vertex cone";
}

TEST(SphericalPolygon, SplittingIsAdditive) {
  // Octant split by the plane x = y into two triangles.
  SphericalPolygon oct{{vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)}};
  Vec m = vec3(1, 1, 0).normalized();
  SphericalPolygon a{{vec3(1, 0, 0), m, vec3(0, 0, 1)}};
  SphericalPolygon b{{m, vec3(0, 1, 0), vec3(0, 0, 1)}};
  WeightFn w = WeightFn::taper(vec3(0.3, 0.1, 0.9).normalized(), 0.2, 0.8);
  for (int s = 0; s <= 4; ++s) {
    SymTensor whole = spherical_polygon_moment(oct, s, std::span<const Cap>(), w);
    SymTensor parts = spherical_polygon_moment(a, s, std::span<const Cap>(), w) +
                      spherical_polygon_moment(b, s, std::span<const Cap>(), w);
    EXPECT_LT((whole - parts).max_norm(), 1e-10);
  }
}

TEST(SphericalPolygon, RotationEquivariance) {
  SphericalPolygon oct{{vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)}};
  Rotation r = Rotation::about_axis(vec3(1, 2, -1), 0.6);
  SphericalPolygon roct{{r.apply(oct.vertices[0]), r.apply(oct.vertices[1]), r.apply(oct.vertices[2])}};
  std::vector<Cap> caps{Cap{vec3(1, 1, 0).normalized(), 0.5}};
  std::vector<Cap> rcaps{Cap{r.apply(caps[0].c), 0.5}};
  WeightFn w = WeightFn::taper(vec3(0, 0, 1), 0.1, 0.6);
  for (int s = 0; s <= 3; ++s) {
    SymTensor m = spherical_polygon_moment(oct, s, caps, w);
    SymTensor rm = spherical_polygon_moment(roct, s, rcaps, w.rotated(r));
    EXPECT_LT((rm - rotate_tensor(m, r)).max_norm(), 1e-9);
  }
}

TEST(SphericalPolygon, RefinementCapReported) {
  SphericalPolygon oct{{vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)}};
  std::vector<Cap> caps{Cap{vec3(1, 1, 0).normalized(), 0.8}, Cap{vec3(0, 1, 1).normalized(), 0.8}};
  SphQuadOptions opt;
  opt.max_depth = 1;
  opt.rel_tol = 1e-14;
  try {
    spherical_polygon_moment(oct, 2, caps, WeightFn::constant(), opt);
    FAIL() << "expected a refinement error";
  } catch (const RefinementError& e) {
    EXPECT_GT(e.previous(), 0.0);
    EXPECT_GT(e.last(), 0.0);
  }
}

TEST(Region, InclusionExclusionOfOverlappingProducts) {
  RegionProduct a = RegionProduct::box(vec3(0, 0, 0), vec3(1, 1, 1));
  RegionProduct b = RegionProduct::box(vec3(0.5, 0, 0), vec3(2, 1, 1));
  RegionSpec r = RegionSpec::union_of({a, b});
  auto terms = r.expand();
  ASSERT_EQ(terms.size(), 3u);
  double total = 0.0;
  for (const auto& t : terms) total += t.sign;
  EXPECT_EQ(total, 1.0);
  EXPECT_TRUE(r.contains(vec3(1.5, 0.5, 0.5), vec3(0, 0, 1)));
  EXPECT_FALSE(r.contains(vec3(2.5, 0.5, 0.5), vec3(0, 0, 1)));
  EXPECT_THROW(RegionSpec::union_of({RegionProduct{{}, {Cap{vec3(0, 0, 2), 0.0}}}}), std::invalid_argument);
}

TEST(Weight, TaperProfile) {
  WeightFn w = WeightFn::taper(vec3(0, 0, -1), 0.5, 0.9);
  EXPECT_EQ(w(vec3(0, 0, 1)), 0.0);
  EXPECT_EQ(w(vec3(0, 0, -1)), 1.0);
  EXPECT_NEAR(w.profile(0.7), 0.5, 1e-15);
  EXPECT_THROW(WeightFn::taper(vec3(0, 0, 1), 0.9, 0.5), std::invalid_argument);
}
