#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loctens/polytope.hpp"
#include "loctens/spherical.hpp"

using namespace loctens;

namespace {

Polytope unit_cube() {
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  return Polytope::hull(pts);
}

Polytope random_hull(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(vec3(nd(rng), nd(rng), nd(rng)));
  return Polytope::hull(pts);
}

int find_facet_with_normal(const Polytope& P, const Vec& n) {
  for (std::size_t i = 0; i < P.facets().size(); ++i)
    if (const auto* pc = std::get_if<PointCone>(&P.facets()[i].cone); pc && (pc->u - n).norm() < 1e-12)
      return static_cast<int>(i);
  return -1;
}

// Angle between the outer normals of the two facets containing edge e.
double dihedral_exterior(const Polytope& P, int e) {
  const Face& E = P.faces(1)[e];
  std::vector<Vec> normals;
  auto hs = P.halfspaces();
  for (const auto& h : hs) {
    bool a = std::abs(h.signed_distance(P.vertex(E.vertices[0]))) < 1e-9;
    bool b = std::abs(h.signed_distance(P.vertex(E.vertices[1]))) < 1e-9;
    if (a && b) normals.push_back(h.normal);
  }
  EXPECT_EQ(normals.size(), 2u);
  return std::acos(std::clamp(normals[0].dot(normals[1]), -1.0, 1.0));
}

}  // namespace

TEST(Hull, CubeCombinatorics) {
  Polytope c = unit_cube();
  EXPECT_EQ(c.vertices().size(), 8u);
  EXPECT_EQ(c.faces(1).size(), 12u);
  EXPECT_EQ(c.facets().size(), 6u);
  EXPECT_NEAR(c.volume(), 1.0, 1e-14);
  EXPECT_NEAR(c.diameter(), std::sqrt(3.0), 1e-14);
}

TEST(Hull, SimplexCombinatorics) {
  Polytope s = Polytope::hull({vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)});
  EXPECT_EQ(s.vertices().size(), 4u);
  EXPECT_EQ(s.faces(1).size(), 6u);
  EXPECT_EQ(s.facets().size(), 4u);
  EXPECT_NEAR(s.volume(), 1.0 / 6.0, 1e-15);
}

TEST(Hull, InteriorPointDiscarded) {
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  pts.push_back(vec3(0.5, 0.5, 0.5));
  Polytope c = Polytope::hull(pts);
  EXPECT_EQ(c.vertices().size(), 8u);
  EXPECT_EQ(c.facets().size(), 6u);
}

TEST(Hull, CoplanarPointsMergeIntoOneFacet) {
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  pts.push_back(vec3(0.5, 0.5, 1.0));
  pts.push_back(vec3(1.0, 0.3, 0.2));
  Polytope c = Polytope::hull(pts);
  EXPECT_EQ(c.vertices().size(), 8u);
  EXPECT_EQ(c.facets().size(), 6u);
}

TEST(Hull, Idempotent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Polytope a = random_hull(rng, 25);
    Polytope b = Polytope::hull(a.vertices());
    EXPECT_EQ(a.vertices().size(), b.vertices().size());
    EXPECT_EQ(a.faces(1).size(), b.faces(1).size());
    EXPECT_EQ(a.facets().size(), b.facets().size());
    EXPECT_NEAR(a.volume(), b.volume(), 1e-12);
    // Euler characteristic.
    EXPECT_EQ(static_cast<int>(a.vertices().size() - a.faces(1).size() + a.facets().size()), 2);
  }
}

TEST(Hull, DegenerateInputRejected) {
  EXPECT_THROW(Polytope::hull({vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0), vec3(1, 1, 0)}), DegenerateError);
  EXPECT_THROW(Polytope::hull({vec2(0, 0), vec2(1, 1), vec2(2, 2)}), DegenerateError);
}

TEST(Hull, PolygonInThePlane) {
  Polytope sq = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1), vec2(0.5, 0.5)});
  EXPECT_EQ(sq.vertices().size(), 4u);
  EXPECT_EQ(sq.faces(1).size(), 4u);
  EXPECT_NEAR(sq.volume(), 1.0, 1e-15);
}

TEST(NormalCone, CubeExamples) {
  Polytope c = unit_cube();
  EXPECT_GE(find_facet_with_normal(c, vec3(0, 0, 1)), 0);
  for (std::size_t e = 0; e < c.faces(1).size(); ++e) {
    const Face& E = c.faces(1)[e];
    const Vec& a = c.vertex(E.vertices[0]);
    const Vec& b = c.vertex(E.vertices[1]);
    if (a[1] == 0 && a[2] == 0 && b[1] == 0 && b[2] == 0) {
      const auto& arc = std::get<Arc>(E.cone);
      EXPECT_NEAR(arc.length(), M_PI / 2, 1e-14);
      Vec u0 = arc.at(arc.a0), u1 = arc.at(arc.a1);
      bool ends = ((u0 - vec3(0, -1, 0)).norm() < 1e-12 && (u1 - vec3(0, 0, -1)).norm() < 1e-12) ||
                  ((u1 - vec3(0, -1, 0)).norm() < 1e-12 && (u0 - vec3(0, 0, -1)).norm() < 1e-12);
      EXPECT_TRUE(ends);
    }
  }
}

TEST(NormalCone, SquareVertex) {
  Polytope sq = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)});
  bool seen = false;
  for (const Face& v : sq.faces(0)) {
    if ((sq.vertex(v.vertices[0]) - vec2(1, 1)).norm() > 1e-12) continue;
    seen = true;
    const auto& arc = std::get<Arc>(v.cone);
    EXPECT_NEAR(arc.length(), M_PI / 2, 1e-14);
    EXPECT_NEAR((arc.at(arc.a0) - vec2(1, 0)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((arc.at(arc.a1) - vec2(0, 1)).norm(), 0.0, 1e-12);
  }
  EXPECT_TRUE(seen);
}

TEST(NormalCone, ArcLengthIsExteriorDihedralAngle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    Polytope P = random_hull(rng, 20);
    for (std::size_t e = 0; e < P.faces(1).size(); ++e) {
      const auto& arc = std::get<Arc>(P.faces(1)[e].cone);
      EXPECT_NEAR(arc.length(), dihedral_exterior(P, static_cast<int>(e)), 1e-10);
      EXPECT_GT(arc.length(), 0.0);
      EXPECT_LT(arc.length(), M_PI);
    }
  }
}

TEST(NormalCone, VertexConesTileTheSphere) {
  std::mt19937_64 rng(13);
  Polytope P = random_hull(rng, 30);
  double area = 0.0;
  for (const Face& v : P.faces(0)) area += spherical_area(std::get<SphericalPolygon>(v.cone));
  EXPECT_NEAR(area, 4 * M_PI, 1e-10);
}

TEST(NormalCone, ConesAreOrthogonalToFaces) {
  std::mt19937_64 rng(14);
  Polytope P = random_hull(rng, 20);
  for (const Face& e : P.faces(1)) {
    const auto& arc = std::get<Arc>(e.cone);
    Vec d = e.direction_basis[0];
    EXPECT_NEAR(arc.p.dot(d), 0.0, 1e-12);
    EXPECT_NEAR(arc.q.dot(d), 0.0, 1e-12);
  }
}

TEST(NormalCone, CubeIntrinsicVolumeData) {
  Polytope c = unit_cube();
  double facet_area = 0.0, edge_angle = 0.0, vertex_area = 0.0;
  for (const Face& f : c.facets()) facet_area += f.measure;
  for (const Face& e : c.faces(1)) edge_angle += e.measure * cone_measure(e.cone);
  for (const Face& v : c.faces(0)) vertex_area += cone_measure(v.cone);
  EXPECT_NEAR(facet_area, 6.0, 1e-12);
  EXPECT_NEAR(edge_angle, 12 * M_PI / 2, 1e-12);
  EXPECT_NEAR(vertex_area, 4 * M_PI, 1e-9);
}

TEST(FaceMoment, Segments) {
  EXPECT_TRUE(segment_moment(vec3(0, 0, 0), vec3(1, 0, 0), 1).approx_equal(0.5 * vector_tensor(vec3(1, 0, 0))));
  SymTensor t = segment_moment(vec2(0, 0), vec2(1, 0), 2);
  EXPECT_NEAR(t.coeff({2, 0, 0}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.coeff({1, 1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(t.coeff({0, 2, 0}), 0.0, 1e-15);
}

TEST(FaceMoment, CubeTopFacet) {
  Polytope c = unit_cube();
  int top = find_facet_with_normal(c, vec3(0, 0, 1));
  ASSERT_GE(top, 0);
  EXPECT_NEAR(face_moment(c, c.facets()[top], 0).coeffs()[0], 1.0, 1e-15);
  // Centroid (1/2, 1/2, 1).
  SymTensor m1 = face_moment(c, c.facets()[top], 1);
  EXPECT_TRUE(m1.approx_equal(vector_tensor(vec3(0.5, 0.5, 1.0))));
}

TEST(FaceMoment, VolumeMomentsAgainstMonteCarlo) {
  std::mt19937_64 rng(15);
  Polytope P = Polytope::hull({vec3(0, 0, 0), vec3(2, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1.5), vec3(1, 1, 1)});
  SymTensor exact = volume_moment(P, 2);
  std::uniform_real_distribution<double> u(0, 2);
  const int n = 400000;
  SymTensor mc(3, 2);
  for (int i = 0; i < n; ++i) {
    Vec x = vec3(u(rng), u(rng) / 2, u(rng) * 0.75);
    if (P.contains(x)) mc.axpy(1.0, vector_power(x, 2));
  }
  mc *= 2.0 * 1.0 * 1.5 / n;
  EXPECT_LT((exact - mc).max_norm(), 0.01 * exact.max_norm());
}

TEST(FaceMoment, SimplexMomentsAgreeWithDecomposition) {
  std::vector<Vec> s{vec3(0.1, 0.2, 0.3), vec3(1.3, 0.1, -0.2), vec3(0.2, 1.1, 0.4), vec3(-0.3, 0.2, 1.2)};
  Polytope P = Polytope::hull(s);
  for (int r = 0; r <= 4; ++r) EXPECT_TRUE(volume_moment(P, r).approx_equal(simplex_moment(s, r)));
}

TEST(Clip, CubeExamples) {
  Polytope c = unit_cube();
  Polytope half = clip_halfspace(c, Halfspace{vec3(0, 0, 1), 0.5});
  EXPECT_NEAR(half.volume(), 0.5, 1e-14);
  EXPECT_EQ(half.vertices().size(), 8u);
  Polytope same = clip_halfspace(c, Halfspace{vec3(0, 0, 1), 2.0});
  EXPECT_NEAR(same.volume(), 1.0, 1e-14);
  EXPECT_EQ(same.vertices().size(), 8u);
  EXPECT_THROW(clip_halfspace(c, Halfspace{vec3(0, 0, 1), -1.0}), DegenerateError);
}

TEST(Clip, SimplexFrustum) {
  Polytope s = Polytope::hull({vec3(0, 0, 0), vec3(2, 0, 0), vec3(0, 2, 0), vec3(0, 0, 2)});
  Polytope f = clip_halfspace(s, Halfspace{vec3(0, 0, 1), 1.0});
  // Big simplex 8/6 minus the apex simplex of edge 1: 1/6.
  EXPECT_EQ(f.vertices().size(), 6u);
  EXPECT_NEAR(f.volume(), 8.0 / 6.0 - 1.0 / 6.0, 1e-14);
  EXPECT_EQ(f.facets().size(), 5u);
}

TEST(Clip, ComplementaryVolumesAdd) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    Polytope P = random_hull(rng, 20);
    Vec w = vec3(nd(rng), nd(rng), nd(rng)).normalized();
    double c = 0.2 * nd(rng);
    Polytope a = clip_halfspace(P, Halfspace{w, c});
    Polytope b = clip_halfspace(P, Halfspace{-w, -c});
    EXPECT_NEAR(a.volume() + b.volume(), P.volume(), 1e-10);
  }
}

TEST(Minkowski, Examples) {
  // Triangle plus a unit segment along e2: area 1/2 plus width 1 times length 1.
  Polytope tri = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1)});
  Polytope sum = minkowski_sum(tri, std::vector<Vec>{vec2(0, 0), vec2(0, 1)});
  EXPECT_NEAR(sum.volume(), 1.5, 1e-14);
  EXPECT_EQ(sum.vertices().size(), 4u);
  // Square plus its rotation by 45 degrees is the regular octagon.
  Polytope sq = Polytope::hull({vec2(-1, -1), vec2(1, -1), vec2(-1, 1), vec2(1, 1)});
  Polytope oct = minkowski_sum(sq, apply_rotation(sq, Rotation::planar(M_PI / 4)));
  EXPECT_EQ(oct.vertices().size(), 8u);
  // Mixed area of two squares: 4 + 4 + 2 * (perimeter * inradius of the other / 2).
  EXPECT_NEAR(oct.volume(), 4.0 + 4.0 + 2.0 * 8.0 * std::sqrt(2.0) / 2.0, 1e-12);
  Polytope c = unit_cube();
  EXPECT_NEAR(scale(c, 2.0).volume(), 8.0, 1e-13);
  std::vector<Vec> point{vec3(0.3, -1, 2)};
  Polytope moved = minkowski_sum(c, point);
  Polytope trans = translate(c, vec3(0.3, -1, 2));
  EXPECT_NEAR(moved.volume(), trans.volume(), 1e-14);
  ASSERT_EQ(moved.vertices().size(), trans.vertices().size());
  for (const Vec& v : moved.vertices()) EXPECT_TRUE(trans.contains(v, 1e-12));
  EXPECT_THROW(scale(c, -1.0), std::invalid_argument);
  EXPECT_THROW(scale(c, 0.0), DegenerateError);
}

TEST(Minkowski, CubePlusCubeIsScaledCube) {
  Polytope c = unit_cube();
  Polytope s = minkowski_sum(c, c);
  EXPECT_EQ(s.vertices().size(), 8u);
  EXPECT_NEAR(s.volume(), 8.0, 1e-12);
}

TEST(Transforms, RotationPreservesGeometry) {
  std::mt19937_64 rng(17);
  Polytope P = random_hull(rng, 15);
  Rotation r = Rotation::about_axis(vec3(1, -2, 0.5), 1.1);
  Polytope Q = apply_rotation(P, r);
  EXPECT_NEAR(Q.volume(), P.volume(), 1e-12);
  EXPECT_EQ(Q.faces(1).size(), P.faces(1).size());
  EXPECT_TRUE(volume_moment(Q, 2).approx_equal(rotate_tensor(volume_moment(P, 2), r)));
}
