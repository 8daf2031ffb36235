#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loctens/approximation.hpp"
#include "loctens/valuations.hpp"

using namespace loctens;

namespace {

Polytope unit_cube() {
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  return Polytope::hull(pts);
}

Polytope random_hull(std::mt19937_64& rng, int dim, int n) {
  std::normal_distribution<double> nd;
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) {
    Vec p(dim);
    for (int k = 0; k < dim; ++k) p[k] = nd(rng);
    pts.push_back(p);
  }
  return Polytope::hull(pts);
}

const RegionSpec kFull = RegionSpec::full();
const WeightFn kOne = WeightFn::constant();

// Edge (0,0,0)-(1,0,0) of the unit cube and nothing else.
RegionSpec bottom_front_edge() {
  return RegionSpec::union_of({RegionProduct::box(vec3(0, 0, 0), vec3(1, 0, 0))});
}

}  // namespace

TEST(Spec, ParseAndPrint) {
  FunctionalSpec a = FunctionalSpec::parse("Phi(1,0,2,1)");
  EXPECT_EQ(a, FunctionalSpec::phi(3, 1, 0, 2, 1));
  EXPECT_EQ(a.rank(), 4);
  EXPECT_EQ(FunctionalSpec::parse(a.to_string()), a);
  FunctionalSpec b = FunctionalSpec::parse("PhiTilde3(0,0,1);m=1");
  EXPECT_EQ(b.rank(), 2 + 2 + 2);
  EXPECT_TRUE(b.orientation_odd());
  EXPECT_FALSE(a.orientation_odd());
  FunctionalSpec c = FunctionalSpec::parse("Phi(1,0,0,0);dim=2");
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(FunctionalSpec::parse("PhiTilde2(1,0,1)").rank(), 2);
  EXPECT_EQ(FunctionalSpec::parse("W1").family, Family::W1);
}

TEST(Spec, InvalidCombinationsRejected) {
  EXPECT_THROW(FunctionalSpec::parse("Phi(3,0,0,0)"), SpecError);
  EXPECT_THROW(FunctionalSpec::parse("Phi(1,0,0,-1)"), SpecError);
  EXPECT_THROW(FunctionalSpec::parse("PhiTilde2(2,0,0)"), SpecError);
  EXPECT_THROW(FunctionalSpec::parse("Nope(1,2)"), SpecError);
  EXPECT_THROW(FunctionalSpec::parse("Phi(1,0,0"), SpecError);
  EXPECT_THROW(FunctionalSpec::parse("PhiTilde3(0,0,0);dim=2"), SpecError);
}

TEST(Phi, CubeIntrinsicVolumes) {
  Polytope c = unit_cube();
  const double want[] = {1.0, 3.0, 3.0};
  for (int k = 0; k <= 2; ++k) {
    double v = eval_phi(c, k, 0, 0, 0, 0, kFull, kOne).coeffs()[0];
    EXPECT_NEAR(v, want[k], 1e-9 * want[k]) << k;
  }
}

TEST(Phi, EulerCharacteristicOfRandomPolytopes) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    EXPECT_NEAR(eval_phi(random_hull(rng, 3, 15), 0, 0, 0, 0, 0, kFull, kOne).coeffs()[0], 1.0, 1e-9);
    EXPECT_NEAR(eval_phi(random_hull(rng, 2, 9), 0, 0, 0, 0, 0, kFull, kOne).coeffs()[0], 1.0, 1e-12);
  }
}

TEST(Phi, VertexConesGiveSphereMoments) {
  // Sum of u^2 over all vertex cones is the sphere moment 4 pi Q / 3;
  // with 1/(2! omega_5) and omega_5 = 8 pi^2 / 3 this is Q / (4 pi).
  std::mt19937_64 rng(32);
  Polytope P = random_hull(rng, 3, 12);
  SymTensor got = eval_phi(P, 0, 0, 2, 0, 0, kFull, kOne);
  EXPECT_TRUE(got.approx_equal((1.0 / (4 * M_PI)) * metric_Q(3), 1e-10, 0.0));
}

TEST(Phi, OmegaValues) {
  EXPECT_NEAR(omega(1), 2.0, 1e-15);
  EXPECT_NEAR(omega(2), 2 * M_PI, 1e-14);
  EXPECT_NEAR(omega(3), 4 * M_PI, 1e-14);
  EXPECT_NEAR(omega(5), 8 * M_PI * M_PI / 3, 1e-12);
}

TEST(Phi, MetricMultiplicationIsExact) {
  std::mt19937_64 rng(33);
  Polytope P = random_hull(rng, 3, 10);
  for (int m = 1; m <= 2; ++m) {
    EXPECT_EQ(eval_phi(P, 1, 1, 1, 1, m, kFull, kOne),
              sym_product(metric_power(3, m), eval_phi(P, 1, 1, 1, 1, 0, kFull, kOne)));
    EXPECT_EQ(eval_phitilde3(P, 0, 1, 0, m, kFull, kOne),
              sym_product(metric_power(3, m), eval_phitilde3(P, 0, 1, 0, 0, kFull, kOne)));
  }
}

TEST(Phi, FacetRegionClipsArea) {
  Polytope c = unit_cube();
  RegionSpec strip = RegionSpec::union_of({RegionProduct::box(vec3(-0.1, -0.1, -0.1), vec3(1.1, 0.2, 0.2))});
  // Facets x=0, x=1 contribute 0.2 * 0.2 each, y=0 and z=0 contribute 0.2 each; halved.
  EXPECT_NEAR(eval_phi(c, 2, 0, 0, 0, 0, strip, kOne).coeffs()[0], 0.24, 1e-14);
}

TEST(PhiTilde3, IsolatedCubeEdge) {
  Polytope c = unit_cube();
  SymTensor t = eval_phitilde3(c, 0, 0, 0, 0, bottom_front_edge(), kOne);
  Vec e1 = vec3(1, 0, 0), e2 = vec3(0, 1, 0), e3 = vec3(0, 0, 1);
  EXPECT_NEAR(t.eval({e1, e2}), 0.5, 1e-14);
  EXPECT_NEAR(t.eval({e1, e3}), -0.5, 1e-14);
  EXPECT_NEAR(t.eval({e1, e1}), 0.0, 1e-14);
  EXPECT_TRUE(t.approx_equal(sym_product(vector_tensor(e1), vector_tensor(vec3(0, 1, -1))), 1e-14, 0.0));
}

TEST(PhiTilde3, CubeTotalsVanish) {
  Polytope c = unit_cube();
  for (int r = 0; r <= 3; ++r)
    for (int s = 0; s <= 3; ++s) EXPECT_LT(eval_phitilde3(c, r, s, 0, 0, kFull, kOne).max_norm(), 1e-12);
}

TEST(PhiTilde3, EdgeVectorSignIsIrrelevant) {
  std::mt19937_64 rng(34);
  Polytope P = random_hull(rng, 3, 14);
  RegionSpec reg = RegionSpec::union_of({RegionProduct{{Halfspace{vec3(1, 0, 0), 0.2}}, {Cap{vec3(0, 1, 0), -0.2}}}});
  WeightFn w = WeightFn::taper(vec3(0, 0.6, 0.8), -0.3, 0.5);
  EvalOptions flip, rnd;
  flip.edge_sign = EdgeSign::Flipped;
  rnd.edge_sign = EdgeSign::Random;
  rnd.sign_seed = 99;
  for (int j = 0; j <= 2; ++j) {
    SymTensor a = eval_phitilde3(P, 1, 1, j, 0, reg, w);
    EXPECT_EQ(a, eval_phitilde3(P, 1, 1, j, 0, reg, w, flip));
    EXPECT_EQ(a, eval_phitilde3(P, 1, 1, j, 0, reg, w, rnd));
  }
}

TEST(PhiTilde2, Triangle) {
  Polytope tri = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1)});
  SymTensor t = eval_phitilde2(tri, 1, 0, 1, 0, kFull, kOne);
  Vec e1 = vec2(1, 0), e2 = vec2(0, 1);
  EXPECT_NEAR(t.eval({e1, e1}), -1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(t.eval({e2, e2}), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(t.eval({e1, e2}), 0.0, 1e-14);
}

TEST(PhiTilde2, SquareVanishes) {
  Polytope sq = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)});
  EXPECT_LT(eval_phitilde2(sq, 1, 0, 1, 0, kFull, kOne).max_norm(), 1e-15);
  EXPECT_LT(eval_phitilde2(sq, 0, 1, 0, 0, kFull, kOne).max_norm(), 1e-15);
}

TEST(PhiTilde2, PositionOnlyTotalsVanish) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    Polytope P = random_hull(rng, 2, 9);
    for (int r = 0; r <= 4; ++r) EXPECT_LT(eval_phitilde2(P, 1, r, 0, 0, kFull, kOne).max_norm(), 1e-12);
  }
}

TEST(Globals2d, AreaAndRelations) {
  Polytope sq = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)});
  EXPECT_NEAR(eval_globals_2d(sq, FunctionalSpec::parse("GlobalPsi2Vol(0)")).coeffs()[0], 1.0, 1e-15);
  std::mt19937_64 rng(36);
  Polytope P = random_hull(rng, 2, 10);
  EXPECT_LT(eval_globals_2d(P, FunctionalSpec::parse("GlobalPhiTilde2(1,2,0)")).max_norm(), 1e-10);
  SymTensor a = eval_globals_2d(P, FunctionalSpec::parse("GlobalPhiTilde2(1,1,1)"));
  SymTensor b = eval_globals_2d(P, FunctionalSpec::parse("GlobalPhiTilde2(0,2,0)"));
  EXPECT_LT((2.0 * a + 1.0 * b).max_norm(), 1e-9);
  // Edge totals of u^0 give the perimeter.
  double perim = 0.0;
  for (const Face& e : P.faces(1)) perim += e.measure;
  EXPECT_NEAR(eval_globals_2d(P, FunctionalSpec::parse("GlobalPsi2(1,0,0)")).coeffs()[0], perim, 1e-12);
}

TEST(GlobalT3, Vanishes) {
  EXPECT_LT(eval_global_T3(unit_cube(), 0, 0).max_norm(), 1e-14);
  std::mt19937_64 rng(37);
  Polytope P = random_hull(rng, 3, 20);
  double scale = std::pow(P.diameter(), 3);
  EXPECT_LT(eval_global_T3(P, 2, 1).max_norm(), 1e-8 * scale);
  EXPECT_LT(eval_global_T3(translate(P, vec3(0.7, -0.2, 1.1)), 2, 1).max_norm(), 1e-8 * scale);
}

TEST(W1, Examples) {
  Polytope c = unit_cube();
  EXPECT_NEAR(eval_W1(c, kOne), 6 * M_PI, 1e-12);
  // Edge arcs lie in the coordinate planes, about 35 degrees from the diagonal.
  EXPECT_EQ(eval_W1(c, WeightFn::taper(vec3(1, 1, 1).normalized(), 0.9, 0.95)), 0.0);
  EXPECT_GT(eval_W1(c, WeightFn::taper(vec3(0, 0, 1), 0.99, 0.999)), 0.0);
  std::mt19937_64 rng(38);
  Polytope P = random_hull(rng, 3, 12);
  WeightFn w = WeightFn::taper(vec3(0.2, 0.3, -1).normalized(), 0.1, 0.7);
  EXPECT_NEAR(eval_W1(scale(P, 1.7), w), 1.7 * eval_W1(P, w), 1e-12);
  EXPECT_GE(eval_W1(P, w), 0.0);
  // With f = 1 it is a multiple of the edge intrinsic volume.
  EXPECT_NEAR(eval_W1(P, kOne), omega(2) * eval_phi(P, 1, 0, 0, 0, 0, kFull, kOne).coeffs()[0], 1e-10);
}

TEST(Locality, AgreeingPolytopesGiveAgreeingValues) {
  Polytope c = unit_cube();
  Polytope cut = clip_halfspace(c, Halfspace{vec3(1, 1, 1).normalized(), 2.5 / std::sqrt(3.0)});
  RegionSpec near = RegionSpec::union_of({RegionProduct::box(vec3(-0.1, -0.1, -0.1), vec3(1.1, 0.2, 0.2))});
  for (const auto& spec : {FunctionalSpec::phitilde3(1, 1, 1), FunctionalSpec::phi(3, 1, 1, 2, 1),
                           FunctionalSpec::phi(3, 0, 0, 2, 0), FunctionalSpec::phi(3, 2, 2, 0, 0)}) {
    SymTensor a = evaluate(c, spec, near, kOne), b = evaluate(cut, spec, near, kOne);
    EXPECT_LT((a - b).max_norm(), 1e-10 * std::max(1.0, a.max_norm())) << spec.to_string();
  }
}

TEST(Evaluate, DimensionMismatchRejected) {
  Polytope sq = Polytope::hull({vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)});
  EXPECT_THROW(evaluate(sq, FunctionalSpec::phitilde3(0, 0, 0), kFull, kOne), std::invalid_argument);
}

TEST(SmoothCap, ZeroWeight) {
  EXPECT_TRUE(eval_smooth_cap_phitilde(0.5, 0, 1, WeightFn::constant(0.0)).is_zero());
}

TEST(SmoothCap, CurvatureData) {
  // Paraboloid z = |x|^2 at x = 0: both principal curvatures 2.
  SmoothCapSample s = smooth_cap_sample(0.0, 0.0);
  EXPECT_NEAR(s.k1, 2.0, 1e-15);
  EXPECT_NEAR(s.k2, 2.0, 1e-15);
  EXPECT_TRUE(s.u.isApprox(vec3(0, 0, -1)));
  SmoothCapSample q = smooth_cap_sample(0.3, 0.4);
  EXPECT_NEAR(q.u.norm(), 1.0, 1e-15);
  EXPECT_NEAR(q.b1.dot(q.u), 0.0, 1e-15);
  EXPECT_NEAR(q.b2.dot(q.u), 0.0, 1e-15);
  EXPECT_NEAR(q.b1.dot(q.b2), 0.0, 1e-15);
  // Normal to the graph: (2x, -1) normalized.
  EXPECT_TRUE(q.u.isApprox(vec3(0.6, 0.8, -1).normalized()));
}

TEST(SmoothCap, EquivariantUnderRotationsAboutAxis) {
  WeightFn f = WeightFn::taper(smooth_cap_sample(0.2, 0.1).u, std::cos(0.25), std::cos(0.12));
  // Rotations by a multiple of the angular step map the grid to itself.
  SmoothCapOptions coarse;
  Rotation step = Rotation::about_axis(vec3(0, 0, 1), 2 * M_PI * 3 / coarse.angular);
  SmoothCapOptions fine{2 * coarse.radial, 2 * coarse.angular};
  for (int s = 0; s <= 2; ++s) {
    SymTensor a = eval_smooth_cap_phitilde(0.5, 0, s, f, coarse);
    SymTensor b = eval_smooth_cap_phitilde(0.5, 0, s, f.rotated(step), coarse);
    EXPECT_LT((b - rotate_tensor(a, step)).max_norm(), 1e-14);
  }
  for (double angle : {0.7, 2.0}) {
    Rotation r = Rotation::about_axis(vec3(0, 0, 1), angle);
    for (int s = 0; s <= 2; ++s) {
      SymTensor a = eval_smooth_cap_phitilde(0.5, 0, s, f, fine);
      SymTensor b = eval_smooth_cap_phitilde(0.5, 0, s, f.rotated(r), fine);
      EXPECT_LT((b - rotate_tensor(a, r)).max_norm(), 1e-9);
    }
  }
  SymTensor bump = eval_smooth_cap_phitilde(0.5, 0, 1, bump_weight(0.5));
  Rotation r = Rotation::about_axis(vec3(0, 0, 1), 1.1);
  EXPECT_LT((rotate_tensor(bump, r) - bump).max_norm(), 1e-8);
}

TEST(SmoothCap, RimSupportRejected) {
  EXPECT_THROW(eval_smooth_cap_phitilde(0.5, 0, 0, WeightFn::constant()), std::invalid_argument);
  EXPECT_THROW(eval_smooth_cap_phitilde(0.5, 0, 0, WeightFn::taper(vec3(0, 0, -1), 0.5, 0.9)),
               std::invalid_argument);
}
