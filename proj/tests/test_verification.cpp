#include <gtest/gtest.h>

#include "loctens/verification.hpp"

using namespace loctens;

namespace {

SuiteConfig small(int cases = 8) {
  SuiteConfig cfg;
  cfg.cases = cases;
  return cfg;
}

}  // namespace

TEST(Generators, Deterministic) {
  std::mt19937_64 a(5), b(5);
  RandomBodySpec spec;
  Polytope p = random_polytope(a, spec), q = random_polytope(b, spec);
  ASSERT_EQ(p.vertices().size(), q.vertices().size());
  for (std::size_t i = 0; i < p.vertices().size(); ++i) EXPECT_EQ(p.vertex(i), q.vertex(i));
}

TEST(Generators, AllKinds) {
  std::mt19937_64 rng(6);
  for (auto g : {BodyGenerator::BallHull, BodyGenerator::Box, BodyGenerator::Simplex, BodyGenerator::LiftedCap}) {
    RandomBodySpec spec;
    spec.generator = g;
    Polytope P = random_polytope(rng, spec);
    EXPECT_GT(P.volume(), 0.0);
    if (g != BodyGenerator::LiftedCap) {
      spec.dim = 2;
      EXPECT_GT(random_polytope(rng, spec).volume(), 0.0);
    }
  }
  RandomBodySpec lifted2d;
  lifted2d.generator = BodyGenerator::LiftedCap;
  lifted2d.dim = 2;
  EXPECT_THROW(random_polytope(rng, lifted2d), std::invalid_argument);
}

TEST(Generators, RotationsAndSpecs) {
  std::mt19937_64 rng(7);
  for (int dim : {2, 3}) {
    EXPECT_TRUE(random_rotation(rng, dim).proper());
    EXPECT_FALSE(random_improper(rng, dim).proper());
    for (int i = 0; i < 50; ++i) {
      FunctionalSpec s = random_spec(rng, dim, 5);
      EXPECT_LE(s.rank(), 5);
      EXPECT_NO_THROW(s.validate());
    }
  }
}

TEST(Suites, ScaledDiff) {
  SymTensor a = SymTensor::scalar(3, 100.0), b = SymTensor::scalar(3, 101.0);
  EXPECT_NEAR(scaled_diff(a, b), 1.0 / 101.0, 1e-15);
  EXPECT_NEAR(scaled_diff(SymTensor::scalar(3, 0.1), SymTensor::scalar(3, 0.2)), 0.1, 1e-15);
}

TEST(Suites, EachPassesOnFewCases) {
  for (const auto& name : suite_names()) {
    if (name == "convergence") continue;
    SuiteReport r = run_suite(name, small());
    EXPECT_TRUE(r.passed()) << name << ": " << (r.messages.empty() ? "" : r.messages[0]);
    EXPECT_GT(r.checks, 0) << name;
  }
}

TEST(Suites, UnknownNameRejected) { EXPECT_THROW(run_suite("nope", small()), std::invalid_argument); }

TEST(Suites, ReportsAreDeterministic) {
  SuiteConfig cfg = small(6);
  cfg.suites = {"covariance", "translation", "thm9"};
  std::string a = run_suites(cfg).to_json();
  std::string b = run_suites(cfg).to_json();
  EXPECT_EQ(a, b);
  cfg.serial = true;
  EXPECT_EQ(run_suites(cfg).to_json(), a);
}

TEST(Suites, GramRanks) {
  std::mt19937_64 rng(8);
  RandomBodySpec spec;
  spec.dim = 2;
  std::vector<Polytope> probes;
  for (int i = 0; i < 10; ++i) probes.push_back(random_polytope(rng, spec));
  const int sizes[] = {0, 0, 0, 1, 2, 4};
  for (int p = 1; p <= 5; ++p) {
    GramResult g = thm9_gram(p, probes);
    EXPECT_EQ(g.size, sizes[p]) << p;
    EXPECT_EQ(g.rank, g.size) << p;
  }
}
