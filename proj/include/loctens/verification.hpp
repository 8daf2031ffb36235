#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "loctens/polytope.hpp"
#include "loctens/spherical.hpp"
#include "loctens/valuations.hpp"

namespace loctens {

enum class BodyGenerator { BallHull, Box, Simplex, LiftedCap };

struct RandomBodySpec {
  BodyGenerator generator = BodyGenerator::BallHull;
  int dim = 3;
  int points = 12;
  double scale_min = 0.5;
  double scale_max = 2.0;
  /// Offset of the center from the origin, at most this far.
  double max_offset = 0.5;
};

Polytope random_polytope(std::mt19937_64& rng, const RandomBodySpec& spec);
Rotation random_rotation(std::mt19937_64& rng, int dim);
/// Random proper rotation followed by the reflection across the last coordinate plane.
Rotation random_improper(std::mt19937_64& rng, int dim);
/// Valid spec of rank <= max_rank; all families of the given dimension.
FunctionalSpec random_spec(std::mt19937_64& rng, int dim, int max_rank = 6);
/// Union of one or two box-cap products around points of P.
RegionSpec random_region(std::mt19937_64& rng, const Polytope& P);
WeightFn random_weight(std::mt19937_64& rng, int dim);

struct SuiteConfig {
  std::uint64_t seed = 20240607;
  int cases = 50;
  double rtol = 1e-9;
  bool serial = false;
  /// Empty means all.
  std::vector<std::string> suites;
};

struct SuiteReport {
  std::string name;
  int cases = 0;
  int checks = 0;
  int failures = 0;
  /// Largest scaled violation seen, passing or not.
  double worst = 0.0;
  std::vector<std::string> messages;
  std::vector<std::string> notes;
  bool passed() const { return failures == 0; }
};

struct VerificationReport {
  std::uint64_t seed = 0;
  std::vector<SuiteReport> suites;
  bool passed() const;
  std::string to_json() const;
  std::string summary() const;
};

const std::vector<std::string>& suite_names();

SuiteReport run_covariance_suite(const SuiteConfig& cfg);
SuiteReport run_valuation_suite(const SuiteConfig& cfg);
SuiteReport run_translation_suite(const SuiteConfig& cfg);
SuiteReport run_homogeneity_suite(const SuiteConfig& cfg);
SuiteReport run_locality_suite(const SuiteConfig& cfg);
SuiteReport run_sign_suite(const SuiteConfig& cfg);
SuiteReport run_prop8_suite(const SuiteConfig& cfg);
SuiteReport run_thm9_suite(const SuiteConfig& cfg);
SuiteReport run_convergence_suite(const SuiteConfig& cfg);

SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg);
VerificationReport run_suites(const SuiteConfig& cfg);

/// Scaled difference |a - b|_max / max(1, |a|_max, |b|_max).
double scaled_diff(const SymTensor& a, const SymTensor& b);

struct GramResult {
  int size = 0;
  int rank = 0;
  double condition = 0.0;
};
/// Rank of the Gram matrix of {Q^m PhiTilde2(1, r, s)} with 2m + r + s + 1 = p
/// and r >= r_min, s >= 1, evaluated on the probe polygons.
GramResult thm9_gram(int p, const std::vector<Polytope>& probes, int r_min = 1);

}  // namespace loctens
