#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "loctens/polytope.hpp"
#include "loctens/spherical.hpp"
#include "loctens/tensor.hpp"

namespace loctens {

enum class Family {
  Phi,
  PhiTilde3,
  PhiTilde2,
  GlobalPsi2,
  GlobalPsi2Vol,
  GlobalPhiTilde2,
  GlobalT3,
  W1,
};

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FunctionalSpec {
  Family family = Family::Phi;
  int dim = 3;
  int k = 0;
  int r = 0;
  int s = 0;
  int j = 0;
  int m = 0;

  static FunctionalSpec phi(int dim, int k, int r, int s, int j, int m = 0);
  static FunctionalSpec phitilde3(int r, int s, int j, int m = 0);
  static FunctionalSpec phitilde2(int k, int r, int s, int m = 0);

  int rank() const;
  /// Degree of homogeneity under P -> lambda P.
  int degree() const;
  /// True for the maps that change sign under orientation reversal.
  bool orientation_odd() const;
  /// Throws SpecError naming the violated invariant.
  void validate() const;
  std::string to_string() const;
  /// Inline form, e.g. "Phi(1,0,2,1)", "PhiTilde3(0,0,1)", "PhiTilde2(1,0,1)",
  /// optional ";m=1" and ";dim=2" suffixes.
  static FunctionalSpec parse(std::string_view text);

  bool operator==(const FunctionalSpec&) const = default;
};

enum class EdgeSign { Default, Flipped, Random };

struct EvalOptions {
  EdgeSign edge_sign = EdgeSign::Default;
  std::uint64_t sign_seed = 0;
  SphQuadOptions sphere;
};

/// omega_m = 2 pi^{m/2} / Gamma(m/2), the surface area of S^{m-1}.
double omega(int m);

SymTensor eval_phi(const Polytope& P, int k, int r, int s, int j, int m, const RegionSpec& region,
                   const WeightFn& w, const EvalOptions& opt = {});
SymTensor eval_phitilde3(const Polytope& P, int r, int s, int j, int m, const RegionSpec& region,
                         const WeightFn& w, const EvalOptions& opt = {});
SymTensor eval_phitilde2(const Polytope& P, int k, int r, int s, int m, const RegionSpec& region,
                         const WeightFn& w, const EvalOptions& opt = {});
/// Psi_k^{r,s}, Psi_2^r and the total tilde maps in the plane, unnormalized.
SymTensor eval_globals_2d(const Polytope& P, const FunctionalSpec& spec);
SymTensor eval_global_T3(const Polytope& P, int r, int s, const EvalOptions& opt = {});
double eval_W1(const Polytope& P, const WeightFn& w);

SymTensor evaluate(const Polytope& P, const FunctionalSpec& spec, const RegionSpec& region,
                   const WeightFn& w, const EvalOptions& opt = {});

/// Data at the paraboloid point above (x1, x2).
struct SmoothCapSample {
  Vec x;
  Vec u;
  double k1 = 0.0;
  double k2 = 0.0;
  Vec b1;
  Vec b2;
  double K = 1.0;
};
SmoothCapSample smooth_cap_sample(double x1, double x2);

struct SmoothCapOptions {
  int radial = 128;
  int angular = 256;
};

/// The tilde map with j = 0 on the paraboloid cap of height h, weighted by f.
SymTensor eval_smooth_cap_phitilde(double h, int r, int s, const WeightFn& f,
                                   const SmoothCapOptions& opt = {});

}  // namespace loctens
