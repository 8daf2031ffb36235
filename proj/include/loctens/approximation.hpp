#pragma once

#include <span>
#include <string>
#include <vector>

#include "loctens/polytope.hpp"
#include "loctens/spherical.hpp"
#include "loctens/valuations.hpp"

namespace loctens {

struct ApproxParams {
  int N = 2;
  double h = 0.5;
  double t = 0.1;

  double beta() const;
  /// (cos r beta, sin r beta, 0)
  Vec ell(int r) const;
  /// Rotation about e3 by beta (pi/2 for N = 2).
  Rotation theta() const;
  void validate() const;
};

/// Lifted tessellation cut at height h; Minkowski average of rotated copies for odd N.
Polytope build_PNht(const ApproxParams& params);

/// Threshold of <u, -e3> below which the bump vanishes: the normal height at
/// z = h/2, moved toward 1 by the given fraction of the remaining gap.
double bump_tau0(double h, double margin = 0.02);
/// f(u) = g(<u, -e3>) vanishing outside the normals of the lower half of the cap.
WeightFn bump_weight(double h, double margin = 0.02);

/// Hausdorff distance to the paraboloid cap, from support functions on a
/// spherical Fibonacci grid.
double hausdorff_to_cap(const Polytope& P, double h, int samples = 20000);
double hausdorff_distance(const Polytope& a, const Polytope& b, int samples = 20000);

/// Edges whose normal arc meets supp f.
std::vector<int> f_edges(const Polytope& P, const WeightFn& f);

struct EdgeClass {
  int edge = -1;
  /// Index into ell, or -1 when the edge lies above no tessellation edge.
  int r = -1;
  /// Canonical direction, <v, ell_r> > 0.
  Vec v;
};
EdgeClass classify_edge(const Polytope& P, int edge, const ApproxParams& params);

struct AssumptionReport {
  bool A = false;
  bool B = false;
  bool C = false;
  /// Positive margins mean the inequality holds with room to spare.
  double margin_normal_height = 0.0;
  double margin_horizontal = 0.0;
  int f_edge_count = 0;
  int unclassified = 0;
  double margin_direction = 0.0;
  double margin_cross = 0.0;
  bool all() const { return A && B && C; }
};

AssumptionReport check_assumptions(const Polytope& P, const ApproxParams& params, const WeightFn& f,
                                   double eps);

struct AssumptionSearch {
  double h = 0.0;
  double t = 0.0;
  int steps = 0;
  AssumptionReport report;
};
/// Shrinks h until the weight conditions hold, then t until the edge
/// conditions hold.
AssumptionSearch search_parameters(int N, double eps, double h0 = 0.5, double t0 = 0.2,
                                   int max_steps = 16);

/// (a,...,a,-e3,...,-e3) with i trailing -e3.
std::vector<Vec> frame(int rank, const Vec& a, int i);

struct ConvergenceRow {
  double t = 0.0;
  SymTensor tensor;
  double value = 0.0;
  double value_rotated = 0.0;
  double D = 0.0;
  double W1 = 0.0;
  double diff = 0.0;
  double ratio = 0.0;
};

struct ConvergenceOptions {
  int N = 2;
  double h = 0.5;
  std::vector<double> ts{0.2, 0.1, 0.05, 0.025};
  /// Angle of a in the plane.
  double a_angle = 0.3;
  /// Trailing -e3 slots; negative means s of the spec.
  int trailing = -1;
  /// Rotation about e3 applied to the frame for D(t).
  double rotation_angle = 0.7;
  double bump_margin = 0.02;
  bool serial = false;
};

struct ConvergenceTable {
  FunctionalSpec spec;
  ConvergenceOptions options;
  std::vector<ConvergenceRow> rows;

  /// Convergence order from the last three rows, clamped to [1, 6]; 1 with
  /// fewer rows.
  double estimated_order() const;
  /// Extrapolation from the last two rows at the estimated order.
  double richardson() const;
  SymTensor richardson_tensor() const;
  double min_abs_D() const;
  double max_abs_D() const;
  double min_W1_over_N() const;
  std::string to_csv() const;
  std::string to_json() const;
};

ConvergenceTable convergence_experiment(const FunctionalSpec& spec, const ConvergenceOptions& opt,
                                        const WeightFn& f);
ConvergenceTable convergence_experiment(const FunctionalSpec& spec, const ConvergenceOptions& opt);

/// F_1 (nu = 1) and F_2 (nu = 2) at x(lambda) = (lambda, sqrt(1 - lambda^2), 0);
/// coeffs[j] multiplies the j-th power term.
double predict_F(int nu, double lambda, std::span<const double> coeffs, int N);

}  // namespace loctens
