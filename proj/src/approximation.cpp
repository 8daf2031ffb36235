#include "loctens/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace loctens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec e3() { return vec3(0, 0, 1); }

/// Lower hull of the lifted lattice {t(i z1 + j z2)} cut at height h.
Polytope lifted_cap(const Vec& z1, const Vec& z2, double h, double t) {
  const double R = std::sqrt(h) + 2.0 * t;
  const double cross = std::abs(z1[0] * z2[1] - z1[1] * z2[0]);
  const int range = static_cast<int>(std::ceil(R / (t * cross))) + 2;
  std::vector<Vec> pts;
  for (int i = -range; i <= range; ++i)
    for (int j = -range; j <= range; ++j) {
      double x = t * (i * z1[0] + j * z2[0]);
      double y = t * (i * z1[1] + j * z2[1]);
      if (x * x + y * y <= R * R) pts.push_back(vec3(x, y, x * x + y * y));
    }
  Polytope P = Polytope::hull(pts);
  return clip_halfspace(P, Halfspace{e3(), h});
}

/// Support function of {|x'|^2 <= z <= h}.
double cap_support(const Vec& u, double h) {
  double hor = std::hypot(u[0], u[1]);
  double rim = std::sqrt(h) * hor + u[2] * h;
  if (u[2] >= 0.0) return rim;
  double rho = hor / (-2.0 * u[2]);
  if (rho <= std::sqrt(h)) return hor * hor / (-4.0 * u[2]);
  return rim;
}

double support(const Polytope& P, const Vec& u) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& v : P.vertices()) best = std::max(best, v.dot(u));
  return best;
}

std::vector<Vec> fibonacci_sphere(int n) {
  std::vector<Vec> out;
  out.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / n;
    double r = std::sqrt(1.0 - z * z);
    out.push_back(vec3(r * std::cos(golden * i), r * std::sin(golden * i), z));
  }
  return out;
}

double horizontal_norm(const Vec& v) { return std::hypot(v[0], v[1]); }

/// Range of <u, -e3> and the largest horizontal norm over supp f.
struct SupportBounds {
  double min_down = 1.0;
  double max_horizontal = 0.0;
};

SupportBounds support_bounds(const WeightFn& f) {
  SupportBounds b;
  if (f.is_constant()) {
    if (f.constant_value() > 0.0) b = {-1.0, 1.0};
    return b;
  }
  if ((f.axis() + e3()).norm() < 1e-12) {
    b.min_down = f.tau0();
    b.max_horizontal = f.tau0() >= 0.0 ? std::sqrt(1.0 - f.tau0() * f.tau0()) : 1.0;
    return b;
  }
  for (const Vec& u : fibonacci_sphere(20000))
    if (u.dot(f.axis()) >= f.tau0()) {
      b.min_down = std::min(b.min_down, -u[2]);
      b.max_horizontal = std::max(b.max_horizontal, horizontal_norm(u));
    }
  return b;
}

std::vector<Vec> support_samples(const Arc& arc, const WeightFn& f, int per_piece = 33) {
  std::vector<Arc> pieces{arc};
  if (!f.is_constant()) {
    Cap c{f.axis(), f.tau0()};
    pieces = clip_arc(arc, std::span<const Cap>(&c, 1));
  }
  std::vector<Vec> out;
  for (const Arc& p : pieces)
    for (int i = 0; i < per_piece; ++i) out.push_back(p.at(p.a0 + (p.a1 - p.a0) * i / (per_piece - 1)));
  return out;
}

}  // namespace

double ApproxParams::beta() const { return kPi / N; }

Vec ApproxParams::ell(int r) const { return vec3(std::cos(r * beta()), std::sin(r * beta()), 0.0); }

Rotation ApproxParams::theta() const { return Rotation::about_axis(e3(), beta()); }

void ApproxParams::validate() const {
  if (N != 2 && (N < 3 || N % 2 == 0)) throw std::invalid_argument("N must be 2 or an odd integer >= 3");
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  if (t > std::sqrt(h))
    throw std::invalid_argument("t = " + std::to_string(t) + " too large for h = " + std::to_string(h) +
                                " (need t <= sqrt(h))");
}

Polytope build_PNht(const ApproxParams& params) {
  params.validate();
  if (params.N == 2) return lifted_cap(vec2(1, 0), vec2(0, 1), params.h, params.t);
  const double b = params.beta();
  Polytope base = lifted_cap(vec2(1, 0), vec2(std::cos(b), std::sin(b)), params.h, params.t);
  Polytope sum = base;
  Rotation step = params.theta();
  Rotation acc = step;
  for (int k = 1; k < params.N; ++k) {
    sum = minkowski_sum(sum, apply_rotation(base, acc));
    acc = acc * step;
  }
  return scale(sum, 1.0 / params.N);
}

double bump_tau0(double h, double margin) {
  double edge = 1.0 / std::sqrt(1.0 + 2.0 * h);
  return edge + margin * (1.0 - edge);
}

WeightFn bump_weight(double h, double margin) {
  if (!(h > 0.0)) throw std::invalid_argument("bump: h must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) throw std::invalid_argument("bump: margin must lie in [0, 1)");
  double tau0 = bump_tau0(h, margin);
  return WeightFn::taper(-e3(), tau0, 0.5 * (1.0 + tau0));
}

double hausdorff_to_cap(const Polytope& P, double h, int samples) {
  double d = 0.0;
  for (const Vec& u : fibonacci_sphere(samples)) d = std::max(d, std::abs(support(P, u) - cap_support(u, h)));
  return d;
}

double hausdorff_distance(const Polytope& a, const Polytope& b, int samples) {
  double d = 0.0;
  for (const Vec& u : fibonacci_sphere(samples)) d = std::max(d, std::abs(support(a, u) - support(b, u)));
  return d;
}

std::vector<int> f_edges(const Polytope& P, const WeightFn& f) {
  std::vector<int> out;
  if (f.identically_zero()) return out;
  const auto& edges = P.faces(1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (f.is_constant()) {
      out.push_back(static_cast<int>(e));
      continue;
    }
    const Arc& arc = std::get<Arc>(edges[e].cone);
    if (arc_dot_range(arc, f.axis()).second > f.tau0()) out.push_back(static_cast<int>(e));
  }
  return out;
}

EdgeClass classify_edge(const Polytope& P, int edge, const ApproxParams& params) {
  EdgeClass c;
  c.edge = edge;
  c.v = P.edge_vector(edge);
  const Face& F = P.faces(1)[edge];
  const double top = params.h - 1e-9 * std::max(1.0, params.h);
  for (int v : F.vertices)
    if (P.vertex(v)[2] >= top) return c;
  double hn = horizontal_norm(c.v);
  if (hn < 1e-12) return c;
  for (int r = 0; r < params.N; ++r) {
    Vec l = params.ell(r);
    double cr = (c.v[0] * l[1] - c.v[1] * l[0]) / hn;
    if (std::abs(cr) < 1e-7) {
      c.r = r;
      if (c.v.dot(l) < 0) c.v = -c.v;
      return c;
    }
  }
  return c;
}

AssumptionReport check_assumptions(const Polytope& P, const ApproxParams& params, const WeightFn& f,
                                   double eps) {
  AssumptionReport rep;
  SupportBounds sb = support_bounds(f);
  rep.margin_normal_height = sb.min_down - (1.0 - eps);
  rep.margin_horizontal = eps - sb.max_horizontal;
  rep.A = rep.margin_normal_height > 0.0 && rep.margin_horizontal >= 0.0;

  double worst_dir = 0.0, worst_cross = 0.0;
  const auto fe = f_edges(P, f);
  rep.f_edge_count = static_cast<int>(fe.size());
  for (int e : fe) {
    EdgeClass c = classify_edge(P, e, params);
    if (c.r < 0) {
      ++rep.unclassified;
      continue;
    }
    Vec l = params.ell(c.r);
    worst_dir = std::max(worst_dir, horizontal_norm(c.v - l));
    Vec target = cross3(l, -e3());
    for (const Vec& u : support_samples(std::get<Arc>(P.faces(1)[e].cone), f))
      worst_cross = std::max(worst_cross, horizontal_norm(cross3(c.v, u) - target));
  }
  rep.B = rep.unclassified == 0;
  rep.margin_direction = eps - worst_dir;
  rep.margin_cross = eps - worst_cross;
  rep.C = rep.margin_direction >= 0.0 && rep.margin_cross >= 0.0;
  return rep;
}

AssumptionSearch search_parameters(int N, double eps, double h0, double t0, int max_steps) {
  AssumptionSearch s;
  s.h = h0;
  s.t = std::min(t0, std::sqrt(h0));
  for (s.steps = 0; s.steps < max_steps; ++s.steps) {
    ApproxParams p{N, s.h, s.t};
    Polytope P = build_PNht(p);
    s.report = check_assumptions(P, p, bump_weight(s.h), eps);
    if (s.report.all()) return s;
    if (!s.report.A || !s.report.C) {
      s.h *= 0.5;
      s.t *= std::sqrt(0.5);
    } else {
      s.t *= 0.5;
    }
  }
  return s;
}

std::vector<Vec> frame(int rank, const Vec& a, int i) {
  if (i < 0 || i > rank) throw std::invalid_argument("frame: trailing count outside [0, rank]");
  std::vector<Vec> out(rank - i, a);
  out.insert(out.end(), i, -e3());
  return out;
}

double ConvergenceTable::estimated_order() const {
  const std::size_t n = rows.size();
  if (n < 3) return 1.0;
  double d1 = (rows[n - 2].tensor - rows[n - 3].tensor).max_norm();
  double d2 = (rows[n - 1].tensor - rows[n - 2].tensor).max_norm();
  double q = rows[n - 2].t / rows[n - 1].t;
  double p = std::log(d1 / d2) / std::log(q);
  if (!std::isfinite(p)) return 1.0;
  return std::clamp(p, 1.0, 6.0);
}

double ConvergenceTable::richardson() const {
  if (rows.size() < 2) throw std::logic_error("richardson: need two rows");
  const auto& a = rows[rows.size() - 2];
  const auto& b = rows.back();
  double g = std::pow(a.t / b.t, estimated_order());
  return (g * b.value - a.value) / (g - 1.0);
}

SymTensor ConvergenceTable::richardson_tensor() const {
  if (rows.size() < 2) throw std::logic_error("richardson: need two rows");
  const auto& a = rows[rows.size() - 2];
  const auto& b = rows.back();
  double g = std::pow(a.t / b.t, estimated_order());
  return (1.0 / (g - 1.0)) * (g * b.tensor - a.tensor);
}

double ConvergenceTable::min_abs_D() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, std::abs(r.D));
  return m;
}

double ConvergenceTable::max_abs_D() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.D));
  return m;
}

double ConvergenceTable::min_W1_over_N() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.W1 / options.N);
  return m;
}

std::string ConvergenceTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,value,value_rotated,D,W1,W1_over_N,diff,ratio";
  std::size_t ncomp = rows.empty() ? 0 : rows.front().tensor.size();
  for (std::size_t c = 0; c < ncomp; ++c) os << ",c" << c;
  os << "\n";
  for (const auto& r : rows) {
    os << r.t << "," << r.value << "," << r.value_rotated << "," << r.D << "," << r.W1 << ","
       << r.W1 / options.N << "," << r.diff << "," << r.ratio;
    for (double c : r.tensor.coeffs()) os << "," << c;
    os << "\n";
  }
  return os.str();
}

std::string ConvergenceTable::to_json() const {
  using nlohmann::json;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["functional"] = spec.to_string();
  j["N"] = options.N;
  j["h"] = options.h;
  j["a_angle"] = options.a_angle;
  j["trailing"] = options.trailing < 0 ? spec.s : options.trailing;
  j["rotation_angle"] = options.rotation_angle;
  json rows_j = json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"t", r.t},
                      {"value", num(r.value)},
                      {"value_rotated", num(r.value_rotated)},
                      {"D", num(r.D)},
                      {"W1", num(r.W1)},
                      {"diff", num(r.diff)},
                      {"ratio", num(r.ratio)},
                      {"coefficients", std::vector<double>(r.tensor.coeffs().begin(), r.tensor.coeffs().end())}});
  j["rows"] = rows_j;
  if (rows.size() >= 2) {
    j["order"] = estimated_order();
    j["richardson"] = num(richardson());
  }
  return j.dump(2);
}

ConvergenceTable convergence_experiment(const FunctionalSpec& spec, const ConvergenceOptions& opt,
                                        const WeightFn& f) {
  spec.validate();
  bool ok = (spec.family == Family::Phi && spec.dim == 3 && spec.k == 1 && spec.r == 0) ||
            (spec.family == Family::PhiTilde3 && spec.r == 0);
  if (!ok) throw std::invalid_argument(spec.to_string() + ": experiment needs Phi(1,0,s,j) or PhiTilde3(0,s,j)");
  if (opt.ts.empty()) throw std::invalid_argument("experiment: empty t ladder");

  ConvergenceTable table;
  table.spec = spec;
  table.options = opt;
  table.rows.resize(opt.ts.size());
  const int rank = spec.rank();
  const int trailing = opt.trailing < 0 ? spec.s : opt.trailing;
  const Vec a = vec3(std::cos(opt.a_angle), std::sin(opt.a_angle), 0.0);
  const Vec a_rot = Rotation::about_axis(e3(), opt.rotation_angle).apply(a);
  const auto E = frame(rank, a, trailing);
  const auto E_rot = frame(rank, a_rot, trailing);

  auto run = [&](std::size_t k) {
    ConvergenceRow& row = table.rows[k];
    row.t = opt.ts[k];
    Polytope P = build_PNht(ApproxParams{opt.N, opt.h, row.t});
    row.tensor = evaluate(P, spec, RegionSpec::full(), f);
    row.value = row.tensor.eval(E);
    row.value_rotated = row.tensor.eval(E_rot);
    row.D = row.value_rotated - row.value;
    row.W1 = eval_W1(P, f);
  };

  if (opt.serial) {
    for (std::size_t k = 0; k < opt.ts.size(); ++k) run(k);
  } else {
    std::vector<std::exception_ptr> errors(opt.ts.size());
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < opt.ts.size(); ++k)
      pool.emplace_back([&, k] {
        try {
          run(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    auto& row = table.rows[k];
    row.diff = k == 0 ? kNaN : row.value - table.rows[k - 1].value;
    row.ratio = k < 2 ? kNaN : row.diff / table.rows[k - 1].diff;
  }
  return table;
}

ConvergenceTable convergence_experiment(const FunctionalSpec& spec, const ConvergenceOptions& opt) {
  return convergence_experiment(spec, opt, bump_weight(opt.h, opt.bump_margin));
}

double predict_F(int nu, double lambda, std::span<const double> coeffs, int N) {
  if (nu != 1 && nu != 2) throw std::invalid_argument("predict_F: nu must be 1 or 2");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("predict_F: lambda outside [0, 1]");
  if (N != 2 && (N < 3 || N % 2 == 0)) throw std::invalid_argument("predict_F: N must be 2 or odd >= 3");
  const double beta = kPi / N, mu = std::sqrt(1.0 - lambda * lambda);
  double total = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] == 0.0) continue;
    double inner = 0.0;
    for (int r = 0; r < N; ++r) {
      double x = lambda * std::cos(r * beta) + mu * std::sin(r * beta);
      if (nu == 1) {
        inner += std::pow(x, 2.0 * j);
      } else {
        double y = -lambda * std::sin(r * beta) + mu * std::cos(r * beta);
        inner += std::pow(x, 2.0 * j + 1) * y;
      }
    }
    total += coeffs[j] * inner;
  }
  return total;
}

}  // namespace loctens
