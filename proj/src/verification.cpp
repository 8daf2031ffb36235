#include "loctens/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/SVD>
#include <json.hpp>

#include "loctens/approximation.hpp"

namespace loctens {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

int uniform_int(std::mt19937_64& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

Vec random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  Vec v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = nd(rng);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

Vec random_in_ball(std::mt19937_64& rng, int dim, double radius) {
  return random_unit(rng, dim) * radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / dim);
}

std::uint64_t suite_tag(const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

std::mt19937_64 case_rng(const SuiteConfig& cfg, const std::string& suite, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(suite_tag(suite)), static_cast<std::uint32_t>(k)};
  return std::mt19937_64(seq);
}

void parallel_for(int n, bool serial, const std::function<void(int)>& fn) {
  if (serial || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Outcome of one case: checks made and scaled violations.
struct CaseResult {
  int checks = 0;
  double worst = 0.0;
  std::vector<std::string> failures;

  void check(bool ok, double violation, const std::string& what) {
    ++checks;
    worst = std::max(worst, violation);
    if (!ok) failures.push_back(what);
  }
  void check_close(const SymTensor& a, const SymTensor& b, double rtol, const std::string& what) {
    double d = scaled_diff(a, b);
    std::ostringstream os;
    os << what << ": scaled diff " << d;
    check(d <= rtol, d / rtol, os.str());
  }
};

SuiteReport collect(const std::string& name, std::vector<CaseResult>& cases) {
  SuiteReport rep;
  rep.name = name;
  rep.cases = static_cast<int>(cases.size());
  for (std::size_t k = 0; k < cases.size(); ++k) {
    rep.checks += cases[k].checks;
    rep.worst = std::max(rep.worst, cases[k].worst);
    for (const auto& f : cases[k].failures) {
      ++rep.failures;
      if (rep.messages.size() < 20) rep.messages.push_back("case " + std::to_string(k) + ": " + f);
    }
  }
  return rep;
}

template <class Fn>
SuiteReport run_cases(const std::string& name, const SuiteConfig& cfg, Fn fn) {
  std::vector<CaseResult> results(cfg.cases);
  parallel_for(cfg.cases, cfg.serial, [&](int k) {
    auto rng = case_rng(cfg, name, k);
    try {
      fn(rng, k, results[k]);
    } catch (const std::exception& e) {
      results[k].check(false, 0.0, std::string("exception: ") + e.what());
    }
  });
  return collect(name, results);
}

Polytope random_body_for(std::mt19937_64& rng, int dim) {
  RandomBodySpec spec;
  spec.dim = dim;
  int g = uniform_int(rng, 0, dim == 3 ? 9 : 7);
  spec.generator = g < 6 ? BodyGenerator::BallHull : g < 7 ? BodyGenerator::Box
                   : g < 8 ? BodyGenerator::Simplex : BodyGenerator::LiftedCap;
  spec.points = uniform_int(rng, dim + 3, 16);
  return random_polytope(rng, spec);
}

std::string label(const FunctionalSpec& s, int dim) {
  return s.to_string() + " in R^" + std::to_string(dim);
}

bool is_local(Family f) { return f == Family::Phi || f == Family::PhiTilde3 || f == Family::PhiTilde2; }

FunctionalSpec random_local_spec(std::mt19937_64& rng, int dim, int max_rank = 6) {
  for (;;) {
    FunctionalSpec s = random_spec(rng, dim, max_rank);
    if (is_local(s.family)) return s;
  }
}

FunctionalSpec with_r(FunctionalSpec s, int r) {
  s.r = r;
  return s;
}

/// Coefficient of the i-th term in the translation expansion.
double translation_coefficient(const FunctionalSpec& s, int i) {
  if (s.family == Family::Phi) return 1.0 / factorial(i);
  return static_cast<double>(binomial(s.r, i));
}

}  // namespace

double scaled_diff(const SymTensor& a, const SymTensor& b) {
  double scale = std::max({1.0, a.max_norm(), b.max_norm()});
  return (a - b).max_norm() / scale;
}

Polytope random_polytope(std::mt19937_64& rng, const RandomBodySpec& spec) {
  const int dim = spec.dim;
  for (int attempt = 0; attempt < 100; ++attempt) {
    double sc = uniform(rng, spec.scale_min, spec.scale_max);
    Vec center = random_in_ball(rng, dim, spec.max_offset);
    try {
      switch (spec.generator) {
        case BodyGenerator::BallHull: {
          std::vector<Vec> pts;
          for (int i = 0; i < spec.points; ++i) pts.push_back(center + sc * random_in_ball(rng, dim, 1.0));
          Polytope P = Polytope::hull(pts);
          if (P.volume() > 0.02 * std::pow(sc, dim)) return P;
          break;
        }
        case BodyGenerator::Box: {
          std::vector<Vec> pts;
          Vec half(dim);
          for (int i = 0; i < dim; ++i) half[i] = sc * uniform(rng, 0.3, 1.0);
          for (int m = 0; m < (1 << dim); ++m) {
            Vec p = center;
            for (int i = 0; i < dim; ++i) p[i] += (m >> i & 1) ? half[i] : -half[i];
            pts.push_back(p);
          }
          return Polytope::hull(pts);
        }
        case BodyGenerator::Simplex: {
          std::vector<Vec> pts;
          for (int i = 0; i <= dim; ++i) pts.push_back(center + sc * random_in_ball(rng, dim, 1.0));
          Polytope P = Polytope::hull(pts);
          if (P.volume() > 0.01 * std::pow(sc, dim)) return P;
          break;
        }
        case BodyGenerator::LiftedCap: {
          if (dim != 3) throw std::invalid_argument("lifted caps live in R^3");
          double h = uniform(rng, 0.3, 0.8);
          double t = std::sqrt(h) / uniform_int(rng, 3, 5);
          return translate(scale(build_PNht({2, h, t}), sc), center);
        }
      }
    } catch (const DegenerateError&) {
    }
  }
  throw std::runtime_error("random_polytope: no full-dimensional sample");
}

Rotation random_rotation(std::mt19937_64& rng, int dim) {
  if (dim == 2) return Rotation::planar(uniform(rng, -kPi, kPi));
  Vec q = random_unit(rng, 4);
  double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat m(3, 3);
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return Rotation(m);
}

Rotation random_improper(std::mt19937_64& rng, int dim) {
  return Rotation::reflection(unit_vector(dim, dim - 1)) * random_rotation(rng, dim);
}

FunctionalSpec random_spec(std::mt19937_64& rng, int dim, int max_rank) {
  static const std::vector<Family> fam3{Family::Phi, Family::Phi, Family::PhiTilde3, Family::PhiTilde3,
                                        Family::GlobalT3, Family::W1};
  static const std::vector<Family> fam2{Family::Phi, Family::Phi, Family::PhiTilde2, Family::PhiTilde2,
                                        Family::GlobalPsi2, Family::GlobalPsi2Vol, Family::GlobalPhiTilde2};
  const auto& fams = dim == 3 ? fam3 : fam2;
  for (;;) {
    FunctionalSpec s;
    s.family = fams[uniform_int(rng, 0, static_cast<int>(fams.size()) - 1)];
    s.dim = dim;
    s.k = uniform_int(rng, 0, dim - 1);
    s.r = uniform_int(rng, 0, 3);
    s.s = uniform_int(rng, 0, 3);
    s.j = uniform_int(rng, 0, 2);
    s.m = uniform_int(rng, 0, 1);
    switch (s.family) {
      case Family::PhiTilde3:
      case Family::GlobalT3:
        s.k = 1;
        if (s.family == Family::GlobalT3) s.j = 0;
        break;
      case Family::PhiTilde2:
      case Family::GlobalPsi2:
      case Family::GlobalPhiTilde2:
        s.j = 0;
        break;
      case Family::GlobalPsi2Vol:
        s.k = 2, s.s = 0, s.j = 0;
        break;
      case Family::W1:
        s = FunctionalSpec{Family::W1, 3, 1, 0, 0, 0, 0};
        break;
      case Family::Phi:
        if (s.k == 0 || s.k == dim - 1) s.j = 0;
        break;
    }
    if (s.rank() > max_rank) continue;
    try {
      s.validate();
      return s;
    } catch (const SpecError&) {
    }
  }
}

RegionSpec random_region(std::mt19937_64& rng, const Polytope& P) {
  const int dim = P.dim();
  const double d = P.diameter();
  std::vector<RegionProduct> prods;
  int count = uniform_int(rng, 1, 2);
  for (int i = 0; i < count; ++i) {
    const Vec& v = P.vertex(uniform_int(rng, 0, static_cast<int>(P.vertices().size()) - 1));
    Vec c = v + random_in_ball(rng, dim, 0.2 * d);
    Vec lo(dim), hi(dim);
    for (int a = 0; a < dim; ++a) {
      double hw = uniform(rng, 0.2, 0.8) * d * 0.5;
      lo[a] = c[a] - hw;
      hi[a] = c[a] + hw;
    }
    RegionProduct p = RegionProduct::box(lo, hi);
    if (uniform(rng, 0, 1) < 0.5) p.caps.push_back(Cap{random_unit(rng, dim), uniform(rng, -0.5, 0.5)});
    prods.push_back(std::move(p));
  }
  return RegionSpec::union_of(std::move(prods));
}

WeightFn random_weight(std::mt19937_64& rng, int dim) {
  if (uniform(rng, 0, 1) < 0.5) return WeightFn::constant(1.0);
  double t0 = uniform(rng, -0.6, 0.4);
  return WeightFn::taper(random_unit(rng, dim), t0, std::min(1.0, t0 + uniform(rng, 0.2, 0.5)));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"covariance", "valuation", "translation", "homogeneity", "locality",
                                              "sign",       "prop8",     "thm9",        "convergence"};
  return names;
}

SuiteReport run_covariance_suite(const SuiteConfig& cfg) {
  return run_cases("covariance", cfg, [&](std::mt19937_64& rng, int k, CaseResult& out) {
    const int dim = k % 2 == 0 ? 3 : 2;
    Polytope P = random_body_for(rng, dim);
    FunctionalSpec spec = random_spec(rng, dim);
    RegionSpec region = uniform(rng, 0, 1) < 0.5 ? RegionSpec::full() : random_region(rng, P);
    WeightFn w = random_weight(rng, dim);
    SymTensor base = evaluate(P, spec, region, w);
    for (bool proper : {true, false}) {
      Rotation th = proper ? random_rotation(rng, dim) : random_improper(rng, dim);
      SymTensor lhs = evaluate(apply_rotation(P, th), spec, region.rotated(th), w.rotated(th));
      double sign = (!proper && spec.orientation_odd()) ? -1.0 : 1.0;
      SymTensor rhs = sign * rotate_tensor(base, th);
      out.check_close(lhs, rhs, cfg.rtol, label(spec, dim) + (proper ? " proper" : " improper"));
    }
  });
}

SuiteReport run_valuation_suite(const SuiteConfig& cfg) {
  return run_cases("valuation", cfg, [&](std::mt19937_64& rng, int k, CaseResult& out) {
    const int dim = k % 2 == 0 ? 3 : 2;
    Polytope P = random_body_for(rng, dim);
    FunctionalSpec spec = random_spec(rng, dim);
    WeightFn w = k % 4 < 2 ? WeightFn::constant(1.0) : random_weight(rng, dim);
    Vec dir = random_unit(rng, dim);
    double mn = 1e300, mx = -1e300;
    for (const Vec& v : P.vertices()) mn = std::min(mn, v.dot(dir)), mx = std::max(mx, v.dot(dir));
    double c0 = mn + uniform(rng, 0.2, 0.45) * (mx - mn);
    double c1 = mn + uniform(rng, 0.55, 0.8) * (mx - mn);
    Polytope lower = clip_halfspace(P, Halfspace{dir, c1});
    Polytope upper = clip_halfspace(P, Halfspace{-dir, -c0});
    Polytope middle = clip_halfspace(lower, Halfspace{-dir, -c0});
    auto val = [&](const Polytope& Q) { return evaluate(Q, spec, RegionSpec::full(), w); };
    out.check_close(val(lower) + val(upper), val(P) + val(middle), cfg.rtol, label(spec, dim));
  });
}

SuiteReport run_translation_suite(const SuiteConfig& cfg) {
  return run_cases("translation", cfg, [&](std::mt19937_64& rng, int k, CaseResult& out) {
    const int dim = k % 2 == 0 ? 3 : 2;
    Polytope P = random_body_for(rng, dim);
    FunctionalSpec spec = random_spec(rng, dim);
    RegionSpec region = uniform(rng, 0, 1) < 0.5 ? RegionSpec::full() : random_region(rng, P);
    WeightFn w = random_weight(rng, dim);
    Vec t = random_in_ball(rng, dim, 1.0);
    SymTensor lhs = evaluate(translate(P, t), spec, region.translated(t), w);
    SymTensor rhs(dim, spec.rank());
    for (int i = 0; i <= spec.r; ++i)
      rhs.axpy(translation_coefficient(spec, i),
               sym_product(evaluate(P, with_r(spec, spec.r - i), region, w), vector_power(t, i)));
    out.check_close(lhs, rhs, cfg.rtol, label(spec, dim));
  });
}

SuiteReport run_homogeneity_suite(const SuiteConfig& cfg) {
  return run_cases("homogeneity", cfg, [&](std::mt19937_64& rng, int k, CaseResult& out) {
    const int dim = k % 2 == 0 ? 3 : 2;
    Polytope P = random_body_for(rng, dim);
    FunctionalSpec spec = random_spec(rng, dim);
    RegionSpec region = uniform(rng, 0, 1) < 0.5 ? RegionSpec::full() : random_region(rng, P);
    WeightFn w = random_weight(rng, dim);
    double lambda = uniform(rng, 0.5, 2.0);
    SymTensor lhs = evaluate(scale(P, lambda), spec, region.scaled(lambda), w);
    SymTensor rhs = std::pow(lambda, spec.degree()) * evaluate(P, spec, region, w);
    out.check_close(lhs, rhs, cfg.rtol, label(spec, dim) + " lambda=" + std::to_string(lambda));
  });
}

SuiteReport run_locality_suite(const SuiteConfig& cfg) {
  SuiteReport rep = run_cases("locality", cfg, [&](std::mt19937_64& rng, int k, CaseResult& out) {
    const int dim = k % 2 == 0 ? 3 : 2;
    Polytope P = random_body_for(rng, dim);
    FunctionalSpec spec = random_local_spec(rng, dim);
    WeightFn w = random_weight(rng, dim);
    Vec dir = random_unit(rng, dim);
    double mn = 1e300, mx = -1e300;
    for (const Vec& v : P.vertices()) mn = std::min(mn, v.dot(dir)), mx = std::max(mx, v.dot(dir));
    double c = mx - uniform(rng, 0.1, 0.4) * (mx - mn);
    Polytope cut = clip_halfspace(P, Halfspace{dir, c});
    RegionProduct prod;
    prod.xset.push_back(Halfspace{dir, c - 0.05 * (mx - mn)});
    if (uniform(rng, 0, 1) < 0.5) prod.caps.push_back(Cap{random_unit(rng, dim), uniform(rng, -0.5, 0.5)});
    RegionSpec region = RegionSpec::union_of({prod});
    out.check_close(evaluate(P, spec, region, w), evaluate(cut, spec, region, w), cfg.rtol, label(spec, dim));
    SymTensor a = evaluate(P, spec, region, w), b = evaluate(P, spec, region, w);
    out.check(a == b, 0.0, label(spec, dim) + ": identical bodies differ");
  });
  // Cube against the cube with a far corner cut off, region around an untouched edge.
  std::vector<Vec> cv;
  for (int i = 0; i < 8; ++i) cv.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  Polytope cube = Polytope::hull(cv);
  Polytope trunc = clip_halfspace(cube, Halfspace{vec3(1, 1, 1).normalized(), 2.5 / std::sqrt(3.0)});
  RegionSpec near_edge = RegionSpec::union_of({RegionProduct::box(vec3(-0.1, -0.1, -0.1), vec3(1.1, 0.2, 0.2))});
  for (const auto& spec : {FunctionalSpec::phitilde3(1, 1, 1), FunctionalSpec::phi(3, 1, 1, 2, 1),
                           FunctionalSpec::phi(3, 0, 0, 2, 0), FunctionalSpec::phi(3, 2, 2, 0, 0)}) {
    double d = scaled_diff(evaluate(cube, spec, near_edge, WeightFn::constant()),
                           evaluate(trunc, spec, near_edge, WeightFn::constant()));
    ++rep.checks;
    rep.worst = std::max(rep.worst, d / 1e-10);
    if (d > 1e-10) {
      ++rep.failures;
      rep.messages.push_back("truncated cube " + spec.to_string() + ": scaled diff " + std::to_string(d));
    }
  }
  return rep;
}

SuiteReport run_sign_suite(const SuiteConfig& cfg) {
  return run_cases("sign", cfg, [&](std::mt19937_64& rng, int k, CaseResult& out) {
    Polytope P = random_body_for(rng, 3);
    FunctionalSpec spec;
    do {
      spec = random_local_spec(rng, 3);
    } while (spec.family != Family::PhiTilde3);
    RegionSpec region = uniform(rng, 0, 1) < 0.5 ? RegionSpec::full() : random_region(rng, P);
    WeightFn w = random_weight(rng, 3);
    EvalOptions def, flip, rnd;
    flip.edge_sign = EdgeSign::Flipped;
    rnd.edge_sign = EdgeSign::Random;
    rnd.sign_seed = static_cast<std::uint64_t>(k) + 1;
    SymTensor a = evaluate(P, spec, region, w, def);
    SymTensor b = evaluate(P, spec, region, w, flip);
    SymTensor c = evaluate(P, spec, region, w, rnd);
    out.check(a == b, scaled_diff(a, b), spec.to_string() + ": flipped edge vectors change the value");
    out.check(a == c, scaled_diff(a, c), spec.to_string() + ": random edge vectors change the value");
  });
}

SuiteReport run_prop8_suite(const SuiteConfig& cfg) {
  SuiteReport rep = run_cases("prop8", cfg, [&](std::mt19937_64& rng, int, CaseResult& out) {
    Polytope P = random_body_for(rng, 3);
    const double d = P.diameter();
    for (int r = 0; r <= 4; ++r)
      for (int s = 0; r + s <= 4; ++s) {
        double bound = 1e-8 * std::pow(d, r + 1);
        double n = eval_global_T3(P, r, s).max_norm();
        std::ostringstream os;
        os << "T(" << r << "," << s << ") norm " << n << " bound " << bound;
        out.check(n <= bound, n / bound, os.str());
      }
    Vec t = random_in_ball(rng, 3, 1.0);
    Polytope Q = translate(P, t);
    double bound = 1e-8 * std::pow(d, 3);
    double n = eval_global_T3(Q, 2, 1).max_norm();
    out.check(n <= bound, n / bound, "translated T(2,1) norm " + std::to_string(n));
  });
  std::vector<Vec> cv;
  for (int i = 0; i < 8; ++i) cv.push_back(vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  double n = eval_global_T3(Polytope::hull(cv), 0, 0).max_norm();
  ++rep.checks;
  if (n > 1e-12) {
    ++rep.failures;
    rep.messages.push_back("unit cube T(0,0) norm " + std::to_string(n));
  }
  return rep;
}

GramResult thm9_gram(int p, const std::vector<Polytope>& probes, int r_min) {
  std::vector<FunctionalSpec> family;
  for (int m = 0; 2 * m + 2 <= p; ++m)
    for (int r = r_min; 2 * m + r + 1 + 1 <= p; ++r) {
      int s = p - 1 - 2 * m - r;
      if (s >= 1) family.push_back(FunctionalSpec{Family::GlobalPhiTilde2, 2, 1, r, s, 0, m});
    }
  GramResult g;
  g.size = static_cast<int>(family.size());
  if (family.empty()) return g;
  std::vector<std::vector<double>> cols(family.size());
  for (std::size_t i = 0; i < family.size(); ++i)
    for (const Polytope& P : probes) {
      SymTensor t = eval_globals_2d(P, family[i]);
      cols[i].insert(cols[i].end(), t.coeffs().begin(), t.coeffs().end());
    }
  Eigen::MatrixXd V(cols[0].size(), family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    Eigen::Map<Eigen::VectorXd> c(cols[i].data(), static_cast<Eigen::Index>(cols[i].size()));
    V.col(static_cast<Eigen::Index>(i)) = c / c.norm();
  }
  Eigen::MatrixXd G = V.transpose() * V;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++g.rank;
  g.condition = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  return g;
}

SuiteReport run_thm9_suite(const SuiteConfig& cfg) {
  SuiteReport rep = run_cases("thm9", cfg, [&](std::mt19937_64& rng, int, CaseResult& out) {
    Polytope P = random_body_for(rng, 2);
    double R = 0.0, perim = 0.0;
    for (const Vec& v : P.vertices()) R = std::max(R, v.norm());
    for (const Face& e : P.faces(1)) perim += e.measure;
    auto tilde = [&](int k, int r, int s) {
      return eval_globals_2d(P, FunctionalSpec{Family::GlobalPhiTilde2, 2, k, r, s, 0, 0});
    };
    for (int r = 0; r <= 4; ++r) {
      double scale = std::max(1.0, (perim + 2.0 * kPi) * std::pow(std::max(R, 1.0), r));
      double n1 = tilde(1, r, 0).max_norm() / scale;
      out.check(n1 <= cfg.rtol, n1 / cfg.rtol, "PhiTilde_1^{" + std::to_string(r) + ",0} = " + std::to_string(n1));
      double n0 = tilde(0, 0, r).max_norm() / scale;
      out.check(n0 <= cfg.rtol, n0 / cfg.rtol, "PhiTilde_0^{0," + std::to_string(r) + "} = " + std::to_string(n0));
    }
    for (int r = 1; r <= 4; ++r)
      for (int s = 1; s <= 4; ++s) {
        SymTensor a = static_cast<double>(r) * tilde(1, r - 1, s);
        SymTensor b = static_cast<double>(s) * tilde(0, r, s - 1);
        double scale = std::max({1.0, a.max_norm(), b.max_norm()});
        double n = (a + b).max_norm() / scale;
        out.check(n <= cfg.rtol, n / cfg.rtol,
                  "relation r=" + std::to_string(r) + " s=" + std::to_string(s) + ": " + std::to_string(n));
      }
  });
  std::mt19937_64 rng(cfg.seed ^ suite_tag("thm9-probes"));
  std::vector<Polytope> probes;
  for (int i = 0; i < 12; ++i) probes.push_back(random_body_for(rng, 2));
  for (int p = 1; p <= 5; ++p) {
    GramResult g = thm9_gram(p, probes, 1);
    GramResult g0 = thm9_gram(p, probes, 0);
    std::ostringstream os;
    os << "p=" << p << ": basis size " << g.size << " rank " << g.rank << " cond " << g.condition
       << "; with r=0 included: size " << g0.size << " rank " << g0.rank;
    rep.notes.push_back(os.str());
    if (g.size == 0) continue;
    ++rep.checks;
    if (g.rank != g.size) {
      ++rep.failures;
      rep.messages.push_back("Gram rank deficient: " + os.str());
    }
  }
  return rep;
}

SuiteReport run_convergence_suite(const SuiteConfig& cfg) {
  SuiteReport rep;
  rep.name = "convergence";
  const double h = 0.5;
  auto record = [&](bool ok, const std::string& what) {
    ++rep.checks;
    rep.notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    if (!ok) {
      ++rep.failures;
      rep.messages.push_back(what);
    }
  };
  ConvergenceOptions base;
  base.h = h;
  base.serial = cfg.serial;
  const Vec a = vec3(std::cos(base.a_angle), std::sin(base.a_angle), 0.0);

  // Weak continuity against the smooth cap, bump weight.
  const WeightFn bump = bump_weight(h, base.bump_margin);
  for (int s = 0; s <= 2; ++s) {
    FunctionalSpec spec = FunctionalSpec::phitilde3(0, s, 0);
    ConvergenceTable tab = convergence_experiment(spec, base, bump);
    SymTensor R = tab.richardson_tensor();
    SymTensor S = eval_smooth_cap_phitilde(h, 0, s, bump);
    double W1 = tab.rows.back().W1;
    double worst = 0.0;
    for (int i = 0; i <= spec.rank(); ++i) {
      auto E = frame(spec.rank(), a, i);
      worst = std::max(worst, std::abs(R.eval(E) - S.eval(E)));
    }
    std::ostringstream os;
    os << spec.to_string() << " bump: max frame |limit - smooth| = " << worst << " vs 0.02*W1 = " << 0.02 * W1
       << " (smooth value max " << S.max_norm() << ")";
    record(worst <= 0.02 * W1, os.str());
  }
  // Same with an off-axis weight, where the target is not zero.
  const WeightFn off = WeightFn::taper(smooth_cap_sample(0.2, 0.1).u, std::cos(0.25), std::cos(0.12));
  for (int s = 0; s <= 2; ++s) {
    FunctionalSpec spec = FunctionalSpec::phitilde3(0, s, 0);
    ConvergenceTable tab = convergence_experiment(spec, base, off);
    SymTensor S = eval_smooth_cap_phitilde(h, 0, s, off);
    double rel = (tab.richardson_tensor() - S).max_norm() / S.max_norm();
    std::ostringstream os;
    os << spec.to_string() << " off-axis: relative error " << rel << " (order " << tab.estimated_order() << ")";
    record(rel <= 0.02, os.str());
  }
  // Rotation discrepancy.
  {
    ConvergenceTable tab = convergence_experiment(FunctionalSpec::phitilde3(0, 0, 1), base, bump);
    double mn = tab.min_abs_D(), mx = tab.max_abs_D();
    std::ostringstream os;
    os << "PhiTilde3(0,0,1) D(t): min " << mn << " max " << mx;
    record(mx > 0.0 && mn >= 0.25 * mx, os.str());
    double wmin = tab.min_W1_over_N(), wmax = 0.0;
    for (const auto& r : tab.rows) wmax = std::max(wmax, r.W1 / base.N);
    std::ostringstream ws;
    ws << "W1/N along the ladder: min " << wmin << " max " << wmax;
    record(wmin > 0.0 && wmin >= 0.5 * wmax, ws.str());
  }
  struct Decay {
    FunctionalSpec spec;
    int trailing;
  };
  for (const auto& d : {Decay{FunctionalSpec::phi(3, 1, 0, 0, 1), -1}, Decay{FunctionalSpec::phi(3, 1, 0, 2, 0), -1},
                        Decay{FunctionalSpec::phitilde3(0, 0, 0), -1}, Decay{FunctionalSpec::phi(3, 1, 0, 2, 1), 0},
                        Decay{FunctionalSpec::phitilde3(0, 2, 0), 0}}) {
    ConvergenceOptions o = base;
    o.trailing = d.trailing;
    ConvergenceTable tab = convergence_experiment(d.spec, o, bump);
    double first = std::abs(tab.rows.front().D), last = std::abs(tab.rows.back().D);
    double floor = 1e-12 * tab.rows.back().W1;
    bool decays = last <= 0.25 * first;
    bool zero = tab.max_abs_D() <= floor;
    std::ostringstream os;
    os << d.spec.to_string() << " i=" << (d.trailing < 0 ? d.spec.s : d.trailing) << " D(t): first " << first
       << " last " << last << (zero ? " [numerically zero]" : decays ? " [decays]" : " [no decay]");
    record(decays || zero, os.str());
  }
  return rep;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "covariance") return run_covariance_suite(cfg);
  if (name == "valuation") return run_valuation_suite(cfg);
  if (name == "translation") return run_translation_suite(cfg);
  if (name == "homogeneity") return run_homogeneity_suite(cfg);
  if (name == "locality") return run_locality_suite(cfg);
  if (name == "sign") return run_sign_suite(cfg);
  if (name == "prop8") return run_prop8_suite(cfg);
  if (name == "thm9") return run_thm9_suite(cfg);
  if (name == "convergence") return run_convergence_suite(cfg);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

VerificationReport run_suites(const SuiteConfig& cfg) {
  VerificationReport rep;
  rep.seed = cfg.seed;
  const auto& names = cfg.suites.empty() ? suite_names() : cfg.suites;
  for (const auto& n : names) rep.suites.push_back(run_suite(n, cfg));
  return rep;
}

bool VerificationReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.passed(); });
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["passed"] = passed();
  for (const auto& s : suites)
    j["suites"].push_back({{"name", s.name},
                           {"cases", s.cases},
                           {"checks", s.checks},
                           {"failures", s.failures},
                           {"worst_scaled_violation", s.worst},
                           {"messages", s.messages},
                           {"notes", s.notes}});
  return j.dump(2);
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  for (const auto& s : suites) {
    os << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.checks << " checks over " << s.cases
       << " cases, " << s.failures << " failures, worst/tol " << s.worst << "\n";
    for (const auto& m : s.messages) os << "    " << m << "\n";
    for (const auto& n : s.notes) os << "    " << n << "\n";
  }
  return os.str();
}

}  // namespace loctens
