#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "loctens/quadrature.hpp"
#include "loctens/valuations.hpp"

namespace loctens {

namespace {

/// Largest value of <u, a> along the great arc from p to q.
double arc_max(const Vec& p, const Vec& q, const Vec& a) {
  Vec perp = q - p.dot(q) * p;
  if (perp.norm() < 1e-14) return std::max(p.dot(a), q.dot(a));
  Arc arc{p, perp.normalized(), 0.0, std::acos(std::clamp(p.dot(q), -1.0, 1.0))};
  return arc_dot_range(arc, a).second;
}

Vec cap_normal(double rho, double phi) {
  double d = std::sqrt(1.0 + 4.0 * rho * rho);
  return vec3(2.0 * rho * std::cos(phi) / d, 2.0 * rho * std::sin(phi) / d, -1.0 / d);
}

void check_rim(double h, const WeightFn& f) {
  if (f.is_constant()) {
    if (f.constant_value() != 0.0)
      throw std::invalid_argument("smooth cap: weight support reaches the rim");
    return;
  }
  const Vec e3 = vec3(0, 0, 1);
  const int samples = 2048;
  double worst = -2.0;
  for (int i = 0; i < samples; ++i) {
    double phi = 2.0 * std::numbers::pi * i / samples;
    worst = std::max(worst, arc_max(cap_normal(std::sqrt(h), phi), e3, f.axis()));
  }
  if (worst > f.tau0() - 1e-9)
    throw std::invalid_argument("smooth cap: weight support reaches the rim (max <u,axis> = " +
                                std::to_string(worst) + ", tau0 = " + std::to_string(f.tau0()) + ")");
}

/// Radii in (0, R) where <u(rho, phi), axis> crosses a weight knot.
std::vector<double> radial_breaks(double R, double phi, const WeightFn& f) {
  std::vector<double> out{0.0, R};
  if (f.is_constant()) return out;
  const int grid = 64;
  for (double level : f.knots()) {
    auto g = [&](double rho) { return cap_normal(rho, phi).dot(f.axis()) - level; };
    double a = 0.0, ga = g(0.0);
    for (int i = 1; i <= grid; ++i) {
      double b = R * i / grid, gb = g(b);
      if ((ga < 0) != (gb < 0)) {
        double lo = a, hi = b, glo = ga;
        for (int it = 0; it < 80 && hi - lo > 1e-15 * R; ++it) {
          double mid = 0.5 * (lo + hi), gm = g(mid);
          if ((gm < 0) == (glo < 0))
            lo = mid, glo = gm;
          else
            hi = mid;
        }
        out.push_back(0.5 * (lo + hi));
      }
      a = b, ga = gb;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SmoothCapSample smooth_cap_sample(double x1, double x2) {
  SmoothCapSample s;
  double rho = std::hypot(x1, x2);
  double c = 1.0, sn = 0.0;
  if (rho > 0.0) c = x1 / rho, sn = x2 / rho;
  double d = std::sqrt(1.0 + 4.0 * rho * rho);
  s.x = vec3(x1, x2, rho * rho);
  s.u = vec3(2.0 * x1 / d, 2.0 * x2 / d, -1.0 / d);
  s.b1 = vec3(c / d, sn / d, 2.0 * rho / d);
  s.b2 = cross3(s.u, s.b1);
  s.k1 = 2.0 / (d * d * d);
  s.k2 = 2.0 / d;
  s.K = std::sqrt(1.0 + s.k1 * s.k1) * std::sqrt(1.0 + s.k2 * s.k2);
  return s;
}

SymTensor eval_smooth_cap_phitilde(double h, int r, int s, const WeightFn& f,
                                   const SmoothCapOptions& opt) {
  if (!(h > 0.0)) throw std::invalid_argument("smooth cap: height must be positive");
  if (r < 0 || s < 0 || r + s + 2 > kMaxRank) throw std::invalid_argument("smooth cap: bad indices");
  SymTensor out(3, r + s + 2);
  if (f.identically_zero()) return out;
  check_rim(h, f);
  const QuadRule& g = gauss_legendre(opt.radial);
  const double R = std::sqrt(h);
  const double dphi = 2.0 * std::numbers::pi / opt.angular;
  for (int ia = 0; ia < opt.angular; ++ia) {
    const double phi = dphi * ia;
    const double c = std::cos(phi), sn = std::sin(phi);
    const auto br = radial_breaks(R, phi, f);
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      const double lo = br[p], hi = br[p + 1];
      if (hi - lo <= 0.0) continue;
      if (f(cap_normal(0.5 * (lo + hi), phi)) == 0.0) continue;
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double rho = mid + half * g.nodes[i];
        SmoothCapSample cs = smooth_cap_sample(rho * c, rho * sn);
        double wt = f(cs.u);
        if (wt == 0.0) continue;
        double dA = std::sqrt(1.0 + 4.0 * rho * rho) * rho;
        wt *= half * g.weights[i] * dphi * dA * (cs.k1 - cs.k2);
        SymTensor t = sym_product(vector_power(cs.x, r), vector_power(cs.u, s));
        t = sym_product(t, sym_product(vector_tensor(cs.b1), vector_tensor(cs.b2)));
        out.axpy(wt, t);
      }
    }
  }
  return out;
}

}  // namespace loctens
