#include "loctens/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "loctens/quadrature.hpp"

namespace loctens {

namespace {

constexpr double kPi = std::numbers::pi;

Halfspace transform_halfspace(const Halfspace& h, const Mat& A, double scale, const Vec& t) {
  // image of {<x,w> <= c} under x -> scale*A*x + t, A orthogonal
  Vec w = A * h.normal;
  return Halfspace{w, scale * h.offset + w.dot(t)};
}

}  // namespace

bool RegionProduct::contains(const Vec& x, const Vec& u) const {
  for (const Halfspace& h : xset)
    if (h.signed_distance(x) > 0) return false;
  for (const Cap& c : caps)
    if (!c.contains(u)) return false;
  return true;
}

RegionProduct RegionProduct::box(const Vec& lo, const Vec& hi) {
  RegionProduct p;
  for (int i = 0; i < lo.size(); ++i) {
    p.xset.push_back({unit_vector(static_cast<int>(lo.size()), i), hi[i]});
    p.xset.push_back({-unit_vector(static_cast<int>(lo.size()), i), -lo[i]});
  }
  return p;
}

RegionSpec RegionSpec::full() { return RegionSpec(); }

RegionSpec RegionSpec::union_of(std::vector<RegionProduct> products) {
  if (products.size() > 16) throw std::invalid_argument("region: at most 16 products supported");
  for (const auto& p : products)
    for (const Cap& c : p.caps) {
      if (std::abs(c.c.norm() - 1.0) > 1e-10) throw std::invalid_argument("region: cap center not a unit vector");
      if (c.tau < -1.0 || c.tau > 1.0) throw std::invalid_argument("region: cap threshold outside [-1, 1]");
    }
  RegionSpec r;
  r.full_ = false;
  r.products_ = std::move(products);
  return r;
}

bool RegionSpec::contains(const Vec& x, const Vec& u) const {
  if (full_) return true;
  for (const auto& p : products_)
    if (p.contains(x, u)) return true;
  return false;
}

std::vector<RegionSpec::Term> RegionSpec::expand() const {
  if (full_) return {Term{1.0, RegionProduct{}}};
  std::vector<Term> terms;
  const std::size_t m = products_.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    RegionProduct p;
    int bits = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::size_t{1} << i)) {
        ++bits;
        p.xset.insert(p.xset.end(), products_[i].xset.begin(), products_[i].xset.end());
        p.caps.insert(p.caps.end(), products_[i].caps.begin(), products_[i].caps.end());
      }
    terms.push_back(Term{bits % 2 == 1 ? 1.0 : -1.0, std::move(p)});
  }
  return terms;
}

RegionSpec RegionSpec::rotated(const Rotation& theta) const {
  RegionSpec r = *this;
  for (auto& p : r.products_) {
    for (auto& h : p.xset) h = transform_halfspace(h, theta.matrix(), 1.0, Vec::Zero(theta.dim()));
    for (auto& c : p.caps) c.c = theta.apply(c.c);
  }
  return r;
}

RegionSpec RegionSpec::translated(const Vec& t) const {
  RegionSpec r = *this;
  for (auto& p : r.products_)
    for (auto& h : p.xset) h = transform_halfspace(h, Mat::Identity(t.size(), t.size()), 1.0, t);
  return r;
}

RegionSpec RegionSpec::scaled(double lambda) const {
  RegionSpec r = *this;
  for (auto& p : r.products_)
    for (auto& h : p.xset) h.offset *= lambda;
  return r;
}

WeightFn WeightFn::constant(double c) {
  if (c < 0.0 || c > 1.0) throw std::invalid_argument("weight: constant must lie in [0, 1]");
  WeightFn w;
  w.value_ = c;
  return w;
}

WeightFn WeightFn::taper(const Vec& axis, double tau0, double tau1) {
  if (!(tau0 < tau1) || tau0 < -1.0 || tau1 > 1.0)
    throw std::invalid_argument("weight: need -1 <= tau0 < tau1 <= 1");
  WeightFn w;
  w.constant_ = false;
  w.axis_ = axis.normalized();
  w.tau0_ = tau0;
  w.tau1_ = tau1;
  return w;
}

double WeightFn::profile(double x) const {
  if (constant_) return value_;
  if (x <= tau0_) return 0.0;
  if (x >= tau1_) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * (x - tau0_) / (tau1_ - tau0_)));
}

double WeightFn::operator()(const Vec& u) const { return constant_ ? value_ : profile(u.dot(axis_)); }

std::vector<double> WeightFn::knots() const {
  if (constant_) return {};
  return {tau0_, tau1_};
}

WeightFn WeightFn::rotated(const Rotation& theta) const {
  WeightFn w = *this;
  if (!constant_) w.axis_ = theta.apply(axis_);
  return w;
}

Vec ArcExtra::apply(const Vec& u) const {
  switch (kind) {
    case ExtraKind::CrossWith:
      return cross3(v, u);
    case ExtraKind::Ubar:
      return ubar2(u);
    default:
      throw std::logic_error("ArcExtra::apply without factor");
  }
}

std::vector<std::vector<double>> trig_moments(int degree, double a0, double a1) {
  std::vector<std::vector<double>> I(degree + 1, std::vector<double>(degree + 1, 0.0));
  const double c0 = std::cos(a0), s0 = std::sin(a0), c1 = std::cos(a1), s1 = std::sin(a1);
  auto bracket = [&](int a, int b) {
    return std::pow(c1, a) * std::pow(s1, b) - std::pow(c0, a) * std::pow(s0, b);
  };
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) {
      int b = d - a;
      double v;
      if (b >= 2) {
        v = (-bracket(a + 1, b - 1) + (b - 1) * I[a][b - 2]) / d;
      } else if (a >= 2) {
        v = (bracket(a - 1, b + 1) + (a - 1) * I[a - 2][b]) / d;
      } else if (a == 0 && b == 0) {
        v = a1 - a0;
      } else if (a == 1 && b == 0) {
        v = s1 - s0;
      } else if (a == 0 && b == 1) {
        v = -(c1 - c0);
      } else {
        v = 0.5 * (s1 * s1 - s0 * s0);
      }
      I[a][b] = v;
    }
  return I;
}

namespace {

/// Sum over k of C(s,k) p^{s-k} q^k ⊙ E, with J supplying the angular integrals.
SymTensor assemble_arc(const Arc& arc, int s, const ArcExtra& extra,
                       const std::function<double(int, int)>& J) {
  const int n = static_cast<int>(arc.p.size());
  std::vector<SymTensor> pp, qq;
  for (int k = 0; k <= s; ++k) {
    pp.push_back(vector_power(arc.p, k));
    qq.push_back(vector_power(arc.q, k));
  }
  SymTensor out(n, s + extra.rank());
  Vec Ep, Eq;
  if (extra.kind != ExtraKind::None) {
    Ep = extra.apply(arc.p);
    Eq = extra.apply(arc.q);
  }
  for (int k = 0; k <= s; ++k) {
    SymTensor tk = sym_product(pp[s - k], qq[k]);
    double c = static_cast<double>(binomial(s, k));
    if (extra.kind == ExtraKind::None) {
      out.axpy(c * J(s - k, k), tk);
    } else {
      Vec e = J(s - k + 1, k) * Ep + J(s - k, k + 1) * Eq;
      out.axpy(c, sym_product(tk, vector_tensor(e)));
    }
  }
  return out;
}

/// Angles in (a0, a1) where <arc(alpha), c> = level.
void level_crossings(const Arc& arc, const Vec& c, double level, std::vector<double>& out) {
  double A = arc.p.dot(c), B = arc.q.dot(c);
  double R = std::hypot(A, B);
  if (R == 0.0 || std::abs(level) >= R) return;
  double phi = std::atan2(B, A);
  double d = std::acos(level / R);
  for (double root : {phi - d, phi + d}) {
    for (int k = -2; k <= 2; ++k) {
      double x = root + 2.0 * kPi * k;
      if (x > arc.a0 && x < arc.a1) out.push_back(x);
    }
  }
}

std::vector<double> sorted_breaks(const Arc& arc, std::vector<double> extra) {
  extra.push_back(arc.a0);
  extra.push_back(arc.a1);
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  return extra;
}

/// Weighted moment over one sub-arc using scalar angular integrals.
SymTensor weighted_piece(const Arc& arc, int s, const ArcExtra& extra, const WeightFn& w) {
  const int D = s + extra.rank();
  if (w.is_constant()) {
    auto I = trig_moments(D, arc.a0, arc.a1);
    SymTensor t = assemble_arc(arc, s, extra, [&](int a, int b) { return I[a][b]; });
    return t * w.constant_value();
  }
  const QuadRule& g = gauss_legendre(64);
  std::vector<std::vector<double>> J(D + 1, std::vector<double>(D + 1, 0.0));
  const double half = 0.5 * (arc.a1 - arc.a0), mid = 0.5 * (arc.a1 + arc.a0);
  std::vector<double> cp(D + 1), sp(D + 1);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    double al = mid + half * g.nodes[i];
    double c = std::cos(al), sn = std::sin(al);
    double wt = half * g.weights[i] * w(arc.at(al));
    if (wt == 0.0) continue;
    cp[0] = sp[0] = 1.0;
    for (int k = 1; k <= D; ++k) {
      cp[k] = cp[k - 1] * c;
      sp[k] = sp[k - 1] * sn;
    }
    for (int a = 0; a <= D; ++a)
      for (int b = std::max(0, s - a); a + b <= D; ++b) J[a][b] += wt * cp[a] * sp[b];
  }
  return assemble_arc(arc, s, extra, [&](int a, int b) { return J[a][b]; });
}

std::vector<std::pair<double, double>> merge_intervals(std::vector<std::pair<double, double>> iv) {
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> out;
  for (auto& x : iv) {
    if (!out.empty() && x.first <= out.back().second)
      out.back().second = std::max(out.back().second, x.second);
    else
      out.push_back(x);
  }
  return out;
}

}  // namespace

SymTensor arc_moment_exact(const Arc& arc, int s, const ArcExtra& extra) {
  auto I = trig_moments(s + extra.rank(), arc.a0, arc.a1);
  return assemble_arc(arc, s, extra, [&](int a, int b) { return I[a][b]; });
}

SymTensor arc_moment_nodal(const Arc& arc, int s, const ArcExtra& extra, const WeightFn& w, int order) {
  const int n = static_cast<int>(arc.p.size());
  SymTensor out(n, s + extra.rank());
  const QuadRule& g = gauss_legendre(order);
  const double half = 0.5 * (arc.a1 - arc.a0), mid = 0.5 * (arc.a1 + arc.a0);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    Vec u = arc.at(mid + half * g.nodes[i]);
    double wt = half * g.weights[i] * w(u);
    SymTensor t = vector_power(u, s);
    if (extra.kind != ExtraKind::None) t = sym_product(t, vector_tensor(extra.apply(u)));
    out.axpy(wt, t);
  }
  return out;
}

std::vector<Arc> clip_arc(const Arc& arc, std::span<const Cap> caps) {
  std::vector<double> br;
  for (const Cap& c : caps) level_crossings(arc, c.c, c.tau, br);
  br = sorted_breaks(arc, std::move(br));
  std::vector<Arc> out;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    if (!(br[i + 1] > br[i])) continue;
    Vec mid = arc.at(0.5 * (br[i] + br[i + 1]));
    bool in = true;
    for (const Cap& c : caps) in = in && c.contains(mid);
    if (!in) continue;
    if (!out.empty() && out.back().a1 == br[i])
      out.back().a1 = br[i + 1];
    else
      out.push_back(arc.sub(br[i], br[i + 1]));
  }
  return out;
}

std::vector<Arc> restrict(const Arc& arc, const RegionSpec& region) {
  if (region.is_full()) return {arc};
  std::vector<std::pair<double, double>> iv;
  for (const auto& p : region.products())
    for (const Arc& a : clip_arc(arc, p.caps)) iv.emplace_back(a.a0, a.a1);
  std::vector<Arc> out;
  for (auto& [b0, b1] : merge_intervals(std::move(iv))) out.push_back(arc.sub(b0, b1));
  return out;
}

SymTensor arc_moment(const Arc& arc, int s, const ArcExtra& extra, std::span<const Cap> caps,
                     const WeightFn& w) {
  const int n = static_cast<int>(arc.p.size());
  SymTensor out(n, s + extra.rank());
  if (w.identically_zero()) return out;
  for (const Arc& piece : clip_arc(arc, caps)) {
    std::vector<double> br;
    for (double k : w.knots()) level_crossings(piece, w.axis(), k, br);
    br = sorted_breaks(piece, std::move(br));
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      if (!(br[i + 1] > br[i])) continue;
      Arc sub = piece.sub(br[i], br[i + 1]);
      if (w(sub.at(0.5 * (sub.a0 + sub.a1))) == 0.0) continue;
      out += weighted_piece(sub, s, extra, w);
    }
  }
  return out;
}

SymTensor arc_moment(const Arc& arc, int s, const ArcExtra& extra, const RegionSpec& region,
                     const WeightFn& w) {
  const int n = static_cast<int>(arc.p.size());
  SymTensor out(n, s + extra.rank());
  if (region.is_full()) return arc_moment(arc, s, extra, std::span<const Cap>(), w);
  for (const Arc& a : restrict(arc, region)) out += arc_moment(a, s, extra, std::span<const Cap>(), w);
  return out;
}

std::pair<double, double> arc_dot_range(const Arc& arc, const Vec& c) {
  double A = arc.p.dot(c), B = arc.q.dot(c);
  double v0 = arc.at(arc.a0).dot(c), v1 = arc.at(arc.a1).dot(c);
  double lo = std::min(v0, v1), hi = std::max(v0, v1);
  double R = std::hypot(A, B), phi = std::atan2(B, A);
  for (int k = -2; k <= 2; ++k) {
    double x = phi + kPi * k;
    if (x > arc.a0 && x < arc.a1) {
      if (k % 2 == 0)
        hi = R;
      else
        lo = -R;
    }
  }
  return {lo, hi};
}

double spherical_area(const SphericalPolygon& poly) { return cone_measure(NormalCone(poly)); }

// ---------------------------------------------------------------------------
// spherical polygons

namespace {

struct Circle {
  Vec axis;
  double level;
};

double det3(const Vec& a, const Vec& b, const Vec& c) { return cross3(a, b).dot(c); }

/// Exact range of <u, c> over the spherical triangle.
std::pair<double, double> dot_range(const std::array<Vec, 3>& T, const Vec& c) {
  auto max_over = [&](const Vec& d) {
    bool inside = true;
    for (int i = 0; i < 3; ++i)
      if (cross3(T[i], T[(i + 1) % 3]).dot(d) < 0) inside = false;
    if (inside) return 1.0;
    double m = -1.0;
    for (int i = 0; i < 3; ++i) {
      const Vec& a = T[i];
      const Vec& b = T[(i + 1) % 3];
      m = std::max(m, a.dot(d));
      Vec nrm = cross3(a, b);
      double nn = nrm.norm();
      if (nn == 0.0) continue;
      nrm /= nn;
      Vec w = d - d.dot(nrm) * nrm;
      double wn = w.norm();
      if (wn == 0.0) continue;
      w /= wn;
      if (cross3(a, w).dot(nrm) >= 0 && cross3(w, b).dot(nrm) >= 0) m = std::max(m, wn);
    }
    return m;
  };
  return {-max_over(-c), max_over(c)};
}

class PolygonIntegrator {
 public:
  PolygonIntegrator(int s, std::span<const Cap> caps, const WeightFn& w, const SphQuadOptions& opt)
      : s_(s), caps_(caps.begin(), caps.end()), w_(w), opt_(opt) {
    for (const Cap& c : caps_) circles_.push_back({c.c, c.tau});
    for (double k : w_.knots()) circles_.push_back({w_.axis(), k});
  }

  SymTensor integrate(const SphericalPolygon& poly) {
    const auto& v = poly.vertices;
    Vec g = Vec::Zero(3);
    for (const Vec& x : v) g += x;
    g.normalize();
    total_area_ = std::max(spherical_area(poly), 1e-300);
    SymTensor out(3, s_);
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::array<Vec, 3> T{g, v[i], v[(i + 1) % v.size()]};
      if (det3(T[0], T[1], T[2]) <= 0) continue;
      out += triangle(T, 0);
    }
    return out;
  }

 private:
  double weight_at(const Vec& u) const {
    for (const Cap& c : caps_)
      if (!c.contains(u)) return 0.0;
    return w_(u);
  }

  double tri_area(const std::array<Vec, 3>& T) const {
    return cone_measure(NormalCone(SphericalPolygon{{T[0], T[1], T[2]}}));
  }

  SymTensor base_rule(const std::array<Vec, 3>& T) const {
    const TriangleRule& tr = triangle_rule(opt_.base_degree);
    const double det = det3(T[0], T[1], T[2]);
    const Vec e1 = T[1] - T[0], e2 = T[2] - T[0];
    SymTensor out(3, s_);
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      auto [a, b] = tr.points[k];
      Vec y = T[0] + a * e1 + b * e2;
      double r = y.norm();
      Vec u = y / r;
      double wt = weight_at(u);
      if (wt == 0.0) continue;
      out.axpy(tr.weights[k] * det / (r * r * r) * wt, vector_power(u, s_));
    }
    return out;
  }

  /// Polar coordinates about c; exact in the circle positions.
  SymTensor polar_rule(const std::array<Vec, 3>& T, Vec c, int order) const {
    Vec cen = (T[0] + T[1] + T[2]).normalized();
    if (c.dot(cen) < 0) c = -c;
    Vec e1 = unit_vector(3, 0);
    {
      int axis = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(c[i]) < std::abs(c[axis])) axis = i;
      e1 = unit_vector(3, axis);
    }
    e1 = (e1 - e1.dot(c) * c).normalized();
    Vec e2 = cross3(c, e1);
    std::array<Vec, 3> m;
    for (int i = 0; i < 3; ++i) m[i] = cross3(T[i], T[(i + 1) % 3]).normalized();

    std::vector<double> levels;
    for (const Circle& ci : circles_) levels.push_back(ci.axis.dot(c) > 0 ? ci.level : -ci.level);

    std::vector<double> br;
    auto azimuth = [&](const Vec& u) { return std::atan2(u.dot(e2), u.dot(e1)); };
    for (const Vec& v : T)
      if (cross3(v, c).norm() > 1e-14) br.push_back(azimuth(v));
    for (double L : levels)
      for (int i = 0; i < 3; ++i) {
        Vec cp = c - c.dot(m[i]) * m[i];
        double kappa = cp.norm();
        if (kappa == 0.0 || std::abs(L) > kappa) continue;
        Vec eh = cp / kappa;
        Vec fh = cross3(m[i], eh);
        double psi = std::acos(std::clamp(L / kappa, -1.0, 1.0));
        for (double sgn : {-1.0, 1.0}) {
          Vec u = std::cos(psi) * eh + sgn * std::sin(psi) * fh;
          if (cross3(u, c).norm() > 1e-14) br.push_back(azimuth(u));
        }
      }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    if (br.empty()) br.push_back(0.0);
    br.push_back(br.front() + 2.0 * kPi);

    const QuadRule& g = gauss_legendre(order);
    SymTensor out(3, s_);
    std::vector<double> rb;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      double f0 = br[k], f1 = br[k + 1];
      if (!(f1 > f0)) continue;
      double fh = 0.5 * (f1 - f0), fm = 0.5 * (f1 + f0);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double phi = fm + fh * g.nodes[i];
        Vec d = std::cos(phi) * e1 + std::sin(phi) * e2;
        double lo = 0.0, hi = kPi;
        for (int e = 0; e < 3; ++e) {
          double A = c.dot(m[e]), B = d.dot(m[e]);
          double R = std::hypot(A, B);
          if (R < 1e-300) continue;
          double delta = std::atan2(B, A);
          double best0 = 0.0, best1 = -1.0;
          for (int sh = -1; sh <= 1; ++sh) {
            double l = std::max(0.0, delta - kPi / 2 + 2 * kPi * sh);
            double h = std::min(kPi, delta + kPi / 2 + 2 * kPi * sh);
            if (h - l > best1 - best0) best0 = l, best1 = h;
          }
          lo = std::max(lo, best0);
          hi = std::min(hi, best1);
        }
        if (!(hi > lo)) continue;
        rb.assign({lo, hi});
        for (double L : levels) {
          double rho = std::acos(std::clamp(L, -1.0, 1.0));
          if (rho > lo && rho < hi) rb.push_back(rho);
        }
        std::sort(rb.begin(), rb.end());
        for (std::size_t j = 0; j + 1 < rb.size(); ++j) {
          double r0 = rb[j], r1 = rb[j + 1];
          if (!(r1 > r0)) continue;
          double rh = 0.5 * (r1 - r0), rm = 0.5 * (r1 + r0);
          Vec umid = std::cos(rm) * c + std::sin(rm) * d;
          bool in = true;
          for (const Cap& cap : caps_) in = in && cap.contains(umid);
          if (!in) continue;
          for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            double rho = rm + rh * g.nodes[q];
            Vec u = std::cos(rho) * c + std::sin(rho) * d;
            double wt = w_(u);
            if (wt == 0.0) continue;
            out.axpy(fh * g.weights[i] * rh * g.weights[q] * std::sin(rho) * wt, vector_power(u, s_));
          }
        }
      }
    }
    return out;
  }

  std::array<std::array<Vec, 3>, 4> split(const std::array<Vec, 3>& T) const {
    Vec a = (T[0] + T[1]).normalized(), b = (T[1] + T[2]).normalized(), c = (T[2] + T[0]).normalized();
    return {{{T[0], a, c}, {a, T[1], b}, {c, b, T[2]}, {a, b, c}}};
  }

  /// Circles crossing T: -1 none, 0 all on one axis (returned), 1 mixed.
  int classify(const std::array<Vec, 3>& T, Vec& axis) const {
    int state = -1;
    for (const Circle& ci : circles_) {
      auto [lo, hi] = dot_range(T, ci.axis);
      if (!(lo < ci.level && ci.level < hi)) continue;
      if (state == -1) {
        state = 0;
        axis = ci.axis;
      } else if (cross3(axis, ci.axis).norm() > 1e-12) {
        state = 1;
      }
    }
    return state;
  }

  double tol_for(const std::array<Vec, 3>& T) const {
    return std::max(opt_.rel_tol * tri_area(T), 1e-2 * opt_.rel_tol * total_area_);
  }

  SymTensor estimate(const std::array<Vec, 3>& T) const {
    Vec axis;
    int state = classify(T, axis);
    if (state == 0) return polar_rule(T, axis, opt_.polar_order);
    return base_rule(T);
  }

  SymTensor triangle(const std::array<Vec, 3>& T, int depth) {
    Vec axis;
    int state = classify(T, axis);
    SymTensor coarse(3, s_), fine(3, s_);
    if (state == 0) {
      coarse = polar_rule(T, axis, opt_.polar_order);
      fine = polar_rule(T, axis, 2 * opt_.polar_order);
    } else {
      coarse = base_rule(T);
      for (const auto& C : split(T)) fine += estimate(C);
    }
    if ((fine - coarse).max_norm() <= tol_for(T)) return fine;
    if (depth >= opt_.max_depth)
      throw RefinementError("spherical quadrature: refinement depth exceeded", coarse.max_norm(),
                            fine.max_norm());
    SymTensor out(3, s_);
    for (const auto& C : split(T)) out += triangle(C, depth + 1);
    return out;
  }

  int s_;
  std::vector<Cap> caps_;
  WeightFn w_;
  SphQuadOptions opt_;
  std::vector<Circle> circles_;
  double total_area_ = 1.0;
};

}  // namespace

SymTensor spherical_polygon_moment(const SphericalPolygon& poly, int s, std::span<const Cap> caps,
                                   const WeightFn& w, const SphQuadOptions& opt) {
  if (poly.vertices.size() < 3) throw std::invalid_argument("spherical polygon needs 3 vertices");
  if (w.identically_zero()) return SymTensor(3, s);
  PolygonIntegrator integ(s, caps, w, opt);
  return integ.integrate(poly);
}

SymTensor spherical_polygon_moment(const SphericalPolygon& poly, int s, const RegionSpec& region,
                                   const WeightFn& w, const SphQuadOptions& opt) {
  if (region.is_full()) return spherical_polygon_moment(poly, s, std::span<const Cap>(), w, opt);
  SymTensor out(3, s);
  for (const auto& term : region.expand())
    out.axpy(term.sign, spherical_polygon_moment(poly, s, term.product.caps, w, opt));
  return out;
}

}  // namespace loctens
