#include "loctens/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "loctens/quadrature.hpp"

namespace loctens {

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

Vec default_edge_vector(const Vec& a, const Vec& b) {
  Vec d = lex_less(a, b) ? Vec(b - a) : Vec(a - b);
  return d.normalized();
}

namespace {

Vec unit_orthogonal(const Vec& n) {
  // a unit vector orthogonal to the unit 3-vector n
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  Vec e = unit_vector(3, axis);
  return (e - e.dot(n) * n).normalized();
}

Vec newell_normal(const std::vector<Vec>& v, const std::vector<int>& cycle) {
  Vec n = Vec::Zero(3);
  const std::size_t m = cycle.size();
  const Vec& o = v[cycle[0]];
  for (std::size_t i = 1; i + 1 < m; ++i) n += cross3(v[cycle[i]] - o, v[cycle[i + 1]] - o);
  return n;
}

Arc arc_between(const Vec& n1, const Vec& n2) {
  Vec q = n2 - n2.dot(n1) * n1;
  double qn = q.norm();
  if (!(qn > 0)) throw std::runtime_error("normal cone: coincident adjacent normals");
  double len = n1.size() == 3 ? std::atan2(cross3(n1, n2).norm(), n1.dot(n2))
                              : std::atan2(std::abs(n1[0] * n2[1] - n1[1] * n2[0]), n1.dot(n2));
  return Arc{n1, q / qn, 0.0, len};
}

double diameter_of(const std::vector<Vec>& v) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d2 = std::max(d2, (v[i] - v[j]).squaredNorm());
  return std::sqrt(d2);
}

}  // namespace

Polytope Polytope::from_cycles(int dim, std::vector<Vec> vertices,
                               std::vector<std::vector<int>> cycles) {
  Polytope P;
  P.dim_ = dim;
  P.vertices_ = std::move(vertices);
  P.cycles_ = std::move(cycles);
  const auto& V = P.vertices_;
  const int nv = static_cast<int>(V.size());
  for (const auto& c : P.cycles_)
    for (int i : c)
      if (i < 0 || i >= nv) throw std::invalid_argument("from_cycles: vertex index out of range");

  if (dim == 2) {
    if (P.cycles_.size() != 1 || P.cycles_[0].size() < 3)
      throw std::invalid_argument("from_cycles: a polygon needs one cycle of length >= 3");
    const auto& c = P.cycles_[0];
    const int m = static_cast<int>(c.size());
    double area2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const Vec& a = V[c[i]];
      const Vec& b = V[c[(i + 1) % m]];
      area2 += a[0] * b[1] - a[1] * b[0];
    }
    if (!(area2 > 0)) throw std::invalid_argument("from_cycles: polygon not counterclockwise");
    P.volume_ = 0.5 * area2;
    std::vector<Vec> normals(m);
    for (int i = 0; i < m; ++i) {
      const Vec& a = V[c[i]];
      const Vec& b = V[c[(i + 1) % m]];
      Vec d = b - a;
      Face e;
      e.dim = 1;
      e.vertices = {c[i], c[(i + 1) % m]};
      e.direction_basis = {default_edge_vector(a, b)};
      e.measure = d.norm();
      normals[i] = vec2(d[1], -d[0]) / e.measure;
      e.cone = PointCone{normals[i]};
      P.faces_[1].push_back(std::move(e));
      P.facet_normals_.push_back(normals[i]);
      P.facet_offsets_.push_back(normals[i].dot(a));
    }
    for (int i = 0; i < m; ++i) {
      Face v;
      v.dim = 0;
      v.vertices = {c[i]};
      v.measure = 1.0;
      v.cone = arc_between(normals[(i + m - 1) % m], normals[i]);
      P.faces_[0].push_back(std::move(v));
    }
    // vertex faces follow vertex numbering
    std::sort(P.faces_[0].begin(), P.faces_[0].end(),
              [](const Face& a, const Face& b) { return a.vertices[0] < b.vertices[0]; });
  } else if (dim == 3) {
    const int nf = static_cast<int>(P.cycles_.size());
    std::map<std::pair<int, int>, int> directed;
    std::vector<std::vector<int>> incident(nv);
    for (int f = 0; f < nf; ++f) {
      const auto& c = P.cycles_[f];
      if (c.size() < 3) throw std::invalid_argument("from_cycles: facet with fewer than 3 vertices");
      Vec n = newell_normal(V, c);
      double twice_area = n.norm();
      if (!(twice_area > 0)) throw std::invalid_argument("from_cycles: degenerate facet");
      n /= twice_area;
      double off = 0.0;
      for (int i : c) off += n.dot(V[i]);
      off /= static_cast<double>(c.size());
      P.facet_normals_.push_back(n);
      P.facet_offsets_.push_back(off);
      Face F;
      F.dim = 2;
      F.vertices = c;
      Vec b1 = (V[c[1]] - V[c[0]]);
      b1 = (b1 - b1.dot(n) * n).normalized();
      F.direction_basis = {b1, cross3(n, b1)};
      F.measure = 0.5 * twice_area;
      F.cone = PointCone{n};
      P.faces_[2].push_back(std::move(F));
      for (std::size_t i = 0; i < c.size(); ++i) {
        int a = c[i], b = c[(i + 1) % c.size()];
        if (!directed.emplace(std::make_pair(a, b), f).second)
          throw std::invalid_argument("from_cycles: edge used twice in the same direction");
        incident[a].push_back(f);
      }
    }
    P.volume_ = 0.0;
    for (int f = 0; f < nf; ++f) P.volume_ += P.faces_[2][f].measure * P.facet_offsets_[f] / 3.0;
    for (const auto& [key, f] : directed) {
      auto [a, b] = key;
      auto it = directed.find({b, a});
      if (it == directed.end()) throw std::invalid_argument("from_cycles: open surface");
      if (a > b) continue;
      Face e;
      e.dim = 1;
      e.vertices = {a, b};
      e.direction_basis = {default_edge_vector(V[a], V[b])};
      e.measure = (V[b] - V[a]).norm();
      e.cone = arc_between(P.facet_normals_[f], P.facet_normals_[it->second]);
      P.faces_[1].push_back(std::move(e));
    }
    for (int v = 0; v < nv; ++v) {
      if (incident[v].size() < 3) throw std::invalid_argument("from_cycles: vertex in fewer than 3 facets");
      Vec m = Vec::Zero(3);
      for (int f : incident[v]) m += P.facet_normals_[f];
      m.normalize();
      Vec e1 = unit_orthogonal(m);
      Vec e2 = cross3(m, e1);
      std::vector<std::pair<double, int>> order;
      for (int f : incident[v]) {
        const Vec& n = P.facet_normals_[f];
        order.emplace_back(std::atan2(n.dot(e2), n.dot(e1)), f);
      }
      std::sort(order.begin(), order.end());
      SphericalPolygon sp;
      for (auto& [ang, f] : order) sp.vertices.push_back(P.facet_normals_[f]);
      Face F;
      F.dim = 0;
      F.vertices = {v};
      F.measure = 1.0;
      F.cone = std::move(sp);
      P.faces_[0].push_back(std::move(F));
    }
    const long euler = static_cast<long>(nv) - static_cast<long>(P.faces_[1].size()) + nf;
    if (euler != 2)
      throw std::invalid_argument("from_cycles: Euler characteristic is " + std::to_string(euler));
  } else {
    throw std::invalid_argument("from_cycles: dimension must be 2 or 3");
  }
  if (!(P.volume_ > 0)) throw std::invalid_argument("from_cycles: non-positive volume");
  P.diameter_ = diameter_of(P.vertices_);
  return P;
}

const std::vector<Face>& Polytope::faces(int k) const {
  if (k < 0 || k >= dim_) throw std::out_of_range("faces: dimension out of range");
  return faces_[k];
}

std::vector<Halfspace> Polytope::halfspaces() const {
  std::vector<Halfspace> h;
  for (std::size_t i = 0; i < facet_normals_.size(); ++i) h.push_back({facet_normals_[i], facet_offsets_[i]});
  return h;
}

bool Polytope::contains(const Vec& x, double tol) const {
  for (std::size_t i = 0; i < facet_normals_.size(); ++i)
    if (facet_normals_[i].dot(x) - facet_offsets_[i] > tol) return false;
  return true;
}

Vec Polytope::edge_vector(int e) const {
  const Face& f = faces(1)[e];
  return default_edge_vector(vertices_[f.vertices[0]], vertices_[f.vertices[1]]);
}

const NormalCone& normal_cone(const Polytope& p, int k, int face) { return p.faces(k).at(face).cone; }

double cone_measure(const NormalCone& c) {
  if (std::holds_alternative<PointCone>(c)) return 1.0;
  if (const Arc* a = std::get_if<Arc>(&c)) return a->length();
  const auto& v = std::get<SphericalPolygon>(c).vertices;
  const std::size_t m = v.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = v[(i + m - 1) % m];
    const Vec& b = v[i];
    const Vec& d = v[(i + 1) % m];
    Vec t1 = (a - a.dot(b) * b).normalized();
    Vec t2 = (d - d.dot(b) * b).normalized();
    sum += std::atan2(cross3(t1, t2).norm(), t1.dot(t2));
  }
  return sum - (static_cast<double>(m) - 2.0) * std::numbers::pi;
}

SymTensor segment_moment(const Vec& a, const Vec& b, int r) {
  const int n = static_cast<int>(a.size());
  const double len = (b - a).norm();
  if (r == 0) return SymTensor::scalar(n, len);
  const QuadRule& g = gauss_legendre(r / 2 + 1);
  SymTensor out(n, r);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    double s = 0.5 * (g.nodes[i] + 1.0);
    out.axpy(0.5 * g.weights[i] * len, vector_power(Vec(a + s * (b - a)), r));
  }
  return out;
}

SymTensor polygon_moment(std::span<const Vec> pts, int r) {
  const int n = static_cast<int>(pts[0].size());
  SymTensor out(n, r);
  const TriangleRule& tr = triangle_rule(r);
  const Vec& o = pts[0];
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    Vec e1 = pts[i] - o;
    Vec e2 = pts[i + 1] - o;
    double jac = n == 2 ? std::abs(e1[0] * e2[1] - e1[1] * e2[0]) : cross3(e1, e2).norm();
    if (jac == 0.0) continue;
    if (r == 0) {
      out.coeffs()[0] += 0.5 * jac;
      continue;
    }
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      auto [s, t] = tr.points[k];
      out.axpy(tr.weights[k] * jac, vector_power(Vec(o + s * e1 + t * e2), r));
    }
  }
  return out;
}

SymTensor face_moment(const Polytope& p, const Face& f, int r) {
  const auto& V = p.vertices();
  switch (f.dim) {
    case 0:
      return vector_power(V[f.vertices[0]], r);
    case 1:
      return segment_moment(V[f.vertices[0]], V[f.vertices[1]], r);
    case 2: {
      std::vector<Vec> pts;
      for (int i : f.vertices) pts.push_back(V[i]);
      return polygon_moment(pts, r);
    }
    default:
      throw std::invalid_argument("face_moment: bad face dimension");
  }
}

SymTensor simplex_moment(std::span<const Vec> v, int r) {
  const int n = static_cast<int>(v[0].size());
  const int d = static_cast<int>(v.size()) - 1;
  double vol = 0.0;
  if (d == 0) {
    return vector_power(v[0], r);
  } else if (d == 1) {
    vol = (v[1] - v[0]).norm();
  } else if (d == 2) {
    Vec e1 = v[1] - v[0], e2 = v[2] - v[0];
    vol = 0.5 * (n == 2 ? std::abs(e1[0] * e2[1] - e1[1] * e2[0]) : cross3(e1, e2).norm());
  } else if (d == 3) {
    vol = std::abs(cross3(v[1] - v[0], v[2] - v[0]).dot(v[3] - v[0])) / 6.0;
  } else {
    throw std::invalid_argument("simplex_moment: bad simplex");
  }
  std::vector<std::vector<SymTensor>> pw(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (int k = 0; k <= r; ++k) pw[i].push_back(vector_power(v[i], k));
  SymTensor sum(n, r);
  std::vector<int> k(v.size(), 0);
  // enumerate compositions of r into d+1 parts
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == v.size()) {
      k[i] = left;
      SymTensor t = pw[0][k[0]];
      for (std::size_t j = 1; j < v.size(); ++j) t = sym_product(t, pw[j][k[j]]);
      sum += t;
      return;
    }
    for (int a = 0; a <= left; ++a) {
      k[i] = a;
      self(self, i + 1, left - a);
    }
  };
  rec(rec, 0, r);
  return sum * (vol * factorial(r) * factorial(d) / factorial(r + d));
}

SymTensor volume_moment(const Polytope& p, int r) {
  const auto& V = p.vertices();
  SymTensor out(p.dim(), r);
  if (p.dim() == 2) {
    const auto& c = p.cycles()[0];
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      std::array<Vec, 3> s{V[c[0]], V[c[i]], V[c[i + 1]]};
      out += simplex_moment(s, r);
    }
    return out;
  }
  for (const auto& c : p.cycles()) {
    bool has0 = std::find(c.begin(), c.end(), 0) != c.end();
    if (has0) continue;
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      std::array<Vec, 4> s{V[0], V[c[0]], V[c[i]], V[c[i + 1]]};
      out += simplex_moment(s, r);
    }
  }
  return out;
}

Polytope clip_halfspace(const Polytope& p, const Halfspace& h) {
  const auto& V = p.vertices();
  const double nn = h.normal.norm();
  if (!(nn > 0) || h.normal.size() != p.dim()) throw std::invalid_argument("clip_halfspace: bad normal");
  const double eps = 1e-9 * p.diameter();
  std::vector<double> s(V.size());
  bool all_in = true, any_in = false;
  for (std::size_t i = 0; i < V.size(); ++i) {
    s[i] = h.signed_distance(V[i]) / nn;
    if (s[i] > eps) all_in = false;
    if (s[i] < -eps) any_in = true;
  }
  if (all_in) return p;
  if (!any_in)
    throw DegenerateError("clip_halfspace: intersection is empty or lower-dimensional", -1);
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < V.size(); ++i)
    if (s[i] <= eps) pts.push_back(V[i]);
  for (const Face& e : p.faces(1)) {
    int a = e.vertices[0], b = e.vertices[1];
    if ((s[a] < -eps && s[b] > eps) || (s[a] > eps && s[b] < -eps)) {
      double lam = s[a] / (s[a] - s[b]);
      pts.push_back(V[a] + lam * (V[b] - V[a]));
    }
  }
  return Polytope::hull(pts);
}

Polytope minkowski_sum(const Polytope& a, std::span<const Vec> points) {
  std::vector<Vec> pts;
  pts.reserve(a.vertices().size() * points.size());
  for (const Vec& x : a.vertices())
    for (const Vec& y : points) {
      if (y.size() != a.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
      pts.push_back(x + y);
    }
  return Polytope::hull(pts);
}

Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  return minkowski_sum(a, std::span<const Vec>(b.vertices()));
}

namespace {

Polytope affine_image(const Polytope& p, const Mat& A, const Vec& t, bool reverse) {
  std::vector<Vec> verts;
  verts.reserve(p.vertices().size());
  for (const Vec& v : p.vertices()) verts.push_back(A * v + t);
  auto cycles = p.cycles();
  if (reverse)
    for (auto& c : cycles) std::reverse(c.begin(), c.end());
  return Polytope::from_cycles(p.dim(), std::move(verts), std::move(cycles));
}

}  // namespace

Polytope scale(const Polytope& p, double lambda) {
  if (lambda < 0) throw std::invalid_argument("scale: negative factor");
  if (lambda == 0) throw DegenerateError("scale: factor 0 collapses the polytope to a point", 0);
  return affine_image(p, lambda * Mat::Identity(p.dim(), p.dim()), Vec::Zero(p.dim()), false);
}

Polytope translate(const Polytope& p, const Vec& t) {
  if (t.size() != p.dim()) throw std::invalid_argument("translate: dimension mismatch");
  return affine_image(p, Mat::Identity(p.dim(), p.dim()), t, false);
}

Polytope apply_rotation(const Polytope& p, const Rotation& theta) {
  if (theta.dim() != p.dim()) throw std::invalid_argument("apply_rotation: dimension mismatch");
  return affine_image(p, theta.matrix(), Vec::Zero(p.dim()), !theta.proper());
}

}  // namespace loctens
