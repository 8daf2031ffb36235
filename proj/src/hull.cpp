#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "loctens/polytope.hpp"

namespace loctens {

namespace {

constexpr double kRelEps = 1e-9;

double bbox_diagonal(std::span<const Vec> pts) {
  Vec lo = pts[0], hi = pts[0];
  for (const Vec& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

std::vector<Vec> sorted_unique(std::span<const Vec> points, int dim) {
  std::vector<Vec> pts;
  pts.reserve(points.size());
  for (const Vec& p : points) {
    if (p.size() != dim) throw std::invalid_argument("hull: mixed point dimensions");
    if (!p.allFinite()) throw std::invalid_argument("hull: non-finite coordinate");
    pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return a == b; }),
            pts.end());
  return pts;
}

[[noreturn]] void degenerate(int rank, int dim) {
  throw DegenerateError("degenerate input: points have affine rank " + std::to_string(rank) +
                            " in R^" + std::to_string(dim),
                        rank);
}

Polytope hull2(std::vector<Vec> pts) {
  if (pts.empty()) degenerate(-1, 2);
  const double diag = bbox_diagonal(pts);
  if (pts.size() == 1 || diag == 0.0) degenerate(0, 2);
  const double eps = kRelEps * diag;
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  // a turn counts only if the middle point is off the chord by more than eps
  auto left_turn = [&](const Vec& o, const Vec& a, const Vec& b) {
    double len = (b - o).norm();
    return len > 0 && cross(o, a, b) > eps * len;
  };
  std::vector<int> h;
  for (int pass = 0; pass < 2; ++pass) {
    std::size_t start = h.size();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      int i = pass == 0 ? static_cast<int>(k) : static_cast<int>(pts.size() - 1 - k);
      while (h.size() >= start + 2 && !left_turn(pts[h[h.size() - 2]], pts[h.back()], pts[i]))
        h.pop_back();
      h.push_back(i);
    }
    h.pop_back();
  }
  if (h.size() < 3) degenerate(1, 2);
  std::vector<Vec> verts;
  std::vector<int> cycle;
  for (int i : h) {
    cycle.push_back(static_cast<int>(verts.size()));
    verts.push_back(pts[i]);
  }
  return Polytope::from_cycles(2, std::move(verts), {cycle});
}

struct QFace {
  std::array<int, 3> v;
  Eigen::Vector3d n;
  double d = 0.0;
  std::array<int, 3> nb{-1, -1, -1};
  std::vector<int> outside;
  bool alive = true;
};

class QuickHull {
 public:
  explicit QuickHull(std::vector<Eigen::Vector3d> pts, double eps) : p_(std::move(pts)), eps_(eps) {}

  void run();
  Polytope extract(const std::vector<Vec>& original);

 private:
  double dist(int f, int i) const { return f_[f].n.dot(p_[i]) - f_[f].d; }
  int make_face(int a, int b, int c);
  void initial_simplex();
  void add_point(int f, int apex);

  std::vector<Eigen::Vector3d> p_;
  double eps_;
  std::vector<QFace> f_;
};

int QuickHull::make_face(int a, int b, int c) {
  QFace f;
  f.v = {a, b, c};
  Eigen::Vector3d n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
  if (!(n.norm() > 0)) throw std::runtime_error("hull: degenerate triangle during insertion");
  f.n = n.normalized();
  f.d = f.n.dot((p_[a] + p_[b] + p_[c]) / 3.0);
  f_.push_back(std::move(f));
  return static_cast<int>(f_.size()) - 1;
}

void QuickHull::initial_simplex() {
  const int n = static_cast<int>(p_.size());
  int i0 = 0;
  int i1 = -1;
  double best = eps_;
  for (int i = 0; i < n; ++i) {
    double d = (p_[i] - p_[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (i1 < 0) degenerate(0, 3);
  Eigen::Vector3d dir = (p_[i1] - p_[i0]).normalized();
  int i2 = -1;
  best = eps_;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d w = p_[i] - p_[i0];
    double d = (w - w.dot(dir) * dir).norm();
    if (d > best) best = d, i2 = i;
  }
  if (i2 < 0) degenerate(1, 3);
  Eigen::Vector3d nrm = (p_[i1] - p_[i0]).cross(p_[i2] - p_[i0]).normalized();
  int i3 = -1;
  best = eps_;
  for (int i = 0; i < n; ++i) {
    double d = std::abs(nrm.dot(p_[i] - p_[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (i3 < 0) degenerate(2, 3);

  std::array<int, 4> s{i0, i1, i2, i3};
  Eigen::Vector3d centroid = (p_[i0] + p_[i1] + p_[i2] + p_[i3]) / 4.0;
  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;
  for (int k = 0; k < 4; ++k) {
    std::array<int, 3> t;
    int m = 0;
    for (int j = 0; j < 4; ++j)
      if (j != k) t[m++] = s[j];
    int f = make_face(t[0], t[1], t[2]);
    if (f_[f].n.dot(centroid) - f_[f].d > 0) {
      f_.pop_back();
      f = make_face(t[0], t[2], t[1]);
    }
    for (int e = 0; e < 3; ++e) edge_owner[{f_[f].v[e], f_[f].v[(e + 1) % 3]}] = {f, e};
  }
  for (auto& [key, val] : edge_owner) {
    auto it = edge_owner.find({key.second, key.first});
    f_[val.first].nb[val.second] = it->second.first;
  }
  std::vector<char> used(n, 0);
  for (int i : s) used[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    for (int f = 0; f < 4; ++f)
      if (dist(f, i) > eps_) {
        f_[f].outside.push_back(i);
        break;
      }
  }
}

void QuickHull::add_point(int start, int apex) {
  // visible region by flood fill from the seed face
  std::vector<int> visible{start};
  std::vector<char> mark(f_.size(), 0);
  mark[start] = 1;
  for (std::size_t k = 0; k < visible.size(); ++k) {
    for (int nb : f_[visible[k]].nb) {
      if (mark[nb]) continue;
      if (dist(nb, apex) > eps_) {
        mark[nb] = 1;
        visible.push_back(nb);
      } else {
        mark[nb] = 2;
      }
    }
  }
  struct Horizon {
    int a, b, outer;
  };
  std::vector<Horizon> horizon;
  for (int f : visible)
    for (int e = 0; e < 3; ++e) {
      int nb = f_[f].nb[e];
      if (mark[nb] != 1) horizon.push_back({f_[f].v[e], f_[f].v[(e + 1) % 3], nb});
    }

  std::map<int, int> by_start, by_end;
  std::vector<int> created;
  for (const Horizon& h : horizon) {
    int nf = make_face(h.a, h.b, apex);
    created.push_back(nf);
    f_[nf].nb[0] = h.outer;
    QFace& outer = f_[h.outer];
    for (int e = 0; e < 3; ++e)
      if (outer.v[e] == h.b && outer.v[(e + 1) % 3] == h.a) outer.nb[e] = nf;
    if (!by_start.emplace(h.a, nf).second || !by_end.emplace(h.b, nf).second)
      throw std::runtime_error("hull: horizon is not a simple cycle");
  }
  for (int nf : created) {
    QFace& f = f_[nf];
    f.nb[1] = by_start.at(f.v[1]);
    f.nb[2] = by_end.at(f.v[0]);
  }
  for (int f : visible) {
    f_[f].alive = false;
    for (int i : f_[f].outside) {
      if (i == apex) continue;
      for (int nf : created)
        if (dist(nf, i) > eps_) {
          f_[nf].outside.push_back(i);
          break;
        }
    }
    f_[f].outside.clear();
  }
}

void QuickHull::run() {
  initial_simplex();
  for (std::size_t f = 0; f < f_.size(); ++f) {
    if (!f_[f].alive || f_[f].outside.empty()) continue;
    int apex = -1;
    double best = -1.0;
    for (int i : f_[f].outside) {
      double d = dist(static_cast<int>(f), i);
      if (d > best) best = d, apex = i;
    }
    add_point(static_cast<int>(f), apex);
  }
}

Polytope QuickHull::extract(const std::vector<Vec>& original) {
  std::vector<int> alive;
  std::vector<int> slot(f_.size(), -1);
  for (std::size_t f = 0; f < f_.size(); ++f)
    if (f_[f].alive) {
      slot[f] = static_cast<int>(alive.size());
      alive.push_back(static_cast<int>(f));
    }
  std::vector<int> parent(alive.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto opposite = [&](int f, int a, int b) {
    for (int v : f_[f].v)
      if (v != a && v != b) return v;
    return -1;
  };
  for (int f : alive)
    for (int e = 0; e < 3; ++e) {
      int g = f_[f].nb[e];
      int a = f_[f].v[e], b = f_[f].v[(e + 1) % 3];
      if (std::abs(dist(f, opposite(g, a, b))) <= eps_ &&
          std::abs(dist(g, opposite(f, a, b))) <= eps_ && f_[f].n.dot(f_[g].n) > 0) {
        int x = find(slot[f]), y = find(slot[g]);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
      }
    }

  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < alive.size(); ++i) groups[find(static_cast<int>(i))].push_back(alive[i]);

  std::vector<std::vector<int>> cycles;
  for (auto& [root, members] : groups) {
    std::map<int, int> next;
    for (int f : members)
      for (int e = 0; e < 3; ++e) {
        int g = f_[f].nb[e];
        if (find(slot[g]) == root) continue;
        if (!next.emplace(f_[f].v[e], f_[f].v[(e + 1) % 3]).second)
          throw std::runtime_error("hull: merged facet is not a disk");
      }
    std::vector<int> cycle;
    int start = next.begin()->first;
    int v = start;
    do {
      cycle.push_back(v);
      v = next.at(v);
      if (cycle.size() > next.size()) throw std::runtime_error("hull: broken facet boundary");
    } while (v != start);
    if (cycle.size() != next.size()) throw std::runtime_error("hull: facet boundary has several loops");
    cycles.push_back(std::move(cycle));
  }

  // drop vertices that are collinear corners in every facet containing them
  std::map<int, bool> corner;
  for (const auto& c : cycles) {
    const int m = static_cast<int>(c.size());
    for (int i = 0; i < m; ++i) {
      const Eigen::Vector3d& a = p_[c[(i + m - 1) % m]];
      const Eigen::Vector3d& b = p_[c[i]];
      const Eigen::Vector3d& d = p_[c[(i + 1) % m]];
      Eigen::Vector3d chord = d - a;
      double off = (b - a).cross(chord).norm() / std::max(chord.norm(), 1e-300);
      bool is_corner = off > eps_;
      auto [it, inserted] = corner.emplace(c[i], is_corner);
      if (!inserted) it->second = it->second || is_corner;
    }
  }
  std::map<int, int> remap;
  std::vector<Vec> verts;
  for (auto& [v, keep] : corner)
    if (keep) {
      remap[v] = static_cast<int>(verts.size());
      verts.push_back(original[v]);
    }
  for (auto& c : cycles) {
    std::vector<int> kept;
    for (int v : c)
      if (corner[v]) kept.push_back(remap[v]);
    c = std::move(kept);
  }
  return Polytope::from_cycles(3, std::move(verts), std::move(cycles));
}

Polytope hull3(std::vector<Vec> pts) {
  if (pts.empty()) degenerate(-1, 3);
  const double eps = kRelEps * bbox_diagonal(pts);
  std::vector<Eigen::Vector3d> p;
  p.reserve(pts.size());
  for (const Vec& v : pts) p.emplace_back(v[0], v[1], v[2]);
  QuickHull qh(std::move(p), eps);
  qh.run();
  return qh.extract(pts);
}

}  // namespace

Polytope Polytope::hull(std::span<const Vec> points) {
  if (points.empty()) throw DegenerateError("hull: empty point set", -1);
  const int dim = static_cast<int>(points[0].size());
  if (dim != 2 && dim != 3) throw std::invalid_argument("hull: dimension must be 2 or 3");
  std::vector<Vec> pts = sorted_unique(points, dim);
  return dim == 2 ? hull2(std::move(pts)) : hull3(std::move(pts));
}

Polytope Polytope::hull(std::initializer_list<Vec> points) {
  std::vector<Vec> v(points);
  return hull(std::span<const Vec>(v));
}

}  // namespace loctens
