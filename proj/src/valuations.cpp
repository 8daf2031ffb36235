#include "loctens/valuations.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace loctens {

namespace {

struct FamilyEntry {
  Family family;
  std::string_view name;
};

constexpr FamilyEntry kFamilies[] = {
    {Family::Phi, "Phi"},
    {Family::PhiTilde3, "PhiTilde3"},
    {Family::PhiTilde2, "PhiTilde2"},
    {Family::GlobalPsi2, "GlobalPsi2"},
    {Family::GlobalPsi2Vol, "GlobalPsi2Vol"},
    {Family::GlobalPhiTilde2, "GlobalPhiTilde2"},
    {Family::GlobalT3, "GlobalT3"},
    {Family::W1, "W1"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SpecError("functional: cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string_view family_name(Family f) {
  for (const auto& e : kFamilies)
    if (e.family == f) return e.name;
  return "?";
}

Family family_from_name(std::string_view name) {
  for (const auto& e : kFamilies)
    if (e.name == name) return e.family;
  throw SpecError("functional: unknown family '" + std::string(name) + "'");
}

FunctionalSpec FunctionalSpec::phi(int dim, int k, int r, int s, int j, int m) {
  return FunctionalSpec{Family::Phi, dim, k, r, s, j, m};
}

FunctionalSpec FunctionalSpec::phitilde3(int r, int s, int j, int m) {
  return FunctionalSpec{Family::PhiTilde3, 3, 1, r, s, j, m};
}

FunctionalSpec FunctionalSpec::phitilde2(int k, int r, int s, int m) {
  return FunctionalSpec{Family::PhiTilde2, 2, k, r, s, 0, m};
}

int FunctionalSpec::rank() const {
  switch (family) {
    case Family::Phi:
      return 2 * m + 2 * j + r + s;
    case Family::PhiTilde3:
      return 2 * m + 2 * j + r + s + 2;
    case Family::PhiTilde2:
    case Family::GlobalPhiTilde2:
      return 2 * m + r + s + 1;
    case Family::GlobalPsi2:
      return 2 * m + r + s;
    case Family::GlobalPsi2Vol:
      return 2 * m + r;
    case Family::GlobalT3:
      return 2 * m + r + s + 2;
    case Family::W1:
      return 0;
  }
  return 0;
}

int FunctionalSpec::degree() const {
  switch (family) {
    case Family::Phi:
    case Family::PhiTilde2:
    case Family::GlobalPsi2:
    case Family::GlobalPhiTilde2:
      return k + r;
    case Family::PhiTilde3:
    case Family::GlobalT3:
      return 1 + r;
    case Family::GlobalPsi2Vol:
      return 2 + r;
    case Family::W1:
      return 1;
  }
  return 0;
}

bool FunctionalSpec::orientation_odd() const {
  return family == Family::PhiTilde3 || family == Family::PhiTilde2 ||
         family == Family::GlobalPhiTilde2 || family == Family::GlobalT3;
}

void FunctionalSpec::validate() const {
  auto fail = [&](const std::string& why) { throw SpecError(to_string() + ": " + why); };
  if (r < 0 || s < 0 || j < 0 || m < 0 || k < 0) fail("indices must be nonnegative");
  switch (family) {
    case Family::Phi:
      if (dim != 2 && dim != 3) fail("dim must be 2 or 3");
      if (k > dim - 1) fail("k must lie in {0,...,n-1}");
      if (j > 0 && (k == 0 || k == dim - 1)) fail("j must be 0 when k is 0 or n-1");
      break;
    case Family::PhiTilde3:
      if (dim != 3) fail("defined only in dimension 3");
      break;
    case Family::PhiTilde2:
    case Family::GlobalPsi2:
    case Family::GlobalPhiTilde2:
      if (dim != 2) fail("defined only in dimension 2");
      if (k > 1) fail("k must be 0 or 1");
      if (j != 0) fail("j is not an index of this family");
      break;
    case Family::GlobalPsi2Vol:
      if (dim != 2) fail("defined only in dimension 2");
      if (j != 0 || s != 0) fail("only r and m are indices of this family");
      break;
    case Family::GlobalT3:
      if (dim != 3) fail("defined only in dimension 3");
      if (j != 0) fail("j is not an index of this family");
      break;
    case Family::W1:
      if (dim != 3) fail("defined only in dimension 3");
      if (r != 0 || s != 0 || j != 0 || m != 0) fail("takes no indices");
      break;
  }
  if (rank() > kMaxRank) fail("rank exceeds " + std::to_string(kMaxRank));
}

std::string FunctionalSpec::to_string() const {
  std::ostringstream os;
  os << family_name(family) << "(";
  switch (family) {
    case Family::Phi:
      os << k << "," << r << "," << s << "," << j;
      break;
    case Family::PhiTilde3:
      os << r << "," << s << "," << j;
      break;
    case Family::PhiTilde2:
    case Family::GlobalPsi2:
    case Family::GlobalPhiTilde2:
      os << k << "," << r << "," << s;
      break;
    case Family::GlobalPsi2Vol:
      os << r;
      break;
    case Family::GlobalT3:
      os << r << "," << s;
      break;
    case Family::W1:
      break;
  }
  os << ")";
  if (m != 0) os << ";m=" << m;
  if (family == Family::Phi && dim != 3) os << ";dim=" << dim;
  return os.str();
}

FunctionalSpec FunctionalSpec::parse(std::string_view text) {
  text = trim(text);
  std::string_view head = text, tail;
  if (auto semi = text.find(';'); semi != std::string_view::npos) {
    head = trim(text.substr(0, semi));
    tail = text.substr(semi + 1);
  }
  std::string_view name = head;
  std::vector<int> args;
  if (auto open = head.find('('); open != std::string_view::npos) {
    if (head.back() != ')') throw SpecError("functional: missing ')' in '" + std::string(text) + "'");
    name = trim(head.substr(0, open));
    std::string_view inner = head.substr(open + 1, head.size() - open - 2);
    if (!trim(inner).empty()) {
      std::size_t pos = 0;
      while (true) {
        auto comma = inner.find(',', pos);
        args.push_back(parse_int(inner.substr(pos, comma - pos), "index"));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
    }
  }
  FunctionalSpec spec;
  spec.family = family_from_name(name);
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw SpecError("functional: " + std::string(name) + " takes " + std::to_string(n) +
                      " indices, got " + std::to_string(args.size()));
  };
  switch (spec.family) {
    case Family::Phi:
      need(4);
      spec.k = args[0], spec.r = args[1], spec.s = args[2], spec.j = args[3];
      break;
    case Family::PhiTilde3:
      need(3);
      spec.k = 1, spec.r = args[0], spec.s = args[1], spec.j = args[2];
      break;
    case Family::PhiTilde2:
    case Family::GlobalPsi2:
    case Family::GlobalPhiTilde2:
      need(3);
      spec.dim = 2, spec.k = args[0], spec.r = args[1], spec.s = args[2];
      break;
    case Family::GlobalPsi2Vol:
      need(1);
      spec.dim = 2, spec.k = 2, spec.r = args[0];
      break;
    case Family::GlobalT3:
      need(2);
      spec.k = 1, spec.r = args[0], spec.s = args[1];
      break;
    case Family::W1:
      need(0);
      spec.k = 1;
      break;
  }
  while (!tail.empty()) {
    auto semi = tail.find(';');
    std::string_view kv = trim(tail.substr(0, semi));
    tail = semi == std::string_view::npos ? std::string_view() : tail.substr(semi + 1);
    if (kv.empty()) continue;
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw SpecError("functional: expected key=value, got '" + std::string(kv) + "'");
    std::string_view key = trim(kv.substr(0, eq));
    int v = parse_int(kv.substr(eq + 1), key);
    if (key == "m")
      spec.m = v;
    else if (key == "dim")
      spec.dim = v;
    else
      throw SpecError("functional: unknown key '" + std::string(key) + "'");
  }
  spec.validate();
  return spec;
}

double omega(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

namespace {

std::vector<Vec> clip_polygon(std::vector<Vec> poly, const Halfspace& h, double eps) {
  std::vector<Vec> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % n];
    double da = h.signed_distance(a), db = h.signed_distance(b);
    if (da <= eps) out.push_back(a);
    if ((da < -eps && db > eps) || (da > eps && db < -eps)) {
      double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

/// x-moment of the face restricted to the halfspaces, or nothing if empty.
std::optional<SymTensor> clipped_face_moment(const Polytope& P, const Face& F, int r,
                                             const std::vector<Halfspace>& xset) {
  if (xset.empty()) return face_moment(P, F, r);
  const double eps = 1e-12 * std::max(1.0, P.diameter());
  if (F.dim == 0) {
    const Vec& x = P.vertex(F.vertices[0]);
    for (const auto& h : xset)
      if (h.signed_distance(x) > eps) return std::nullopt;
    return vector_power(x, r);
  }
  if (F.dim == 1) {
    const Vec& a = P.vertex(F.vertices[0]);
    const Vec& b = P.vertex(F.vertices[1]);
    double t0 = 0.0, t1 = 1.0;
    for (const auto& h : xset) {
      double da = h.signed_distance(a), db = h.signed_distance(b);
      if (da > eps && db > eps) return std::nullopt;
      if (da > eps) t0 = std::max(t0, da / (da - db));
      if (db > eps) t1 = std::min(t1, da / (da - db));
    }
    if (t1 - t0 <= 1e-15) return std::nullopt;
    if (t0 == 0.0 && t1 == 1.0) return face_moment(P, F, r);
    return segment_moment(a + t0 * (b - a), a + t1 * (b - a), r);
  }
  std::vector<Vec> poly;
  for (int v : F.vertices) poly.push_back(P.vertex(v));
  bool cut = false;
  for (const auto& h : xset) {
    for (const Vec& x : poly)
      if (h.signed_distance(x) > eps) cut = true;
    poly = clip_polygon(std::move(poly), h, eps);
    if (poly.size() < 3) return std::nullopt;
  }
  if (!cut) return face_moment(P, F, r);
  return polygon_moment(poly, r);
}

/// u-moment of the cone restricted to caps, weighted, times the extra factor.
SymTensor cone_moment(const NormalCone& cone, int dim, int s, const ArcExtra& extra,
                      const std::vector<Cap>& caps, const WeightFn& w, const SphQuadOptions& opt) {
  if (const auto* pc = std::get_if<PointCone>(&cone)) {
    SymTensor t(dim, s + extra.rank());
    for (const Cap& c : caps)
      if (!c.contains(pc->u)) return t;
    double wu = w(pc->u);
    if (wu == 0.0) return t;
    t = vector_power(pc->u, s);
    if (extra.rank()) t = sym_product(t, vector_tensor(extra.apply(pc->u)));
    return wu * t;
  }
  if (const auto* arc = std::get_if<Arc>(&cone)) return arc_moment(*arc, s, extra, caps, w);
  if (extra.rank()) throw std::logic_error("extra factor on a two-dimensional cone");
  return spherical_polygon_moment(std::get<SphericalPolygon>(cone), s, caps, w, opt);
}

std::vector<int> edge_signs(std::size_t count, const EvalOptions& opt) {
  std::vector<int> sg(count, 1);
  if (opt.edge_sign == EdgeSign::Flipped) std::fill(sg.begin(), sg.end(), -1);
  if (opt.edge_sign == EdgeSign::Random) {
    std::mt19937_64 rng(opt.sign_seed);
    for (auto& x : sg) x = (rng() & 1) ? -1 : 1;
  }
  return sg;
}

SymTensor times_Q(const SymTensor& t, int m) {
  if (m == 0) return t;
  return sym_product(metric_power(t.dim(), m), t);
}

void require_dim(const Polytope& P, int n, const char* what) {
  if (P.dim() != n)
    throw std::invalid_argument(std::string(what) + ": polytope must be " + std::to_string(n) + "-dimensional");
}

}  // namespace

SymTensor eval_phi(const Polytope& P, int k, int r, int s, int j, int m, const RegionSpec& region,
                   const WeightFn& w, const EvalOptions& opt) {
  const int n = P.dim();
  FunctionalSpec::phi(n, k, r, s, j, m).validate();
  SymTensor out(n, 2 * j + r + s);
  if (!w.identically_zero()) {
    const auto terms = region.expand();
    for (const Face& F : P.faces(k)) {
      SymTensor QLj = metric_power(n, 0);
      if (j > 0) {
        SymTensor QL = metric_QL(F.direction_basis);
        for (int i = 0; i < j; ++i) QLj = sym_product(QLj, QL);
      }
      for (const auto& term : terms) {
        auto xm = clipped_face_moment(P, F, r, term.product.xset);
        if (!xm) continue;
        SymTensor um = cone_moment(F.cone, n, s, ArcExtra::none(), term.product.caps, w, opt.sphere);
        if (um.is_zero()) continue;
        out.axpy(term.sign, sym_product(QLj, sym_product(*xm, um)));
      }
    }
    out *= 1.0 / (factorial(r) * factorial(s) * omega(n - k + s));
  }
  return times_Q(out, m);
}

SymTensor eval_phitilde3(const Polytope& P, int r, int s, int j, int m, const RegionSpec& region,
                         const WeightFn& w, const EvalOptions& opt) {
  require_dim(P, 3, "PhiTilde3");
  FunctionalSpec::phitilde3(r, s, j, m).validate();
  SymTensor out(3, 2 * j + r + s + 2);
  if (!w.identically_zero()) {
    const auto terms = region.expand();
    const auto& edges = P.faces(1);
    const auto sg = edge_signs(edges.size(), opt);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const Face& F = edges[e];
      Vec v = sg[e] * P.edge_vector(static_cast<int>(e));
      for (const auto& term : terms) {
        auto xm = clipped_face_moment(P, F, r, term.product.xset);
        if (!xm) continue;
        SymTensor um = cone_moment(F.cone, 3, s, ArcExtra::cross_with(v), term.product.caps, w, opt.sphere);
        if (um.is_zero()) continue;
        out.axpy(term.sign, sym_product(vector_power(v, 2 * j + 1), sym_product(*xm, um)));
      }
    }
  }
  return times_Q(out, m);
}

SymTensor eval_phitilde2(const Polytope& P, int k, int r, int s, int m, const RegionSpec& region,
                         const WeightFn& w, const EvalOptions& opt) {
  require_dim(P, 2, "PhiTilde2");
  FunctionalSpec::phitilde2(k, r, s, m).validate();
  SymTensor out(2, r + s + 1);
  if (!w.identically_zero()) {
    const auto terms = region.expand();
    for (const Face& F : P.faces(k))
      for (const auto& term : terms) {
        auto xm = clipped_face_moment(P, F, r, term.product.xset);
        if (!xm) continue;
        SymTensor um = cone_moment(F.cone, 2, s, ArcExtra::ubar(), term.product.caps, w, opt.sphere);
        if (um.is_zero()) continue;
        out.axpy(term.sign, sym_product(*xm, um));
      }
  }
  return times_Q(out, m);
}

SymTensor eval_globals_2d(const Polytope& P, const FunctionalSpec& spec) {
  require_dim(P, 2, "planar global functional");
  spec.validate();
  const WeightFn one = WeightFn::constant(1.0);
  switch (spec.family) {
    case Family::GlobalPsi2Vol:
      return times_Q(volume_moment(P, spec.r), spec.m);
    case Family::GlobalPhiTilde2:
      return eval_phitilde2(P, spec.k, spec.r, spec.s, spec.m, RegionSpec::full(), one);
    case Family::GlobalPsi2: {
      SymTensor out(2, spec.r + spec.s);
      for (const Face& F : P.faces(spec.k))
        out += sym_product(face_moment(P, F, spec.r),
                           cone_moment(F.cone, 2, spec.s, ArcExtra::none(), {}, one, {}));
      return times_Q(out, spec.m);
    }
    default:
      throw SpecError(spec.to_string() + ": not a planar global functional");
  }
}

SymTensor eval_global_T3(const Polytope& P, int r, int s, const EvalOptions& opt) {
  return eval_phitilde3(P, r, s, 0, 0, RegionSpec::full(), WeightFn::constant(1.0), opt);
}

double eval_W1(const Polytope& P, const WeightFn& w) {
  require_dim(P, 3, "W1");
  double total = 0.0;
  if (w.identically_zero()) return total;
  for (const Face& F : P.faces(1)) {
    const Arc& arc = std::get<Arc>(F.cone);
    total += F.measure * arc_moment(arc, 0, ArcExtra::none(), std::span<const Cap>(), w).coeffs()[0];
  }
  return total;
}

SymTensor evaluate(const Polytope& P, const FunctionalSpec& spec, const RegionSpec& region,
                   const WeightFn& w, const EvalOptions& opt) {
  spec.validate();
  if (P.dim() != spec.dim)
    throw std::invalid_argument(spec.to_string() + ": polytope dimension " + std::to_string(P.dim()) +
                                " does not match");
  switch (spec.family) {
    case Family::Phi:
      return eval_phi(P, spec.k, spec.r, spec.s, spec.j, spec.m, region, w, opt);
    case Family::PhiTilde3:
      return eval_phitilde3(P, spec.r, spec.s, spec.j, spec.m, region, w, opt);
    case Family::PhiTilde2:
      return eval_phitilde2(P, spec.k, spec.r, spec.s, spec.m, region, w, opt);
    case Family::GlobalPsi2:
    case Family::GlobalPsi2Vol:
    case Family::GlobalPhiTilde2:
      return eval_globals_2d(P, spec);
    case Family::GlobalT3:
      return times_Q(eval_global_T3(P, spec.r, spec.s, opt), spec.m);
    case Family::W1:
      return SymTensor::scalar(3, eval_W1(P, w));
  }
  throw SpecError("unhandled family");
}

}  // namespace loctens
