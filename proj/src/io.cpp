#include "loctens/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "loctens/approximation.hpp"

namespace loctens {

using Json = nlohmann::ordered_json;

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                                  : what),
      line_(line),
      column_(column) {}

namespace {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
}

template <class Fn>
auto with_context(const std::string& what, Fn fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(what + ": missing \"" + key + "\"");
  return j.at(key);
}

Vec vec_from(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) throw ParseError(what + ": expected an array of 2 or 3 numbers");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

Json vec_to(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string key_of(const MultiIndex& a, int n) {
  std::string k = "(";
  for (int i = 0; i < n; ++i) k += (i ? "," : "") + std::to_string(a[i]);
  return k + ")";
}

MultiIndex index_of(const std::string& key, int n) {
  MultiIndex a{0, 0, 0};
  if (key.size() < 2 || key.front() != '(' || key.back() != ')') throw ParseError("bad multi-index key '" + key + "'");
  std::stringstream ss(key.substr(1, key.size() - 2));
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= n) throw ParseError("multi-index '" + key + "' has more than " + std::to_string(n) + " entries");
    std::size_t pos = 0;
    int v = -1;
    try {
      v = std::stoi(part, &pos);
    } catch (const std::exception&) {
    }
    if (v < 0 || pos != part.size()) throw ParseError("bad multi-index key '" + key + "'");
    a[i++] = v;
  }
  if (i != n) throw ParseError("multi-index '" + key + "' needs " + std::to_string(n) + " entries");
  return a;
}

Json cap_to(const Cap& c) { return Json{{"c", vec_to(c.c)}, {"tau", c.tau}}; }

Cap cap_from(const Json& j) {
  Vec c = vec_from(field(j, "c", "cap"), "cap c");
  if (std::abs(c.norm() - 1.0) > 1e-9) throw ParseError("cap center must be a unit vector");
  return Cap{c.normalized(), field(j, "tau", "cap").get<double>()};
}

}  // namespace

std::string tensor_to_json(const SymTensor& t) {
  Json coeffs = Json::object();
  const auto& idx = multi_indices(t.dim(), t.rank());
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (t.coeffs()[i] != 0.0) coeffs[key_of(idx[i], t.dim())] = t.coeffs()[i];
  Json j{{"dim", t.dim()}, {"rank", t.rank()}, {"coeffs", coeffs}};
  return j.dump(2);
}

SymTensor tensor_from_json(const std::string& text) {
  Json j = parse_json(text);
  return with_context("tensor", [&] {
    int dim = field(j, "dim", "tensor").get<int>();
    int rank = field(j, "rank", "tensor").get<int>();
    if (dim != 2 && dim != 3) throw ParseError("tensor: dim must be 2 or 3");
    if (rank < 0 || rank > kMaxRank) throw ParseError("tensor: rank out of range");
    SymTensor t(dim, rank);
    const Json& c = field(j, "coeffs", "tensor");
    if (!c.is_object()) throw ParseError("tensor: coeffs must be an object");
    for (const auto& [key, value] : c.items()) {
      MultiIndex a = index_of(key, dim);
      if (a[0] + a[1] + a[2] != rank) throw ParseError("tensor: multi-index '" + key + "' has the wrong degree");
      t.coeff(a) = value.get<double>();
    }
    return t;
  });
}

std::string polytope_to_json(const Polytope& P) {
  Json verts = Json::array();
  for (const Vec& v : P.vertices()) verts.push_back(vec_to(v));
  return Json{{"dim", P.dim()}, {"vertices", verts}}.dump(2);
}

Polytope polytope_from_json(const std::string& text) {
  Json j = parse_json(text);
  return with_context("polytope", [&] {
    int dim = field(j, "dim", "polytope").get<int>();
    if (dim != 2 && dim != 3) throw ParseError("polytope: dim must be 2 or 3");
    std::vector<Vec> pts;
    for (const auto& v : field(j, "vertices", "polytope")) {
      Vec p = vec_from(v, "polytope vertex");
      if (p.size() != dim) throw ParseError("polytope: vertex dimension differs from dim");
      pts.push_back(p);
    }
    return Polytope::hull(pts);
  });
}

std::string polytope_to_off(const Polytope& P) {
  if (P.dim() != 3) throw std::invalid_argument("OFF output needs a 3-polytope");
  std::ostringstream os;
  os.precision(17);
  os << "OFF\n" << P.vertices().size() << " " << P.cycles().size() << " 0\n";
  for (const Vec& v : P.vertices()) os << v[0] << " " << v[1] << " " << v[2] << "\n";
  for (const auto& c : P.cycles()) {
    os << c.size();
    for (int i : c) os << " " << i;
    os << "\n";
  }
  return os.str();
}

Polytope polytope_from_off(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> tokens;
  std::vector<int> token_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
      token_line.push_back(lineno);
    }
  }
  std::size_t pos = 0;
  if (pos < tokens.size() && tokens[pos] == "OFF") ++pos;
  auto number = [&](const char* what) {
    if (pos >= tokens.size()) throw ParseError(std::string("OFF: unexpected end of input reading ") + what, lineno, 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tokens[pos], &used);
    } catch (const std::exception&) {
    }
    if (used != tokens[pos].size())
      throw ParseError("OFF: expected a number for " + std::string(what) + ", got '" + tokens[pos] + "'",
                       token_line[pos], 1);
    ++pos;
    return v;
  };
  int nv = static_cast<int>(number("vertex count"));
  number("face count");
  number("edge count");
  if (nv < 4) throw ParseError("OFF: need at least 4 vertices");
  std::vector<Vec> pts;
  for (int i = 0; i < nv; ++i) {
    double x = number("x"), y = number("y"), z = number("z");
    pts.push_back(vec3(x, y, z));
  }
  return Polytope::hull(pts);
}

std::string region_to_json(const RegionSpec& r) {
  if (r.is_full()) return Json{{"full", true}}.dump(2);
  Json prods = Json::array();
  for (const auto& p : r.products()) {
    Json hs = Json::array(), cs = Json::array();
    for (const auto& h : p.xset) hs.push_back(Json{{"normal", vec_to(h.normal)}, {"offset", h.offset}});
    for (const auto& c : p.caps) cs.push_back(cap_to(c));
    prods.push_back(Json{{"halfspaces", hs}, {"caps", cs}});
  }
  return Json{{"union", prods}}.dump(2);
}

RegionSpec region_from_json(const std::string& text) {
  Json j = parse_json(text);
  return with_context("region", [&] {
    if (j.is_object() && j.contains("full")) {
      if (!j.at("full").get<bool>()) throw ParseError("region: \"full\" must be true");
      return RegionSpec::full();
    }
    std::vector<RegionProduct> prods;
    for (const auto& p : field(j, "union", "region")) {
      RegionProduct prod;
      if (p.contains("box")) {
        const Json& b = p.at("box");
        prod = RegionProduct::box(vec_from(field(b, "lo", "box"), "box lo"), vec_from(field(b, "hi", "box"), "box hi"));
      }
      if (p.contains("halfspaces"))
        for (const auto& h : p.at("halfspaces")) {
          Vec n = vec_from(field(h, "normal", "halfspace"), "halfspace normal");
          prod.xset.push_back(Halfspace{n, field(h, "offset", "halfspace").get<double>()});
        }
      if (p.contains("cap")) prod.caps.push_back(cap_from(p.at("cap")));
      if (p.contains("caps"))
        for (const auto& c : p.at("caps")) prod.caps.push_back(cap_from(c));
      prods.push_back(std::move(prod));
    }
    try {
      return RegionSpec::union_of(std::move(prods));
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("region: ") + e.what());
    }
  });
}

std::string spec_to_json(const FunctionalSpec& s) {
  return Json{{"family", std::string(family_name(s.family))}, {"dim", s.dim}, {"k", s.k}, {"r", s.r},
              {"s", s.s},                                     {"j", s.j},     {"m", s.m}}
      .dump(2);
}

FunctionalSpec spec_from_json(const std::string& text) {
  Json j = parse_json(text);
  FunctionalSpec s = with_context("functional", [&] {
    FunctionalSpec out;
    try {
      out.family = family_from_name(field(j, "family", "functional").get<std::string>());
    } catch (const SpecError& e) {
      throw ParseError(e.what());
    }
    out.dim = j.value("dim", out.family == Family::PhiTilde2 || out.family == Family::GlobalPsi2 ||
                                     out.family == Family::GlobalPsi2Vol || out.family == Family::GlobalPhiTilde2
                                 ? 2
                                 : 3);
    out.k = j.value("k", out.family == Family::PhiTilde3 || out.family == Family::GlobalT3 ? 1 : 0);
    out.r = j.value("r", 0);
    out.s = j.value("s", 0);
    out.j = j.value("j", 0);
    out.m = j.value("m", 0);
    return out;
  });
  s.validate();
  return s;
}

std::string weight_to_json(const WeightFn& w) {
  if (w.is_constant()) return Json{{"constant", w.constant_value()}}.dump(2);
  return Json{{"taper", {{"axis", vec_to(w.axis())}, {"tau0", w.tau0()}, {"tau1", w.tau1()}}}}.dump(2);
}

WeightFn weight_from_json(const std::string& text) {
  Json j = parse_json(text);
  return with_context("weight", [&] {
    try {
      if (j.contains("constant")) return WeightFn::constant(j.at("constant").get<double>());
      if (j.contains("taper")) {
        const Json& t = j.at("taper");
        return WeightFn::taper(vec_from(field(t, "axis", "taper"), "taper axis"), field(t, "tau0", "taper").get<double>(),
                               field(t, "tau1", "taper").get<double>());
      }
      if (j.contains("bump")) {
        const Json& b = j.at("bump");
        return bump_weight(b.value("h", 0.5), b.value("margin", 0.02));
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("weight: ") + e.what());
    }
    throw ParseError("weight: expected \"constant\", \"taper\" or \"bump\"");
  });
}

WeightFn parse_weight(const std::string& text) {
  if (!text.empty() && text.front() == '{') return weight_from_json(text);
  if (text == "const1") return WeightFn::constant(1.0);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
    }
    if (s.empty() || used != s.size()) throw ParseError("weight: bad number '" + s + "' in '" + text + "'");
    return v;
  };
  if (text.rfind("const:", 0) == 0) return WeightFn::constant(number(text.substr(6)));
  if (text == "bump" || text.rfind("bump:", 0) == 0) {
    double h = 0.5, margin = 0.02;
    if (text.size() > 5) {
      std::stringstream ss(text.substr(5));
      std::string kv;
      while (std::getline(ss, kv, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError("weight: expected key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        double v = number(kv.substr(eq + 1));
        if (key == "h")
          h = v;
        else if (key == "margin")
          margin = v;
        else
          throw ParseError("weight: unknown bump parameter '" + key + "'");
      }
    }
    try {
      return bump_weight(h, margin);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("weight: ") + e.what());
    }
  }
  throw ParseError("weight: expected const1, const:<c>, bump[:h=..,margin=..] or JSON, got '" + text + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
}

Polytope load_polytope(const std::string& path) {
  std::string text = read_file(path);
  bool off = path.size() >= 4 && path.compare(path.size() - 4, 4, ".off") == 0;
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (!off && first != std::string::npos && text[first] != '{') off = true;
  return off ? polytope_from_off(text) : polytope_from_json(text);
}

}  // namespace loctens
