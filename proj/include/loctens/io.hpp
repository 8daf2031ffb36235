#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "loctens/polytope.hpp"
#include "loctens/spherical.hpp"
#include "loctens/tensor.hpp"
#include "loctens/valuations.hpp"

namespace loctens {

/// Malformed input; line and column are 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// {"dim": n, "rank": p, "coeffs": {"(a1,...,an)": value, ...}}, zeros omitted,
/// keys in storage order.
std::string tensor_to_json(const SymTensor& t);
SymTensor tensor_from_json(const std::string& text);

/// {"dim": n, "vertices": [[x, y, z], ...]}; the hull is recomputed on read.
std::string polytope_to_json(const Polytope& P);
Polytope polytope_from_json(const std::string& text);

/// Vertices and facet cycles; the reader uses the vertices only.
std::string polytope_to_off(const Polytope& P);
Polytope polytope_from_off(const std::string& text);

/// {"full": true} or {"union": [product, ...]} where a product holds any of
/// "box": {"lo": [...], "hi": [...]}, "halfspaces": [{"normal": [...], "offset": c}],
/// "cap": {"c": [...], "tau": t} and "caps": [cap, ...].
std::string region_to_json(const RegionSpec& r);
RegionSpec region_from_json(const std::string& text);

/// {"family": "Phi", "dim": 3, "k": 1, "r": 0, "s": 2, "j": 1, "m": 0}
std::string spec_to_json(const FunctionalSpec& s);
FunctionalSpec spec_from_json(const std::string& text);

/// {"constant": c}, {"taper": {"axis": [...], "tau0": a, "tau1": b}} or
/// {"bump": {"h": h, "margin": m}}.
std::string weight_to_json(const WeightFn& w);
WeightFn weight_from_json(const std::string& text);

/// Short forms: "const1", "const:<c>", "bump", "bump:h=<h>,margin=<m>".
/// Anything starting with '{' is read as JSON.
WeightFn parse_weight(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Polytope from a .off or .json file, chosen by extension or content.
Polytope load_polytope(const std::string& path);

}  // namespace loctens
