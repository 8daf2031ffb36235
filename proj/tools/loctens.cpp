// loctens: compute local tensor valuations, run convergence experiments and
// the verification suites.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "loctens/approximation.hpp"
#include "loctens/io.hpp"
#include "loctens/verification.hpp"
#include "loctens/version.hpp"

using namespace loctens;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

const char* kFunctionalHelp =
    "Functional, inline or a JSON file. Inline forms, with optional ';m=<m>' and ';dim=<n>' suffixes:\n"
    "  Phi(k,r,s,j)          1/(r! s! omega_{n-k+s}) sum over k-faces F of Q(L(F))^j times the\n"
    "                        integral of x^r u^s over F x normal cone, n = dim (default 3)\n"
    "  PhiTilde3(r,s,j)      sum over edges of v^(2j+1) x^r u^s (v x u), R^3, no prefactor\n"
    "  PhiTilde2(k,r,s)      sum over k-faces of x^r u^s ubar, R^2, no prefactor\n"
    "  GlobalPsi2(k,r,s)     global polygon tensor sum over k-faces of x^r u^s\n"
    "  GlobalPsi2Vol(r)      integral of x^r over the polygon\n"
    "  GlobalPhiTilde2(k,r,s) PhiTilde2 on the full region\n"
    "  GlobalT3(r,s)         PhiTilde3(r,s,0) on the full region\n"
    "  W1                    total weighted edge-length times normal-arc measure\n"
    "Fields: k face dimension, r position degree, s normal degree, j power of the\n"
    "face metric Q(L(F)), m power of the metric Q multiplied in front.\n"
    "JSON: {\"family\": \"Phi\", \"dim\": 3, \"k\": 1, \"r\": 0, \"s\": 2, \"j\": 1, \"m\": 0}";

struct Common {
  bool serial = false;
  std::string out;
};

void header(const std::string& command, const std::string& extra) {
  std::cerr << "# loctens " << kVersion << " command=" << command << " " << extra << "\n";
}

std::string read_arg(const std::string& value) {
  std::size_t first = value.find_first_not_of(" \t");
  if (first != std::string::npos && (value[first] == '{' || value[first] == '[')) return value;
  return read_file(value);
}

FunctionalSpec load_spec(const std::string& value) {
  if (value.find('(') != std::string::npos || value == "W1") return FunctionalSpec::parse(value);
  return spec_from_json(read_arg(value));
}

RegionSpec load_region(const std::string& value) {
  if (value == "full") return RegionSpec::full();
  return region_from_json(read_arg(value));
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  else
    write_file(c.out, text);
}

std::vector<Vec> parse_frame(const std::string& text, int rank, int default_trailing, double& angle,
                             int& trailing) {
  trailing = default_trailing;
  std::stringstream ss(text);
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("frame: expected key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    try {
      if (key == "a")
        angle = std::stod(val);
      else if (key == "i")
        trailing = std::stoi(val);
      else
        throw ParseError("frame: unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw ParseError("frame: bad value '" + val + "'");
    }
  }
  if (trailing > rank) throw ParseError("frame: i exceeds the tensor rank");
  return frame(rank, vec3(std::cos(angle), std::sin(angle), 0.0), trailing < 0 ? 0 : trailing);
}

int cmd_compute(const std::string& input, const std::string& functional, const std::string& region,
                const std::string& weight, const Common& c) {
  std::ostringstream os;
  os << "input=" << input << " functional=" << functional << " region=" << region << " weight=" << weight
     << " quad_rel_tol=" << SphQuadOptions{}.rel_tol;
  header("compute", os.str());
  Polytope P = load_polytope(input);
  FunctionalSpec spec = load_spec(functional);
  SymTensor t = evaluate(P, spec, load_region(region), parse_weight(weight));
  std::string json = tensor_to_json(t);
  if (tensor_from_json(json) != t) {
    std::cerr << "error: tensor JSON does not round-trip\n";
    return kFailed;
  }
  std::cerr << spec.to_string() << ": rank " << t.rank() << " tensor on R^" << t.dim() << ", max |coeff| "
            << t.max_norm() << "\n";
  emit(c, json);
  return kOk;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed, int cases, const std::string& format,
               const Common& c) {
  SuiteConfig cfg;
  cfg.seed = seed;
  cfg.cases = cases;
  cfg.serial = c.serial;
  for (const auto& s : suites)
    if (s != "all") cfg.suites.push_back(s);
  for (const auto& s : cfg.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ParseError("unknown suite '" + s + "'");
  std::ostringstream os;
  os << "seed=" << seed << " cases=" << cases << " rtol=" << cfg.rtol << " serial=" << c.serial;
  header("verify", os.str());
  VerificationReport rep = run_suites(cfg);
  emit(c, format == "json" ? rep.to_json() : rep.summary());
  return rep.passed() ? kOk : kFailed;
}

struct ConvergeArgs {
  int N = 2;
  double h = 0.5;
  std::vector<double> ts{0.2, 0.1, 0.05, 0.025};
  std::string functional = "PhiTilde3(0,0,0)";
  std::string frame = "a=0.3";
  double rotation = 0.7;
  std::string weight = "bump";
  std::string emit = "csv";
  std::string expect = "none";
};

ConvergenceTable run_table(const FunctionalSpec& spec, const ConvergeArgs& a, const Common& c) {
  ConvergenceOptions o;
  o.N = a.N;
  o.h = a.h;
  o.ts = a.ts;
  o.rotation_angle = a.rotation;
  o.serial = c.serial;
  double angle = o.a_angle;
  int trailing = -1;
  parse_frame(a.frame, spec.rank(), -1, angle, trailing);
  o.a_angle = angle;
  o.trailing = trailing;
  WeightFn f = a.weight == "bump" ? bump_weight(a.h, o.bump_margin) : parse_weight(a.weight);
  return convergence_experiment(spec, o, f);
}

int cmd_converge(const ConvergeArgs& a, const Common& c) {
  std::ostringstream os;
  os << "N=" << a.N << " h=" << a.h << " functional=" << a.functional << " frame=" << a.frame
     << " rotation=" << a.rotation << " weight=" << a.weight << " serial=" << c.serial;
  header("converge", os.str());
  FunctionalSpec spec = load_spec(a.functional);
  ConvergenceTable tab = run_table(spec, a, c);
  emit(c, a.emit == "json" ? tab.to_json() : tab.to_csv());
  bool ok = true;
  const double first = std::abs(tab.rows.front().D), last = std::abs(tab.rows.back().D);
  const double floor = 1e-12 * tab.rows.back().W1;
  if (a.expect == "decay") ok = last <= 0.25 * first || tab.max_abs_D() <= floor;
  if (a.expect == "nondecay") ok = tab.max_abs_D() > floor && tab.min_abs_D() >= 0.25 * tab.max_abs_D();
  if (a.expect == "converge") {
    double vmax = 0.0;
    for (const auto& r : tab.rows) vmax = std::max(vmax, r.tensor.max_norm());
    for (std::size_t i = 2; i < tab.rows.size(); ++i) ok = ok && tab.rows[i].ratio < 1.0;
    if (!ok && vmax <= floor) {
      ok = true;
      std::cerr << "values are zero to rounding (max " << vmax << "); ";
    }
  }
  std::cerr << "richardson " << tab.richardson() << " order " << tab.estimated_order() << " |D| " << first << " -> "
            << last;
  if (a.expect != "none") std::cerr << " expect " << a.expect << ": " << (ok ? "ok" : "FAILED");
  std::cerr << "\n";
  return ok ? kOk : kFailed;
}

int cmd_demo(const ConvergeArgs& a, const Common& c) {
  std::ostringstream os;
  os << "N=" << a.N << " h=" << a.h << " rotation=" << a.rotation << " serial=" << c.serial;
  header("demo-noncovariance", os.str());
  ConvergeArgs b = a;
  b.frame = "a=0.3";
  ConvergenceTable bad = run_table(FunctionalSpec::phitilde3(0, 0, 1), b, c);
  ConvergeArgs g = b;
  g.frame = "a=0.3,i=0";
  ConvergenceTable good = run_table(FunctionalSpec::phitilde3(0, 2, 0), g, c);
  std::ostringstream out;
  out.precision(6);
  out << "Rotation discrepancy D(t) = value(rotated frame) - value(frame), rotation " << a.rotation
      << " about e3\n\n";
  out << "t          D[PhiTilde3(0,0,1)]  D[PhiTilde3(0,2,0)]  W1/N\n";
  for (std::size_t i = 0; i < bad.rows.size(); ++i)
    out << std::left << std::setw(11) << bad.rows[i].t << std::setw(21) << bad.rows[i].D << std::setw(21)
        << good.rows[i].D << bad.rows[i].W1 / a.N << "\n";
  const double mn = bad.min_abs_D(), mx = bad.max_abs_D();
  const bool persists = mx > 0.0 && mn >= 0.25 * mx;
  const bool floor = bad.min_W1_over_N() > 0.0;
  const double g0 = std::abs(good.rows.front().D), g1 = std::abs(good.rows.back().D);
  const bool decays = g1 <= 0.25 * g0;
  std::array<double, 3> coeffs{0.0, 0.0, 1.0};
  out << "\nj = 1 discrepancy: min |D| " << mn << ", max |D| " << mx << (persists ? " (persists)" : " (fades)")
      << "\nj = 0 discrepancy: " << g0 << " -> " << g1 << (decays ? " (decays)" : " (does not decay)")
      << "\nmin W1/N along the ladder: " << bad.min_W1_over_N()
      << "\nF1 with c2 = 1 at lambda = 0, 0.5, 1: " << predict_F(1, 0.0, coeffs, a.N) << " "
      << predict_F(1, 0.5, coeffs, a.N) << " " << predict_F(1, 1.0, coeffs, a.N) << "\n";
  emit(c, out.str());
  return persists && floor && decays ? kOk : kFailed;
}

int cmd_assumptions(int N, double h, double t, double eps, bool search, bool require, const Common& c) {
  std::ostringstream os;
  os << "N=" << N << " h=" << h << " t=" << t << " eps=" << eps << " search=" << search;
  header("assumptions", os.str());
  AssumptionReport rep;
  int steps = 0;
  if (search) {
    AssumptionSearch s = search_parameters(N, eps, h, t);
    h = s.h;
    t = s.t;
    steps = s.steps;
    rep = s.report;
  } else {
    ApproxParams p{N, h, t};
    p.validate();
    rep = check_assumptions(build_PNht(p), p, bump_weight(h), eps);
  }
  std::ostringstream out;
  out << "N " << N << " h " << h << " t " << t << " eps " << eps;
  if (search) out << " (after " << steps << " search steps)";
  out << "\nA " << (rep.A ? "pass" : "fail") << "  normal height margin " << rep.margin_normal_height
      << ", horizontal margin " << rep.margin_horizontal << "\nB " << (rep.B ? "pass" : "fail") << "  "
      << rep.f_edge_count << " f-edges, " << rep.unclassified << " unclassified\nC " << (rep.C ? "pass" : "fail")
      << "  direction margin " << rep.margin_direction << ", cross margin " << rep.margin_cross << "\n";
  emit(c, out.str());
  return require && !rep.all() ? kFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local tensor valuations on convex polytopes"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common common;
  app.add_flag("--serial", common.serial, "Single-threaded, fixed reduction order");
  app.add_option("-o,--out", common.out, "Write the result here instead of stdout");

  auto* compute = app.add_subcommand("compute", "Evaluate a functional on a polytope and emit tensor JSON");
  std::string input, functional, region = "full", weight = "const1";
  compute->add_option("--input", input, "Polytope: JSON {\"dim\", \"vertices\"} or OFF")->required();
  compute->add_option("--functional", functional, kFunctionalHelp)->required();
  compute->add_option("--region", region, "full, or region JSON (inline or file)");
  compute->add_option("--weight", weight, "const1, const:<c>, bump[:h=<h>,margin=<m>] or weight JSON");
  compute->add_option("--out", common.out, "Tensor JSON output file");

  auto* verify = app.add_subcommand("verify", "Run the seeded verification suites");
  std::vector<std::string> suites{"all"};
  std::uint64_t seed = SuiteConfig{}.seed;
  int cases = SuiteConfig{}.cases;
  std::string vformat = "text";
  verify->add_option("--suite", suites, "all, or any of: covariance valuation translation homogeneity locality "
                                        "sign prop8 thm9 convergence");
  verify->add_option("--seed", seed, "Base seed");
  verify->add_option("--cases", cases, "Random cases per suite")->check(CLI::PositiveNumber);
  verify->add_option("--emit", vformat, "text or json")->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--out", common.out, "Report file");

  ConvergeArgs conv;
  auto add_ladder = [&](CLI::App* sub) {
    sub->add_option("--N", conv.N, "Tessellation: 2, or odd N >= 3");
    sub->add_option("--h", conv.h, "Cut height of the paraboloid cap");
    sub->add_option("--t", conv.ts, "Comma-separated t ladder")->delimiter(',');
    sub->add_option("--rotation", conv.rotation, "Rotation angle about e3 for D(t)");
    sub->add_option("--out", common.out, "Output file");
  };
  auto* converge = app.add_subcommand("converge", "Evaluate along the t ladder of approximating polytopes");
  add_ladder(converge);
  converge->add_option("--functional", conv.functional, "Phi(1,0,s,j) or PhiTilde3(0,s,j), see compute --help");
  converge->add_option("--frame", conv.frame, "a=<angle>[,i=<trailing -e3 count, default s>]");
  converge->add_option("--weight", conv.weight, "bump (at --h), or as for compute");
  converge->add_option("--emit", conv.emit, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  converge->add_option("--expect", conv.expect, "none, converge, decay or nondecay; exit 1 when not met")
      ->check(CLI::IsMember({"none", "converge", "decay", "nondecay"}));

  auto* demo = app.add_subcommand("demo-noncovariance",
                                  "Rotation discrepancy of PhiTilde3 with j = 1 against an extendable functional");
  add_ladder(demo);

  auto* assume = app.add_subcommand("assumptions", "Check the approximation assumptions for given parameters");
  int aN = 2;
  double ah = 0.5, at = 0.1, aeps = 0.1;
  bool asearch = false, arequire = false;
  assume->add_option("--N", aN, "Tessellation");
  assume->add_option("--h", ah, "Cut height (start value with --search)");
  assume->add_option("--t", at, "Lattice scale (start value with --search)");
  assume->add_option("--eps", aeps, "Tolerance epsilon");
  assume->add_flag("--search", asearch, "Shrink h, then t, until all conditions hold");
  assume->add_flag("--require", arequire, "Exit 1 unless all conditions hold");
  assume->add_option("--out", common.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compute) return cmd_compute(input, functional, region, weight, common);
    if (*verify) return cmd_verify(suites, seed, cases, vformat, common);
    if (*converge) return cmd_converge(conv, common);
    if (*demo) return cmd_demo(conv, common);
    if (*assume) return cmd_assumptions(aN, ah, at, aeps, asearch, arequire, common);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SpecError& e) {
    std::cerr << "error: invalid functional: " << e.what() << "\n";
    return kUsage;
  } catch (const DegenerateError& e) {
    std::cerr << "error: degenerate input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
