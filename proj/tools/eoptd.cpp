// Command-line front end: design construction, verification, tables and
// the rotatable comparison.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eoptd/eoptd.hpp"

namespace {

using namespace eoptd;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

// Above this many points a cube design is described by its classes only.
constexpr std::uint64_t kMaxExpandedPoints = 2'000'000;

struct Common {
  std::string format = "text";
  std::string out;
  bool show_float = false;
};

int kmax_from_env() {
  if (const char* env = std::getenv("EOPTD_KMAX")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1 && v <= kMaxCubeDimension) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("EOPTD_KMAX must be an integer in [1, " + std::to_string(kMaxCubeDimension) + "]");
  }
  return 24;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw std::runtime_error("cannot write '" + c.out + "'");
  f << text;
}

std::string with_float(const Common& c, const std::string& exact, double v) {
  if (!c.show_float) return exact;
  return exact + " (" + to_string(v) + ")";
}

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int v = std::stoi(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad integer list '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  if (auto dots = s.find(".."); dots != std::string::npos)
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  const int v = std::stoi(s);
  return {v, v};
}

// ---------------------------------------------------------------------------

int cmd_design_cube(int k, const std::string& triple, const Common& c) {
  check_cube_dimension(k, "design");
  std::optional<TripleSolution> sol;
  if (triple.empty()) {
    sol = minimal_support_design(k);
  } else {
    const auto depths = parse_int_list(triple);
    try {
      if (depths.size() == 3 && k >= 2)
        sol = solve_triple(k, depths[0], depths[1], depths[2]);
      else if (depths.size() == 2)
        sol = solve_pair(k, depths[0], depths[1]);
      else
        throw std::invalid_argument("expected two or three depths");
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: triple " << triple << ": " << e.what() << "\n";
      sol.reset();
    }
    if (!sol) {
      std::cerr << "error: no E-optimal design with nonnegative masses on depths (" << triple << ") for k = " << k
                << "\nfeasible supports:\n";
      for (const auto& f : enumerate_feasible_triples(k)) {
        std::vector<std::string> d, m;
        for (std::size_t i = 0; i < f.depths.size(); ++i) {
          d.push_back(std::to_string(f.depths[i]));
          m.push_back(to_string(f.masses[i]));
        }
        std::cerr << "  (" << join(d, ",") << ") masses " << join(m) << " N=" << f.support_count() << "\n";
      }
      return kExitError;
    }
  }
  const auto mom = triple_moments(*sol);
  const auto lmin = lambda_min_symmetric(mom, k);
  bool ok = mom == optimal_cube_moments() || (k == 1 && mom.a == frac(2, 5));
  ok = ok && lmin.value == QuadraticSurd(frac(1, 5));

  std::optional<Design<Rational>> design;
  if (sol->support_count() <= kMaxExpandedPoints) {
    design = expand_design(*sol);
    if (sol->support_count() <= 20000) {
      const ModelSpec spec(k);
      const auto M = information_matrix(spec, *design);
      ok = ok && M.entries == symmetric_info_matrix(spec, moments_of(spec, *design)).entries;
    }
  } else if (c.format == "json") {
    throw std::invalid_argument("design has " + std::to_string(sol->support_count()) +
                                " points; too many to write as JSON");
  }

  std::vector<std::string> depths, masses;
  for (std::size_t i = 0; i < sol->depths.size(); ++i) {
    depths.push_back(std::to_string(sol->depths[i]));
    masses.push_back(with_float(c, to_string(sol->masses[i]), sol->masses[i].convert_to<double>()));
  }
  if (c.format == "json") {
    Json o;
    o["space"] = "cube";
    o["k"] = k;
    o["depths"] = sol->depths;
    Json jm = Json::array();
    for (const auto& m : sol->masses) jm.push_back(to_string(m));
    o["masses"] = jm;
    o["N"] = sol->support_count();
    o["lambda_min"] = lmin.value.str();
    o["multiplicity"] = lmin.multiplicity;
    o["design"] = design_to_json(*design);
    emit(c, o.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "space: cube\nk: " << k << "\ndepths: " << join(depths, ",") << "\nmasses: " << join(masses)
       << "\nN: " << sol->support_count() << "\nlambda_min: " << with_float(c, lmin.value.str(), lmin.value.to_double())
       << "\nmultiplicity: " << lmin.multiplicity << "\n";
    emit(c, os.str());
  }
  return ok ? 0 : kExitFail;
}

int cmd_design_ball(int k, const Common& c) {
  if (k < 1 || k > 20) throw std::invalid_argument("design ball: k must lie in [1, 20]");
  const BallSupportSets sets(k);
  const auto design = optimal_ball_design(k);
  const ModelSpec spec(k);
  const auto mom = to_rational_moments(moments_of(spec, design));
  const auto lmin = lambda_min_symmetric(mom, k);
  const bool ok = mom == optimal_ball_moments(k) && lmin.value == QuadraticSurd(Rational(1) / ball_denominator(k));
  const std::vector<Rational> m = {sets.mass_vertices, sets.mass_axes, sets.mass_center};
  if (c.format == "json") {
    Json o;
    o["space"] = "ball";
    o["k"] = k;
    Json jm = Json::array();
    for (const auto& v : m) jm.push_back(to_string(v));
    o["masses"] = jm;
    o["moments"] = {to_string(mom.a), to_string(mom.b), to_string(mom.c)};
    o["lambda_min"] = lmin.value.str();
    o["multiplicity"] = lmin.multiplicity;
    o["design"] = design_to_json(design);
    emit(c, o.dump(2) + "\n");
  } else {
    std::vector<std::string> ms;
    for (const auto& v : m) ms.push_back(with_float(c, to_string(v), v.convert_to<double>()));
    std::ostringstream os;
    os << "space: ball\nk: " << k << "\nsets: vertices(" << sets.vertex_count() << "), axes(" << sets.axis_count()
       << "), center(1)\nmasses: " << join(ms) << "\nmoments: a=" << to_string(mom.a) << " b=" << to_string(mom.b)
       << " c=" << to_string(mom.c) << "\nN: " << design.size()
       << "\nlambda_min: " << with_float(c, lmin.value.str(), lmin.value.to_double())
       << "\nmultiplicity: " << lmin.multiplicity << "\n";
    emit(c, os.str());
  }
  return ok ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

int cmd_verify(const std::string& path, int grid, double tol, std::uint64_t seed, const Common& c) {
  const auto design = read_design_file(path);
  const ModelSpec spec(design.k());
  const auto cert = certificate_for(design.space(), design.k());
  VerificationReport rep = verify_design(spec, design, cert, grid, tol);

  // Random probes on top of the grid.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g;
  const ExtremalEvaluator eval(cert);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(design.k());
    if (design.space() == Space::cube) {
      for (double& v : x) v = u(rng);
    } else {
      // uniform in the ball: gaussian direction, radius U^(1/k)
      double norm = 0;
      for (double& v : x) {
        v = g(rng);
        norm += v * v;
      }
      const double radius = std::pow(0.5 * (u(rng) + 1.0), 1.0 / design.k()) / std::sqrt(norm);
      for (double& v : x) v *= radius;
      if (!in_design_space<double>(design.space(), x, 0.0)) continue;
    }
    const double d = eval(x);
    if (d > rep.max_d) {
      rep.max_d = d;
      rep.argmax = x;
    }
  }
  rep.gap = rep.max_d - rep.lambda_min_value;
  if (rep.gap > tol && rep.pass) {
    rep.pass = false;
    rep.notes.push_back("random probe exceeds lambda_min by " + to_string(rep.gap));
  }
  for (const auto& w : design.warnings()) rep.notes.push_back(w);

  if (c.format == "json") {
    emit(c, report_to_json(rep).dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "space: " << to_string(design.space()) << "\nk: " << design.k() << "\nsupport points: " << design.size()
       << "\nlambda_min: " << with_float(c, rep.lambda_min, rep.lambda_min_value) << "\nmultiplicity: " << rep.multiplicity
       << "\nmax_d: " << to_string(rep.max_d) << "\ngap: " << to_string(rep.gap)
       << "\nsupport_equality_max_err: " << to_string(rep.support_equality_max_err)
       << "\nmethod: " << (rep.grid_used ? "grid + refinement" : "exact reduction") << "\n";
    for (const auto& n : rep.notes) os << "note: " << n << "\n";
    os << (rep.pass ? "PASS" : "FAIL") << "\n";
    emit(c, os.str());
  }
  return rep.pass ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

int cmd_table(const std::string& which, const std::string& range, const Common& c) {
  const int kmax = kmax_from_env();
  auto [lo, hi] = range.empty() ? std::pair<int, int>{1, kmax} : parse_range(range);
  if (lo < 1 || hi > kmax || lo > hi)
    throw std::invalid_argument("k range " + std::to_string(lo) + ".." + std::to_string(hi) + " outside [1, " +
                                std::to_string(kmax) + "]");
  std::ostringstream os;
  if (which == "table1") {
    os << table1_header() << "\n";
    for (int k = lo; k <= hi; ++k) os << table1_row(minimal_support_design(k)) << "\n";
  } else if (which == "table2") {
    os << table2_header() << "\n";
    for (int k = lo; k <= hi; ++k)
      if (k != 3) os << table2_row(k) << "\n";
  } else if (which == "diophantine") {
    os << diophantine_header() << "\n";
    for (int k = lo; k <= hi; ++k)
      for (const auto& row : diophantine_rows(k)) os << row << "\n";
  } else {
    throw std::invalid_argument("unknown table '" + which + "' (expected table1, table2 or diophantine)");
  }
  emit(c, os.str());
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_compare_rotatable(int k, const std::string& r_text, const std::string& r2_text, const Common& c) {
  if (k < 2) throw std::invalid_argument("compare-rotatable: k must be >= 2");
  Rational r2 = 1;
  if (!r2_text.empty()) {
    r2 = parse_rational(r2_text);
  } else if (!r_text.empty()) {
    const Rational r = parse_rational(r_text);
    r2 = r * r;
  }
  if (r2 <= 0) throw std::invalid_argument("compare-rotatable: radius must be positive");
  const auto rot = rotatable_optimal(k, r2);
  const Rational lambda_opt = Rational(1) / ball_denominator(k);
  const QuadraticSurd ratio = rot.lambda_min / QuadraticSurd(lambda_opt);
  const auto opt_mom = optimal_ball_moments(k);
  const bool opt_rotatable = is_rotatable(opt_mom);
  const bool rot_rotatable = is_rotatable(rot.moments);

  bool ok = rot_rotatable && !opt_rotatable;
  const bool branches_meet = rotatable_alpha_inner(k, Rational(k + 2)) == rotatable_alpha_outer(k, Rational(k + 2));
  ok = ok && branches_meet;
  if (r2 == 1) {
    const auto gap = rotatable_gap(k);
    ok = ok && rot.lambda_min == QuadraticSurd(gap.lambda_rot) && gap.lambda_rot < gap.lambda_opt;
  }
  // r = 1 is inside the unit ball; larger spheres are not comparable.
  const bool comparable = r2 <= 1;

  const std::string opt_verdict =
      opt_rotatable ? "rotatable: c = 3b = " + to_string(opt_mom.c)
                    : "not rotatable: c = " + to_string(opt_mom.c) + " != 3b = " + to_string(Rational(3) * opt_mom.b);
  const std::string rot_verdict = rot_rotatable ? "rotatable: c = 3b = " + to_string(rot.moments.c)
                                                : "not rotatable: c = " + to_string(rot.moments.c);
  if (c.format == "json") {
    Json o;
    o["k"] = k;
    o["r2"] = to_string(r2);
    o["alpha"] = to_string(rot.alpha);
    o["lambda_rot"] = rot.lambda_min.str();
    o["lambda_opt"] = to_string(lambda_opt);
    o["ratio"] = ratio.str();
    o["rotatable_design"] = rot_verdict;
    o["optimal_design"] = opt_verdict;
    o["branches_agree_at_k_plus_2"] = branches_meet;
    emit(c, o.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "k: " << k << "\nr^2: " << to_string(r2) << "\nalpha: " << with_float(c, to_string(rot.alpha), rot.alpha.convert_to<double>())
       << "\nlambda_rot: " << with_float(c, rot.lambda_min.str(), rot.lambda_min.to_double())
       << "\nlambda_opt: " << with_float(c, to_string(lambda_opt), lambda_opt.convert_to<double>())
       << "\nratio: " << with_float(c, ratio.str(), ratio.to_double());
    if (comparable) os << (rot.lambda_min < QuadraticSurd(lambda_opt) ? " (< 1)" : " (>= 1)");
    os << "\nrotatable design: " << rot_verdict << "\noptimal ball design: " << opt_verdict
       << "\nalpha branches agree at r^2 = k+2: " << (branches_meet ? "yes" : "no") << "\n";
    emit(c, os.str());
  }
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"E-optimal designs for second-order response surface models"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--out", common.out, "Write output to this file");
    sub->add_flag("--float", common.show_float, "Also print floating-point renderings");
  };

  int k = 0;
  std::string space_pos, space_opt, triple;
  auto* design = app.add_subcommand("design", "Construct an E-optimal design");
  design->add_option("SPACE", space_pos, "cube or ball");
  design->add_option("--space", space_opt, "cube or ball");
  design->add_option("--k", k, "Number of predictors")->required()->check(CLI::PositiveNumber);
  design->add_option("--triple", triple, "Barycenter depths r1,r2,r3 (cube only)");
  add_common(design);

  std::string file;
  int grid = 0;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "Check a design file against the equivalence theorem");
  verify->add_option("file", file, "Design JSON")->required();
  verify->add_option("--grid", grid, "Grid points per axis (default 101 for k <= 3, 21 up to k = 6)")
      ->check(CLI::Range(3, 100000));
  verify->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Seed for the random probe points");
  add_common(verify);

  std::string which, range;
  auto* table = app.add_subcommand("table", "Print table1, table2 or diophantine as CSV");
  table->add_option("which", which, "table1, table2 or diophantine")->required();
  table->add_option("--k", range, "k or range A..B");
  add_common(table);

  int rk = 2;
  std::string r_text, r2_text;
  auto* rot = app.add_subcommand("compare-rotatable", "Compare the best rotatable design with the optimum");
  rot->add_option("--k", rk, "Number of predictors")->check(CLI::Range(2, 40));
  auto* r_opt = rot->add_option("--r", r_text, "Sphere radius (exact decimal or p/q)");
  rot->add_option("--r2", r2_text, "Squared sphere radius")->excludes(r_opt);
  add_common(rot);

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) {
      if (!space_pos.empty() && !space_opt.empty() && space_pos != space_opt)
        throw std::invalid_argument("conflicting spaces '" + space_pos + "' and '" + space_opt + "'");
      const std::string s = !space_opt.empty() ? space_opt : (!space_pos.empty() ? space_pos : "cube");
      const Space space = parse_space(s);
      if (space == Space::ball && !triple.empty()) throw std::invalid_argument("--triple applies to the cube only");
      return space == Space::cube ? cmd_design_cube(k, triple, common) : cmd_design_ball(k, common);
    }
    if (verify->parsed()) return cmd_verify(file, grid, tol, seed, common);
    if (table->parsed()) return cmd_table(which, range, common);
    if (rot->parsed()) return cmd_compare_rotatable(rk, r_text, r2_text, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
