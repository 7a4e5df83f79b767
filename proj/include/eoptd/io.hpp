#ifndef EOPTD_IO_HPP
#define EOPTD_IO_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eoptd/certify.hpp"
#include "eoptd/cube.hpp"
#include "eoptd/design.hpp"
#include "eoptd/numeric.hpp"

namespace eoptd {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

namespace detail {

inline Json coordinate_json(const QuadraticSurd& v, int k) {
  if (v.is_rational()) return to_string(v.rational_part());
  const QuadraticSurd unit = QuadraticSurd::sqrt(frac(1, k));
  if (v == unit || v == -unit) {
    Json o;
    o["sign"] = v.sign();
    o["inv_sqrt_k"] = true;
    o["value"] = v.to_double();
    return o;
  }
  throw std::invalid_argument("design_to_json: coordinate " + v.str() + " has no exact encoding");
}

inline Json coordinate_json(const Rational& v, int) { return to_string(v); }

inline QuadraticSurd parse_coordinate(const Json& j, int k, const std::string& where) {
  if (j.is_string()) {
    try {
      return QuadraticSurd(parse_rational(j.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (j.is_object()) {
    if (!j.contains("inv_sqrt_k") || j["inv_sqrt_k"] != true || !j.contains("sign") || !j["sign"].is_number_integer())
      throw ParseError(where + ": expected {\"sign\": +-1, \"inv_sqrt_k\": true}");
    const int s = j["sign"].get<int>();
    if (s != 1 && s != -1) throw ParseError(where + ": sign must be +1 or -1");
    const QuadraticSurd unit = QuadraticSurd::sqrt(frac(1, k));
    return s > 0 ? unit : -unit;
  }
  throw ParseError(where + ": rationals must be \"p/q\" strings");
}

}  // namespace detail

template <Scalar T>
Json design_to_json(const Design<T>& design) {
  Json out;
  out["k"] = design.k();
  out["space"] = std::string(to_string(design.space()));
  Json pts = Json::array();
  for (const auto& x : design.points()) {
    Json p = Json::array();
    for (const T& v : x) p.push_back(detail::coordinate_json(v, design.k()));
    pts.push_back(std::move(p));
  }
  out["points"] = std::move(pts);
  Json ws = Json::array();
  for (const T& w : design.weights()) {
    if constexpr (std::is_same_v<T, QuadraticSurd>)
      ws.push_back(to_string(w.to_rational()));
    else
      ws.push_back(to_string(w));
  }
  out["weights"] = std::move(ws);
  return out;
}

/// Reads the design schema. Coordinates may be exact strings or the
/// +-1/sqrt(k) objects, so the result is surd-valued.
inline Design<QuadraticSurd> design_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("design: top level must be an object");
  for (const char* key : {"k", "space", "points", "weights"})
    if (!j.contains(key)) throw ParseError(std::string("design: missing field '") + key + "'");
  if (!j["k"].is_number_integer() || j["k"].get<long>() < 1 || j["k"].get<long>() > kMaxCubeDimension)
    throw ParseError("design: 'k' must be an integer in [1, " + std::to_string(kMaxCubeDimension) + "]");
  const int k = j["k"].get<int>();
  if (!j["space"].is_string()) throw ParseError("design: 'space' must be a string");
  Space space;
  try {
    space = parse_space(j["space"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("design: ") + e.what());
  }
  if (!j["points"].is_array() || !j["weights"].is_array())
    throw ParseError("design: 'points' and 'weights' must be arrays");
  std::vector<Point<QuadraticSurd>> points;
  for (std::size_t p = 0; p < j["points"].size(); ++p) {
    const Json& row = j["points"][p];
    if (!row.is_array()) throw ParseError("design: point " + std::to_string(p) + " is not an array");
    Point<QuadraticSurd> x;
    for (std::size_t i = 0; i < row.size(); ++i)
      x.push_back(detail::parse_coordinate(row[i], k, "point " + std::to_string(p) + "[" + std::to_string(i) + "]"));
    points.push_back(std::move(x));
  }
  std::vector<QuadraticSurd> weights;
  for (std::size_t p = 0; p < j["weights"].size(); ++p) {
    const Json& w = j["weights"][p];
    if (!w.is_string()) throw ParseError("weight " + std::to_string(p) + ": rationals must be \"p/q\" strings");
    try {
      weights.emplace_back(parse_rational(w.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ParseError("weight " + std::to_string(p) + ": " + e.what());
    }
  }
  try {
    return Design<QuadraticSurd>(k, space, std::move(points), std::move(weights));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

inline Design<QuadraticSurd> read_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  // output of the design command wraps the design with its summary
  if (j.is_object() && !j.contains("points") && j.contains("design")) return design_from_json(j["design"]);
  return design_from_json(j);
}

inline Json report_to_json(const VerificationReport& r) {
  Json o;
  o["lambda_min"] = r.lambda_min;
  o["multiplicity"] = r.multiplicity;
  o["max_d"] = r.max_d;
  o["gap"] = r.gap;
  o["support_equality_max_err"] = r.support_equality_max_err;
  o["pass"] = r.pass;
  if (!r.notes.empty()) o["notes"] = r.notes;
  return o;
}

// ---------------------------------------------------------------------------
// CSV tables.

inline const char* table1_header() { return "k,r1,r2,r3,m1,m2,m3,N,lambda_min"; }
inline const char* table2_header() { return "k,q,l,s,xi_E0,xi_Es,xi_Ek,N,lambda_min"; }
inline const char* diophantine_header() { return "k,s,t,xi_Es,xi_Et,N"; }

/// Table 1 layout: a two-set design without depth 0 fills the last two
/// slots, any other two-set design the first two; "-" marks the gap.
inline std::string table1_row(const TripleSolution& sol) {
  std::vector<std::string> depth(3, "-"), mass(3, "-");
  std::size_t slot = (sol.depths.size() == 2 && sol.depths[0] != 0) ? 1 : 0;
  for (std::size_t i = 0; i < sol.depths.size(); ++i, ++slot) {
    depth[slot] = std::to_string(sol.depths[i]);
    mass[slot] = to_string(sol.masses[i]);
  }
  std::ostringstream os;
  os << sol.k;
  for (const auto& d : depth) os << ',' << d;
  for (const auto& m : mass) os << ',' << m;
  os << ',' << sol.support_count() << ",1/5";
  return os.str();
}

inline std::string table2_row(int k) {
  const TripleSolution sol = conjecture_design(k);
  const int l = k % 3 == 0 ? 0 : (k % 3 == 1 ? 1 : -1);
  const int q = (k - l) / 3;
  const int s = 2 * q + l;
  const Rational mk = sol.depths.size() == 3 ? sol.masses[2] : Rational(0);
  std::ostringstream os;
  os << k << ',' << q << ',' << l << ',' << s << ',' << to_string(sol.masses[0]) << ',' << to_string(sol.masses[1])
     << ',' << to_string(mk) << ',' << sol.support_count() << ",1/5";
  return os.str();
}

inline std::vector<std::string> diophantine_rows(int k) {
  std::vector<std::string> out;
  for (auto [s, t] : diophantine_pairs(k)) {
    auto sol = solve_pair(k, s, t);
    if (!sol) throw std::logic_error("diophantine_rows: pair does not give a feasible design");
    std::ostringstream os;
    os << k << ',' << s << ',' << t << ',' << to_string(sol->masses[0]) << ',' << to_string(sol->masses[1]) << ','
       << sol->support_count();
    out.push_back(os.str());
  }
  return out;
}

}  // namespace eoptd

#endif  // EOPTD_IO_HPP
