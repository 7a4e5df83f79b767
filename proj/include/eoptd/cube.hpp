#ifndef EOPTD_CUBE_HPP
#define EOPTD_CUBE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "eoptd/design.hpp"
#include "eoptd/matrix.hpp"
#include "eoptd/numeric.hpp"

namespace eoptd {

// Counts here fit in 64 bits up to 3^40.
inline constexpr int kMaxCubeDimension = 40;

inline std::uint64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
  return out;
}

inline void check_cube_dimension(int k, const char* who) {
  if (k < 1 || k > kMaxCubeDimension)
    throw std::invalid_argument(std::string(who) + ": k must lie in [1, " +
                                std::to_string(kMaxCubeDimension) + "], got " + std::to_string(k));
}

/// E_r: cube points with exactly r zero coordinates and the rest +-1.
struct BarycenterClass {
  int k;
  int depth;

  BarycenterClass(int k_, int depth_) : k(k_), depth(depth_) {
    check_cube_dimension(k, "BarycenterClass");
    if (depth < 0 || depth > k)
      throw std::invalid_argument("BarycenterClass: depth " + std::to_string(depth) +
                                  " outside [0, " + std::to_string(k) + "]");
  }

  /// n_r = C(k, r) 2^{k-r}
  std::uint64_t cardinality() const { return binomial(k, depth) << (k - depth); }
  /// sum over E_r of x_1^2, i.e. C(k-1, r) 2^{k-r}
  std::uint64_t square_count() const { return binomial(k - 1, depth) << (k - depth); }
  /// sum over E_r of x_1^2 x_2^2, i.e. C(k-2, r) 2^{k-r}
  std::uint64_t cross_count() const {
    return k >= 2 ? binomial(k - 2, depth) << (k - depth) : 0;
  }

  /// Per-unit-mass contributions to the moments: a_r = (k-r)/k and
  /// b_r = (k-r)(k-r-1)/(k(k-1)); c_r equals a_r on the cube.
  Rational a_ratio() const { return frac(k - depth, k); }
  Rational b_ratio() const {
    if (k < 2) return Rational(0);
    return frac(static_cast<long>(k - depth) * (k - depth - 1), static_cast<long>(k) * (k - 1));
  }
};

/// Points of E_r: zero-position subsets in lexicographic order, then sign
/// patterns with + before -.
inline std::vector<Point<Rational>> barycenter_points(int k, int r) {
  BarycenterClass cls(k, r);
  std::vector<Point<Rational>> out;
  out.reserve(cls.cardinality());
  std::vector<int> zeros(r);
  for (int i = 0; i < r; ++i) zeros[i] = i;
  const int free = k - r;
  while (true) {
    std::vector<int> nonzero;
    for (int i = 0, z = 0; i < k; ++i) {
      if (z < r && zeros[z] == i)
        ++z;
      else
        nonzero.push_back(i);
    }
    for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << free); ++signs) {
      Point<Rational> x(k, Rational(0));
      for (int j = 0; j < free; ++j) {
        bool negative = (signs >> (free - 1 - j)) & 1U;
        x[nonzero[j]] = negative ? Rational(-1) : Rational(1);
      }
      out.push_back(std::move(x));
    }
    // next combination
    int i = r - 1;
    while (i >= 0 && zeros[i] == k - r + i) --i;
    if (i < 0) break;
    ++zeros[i];
    for (int j = i + 1; j < r; ++j) zeros[j] = zeros[j - 1] + 1;
  }
  return out;
}

/// Masses on barycenter classes reproducing a = c = 2/5, b = 1/5.
/// Two-set designs carry two depths, or three with one zero mass.
struct TripleSolution {
  int k = 0;
  std::vector<int> depths;       // strictly increasing
  std::vector<Rational> masses;  // same length as depths

  std::vector<int> positive_depths() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < depths.size(); ++i)
      if (masses[i] > 0) out.push_back(depths[i]);
    return out;
  }
  std::uint64_t support_count() const;

  friend bool operator==(const TripleSolution&, const TripleSolution&) = default;
};

/// N = sum_i C(k, r_i) 2^{k - r_i}
inline std::uint64_t support_count(int k, const std::vector<int>& depths) {
  std::uint64_t n = 0;
  for (int r : depths) n += BarycenterClass(k, r).cardinality();
  return n;
}

inline std::uint64_t TripleSolution::support_count() const {
  return eoptd::support_count(k, positive_depths());
}

/// Moments of the symmetric design spreading each class mass uniformly.
inline SymmetricMoments<Rational> class_moments(int k, const std::vector<int>& depths,
                                                const std::vector<Rational>& masses) {
  SymmetricMoments<Rational> mom;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    BarycenterClass cls(k, depths[i]);
    mom.a += masses[i] * cls.a_ratio();
    mom.b += masses[i] * cls.b_ratio();
  }
  mom.c = mom.a;
  return mom;
}

inline SymmetricMoments<Rational> triple_moments(const TripleSolution& sol) {
  return class_moments(sol.k, sol.depths, sol.masses);
}

inline const SymmetricMoments<Rational>& optimal_cube_moments() {
  static const SymmetricMoments<Rational> mom{frac(2, 5), frac(1, 5), frac(2, 5)};
  return mom;
}

/// xi(E_{r_i}) = (1/5) (2k^2 + k - 3k(r_j + r_l) + 5 r_j r_l) / ((r_j - r_i)(r_l - r_i))
/// for each i, with {j, l} the other two indices.
inline std::vector<Rational> triple_masses_closed_form(int k, int r1, int r2, int r3) {
  const std::array<long, 3> r = {r1, r2, r3};
  std::vector<Rational> out;
  for (int i = 0; i < 3; ++i) {
    const long rj = r[(i + 1) % 3];
    const long rl = r[(i + 2) % 3];
    const long num = 2L * k * k + k - 3L * k * (rj + rl) + 5 * rj * rl;
    const long den = 5 * (rj - r[i]) * (rl - r[i]);
    out.push_back(frac(num, den));
  }
  return out;
}

namespace detail {

inline void check_depths(int k, const std::vector<int>& depths, const char* who) {
  check_cube_dimension(k, who);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 0 || depths[i] > k)
      throw std::invalid_argument(std::string(who) + ": depth " + std::to_string(depths[i]) +
                                  " outside [0, " + std::to_string(k) + "]");
    if (i > 0 && depths[i] <= depths[i - 1])
      throw std::invalid_argument(std::string(who) + ": depths must be strictly increasing");
  }
}

}  // namespace detail

/// Solves A_{r1,r2,r3} xi = (1, 2/5, 1/5) exactly. Returns nullopt when a
/// mass is negative.
inline std::optional<TripleSolution> solve_triple(int k, int r1, int r2, int r3) {
  detail::check_depths(k, {r1, r2, r3}, "solve_triple");
  if (k < 2) throw std::invalid_argument("solve_triple: needs k >= 2");
  if (r2 > k - 1) throw std::invalid_argument("solve_triple: r2 must be <= k-1");
  const std::array<int, 3> r = {r1, r2, r3};
  Matrix<Rational> A(3, 3);
  for (int j = 0; j < 3; ++j) {
    BarycenterClass cls(k, r[j]);
    A(0, j) = 1;
    A(1, j) = cls.a_ratio();
    A(2, j) = cls.b_ratio();
  }
  std::vector<Rational> masses = solve(A, {Rational(1), frac(2, 5), frac(1, 5)});
  if (masses != triple_masses_closed_form(k, r1, r2, r3))
    throw std::logic_error("solve_triple: linear system disagrees with the closed-form masses");
  for (const Rational& m : masses)
    if (m < 0) return std::nullopt;
  return TripleSolution{k, {r1, r2, r3}, std::move(masses)};
}

/// Two-set solution on (E_s, E_t), if one exists. For k = 1 only the a
/// moment constrains the masses; otherwise the b equation must also hold.
inline std::optional<TripleSolution> solve_pair(int k, int s, int t) {
  detail::check_depths(k, {s, t}, "solve_pair");
  BarycenterClass cs(k, s), ct(k, t);
  // xi_s + xi_t = 1, xi_s a_s + xi_t a_t = 2/5
  const Rational da = cs.a_ratio() - ct.a_ratio();
  if (da == 0) return std::nullopt;
  Rational xs = (frac(2, 5) - ct.a_ratio()) / da;
  Rational xt = Rational(1) - xs;
  if (xs < 0 || xt < 0) return std::nullopt;
  if (k >= 2 && xs * cs.b_ratio() + xt * ct.b_ratio() != frac(1, 5)) return std::nullopt;
  return TripleSolution{k, {s, t}, {xs, xt}};
}

/// Integer solutions of 2k^2 + k - 3k(s+t) + 5st = 0 with 0 <= s < t <= k.
inline std::vector<std::pair<int, int>> diophantine_pairs(int k) {
  check_cube_dimension(k, "diophantine_pairs");
  std::vector<std::pair<int, int>> out;
  for (long s = 0; s <= k; ++s)
    for (long t = s + 1; t <= k; ++t)
      if (2L * k * k + k - 3L * k * (s + t) + 5 * s * t == 0)
        out.emplace_back(static_cast<int>(s), static_cast<int>(t));
  return out;
}

/// All feasible supports on at most three barycenter classes, sorted by
/// (N, depths). Triples with a zero mass are reported as two-set solutions.
inline std::vector<TripleSolution> enumerate_feasible_triples(int k) {
  check_cube_dimension(k, "enumerate_feasible_triples");
  std::vector<TripleSolution> out;
  auto add = [&](TripleSolution sol) {
    TripleSolution reduced{k, {}, {}};
    for (std::size_t i = 0; i < sol.depths.size(); ++i)
      if (sol.masses[i] > 0) {
        reduced.depths.push_back(sol.depths[i]);
        reduced.masses.push_back(sol.masses[i]);
      }
    if (std::find(out.begin(), out.end(), reduced) == out.end()) out.push_back(std::move(reduced));
  };
  if (k == 1) {
    if (auto sol = solve_pair(1, 0, 1)) add(*sol);
  } else {
    for (int r1 = 0; r1 <= k; ++r1)
      for (int r2 = r1 + 1; r2 <= k - 1; ++r2)
        for (int r3 = r2 + 1; r3 <= k; ++r3)
          if (auto sol = solve_triple(k, r1, r2, r3)) add(*sol);
  }
  for (const auto& sol : out)
    if (triple_moments(sol).a != frac(2, 5) || (k >= 2 && triple_moments(sol).b != frac(1, 5)))
      throw std::logic_error("enumerate_feasible_triples: solution misses the optimal moments");
  std::sort(out.begin(), out.end(), [](const TripleSolution& x, const TripleSolution& y) {
    return std::make_tuple(x.support_count(), x.depths) < std::make_tuple(y.support_count(), y.depths);
  });
  return out;
}

/// Feasible support with the fewest points; ties go to the smallest depths.
inline TripleSolution minimal_support_design(int k) {
  auto all = enumerate_feasible_triples(k);
  if (all.empty()) throw std::logic_error("minimal_support_design: no feasible support");
  return all.front();
}

/// Structured minimal design for k = 3q + l, l in {-1, 0, +1}, s = 2q + l,
/// supported on E_0, E_s and E_k. Not defined for k = 3.
inline TripleSolution conjecture_design(int k) {
  check_cube_dimension(k, "conjecture_design");
  if (k == 3) throw std::domain_error("conjecture_design: the structured family excludes k = 3");
  int l = 0;
  int q = 0;
  switch (k % 3) {
    case 0: l = 0; q = k / 3; break;
    case 1: l = 1; q = (k - 1) / 3; break;
    default: l = -1; q = (k + 1) / 3; break;
  }
  const int s = 2 * q + l;
  Rational m0, ms, mk;
  if (l == 1) {
    m0 = frac(1, 5) * frac(q + 2, 2 * q + 1);
    ms = frac(3, 5) * frac(3 * q + 1, 2 * q + 1);
    mk = 0;
  } else if (l == 0) {
    m0 = frac(1, 5) * frac(q + 1, 2 * q);
    ms = frac(3, 5) * frac(3 * q - 1, 2 * q);
    mk = frac(1, 5 * q);
  } else {
    m0 = frac(1, 5) * frac(q, 2 * q - 1);
    ms = frac(1, 5) * frac(static_cast<long>(3 * q - 1) * (3 * q - 2), static_cast<long>(q) * (2 * q - 1));
    mk = frac(2, 5 * q);
  }
  TripleSolution sol{k, {0, s}, {m0, ms}};
  if (s < k) {
    sol.depths.push_back(k);
    sol.masses.push_back(mk);
  } else if (mk != 0) {
    throw std::logic_error("conjecture_design: E_s coincides with E_k but carries extra mass");
  }
  Rational total = 0;
  for (const Rational& m : sol.masses) {
    if (m < 0) throw std::logic_error("conjecture_design: negative mass for k = " + std::to_string(k));
    total += m;
  }
  const auto mom = triple_moments(sol);
  if (total != 1 || mom.a != frac(2, 5) || (k >= 2 && mom.b != frac(1, 5)))
    throw std::logic_error("conjecture_design: masses miss the optimal moments for k = " + std::to_string(k));
  return sol;
}

/// Explicit design with weight xi(E_r) / n_r on every point of E_r.
inline Design<Rational> expand_design(const TripleSolution& sol) {
  std::vector<Point<Rational>> points;
  std::vector<Rational> weights;
  for (std::size_t i = 0; i < sol.depths.size(); ++i) {
    if (sol.masses[i] == 0) continue;
    BarycenterClass cls(sol.k, sol.depths[i]);
    const Rational w = sol.masses[i] / Rational(Integer(cls.cardinality()));
    for (auto& x : barycenter_points(sol.k, sol.depths[i])) {
      points.push_back(std::move(x));
      weights.push_back(w);
    }
  }
  return Design<Rational>(sol.k, Space::cube, std::move(points), std::move(weights));
}

}  // namespace eoptd

#endif  // EOPTD_CUBE_HPP
