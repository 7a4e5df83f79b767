#ifndef EOPTD_DESIGN_HPP
#define EOPTD_DESIGN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eoptd/matrix.hpp"
#include "eoptd/model.hpp"
#include "eoptd/numeric.hpp"

namespace eoptd {

enum class Space { cube, ball };

inline std::string_view to_string(Space s) { return s == Space::cube ? "cube" : "ball"; }

inline Space parse_space(std::string_view s) {
  if (s == "cube") return Space::cube;
  if (s == "ball") return Space::ball;
  throw std::invalid_argument("unknown design space '" + std::string(s) + "' (expected cube or ball)");
}

class SymmetryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <Scalar T>
using Point = std::vector<T>;

/// Tolerance used for floating-point design invariants.
inline constexpr double kFloatDesignTol = 1e-12;

/// Membership of x in the cube [-1,1]^k or the unit ball.
template <Scalar T>
bool in_design_space(Space space, std::span<const T> x, double tol = kFloatDesignTol) {
  if (space == Space::cube) {
    for (const T& v : x) {
      if constexpr (is_exact_v<T>) {
        if (abs_value(v) > T(1)) return false;
      } else {
        if (std::abs(v) > 1.0 + tol) return false;
      }
    }
    return true;
  }
  T r2(0);
  for (const T& v : x) r2 += v * v;
  if constexpr (is_exact_v<T>) {
    return !(r2 > T(1));
  } else {
    return r2 <= 1.0 + tol;
  }
}

/// Approximate design: a finite probability measure on the cube or ball.
///
/// Duplicate points are merged (weights summed) and reported in warnings().
template <Scalar T>
class Design {
 public:
  Design(int k, Space space, std::vector<Point<T>> points, std::vector<T> weights)
      : k_(k), space_(space) {
    if (k < 1) throw std::invalid_argument("Design: k must be >= 1");
    if (points.size() != weights.size())
      throw std::invalid_argument("Design: " + std::to_string(points.size()) + " points but " +
                                  std::to_string(weights.size()) + " weights");
    if (points.empty()) throw std::invalid_argument("Design: empty support");
    T total(0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (static_cast<int>(points[i].size()) != k)
        throw std::invalid_argument("Design: point " + std::to_string(i) + " has dimension " +
                                    std::to_string(points[i].size()) + ", expected " +
                                    std::to_string(k));
      if (sign_of(weights[i]) < 0)
        throw std::invalid_argument("Design: negative weight at point " + std::to_string(i));
      if (!in_design_space<T>(space, points[i]))
        throw std::invalid_argument("Design: point " + std::to_string(i) + " lies outside the " +
                                    std::string(to_string(space)));
      total += weights[i];
    }
    if constexpr (is_exact_v<T>) {
      if (!(total == T(1)))
        throw std::invalid_argument("Design: weights sum to " + to_string(total) + ", not 1");
    } else {
      if (std::abs(total - 1.0) > kFloatDesignTol)
        throw std::invalid_argument("Design: weights sum to " + to_string(total) + ", not 1");
    }
    merge(std::move(points), std::move(weights));
  }

  int k() const { return k_; }
  Space space() const { return space_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point<T>>& points() const { return points_; }
  const std::vector<T>& weights() const { return weights_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void merge(std::vector<Point<T>> points, std::vector<T> weights) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(points[a].begin(), points[a].end(), points[b].begin(),
                                          points[b].end());
    };
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<std::size_t> rep(points.size());
    for (std::size_t n = 0; n < order.size(); ++n) {
      std::size_t i = order[n];
      rep[i] = (n > 0 && points[order[n - 1]] == points[i]) ? rep[order[n - 1]] : i;
    }
    std::size_t merged = 0;
    std::vector<std::size_t> slot(points.size(), points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (rep[i] == i) {
        slot[i] = points_.size();
        points_.push_back(std::move(points[i]));
        weights_.push_back(weights[i]);
      } else {
        weights_[slot[rep[i]]] += weights[i];
        ++merged;
      }
    }
    if (merged > 0)
      warnings_.push_back("merged " + std::to_string(merged) + " duplicate support point(s)");
  }

  int k_;
  Space space_;
  std::vector<Point<T>> points_;
  std::vector<T> weights_;
  std::vector<std::string> warnings_;
};

/// The triple (a, b, c) = (E x1^2, E x1^2 x2^2, E x1^4) of a symmetric design.
/// For k = 1 there is no cross moment and b is ignored.
template <Scalar T>
struct SymmetricMoments {
  T a{0};
  T b{0};
  T c{0};
  friend bool operator==(const SymmetricMoments&, const SymmetricMoments&) = default;
};

template <Scalar T>
struct InfoMatrix {
  ModelSpec spec;
  Matrix<T> entries;
};

/// M(xi) = sum_i w_i f(x_i) f(x_i)^T, accumulated on the upper triangle.
template <Scalar T>
InfoMatrix<T> information_matrix(const ModelSpec& spec, const Design<T>& design) {
  if (design.k() != spec.k())
    throw std::invalid_argument("information_matrix: design has k=" + std::to_string(design.k()) +
                                ", model has k=" + std::to_string(spec.k()));
  const auto m = static_cast<std::size_t>(spec.m());
  Matrix<T> M(m, m);
  std::vector<T> f(m, T(0));
  std::vector<std::size_t> nz;
  nz.reserve(m);
  for (std::size_t p = 0; p < design.size(); ++p) {
    const T& w = design.weights()[p];
    if (sign_of(w) == 0) continue;
    regression_vector_into<T>(spec, design.points()[p], f);
    nz.clear();
    for (std::size_t i = 0; i < m; ++i)
      if (sign_of(f[i]) != 0) nz.push_back(i);
    for (std::size_t a = 0; a < nz.size(); ++a) {
      const T wf = w * f[nz[a]];
      for (std::size_t b = a; b < nz.size(); ++b) M(nz[a], nz[b]) += wf * f[nz[b]];
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) M(i, j) = M(j, i);
  return {spec, std::move(M)};
}

/// Block-structured information matrix determined by (a, b, c), laid out in
/// the canonical monomial ordering.
template <Scalar T>
InfoMatrix<T> symmetric_info_matrix(const ModelSpec& spec, const SymmetricMoments<T>& mom) {
  const int k = spec.k();
  const auto m = static_cast<std::size_t>(spec.m());
  Matrix<T> M(m, m);
  M(0, 0) = T(1);
  for (int i = 0; i < k; ++i) {
    const std::size_t si = spec.square_offset() + i;
    M(0, si) = mom.a;
    M(si, 0) = mom.a;
    for (int j = 0; j < k; ++j) M(si, spec.square_offset() + j) = (i == j) ? mom.c : mom.b;
    M(spec.linear_offset() + i, spec.linear_offset() + i) = mom.a;
  }
  for (std::size_t idx = spec.cross_offset(); idx < m; ++idx) M(idx, idx) = mom.b;
  return {spec, std::move(M)};
}

struct SymmetryCheck {
  bool symmetric = true;
  std::string diagnostic;
};

namespace detail {

inline std::string monomial_name(const MultiIndex& gamma) {
  std::string out;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "x" + std::to_string(i + 1);
    if (gamma[i] > 1) out += "^" + std::to_string(gamma[i]);
  }
  return out.empty() ? "1" : out;
}

// All multisets of at most `degree` variables from k, as exponent vectors.
inline std::vector<MultiIndex> monomials_up_to(int k, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex gamma(k, 0);
  auto rec = [&](auto&& self, int start, int left) -> void {
    out.push_back(gamma);
    if (left == 0) return;
    for (int v = start; v < k; ++v) {
      ++gamma[v];
      self(self, v, left - 1);
      --gamma[v];
    }
  };
  rec(rec, 0, degree);
  return out;
}

template <Scalar T>
T direct_moment(const Design<T>& design, const std::vector<std::pair<int, int>>& factors) {
  T moment(0);
  for (std::size_t p = 0; p < design.size(); ++p) {
    const auto& x = design.points()[p];
    T term = design.weights()[p];
    for (auto [var, e] : factors) {
      if (sign_of(x[var]) == 0) {
        term = T(0);
        break;
      }
      for (int r = 0; r < e; ++r) term *= x[var];
    }
    if (sign_of(term) != 0) moment += term;
  }
  return moment;
}

// Exact designs reuse few coordinate values and weights. Coding them as
// small indices lets a moment be tallied as integer counts per
// (weight, exponent profile) key before any exact arithmetic happens.
template <Scalar T>
class CodedDesign {
 public:
  static std::optional<CodedDesign> make(const Design<T>& design) {
    CodedDesign c;
    std::map<T, int> values, weights;
    for (const auto& x : design.points())
      for (const T& v : x)
        if (sign_of(v) != 0) values.emplace(v, 0);
    for (const T& w : design.weights()) weights.emplace(w, 0);
    if (values.size() > kMaxValues || weights.size() > (1u << 16)) return std::nullopt;
    for (auto& [v, idx] : values) {
      idx = static_cast<int>(c.values_.size());
      c.values_.push_back(v);
    }
    for (auto& [w, idx] : weights) {
      idx = static_cast<int>(c.weights_.size());
      c.weights_.push_back(w);
    }
    const int k = design.k();
    c.k_ = k;
    c.codes_.reserve(design.size() * static_cast<std::size_t>(k));
    for (std::size_t p = 0; p < design.size(); ++p) {
      for (const T& v : design.points()[p]) c.codes_.push_back(sign_of(v) == 0 ? -1 : values.at(v));
      c.weight_codes_.push_back(weights.at(design.weights()[p]));
    }
    return c;
  }

  T moment(const std::vector<std::pair<int, int>>& factors) const {
    std::unordered_map<std::uint64_t, long> tally;
    const std::size_t n = weight_codes_.size();
    for (std::size_t p = 0; p < n; ++p) {
      const int* x = codes_.data() + p * static_cast<std::size_t>(k_);
      std::uint64_t key = static_cast<std::uint64_t>(weight_codes_[p]) << 48;
      bool zero = false;
      for (auto [var, e] : factors) {
        if (x[var] < 0) {
          zero = true;
          break;
        }
        key += static_cast<std::uint64_t>(e) << (3 * x[var]);
      }
      if (!zero) ++tally[key];
    }
    T moment(0);
    for (const auto& [key, count] : tally) {
      T term = weights_[key >> 48] * T(count);
      for (std::size_t v = 0; v < values_.size(); ++v) {
        const auto e = (key >> (3 * v)) & 7u;
        for (std::uint64_t r = 0; r < e; ++r) term *= values_[v];
      }
      moment += term;
    }
    return moment;
  }

 private:
  static constexpr std::size_t kMaxValues = 16;  // 3 bits per exponent below bit 48
  int k_ = 0;
  std::vector<T> values_, weights_;
  std::vector<int> codes_, weight_codes_;
};

}  // namespace detail

/// Checks every moment of total degree <= 4 (all products f_i f_j): odd
/// moments must vanish and even ones must be invariant under coordinate
/// permutations. Exact for exact scalars; `tol` applies to doubles.
template <Scalar T>
SymmetryCheck is_symmetric(const ModelSpec& spec, const Design<T>& design, double tol = 0.0) {
  if (design.k() != spec.k()) throw std::invalid_argument("is_symmetric: dimension mismatch");
  const int k = spec.k();
  std::map<std::vector<int>, std::pair<T, MultiIndex>> reference;
  std::optional<detail::CodedDesign<T>> coded;
  if constexpr (is_exact_v<T>) coded = detail::CodedDesign<T>::make(design);
  for (const MultiIndex& gamma : detail::monomials_up_to(k, 4)) {
    std::vector<std::pair<int, int>> factors;
    bool odd = false;
    for (int i = 0; i < k; ++i)
      if (gamma[i] > 0) {
        factors.emplace_back(i, gamma[i]);
        odd = odd || (gamma[i] % 2 == 1);
      }
    const T moment = coded ? coded->moment(factors) : detail::direct_moment(design, factors);
    if (odd) {
      if (!nearly_equal(moment, T(0), tol))
        return {false, "odd moment E[" + detail::monomial_name(gamma) + "] = " + to_string(moment) +
                           ", expected 0"};
      continue;
    }
    std::vector<int> pattern;
    for (auto [var, e] : factors) pattern.push_back(e);
    std::sort(pattern.begin(), pattern.end());
    auto it = reference.find(pattern);
    if (it == reference.end()) {
      reference.emplace(pattern, std::make_pair(moment, gamma));
    } else if (!nearly_equal(moment, it->second.first, tol)) {
      return {false, "moment E[" + detail::monomial_name(gamma) + "] = " + to_string(moment) +
                         " differs from E[" + detail::monomial_name(it->second.second) +
                         "] = " + to_string(it->second.first)};
    }
  }
  return {};
}

/// (a, b, c) by weighted summation; throws SymmetryError for a
/// non-symmetric design.
template <Scalar T>
SymmetricMoments<T> moments_of(const ModelSpec& spec, const Design<T>& design, double tol = 0.0) {
  if constexpr (!is_exact_v<T>) {
    if (tol == 0.0) tol = kFloatDesignTol;
  }
  SymmetryCheck check = is_symmetric(spec, design, tol);
  if (!check.symmetric) throw SymmetryError("moments_of: design is not symmetric: " + check.diagnostic);
  SymmetricMoments<T> mom;
  for (std::size_t p = 0; p < design.size(); ++p) {
    const auto& x = design.points()[p];
    const T& w = design.weights()[p];
    const T x1sq = x[0] * x[0];
    mom.a += w * x1sq;
    mom.c += w * x1sq * x1sq;
    if (spec.k() >= 2) mom.b += w * x1sq * x[1] * x[1];
  }
  return mom;
}

/// det M = a^k b^{k(k-1)/2} (c-b)^{k-1} [c + (k-1) b - k a^2];
/// for k = 1 this is a (c - a^2).
template <Scalar T>
T determinant_symmetric(const ModelSpec& spec, const SymmetricMoments<T>& mom) {
  const int k = spec.k();
  T det(1);
  for (int i = 0; i < k; ++i) det *= mom.a;
  if (k >= 2) {
    for (int i = 0; i < k * (k - 1) / 2; ++i) det *= mom.b;
    const T cb = mom.c - mom.b;
    for (int i = 0; i < k - 1; ++i) det *= cb;
  }
  const T b_term = k >= 2 ? T(mom.b * T(k - 1)) : T(0);
  det *= mom.c + b_term - T(k) * mom.a * mom.a;
  return det;
}

/// 1 >= a >= c > b > 0 and c + (k-1) b > k a^2. For k = 1 the b conditions
/// drop out and c > a^2 remains.
template <Scalar T>
bool check_moment_inequalities(const SymmetricMoments<T>& mom, int k) {
  const T zero(0);
  if (mom.a > T(1) || mom.c > mom.a) return false;
  if (k == 1) return mom.c > zero && mom.c > mom.a * mom.a;
  if (!(mom.c > mom.b) || !(mom.b > zero)) return false;
  return mom.c + T(k - 1) * mom.b > T(k) * mom.a * mom.a;
}

}  // namespace eoptd

#endif  // EOPTD_DESIGN_HPP
