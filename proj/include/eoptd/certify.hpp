#ifndef EOPTD_CERTIFY_HPP
#define EOPTD_CERTIFY_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "eoptd/ball.hpp"
#include "eoptd/cube.hpp"
#include "eoptd/design.hpp"
#include "eoptd/matrix.hpp"
#include "eoptd/model.hpp"
#include "eoptd/numeric.hpp"
#include "eoptd/spectrum.hpp"

namespace eoptd {

/// Minimal eigenvectors q_i (unnormalized), their squared norms and
/// weights w_i, giving d(x) = sum_i w_i (q_i^T f(x))^2 / |q_i|^2.
///
/// The closed form is lambda (1 - s P(x) (1 - P(x))) on the ball with
/// P = |x|^2, and lambda (1 - s sum x_i^2 (1 - x_i^2)) on the cube.
struct ExtremalCertificate {
  Space space;
  ModelSpec spec;
  Rational lambda;
  std::vector<std::vector<Rational>> vectors;
  std::vector<Rational> squared_norms;
  std::vector<Rational> weights;
  Rational closed_form_scale;  // s above

  int k() const { return spec.k(); }
  std::size_t size() const { return vectors.size(); }

  /// alpha_i = w_i / |q_i|^2
  std::vector<Rational> alphas() const {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < vectors.size(); ++i) out.push_back(weights[i] / squared_norms[i]);
    return out;
  }
};

namespace detail {

inline Rational squared_norm(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const Rational& x : v)
    if (x != 0) s += x * x;
  return s;
}

// Unit vectors on the cross block, in canonical order.
inline void append_cross_vectors(const ModelSpec& spec, std::vector<std::vector<Rational>>& out) {
  const auto m = static_cast<std::size_t>(spec.m());
  for (std::size_t idx = spec.cross_offset(); idx < m; ++idx) {
    std::vector<Rational> q(m, Rational(0));
    q[idx] = 1;
    out.push_back(std::move(q));
  }
}

template <Scalar T>
T raw_extremal(const ExtremalCertificate& cert, const std::vector<Rational>& alphas,
               std::span<const T> f) {
  T d(0);
  for (std::size_t i = 0; i < cert.vectors.size(); ++i) {
    if (alphas[i] == 0) continue;
    T proj(0);
    const auto& q = cert.vectors[i];
    for (std::size_t j = 0; j < q.size(); ++j)
      if (q[j] != 0 && sign_of(f[j]) != 0) proj += from_rational<T>(q[j]) * f[j];
    d += from_rational<T>(alphas[i]) * proj * proj;
  }
  return d;
}

}  // namespace detail

/// Closed form at x, exact for exact scalars.
template <Scalar T>
T extremal_closed_form(const ExtremalCertificate& cert, std::span<const T> x) {
  if (static_cast<int>(x.size()) != cert.k()) throw std::invalid_argument("extremal: dimension mismatch");
  const T lam = from_rational<T>(cert.lambda);
  const T s = from_rational<T>(cert.closed_form_scale);
  if (cert.space == Space::cube) {
    T t(0);
    for (const T& v : x) {
      const T sq = v * v;
      t += sq * (T(1) - sq);
    }
    return lam * (T(1) - s * t);
  }
  T r2(0);
  for (const T& v : x) r2 += v * v;
  return lam * (T(1) - s * r2 * (T(1) - r2));
}

/// d(x) = sum_i w_i (q_i^T f(x))^2 / |q_i|^2. Throws for x outside the space.
template <Scalar T>
T evaluate_extremal(const ExtremalCertificate& cert, std::span<const T> x) {
  if (static_cast<int>(x.size()) != cert.k())
    throw std::invalid_argument("evaluate_extremal: point has dimension " + std::to_string(x.size()) +
                                ", certificate expects " + std::to_string(cert.k()));
  if (!in_design_space<T>(cert.space, x))
    throw std::invalid_argument("evaluate_extremal: point outside the " +
                                std::string(to_string(cert.space)));
  const auto f = regression_vector<T>(cert.spec, x);
  return detail::raw_extremal<T>(cert, cert.alphas(), std::span<const T>(f));
}

template <Scalar T>
T evaluate_extremal(const ExtremalCertificate& cert, const std::vector<T>& x) {
  return evaluate_extremal<T>(cert, std::span<const T>(x));
}

/// Sparse double-precision evaluator of d for grid searches.
class ExtremalEvaluator {
 public:
  explicit ExtremalEvaluator(const ExtremalCertificate& cert) : spec_(cert.spec) {
    const auto alphas = cert.alphas();
    for (std::size_t i = 0; i < cert.vectors.size(); ++i) {
      if (alphas[i] == 0) continue;
      Term term{alphas[i].convert_to<double>(), {}};
      for (std::size_t j = 0; j < cert.vectors[i].size(); ++j)
        if (cert.vectors[i][j] != 0) term.entries.emplace_back(j, cert.vectors[i][j].convert_to<double>());
      terms_.push_back(std::move(term));
    }
  }

  /// `scratch` must have length m.
  double operator()(std::span<const double> x, std::span<double> scratch) const {
    regression_vector_into<double>(spec_, x, scratch);
    double d = 0;
    for (const Term& t : terms_) {
      double p = 0;
      for (auto [j, v] : t.entries) p += v * scratch[j];
      d += t.alpha * p * p;
    }
    return d;
  }

  double operator()(std::span<const double> x) const {
    std::vector<double> scratch(static_cast<std::size_t>(spec_.m()));
    return (*this)(x, scratch);
  }

  const ModelSpec& spec() const { return spec_; }

 private:
  struct Term {
    double alpha;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  ModelSpec spec_;
  std::vector<Term> terms_;
};

/// Z = sum_i w_i q_i q_i^T / |q_i|^2, so that f^T Z f = d and trace Z = 1.
inline Matrix<Rational> dual_matrix(const ExtremalCertificate& cert) {
  const auto m = static_cast<std::size_t>(cert.spec.m());
  Matrix<Rational> Z(m, m);
  const auto alphas = cert.alphas();
  for (std::size_t i = 0; i < cert.vectors.size(); ++i) {
    if (alphas[i] == 0) continue;
    const auto& q = cert.vectors[i];
    for (std::size_t r = 0; r < m; ++r) {
      if (q[r] == 0) continue;
      for (std::size_t c = 0; c < m; ++c)
        if (q[c] != 0) Z(r, c) += alphas[i] * q[r] * q[c];
    }
  }
  return Z;
}

using Polynomial = std::map<MultiIndex, Rational>;

/// Coefficients of f^T Z f.
inline Polynomial quadratic_form_polynomial(const ModelSpec& spec, const Matrix<Rational>& Z) {
  const auto exps = monomial_exponents(spec);
  Polynomial out;
  for (std::size_t i = 0; i < exps.size(); ++i)
    for (std::size_t j = 0; j < exps.size(); ++j) {
      if (Z(i, j) == 0) continue;
      MultiIndex g(exps[i].size());
      for (std::size_t v = 0; v < g.size(); ++v) g[v] = exps[i][v] + exps[j][v];
      out[g] += Z(i, j);
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

/// Coefficients of the closed form.
inline Polynomial closed_form_polynomial(const ExtremalCertificate& cert) {
  const int k = cert.k();
  const Rational& lam = cert.lambda;
  const Rational ls = lam * cert.closed_form_scale;
  Polynomial out;
  out[MultiIndex(k, 0)] += lam;
  for (int i = 0; i < k; ++i) {
    MultiIndex sq(k, 0), quart(k, 0);
    sq[i] = 2;
    quart[i] = 4;
    out[sq] -= ls;
    out[quart] += ls;
  }
  if (cert.space == Space::ball)
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        MultiIndex g(k, 0);
        g[i] = 2;
        g[j] = 2;
        out[g] += Rational(2) * ls;
      }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

/// Exact identity of the raw weighted sum and the closed form.
inline bool closed_form_identity_holds(const ExtremalCertificate& cert) {
  return quadratic_form_polynomial(cert.spec, dual_matrix(cert)) == closed_form_polynomial(cert);
}

struct CertificateCheck {
  bool ok = true;
  std::string diagnostic;
};

/// Exact checks against an information matrix: M q_i = lambda q_i,
/// q_i^T q_j = 0 (i != j), w_i >= 0 and sum w_i = 1.
inline CertificateCheck check_certificate(const ExtremalCertificate& cert, const Matrix<Rational>& M) {
  Rational total = 0;
  for (std::size_t i = 0; i < cert.size(); ++i) {
    if (cert.weights[i] < 0) return {false, "negative certificate weight " + std::to_string(i)};
    total += cert.weights[i];
    if (detail::squared_norm(cert.vectors[i]) != cert.squared_norms[i])
      return {false, "stored norm of q_" + std::to_string(i) + " is wrong"};
    const auto Mq = multiply<Rational>(M, std::span<const Rational>(cert.vectors[i]));
    for (std::size_t r = 0; r < Mq.size(); ++r)
      if (Mq[r] != cert.lambda * cert.vectors[i][r])
        return {false, "q_" + std::to_string(i) + " is not an eigenvector for lambda = " + to_string(cert.lambda)};
    for (std::size_t j = i + 1; j < cert.size(); ++j)
      if (dot<Rational>(cert.vectors[i], cert.vectors[j]) != 0)
        return {false, "q_" + std::to_string(i) + " and q_" + std::to_string(j) + " are not orthogonal"};
  }
  if (total != 1) return {false, "certificate weights sum to " + to_string(total)};
  return {};
}

namespace detail {

// Weights fitted so that d equals lambda at the given points and the
// grouped weights sum to one. groups[g] lists the vectors sharing weight g.
inline std::vector<Rational> fit_weights(const ExtremalCertificate& cert,
                                         const std::vector<std::vector<std::size_t>>& groups,
                                         const std::vector<Point<Rational>>& points) {
  const std::size_t n = groups.size();
  if (points.size() + 1 != n) throw std::logic_error("fit_weights: wrong number of interpolation points");
  Matrix<Rational> A(n, n);
  std::vector<Rational> rhs(n, cert.lambda);
  for (std::size_t g = 0; g < n; ++g) A(0, g) = Rational(static_cast<long>(groups[g].size()));
  rhs[0] = 1;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto f = regression_vector<Rational>(cert.spec, points[p]);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t i : groups[g]) {
        const Rational proj = dot<Rational>(cert.vectors[i], f);
        A(p + 1, g) += proj * proj / cert.squared_norms[i];
      }
  }
  return solve(A, rhs);
}

}  // namespace detail

/// Certificate for the cube-optimal design (lambda = 1/5). Besides q_0 on
/// (constant, squares), the square block carries
/// q_r = (k-r) e_{k-r+1} - sum_{i <= k-r} e_i, r = 1..k-1; cross unit
/// vectors complete the eigenspace with weight 0.
inline ExtremalCertificate cube_certificate(int k) {
  check_cube_dimension(k, "cube_certificate");
  ModelSpec spec(k);
  const auto m = static_cast<std::size_t>(spec.m());
  ExtremalCertificate cert{Space::cube, spec, frac(1, 5), {}, {}, {}, frac(4, k)};
  std::vector<Rational> q0(m, Rational(0));
  q0[0] = k;
  for (int i = 0; i < k; ++i) q0[spec.square_offset() + i] = -2;
  cert.vectors.push_back(std::move(q0));
  for (int r = 1; r <= k - 1; ++r) {
    std::vector<Rational> q(m, Rational(0));
    for (int i = 0; i < k - r; ++i) q[spec.square_offset() + i] = -1;
    q[spec.square_offset() + (k - r)] = k - r;
    cert.vectors.push_back(std::move(q));
  }
  const std::size_t structured = cert.vectors.size();
  detail::append_cross_vectors(spec, cert.vectors);
  for (const auto& q : cert.vectors) cert.squared_norms.push_back(detail::squared_norm(q));

  // d = lambda at x^(i) = (0,...,0,1,...,1) with i trailing ones, i = 0..k-2.
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < structured; ++i) groups.push_back({i});
  std::vector<Point<Rational>> points;
  for (int i = 0; i + 2 <= k; ++i) {
    Point<Rational> x(k, Rational(0));
    for (int j = k - i; j < k; ++j) x[j] = 1;
    points.push_back(std::move(x));
  }
  cert.weights.assign(cert.vectors.size(), Rational(0));
  // Only the structured vectors take part in the fit.
  ExtremalCertificate head = cert;
  head.vectors.resize(structured);
  head.squared_norms.resize(structured);
  const auto w = detail::fit_weights(head, groups, points);
  for (std::size_t i = 0; i < structured; ++i) cert.weights[i] = w[i];

  // w = (k+4, 4, ..., 4) / (5k)
  for (std::size_t i = 0; i < structured; ++i) {
    const Rational expected = i == 0 ? frac(k + 4, 5L * k) : frac(4, 5L * k);
    if (cert.weights[i] != expected)
      throw std::logic_error("cube_certificate: fitted weights disagree with the closed form");
  }
  return cert;
}

/// Certificate for the ball-optimal design (lambda = 1/(k^2+2k+2)). The
/// square block carries q_0 = (k, -(k+1) 1) and
/// q_r = sum_{i <= r} e_i - r e_{r+1}, r = 1..k-1; cross unit vectors share
/// a common weight.
inline ExtremalCertificate ball_certificate(int k) {
  if (k < 1 || k > kMaxCubeDimension) throw std::invalid_argument("ball_certificate: k out of range");
  ModelSpec spec(k);
  const auto m = static_cast<std::size_t>(spec.m());
  const Rational dk = ball_denominator(k);
  ExtremalCertificate cert{Space::ball, spec, Rational(1) / dk, {}, {}, {}, frac(2L * (k + 1), k)};
  std::vector<Rational> q0(m, Rational(0));
  q0[0] = k;
  for (int i = 0; i < k; ++i) q0[spec.square_offset() + i] = -(k + 1);
  cert.vectors.push_back(std::move(q0));
  for (int r = 1; r <= k - 1; ++r) {
    std::vector<Rational> q(m, Rational(0));
    for (int i = 0; i < r; ++i) q[spec.square_offset() + i] = 1;
    q[spec.square_offset() + r] = -r;
    cert.vectors.push_back(std::move(q));
  }
  const std::size_t structured = cert.vectors.size();
  detail::append_cross_vectors(spec, cert.vectors);
  for (const auto& q : cert.vectors) cert.squared_norms.push_back(detail::squared_norm(q));

  std::vector<std::vector<std::size_t>> groups = {{0}};
  std::vector<Point<Rational>> points = {Point<Rational>(k, Rational(0))};
  if (k >= 2) {
    std::vector<std::size_t> g1, g2;
    for (std::size_t i = 1; i < structured; ++i) g1.push_back(i);
    for (std::size_t i = structured; i < cert.vectors.size(); ++i) g2.push_back(i);
    groups.push_back(g1);
    groups.push_back(g2);
    Point<Rational> e1(k, Rational(0));
    e1[0] = 1;
    points.push_back(std::move(e1));
  }
  // k = 1: a single weight fixed by the sum constraint.
  if (k == 1) points.clear();
  const auto w = detail::fit_weights(cert, groups, points);
  cert.weights.assign(cert.vectors.size(), Rational(0));
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t i : groups[g]) cert.weights[i] = w[g];

  // w0 = (k^2+3k+1)/(k D), p1 = (k+1)/(k D), p2 = 2(k+1)/(k D)
  const Rational kd = Rational(k) * dk;
  const std::vector<Rational> expected = {Rational(static_cast<long>(k) * k + 3L * k + 1) / kd,
                                          Rational(k + 1) / kd, Rational(2L * (k + 1)) / kd};
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (w[g] != expected[g])
      throw std::logic_error("ball_certificate: fitted weights disagree with the closed form");
  return cert;
}

inline ExtremalCertificate certificate_for(Space space, int k) {
  return space == Space::cube ? cube_certificate(k) : ball_certificate(k);
}

/// Information matrix of the design the certificate belongs to.
inline Matrix<Rational> certified_information_matrix(const ExtremalCertificate& cert) {
  const auto mom = cert.space == Space::cube ? optimal_cube_moments() : optimal_ball_moments(cert.k());
  return symmetric_info_matrix(cert.spec, mom).entries;
}

// ---------------------------------------------------------------------------
// Maximization over the design space.

struct Maximum {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> argmax;
  std::uint64_t evaluations = 0;
};

inline int default_grid(int k) { return k <= 3 ? 101 : 21; }

/// Largest k for which the tensor grid is used in verification.
inline constexpr int kMaxGridDimension = 6;

namespace detail {

inline bool inside(Space space, std::span<const double> x) {
  return in_design_space<double>(space, x, 0.0);
}

inline void project_into(Space space, std::vector<double>& x) {
  if (space == Space::cube) {
    for (double& v : x) v = std::clamp(v, -1.0, 1.0);
    return;
  }
  double r2 = 0;
  for (double v : x) r2 += v * v;
  if (r2 > 1.0) {
    const double s = 1.0 / std::sqrt(r2);
    for (double& v : x) v *= s;
  }
}

}  // namespace detail

/// Coordinate ascent with step halving until the step drops below 1e-12.
template <class Fn>
Maximum refine_maximum(Fn&& fn, Space space, std::vector<double> x, double start_step) {
  Maximum out;
  out.value = fn(std::span<const double>(x));
  out.evaluations = 1;
  for (double step = start_step; step >= 1e-12; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < x.size(); ++i)
        for (double dir : {1.0, -1.0}) {
          std::vector<double> y = x;
          y[i] += dir * step;
          detail::project_into(space, y);
          if (!detail::inside(space, y)) continue;
          const double v = fn(std::span<const double>(y));
          ++out.evaluations;
          if (v > out.value) {
            out.value = v;
            x = std::move(y);
            improved = true;
          }
        }
    }
  }
  out.argmax = std::move(x);
  return out;
}

/// Max of fn over the tensor grid {-1 + 2j/(n-1)}^k restricted to the
/// space, followed by refinement from the best few grid points. fn must be
/// thread safe; the grid is split across hardware threads.
template <class Fn>
Maximum maximize_over_space(Fn&& fn, int k, Space space, int grid_per_axis) {
  if (grid_per_axis < 3) throw std::invalid_argument("maximize_over_space: grid must have >= 3 points per axis");
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (total > (std::uint64_t{1} << 40) / static_cast<std::uint64_t>(grid_per_axis))
      throw std::invalid_argument("maximize_over_space: grid too large");
    total *= static_cast<std::uint64_t>(grid_per_axis);
  }
  const double h = 2.0 / (grid_per_axis - 1);
  constexpr std::size_t kKeep = 4;
  const unsigned workers = std::max(1U, std::min(std::thread::hardware_concurrency(), 32U));

  struct Candidate {
    double value;
    std::uint64_t index;
  };
  std::vector<std::vector<Candidate>> best(workers);
  std::vector<std::uint64_t> counts(workers, 0);
  auto decode = [&](std::uint64_t idx, std::vector<double>& x) {
    for (int i = k - 1; i >= 0; --i) {
      x[i] = -1.0 + h * static_cast<double>(idx % grid_per_axis);
      idx /= grid_per_axis;
    }
  };
  auto work = [&](unsigned w) {
    std::vector<double> x(k);
    auto& mine = best[w];
    const std::uint64_t lo = total * w / workers, hi = total * (w + 1) / workers;
    std::vector<int> digit(k);
    for (std::uint64_t idx = lo, rest = lo; idx < hi; ++idx) {
      if (idx == lo) {
        for (int i = k - 1; i >= 0; --i) {
          digit[i] = static_cast<int>(rest % grid_per_axis);
          rest /= grid_per_axis;
        }
      } else {
        for (int i = k - 1; i >= 0 && ++digit[i] == grid_per_axis; --i) digit[i] = 0;
      }
      for (int i = 0; i < k; ++i) x[i] = -1.0 + h * digit[i];
      if (space == Space::ball && !detail::inside(space, x)) continue;
      const double v = fn(std::span<const double>(x));
      ++counts[w];
      if (mine.size() < kKeep || v > mine.back().value) {
        mine.push_back({v, idx});
        std::sort(mine.begin(), mine.end(), [](const Candidate& a, const Candidate& b) {
          return a.value > b.value || (a.value == b.value && a.index < b.index);
        });
        if (mine.size() > kKeep) mine.pop_back();
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(work, w);
  work(0);
  for (auto& t : threads) t.join();

  std::vector<Candidate> all;
  for (const auto& b : best) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
  });
  if (all.size() > kKeep) all.resize(kKeep);

  Maximum out;
  out.evaluations = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  for (const Candidate& c : all) {
    std::vector<double> x(k);
    decode(c.index, x);
    Maximum r = refine_maximum(fn, space, x, h / 2);
    out.evaluations += r.evaluations;
    if (r.value > out.value) {
      out.value = r.value;
      out.argmax = std::move(r.argmax);
    }
  }
  return out;
}

/// Exact reduction for large k. d depends on x only through
/// t = sum x_i^2 (1 - x_i^2) in [0, k/4] (cube) or P = |x|^2 in [0, 1]
/// (ball), through g = lambda (1 - s h) with h = t or h = P(1 - P) >= 0.
struct ReductionCheck {
  bool identity = false;       // raw sum equals closed form as polynomials
  bool bounded = false;        // g <= lambda on the whole range
  Rational max_value;          // max of g
  Rational min_value;          // min of g, at the far end of the range
  bool ok() const { return identity && bounded; }
};

inline ReductionCheck reduction_check(const ExtremalCertificate& cert) {
  ReductionCheck out;
  out.identity = closed_form_identity_holds(cert);
  const Rational h_max = cert.space == Space::cube ? frac(cert.k(), 4) : frac(1, 4);
  // g is affine and decreasing in h when s >= 0, so it peaks at h = 0.
  const Rational g0 = cert.lambda;
  const Rational g1 = cert.lambda * (Rational(1) - cert.closed_form_scale * h_max);
  out.max_value = std::max(g0, g1);
  out.min_value = std::min(g0, g1);
  out.bounded = cert.closed_form_scale >= 0 && out.max_value == cert.lambda;
  return out;
}

// ---------------------------------------------------------------------------
// Verification of a concrete design.

struct VerificationReport {
  std::string lambda_min;  // exact when available
  double lambda_min_value = 0;
  int multiplicity = 0;
  double max_d = 0;
  std::vector<double> argmax;
  double gap = 0;  // max_d - lambda_min
  double support_equality_max_err = 0;
  double eigen_residual = 0;
  bool certificate_ok = false;
  bool grid_used = false;
  bool pass = false;
  std::vector<std::string> notes;
};

namespace detail {

template <Scalar T>
std::pair<std::string, std::pair<double, int>> design_lambda_min(const ModelSpec& spec, const Design<T>& design,
                                                                 const Matrix<double>& Md) {
  if constexpr (is_exact_v<T>) {
    if (is_symmetric(spec, design).symmetric) {
      SymmetricMoments<Rational> mom;
      if constexpr (std::is_same_v<T, Rational>) {
        mom = moments_of(spec, design);
      } else {
        mom = to_rational_moments(moments_of(spec, design));
      }
      const auto e = lambda_min_symmetric(mom, spec.k());
      return {e.value.str(), {e.value.to_double(), e.multiplicity}};
    }
  }
  const auto s = numeric_spectrum(Md, 1e-9);
  return {to_string(s.min().value), {s.min().value, s.min().multiplicity}};
}

}  // namespace detail

/// Equivalence-theorem check of `design` against `cert`: the design's
/// lambda_min bounds d on the space with equality on the support, and the
/// certificate vectors are lambda_min eigenvectors of the design's matrix.
/// Grids are used up to k = 6; beyond that the exact reduction replaces them.
template <Scalar T>
VerificationReport verify_design(const ModelSpec& spec, const Design<T>& design, const ExtremalCertificate& cert,
                                 int grid_per_axis = 0, double tol = 1e-10) {
  if (design.k() != spec.k() || cert.k() != spec.k())
    throw std::invalid_argument("verify_design: dimension mismatch between model, design and certificate");
  if (design.space() != cert.space)
    throw std::invalid_argument("verify_design: certificate is for the " + std::string(to_string(cert.space)) +
                                ", design lives on the " + std::string(to_string(design.space())));
  VerificationReport rep;
  const InfoMatrix<T> M = information_matrix(spec, design);
  const Matrix<double> Md = to_double_matrix(M.entries);
  auto [lstr, lval] = detail::design_lambda_min(spec, design, Md);
  rep.lambda_min = lstr;
  rep.lambda_min_value = lval.first;
  rep.multiplicity = lval.second;
  const double lam = rep.lambda_min_value;

  // Eigenvector residual of the certificate vectors against this design.
  const double cert_lam = cert.lambda.convert_to<double>();
  for (const auto& q : cert.vectors) {
    std::vector<double> qd(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) qd[i] = q[i].convert_to<double>();
    const auto Mq = multiply<double>(Md, std::span<const double>(qd));
    double res = 0, nq = 0;
    for (std::size_t i = 0; i < qd.size(); ++i) {
      res += (Mq[i] - cert_lam * qd[i]) * (Mq[i] - cert_lam * qd[i]);
      nq += qd[i] * qd[i];
    }
    rep.eigen_residual = std::max(rep.eigen_residual, std::sqrt(res / nq));
  }
  const CertificateCheck self = check_certificate(cert, certified_information_matrix(cert));
  if (!self.ok) rep.notes.push_back("certificate: " + self.diagnostic);
  rep.certificate_ok = self.ok && rep.eigen_residual <= tol && std::abs(cert_lam - lam) <= tol;
  if (rep.eigen_residual > tol)
    rep.notes.push_back("certificate vectors are not lambda_min eigenvectors of this design (residual " +
                        to_string(rep.eigen_residual) + ")");
  if (std::abs(cert_lam - lam) > tol)
    rep.notes.push_back("lambda_min " + rep.lambda_min + " differs from the certified value " +
                        to_string(cert.lambda));

  const ExtremalEvaluator eval(cert);
  std::vector<double> scratch(static_cast<std::size_t>(spec.m()));
  for (std::size_t p = 0; p < design.size(); ++p) {
    if (sign_of(design.weights()[p]) == 0) continue;
    std::vector<double> x(design.k());
    for (int i = 0; i < design.k(); ++i) x[i] = to_double(design.points()[p][i]);
    rep.support_equality_max_err = std::max(rep.support_equality_max_err, std::abs(eval(x, scratch) - lam));
  }
  if (rep.support_equality_max_err > tol)
    rep.notes.push_back("d differs from lambda_min at a support point by " + to_string(rep.support_equality_max_err));

  if (spec.k() <= kMaxGridDimension || grid_per_axis > 0) {
    const int grid = grid_per_axis > 0 ? grid_per_axis : default_grid(spec.k());
    auto fn = [&eval, m = spec.m()](std::span<const double> x) {
      thread_local std::vector<double> buf;
      buf.resize(static_cast<std::size_t>(m));
      return eval(x, buf);
    };
    Maximum mx = maximize_over_space(fn, spec.k(), cert.space, grid);
    rep.max_d = mx.value;
    rep.argmax = mx.argmax;
    rep.grid_used = true;
  } else {
    const ReductionCheck red = reduction_check(cert);
    rep.max_d = red.max_value.convert_to<double>();
    if (!red.ok()) rep.notes.push_back("exact reduction check failed");
    rep.certificate_ok = rep.certificate_ok && red.ok();
  }
  rep.gap = rep.max_d - lam;
  if (rep.gap > tol) rep.notes.push_back("max of d exceeds lambda_min by " + to_string(rep.gap));
  rep.pass = rep.certificate_ok && rep.gap <= tol && rep.support_equality_max_err <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Duality.

struct DualGap {
  double primal = 0;  // lambda_min of the design
  double dual = 0;    // max |f^T Z f| over the space
  double gap = 0;
  Rational trace_z;
};

/// Sparse double evaluator of P_Z(x) = f^T Z f.
class QuadraticFormEvaluator {
 public:
  QuadraticFormEvaluator(const ModelSpec& spec, const Matrix<Rational>& Z) : spec_(spec) {
    for (std::size_t i = 0; i < Z.rows(); ++i)
      for (std::size_t j = i; j < Z.cols(); ++j)
        if (Z(i, j) != 0) entries_.push_back({i, j, (i == j ? 1.0 : 2.0) * Z(i, j).convert_to<double>()});
  }
  double operator()(std::span<const double> x, std::span<double> scratch) const {
    regression_vector_into<double>(spec_, x, scratch);
    double s = 0;
    for (const auto& e : entries_) s += e.value * scratch[e.i] * scratch[e.j];
    return s;
  }

 private:
  struct Entry {
    std::size_t i, j;
    double value;
  };
  ModelSpec spec_;
  std::vector<Entry> entries_;
};

template <Scalar T>
DualGap dual_gap(const Design<T>& design, const ExtremalCertificate& cert, int grid_per_axis = 0) {
  const ModelSpec spec(design.k());
  if (cert.k() != design.k() || cert.space != design.space())
    throw std::invalid_argument("dual_gap: certificate does not match the design");
  DualGap out;
  const Matrix<Rational> Z = dual_matrix(cert);
  for (std::size_t i = 0; i < Z.rows(); ++i) out.trace_z += Z(i, i);
  const Matrix<double> Md = to_double_matrix(information_matrix(spec, design).entries);
  out.primal = detail::design_lambda_min(spec, design, Md).second.first;
  const QuadraticFormEvaluator pz(spec, Z);
  const int grid = grid_per_axis > 0 ? grid_per_axis : default_grid(spec.k());
  auto fn = [&pz, m = spec.m()](std::span<const double> x) {
    thread_local std::vector<double> buf;
    buf.resize(static_cast<std::size_t>(m));
    return std::abs(pz(x, buf));
  };
  out.dual = maximize_over_space(fn, spec.k(), cert.space, grid).value;
  out.gap = out.dual - out.primal;
  return out;
}

// ---------------------------------------------------------------------------
// Projected subgradient ascent on lambda_min over the weight simplex.

/// Euclidean projection onto the probability simplex (sorting method).
inline std::vector<double> project_to_simplex(const std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0, theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

struct OptimizerOptions {
  int iterations = 5000;
  double initial_step = 0.5;  // s_t = initial_step / sqrt(t)
};

struct OptimizerResult {
  std::vector<double> weights;   // best iterate
  double lambda_min = 0;         // at the best iterate
  std::vector<double> trace;     // lambda_min at every iterate
  std::vector<double> envelope;  // running maximum of trace
};

/// Information matrix of candidate regression vectors under weights w.
inline Matrix<double> weighted_information(const std::vector<std::vector<double>>& F, const std::vector<double>& w,
                                           std::size_t m) {
  Matrix<double> M(m, m);
  for (std::size_t p = 0; p < F.size(); ++p) {
    if (w[p] == 0) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double wf = w[p] * F[p][i];
      if (wf == 0) continue;
      for (std::size_t j = i; j < m; ++j) M(i, j) += wf * F[p][j];
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) M(i, j) = M(j, i);
  return M;
}

/// Subgradient of lambda_min at w: (q^T f_i)^2 for the first Jacobi
/// eigenvector of the smallest eigenvalue.
inline std::pair<double, std::vector<double>> lambda_min_subgradient(const std::vector<std::vector<double>>& F,
                                                                     const std::vector<double>& w, std::size_t m) {
  const EigenDecomposition eig = eigen_sym(weighted_information(F, w, m));
  const std::vector<double> q = eig.vectors.column(0);
  std::vector<double> g(F.size());
  for (std::size_t p = 0; p < F.size(); ++p) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += q[i] * F[p][i];
    g[p] = s * s;
  }
  return {eig.values.front(), std::move(g)};
}

inline OptimizerResult numeric_e_optimizer(const ModelSpec& spec, const std::vector<Point<double>>& candidates,
                                           const OptimizerOptions& opt = {}) {
  if (candidates.empty()) throw std::invalid_argument("numeric_e_optimizer: no candidate points");
  if (opt.iterations < 1 || !(opt.initial_step > 0))
    throw std::invalid_argument("numeric_e_optimizer: need iterations >= 1 and a positive step");
  const auto m = static_cast<std::size_t>(spec.m());
  std::vector<std::vector<double>> F;
  for (const auto& x : candidates) F.push_back(regression_vector<double>(spec, x));
  std::vector<double> w(F.size(), 1.0 / static_cast<double>(F.size()));
  {
    const auto lam0 = eigen_sym(weighted_information(F, w, m)).values.front();
    if (lam0 <= 1e-12)
      throw std::invalid_argument("numeric_e_optimizer: candidate set gives a singular information matrix");
  }
  OptimizerResult out;
  out.lambda_min = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= opt.iterations; ++t) {
    auto [lam, g] = lambda_min_subgradient(F, w, m);
    out.trace.push_back(lam);
    if (lam > out.lambda_min) {
      out.lambda_min = lam;
      out.weights = w;
    }
    out.envelope.push_back(out.lambda_min);
    const double step = opt.initial_step / std::sqrt(static_cast<double>(t));
    for (std::size_t p = 0; p < w.size(); ++p) w[p] += step * g[p];
    w = project_to_simplex(w);
  }
  return out;
}

}  // namespace eoptd

#endif  // EOPTD_CERTIFY_HPP
