#ifndef EOPTD_BALL_HPP
#define EOPTD_BALL_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoptd/design.hpp"
#include "eoptd/matrix.hpp"
#include "eoptd/numeric.hpp"
#include "eoptd/spectrum.hpp"

namespace eoptd {

inline Rational ball_denominator(int k) { return Rational(static_cast<long>(k) * k + 2L * k + 2); }

/// Masses of the ball-optimal design on F_0 (scaled cube vertices),
/// F_{k-1} (points +-e_i) and F_k (the origin).
struct BallSupportSets {
  int k;
  Rational mass_vertices;
  Rational mass_axes;
  Rational mass_center;

  explicit BallSupportSets(int k_) : k(k_) {
    if (k < 1) throw std::invalid_argument("BallSupportSets: k must be >= 1");
    const Rational dk = ball_denominator(k);
    mass_vertices = Rational(static_cast<long>(k) * k) / dk;
    mass_axes = Rational(k) / dk;
    mass_center = Rational(k + 2) / dk;
  }

  std::uint64_t vertex_count() const { return std::uint64_t{1} << k; }
  std::uint64_t axis_count() const { return 2 * static_cast<std::uint64_t>(k); }
};

/// Vertices of the cube scaled onto the unit sphere, coordinates +-1/sqrt(k).
/// Sign patterns with + before -.
inline std::vector<Point<QuadraticSurd>> ball_vertex_points(int k) {
  if (k < 1 || k > 30) throw std::invalid_argument("ball_vertex_points: k must lie in [1, 30]");
  const QuadraticSurd coord = QuadraticSurd::sqrt(frac(1, k));
  std::vector<Point<QuadraticSurd>> out;
  for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << k); ++signs) {
    Point<QuadraticSurd> x(k);
    for (int j = 0; j < k; ++j) x[j] = ((signs >> (k - 1 - j)) & 1U) ? -coord : coord;
    out.push_back(std::move(x));
  }
  return out;
}

inline std::vector<Point<QuadraticSurd>> ball_axis_points(int k) {
  std::vector<Point<QuadraticSurd>> out;
  for (int i = 0; i < k; ++i)
    for (long s : {1L, -1L}) {
      Point<QuadraticSurd> x(k, QuadraticSurd(0L));
      x[i] = QuadraticSurd(s);
      out.push_back(std::move(x));
    }
  return out;
}

/// The E-optimal design on the unit ball. For k = 1 the vertex and axis
/// sets coincide at +-1 and are merged.
inline Design<QuadraticSurd> optimal_ball_design(int k) {
  BallSupportSets sets(k);
  std::vector<Point<QuadraticSurd>> points;
  std::vector<QuadraticSurd> weights;
  const QuadraticSurd wv(sets.mass_vertices / Rational(Integer(sets.vertex_count())));
  for (auto& x : ball_vertex_points(k)) {
    points.push_back(std::move(x));
    weights.push_back(wv);
  }
  const QuadraticSurd wa(sets.mass_axes / Rational(Integer(sets.axis_count())));
  for (auto& x : ball_axis_points(k)) {
    points.push_back(std::move(x));
    weights.push_back(wa);
  }
  points.emplace_back(k, QuadraticSurd(0L));
  weights.emplace_back(sets.mass_center);
  return Design<QuadraticSurd>(k, Space::ball, std::move(points), std::move(weights));
}

/// a = (xi_F0 + xi_Fk1)/k, b = xi_F0/k^2, c = xi_F0/k^2 + xi_Fk1/k.
inline SymmetricMoments<Rational> ball_moments(int k, const Rational& mass_vertices,
                                               const Rational& mass_axes) {
  if (k < 1) throw std::invalid_argument("ball_moments: k must be >= 1");
  if (mass_vertices < 0 || mass_axes < 0 || mass_vertices + mass_axes > 1)
    throw std::invalid_argument("ball_moments: masses must be nonnegative with sum <= 1");
  const Rational kk(k);
  SymmetricMoments<Rational> mom;
  mom.a = (mass_vertices + mass_axes) / kk;
  mom.b = mass_vertices / (kk * kk);
  mom.c = mass_vertices / (kk * kk) + mass_axes / kk;
  return mom;
}

inline SymmetricMoments<Rational> optimal_ball_moments(int k) {
  BallSupportSets sets(k);
  return ball_moments(k, sets.mass_vertices, sets.mass_axes);
}

/// lambda_1 = (1 + a - sqrt((1-a)^2 + 4 k a^2)) / 2
template <Scalar T>
spectral_t<T> lambda1_ball(const T& a, int k) {
  using V = spectral_t<T>;
  if (sign_of(a) < 0 || a > T(1)) throw std::invalid_argument("lambda1_ball: a must lie in [0, 1]");
  const T one_minus = T(1) - a;
  const V root = spectral_sqrt(T(one_minus * one_minus + T(4 * k) * a * a));
  return V((V(T(1) + a) - root) * from_rational<V>(frac(1, 2)));
}

/// Exact moment triple from a surd-valued design (its moments are rational).
inline SymmetricMoments<Rational> to_rational_moments(const SymmetricMoments<QuadraticSurd>& m) {
  return {m.a.to_rational(), m.b.to_rational(), m.c.to_rational()};
}

// ---------------------------------------------------------------------------
// Dispersion function.

/// Parameters of the inverse of the upper (k+1)x(k+1) block: top-left
/// entry kappa, border q, diagonal d and off-diagonal e of the square block.
template <Scalar T>
struct DispersionCoefficients {
  T kappa{0};
  T q{0};
  T q0{0};
  T e{0};
  T d{0};
};

template <Scalar T>
DispersionCoefficients<T> dispersion_coefficients(const SymmetricMoments<T>& mom, int k) {
  if (k < 1) throw std::invalid_argument("dispersion_coefficients: k must be >= 1");
  const T b = k >= 2 ? mom.b : T(0);
  DispersionCoefficients<T> out;
  out.q0 = mom.c - b + (b - mom.a * mom.a) * T(k);
  const bool singular = sign_of(mom.a) <= 0 || sign_of(out.q0) == 0 ||
                        (k >= 2 && (sign_of(b) <= 0 || sign_of(T(mom.c - b)) == 0));
  if (singular)
    throw SingularMatrixError("dispersion_coefficients: singular moment matrix");
  out.kappa = (mom.c + T(k - 1) * b) / out.q0;
  out.q = -mom.a / out.q0;
  if (k >= 2) out.e = (mom.a * mom.a - b) / ((mom.c - b) * out.q0);
  out.d = T(1) / out.q0 - out.e * T(k - 1);
  return out;
}

/// U(x) = kappa + (1/a + 2q)|x|^2 + (1/(2b) + e)|x|^4 + (d - e - 1/(2b)) sum x_i^4.
/// For k = 1 there is no cross block and U = kappa + (1/a + 2q) x^2 + d x^4.
template <Scalar T>
T dispersion_closed_form(const SymmetricMoments<T>& mom, int k, std::span<const T> x) {
  if (static_cast<int>(x.size()) != k) throw std::invalid_argument("dispersion: dimension mismatch");
  const auto co = dispersion_coefficients(mom, k);
  T r2(0), quart(0);
  for (const T& v : x) {
    const T sq = v * v;
    r2 += sq;
    quart += sq * sq;
  }
  T u = co.kappa + (T(1) / mom.a + T(2) * co.q) * r2;
  if (k == 1) return u + co.d * quart;
  const T half_inv_b = T(1) / (T(2) * mom.b);
  return u + (half_inv_b + co.e) * r2 * r2 + (co.d - co.e - half_inv_b) * quart;
}

/// U(x) = f(x)^T M^{-1} f(x) by direct quadratic form.
template <Scalar T>
T dispersion_direct(const InfoMatrix<T>& M, std::span<const T> x) {
  const Matrix<T> inv = inverse(M.entries);
  const auto f = regression_vector<T>(M.spec, x);
  const auto y = multiply<T>(inv, std::span<const T>(f));
  return dot<T>(std::span<const T>(f), std::span<const T>(y));
}

/// A symmetric design is rotatable iff c = 3b.
template <Scalar T>
bool is_rotatable(const SymmetricMoments<T>& mom, double tol = 0.0) {
  return nearly_equal(mom.c, T(T(3) * mom.b), tol);
}

/// Moments of the uniform distribution on the sphere of squared radius r2:
/// a = r2/k, b = r2^2/(k(k+2)), c = 3 r2^2/(k(k+2)).
template <Scalar T>
SymmetricMoments<T> sphere_moments(int k, const T& r2) {
  if (k < 1) throw std::invalid_argument("sphere_moments: k must be >= 1");
  const T denom = T(static_cast<long>(k) * (k + 2));
  SymmetricMoments<T> mom;
  mom.a = r2 / T(k);
  mom.b = r2 * r2 / denom;
  mom.c = T(3) * mom.b;
  return mom;
}

// ---------------------------------------------------------------------------
// Rotatable benchmark (1 - alpha) delta_0 + alpha Uniform(sphere of radius r).

template <Scalar T>
struct RotatableOptimum {
  int k;
  T radius_sq;
  T alpha;
  SymmetricMoments<T> moments;
  spectral_t<T> lambda_min;
};

/// alpha for squared radius r2: k(k+1)(k+2)/((k+1) r2^2 + k(k+2)^2) when
/// r2 <= k+2, k(r2-1)/(r2(r2+k-1)) otherwise.
template <Scalar T>
T rotatable_alpha(int k, const T& r2) {
  if (k < 1) throw std::invalid_argument("rotatable_alpha: k must be >= 1");
  if (sign_of(r2) <= 0) throw std::invalid_argument("rotatable_alpha: radius must be positive");
  const T kk(k);
  if (!(r2 > T(k + 2)))
    return T(static_cast<long>(k) * (k + 1) * (k + 2)) /
           (T(k + 1) * r2 * r2 + T(static_cast<long>(k) * (k + 2) * (k + 2)));
  return kk * (r2 - T(1)) / (r2 * (r2 + T(k - 1)));
}

/// Second branch evaluated regardless of r2; used for continuity checks.
template <Scalar T>
T rotatable_alpha_outer(int k, const T& r2) {
  return T(k) * (r2 - T(1)) / (r2 * (r2 + T(k - 1)));
}
template <Scalar T>
T rotatable_alpha_inner(int k, const T& r2) {
  return T(static_cast<long>(k) * (k + 1) * (k + 2)) /
         (T(k + 1) * r2 * r2 + T(static_cast<long>(k) * (k + 2) * (k + 2)));
}

template <Scalar T>
SymmetricMoments<T> rotatable_moments(int k, const T& r2, const T& alpha) {
  SymmetricMoments<T> s = sphere_moments(k, r2);
  return {alpha * s.a, alpha * s.b, alpha * s.c};
}

template <Scalar T>
RotatableOptimum<T> rotatable_optimal(int k, const T& r2) {
  const T alpha = rotatable_alpha(k, r2);
  auto mom = rotatable_moments(k, r2, alpha);
  auto lmin = lambda_min_symmetric(mom, k).value;
  return {k, r2, alpha, mom, lmin};
}

struct RotatableGap {
  Rational lambda_rot;
  Rational lambda_opt;
  Rational ratio;
};

/// lambda_rot = (k+1)/(k^3+4k^2+5k+1) against lambda_opt = 1/(k^2+2k+2).
inline RotatableGap rotatable_gap(int k) {
  if (k < 1) throw std::invalid_argument("rotatable_gap: k must be >= 1");
  const long kk = k;
  RotatableGap g;
  g.lambda_rot = frac(kk + 1, kk * kk * kk + 4 * kk * kk + 5 * kk + 1);
  g.lambda_opt = Rational(1) / ball_denominator(k);
  g.ratio = g.lambda_rot / g.lambda_opt;
  return g;
}

/// Random orthogonal k x k matrix as a product of Givens rotations over all
/// coordinate pairs, with an optional reflection of the first axis.
inline Matrix<double> random_orthogonal(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  Matrix<double> O = Matrix<double>::identity(static_cast<std::size_t>(k));
  for (int rep = 0; rep < 2; ++rep)
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        const double t = angle(rng);
        const double c = std::cos(t), s = std::sin(t);
        for (int r = 0; r < k; ++r) {
          const double oi = O(r, i), oj = O(r, j);
          O(r, i) = c * oi - s * oj;
          O(r, j) = s * oi + c * oj;
        }
      }
  if (std::bernoulli_distribution(0.5)(rng))
    for (int r = 0; r < k; ++r) O(r, 0) = -O(r, 0);
  return O;
}

}  // namespace eoptd

#endif  // EOPTD_BALL_HPP
