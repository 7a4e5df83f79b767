#ifndef EOPTD_SPECTRUM_HPP
#define EOPTD_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eoptd/design.hpp"
#include "eoptd/matrix.hpp"
#include "eoptd/numeric.hpp"

namespace eoptd {

template <class V>
struct Eigenvalue {
  V value;
  int multiplicity;
};

/// Eigenvalues with multiplicities, ascending.
template <class V>
struct Spectrum {
  std::vector<Eigenvalue<V>> eigenvalues;

  int total_multiplicity() const {
    int s = 0;
    for (const auto& e : eigenvalues) s += e.multiplicity;
    return s;
  }
  const Eigenvalue<V>& min() const { return eigenvalues.front(); }
  const Eigenvalue<V>& max() const { return eigenvalues.back(); }
};

/// Tolerance for merging floating eigenvalues into one multiplicity class.
inline constexpr double kFloatMergeTol = 1e-10;

/// Closed-form spectrum of the structured matrix of a symmetric design:
///   (1 + c + (k-1)b +- sqrt(D))/2 once each, c-b (k-1 times), a (k times),
///   b (k(k-1)/2 times), with D = [1 - c - (k-1)b]^2 + 4 k a^2.
/// Rational moments give exact values of the form u + v sqrt(D).
template <Scalar T>
Spectrum<spectral_t<T>> symmetric_spectrum(const SymmetricMoments<T>& mom, int k) {
  using V = spectral_t<T>;
  if (k < 1) throw std::invalid_argument("symmetric_spectrum: k must be >= 1");
  const T b = k >= 2 ? mom.b : T(0);
  const T trace_part = T(1) + mom.c + T(k - 1) * b;
  const T gap = T(1) - mom.c - T(k - 1) * b;
  const T disc = gap * gap + T(4 * k) * mom.a * mom.a;
  const V root = spectral_sqrt(disc);
  const V half = from_rational<V>(frac(1, 2));

  std::vector<Eigenvalue<V>> raw = {
      {V((V(trace_part) + root) * half), 1},
      {V((V(trace_part) - root) * half), 1},
      {V(mom.c - b), k - 1},
      {V(mom.a), k},
      {V(b), k * (k - 1) / 2},
  };
  std::erase_if(raw, [](const auto& e) { return e.multiplicity == 0; });
  std::sort(raw.begin(), raw.end(),
            [](const auto& x, const auto& y) { return x.value < y.value; });

  Spectrum<V> out;
  for (const auto& e : raw) {
    if (!out.eigenvalues.empty() &&
        nearly_equal(out.eigenvalues.back().value, e.value, kFloatMergeTol)) {
      out.eigenvalues.back().multiplicity += e.multiplicity;
    } else {
      out.eigenvalues.push_back(e);
    }
  }
  return out;
}

template <Scalar T>
Eigenvalue<spectral_t<T>> lambda_min_symmetric(const SymmetricMoments<T>& mom, int k) {
  return symmetric_spectrum(mom, k).min();
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver.

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix<double> vectors;      // column j belongs to values[j]
  int sweeps = 0;
};

/// Row-cyclic Jacobi diagonalization of a symmetric matrix. Stops once the
/// off-diagonal Frobenius norm drops below tol * ||M||_F; at most 100 sweeps.
inline EigenDecomposition eigen_sym(const Matrix<double>& input, double tol = 1e-14) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("eigen_sym: matrix not square");
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(input(i, j) - input(j, i)));
  if (asym > 1e-12)
    throw std::invalid_argument("eigen_sym: matrix is not symmetric (max asymmetry " +
                                to_string(asym) + ")");

  Matrix<double> a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  Matrix<double> v = Matrix<double>::identity(n);
  const double norm = frobenius_norm(a);
  const double threshold = tol * norm;

  auto off_norm = [&]() {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  EigenDecomposition out;
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (off_norm() > threshold) {
    if (sweep == kMaxSweeps)
      throw std::runtime_error("eigen_sym: no convergence after 100 sweeps");
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Entries negligible against both diagonals are dropped outright.
        if (sweep > 3 && std::abs(app) + 100 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 100 * std::abs(apq) == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  out.sweeps = sweep;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  out.values.resize(n);
  out.vectors = Matrix<double>(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = v(r, order[j]);
  }
  return out;
}

/// Groups Jacobi eigenvalues into a spectrum (values within `merge_tol`
/// of the class's first value are merged).
inline Spectrum<double> numeric_spectrum(const Matrix<double>& M, double merge_tol = kFloatMergeTol) {
  EigenDecomposition eig = eigen_sym(M);
  Spectrum<double> out;
  for (double v : eig.values) {
    if (!out.eigenvalues.empty() && std::abs(v - out.eigenvalues.back().value) <= merge_tol)
      ++out.eigenvalues.back().multiplicity;
    else
      out.eigenvalues.push_back({v, 1});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kiefer's Phi_p family.

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

/// Phi_p(M) = (m^{-1} sum lambda_i^p)^{1/p} for p in [-inf, 1]; p = -inf gives
/// lambda_min and p = 0 the geometric mean (det M)^{1/m}.
inline double phi_p(const Matrix<double>& M, double p) {
  if (std::isnan(p) || p > 1.0) throw std::invalid_argument("phi_p: p must lie in [-inf, 1]");
  EigenDecomposition eig = eigen_sym(M);
  const double m = static_cast<double>(eig.values.size());
  const double scale = std::max(1.0, std::abs(eig.values.back()));
  const double lmin = eig.values.front();
  const bool singular = lmin <= 1e-13 * scale;
  if (p == kMinusInfinity) return lmin;
  if (p < 0 && singular)
    throw SingularMatrixError("phi_p: singular information matrix for p = " + to_string(p));
  if (p == 0.0) {
    if (singular) return 0.0;
    double log_sum = 0;
    for (double v : eig.values) log_sum += std::log(v);
    return std::exp(log_sum / m);
  }
  double s = 0;
  for (double v : eig.values) s += std::pow(std::max(v, 0.0), p);
  return std::pow(s / m, 1.0 / p);
}

template <Scalar T>
double phi_p(const InfoMatrix<T>& M, double p) {
  return phi_p(to_double_matrix(M.entries), p);
}

}  // namespace eoptd

#endif  // EOPTD_SPECTRUM_HPP
