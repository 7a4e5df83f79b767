#ifndef EOPTD_MODEL_HPP
#define EOPTD_MODEL_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoptd/numeric.hpp"

namespace eoptd {

/// Second-order response surface model in k predictors with
/// m = (k+1)(k+2)/2 regression functions.
class ModelSpec {
 public:
  explicit ModelSpec(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("ModelSpec: k must be >= 1, got " + std::to_string(k));
    m_ = (k + 1) * (k + 2) / 2;
  }

  int k() const { return k_; }
  int m() const { return m_; }

  // Offsets of the blocks in the canonical ordering.
  std::size_t square_offset() const { return 1; }
  std::size_t linear_offset() const { return 1 + static_cast<std::size_t>(k_); }
  std::size_t cross_offset() const { return 1 + 2 * static_cast<std::size_t>(k_); }

  /// Position of x_i x_j (i < j) in the regression vector.
  std::size_t cross_index(int i, int j) const {
    if (i < 0 || j >= k_ || i >= j) throw std::invalid_argument("cross_index: need 0 <= i < j < k");
    // pairs (0,1),(0,2),...,(0,k-1),(1,2),...
    std::size_t before = static_cast<std::size_t>(i) * (2 * k_ - i - 1) / 2;
    return cross_offset() + before + static_cast<std::size_t>(j - i - 1);
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  int k_;
  int m_;
};

using MultiIndex = std::vector<int>;

/// Exponents of the regression functions: constant, pure squares, linear
/// terms, then cross terms x_i x_j in lexicographic (i, j) order.
inline std::vector<MultiIndex> monomial_exponents(const ModelSpec& spec) {
  const int k = spec.k();
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(spec.m()));
  out.emplace_back(k, 0);
  for (int i = 0; i < k; ++i) {
    MultiIndex a(k, 0);
    a[i] = 2;
    out.push_back(a);
  }
  for (int i = 0; i < k; ++i) {
    MultiIndex a(k, 0);
    a[i] = 1;
    out.push_back(a);
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      MultiIndex a(k, 0);
      a[i] = 1;
      a[j] = 1;
      out.push_back(a);
    }
  return out;
}

/// Writes f(x) into `out` (length m) without allocating.
template <Scalar T>
void regression_vector_into(const ModelSpec& spec, std::span<const T> x, std::span<T> out) {
  const int k = spec.k();
  if (static_cast<int>(x.size()) != k)
    throw std::invalid_argument("regression_vector: point has dimension " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(k));
  if (static_cast<int>(out.size()) != spec.m())
    throw std::invalid_argument("regression_vector: output has wrong length");
  std::size_t pos = 0;
  out[pos++] = T(1);
  for (int i = 0; i < k; ++i) out[pos++] = x[i] * x[i];
  for (int i = 0; i < k; ++i) out[pos++] = x[i];
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) out[pos++] = x[i] * x[j];
}

template <Scalar T>
std::vector<T> regression_vector(const ModelSpec& spec, std::span<const T> x) {
  std::vector<T> out(static_cast<std::size_t>(spec.m()), T(0));
  regression_vector_into<T>(spec, x, out);
  return out;
}

template <Scalar T>
std::vector<T> regression_vector(const ModelSpec& spec, const std::vector<T>& x) {
  return regression_vector<T>(spec, std::span<const T>(x));
}

}  // namespace eoptd

#endif  // EOPTD_MODEL_HPP
