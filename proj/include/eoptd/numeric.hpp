#ifndef EOPTD_NUMERIC_HPP
#define EOPTD_NUMERIC_HPP

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eoptd {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;

inline Rational frac(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("frac: zero denominator");
  return Rational(Integer(num), Integer(den));
}

inline Integer numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}
inline Integer denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

/// Canonical text form: "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "p/q", "p", or a plain decimal such as "-0.125" exactly.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&]() {
    return std::invalid_argument("not a rational number: '" +
                                 std::string(text) + "'");
  };
  auto parse_int = [&](std::string_view s) -> Integer {
    if (s.empty()) throw bad();
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw bad();
    for (std::size_t j = i; j < s.size(); ++j)
      if (s[j] < '0' || s[j] > '9') throw bad();
    std::string digits(s.substr(s[0] == '+' ? 1 : 0));
    return Integer(digits);
  };
  if (text.empty()) throw bad();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_int(text.substr(0, slash));
    Integer den = parse_int(text.substr(slash + 1));
    if (den == 0) throw bad();
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view fraction = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    std::string_view whole_digits =
        (!whole.empty() && (whole[0] == '-' || whole[0] == '+'))
            ? whole.substr(1)
            : whole;
    if (whole_digits.empty() && fraction.empty()) throw bad();
    Integer w = whole_digits.empty() ? Integer(0) : parse_int(whole_digits);
    Integer f = fraction.empty() ? Integer(0) : parse_int(fraction);
    if (!fraction.empty() && (fraction[0] == '-' || fraction[0] == '+'))
      throw bad();
    Integer scale = boost::multiprecision::pow(Integer(10),
                                               static_cast<unsigned>(fraction.size()));
    Rational value = Rational(w) + Rational(f, scale);
    return negative ? Rational(-value) : value;
  }
  return Rational(parse_int(text));
}

/// Exact square root of a nonnegative rational, when it is itself rational.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  Integer num = numerator_of(r);
  Integer den = denominator_of(r);
  Integer sn = boost::multiprecision::sqrt(num);
  Integer sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

/// Element of Q(sqrt(d)): rational + coeff * sqrt(radicand).
///
/// The radicand is kept as a positive integer with small square factors
/// pulled out; a perfect-square radicand collapses into the rational part.
/// Binary arithmetic between two irrational values requires equal radicands.
class QuadraticSurd {
 public:
  QuadraticSurd() = default;
  QuadraticSurd(long value) : rational_(value) {}  // NOLINT
  QuadraticSurd(const Rational& value) : rational_(value) {}  // NOLINT
  QuadraticSurd(const Rational& rational, const Rational& coeff,
                const Rational& radicand)
      : rational_(rational), coeff_(coeff) {
    if (radicand < 0)
      throw std::domain_error("QuadraticSurd: negative radicand");
    set_radicand(radicand);
  }

  static QuadraticSurd sqrt(const Rational& radicand) {
    return QuadraticSurd(Rational(0), Rational(1), radicand);
  }

  const Rational& rational_part() const { return rational_; }
  const Rational& irrational_part() const { return coeff_; }
  const Integer& radicand() const { return radicand_; }
  bool is_rational() const { return coeff_ == 0; }

  Rational to_rational() const {
    if (!is_rational())
      throw std::domain_error("QuadraticSurd: value " + str() +
                              " is irrational");
    return rational_;
  }

  double to_double() const {
    double v = rational_.convert_to<double>();
    if (!is_rational())
      v += coeff_.convert_to<double>() *
           std::sqrt(radicand_.convert_to<double>());
    return v;
  }

  int sign() const {
    int s_rat = rational_.sign();
    int s_irr = coeff_.sign();
    if (s_irr == 0) return s_rat;
    if (s_rat == 0 || s_rat == s_irr) return s_irr;
    Rational lhs = rational_ * rational_;
    Rational rhs = coeff_ * coeff_ * Rational(radicand_);
    if (lhs == rhs) return 0;
    return lhs > rhs ? s_rat : s_irr;
  }

  std::string str() const {
    if (is_rational()) return to_string(rational_);
    std::string out;
    if (rational_ != 0) out = to_string(rational_) + (coeff_ > 0 ? "+" : "");
    if (coeff_ == -1)
      out += "-";
    else if (coeff_ != 1)
      out += to_string(coeff_) + "*";
    return out + "sqrt(" + radicand_.str() + ")";
  }

  QuadraticSurd operator-() const {
    QuadraticSurd r = *this;
    r.rational_ = -r.rational_;
    r.coeff_ = -r.coeff_;
    return r;
  }

  QuadraticSurd& operator+=(const QuadraticSurd& o) {
    adopt_radicand(o);
    rational_ += o.rational_;
    coeff_ += o.coeff_;
    if (coeff_ == 0) radicand_ = 0;
    return *this;
  }
  QuadraticSurd& operator-=(const QuadraticSurd& o) { return *this += -o; }
  QuadraticSurd& operator*=(const QuadraticSurd& o) {
    adopt_radicand(o);
    Rational r = rational_ * o.rational_ + coeff_ * o.coeff_ * Rational(radicand_);
    Rational c = rational_ * o.coeff_ + coeff_ * o.rational_;
    rational_ = r;
    coeff_ = c;
    if (coeff_ == 0) radicand_ = 0;
    return *this;
  }
  QuadraticSurd& operator/=(const QuadraticSurd& o) {
    // 1/(p + q sqrt d) = (p - q sqrt d) / (p^2 - q^2 d)
    Rational norm = o.rational_ * o.rational_ -
                    o.coeff_ * o.coeff_ * Rational(o.radicand_);
    if (norm == 0) throw std::domain_error("QuadraticSurd: division by zero");
    QuadraticSurd conj = o;
    conj.coeff_ = -conj.coeff_;
    *this *= conj;
    rational_ /= norm;
    coeff_ /= norm;
    return *this;
  }

  friend QuadraticSurd operator+(QuadraticSurd a, const QuadraticSurd& b) { return a += b; }
  friend QuadraticSurd operator-(QuadraticSurd a, const QuadraticSurd& b) { return a -= b; }
  friend QuadraticSurd operator*(QuadraticSurd a, const QuadraticSurd& b) { return a *= b; }
  friend QuadraticSurd operator/(QuadraticSurd a, const QuadraticSurd& b) { return a /= b; }

  friend bool operator==(const QuadraticSurd& a, const QuadraticSurd& b) {
    return a.rational_ == b.rational_ && a.coeff_ == b.coeff_ &&
           (a.coeff_ == 0 || a.radicand_ == b.radicand_);
  }
  friend std::strong_ordering operator<=>(const QuadraticSurd& a,
                                          const QuadraticSurd& b) {
    int s = compare(a, b);
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const QuadraticSurd& v) {
    return os << v.str();
  }

 private:
  // sign(a - b), also valid when the two radicands differ.
  static int compare(const QuadraticSurd& a, const QuadraticSurd& b) {
    if (a.is_rational() || b.is_rational() || a.radicand_ == b.radicand_)
      return (a - b).sign();
    // u + A - B with A = qa sqrt(da), B = qb sqrt(db)
    Rational u = a.rational_ - b.rational_;
    Rational a2 = a.coeff_ * a.coeff_ * Rational(a.radicand_);
    Rational b2 = b.coeff_ * b.coeff_ * Rational(b.radicand_);
    int sa = a.coeff_.sign();
    int sb = b.coeff_.sign();
    int s_diff;  // sign(A - B)
    if (sa != sb)
      s_diff = sa - sb > 0 ? 1 : -1;
    else
      s_diff = a2 == b2 ? 0 : (a2 > b2 ? sa : -sa);
    int su = u.sign();
    if (s_diff == 0) return su;
    if (su == 0 || su == s_diff) return s_diff;
    // compare u^2 against (A - B)^2 = a2 + b2 - 2 qa qb sqrt(da db)
    QuadraticSurd rest(u * u - a2 - b2, 2 * a.coeff_ * b.coeff_,
                       Rational(a.radicand_ * b.radicand_));
    int s = rest.sign();
    if (s == 0) return 0;
    return s > 0 ? su : s_diff;
  }

  void adopt_radicand(const QuadraticSurd& o) {
    if (o.coeff_ == 0) return;
    if (coeff_ == 0) {
      radicand_ = o.radicand_;
      return;
    }
    if (radicand_ != o.radicand_)
      throw std::domain_error("QuadraticSurd: incompatible radicands sqrt(" +
                              radicand_.str() + ") and sqrt(" +
                              o.radicand_.str() + ")");
  }

  void set_radicand(const Rational& r) {
    if (r == 0 || coeff_ == 0) {
      coeff_ = 0;
      radicand_ = 0;
      return;
    }
    // sqrt(p/q) = sqrt(p q) / q
    Integer den = denominator_of(r);
    Integer n = numerator_of(r) * den;
    coeff_ /= Rational(den);
    for (long f = 2; f <= 1000; ++f) {
      Integer sq = Integer(f * f);
      if (sq > n) break;
      while (n % sq == 0) {
        n /= sq;
        coeff_ *= f;
      }
    }
    Integer root = boost::multiprecision::sqrt(n);
    if (root * root == n) {
      rational_ += coeff_ * Rational(root);
      coeff_ = 0;
      radicand_ = 0;
      return;
    }
    radicand_ = n;
  }

  Rational rational_{0};
  Rational coeff_{0};
  Integer radicand_{0};
};

// ---------------------------------------------------------------------------
// Scalar abstraction shared by the exact and floating evaluation paths.

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double to_double(double v) { return v; }
  static int sign(double v) { return (v > 0) - (v < 0); }
  static double from_rational(const Rational& r) { return r.convert_to<double>(); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static int sign(const Rational& v) { return v.sign(); }
  static Rational from_rational(const Rational& r) { return r; }
};

template <>
struct scalar_traits<QuadraticSurd> {
  static constexpr bool exact = true;
  static double to_double(const QuadraticSurd& v) { return v.to_double(); }
  static int sign(const QuadraticSurd& v) { return v.sign(); }
  static QuadraticSurd from_rational(const Rational& r) { return QuadraticSurd(r); }
};

template <class T>
concept Scalar = requires(const T& a, const T& b) {
  { scalar_traits<T>::exact } -> std::convertible_to<bool>;
  { a + b } -> std::convertible_to<T>;
  { a * b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
};

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

template <Scalar T>
double to_double(const T& v) {
  return scalar_traits<T>::to_double(v);
}

template <Scalar T>
int sign_of(const T& v) {
  return scalar_traits<T>::sign(v);
}

template <Scalar T>
T from_rational(const Rational& r) {
  return scalar_traits<T>::from_rational(r);
}

template <Scalar T>
T abs_value(const T& v) {
  return sign_of(v) < 0 ? T(-v) : v;
}

/// Equality under the scalar's own notion: exact types ignore tol.
template <Scalar T>
bool nearly_equal(const T& a, const T& b, double tol) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol;
  }
}

/// Value type able to hold sqrt of a scalar's values exactly when possible.
template <class T>
struct spectral {
  using type = double;
};
template <>
struct spectral<Rational> {
  using type = QuadraticSurd;
};
template <>
struct spectral<QuadraticSurd> {
  using type = QuadraticSurd;
};
template <class T>
using spectral_t = typename spectral<T>::type;

template <Scalar T>
spectral_t<T> spectral_sqrt(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return std::sqrt(v);
  } else if constexpr (std::is_same_v<T, Rational>) {
    return QuadraticSurd::sqrt(v);
  } else {
    return QuadraticSurd::sqrt(v.to_rational());
  }
}

inline std::string to_string(const QuadraticSurd& v) { return v.str(); }
inline std::string to_string(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace eoptd

#endif  // EOPTD_NUMERIC_HPP
