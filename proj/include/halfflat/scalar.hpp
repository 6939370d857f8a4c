#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <gmpxx.h>

namespace halfflat {

using Rational = mpq_class;

/// Raised when an exact computation needs a value that is not rational
/// (for instance the square root of a non-square).
class NotExact : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a parametric coefficient is evaluated at a pole.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Value of a one-parameter function together with its first and second
/// derivative at a point. Arithmetic follows the chain rule truncated at
/// order two; a NaN slot marks a derivative that is no longer available
/// (differentiating a Jet shifts every slot down by one).
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: implicit from constant
  constexpr Jet(double value, double first, double second)
      : v(value), d1(first), d2(second) {}

  /// Seed for the independent variable at s.
  static constexpr Jet variable(double s) { return {s, 1.0, 0.0}; }

  Jet &operator+=(const Jet &o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  Jet &operator-=(const Jet &o) {
    v -= o.v;
    d1 -= o.d1;
    d2 -= o.d2;
    return *this;
  }
  Jet &operator*=(const Jet &o) {
    const double nd2 = v * o.d2 + 2.0 * d1 * o.d1 + d2 * o.v;
    const double nd1 = v * o.d1 + d1 * o.v;
    v *= o.v;
    d1 = nd1;
    d2 = nd2;
    return *this;
  }
  Jet &operator/=(const Jet &o);

  friend Jet operator+(Jet a, const Jet &b) { return a += b; }
  friend Jet operator-(Jet a, const Jet &b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet &b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet &b) { return a /= b; }
  friend Jet operator-(const Jet &a) { return {-a.v, -a.d1, -a.d2}; }

  friend bool operator==(const Jet &a, const Jet &b) {
    return a.v == b.v && a.d1 == b.d1 && a.d2 == b.d2;
  }
};

/// Applies a scalar function with known derivatives f, f', f'' at a.v.
inline Jet chain(const Jet &a, double f, double fp, double fpp) {
  return {f, fp * a.d1, fpp * a.d1 * a.d1 + fp * a.d2};
}

inline Jet reciprocal(const Jet &a) {
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

inline Jet &Jet::operator/=(const Jet &o) { return *this *= reciprocal(o); }

inline Jet sqrt(const Jet &a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet log(const Jet &a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

inline Jet exp(const Jet &a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

inline Jet pow(const Jet &a, int n) {
  if (n == 0) return Jet(1.0);
  const double p = std::pow(a.v, n);
  const double p1 = n * std::pow(a.v, n - 1);
  const double p2 = n * (n - 1) * std::pow(a.v, n - 2);
  return chain(a, p, p1, p2);
}

/// Derivative of the underlying function: slots shift down, the top slot
/// becomes unavailable.
inline Jet derivative(const Jet &a) {
  return {a.d1, a.d2, std::numeric_limits<double>::quiet_NaN()};
}

inline std::ostream &operator<<(std::ostream &os, const Jet &a) {
  return os << "(" << a.v << ", " << a.d1 << ", " << a.d2 << ")";
}

// ---------------------------------------------------------------------------
// Scalar traits. Every algorithm in the library is written against these
// free functions so that the same code runs exactly, in floating point, and
// on jets.

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char *name = "rational";
  static bool is_zero(const Rational &x, double) { return sgn(x) == 0; }
  static double magnitude(const Rational &x) { return std::fabs(x.get_d()); }
  static double to_double(const Rational &x) { return x.get_d(); }
  static Rational sqrt(const Rational &x) {
    if (sgn(x) < 0) throw NotExact("square root of a negative rational");
    mpz_class num = x.get_num(), den = x.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) ||
        !mpz_perfect_square_p(den.get_mpz_t()))
      throw NotExact("square root of " + x.get_str() + " is not rational");
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    Rational r(rn, rd);
    r.canonicalize();
    return r;
  }
  static std::string to_string(const Rational &x) { return x.get_str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char *name = "float";
  static bool is_zero(double x, double tol) { return std::fabs(x) <= tol; }
  static double magnitude(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static double sqrt(double x) { return std::sqrt(x); }
  static std::string to_string(double x);
};

template <>
struct ScalarTraits<Jet> {
  static constexpr bool exact = false;
  static constexpr const char *name = "parametric";
  static bool is_zero(const Jet &x, double tol) {
    auto small = [tol](double d) { return std::isnan(d) || std::fabs(d) <= tol; };
    return std::fabs(x.v) <= tol && small(x.d1) && small(x.d2);
  }
  static double magnitude(const Jet &x) { return std::fabs(x.v); }
  static double to_double(const Jet &x) { return x.v; }
  static Jet sqrt(const Jet &x) { return halfflat::sqrt(x); }
  static std::string to_string(const Jet &x);
};

template <class S>
bool is_zero(const S &x, double tol = 0.0) {
  return ScalarTraits<S>::is_zero(x, tol);
}
template <class S>
double magnitude(const S &x) {
  return ScalarTraits<S>::magnitude(x);
}
template <class S>
double to_double(const S &x) {
  return ScalarTraits<S>::to_double(x);
}
template <class S>
S sqrt_scalar(const S &x) {
  return ScalarTraits<S>::sqrt(x);
}
template <class S>
std::string scalar_string(const S &x) {
  return ScalarTraits<S>::to_string(x);
}

/// Sign of the value part (exact for rationals).
inline int sign_of(const Rational &x) { return sgn(x); }
inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline int sign_of(const Jet &x) { return (x.v > 0) - (x.v < 0); }

/// One-way promotion along rational -> float -> parametric.
template <class To>
To promote(const Rational &x) {
  if constexpr (std::is_same_v<To, Rational>) return x;
  else return To(x.get_d());
}
template <class To>
To promote(double x) {
  static_assert(!std::is_same_v<To, Rational>, "promotion is one-way");
  return To(x);
}
template <class To>
To promote(const Jet &x) {
  static_assert(std::is_same_v<To, Jet>, "promotion is one-way");
  return x;
}

/// Shortest round-trip style rendering with 17 significant digits.
std::string format_double(double x);

/// Default absolute tolerance for floating comparisons.
inline constexpr double kDefaultTol = 1e-9;

}  // namespace halfflat
