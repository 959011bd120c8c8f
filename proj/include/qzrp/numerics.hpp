#pragma once

// Scalar backends and truncated power-series arithmetic.
//
// Every contour integral around the origin in this project is realized as a
// coefficient read from a TruncSeries. Two scalar backends are supported:
// exact rationals (GMP) and arbitrary-precision floats (MPFR). `double` is
// also accepted where machine precision is enough (simulation, quadrature,
// quick saddle-point work).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "qzrp/errors.hpp"

namespace qzrp {

using Rational = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 256;

/// Number of decimal digits MPFR needs to hold at least `bits` mantissa bits.
inline unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120));
}

inline unsigned current_precision_bits() {
  return static_cast<unsigned>(Real::default_precision() * 3.3219280948873623);
}

/// Sets the MPFR working precision for the lifetime of the scope.
///
/// Boost keeps the default precision in process-global state, so float-backend
/// work at different precisions must not overlap in time.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits)
      : saved_digits10_(Real::default_precision()), bits_(bits) {
    if (bits < 16) throw DomainError("precision must be at least 16 bits");
    Real::default_precision(digits10_for_bits(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_digits10_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

  unsigned bits() const { return bits_; }

 private:
  unsigned saved_digits10_;
  unsigned bits_;
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view name = "rational";
  static Rational from_ratio(long long num, long long den) { return Rational(num, den); }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static long double to_long_double(const Rational& x) { return x.convert_to<long double>(); }
  static std::string to_string(const Rational& x) { return x.str(); }
  static Rational tolerance() { return Rational(0); }
};

template <>
struct ScalarTraits<Real> {
  static constexpr bool exact = false;
  static constexpr std::string_view name = "float";
  static Real from_ratio(long long num, long long den) { return Real(num) / Real(den); }
  static double to_double(const Real& x) { return x.convert_to<double>(); }
  static long double to_long_double(const Real& x) { return x.convert_to<long double>(); }
  static std::string to_string(const Real& x) {
    return x.str(30, std::ios_base::scientific);
  }
  // Relative size below which an identity that vanishes exactly in rational
  // arithmetic counts as zero: three quarters of the working mantissa.
  static Real tolerance() {
    return boost::multiprecision::pow(Real(2), -static_cast<int>(current_precision_bits() * 3 / 4));
  }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view name = "double";
  static double from_ratio(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double x) { return x; }
  static long double to_long_double(double x) { return x; }
  static std::string to_string(double x);
  static double tolerance() { return 1e-10; }
};

template <class S>
S abs_value(const S& x) {
  return x < 0 ? S(-x) : x;
}

/// base^e by binary exponentiation; negative e inverts.
template <class S>
S pow_int(const S& base, long long e) {
  if (e < 0) return S(1) / pow_int(base, -e);
  S result(1);
  S b = base;
  while (e > 0) {
    if (e & 1) result *= b;
    e >>= 1;
    if (e > 0) b *= b;
  }
  return result;
}

/// True if `x` vanishes: exactly on exact backends, or relative to `scale`
/// within the backend tolerance on float backends.
template <class S>
bool negligible(const S& x, const S& scale) {
  if constexpr (ScalarTraits<S>::exact) {
    return x == 0;
  } else {
    return abs_value(x) <= ScalarTraits<S>::tolerance() * abs_value(scale);
  }
}

// ---------------------------------------------------------------------------
// q parameter

enum class Regime { below_one, above_one, unity };

inline std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::below_one: return "minus_one_to_one";
    case Regime::above_one: return "greater_one";
    case Regime::unity: return "unity";
  }
  return "";
}

/// Deformation parameter q > -1 with its regime and geometric ratio r.
///
/// r = q for |q| < 1 and r = 1/q for q > 1, so |r| < 1 off the unity regime.
template <class S>
struct QValue {
  S q;
  Regime regime;
  S r;

  static QValue make(const S& q) {
    if (!(q > -1)) throw DomainError("q must satisfy q > -1");
    if (q == 1) return QValue{q, Regime::unity, S(1)};
    if (q < 1) return QValue{q, Regime::below_one, q};
    return QValue{q, Regime::above_one, S(1) / q};
  }

  bool is_unity() const { return regime == Regime::unity; }
};

// ---------------------------------------------------------------------------
// Truncated power series

/// Coefficients c_0..c_D of a formal power series truncated at degree D.
template <class S>
class TruncSeries {
 public:
  explicit TruncSeries(std::size_t degree) : c_(degree + 1, S(0)) {}
  explicit TruncSeries(std::vector<S> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw DomainError("a truncated series needs at least one coefficient");
  }

  static TruncSeries one(std::size_t degree) {
    TruncSeries s(degree);
    s.c_[0] = S(1);
    return s;
  }

  std::size_t degree() const { return c_.size() - 1; }
  const S& operator[](std::size_t k) const { return c_[k]; }
  std::span<const S> coeffs() const { return c_; }

 private:
  std::vector<S> c_;
};

namespace detail {
template <class S>
void require_same_degree(const TruncSeries<S>& a, const TruncSeries<S>& b) {
  if (a.degree() != b.degree()) throw DomainError("truncated series degree mismatch");
}
}  // namespace detail

template <class S>
TruncSeries<S> series_add(const TruncSeries<S>& a, const TruncSeries<S>& b) {
  detail::require_same_degree(a, b);
  std::vector<S> c(a.degree() + 1);
  for (std::size_t k = 0; k <= a.degree(); ++k) c[k] = a[k] + b[k];
  return TruncSeries<S>(std::move(c));
}

/// Cauchy product truncated at the common degree.
template <class S>
TruncSeries<S> series_mul(const TruncSeries<S>& a, const TruncSeries<S>& b) {
  detail::require_same_degree(a, b);
  const std::size_t d = a.degree();
  std::vector<S> c(d + 1, S(0));
  for (std::size_t i = 0; i <= d; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j <= d; ++j) c[i + j] += a[i] * b[j];
  }
  return TruncSeries<S>(std::move(c));
}

template <class S>
TruncSeries<S> series_pow(const TruncSeries<S>& a, long long n) {
  if (n < 0) throw DomainError("series_pow needs a nonnegative exponent");
  TruncSeries<S> result = TruncSeries<S>::one(a.degree());
  TruncSeries<S> base = a;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      result = first ? base : series_mul(result, base);
      first = false;
    }
    n >>= 1;
    if (n > 0) base = series_mul(base, base);
  }
  return result;
}

template <class S>
const S& series_coeff(const TruncSeries<S>& a, std::size_t k) {
  if (k > a.degree()) throw std::out_of_range("series coefficient index beyond truncation degree");
  return a[k];
}

/// Substitution z -> c z: coefficient k is multiplied by c^k.
template <class S>
TruncSeries<S> series_scale_arg(const TruncSeries<S>& a, const S& c) {
  std::vector<S> out(a.degree() + 1);
  S ck(1);
  for (std::size_t k = 0; k <= a.degree(); ++k) {
    out[k] = a[k] * ck;
    ck *= c;
  }
  return TruncSeries<S>(std::move(out));
}

/// Closed form of sum_{i>=1} r^{i a} = r^a / (1 - r^a) for |r| < 1, a >= 1.
template <class S>
S geometric_factor(const S& r, int a) {
  if (a < 1) throw DomainError("geometric_factor: exponent must be >= 1 (a = 0 diverges)");
  if (!(abs_value(r) < 1)) throw DomainError("geometric_factor: |r| must be < 1");
  const S ra = pow_int(r, a);
  return ra / (S(1) - ra);
}

// ---------------------------------------------------------------------------
// Precision acceptance for the float backend

struct NamedValue {
  std::string name;
  Real value;
  Real scale = Real(0);  // size of the terms `value` is built from; 0: |value|
};

struct PrecisionReport {
  unsigned bits = 0;
  unsigned check_bits = 0;
  double max_rel_diff = 0.0;
  std::string worst;
};

/// Relative disagreement of two values, with an absolute floor of 2^-(bits-8)
/// so that quantities which are zero up to roundoff do not dominate. A
/// nonzero `scale` replaces |a|, |b| as the reference magnitude, for values
/// that arise from cancellation.
double relative_gap(const Real& a, const Real& b, unsigned bits, const Real& scale = Real(0));

/// Runs `compute` at `bits` and again at `2 * bits`; every named value must
/// agree to `rel_tol`. Returns the `bits`-precision values and the report.
/// Throws PrecisionError on disagreement.
std::pair<std::vector<NamedValue>, PrecisionReport> compute_verified(
    unsigned bits, double rel_tol, const std::function<std::vector<NamedValue>()>& compute);

}  // namespace qzrp
