#pragma once

#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcy {

/// Error raised by numerical routines throughout the library. `code` uses the
/// same values as the C API status enum so errors survive the boundary.
class Error : public std::runtime_error {
 public:
  Error(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

namespace errc {
// Kept in sync with pcy_status in include/polycycle.h.
inline constexpr int domain = 1;
inline constexpr int precision = 2;
inline constexpr int existence = 3;
inline constexpr int nontermination = 4;
inline constexpr int overflow = 5;
inline constexpr int no_bracket = 6;
inline constexpr int no_convergence = 7;
inline constexpr int not_saddle = 8;
inline constexpr int missing_crossing = 9;
inline constexpr int geometry = 10;
inline constexpr int bad_argument = 11;
inline constexpr int internal = 12;
}  // namespace errc

/// Arbitrary-precision real number backed by MPFR, with value semantics.
/// Every value carries its own mantissa width in bits; binary operations
/// round to the wider of the two operand precisions, so uniform-precision
/// expressions stay at that precision. Rounding is always to nearest.
class Real {
 public:
  static constexpr long min_bits = 53;
  static constexpr long default_bits = 256;

  Real() : Real(default_bits) {}
  explicit Real(long bits);
  Real(double x, long bits);
  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  ~Real();

  static Real parse(const std::string& s, long bits);

  long bits() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  /// Scientific-notation string with `digits` significant digits.
  std::string str(int digits = 17) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);
  Real& operator+=(const Real& b);
  Real& operator-=(const Real& b);
  Real& operator*=(const Real& b);
  Real& operator/=(const Real& b);

  friend Real operator+(const Real& a, double b) { return a + Real(b, a.bits()); }
  friend Real operator-(const Real& a, double b) { return a - Real(b, a.bits()); }
  friend Real operator*(const Real& a, double b) { return a * Real(b, a.bits()); }
  friend Real operator/(const Real& a, double b) { return a / Real(b, a.bits()); }
  friend Real operator+(double a, const Real& b) { return Real(a, b.bits()) + b; }
  friend Real operator-(double a, const Real& b) { return Real(a, b.bits()) - b; }
  friend Real operator*(double a, const Real& b) { return Real(a, b.bits()) * b; }
  friend Real operator/(double a, const Real& b) { return Real(a, b.bits()) / b; }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }
  friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
  friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
  friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
  friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }

 private:
  mpfr_t v_;
};

Real abs(const Real& a);
Real sqrt(const Real& a);
Real pow(const Real& base, const Real& exponent);
Real log(const Real& a);
Real log1p(const Real& a);
Real exp(const Real& a);
Real expm1(const Real& a);
Real floor(const Real& a);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

/// Formats x = exp(-w) in scientific notation without materializing x.
/// Works for arbitrarily large w (where exp(-w) underflows every binary
/// format); `digits` significant digits in the mantissa.
std::string format_exp_neg(const Real& w, int digits);

/// Significant digits actually carried by exp(-w) when w is held with
/// `bits` mantissa bits: the absolute error of w is the relative error of
/// exp(-w). Clamped to [6, 64].
int digits_for_neg_log(const Real& w, long bits);

}  // namespace pcy
