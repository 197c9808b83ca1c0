#include "real.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace pcy {

namespace {

// ε_n values live many binades below the stock exponent floor; widen the
// range once per thread (MPFR keeps it in thread-local state).
void ensure_exponent_range() {
  thread_local bool done = [] {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    return true;
  }();
  (void)done;
}

long clamp_bits(long bits) {
  if (bits < Real::min_bits) {
    throw Error(errc::bad_argument, "precision below 53 bits");
  }
  return bits;
}

}  // namespace

Real::Real(long bits) {
  ensure_exponent_range();
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_nan(v_);
}

Real::Real(double x, long bits) {
  ensure_exponent_range();
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_d(v_, x, MPFR_RNDN);
}

Real::Real(const Real& o) {
  ensure_exponent_range();
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  if (this != &o) mpfr_swap(v_, o.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::parse(const std::string& s, long bits) {
  Real r(bits);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw Error(errc::bad_argument, "unparsable number: " + s);
  }
  return r;
}

std::string Real::str(int digits) const {
  digits = std::max(2, digits);
  std::vector<char> buf(static_cast<size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
  return std::string(buf.data());
}

namespace {
long join_bits(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }
}  // namespace

Real operator+(const Real& a, const Real& b) {
  Real r(join_bits(a, b));
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(join_bits(a, b));
  mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(join_bits(a, b));
  mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r(join_bits(a, b));
  mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a) {
  Real r(a.bits());
  mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Real& Real::operator+=(const Real& b) { return *this = *this + b; }
Real& Real::operator-=(const Real& b) { return *this = *this - b; }
Real& Real::operator*=(const Real& b) { return *this = *this * b; }
Real& Real::operator/=(const Real& b) { return *this = *this / b; }

#define PCY_UNARY(name, fn)              \
  Real name(const Real& a) {             \
    Real r(a.bits());                    \
    fn(r.raw(), a.raw(), MPFR_RNDN);     \
    return r;                            \
  }

PCY_UNARY(abs, mpfr_abs)
PCY_UNARY(sqrt, mpfr_sqrt)
PCY_UNARY(log, mpfr_log)
PCY_UNARY(log1p, mpfr_log1p)
PCY_UNARY(exp, mpfr_exp)
PCY_UNARY(expm1, mpfr_expm1)
#undef PCY_UNARY

Real floor(const Real& a) {
  Real r(a.bits());
  mpfr_floor(r.raw(), a.raw());
  return r;
}

Real pow(const Real& base, const Real& exponent) {
  Real r(std::max(base.bits(), exponent.bits()));
  mpfr_pow(r.raw(), base.raw(), exponent.raw(), MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

std::string format_exp_neg(const Real& w, int digits) {
  digits = std::clamp(digits, 2, 200);
  if (w.is_nan()) return "nan";
  // exp(-w) = 10^(-x), x = w/ln(10); split x into integer decade and
  // fractional part computed at guard precision.
  long p = w.bits() + 64;
  Real ln10(p);
  mpfr_set_ui(ln10.raw(), 10, MPFR_RNDN);
  mpfr_log(ln10.raw(), ln10.raw(), MPFR_RNDN);
  Real wx(p);
  mpfr_set(wx.raw(), w.raw(), MPFR_RNDN);
  Real x = wx / ln10;
  Real e10 = floor(x);
  Real frac = x - e10;  // in [0,1)
  // mantissa = 10^(1-frac) in (1, 10]
  Real m(p);
  mpfr_set_ui(m.raw(), 10, MPFR_RNDN);
  Real onemf = Real(1.0, p) - frac;
  m = pow(m, onemf);
  long expo10 = mpfr_get_si(e10.raw(), MPFR_RNDN) + 1;

  std::vector<char> buf(static_cast<size_t>(digits) + 48);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rf", digits - 1, m.raw());
  std::string mant(buf.data());
  if (mant.rfind("10.", 0) == 0) {  // rounding carried past the decade
    mant = "1." + std::string(static_cast<size_t>(digits - 1), '0');
    expo10 -= 1;
  }
  char tail[32];
  std::snprintf(tail, sizeof(tail), "e%+ld", -expo10);
  return mant + tail;
}

int digits_for_neg_log(const Real& w, long bits) {
  double wd = std::abs(w.to_double());
  double lost = wd > 1.0 ? std::log10(wd) : 0.0;
  int d = static_cast<int>(std::floor(static_cast<double>(bits - 8) * 0.30102999566398) - lost);
  return std::clamp(d, 6, 64);
}

}  // namespace pcy
