#pragma once

#include <cstdio>
#include <mpfr.h>

#include <algorithm>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hyperexp/scalar.hpp"

namespace hyperexp {

/// RAII wrapper around mpfr_t.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 128) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string str(int digits = 10) const {
    char buf[256];
    mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, v_);
    return buf;
  }

 private:
  mpfr_t v_;
};

/// Non-negative magnitude bound; every operation rounds upward.
class Mag {
 public:
  static constexpr mpfr_prec_t kPrec = 64;
  Mag() : v_(kPrec) {}
  explicit Mag(double d) : v_(kPrec) { mpfr_set_d(v_.get(), d, MPFR_RNDU); }
  static Mag inf() {
    Mag m;
    mpfr_set_inf(m.v_.get(), 1);
    return m;
  }
  /// 2^e
  static Mag pow2(long e) {
    Mag m;
    mpfr_set_ui_2exp(m.v_.get(), 1, e, MPFR_RNDU);
    return m;
  }
  static Mag from_mpfr_up(mpfr_srcptr x) {
    Mag m;
    mpfr_abs(m.v_.get(), x, MPFR_RNDU);
    return m;
  }

  bool is_zero() const { return mpfr_zero_p(v_.get()); }
  bool is_finite() const { return mpfr_number_p(v_.get()); }
  double to_double() const { return mpfr_get_d(v_.get(), MPFR_RNDU); }
  mpfr_srcptr get() const { return v_.get(); }
  mpfr_ptr get() { return v_.get(); }

  friend Mag operator+(const Mag& a, const Mag& b) {
    Mag m;
    mpfr_add(m.v_.get(), a.v_.get(), b.v_.get(), MPFR_RNDU);
    return m;
  }
  friend Mag operator*(const Mag& a, const Mag& b) {
    Mag m;
    mpfr_mul(m.v_.get(), a.v_.get(), b.v_.get(), MPFR_RNDU);
    return m;
  }
  /// a / b rounded up; b is a lower bound of the divisor.
  friend Mag operator/(const Mag& a, const Mag& b) {
    Mag m;
    mpfr_div(m.v_.get(), a.v_.get(), b.v_.get(), MPFR_RNDU);
    return m;
  }
  Mag& operator+=(const Mag& o) { return *this = *this + o; }
  Mag mul_2si(long e) const {
    Mag m;
    mpfr_mul_2si(m.v_.get(), v_.get(), e, MPFR_RNDU);
    return m;
  }
  friend bool operator<(const Mag& a, const Mag& b) { return mpfr_less_p(a.v_.get(), b.v_.get()); }
  friend bool operator<=(const Mag& a, const Mag& b) {
    return mpfr_lessequal_p(a.v_.get(), b.v_.get());
  }
  friend Mag max(const Mag& a, const Mag& b) { return a < b ? b : a; }

  /// e^x - 1, rounded up.
  Mag expm1() const {
    Mag m;
    mpfr_expm1(m.v_.get(), v_.get(), MPFR_RNDU);
    return m;
  }
  Mag pow_ui(unsigned long e) const {
    Mag m;
    mpfr_pow_ui(m.v_.get(), v_.get(), e, MPFR_RNDU);
    return m;
  }
  Mag root(unsigned long k) const {
    Mag m;
    mpfr_rootn_ui(m.v_.get(), v_.get(), k, MPFR_RNDU);
    return m;
  }
  /// Lower bound of (a - b), clamped at 0.
  static Mag sub_down(const Mag& a, const Mag& b) {
    Mag m;
    mpfr_sub(m.v_.get(), a.v_.get(), b.v_.get(), MPFR_RNDD);
    if (mpfr_sgn(m.v_.get()) < 0) mpfr_set_zero(m.v_.get(), 1);
    return m;
  }

 private:
  Real v_;
};

/// Midpoint-radius complex ball.
class ComplexBall {
 public:
  explicit ComplexBall(mpfr_prec_t prec = 128) : re_(prec), im_(prec) {}

  static ComplexBall exact(const Scalar& s, mpfr_prec_t prec) {
    ComplexBall b(prec);
    int t1 = mpfr_set_q(b.re_.get(), s.re().get_mpq_t(), MPFR_RNDN);
    int t2 = mpfr_set_q(b.im_.get(), s.im().get_mpq_t(), MPFR_RNDN);
    if (t1 != 0 || t2 != 0) b.rad_ = b.mid_abs_up().mul_2si(1 - prec);
    return b;
  }
  static ComplexBall from_si(long v, mpfr_prec_t prec) { return exact(Scalar(v), prec); }
  static ComplexBall from_complex(std::complex<double> z, mpfr_prec_t prec) {
    ComplexBall b(prec);
    mpfr_set_d(b.re_.get(), z.real(), MPFR_RNDN);
    mpfr_set_d(b.im_.get(), z.imag(), MPFR_RNDN);
    return b;
  }

  mpfr_prec_t prec() const { return re_.prec(); }
  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  const Mag& rad() const { return rad_; }
  void add_error(const Mag& e) { rad_ += e; }
  void set_rad(const Mag& m) { rad_ = m; }
  bool is_finite() const {
    return rad_.is_finite() && mpfr_number_p(re_.get()) && mpfr_number_p(im_.get());
  }

  Mag mid_abs_up() const {
    Mag m;
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDU);
    return m;
  }
  Mag mid_abs_down() const {
    Mag m;
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDD);
    return m;
  }
  Mag abs_up() const { return mid_abs_up() + rad_; }
  Mag abs_down() const { return Mag::sub_down(mid_abs_down(), rad_); }
  bool contains_zero() const { return !(rad_ < mid_abs_down()); }
  bool certainly_nonzero() const { return !contains_zero(); }
  std::complex<double> mid() const { return {re_.to_double(), im_.to_double()}; }

  /// True when the exact point s lies in the ball (checked in higher precision).
  bool contains(const Scalar& s) const {
    ComplexBall d = *this - exact(s, prec() + 64);
    return d.mid_abs_up() <= rad_ + d.rad_ + Mag::pow2(-static_cast<long>(prec()) * 2);
  }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall c(std::max(a.prec(), b.prec()));
    mpfr_add(c.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_add(c.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    c.rad_ = a.rad_ + b.rad_ + (a.mid_abs_up() + b.mid_abs_up()).mul_2si(1 - c.prec());
    return c;
  }
  friend ComplexBall operator-(const ComplexBall& a) {
    ComplexBall c = a;
    mpfr_neg(c.re_.get(), c.re_.get(), MPFR_RNDN);
    mpfr_neg(c.im_.get(), c.im_.get(), MPFR_RNDN);
    return c;
  }
  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) { return a + (-b); }
  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
    const mpfr_prec_t p = std::max(a.prec(), b.prec());
    ComplexBall c(p);
    Real t1(p + 8), t2(p + 8);
    mpfr_mul(t1.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_sub(c.re_.get(), t1.get(), t2.get(), MPFR_RNDN);
    mpfr_mul(t1.get(), a.re_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), a.im_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_add(c.im_.get(), t1.get(), t2.get(), MPFR_RNDN);
    Mag am = a.mid_abs_up(), bm = b.mid_abs_up();
    c.rad_ = am * b.rad_ + bm * a.rad_ + a.rad_ * b.rad_ + (am * bm).mul_2si(3 - p);
    return c;
  }
  /// Multiplication by an exact scalar.
  friend ComplexBall operator*(const ComplexBall& a, const Scalar& s) {
    return a * exact(s, a.prec());
  }
  /// 1/b; the result has infinite radius if b may vanish.
  ComplexBall inverse() const {
    const mpfr_prec_t p = prec();
    ComplexBall c(p);
    Mag lo = abs_down();
    if (lo.is_zero()) {
      c.rad_ = Mag::inf();
      return c;
    }
    Real n(p + 16);
    mpfr_sqr(n.get(), re_.get(), MPFR_RNDN);
    Real t(p + 16);
    mpfr_sqr(t.get(), im_.get(), MPFR_RNDN);
    mpfr_add(n.get(), n.get(), t.get(), MPFR_RNDN);
    mpfr_div(c.re_.get(), re_.get(), n.get(), MPFR_RNDN);
    mpfr_div(c.im_.get(), im_.get(), n.get(), MPFR_RNDN);
    mpfr_neg(c.im_.get(), c.im_.get(), MPFR_RNDN);
    Mag mlo = mid_abs_down();
    // |1/z - 1/m| <= r / (|m| (|m| - r))
    c.rad_ = rad_ / (mlo * lo) + (Mag(1.0) / mlo).mul_2si(3 - p);
    return c;
  }
  friend ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) {
    return a * b.inverse();
  }
  /// Multiplication by a machine integer.
  ComplexBall scaled(long n) const {
    ComplexBall c(prec());
    int t1 = mpfr_mul_si(c.re_.get(), re_.get(), n, MPFR_RNDN);
    int t2 = mpfr_mul_si(c.im_.get(), im_.get(), n, MPFR_RNDN);
    c.rad_ = rad_ * Mag(static_cast<double>(n < 0 ? -n : n));
    if (t1 != 0 || t2 != 0) c.rad_ += c.mid_abs_up().mul_2si(1 - prec());
    return c;
  }
  /// Division by a nonzero machine integer.
  ComplexBall divided(long n) const {
    ComplexBall c(prec());
    mpfr_div_si(c.re_.get(), re_.get(), n, MPFR_RNDN);
    mpfr_div_si(c.im_.get(), im_.get(), n, MPFR_RNDN);
    c.rad_ = rad_ / Mag::sub_down(Mag(static_cast<double>(n < 0 ? -n : n)), Mag()) +
             c.mid_abs_up().mul_2si(1 - prec());
    return c;
  }
  ComplexBall& operator+=(const ComplexBall& o) { return *this = *this + o; }
  ComplexBall& operator-=(const ComplexBall& o) { return *this = *this - o; }
  ComplexBall& operator*=(const ComplexBall& o) { return *this = *this * o; }

  /// Principal exponential.
  friend ComplexBall exp(const ComplexBall& z) {
    const mpfr_prec_t p = z.prec();
    ComplexBall c(p);
    Real m(p + 16), cs(p + 16), sn(p + 16);
    mpfr_exp(m.get(), z.re_.get(), MPFR_RNDN);
    mpfr_sin_cos(sn.get(), cs.get(), z.im_.get(), MPFR_RNDN);
    mpfr_mul(c.re_.get(), m.get(), cs.get(), MPFR_RNDN);
    mpfr_mul(c.im_.get(), m.get(), sn.get(), MPFR_RNDN);
    Mag em = Mag::from_mpfr_up(m.get());
    // |e^{z+d} - e^z| <= |e^z| (e^|d| - 1)
    c.rad_ = em * z.rad_.expm1() + em.mul_2si(3 - p);
    return c;
  }
  /// Principal logarithm; the ball must not straddle the negative real axis.
  friend ComplexBall log(const ComplexBall& z) {
    const mpfr_prec_t p = z.prec();
    ComplexBall c(p);
    Real a(p + 16);
    mpfr_hypot(a.get(), z.re_.get(), z.im_.get(), MPFR_RNDN);
    mpfr_log(c.re_.get(), a.get(), MPFR_RNDN);
    mpfr_atan2(c.im_.get(), z.im_.get(), z.re_.get(), MPFR_RNDN);
    Mag lo = z.mid_abs_down();
    if (!(z.rad_ < lo)) {
      c.rad_ = Mag::inf();
      return c;
    }
    // |log(m+d) - log(m)| <= -log(1 - r/|m|)
    Mag q = z.rad_ / lo;
    Real t(Mag::kPrec);
    mpfr_ui_sub(t.get(), 1, q.get(), MPFR_RNDD);
    mpfr_log(t.get(), t.get(), MPFR_RNDD);
    mpfr_neg(t.get(), t.get(), MPFR_RNDU);
    Mag big = max(Mag::from_mpfr_up(c.re_.get()), Mag(4.0));
    c.rad_ = Mag::from_mpfr_up(t.get()) + big.mul_2si(3 - p);
    return c;
  }

  std::string str(int digits = 8) const {
    std::string s = "(" + re_.str(digits) + " + " + im_.str(digits) + "i";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", rad_.to_double());
    return s + " +/- " + buf + ")";
  }

 private:
  Real re_, im_;
  Mag rad_;
};

ComplexBall exp(const ComplexBall& z);
ComplexBall log(const ComplexBall& z);

/// Dense ball matrix, row-major.
class BallMatrix {
 public:
  BallMatrix() = default;
  BallMatrix(int rows, int cols, mpfr_prec_t prec)
      : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols, ComplexBall(prec)) {}
  static BallMatrix identity(int n, mpfr_prec_t prec) {
    BallMatrix m(n, n, prec);
    for (int i = 0; i < n; ++i) m(i, i) = ComplexBall::from_si(1, prec);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  ComplexBall& operator()(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
  const ComplexBall& operator()(int i, int j) const {
    return e_[static_cast<size_t>(i) * cols_ + j];
  }

  friend BallMatrix operator*(const BallMatrix& a, const BallMatrix& b) {
    mpfr_prec_t p = a.e_.empty() ? 128 : a.e_[0].prec();
    BallMatrix c(a.rows_, b.cols_, p);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        ComplexBall acc(p);
        for (int k = 0; k < a.cols_; ++k) acc += a(i, k) * b(k, j);
        c(i, j) = acc;
      }
    return c;
  }

  /// Columns of a followed by columns of b.
  static BallMatrix hcat(const BallMatrix& a, const BallMatrix& b) {
    if (a.cols_ == 0) return b;
    if (b.cols_ == 0) return a;
    BallMatrix c(a.rows_, a.cols_ + b.cols_, a(0, 0).prec());
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < a.cols_; ++j) c(i, j) = a(i, j);
      for (int j = 0; j < b.cols_; ++j) c(i, a.cols_ + j) = b(i, j);
    }
    return c;
  }
  BallMatrix column(int j) const {
    BallMatrix c(rows_, 1, rows_ ? (*this)(0, j).prec() : 128);
    for (int i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
    return c;
  }

  Mag max_rad() const {
    Mag m;
    for (const auto& x : e_) m = max(m, x.rad());
    return m;
  }
  Mag max_abs() const {
    Mag m;
    for (const auto& x : e_) m = max(m, x.mid_abs_up());
    return m;
  }
  bool is_finite() const {
    for (const auto& x : e_)
      if (!x.is_finite()) return false;
    return true;
  }
  /// Adds e to every radius.
  void inflate(const Mag& e) {
    for (auto& x : e_) x.add_error(e);
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<ComplexBall> e_;
};

/// Truncated Taylor series (jets) with ball coefficients, all of the same length.
namespace jet {

using Jet = std::vector<ComplexBall>;

inline Jet constant(const ComplexBall& c, size_t n) {
  Jet j(n, ComplexBall(c.prec()));
  j[0] = c;
  return j;
}

inline Jet mul(const Jet& a, const Jet& b) {
  const size_t n = a.size();
  Jet c(n, ComplexBall(a[0].prec()));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k + i < n; ++k) c[i + k] += a[i] * b[k];
  return c;
}

inline Jet add(Jet a, const Jet& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Jet scale(Jet a, const ComplexBall& s) {
  for (auto& x : a) x = x * s;
  return a;
}

inline Jet inverse(const Jet& a) {
  const size_t n = a.size();
  Jet c(n, ComplexBall(a[0].prec()));
  ComplexBall inv0 = a[0].inverse();
  c[0] = inv0;
  for (size_t k = 1; k < n; ++k) {
    ComplexBall acc(a[0].prec());
    for (size_t i = 1; i <= k; ++i) acc += a[i] * c[k - i];
    c[k] = -(acc * inv0);
  }
  return c;
}

/// exp of a jet: e' = g' e.
inline Jet exp(const Jet& g) {
  const size_t n = g.size();
  const mpfr_prec_t p = g[0].prec();
  Jet e(n, ComplexBall(p));
  e[0] = hyperexp::exp(g[0]);
  for (size_t k = 1; k < n; ++k) {
    ComplexBall acc(p);
    for (size_t i = 1; i <= k; ++i) acc += g[i] * e[k - i] * Scalar(static_cast<long>(i));
    e[k] = acc * Scalar(mpq_class(1, static_cast<long>(k)));
  }
  return e;
}

/// Principal log of a jet: l' = f'/f.
inline Jet log(const Jet& f) {
  const size_t n = f.size();
  const mpfr_prec_t p = f[0].prec();
  Jet l(n, ComplexBall(p));
  l[0] = hyperexp::log(f[0]);
  ComplexBall inv0 = f[0].inverse();
  for (size_t k = 1; k < n; ++k) {
    ComplexBall acc = f[k] * Scalar(static_cast<long>(k));
    for (size_t i = 1; i < k; ++i) acc -= l[i] * f[k - i] * Scalar(static_cast<long>(i));
    l[k] = acc * inv0 * Scalar(mpq_class(1, static_cast<long>(k)));
  }
  return l;
}

}  // namespace jet

}  // namespace hyperexp
