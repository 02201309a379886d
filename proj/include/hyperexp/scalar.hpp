#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyperexp {

/// Exact element of Q(i), stored as a pair of canonical GMP rationals.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  Scalar(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }
  static Scalar rational(long num, long den) { return Scalar(mpq_class(num, den)); }
  static Scalar imag_unit() { return Scalar(mpq_class(0), mpq_class(1)); }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_integer() const { return is_real() && re_.get_den() == 1; }

  Scalar conj() const { return Scalar(re_, -im_); }
  /// |z|^2, exact.
  mpq_class norm() const { return re_ * re_ + im_ * im_; }

  Scalar& operator+=(const Scalar& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    if (o.is_real()) {
      re_ *= o.re_;
      im_ *= o.re_;
      return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  Scalar& operator/=(const Scalar& o) {
    if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
    if (o.is_real()) {
      re_ /= o.re_;
      im_ /= o.re_;
      return *this;
    }
    mpq_class n = o.norm();
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend Scalar operator-(const Scalar& a) { return Scalar(-a.re_, -a.im_); }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// Lexicographic order on (re, im); used only for deterministic sorting.
  friend bool lex_less(const Scalar& a, const Scalar& b) {
    int c = cmp(a.re_, b.re_);
    if (c != 0) return c < 0;
    return cmp(a.im_, b.im_) < 0;
  }

  /// Rendering accepted back by the operator parser, e.g. `3/4`, `-I`, `(1/2+2*I)`.
  std::string str() const {
    if (is_real()) return re_.get_str();
    std::string imag;
    if (im_ == 1) {
      imag = "I";
    } else if (im_ == -1) {
      imag = "-I";
    } else {
      imag = im_.get_str() + "*I";
    }
    if (sgn(re_) == 0) return imag;
    std::string sep = sgn(im_) < 0 ? "" : "+";
    return "(" + re_.get_str() + sep + imag + ")";
  }

  /// True when a - b is a rational integer.
  friend bool differ_by_integer(const Scalar& a, const Scalar& b) {
    Scalar d = a - b;
    return d.is_integer();
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// Floor of the real part (the imaginary part is ignored).
inline mpz_class floor_re(const Scalar& s) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), s.re().get_num_mpz_t(), s.re().get_den_mpz_t());
  return q;
}

}  // namespace hyperexp
