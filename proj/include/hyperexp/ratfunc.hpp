#pragma once

#include <string>
#include <utility>

#include "hyperexp/poly.hpp"

namespace hyperexp {

/// Element of Q(i)(x) kept in lowest terms with a monic denominator.
class RationalFunction {
 public:
  RationalFunction() : den_(1) {}
  RationalFunction(Poly num) : num_(std::move(num)), den_(1) {}  // NOLINT
  RationalFunction(long c) : RationalFunction(Poly(c)) {}        // NOLINT
  RationalFunction(Scalar c) : RationalFunction(Poly(std::move(c))) {}  // NOLINT
  RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }

  RationalFunction derivative() const {
    // (n/d)' = (n' d - n d') / d^2
    return {num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_};
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    Poly g = gcd(a.den_, b.den_);
    Poly ad = exact_div(a.den_, g);
    Poly bd = exact_div(b.den_, g);
    return {a.num_ * bd + b.num_ * ad, ad * b.den_};
  }
  friend RationalFunction operator-(const RationalFunction& a) {
    RationalFunction r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-b);
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Poly g1 = gcd(a.num_, b.den_);
    Poly g2 = gcd(b.num_, a.den_);
    return {exact_div(a.num_, g1) * exact_div(b.num_, g2),
            exact_div(a.den_, g2) * exact_div(b.den_, g1)};
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    return a * RationalFunction(b.den_, b.num_);
  }
  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str(const std::string& var = "x") const {
    if (is_polynomial()) return num_.str(var);
    std::string n = num_.str(var), d = den_.str(var);
    if (num_.degree() > 0 && num_.coeffs().size() > 1) n = "(" + n + ")";
    if (d.find(' ') != std::string::npos || d.find('*') != std::string::npos) d = "(" + d + ")";
    return n + "/" + d;
  }

 private:
  void normalize() {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    Poly g = gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = exact_div(num_, g);
      den_ = exact_div(den_, g);
    }
    Scalar lc = den_.lead();
    if (!lc.is_one()) {
      Scalar inv = Scalar(1) / lc;
      num_ *= inv;
      den_ *= inv;
    }
  }

  Poly num_;
  Poly den_;
};

}  // namespace hyperexp
