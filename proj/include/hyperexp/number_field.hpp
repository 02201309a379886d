#pragma once

#include <memory>
#include <utility>

#include "hyperexp/poly.hpp"

namespace hyperexp {

/// Thrown when a non-invertible element shows that the modulus splits.
struct ZeroDivisor {
  Poly factor;  ///< nontrivial monic factor of the modulus
};

/// Element of Q(i)[t]/(f); f is square-free but not necessarily irreducible.
class ExtElem {
 public:
  ExtElem() = default;
  ExtElem(Poly v, std::shared_ptr<const Poly> f) : f_(std::move(f)) { v_ = v % *f_; }
  ExtElem(const Scalar& c, std::shared_ptr<const Poly> f) : v_(c), f_(std::move(f)) {}

  const Poly& value() const { return v_; }
  bool is_zero() const { return v_.is_zero(); }
  /// True when the element is a constant of Q(i).
  bool is_scalar() const { return v_.degree() <= 0; }
  Scalar scalar() const { return v_.is_zero() ? Scalar(0) : v_.coeffs()[0]; }

  ExtElem inverse() const {
    auto [g, s, t] = ext_gcd(v_, *f_);
    if (g.degree() > 0) throw ZeroDivisor{g};
    return {s, f_};
  }

  friend ExtElem operator+(const ExtElem& a, const ExtElem& b) { return {a.v_ + b.v_, a.mod(b)}; }
  friend ExtElem operator-(const ExtElem& a, const ExtElem& b) { return {a.v_ - b.v_, a.mod(b)}; }
  friend ExtElem operator*(const ExtElem& a, const ExtElem& b) { return {a.v_ * b.v_, a.mod(b)}; }
  friend ExtElem operator*(const ExtElem& a, const Scalar& s) {
    ExtElem r = a;
    r.v_ *= s;
    return r;
  }
  ExtElem& operator+=(const ExtElem& o) { return *this = *this + o; }

 private:
  std::shared_ptr<const Poly> mod(const ExtElem& o) const { return f_ ? f_ : o.f_; }
  Poly v_;
  std::shared_ptr<const Poly> f_;
};

}  // namespace hyperexp
