#pragma once

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hyperexp/scalar.hpp"

namespace hyperexp {

/// Dense univariate polynomial over Q(i); coefficients stored low to high.
class Poly {
 public:
  Poly() = default;
  Poly(Scalar c) {  // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) c_.push_back(std::move(c));
  }
  Poly(long c) : Poly(Scalar(c)) {}  // NOLINT(google-explicit-constructor)
  explicit Poly(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly x() { return Poly(std::vector<Scalar>{Scalar(0), Scalar(1)}); }
  static Poly monomial(Scalar c, int k) {
    std::vector<Scalar> v(k + 1);
    v[k] = std::move(c);
    return Poly(std::move(v));
  }
  /// x - z
  static Poly linear(const Scalar& z) { return Poly(std::vector<Scalar>{-z, Scalar(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<Scalar>& coeffs() const { return c_; }
  /// Coefficient of x^k (zero beyond the degree).
  Scalar operator[](int k) const {
    if (k < 0 || k > degree()) return Scalar(0);
    return c_[k];
  }
  const Scalar& lead() const {
    assert(!c_.empty());
    return c_.back();
  }
  /// Lowest k with a nonzero coefficient; -1 for the zero polynomial.
  int valuation() const {
    for (size_t k = 0; k < c_.size(); ++k)
      if (!c_[k].is_zero()) return static_cast<int>(k);
    return -1;
  }

  Scalar eval(const Scalar& z) const {
    Scalar acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      acc *= z;
      acc += *it;
    }
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Scalar> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * Scalar(static_cast<long>(k));
    return Poly(std::move(d));
  }

  Poly monic() const {
    if (is_zero()) return {};
    Scalar inv = Scalar(1) / lead();
    return *this * inv;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  Poly& operator*=(const Scalar& s) {
    if (s.is_zero()) {
      c_.clear();
      return *this;
    }
    for (auto& c : c_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) {
    for (auto& c : a.c_) c = -c;
    return a;
  }
  friend Poly operator*(Poly a, const Scalar& s) { return a *= s; }
  friend Poly operator*(const Scalar& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1);
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j].is_zero()) continue;
        r[i + j] += a.c_[i] * b.c_[j];
      }
    }
    return Poly(std::move(r));
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Multiply by x^k (k >= 0) or divide exactly by x^{-k}.
  Poly shift_degree(int k) const {
    if (is_zero() || k == 0) return *this;
    std::vector<Scalar> v;
    if (k > 0) {
      v.assign(k, Scalar(0));
      v.insert(v.end(), c_.begin(), c_.end());
    } else {
      if (valuation() < -k) throw std::logic_error("shift_degree: not divisible by x^k");
      v.assign(c_.begin() - k, c_.end());
    }
    return Poly(std::move(v));
  }

  /// Human-readable rendering in the variable `var`, parseable when var is "x".
  std::string str(const std::string& var = "x") const;

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

/// Quotient and remainder of a by b (b nonzero).
inline std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.degree() < b.degree()) return {Poly(), a};
  std::vector<Scalar> rem = a.coeffs();
  const int db = b.degree();
  std::vector<Scalar> q(a.degree() - db + 1);
  Scalar inv = Scalar(1) / b.lead();
  for (int k = a.degree() - db; k >= 0; --k) {
    Scalar c = rem[k + db] * inv;
    if (c.is_zero()) continue;
    for (int j = 0; j <= db; ++j) {
      if (!b.coeffs()[j].is_zero()) rem[k + j] -= c * b.coeffs()[j];
    }
    q[k] = std::move(c);
  }
  rem.resize(db);
  return {Poly(std::move(q)), Poly(std::move(rem))};
}

inline Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
inline Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

/// Exact division; throws if b does not divide a.
inline Poly exact_div(const Poly& a, const Poly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::logic_error("exact_div: nonzero remainder");
  return q;
}

/// Monic gcd (zero if both inputs are zero).
inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

/// Extended Euclid: returns (g, s, t) with s*a + t*b = g monic.
inline std::tuple<Poly, Poly, Poly> ext_gcd(const Poly& a, const Poly& b) {
  Poly r0 = a, r1 = b, s0(1), s1, t0, t1(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    Poly s2 = s0 - q * s1;
    Poly t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  Scalar inv = Scalar(1) / r0.lead();
  return {r0 * inv, s0 * inv, t0 * inv};
}

inline Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return (exact_div(a, gcd(a, b)) * b).monic();
}

inline Poly pow(const Poly& p, int e) {
  Poly r(1), base = p;
  while (e > 0) {
    if (e & 1) r *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return r;
}

/// Taylor shift: returns p(x + z).
inline Poly taylor_shift(const Poly& p, const Scalar& z) {
  if (z.is_zero() || p.degree() < 1) return p;
  std::vector<Scalar> c = p.coeffs();
  const int n = p.degree();
  for (int i = 0; i < n; ++i)
    for (int k = n - 1; k >= i; --k) c[k] += z * c[k + 1];
  return Poly(std::move(c));
}

/// x^deg * p(1/x) with deg the degree of p (coefficient reversal).
inline Poly reversed(const Poly& p, int deg = -1) {
  if (deg < 0) deg = p.degree();
  std::vector<Scalar> v(deg + 1);
  for (int k = 0; k <= p.degree(); ++k) v[deg - k] = p.coeffs()[k];
  return Poly(std::move(v));
}

/// Square-free part, monic.
inline Poly squarefree_part(const Poly& p) {
  if (p.degree() < 1) return p.is_zero() ? Poly() : Poly(1);
  return exact_div(p, gcd(p, p.derivative())).monic();
}

/// Yun's algorithm: monic factors f_1, f_2, ... with p = c * prod f_k^k.
inline std::vector<Poly> squarefree_decomposition(const Poly& p) {
  std::vector<Poly> out;
  if (p.degree() < 1) return out;
  Poly a = p.monic();
  Poly b = a.derivative();
  Poly c = gcd(a, b);
  Poly w = exact_div(a, c);
  Poly y = exact_div(b, c);
  Poly z = y - w.derivative();
  while (w.degree() >= 1) {
    Poly g = gcd(w, z);
    out.push_back(g);
    w = exact_div(w, g);
    y = exact_div(z, g);
    z = y - w.derivative();
  }
  while (!out.empty() && out.back().degree() < 1) out.pop_back();
  return out;
}

/// Falling factorial t (t-1) ... (t-k+1) as a polynomial in t.
inline Poly falling_factorial(int k) {
  Poly r(1);
  for (int j = 0; j < k; ++j) r *= Poly::linear(Scalar(j));
  return r;
}

inline std::string Poly::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    const Scalar& c = c_[k];
    if (c.is_zero()) continue;
    std::string mono = k == 0 ? "" : (k == 1 ? var : var + "^" + std::to_string(k));
    std::string cs;
    bool neg = false;
    if (c.is_real()) {
      neg = sgn(c.re()) < 0;
      mpq_class a = abs(c.re());
      cs = a.get_str();
      if (a == 1 && k > 0) cs.clear();
    } else if (sgn(c.re()) == 0) {
      neg = sgn(c.im()) < 0;
      mpq_class a = abs(c.im());
      cs = a == 1 ? "I" : a.get_str() + "*I";
    } else {
      cs = c.str();
    }
    if (out.empty()) {
      out += neg ? "-" : "";
    } else {
      out += neg ? " - " : " + ";
    }
    if (cs.empty()) {
      out += mono;
    } else if (mono.empty()) {
      out += cs;
    } else {
      out += cs + "*" + mono;
    }
  }
  return out;
}

}  // namespace hyperexp
