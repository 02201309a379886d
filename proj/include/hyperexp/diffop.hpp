#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hyperexp/poly.hpp"
#include "hyperexp/ratfunc.hpp"

namespace hyperexp {

/// Linear differential operator sum_i p_i(x) D^i with polynomial coefficients.
class DiffOp {
 public:
  DiffOp() = default;
  explicit DiffOp(std::vector<Poly> coeffs) : c_(std::move(coeffs)) { trim(); }
  /// The multiplication operator by p.
  static DiffOp multiplication(Poly p) { return DiffOp(std::vector<Poly>{std::move(p)}); }
  static DiffOp d() { return DiffOp(std::vector<Poly>{Poly(), Poly(1)}); }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Poly>& coeffs() const { return c_; }
  const Poly& coeff(int i) const {
    static const Poly zero;
    return (i >= 0 && i <= order()) ? c_[i] : zero;
  }
  const Poly& lead() const { return c_.back(); }
  /// Largest coefficient degree.
  int degree() const {
    int d = -1;
    for (const auto& p : c_) d = std::max(d, p.degree());
    return d;
  }

  DiffOp& operator+=(const DiffOp& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a) {
    for (auto& p : a.c_) p = -p;
    return a;
  }
  friend DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }
  /// Left multiplication by a polynomial.
  friend DiffOp operator*(const Poly& p, DiffOp a) {
    for (auto& c : a.c_) c = p * c;
    a.trim();
    return a;
  }
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.c_ == b.c_; }
  friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

  /// Rendering in the input grammar, e.g. `(x - 1)*Dx^2 + Dx + (-1)`.
  std::string str() const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = order(); i >= 0; --i) {
      if (c_[i].is_zero()) continue;
      if (!out.empty()) out += " + ";
      std::string d = i == 0 ? "" : (i == 1 ? "Dx" : "Dx^" + std::to_string(i));
      std::string p = "(" + c_[i].str() + ")";
      out += d.empty() ? p : p + "*" + d;
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Poly> c_;
};

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

/// Noncommutative product in C[x][D] using D a = a D + a'.
inline DiffOp op_mul(const DiffOp& a, const DiffOp& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Poly> out(a.order() + b.order() + 1);
  // derivatives of the coefficients of b, computed lazily up to order(a)
  std::vector<std::vector<Poly>> db(b.order() + 1);
  for (int j = 0; j <= b.order(); ++j) {
    db[j].push_back(b.coeff(j));
    for (int k = 1; k <= a.order(); ++k) db[j].push_back(db[j].back().derivative());
  }
  for (int i = 0; i <= a.order(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = 0; j <= b.order(); ++j) {
      for (int k = 0; k <= i; ++k) {
        const Poly& d = db[j][k];
        if (d.is_zero()) continue;
        out[i - k + j] += a.coeff(i) * d * Scalar(binomial(i, k));
      }
    }
  }
  return DiffOp(std::move(out));
}

inline DiffOp op_pow(const DiffOp& a, int e) {
  DiffOp r = DiffOp::multiplication(Poly(1));
  for (int k = 0; k < e; ++k) r = op_mul(r, a);
  return r;
}

/// P applied to a polynomial.
inline Poly apply(const DiffOp& op, const Poly& f) {
  Poly acc, der = f;
  for (int i = 0; i <= op.order(); ++i) {
    if (i > 0) der = der.derivative();
    if (der.is_zero()) break;
    acc += op.coeff(i) * der;
  }
  return acc;
}

/// P applied to a rational function, exactly.
inline RationalFunction op_apply(const DiffOp& op, const RationalFunction& f) {
  RationalFunction acc, der = f;
  for (int i = 0; i <= op.order(); ++i) {
    if (i > 0) der = der.derivative();
    if (der.is_zero()) break;
    if (!op.coeff(i).is_zero()) acc += RationalFunction(op.coeff(i)) * der;
  }
  return acc;
}

/// Scale so that the leading coefficient of p_r has leading scalar 1.
inline DiffOp scalar_normalized(const DiffOp& op) {
  if (op.is_zero()) return op;
  Scalar inv = Scalar(1) / op.lead().lead();
  std::vector<Poly> c = op.coeffs();
  for (auto& p : c) p *= inv;
  return DiffOp(std::move(c));
}

/// Polynomial content (monic gcd of all coefficients).
inline Poly content(const DiffOp& op) {
  Poly g;
  for (const auto& p : op.coeffs()) {
    if (p.is_zero()) continue;
    g = g.is_zero() ? p.monic() : gcd(g, p);
    if (g.degree() == 0) break;
  }
  return g;
}

/// Content-free operator with leading scalar 1; the canonical annihilator form.
inline DiffOp normalized(const DiffOp& op) {
  if (op.is_zero()) return op;
  Poly g = content(op);
  if (g.degree() > 0) {
    std::vector<Poly> c;
    for (const auto& p : op.coeffs()) c.push_back(p.is_zero() ? p : exact_div(p, g));
    return scalar_normalized(DiffOp(std::move(c)));
  }
  return scalar_normalized(op);
}

/// The operator in x~ = x - z, i.e. every coefficient p(x) becomes p(x~ + z). Exact, no rescaling.
inline DiffOp translate(const DiffOp& op, const Scalar& z) {
  if (z.is_zero()) return op;
  std::vector<Poly> c;
  for (const auto& p : op.coeffs()) c.push_back(taylor_shift(p, z));
  return DiffOp(std::move(c));
}

/// The operator in x~ = 1/x, using D_x = -x~^2 D_x~. Denominators are cleared with
/// x~^deg(P) and the leading scalar is normalized; polynomial content is kept.
inline DiffOp invert_at_infinity(const DiffOp& op) {
  if (op.is_zero()) return op;
  const int deg = op.degree();
  // -x~^2 D
  DiffOp step(std::vector<Poly>{Poly(), -Poly::monomial(Scalar(1), 2)});
  DiffOp acc, power = DiffOp::multiplication(Poly(1));
  for (int i = 0; i <= op.order(); ++i) {
    if (i > 0) power = op_mul(step, power);
    if (op.coeff(i).is_zero()) continue;
    acc += reversed(op.coeff(i), deg) * power;
  }
  return scalar_normalized(acc);
}

/// Symmetric product with D - v: returns sum_i p_i (D + v)^i, denominators cleared and
/// normalized. A rational u solves the result iff u*h0 solves P, where v = h0'/h0.
inline DiffOp twist(const DiffOp& op, const RationalFunction& v) {
  if (op.is_zero()) return op;
  if (v.is_zero()) return normalized(op);
  const int r = op.order();
  const Poly& a = v.num();
  const Poly& b = v.den();
  const Poly db = b.derivative();
  // (D + a/b)^i = sum_k C[i][k] b^{-(i-k)} D^k with C polynomial
  std::vector<std::vector<Poly>> C(r + 1);
  C[0] = {Poly(1)};
  for (int i = 0; i < r; ++i) {
    C[i + 1].assign(i + 2, Poly());
    for (int k = 0; k <= i; ++k) {
      const Poly& c = C[i][k];
      if (c.is_zero()) continue;
      C[i + 1][k] += b * c.derivative() + (a - db * Scalar(static_cast<long>(i - k))) * c;
      C[i + 1][k + 1] += c;
    }
  }
  std::vector<Poly> bpow(r + 1);
  bpow[0] = Poly(1);
  for (int k = 1; k <= r; ++k) bpow[k] = bpow[k - 1] * b;
  std::vector<Poly> out(r + 1);
  for (int i = 0; i <= r; ++i) {
    if (op.coeff(i).is_zero()) continue;
    Poly pi = op.coeff(i) * bpow[r - i];
    for (int k = 0; k <= i; ++k) {
      if (C[i][k].is_zero()) continue;
      out[k] += pi * C[i][k] * bpow[k];
    }
  }
  return normalized(DiffOp(std::move(out)));
}

/// x^r P written as x^valuation * sum_k x^k Q_k(theta), theta = x D.
struct ThetaForm {
  int valuation = 0;
  std::vector<Poly> rows;  ///< rows[k] = Q_k as a polynomial in theta
};

inline ThetaForm theta_form(const DiffOp& op) {
  ThetaForm tf;
  if (op.is_zero()) return tf;
  const int r = op.order();
  const int deg = op.degree();
  std::vector<Poly> rows(deg + r + 1);
  for (int i = 0; i <= r; ++i) {
    const Poly& p = op.coeff(i);
    if (p.is_zero()) continue;
    Poly ff = falling_factorial(i);
    for (int k = 0; k <= p.degree(); ++k) {
      if (p.coeffs()[k].is_zero()) continue;
      rows[k + r - i] += ff * p.coeffs()[k];
    }
  }
  size_t first = 0;
  while (first < rows.size() && rows[first].is_zero()) ++first;
  size_t last = rows.size();
  while (last > first && rows[last - 1].is_zero()) --last;
  tf.valuation = static_cast<int>(first);
  tf.rows.assign(rows.begin() + first, rows.begin() + last);
  return tf;
}

/// Indicial polynomial at the origin: the lowest row of the theta form.
inline Poly indicial_polynomial(const DiffOp& op) {
  ThetaForm tf = theta_form(op);
  if (tf.rows.empty()) return {};
  return tf.rows.front();
}

}  // namespace hyperexp
