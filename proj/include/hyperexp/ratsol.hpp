#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hyperexp/diffop.hpp"
#include "hyperexp/errors.hpp"
#include "hyperexp/linalg.hpp"
#include "hyperexp/local.hpp"
#include "hyperexp/ratfunc.hpp"
#include "hyperexp/roots.hpp"
#include "hyperexp/singular.hpp"

namespace hyperexp {

/// (x - z)^alpha exp(sum_k c_k (x - z)^-k) at a finite point, or exp(sum_k c_k x^k) at
/// infinity (alpha is always 0 there; powers of x live in the multiplier).
struct TermFactor {
  Point point;
  Scalar alpha;
  std::vector<Scalar> c;  ///< c[k-1] multiplies x~^-k

  /// Logarithmic derivative with respect to x.
  RationalFunction log_derivative() const {
    RationalFunction v;
    if (point.infinite) {
      // d/dx sum c_k x^k
      std::vector<Scalar> d(c.size());
      for (size_t k = 1; k <= c.size(); ++k) d[k - 1] = c[k - 1] * Scalar(static_cast<long>(k));
      return RationalFunction(Poly(std::move(d)));
    }
    Poly t = Poly::linear(point.z);
    v = RationalFunction(Poly(alpha), t);
    for (size_t k = 1; k <= c.size(); ++k) {
      if (c[k - 1].is_zero()) continue;
      // d/dx c (x-z)^-k = -k c (x-z)^{-k-1}
      v = v + RationalFunction(Poly(-Scalar(static_cast<long>(k)) * c[k - 1]),
                               pow(t, static_cast<int>(k) + 1));
    }
    return v;
  }
};

/// u * prod of factors; a hyperexponential term with rational logarithmic derivative.
struct HyperexpTerm {
  RationalFunction multiplier{1};
  std::vector<TermFactor> parts;

  RationalFunction log_derivative() const {
    RationalFunction v = multiplier.derivative() / multiplier;
    for (const auto& f : parts) v = v + f.log_derivative();
    return v;
  }
  std::string str() const;
};

namespace detail {

inline std::string paren(const std::string& s) {
  bool simple = s.find_first_of(" +-*/") == std::string::npos || s.rfind("-", 0) == 0 &&
                s.find_first_of(" +*/", 1) == std::string::npos;
  return simple ? s : "(" + s + ")";
}

inline std::string linear_str(const Scalar& z) {
  return z.is_zero() ? "x" : "(" + Poly::linear(z).str() + ")";
}

/// Polynomial written as a product of powers of linear factors over Q(i), where possible.
inline std::string factored(const Poly& p) {
  if (p.degree() <= 0) return p.str();
  RootSplit rs = split_roots(p);
  Poly rest = p;
  std::vector<std::string> fs;
  for (const auto& e : rs.exact) {
    std::string f = linear_str(e.value);
    if (e.multiplicity > 1) f += "^" + std::to_string(e.multiplicity);
    fs.push_back(f);
    rest = exact_div(rest, pow(Poly::linear(e.value), e.multiplicity));
  }
  std::string out;
  if (rest.degree() > 0) {
    out = "(" + rest.str() + ")";
  } else if (!rest.lead().is_one()) {
    out = rest.lead() == Scalar(-1) ? "-" : paren(rest.lead().str()) + "*";
    if (fs.empty()) out = rest.lead().str();
  }
  for (size_t i = 0; i < fs.size(); ++i) {
    if (i > 0 || (!out.empty() && out.back() != '-' && out.back() != '*')) out += "*";
    out += fs[i];
  }
  return out;
}

inline std::string exponent_str(const Scalar& a) {
  return a.is_integer() ? a.str() : "(" + a.str() + ")";
}

}  // namespace detail

/// Canonical display: integer parts of the exponents are folded into the rational
/// multiplier; what remains is written as powers and one exp(...).
inline std::string HyperexpTerm::str() const {
  const Poly& n = multiplier.num();
  const Poly& d = multiplier.den();
  std::string mult = detail::factored(n);
  if (d.degree() > 0) {
    std::string ds = detail::factored(d);
    mult += "/" + (ds.find('*') != std::string::npos ? "(" + ds + ")" : ds);
  }
  std::vector<std::string> powers, exps;
  for (const auto& f : parts) {
    if (!f.point.infinite && !f.alpha.is_zero())
      powers.push_back(detail::linear_str(f.point.z) + "^" + detail::exponent_str(f.alpha));
    for (size_t k = 1; k <= f.c.size(); ++k) {
      const Scalar& c = f.c[k - 1];
      if (c.is_zero()) continue;
      std::string mono;
      if (f.point.infinite) {
        mono = k == 1 ? "x" : "x^" + std::to_string(k);
        exps.push_back(c.is_one() ? mono : detail::paren(c.str()) + "*" + mono);
      } else {
        mono = detail::linear_str(f.point.z);
        if (k > 1) mono += "^" + std::to_string(k);
        exps.push_back(detail::paren(c.str()) + "/" + mono);
      }
    }
  }
  const bool bare = powers.empty() && exps.empty();
  std::string out;
  if (bare || mult != "1") out = mult == "-1" && !bare ? "-" : mult;
  auto sep = [&out]() { return std::string(out.empty() || out == "-" ? "" : "*"); };
  for (const auto& p : powers) out += sep() + p;
  if (!exps.empty()) {
    std::string e;
    for (const auto& s : exps) e += e.empty() ? s : (s[0] == '-' ? " - " + s.substr(1) : " + " + s);
    out += sep() + "exp(" + e + ")";
  }
  return out;
}

/// D^k h = R_k h with R_0 = 1, R_{k+1} = R_k' + R_k v; P h = 0 iff sum p_k R_k = 0.
inline RationalFunction apply_to_hyperexp(const DiffOp& op, const RationalFunction& v) {
  RationalFunction R(1), acc;
  for (int k = 0; k <= op.order(); ++k) {
    if (!op.coeff(k).is_zero()) acc = acc + RationalFunction(op.coeff(k)) * R;
    R = R.derivative() + R * v;
  }
  return acc;
}

/// Exact check that op annihilates h.
inline bool verify_solution(const DiffOp& op, const HyperexpTerm& h) {
  if (h.multiplier.is_zero()) return false;
  return apply_to_hyperexp(op, h.log_derivative()).is_zero();
}

/// d such that every rational solution of op is q/d with q a polynomial.
inline Poly denominator_bound(const DiffOp& op) {
  if (op.is_zero()) throw std::invalid_argument("denominator_bound: zero operator");
  Poly d(1);
  if (op.order() == 0) return d;
  RootSplit rs = split_roots(op.lead());
  for (const auto& g : rs.algebraic) {
    if (!is_apparent_factor(op, g.factor))
      throw UnsupportedAlgebraicSingularity(
          "rational solutions: leading coefficient has non-apparent roots outside Q(i): " +
          g.factor.str());
  }
  for (const auto& e : rs.exact) {
    auto roots = integer_roots(indicial_polynomial(translate(op, e.value)));
    if (!roots.empty() && roots.front() < 0)
      d *= pow(Poly::linear(e.value), static_cast<int>(-roots.front()));
  }
  return d;
}

/// d^{r+1} op (1/d ·) as an operator with polynomial coefficients.
inline DiffOp compose_inverse(const DiffOp& op, const Poly& d) {
  const int r = op.order();
  // (1/d)^{(j)} = N_j / d^{j+1}
  std::vector<Poly> N(r + 1);
  N[0] = Poly(1);
  for (int j = 0; j < r; ++j) N[j + 1] = N[j].derivative() * d - Poly(Scalar(j + 1)) * d.derivative() * N[j];
  std::vector<Poly> dp(r + 2);
  dp[0] = Poly(1);
  for (int j = 1; j <= r + 1; ++j) dp[j] = dp[j - 1] * d;
  std::vector<Poly> out(r + 1);
  for (int i = 0; i <= r; ++i) {
    if (op.coeff(i).is_zero()) continue;
    for (int k = 0; k <= i; ++k)
      out[k] += op.coeff(i) * Poly(Scalar(binomial(i, k))) * N[i - k] * dp[r - i + k];
  }
  return DiffOp(std::move(out));
}

/// Largest degree a polynomial solution can have, from the indicial polynomial at infinity;
/// -1 when there is none.
inline int degree_bound(const DiffOp& op) {
  if (op.is_zero()) return -1;
  auto roots = integer_roots(indicial_polynomial(invert_at_infinity(op)));
  int best = -1;
  for (long r : roots)
    if (r <= 0) best = std::max(best, static_cast<int>(-r));
  return best;
}

/// Basis (in reduced echelon form) of the polynomial solutions of degree <= bound.
inline std::vector<Poly> polynomial_solutions(const DiffOp& op, int bound) {
  if (bound < 0) return {};
  std::vector<Poly> images;
  size_t rows = 0;
  for (int k = 0; k <= bound; ++k) {
    images.push_back(apply(op, Poly::monomial(Scalar(1), k)));
    rows = std::max(rows, images.back().coeffs().size());
  }
  ExactMatrix m(rows, std::vector<Scalar>(bound + 1));
  for (int k = 0; k <= bound; ++k)
    for (size_t i = 0; i < images[k].coeffs().size(); ++i) m[i][k] = images[k].coeffs()[i];
  auto ns = nullspace(m, bound + 1);
  // echelonize from the top degree so the basis is canonical
  ExactMatrix basis;
  for (auto& v : ns) basis.push_back(std::vector<Scalar>(v.rbegin(), v.rend()));
  rref(basis);
  std::vector<Poly> out;
  for (auto& row : basis) {
    std::vector<Scalar> c(row.rbegin(), row.rend());
    Poly p(std::move(c));
    if (!p.is_zero()) out.push_back(p);
  }
  return out;
}

/// Basis of the rational solutions of op.
inline std::vector<RationalFunction> rational_solutions(const DiffOp& op) {
  if (op.is_zero()) throw std::invalid_argument("rational_solutions: zero operator");
  if (op.order() == 0) return {};
  Poly d = denominator_bound(op);
  DiffOp L = normalized(compose_inverse(op, d));
  std::vector<RationalFunction> out;
  for (const auto& q : polynomial_solutions(L, degree_bound(L))) out.emplace_back(q, d);
  return out;
}

/// One local part chosen at a point, as used to build h0.
struct ChosenPart {
  Point point;
  ExponentialPart part;
};

/// h0 for a tuple: finite points contribute (x-z)^alpha exp(...), infinity only its
/// exponential polynomial. Returns nothing when the exponents cannot add up to an integer
/// degree at infinity (residue check), or when a part is not a candidate.
inline std::optional<HyperexpTerm> base_term(const std::vector<ChosenPart>& chosen) {
  HyperexpTerm h;
  Scalar sum(0);
  bool has_inf = false;
  for (const auto& cp : chosen) {
    if (!cp.part.candidate()) return std::nullopt;
    sum += cp.part.alpha;
    TermFactor f{cp.point, cp.point.infinite ? Scalar(0) : cp.part.alpha, cp.part.u};
    while (!f.c.empty() && f.c.back().is_zero()) f.c.pop_back();
    if (cp.point.infinite) has_inf = true;
    if (f.alpha.is_zero() && f.c.empty()) continue;
    h.parts.push_back(std::move(f));
  }
  if (has_inf && !sum.is_integer()) return std::nullopt;
  return h;
}

/// Moves the integer part of every finite exponent into the multiplier.
inline HyperexpTerm canonical(HyperexpTerm h) {
  std::vector<TermFactor> kept;
  for (auto& f : h.parts) {
    if (!f.point.infinite) {
      mpz_class fl = floor_re(f.alpha);
      if (fl != 0) {
        Poly t = Poly::linear(f.point.z);
        long e = fl.get_si();
        h.multiplier = h.multiplier * (e > 0 ? RationalFunction(pow(t, static_cast<int>(e)))
                                             : RationalFunction(Poly(1), pow(t, static_cast<int>(-e))));
        f.alpha -= Scalar(mpq_class(fl));
      }
    }
    if (f.alpha.is_zero() && f.c.empty()) continue;
    kept.push_back(std::move(f));
  }
  h.parts = std::move(kept);
  // monic numerator for a stable display
  if (!h.multiplier.is_zero() && !h.multiplier.num().lead().is_one())
    h.multiplier = h.multiplier * RationalFunction(Scalar(1) / h.multiplier.num().lead());
  return h;
}

/// Outcome of finishing one candidate tuple.
struct FinishResult {
  bool discarded = false;  ///< residue check failed before twisting
  std::vector<HyperexpTerm> solutions;
};

/// Steps 5 to 7 for one tuple: twist by h0, find rational solutions, verify each product.
inline FinishResult finish_candidate(const DiffOp& op, const std::vector<ChosenPart>& chosen) {
  FinishResult res;
  auto h0 = base_term(chosen);
  if (!h0) {
    res.discarded = true;
    return res;
  }
  DiffOp tw = twist(op, h0->log_derivative());
  for (const auto& u : rational_solutions(tw)) {
    HyperexpTerm h = *h0;
    h.multiplier = u;
    h = canonical(std::move(h));
    if (!verify_solution(op, h))
      throw Error("internal: twisted rational solution failed exact verification");
    res.solutions.push_back(std::move(h));
  }
  return res;
}

}  // namespace hyperexp
