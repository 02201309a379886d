#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "hyperexp/poly.hpp"

namespace hyperexp {

using cld = std::complex<long double>;

inline long double to_ld(const mpq_class& q) {
  // mpq -> double loses range for huge values; go through mpf for safety
  mpf_class f(q, 128);
  long exp = 0;
  double m = mpf_get_d_2exp(&exp, f.get_mpf_t());
  return std::ldexp(static_cast<long double>(m), static_cast<int>(exp));
}

inline cld to_cld(const Scalar& s) { return {to_ld(s.re()), to_ld(s.im())}; }

inline cld eval_cld(const std::vector<cld>& c, cld z) {
  cld acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

/// All complex roots (with multiplicity) by Aberth iteration. Best on square-free input.
inline std::vector<cld> numeric_roots(const Poly& p) {
  const int n = p.degree();
  std::vector<cld> out;
  if (n < 1) return out;
  std::vector<cld> c;
  for (const auto& s : p.coeffs()) c.push_back(to_cld(s));
  cld lead = c.back();
  for (auto& v : c) v /= lead;
  if (n == 1) return {-c[0]};
  std::vector<cld> dc;
  for (int k = 1; k <= n; ++k) dc.push_back(c[k] * static_cast<long double>(k));
  long double bound = 0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::pow(std::abs(c[k]), 1.0L / (n - k)));
  bound = 2 * bound + 1e-6L;
  std::vector<cld> z(n);
  for (int k = 0; k < n; ++k) {
    long double a = 2 * M_PIl * k / n + 0.4L;
    z[k] = std::polar(bound * 0.5L, a);
  }
  for (int iter = 0; iter < 1000; ++iter) {
    long double worst = 0;
    for (int k = 0; k < n; ++k) {
      cld f = eval_cld(c, z[k]);
      cld df = eval_cld(dc, z[k]);
      if (f == cld(0)) continue;
      cld ratio = f / df;
      cld sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0L / (z[k] - z[j]);
      cld w = ratio / (1.0L - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = ratio;
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0L, std::abs(z[k])));
    }
    if (worst < 1e-17L) break;
  }
  for (auto& r : z) {
    for (int k = 0; k < 3; ++k) {
      cld df = eval_cld(dc, r);
      if (std::abs(df) == 0) break;
      r -= eval_cld(c, r) / df;
    }
  }
  return z;
}

/// Root of p in Q(i) with its multiplicity.
struct ExactRoot {
  Scalar value;
  int multiplicity = 1;
};

/// Monic square-free factor without roots in Q(i), occurring with a multiplicity.
struct AlgebraicGroup {
  Poly factor;
  int multiplicity = 1;
  std::vector<cld> approx;
};

struct RootSplit {
  std::vector<ExactRoot> exact;
  std::vector<AlgebraicGroup> algebraic;
};

namespace detail {

inline mpz_class lcm_den(const Poly& p) {
  mpz_class l = 1;
  for (const auto& s : p.coeffs()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.re().get_den_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.im().get_den_mpz_t());
  }
  return l;
}

inline mpz_class round_ld(long double v) {
  long double r = std::floor(v + 0.5L);
  mpf_class f;
  // long double may exceed double precision; split into two doubles
  double hi = static_cast<double>(r);
  double lo = static_cast<double>(r - hi);
  f = hi;
  f += lo;
  mpz_class out(f);
  return out;
}

}  // namespace detail

/// Split p into its roots in Q(i) (with multiplicity) and remaining square-free groups.
inline RootSplit split_roots(const Poly& p) {
  RootSplit out;
  if (p.degree() < 1) return out;
  Poly s = squarefree_part(p);
  // scale s to Z[i] coefficients; every Q(i) root beta then has lead*beta in Z[i]
  mpz_class l = detail::lcm_den(s);
  Poly si = s * Scalar(mpq_class(l));
  Scalar lead = si.lead();
  Poly rest = p;
  for (const cld& z : numeric_roots(s)) {
    cld lz = z * to_cld(lead);
    Scalar cand(mpq_class(detail::round_ld(lz.real())), mpq_class(detail::round_ld(lz.imag())));
    cand /= lead;
    if (!s.eval(cand).is_zero()) continue;
    bool seen = false;
    for (const auto& e : out.exact) seen = seen || e.value == cand;
    if (seen) continue;
    ExactRoot r{cand, 0};
    Poly lin = Poly::linear(cand);
    while (rest.degree() >= 1) {
      auto [q, rem] = divmod(rest, lin);
      if (!rem.is_zero()) break;
      rest = q;
      ++r.multiplicity;
    }
    out.exact.push_back(r);
  }
  std::sort(out.exact.begin(), out.exact.end(),
            [](const ExactRoot& a, const ExactRoot& b) { return lex_less(a.value, b.value); });
  if (rest.degree() >= 1) {
    auto sq = squarefree_decomposition(rest);
    for (size_t k = 0; k < sq.size(); ++k) {
      if (sq[k].degree() < 1) continue;
      out.algebraic.push_back({sq[k], static_cast<int>(k) + 1, numeric_roots(sq[k])});
    }
  }
  return out;
}

/// Roots of p lying in Q(i), each once, sorted.
inline std::vector<Scalar> exact_roots(const Poly& p) {
  std::vector<Scalar> out;
  for (const auto& r : split_roots(p).exact) out.push_back(r.value);
  return out;
}

}  // namespace hyperexp
