#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "hyperexp/diffop.hpp"
#include "hyperexp/errors.hpp"
#include "hyperexp/linalg.hpp"
#include "hyperexp/roots.hpp"
#include "hyperexp/singular.hpp"

namespace hyperexp {

/// Exponential part x~^alpha exp(sum_k c_k x~^-k) at a point, with its multiplicity.
struct ExponentialPart {
  Scalar alpha;
  std::vector<Scalar> u;  ///< u[k-1] = c_k, the coefficient of x~^-k
  int ramification = 1;
  int dimension = 0;
  bool unsupported = false;  ///< exponent outside Q(i); counted but never a candidate

  /// e = alpha + sum_k (-k c_k) x~^-k as coefficients of powers of x~^-1.
  std::vector<Scalar> e() const {
    std::vector<Scalar> out{alpha};
    for (size_t k = 1; k <= u.size(); ++k) out.push_back(-Scalar(static_cast<long>(k)) * u[k - 1]);
    return out;
  }
  bool candidate() const { return ramification == 1 && !unsupported; }
  int u_degree() const {
    int d = static_cast<int>(u.size());
    while (d > 0 && u[d - 1].is_zero()) --d;
    return d;
  }
  /// Logarithmic derivative e/x~ as a rational function of x~.
  RationalFunction log_derivative() const {
    auto ev = e();
    const int m = static_cast<int>(ev.size()) - 1;
    // e/x~ = sum_k e_k x~^{-k-1} = (sum_k e_k x~^{m-k}) / x~^{m+1}
    std::vector<Scalar> num(m + 1);
    for (int k = 0; k <= m; ++k) num[m - k] = ev[k];
    return {Poly(std::move(num)), Poly::monomial(Scalar(1), m + 1)};
  }
  /// Readable form of e, e.g. "1/2" or "-1 + 2*x~^-1".
  std::string str() const {
    if (unsupported) return "<exponent outside Q(i)>";
    std::string s;
    auto ev = e();
    for (size_t k = 0; k < ev.size(); ++k) {
      if (ev[k].is_zero() && (k > 0 || ev.size() > 1)) continue;
      std::string mono = k > 0 ? "t^-" + std::to_string(k) : "";
      Scalar c = ev[k];
      bool neg = c.is_real() && c.re() < 0;
      if (neg) c = -c;
      std::string term = k == 0 ? c.str() : c.is_one() ? mono
                       : c.is_real() ? c.str() + "*" + mono : "(" + c.str() + ")*" + mono;
      if (s.empty()) s = (neg ? "-" : "") + term;
      else s += (neg ? " - " : " + ") + term;
    }
    if (ramification > 1) s += " (ramified, s=" + std::to_string(ramification) + ")";
    return s;
  }
};

namespace detail {

inline mpq_class frac_re(const Scalar& a) {
  mpq_class f = a.re() - mpq_class(floor_re(a));
  return f;
}

inline bool part_less(const ExponentialPart& a, const ExponentialPart& b) {
  if (a.unsupported != b.unsupported) return !a.unsupported;
  if (a.ramification != b.ramification) return a.ramification < b.ramification;
  if (a.u_degree() != b.u_degree()) return a.u_degree() < b.u_degree();
  for (int k = a.u_degree() - 1; k >= 0; --k) {
    if (a.u[k] != b.u[k]) return lex_less(a.u[k], b.u[k]);
  }
  mpq_class fa = frac_re(a.alpha), fb = frac_re(b.alpha);
  if (fa != fb) return fa < fb;
  return lex_less(a.alpha, b.alpha);
}

/// Regular-part classes from the indicial polynomial q0 of the current level.
inline void regular_parts(const Poly& q0, const std::vector<Scalar>& prefix,
                          std::vector<ExponentialPart>& out) {
  if (q0.degree() < 1) return;
  RootSplit rs = split_roots(q0);
  std::vector<ExponentialPart> classes;
  for (const auto& root : rs.exact) {
    bool merged = false;
    for (auto& c : classes) {
      if (differ_by_integer(c.alpha, root.value)) {
        if (root.value.re() < c.alpha.re()) c.alpha = root.value;
        c.dimension += root.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) {
      ExponentialPart p;
      p.alpha = root.value;
      p.u = prefix;
      p.dimension = root.multiplicity;
      classes.push_back(p);
    }
  }
  out.insert(out.end(), classes.begin(), classes.end());
  for (const auto& g : rs.algebraic) {
    ExponentialPart p;
    p.u = prefix;
    p.dimension = g.factor.degree() * g.multiplicity;
    p.unsupported = true;
    out.push_back(p);
  }
}

inline void newton_recurse(const DiffOp& op, std::vector<Scalar> prefix, mpq_class max_slope,
                           bool bounded, std::vector<ExponentialPart>& out, int depth) {
  ThetaForm tf = theta_form(op);
  const auto& Q = tf.rows;
  if (Q.empty()) return;
  regular_parts(Q[0], prefix, out);
  // lower hull of (deg Q_k, k) walking to the right from (deg Q_0, 0)
  int cj = Q[0].degree(), ck = 0;
  const int r = op.order();
  while (cj < r) {
    mpq_class best;
    int bk = -1, bj = -1;
    for (int k = ck + 1; k < static_cast<int>(Q.size()); ++k) {
      int j = Q[k].degree();
      if (j <= cj) continue;
      mpq_class s(k - ck, j - cj);
      s.canonicalize();
      if (bk < 0 || s < best || (s == best && j > bj)) {
        best = s;
        bk = k;
        bj = j;
      }
    }
    if (bk < 0) throw std::logic_error("newton polygon: hull does not reach the order");
    if (bounded && best >= max_slope) break;
    const int dim = bj - cj;
    if (best.get_den() != 1) {
      ExponentialPart p;
      p.u = prefix;
      p.ramification = static_cast<int>(best.get_den().get_si());
      p.dimension = dim;
      out.push_back(p);
    } else {
      const long q = best.get_num().get_si();
      // characteristic polynomial sum_{(j,k) on the edge} [theta^j] Q_k w^{j - cj}
      std::vector<Scalar> ch(dim + 1);
      for (int j = cj; j <= bj; ++j) {
        long k = ck + q * (j - cj);
        if (k < static_cast<long>(Q.size())) ch[j - cj] = Q[k][j];
      }
      RootSplit rs = split_roots(Poly(ch));
      for (const auto& root : rs.exact) {
        Scalar c = -root.value / Scalar(q);
        // twist away exp(c x^-q): v = -q c x^{-q-1}
        RationalFunction v(Poly(-Scalar(q) * c), Poly::monomial(Scalar(1), static_cast<int>(q) + 1));
        DiffOp tw = twist(op, v);
        std::vector<Scalar> np = prefix;
        if (static_cast<long>(np.size()) < q) np.resize(q);
        np[q - 1] += c;
        const size_t before = out.size();
        newton_recurse(tw, np, best, true, out, depth + 1);
        int got = 0;
        for (size_t t = before; t < out.size(); ++t) got += out[t].dimension;
        if (got != root.multiplicity)
          throw std::logic_error("newton polygon: dimension mismatch in recursion");
      }
      for (const auto& g : rs.algebraic) {
        ExponentialPart p;
        p.u = prefix;
        p.dimension = g.factor.degree() * g.multiplicity;
        p.unsupported = true;
        out.push_back(p);
      }
    }
    cj = bj;
    ck = bk;
  }
}

}  // namespace detail

/// Inequivalent exponential parts of op at the origin with dimensions summing to the order.
inline std::vector<ExponentialPart> exponential_parts(const DiffOp& op) {
  std::vector<ExponentialPart> out;
  if (op.order() < 1) return out;
  detail::newton_recurse(normalized(op), {}, 0, false, out, 0);
  int total = 0;
  for (auto& p : out) {
    total += p.dimension;
    p.u.resize(p.u_degree());
  }
  if (total != op.order()) throw std::logic_error("exponential parts do not span the solution space");
  std::stable_sort(out.begin(), out.end(), detail::part_less);
  return out;
}

/// Truncated log-free series x~^alpha exp(u) sum_{n<=N} b_n x~^n.
struct GeneralizedSeries {
  ExponentialPart part;
  int m = 0;  ///< log degree
  int leading = 0;  ///< index n of the leading coefficient (which is 1)
  int N = 0;
  std::vector<Scalar> b;  ///< b_0 .. b_N
  bool log_free() const { return m == 0; }
  bool candidate() const { return m == 0 && part.candidate(); }
};

/// Local data for one exponential part at one point.
struct LocalPart {
  ExponentialPart part;
  int dim = 0;   ///< dimension of V
  int dim0 = 0;  ///< dimension of the log-free unramified subspace
  std::vector<GeneralizedSeries> basis;  ///< echelonized basis of the log-free subspace
};

struct LocalBasis {
  Point point;
  std::vector<LocalPart> parts;
};

/// Integer roots (sorted, each once) of q0, and the largest root spread.
inline std::vector<long> integer_roots(const Poly& q0) {
  std::vector<long> out;
  for (const auto& r : split_roots(q0).exact) {
    if (r.value.is_integer()) out.push_back(r.value.re().get_num().get_si());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline int default_truncation(const DiffOp& op, const ExponentialPart& part) {
  DiffOp tw = twist(op, part.log_derivative());
  auto roots = integer_roots(theta_form(tw).rows.at(0));
  int spread = roots.empty() ? 0 : static_cast<int>(roots.back() - std::min(0L, roots.front()));
  return 4 * op.order() + 20 + spread;
}

/// Echelonized basis of the log-free series in Exp(part) solving op (at the origin), to order N.
inline std::vector<GeneralizedSeries> frobenius_basis(const DiffOp& op, const ExponentialPart& part,
                                                      int N) {
  if (!part.candidate()) return {};
  DiffOp tw = twist(op, part.log_derivative());
  ThetaForm tf = theta_form(tw);
  const auto& Q = tf.rows;
  std::vector<long> roots;
  for (long n : integer_roots(Q.at(0)))
    if (n >= 0) roots.push_back(n);
  if (roots.empty()) return {};
  const long spread = roots.back();
  if (N < op.order() + spread)
    throw TruncationTooShort("truncation order " + std::to_string(N) + " below " +
                             std::to_string(op.order() + spread));
  const size_t np = roots.size();
  // y_n as linear forms in the parameters attached to the root positions
  std::vector<std::vector<Scalar>> y(N + 1, std::vector<Scalar>(np));
  ExactMatrix constraints;
  auto qeval = [&](size_t k, long n) {
    return k < Q.size() ? Q[k].eval(Scalar(n)) : Scalar(0);
  };
  for (long n = roots.front(); n <= N; ++n) {
    std::vector<Scalar> rhs(np);
    for (long k = 1; k <= n; ++k) {
      if (static_cast<size_t>(k) >= Q.size()) break;
      Scalar qk = qeval(k, n - k);
      if (qk.is_zero()) continue;
      const auto& prev = y[n - k];
      for (size_t p = 0; p < np; ++p)
        if (!prev[p].is_zero()) rhs[p] += qk * prev[p];
    }
    auto it = std::find(roots.begin(), roots.end(), n);
    if (it != roots.end()) {
      bool nonzero = false;
      for (const auto& c : rhs) nonzero = nonzero || !c.is_zero();
      if (nonzero) constraints.push_back(rhs);
      y[n][it - roots.begin()] = Scalar(1);
    } else {
      Scalar inv = Scalar(-1) / qeval(0, n);
      for (size_t p = 0; p < np; ++p) y[n][p] = rhs[p] * inv;
    }
  }
  ExactMatrix kernel = nullspace(constraints, np);
  if (kernel.empty()) return {};
  rref(kernel);
  std::vector<GeneralizedSeries> out;
  for (const auto& vec : kernel) {
    GeneralizedSeries s;
    s.part = part;
    s.N = N;
    s.b.assign(N + 1, Scalar(0));
    for (long n = 0; n <= N; ++n) {
      Scalar acc;
      for (size_t p = 0; p < np; ++p)
        if (!vec[p].is_zero() && !y[n][p].is_zero()) acc += vec[p] * y[n][p];
      s.b[n] = acc;
    }
    s.leading = 0;
    while (s.leading <= N && s.b[s.leading].is_zero()) ++s.leading;
    out.push_back(std::move(s));
  }
  return out;
}

/// Radius of the disk around the origin free of singularities of op other than 0, ignoring roots
/// of `apparent` (given in the local coordinate). Infinity when there are none.
inline double convergence_radius_estimate(const DiffOp& op, const Poly& apparent = Poly(1)) {
  Poly lc = op.lead();
  if (apparent.degree() > 0) {
    for (;;) {
      Poly g = gcd(lc, apparent);
      if (g.degree() < 1) break;
      lc = exact_div(lc, g);
    }
  }
  while (lc.degree() >= 1 && lc.coeffs()[0].is_zero()) lc = lc.shift_degree(-1);
  double rho = std::numeric_limits<double>::infinity();
  if (lc.degree() < 1) return rho;
  for (const cld& z : numeric_roots(squarefree_part(lc)))
    rho = std::min(rho, static_cast<double>(std::abs(z)));
  return rho;
}

/// Local analysis of op at p: parts, dimensions and truncated log-free bases.
inline LocalBasis local_basis(const DiffOp& op, const Point& p, int N = -1) {
  LocalBasis lb;
  lb.point = p;
  DiffOp loc = local_operator(op, p);
  for (const auto& part : exponential_parts(loc)) {
    LocalPart lp;
    lp.part = part;
    lp.dim = part.dimension;
    if (part.candidate()) {
      int n = N > 0 ? N : default_truncation(loc, part);
      lp.basis = frobenius_basis(loc, part, n);
      lp.dim0 = static_cast<int>(lp.basis.size());
    }
    lb.parts.push_back(std::move(lp));
  }
  return lb;
}

}  // namespace hyperexp
