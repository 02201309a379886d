#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "hyperexp/diffop.hpp"
#include "hyperexp/errors.hpp"
#include "hyperexp/number_field.hpp"
#include "hyperexp/roots.hpp"

namespace hyperexp {

/// A point of the projective line over Q(i).
struct Point {
  bool infinite = false;
  Scalar z;

  static Point at(Scalar v) { return {false, std::move(v)}; }
  static Point infinity() { return {true, Scalar(0)}; }
  std::string str() const { return infinite ? "infinity" : z.str(); }
  friend bool operator==(const Point& a, const Point& b) {
    return a.infinite == b.infinite && (a.infinite || a.z == b.z);
  }
};

/// The operator in the local coordinate at p: x~ = x - z, or x~ = 1/x at infinity.
inline DiffOp local_operator(const DiffOp& op, const Point& p) {
  return normalized(p.infinite ? invert_at_infinity(op) : translate(op, p.z));
}

/// A polynomial of x rewritten in the local coordinate at p (up to a power of x~).
inline Poly local_poly(const Poly& f, const Point& p) {
  return p.infinite ? reversed(f) : taylor_shift(f, p.z);
}

struct SingularPoint {
  Point point;
  int multiplicity = 0;  ///< as a root of the leading coefficient; 0 for infinity
  bool apparent = false;
};

struct SingularSet {
  /// Roots of p_r in Q(i) sorted, followed by infinity.
  std::vector<SingularPoint> points;
  /// Square-free factors of p_r without Q(i) roots, all found apparent.
  std::vector<AlgebraicGroup> apparent_groups;

  /// Non-apparent points in order; infinity last.
  std::vector<Point> relevant() const {
    std::vector<Point> out;
    for (const auto& s : points)
      if (!s.apparent) out.push_back(s.point);
    return out;
  }
  /// Every finite root of p_r, apparent or not, as floating-point approximations.
  std::vector<cld> obstacles() const {
    std::vector<cld> out;
    for (const auto& s : points)
      if (!s.point.infinite) out.push_back(to_cld(s.point.z));
    for (const auto& g : apparent_groups) out.insert(out.end(), g.approx.begin(), g.approx.end());
    return out;
  }
  /// Finite non-apparent points.
  std::vector<Scalar> finite_relevant() const {
    std::vector<Scalar> out;
    for (const auto& s : points)
      if (!s.apparent && !s.point.infinite) out.push_back(s.point.z);
    return out;
  }
  /// Product of the apparent factors of p_r (each root once).
  Poly apparent_factor() const {
    Poly f(1);
    for (const auto& s : points)
      if (s.apparent) f *= Poly::linear(s.point.z);
    for (const auto& g : apparent_groups) f *= g.factor;
    return f;
  }
};

namespace detail {

/// Apparentness at the roots of the square-free f, working in Q(i)[t]/(f).
inline bool apparent_mod(const DiffOp& op, const Poly& f_in) {
  auto f = std::make_shared<const Poly>(f_in.monic());
  const int r = op.order();
  auto K = [&](const Scalar& c) { return ExtElem(c, f); };
  // Taylor coefficients of p_i at t: [x^k] p_i(x + t) = (p_i^{(k)} / k!)(t)
  std::vector<std::vector<ExtElem>> tay(r + 1);
  int maxdeg = 0;
  for (int i = 0; i <= r; ++i) {
    Poly d = op.coeff(i);
    mpz_class fact = 1;
    for (int k = 0; !d.is_zero(); ++k) {
      if (k > 0) fact *= k;
      tay[i].push_back(ExtElem(d * Scalar(mpq_class(1, fact)), f));
      d = d.derivative();
    }
    maxdeg = std::max(maxdeg, static_cast<int>(tay[i].size()));
  }
  // theta-form rows over K
  const int nrows = maxdeg + r + 1;
  std::vector<std::vector<ExtElem>> rows(nrows, std::vector<ExtElem>(r + 1, K(Scalar(0))));
  std::vector<Poly> ff(r + 1);
  for (int i = 0; i <= r; ++i) ff[i] = falling_factorial(i);
  for (int i = 0; i <= r; ++i) {
    for (size_t k = 0; k < tay[i].size(); ++k) {
      if (tay[i][k].is_zero()) continue;
      for (int j = 0; j <= ff[i].degree(); ++j) {
        if (ff[i].coeffs()[j].is_zero()) continue;
        rows[k + r - i][j] += tay[i][k] * ff[i].coeffs()[j];
      }
    }
  }
  auto row_zero = [&](int m) {
    for (const auto& c : rows[m])
      if (!c.is_zero()) return false;
    return true;
  };
  int m0 = 0;
  while (m0 < nrows && row_zero(m0)) ++m0;
  if (m0 == nrows) return false;
  const auto& ind = rows[m0];
  if (ind[r].is_zero()) return false;
  ExtElem inv = ind[r].inverse();
  std::vector<Scalar> monic(r + 1);
  for (int j = 0; j <= r; ++j) {
    ExtElem c = ind[j] * inv;
    if (!c.is_scalar()) return false;
    monic[j] = c.scalar();
  }
  RootSplit rs = split_roots(Poly(monic));
  if (!rs.algebraic.empty() || static_cast<int>(rs.exact.size()) != r) return false;
  std::vector<long> roots;
  for (const auto& e : rs.exact) {
    if (e.multiplicity != 1 || !e.value.is_integer() || e.value.re() < 0) return false;
    roots.push_back(e.value.re().get_num().get_si());
  }
  std::sort(roots.begin(), roots.end());
  const long top = roots.back();
  auto eval_row = [&](int k, long n) {
    ExtElem acc = K(Scalar(0));
    if (m0 + k >= nrows) return acc;
    const auto& row = rows[m0 + k];
    for (int j = r; j >= 0; --j) acc = acc * Scalar(n) + row[j];
    return acc;
  };
  // every root must start a log-free series up to the largest root
  for (long start : roots) {
    std::vector<ExtElem> y(top + 1, K(Scalar(0)));
    y[start] = K(Scalar(1));
    for (long n = start + 1; n <= top; ++n) {
      ExtElem rhs = K(Scalar(0));
      for (long k = 1; k <= n - start; ++k) {
        if (y[n - k].is_zero()) continue;
        rhs += eval_row(static_cast<int>(k), n - k) * y[n - k];
      }
      bool is_root = std::binary_search(roots.begin(), roots.end(), n);
      if (is_root) {
        if (!rhs.is_zero()) return false;
        continue;
      }
      y[n] = (K(Scalar(0)) - rhs) * eval_row(0, n).inverse();
    }
  }
  return true;
}

inline bool apparent_split(const DiffOp& op, const Poly& f, int depth = 0) {
  try {
    return apparent_mod(op, f);
  } catch (const ZeroDivisor& zd) {
    if (depth > f.degree()) throw;
    Poly g = zd.factor.monic();
    return apparent_split(op, g, depth + 1) && apparent_split(op, exact_div(f, g), depth + 1);
  }
}

}  // namespace detail

/// True iff every solution of op is analytic at z (a root of the leading coefficient).
inline bool is_apparent(const DiffOp& op, const Scalar& z) {
  return detail::apparent_split(op, Poly::linear(z));
}

/// Same test at all roots of the square-free polynomial f at once.
inline bool is_apparent_factor(const DiffOp& op, const Poly& f) {
  return detail::apparent_split(op, f);
}

/// Singular points of op. Roots of p_r outside Q(i) are accepted only when apparent.
inline SingularSet singular_points(const DiffOp& op, bool check_apparent = true) {
  if (op.is_zero()) throw std::invalid_argument("singular_points: zero operator");
  SingularSet out;
  if (op.order() > 0) {
    RootSplit rs = split_roots(op.lead());
    for (const auto& e : rs.exact) {
      bool app = check_apparent && is_apparent(op, e.value);
      out.points.push_back({Point::at(e.value), e.multiplicity, app});
    }
    for (const auto& g : rs.algebraic) {
      if (!is_apparent_factor(op, g.factor)) {
        throw UnsupportedAlgebraicSingularity(
            "leading coefficient has a factor irreducible over Q(i) with non-apparent roots: " +
            g.factor.str());
      }
      out.apparent_groups.push_back(g);
    }
  }
  out.points.push_back({Point::infinity(), 0, false});
  return out;
}

}  // namespace hyperexp
