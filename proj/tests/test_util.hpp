#pragma once

#include <complex>
#include <fstream>
#include <random>
#include <set>
#include <algorithm>
#include <sstream>
#include <string>

#include "hyperexp/hyperexp.hpp"

namespace testutil {

using namespace hyperexp;

inline Scalar rand_scalar(std::mt19937& g, int range = 5, bool gaussian = true) {
  std::uniform_int_distribution<int> d(-range, range);
  long re = d(g);
  long im = gaussian && (g() % 3 == 0) ? d(g) : 0;
  return Scalar(mpq_class(re), mpq_class(im));
}

inline Poly rand_poly(std::mt19937& g, int deg, int range = 5, bool gaussian = true) {
  std::vector<Scalar> c;
  for (int k = 0; k <= deg; ++k) c.push_back(rand_scalar(g, range, gaussian));
  if (c.back().is_zero()) c.back() = Scalar(1);
  return Poly(std::move(c));
}

inline DiffOp rand_op(std::mt19937& g, int order, int deg, bool gaussian = true) {
  std::vector<Poly> c;
  for (int i = 0; i <= order; ++i) c.push_back(rand_poly(g, deg, 5, gaussian));
  return DiffOp(std::move(c));
}

/// Small nonzero rational function with a nonconstant denominator.
inline RationalFunction rand_ratfun(std::mt19937& g) {
  Poly den = rand_poly(g, 1 + static_cast<int>(g() % 2), 3, false);
  return RationalFunction(rand_poly(g, static_cast<int>(g() % 3), 4), den);
}

/// The order-3 operator with four singular points used as the end-to-end reference.
inline DiffOp reference_operator() {
  std::ifstream in(std::string(HYPEREXP_DATA_DIR) + "/reference_order3.op");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_operator(ss.str());
}

/// Published five-digit values of the evaluated subspace generators of the reference
/// operator at z0 = 3, keyed by (point index, part index, generator column) in this
/// library's ordering of points and parts.
struct TableEntry {
  int point, part, column;
  double v[3];
};

inline const std::vector<TableEntry>& reference_table() {
  static const std::vector<TableEntry> t{
      {0, 1, 0, {-200.15, 322.46, -1184.8}},  {0, 0, 0, {-70.513, -46.308, -101.17}},
      {0, 0, 1, {-156.55, -91.322, -205.47}}, {1, 0, 0, {30.349, -48.896, 179.66}},
      {1, 1, 0, {12.494, 5.2891, 13.066}},    {1, 1, 1, {77.105, 44.216, 99.931}},
      {2, 0, 0, {.74285, -.061904, .14960}},  {2, 1, 0, {15.580, -31.307, 105.26}},
      {2, 1, 1, {4.5433, 2.6503, 5.9631}},    {3, 0, 0, {30.349, -48.896, 179.66}},
      {3, 1, 1, {2.8557, -.23797, .57510}},   {3, 1, 0, {63.199, 41.308, 90.353}},
  };
  return t;
}

/// True when the ball b contains the real value v (v given as an mpfr number).
inline bool contains_real(const ComplexBall& b, mpfr_srcptr v) {
  mpfr_t d, e;
  mpfr_init2(d, 4 * b.prec());
  mpfr_init2(e, 4 * b.prec());
  mpfr_sub(d, b.re().get(), v, MPFR_RNDN);
  mpfr_set(e, b.im().get(), MPFR_RNDN);
  mpfr_hypot(d, d, e, MPFR_RNDD);
  bool ok = mpfr_get_d(d, MPFR_RNDD) <= b.rad().to_double() * (1 + 1e-9);
  mpfr_clear(d);
  mpfr_clear(e);
  return ok;
}

/// Relative distance between the midpoint of b and z.
inline double rel_err(const ComplexBall& b, std::complex<double> z) {
  return std::abs(b.mid() - z) / std::abs(z);
}

/// Subspaces of C^r given by exact generator columns.
using Columns = std::vector<std::vector<Scalar>>;

/// One direct-sum decomposition of C^r per point.
struct ExactInstance {
  int r = 0;
  std::vector<std::vector<Columns>> points;
};

inline int exact_rank(const Columns& cols, int r) {
  if (cols.empty()) return 0;
  ExactMatrix m(r, std::vector<Scalar>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i < r; ++i) m[i][j] = cols[j][i];
  return rank(m);
}

/// Basis of span(A) intersected with span(B), from the kernel of [A | -B].
inline Columns exact_intersection(const Columns& A, const Columns& B, int r) {
  if (A.empty() || B.empty()) return {};
  const size_t a = A.size(), b = B.size();
  ExactMatrix m(r, std::vector<Scalar>(a + b));
  for (int i = 0; i < r; ++i) {
    for (size_t j = 0; j < a; ++j) m[i][j] = A[j][i];
    for (size_t j = 0; j < b; ++j) m[i][a + j] = -B[j][i];
  }
  Columns out;
  for (const auto& v : nullspace(m, a + b)) {
    std::vector<Scalar> w(r);
    for (size_t j = 0; j < a; ++j)
      for (int i = 0; i < r; ++i) w[i] += v[j] * A[j][i];
    out.push_back(std::move(w));
  }
  return out;
}

/// Random decompositions sharing a few planted directions, so that some tuples survive.
inline ExactInstance random_instance(std::mt19937& g, int r, int n, int max_parts = 0) {
  if (max_parts <= 0) max_parts = r;
  ExactInstance inst;
  inst.r = r;
  auto vec = [&] {
    std::vector<Scalar> v(r);
    for (auto& c : v) c = rand_scalar(g, 3);
    return v;
  };
  Columns planted;
  const int k = 1 + static_cast<int>(g() % r);
  while (static_cast<int>(planted.size()) < k) {
    auto v = vec();
    Columns t = planted;
    t.push_back(v);
    if (exact_rank(t, r) == static_cast<int>(t.size())) planted = t;
  }
  for (int p = 0; p < n; ++p) {
    Columns basis;
    for (const auto& v : planted)
      if (g() % 4 != 0) basis.push_back(v);
    while (static_cast<int>(basis.size()) < r) {
      Columns t = basis;
      t.push_back(vec());
      if (exact_rank(t, r) == static_cast<int>(t.size())) basis = t;
    }
    std::shuffle(basis.begin(), basis.end(), g);
    // cut into at most max_parts consecutive nonempty groups
    std::vector<int> cuts;
    for (int j = 1; j < r; ++j) cuts.push_back(j);
    std::shuffle(cuts.begin(), cuts.end(), g);
    const int groups = 1 + static_cast<int>(g() % std::min(r, max_parts));
    cuts.resize(groups - 1);
    cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Columns> parts;
    int start = 0;
    for (int c : cuts) {
      parts.emplace_back(basis.begin() + start, basis.begin() + c);
      start = c;
    }
    inst.points.push_back(parts);
  }
  return inst;
}

inline Subspace to_subspace(const Columns& cols, int r, mpfr_prec_t prec) {
  BallMatrix m(r, static_cast<int>(cols.size()), prec);
  for (size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i < r; ++i) m(i, static_cast<int>(j)) = ComplexBall::exact(cols[j][i], prec);
  return Subspace(std::move(m), static_cast<int>(cols.size()));
}

inline std::vector<std::vector<Subspace>> to_decompositions(const ExactInstance& inst, mpfr_prec_t prec) {
  std::vector<std::vector<Subspace>> out;
  for (const auto& pt : inst.points) {
    std::vector<Subspace> row;
    for (const auto& part : pt) row.push_back(to_subspace(part, inst.r, prec));
    out.push_back(std::move(row));
  }
  return out;
}

/// Every tuple whose subspaces have a nonzero common intersection, by exhaustive search.
inline std::set<std::vector<int>> brute_force_tuples(const ExactInstance& inst) {
  std::set<std::vector<int>> out;
  std::vector<std::pair<std::vector<int>, Columns>> cur{{{}, {}}};
  for (size_t i = 0; i < inst.points.size(); ++i) {
    std::vector<std::pair<std::vector<int>, Columns>> next;
    for (const auto& [t, w] : cur)
      for (size_t j = 0; j < inst.points[i].size(); ++j) {
        Columns x = i == 0 ? inst.points[i][j] : exact_intersection(w, inst.points[i][j], inst.r);
        if (x.empty()) continue;
        auto u = t;
        u.push_back(static_cast<int>(j));
        next.push_back({u, x});
      }
    cur = std::move(next);
  }
  for (const auto& c : cur) out.insert(c.first);
  return out;
}

inline std::set<std::vector<int>> tuples_of(const TupleSet& U) {
  std::set<std::vector<int>> out;
  for (const auto& c : U.candidates) out.insert(c.tuple);
  return out;
}

/// Whether f lies in the C-span of basis (compared over a common denominator).
inline bool in_span(const std::vector<RationalFunction>& basis, const RationalFunction& f) {
  Poly den = f.den();
  for (const auto& b : basis) den = lcm(den, b.den());
  auto numer = [&](const RationalFunction& h) { return h.num() * exact_div(den, h.den()); };
  size_t len = numer(f).coeffs().size();
  for (const auto& b : basis) len = std::max(len, numer(b).coeffs().size());
  auto col = [&](const Poly& p) {
    std::vector<Scalar> c(len);
    for (size_t i = 0; i < p.coeffs().size(); ++i) c[i] = p.coeffs()[i];
    return c;
  };
  Columns cols;
  for (const auto& b : basis) cols.push_back(col(numer(b)));
  const int before = exact_rank(cols, static_cast<int>(len));
  cols.push_back(col(numer(f)));
  return exact_rank(cols, static_cast<int>(len)) == before;
}

/// Subspaces of the reference operator at base point z0, one row per relevant point.
inline std::vector<std::vector<Subspace>> reference_decompositions(const Scalar& z0, mpfr_prec_t prec) {
  DiffOp P = reference_operator();
  auto S = singular_points(P);
  auto pts = S.relevant();
  NumericOptions opt;
  opt.prec = prec;
  std::vector<std::vector<Subspace>> dec;
  for (size_t i = 0; i < pts.size(); ++i) {
    auto lb = local_basis(P, pts[i]);
    std::vector<Subspace> row;
    for (auto& e : pi_evaluate(P, S, lb, static_cast<int>(i), z0, opt)) row.emplace_back(e.generators);
    dec.push_back(std::move(row));
  }
  return dec;
}

}  // namespace testutil
