#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hyperexp/ball.hpp"
#include "hyperexp/errors.hpp"

namespace hyperexp {

/// Counts scalar ball operations spent in intersections.
struct OpCounter {
  long ops = 0;
};

namespace detail {

/// Column echelon form: reduced columns with their pivot rows.
struct Echelon {
  std::vector<std::vector<ComplexBall>> cols;
  std::vector<int> pivot_rows;
  bool uncertain = false;  ///< some generator could not be certified independent
};

inline double pivot_quality(const ComplexBall& b) {
  if (b.contains_zero()) return -1;
  double mid = b.mid_abs_down().to_double();
  double rad = b.rad().to_double() + std::ldexp(mid, -static_cast<int>(b.prec()));
  if (rad == 0) return std::numeric_limits<double>::infinity();
  return mid / rad;
}

/// Reduces w against the pivots in order. Returns the coefficient of each pivot used.
inline void reduce(std::vector<ComplexBall>& w, const Echelon& e, OpCounter* cnt,
                   std::vector<ComplexBall>* coef = nullptr) {
  const size_t r = w.size();
  for (size_t k = 0; k < e.cols.size(); ++k) {
    const int pr = e.pivot_rows[k];
    ComplexBall f = w[pr] / e.cols[k][pr];
    for (size_t i = 0; i < r; ++i) {
      if (static_cast<int>(i) == pr) continue;
      w[i] -= f * e.cols[k][i];
    }
    w[pr] = ComplexBall(w[pr].prec());
    if (cnt) cnt->ops += 1 + 2 * static_cast<long>(r - 1);
    if (coef) coef->push_back(f);
  }
}

/// Best certified pivot row of w outside the used rows, or -1.
inline int choose_pivot(const std::vector<ComplexBall>& w, const std::vector<int>& used) {
  int best = -1;
  double q = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (std::find(used.begin(), used.end(), static_cast<int>(i)) != used.end()) continue;
    double qi = pivot_quality(w[i]);
    if (qi > q) {
      q = qi;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace detail

/// Subspace of C^r spanned by the columns of a ball matrix.
class Subspace {
 public:
  Subspace() = default;
  Subspace(BallMatrix gens, int dim_lower = 0) : gens_(std::move(gens)), lower_(dim_lower) {}

  /// The "intersects everything" placeholder for parts that could not be evaluated.
  static Subspace universal(int r) {
    Subspace s;
    s.universal_ = true;
    s.ambient_ = r;
    s.lower_ = 0;
    return s;
  }

  bool is_universal() const { return universal_; }
  const BallMatrix& generators() const { return gens_; }
  int ambient() const { return universal_ ? ambient_ : gens_.rows(); }
  int size() const { return universal_ ? ambient_ : gens_.cols(); }
  /// Certified lower bound on the dimension.
  int dim_lower() const { return lower_; }
  /// Conservative upper bound on the dimension.
  int dim_upper() const { return size(); }
  bool is_zero() const { return !universal_ && gens_.cols() == 0; }

  /// Echelon form of the generators, computed once.
  const detail::Echelon& echelon(OpCounter* cnt = nullptr) const {
    if (!ech_) {
      auto e = std::make_shared<detail::Echelon>();
      for (int j = 0; j < gens_.cols(); ++j) {
        std::vector<ComplexBall> w;
        for (int i = 0; i < gens_.rows(); ++i) w.push_back(gens_(i, j));
        detail::reduce(w, *e, cnt);
        int p = detail::choose_pivot(w, e->pivot_rows);
        if (p < 0) {
          e->uncertain = true;
          continue;
        }
        e->cols.push_back(std::move(w));
        e->pivot_rows.push_back(p);
      }
      ech_ = e;
    }
    return *ech_;
  }

 private:
  BallMatrix gens_;
  bool universal_ = false;
  int ambient_ = 0;
  int lower_ = 0;
  mutable std::shared_ptr<const detail::Echelon> ech_;
};

struct Intersection {
  Subspace space;
  bool certainly_empty = false;
  bool certain = true;  ///< every column decision was definite
};

/// Intersection of two subspaces by Gaussian elimination on [A | B]. A column of B that
/// leaves no certified pivot is counted as a rank deficiency and contributes a generator.
inline Intersection intersect(const Subspace& A, const Subspace& B, OpCounter* cnt = nullptr) {
  Intersection out;
  if (A.is_universal() && B.is_universal()) {
    out.space = A;
    return out;
  }
  if (A.is_universal() || B.is_universal()) {
    out.space = A.is_universal() ? B : A;
    out.certainly_empty = out.space.is_zero();
    return out;
  }
  const int r = A.ambient();
  if (A.is_zero() || B.is_zero()) {
    out.certainly_empty = true;
    out.space = Subspace(BallMatrix(r, 0, 128), 0);
    return out;
  }
  const mpfr_prec_t prec = B.generators()(0, 0).prec();
  const detail::Echelon& ea = A.echelon(cnt);
  detail::Echelon work = ea;
  work.uncertain = false;
  const BallMatrix& gb = B.generators();
  const int b = gb.cols();
  const size_t na = ea.cols.size();
  // coefficient of each B generator in each pivot column from B
  std::vector<std::vector<ComplexBall>> bcoef;
  std::vector<std::vector<ComplexBall>> null_coef;
  bool ambiguous = ea.uncertain;
  for (int j = 0; j < b; ++j) {
    std::vector<ComplexBall> w;
    for (int i = 0; i < r; ++i) w.push_back(gb(i, j));
    std::vector<ComplexBall> f;
    detail::reduce(w, work, cnt, &f);
    // B-coefficients of the reduced column: e_j - sum f_k * (B-part of pivot k)
    std::vector<ComplexBall> c(b, ComplexBall(prec));
    c[j] = ComplexBall::from_si(1, prec);
    for (size_t k = na; k < work.cols.size(); ++k)
      for (int t = 0; t < b; ++t) c[t] -= f[k] * bcoef[k - na][t];
    int p = detail::choose_pivot(w, work.pivot_rows);
    if (p >= 0) {
      work.cols.push_back(std::move(w));
      work.pivot_rows.push_back(p);
      bcoef.push_back(std::move(c));
      continue;
    }
    bool exact_zero = true;
    for (const auto& x : w)
      if (!(x.rad().is_zero() && x.mid_abs_up().is_zero())) exact_zero = false;
    if (!exact_zero) ambiguous = true;
    null_coef.push_back(std::move(c));
  }
  out.certain = !ambiguous;
  if (ea.uncertain) {
    // A itself is not certified; B is a safe enclosure of the intersection.
    out.space = B;
    return out;
  }
  if (null_coef.empty()) {
    out.certainly_empty = true;
    out.space = Subspace(BallMatrix(r, 0, prec), 0);
    return out;
  }
  BallMatrix g(r, static_cast<int>(null_coef.size()), prec);
  for (size_t q = 0; q < null_coef.size(); ++q)
    for (int i = 0; i < r; ++i) {
      ComplexBall acc(prec);
      for (int t = 0; t < b; ++t) acc += gb(i, t) * null_coef[q][t];
      g(i, static_cast<int>(q)) = acc;
      if (cnt) cnt->ops += 2L * b;
    }
  out.space = Subspace(std::move(g), 0);
  return out;
}

/// A tuple of part indices (0-based, one per point) with its subspace W_k.
struct Candidate {
  std::vector<int> tuple;
  Subspace space;
  bool certain = true;
};

struct TupleSet {
  std::vector<Candidate> candidates;
  bool conservative = false;  ///< restart budget exhausted; the set may be too large
  mpfr_prec_t precision = 0;
  int restarts = 0;
};

struct Algorithm2Options {
  double restart_multiplier = 2;  ///< restart when |U| exceeds this times r; <= 0 disables
  OpCounter* counter = nullptr;
};

/// Dynamic programming over the points: keep every tuple whose subspaces may intersect.
/// decompositions[i][j] is W_{i,j}, the evaluated log-free part j at point i.
inline TupleSet algorithm2(const std::vector<std::vector<Subspace>>& decompositions, int r,
                           const Algorithm2Options& opt = {}) {
  TupleSet U;
  if (decompositions.empty()) return U;
  for (size_t j = 0; j < decompositions[0].size(); ++j) {
    const Subspace& w = decompositions[0][j];
    if (w.is_zero()) continue;
    U.candidates.push_back({{static_cast<int>(j)}, w, true});
  }
  const double limit = opt.restart_multiplier * r;
  auto check = [&](size_t n) {
    if (opt.restart_multiplier > 0 && static_cast<double>(n) > limit)
      throw RestartRequested("candidate set has " + std::to_string(n) + " tuples, more than " +
                             std::to_string(static_cast<int>(limit)));
  };
  check(U.candidates.size());
  for (size_t i = 1; i < decompositions.size(); ++i) {
    std::vector<Candidate> next;
    for (const auto& k : U.candidates) {
      for (size_t j = 0; j < decompositions[i].size(); ++j) {
        const Subspace& w = decompositions[i][j];
        if (w.is_zero()) continue;
        Intersection x = intersect(k.space, w, opt.counter);
        if (x.certainly_empty) continue;
        Candidate c{k.tuple, std::move(x.space), k.certain && x.certain};
        c.tuple.push_back(static_cast<int>(j));
        next.push_back(std::move(c));
      }
    }
    U.candidates = std::move(next);
    check(U.candidates.size());
  }
  return U;
}

/// Runs algorithm2 at doubling precision until the candidate set is small enough.
/// The evaluator may also throw PrecisionExhausted, which triggers a restart too.
inline TupleSet solve_with_restarts(
    const std::function<std::vector<std::vector<Subspace>>(mpfr_prec_t)>& evaluator, int r,
    mpfr_prec_t prec, int max_restarts = 6, double restart_multiplier = 2,
    OpCounter* counter = nullptr, std::vector<std::string>* warnings = nullptr) {
  if (max_restarts < 0) throw InvalidConfig("max_restarts must be non-negative");
  Algorithm2Options opt{restart_multiplier, counter};
  for (int attempt = 0;; ++attempt, prec *= 2) {
    const bool last = attempt >= max_restarts;
    std::vector<std::vector<Subspace>> dec;
    try {
      dec = evaluator(prec);
    } catch (const PrecisionExhausted& e) {
      if (last) throw;
      if (warnings) warnings->push_back(std::string(e.what()) + "; restarting at " +
                                        std::to_string(2 * prec) + " bits");
      continue;
    }
    try {
      TupleSet U = algorithm2(dec, r, opt);
      U.precision = prec;
      U.restarts = attempt;
      return U;
    } catch (const RestartRequested& e) {
      if (!last) {
        if (warnings)
          warnings->push_back(std::string(e.what()) + "; restarting at " +
                              std::to_string(2 * prec) + " bits");
        continue;
      }
      Algorithm2Options loose = opt;
      loose.restart_multiplier = 0;
      TupleSet U = algorithm2(dec, r, loose);
      U.precision = prec;
      U.restarts = attempt;
      U.conservative = true;
      if (warnings)
        warnings->push_back("restart budget exhausted; returning a conservative candidate set of " +
                            std::to_string(U.candidates.size()) + " tuples");
      return U;
    }
  }
}

}  // namespace hyperexp
