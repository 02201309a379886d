#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperexp/combine.hpp"
#include "hyperexp/errors.hpp"
#include "hyperexp/local.hpp"
#include "hyperexp/numeric.hpp"
#include "hyperexp/ratsol.hpp"
#include "hyperexp/singular.hpp"

namespace hyperexp {

struct SolverConfig {
  long precision_bits = 128;
  int max_restarts = 6;
  double restart_multiplier = 2;  ///< restart when |U| > multiplier * r
  std::optional<Scalar> base_point;
  int truncation = -1;
  bool apparent_check = true;
  bool json = false;
  double radius_inflation = 0;  ///< test hook, added to every generator radius

  void validate() const {
    if (precision_bits < 53) throw InvalidConfig("precision_bits must be at least 53");
    if (max_restarts < 0) throw InvalidConfig("max_restarts must be non-negative");
    if (truncation == 0 || truncation < -1) throw InvalidConfig("truncation must be positive");
    if (radius_inflation < 0) throw InvalidConfig("radius_inflation must be non-negative");
  }
};

enum class TupleStatus { verified, no_rational_solution, discarded_by_residue_check };

inline const char* to_string(TupleStatus s) {
  switch (s) {
    case TupleStatus::verified: return "verified-solution";
    case TupleStatus::no_rational_solution: return "no-rational-solution";
    case TupleStatus::discarded_by_residue_check: return "discarded-by-residue-check";
  }
  return "";
}

struct TupleReport {
  std::vector<int> tuple;  ///< 0-based part indices, one per relevant point
  TupleStatus status = TupleStatus::no_rational_solution;
  std::vector<int> solutions;  ///< indices into SolutionReport::solutions
};

struct SolutionReport {
  DiffOp input;
  SingularSet singular;
  std::vector<LocalBasis> local;  ///< one per relevant point, in singular.relevant() order
  Scalar base_point;
  std::vector<TupleReport> tuples;
  std::vector<HyperexpTerm> solutions;
  std::vector<std::string> warnings;
  long precision_bits_used = 0;
  int restarts = 0;
  bool conservative = false;  ///< candidate set came from an exhausted restart budget
  double seconds = 0;
};

/// Clearance of z from the finite roots.
inline long double clearance(const Scalar& z, const std::vector<cld>& roots) {
  long double m = std::numeric_limits<long double>::infinity();
  for (const auto& s : roots) m = std::min(m, std::abs(to_cld(z) - s));
  return m;
}

/// Grid search for an ordinary base point. Real parts k/4 with |Re| <= 2 + 2 max|z|,
/// imaginary offsets 0, +-1/4, +-1/2. Clearance counts up to a cap of
/// max(1, diameter/4); among equally good points the smallest |z| wins, then the larger
/// real part, then the larger imaginary part.
inline Scalar select_base_point(const std::vector<cld>& roots) {
  if (roots.empty()) return Scalar(0);
  long double maxz = 0, diam = 0;
  for (const auto& a : roots) {
    maxz = std::max(maxz, std::abs(a));
    for (const auto& b : roots) diam = std::max(diam, std::abs(a - b));
  }
  const long double cap = std::max(1.0L, diam / 4);
  const long kmax = static_cast<long>(std::floor(4 * (2 + 2 * maxz)));
  std::optional<Scalar> best;
  long double best_score = -1, best_abs = 0;
  for (long k = -kmax; k <= kmax; ++k) {
    for (int im : {0, 1, -1, 2, -2}) {
      Scalar z(mpq_class(k, 4), mpq_class(im, 4));
      z = Scalar(mpq_class(z.re()), mpq_class(z.im()));
      long double c = clearance(z, roots);
      if (c == 0) continue;
      long double score = std::min(c, cap);
      long double a = std::abs(to_cld(z));
      bool better = false;
      if (!best || score > best_score + 1e-12L) {
        better = true;
      } else if (std::abs(score - best_score) <= 1e-12L) {
        if (a < best_abs - 1e-12L) {
          better = true;
        } else if (std::abs(a - best_abs) <= 1e-12L) {
          better = z.re() > best->re() || (z.re() == best->re() && z.im() > best->im());
        }
      }
      if (better) {
        best = z;
        best_score = score;
        best_abs = a;
      }
    }
  }
  return *best;
}

inline Scalar select_base_point(const SingularSet& S) { return select_base_point(S.obstacles()); }

namespace detail {

/// Every tuple of candidate parts with a nonzero log-free space, for when numerics fail.
inline std::vector<std::vector<int>> all_tuples(const std::vector<LocalBasis>& local, size_t cap) {
  std::vector<std::vector<int>> out{{}};
  for (const auto& lb : local) {
    std::vector<std::vector<int>> next;
    for (const auto& t : out)
      for (size_t j = 0; j < lb.parts.size(); ++j) {
        if (lb.parts[j].basis.empty()) continue;
        auto u = t;
        u.push_back(static_cast<int>(j));
        next.push_back(std::move(u));
        if (next.size() > cap) return {};
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// All hyperexponential solutions of op, each verified exactly.
inline SolutionReport solve(const DiffOp& op, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (op.is_zero()) throw InvalidConfig("the zero operator has every function as solution");
  const auto t0 = std::chrono::steady_clock::now();
  SolutionReport rep;
  rep.input = op;
  rep.precision_bits_used = cfg.precision_bits;
  const int r = op.order();
  if (r == 0) {
    rep.singular.points.push_back({Point::infinity(), 0, false});
    return rep;
  }
  rep.singular = singular_points(op, cfg.apparent_check);
  const auto pts = rep.singular.relevant();
  for (const auto& p : pts) {
    rep.local.push_back(local_basis(op, p, cfg.truncation));
    for (const auto& lp : rep.local.back().parts) {
      if (lp.part.unsupported)
        rep.warnings.push_back("exponential part at " + p.str() +
                               " has an exponent outside Q(i); skipped");
      else if (lp.part.ramification > 1)
        rep.warnings.push_back("ramified exponential part at " + p.str() +
                               " cannot belong to a hyperexponential solution; skipped");
    }
  }

  std::vector<std::vector<int>> tuples;
  if (pts.size() == 1) {
    for (size_t j = 0; j < rep.local[0].parts.size(); ++j)
      if (!rep.local[0].parts[j].basis.empty()) tuples.push_back({static_cast<int>(j)});
  } else {
    if (cfg.base_point) {
      if (!op.lead().eval(*cfg.base_point).is_zero()) {
        rep.base_point = *cfg.base_point;
      } else {
        throw InvalidConfig("base point " + cfg.base_point->str() + " is a singular point");
      }
    } else {
      rep.base_point = select_base_point(rep.singular);
    }
    auto evaluator = [&](mpfr_prec_t prec) {
      NumericOptions opt;
      opt.prec = prec;
      opt.truncation = cfg.truncation;
      opt.radius_inflation = cfg.radius_inflation;
      std::vector<std::vector<Subspace>> dec;
      for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<std::string> notes;
        auto ev = pi_evaluate(op, rep.singular, rep.local[i], static_cast<int>(i), rep.base_point,
                              opt, &notes);
        std::vector<Subspace> row;
        for (auto& e : ev) row.push_back(e.universal ? Subspace::universal(r) : Subspace(e.generators));
        for (auto& n : notes)
          if (std::find(rep.warnings.begin(), rep.warnings.end(), n) == rep.warnings.end())
            rep.warnings.push_back(n);
        dec.push_back(std::move(row));
      }
      return dec;
    };
    try {
      TupleSet U = solve_with_restarts(evaluator, r, cfg.precision_bits, cfg.max_restarts,
                                       cfg.restart_multiplier, nullptr, &rep.warnings);
      rep.precision_bits_used = U.precision;
      rep.restarts = U.restarts;
      rep.conservative = U.conservative;
      for (const auto& c : U.candidates) tuples.push_back(c.tuple);
    } catch (const PrecisionExhausted& e) {
      // numerics gave up; exact checking of every combination is still sound when small
      tuples = detail::all_tuples(rep.local, 4096);
      if (tuples.empty()) throw;
      rep.conservative = true;
      rep.restarts = cfg.max_restarts;
      rep.precision_bits_used = cfg.precision_bits << cfg.max_restarts;
      rep.warnings.push_back(std::string(e.what()) +
                             "; every combination of exponential parts was checked exactly");
    }
  }

  for (const auto& t : tuples) {
    std::vector<ChosenPart> chosen;
    for (size_t i = 0; i < t.size(); ++i) chosen.push_back({pts[i], rep.local[i].parts[t[i]].part});
    FinishResult fr = finish_candidate(op, chosen);
    TupleReport tr;
    tr.tuple = t;
    if (fr.discarded) {
      tr.status = TupleStatus::discarded_by_residue_check;
    } else if (fr.solutions.empty()) {
      tr.status = TupleStatus::no_rational_solution;
    } else {
      tr.status = TupleStatus::verified;
      for (auto& h : fr.solutions) {
        tr.solutions.push_back(static_cast<int>(rep.solutions.size()));
        rep.solutions.push_back(std::move(h));
      }
    }
    rep.tuples.push_back(std::move(tr));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Human-readable summary of a report.
inline std::string pretty(const SolutionReport& rep) {
  std::ostringstream os;
  os << "operator: " << rep.input.str() << "\n";
  os << "singular points:";
  for (const auto& s : rep.singular.points)
    os << " " << s.point.str() << (s.apparent ? " (apparent)" : "");
  for (const auto& g : rep.singular.apparent_groups) os << " roots of " << g.factor.str() << " (apparent)";
  os << "\n";
  const auto pts = rep.singular.relevant();
  for (size_t i = 0; i < rep.local.size(); ++i) {
    os << "parts at " << pts[i].str() << ":\n";
    for (size_t j = 0; j < rep.local[i].parts.size(); ++j) {
      const auto& lp = rep.local[i].parts[j];
      os << "  " << j + 1 << ": e = " << lp.part.str() << "  dim " << lp.dim << ", log-free "
         << lp.dim0 << "\n";
    }
  }
  if (pts.size() > 1) os << "base point: " << rep.base_point.str() << "\n";
  os << "candidates:";
  for (const auto& t : rep.tuples) {
    os << " (";
    for (size_t i = 0; i < t.tuple.size(); ++i) os << (i ? "," : "") << t.tuple[i] + 1;
    os << ")";
  }
  os << "\n";
  os << "solutions (" << rep.solutions.size() << "):\n";
  for (const auto& h : rep.solutions) os << "  " << h.str() << "\n";
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace hyperexp
