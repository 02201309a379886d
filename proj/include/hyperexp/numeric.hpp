#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "hyperexp/ball.hpp"
#include "hyperexp/diffop.hpp"
#include "hyperexp/errors.hpp"
#include "hyperexp/local.hpp"
#include "hyperexp/singular.hpp"

namespace hyperexp {

/// A root of the leading coefficient to be kept at a distance.
struct Obstacle {
  cld z;
  long double clearance;
};

/// Polygonal path through exact points.
struct Path {
  std::vector<Scalar> waypoints;
};

namespace detail {

inline long double seg_distance(cld a, cld b, cld o) {
  cld d = b - a;
  long double len2 = std::norm(d);
  if (len2 == 0) return std::abs(o - a);
  long double s = ((o - a) * std::conj(d)).real() / len2;
  s = std::clamp(s, 0.0L, 1.0L);
  return std::abs(a + s * d - o);
}

inline Scalar dyadic(cld z, int bits) {
  auto round_to = [bits](long double v) {
    long double scaled = std::ldexp(v, bits);
    mpz_class n(static_cast<double>(std::floor(scaled + 0.5L)));
    mpq_class q(n, 1);
    q /= mpq_class(mpz_class(1) << bits);
    q.canonicalize();
    return q;
  };
  return Scalar(round_to(z.real()), round_to(z.imag()));
}

inline long double clearance_at(cld z, const std::vector<Obstacle>& obs) {
  long double m = std::numeric_limits<long double>::infinity();
  for (const auto& o : obs) m = std::min(m, std::abs(z - o.z) / o.clearance);
  return m;
}

inline void route(const Scalar& a, const Scalar& b, const std::vector<Obstacle>& obs, int bits,
                  int depth, std::vector<Scalar>& out) {
  if (depth > 40) throw PathTooCloseToSingularity("no admissible path found");
  cld ca = to_cld(a), cb = to_cld(b);
  const Obstacle* worst = nullptr;
  long double best_s = 2;
  for (const auto& o : obs) {
    if (seg_distance(ca, cb, o.z) >= o.clearance) continue;
    cld d = cb - ca;
    long double s = std::norm(d) == 0 ? 0 : ((o.z - ca) * std::conj(d)).real() / std::norm(d);
    if (s < best_s) {
      best_s = s;
      worst = &o;
    }
  }
  if (!worst) {
    out.push_back(b);
    return;
  }
  cld u = (cb - ca) / std::abs(cb - ca);
  cld n = u * cld(0, 1);
  // two waypoints beside the obstacle, on whichever side has more room
  std::vector<Scalar> chosen;
  long double chosen_room = -1;
  for (long double mult : {2.0L, 3.0L, 4.0L, 6.0L, 8.0L}) {
    for (int side : {1, -1}) {
      long double d = mult * worst->clearance;
      cld w1 = worst->z + static_cast<long double>(side) * d * n - d * u;
      cld w2 = worst->z + static_cast<long double>(side) * d * n + d * u;
      long double room = std::min(clearance_at(w1, obs), clearance_at(w2, obs));
      if (room > chosen_room) {
        chosen_room = room;
        chosen = {dyadic(w1, bits), dyadic(w2, bits)};
      }
    }
    if (chosen_room >= 1.5L) break;
  }
  if (chosen_room < 1.0L) throw PathTooCloseToSingularity("obstacles too dense for a detour");
  route(a, chosen[0], obs, bits, depth + 1, out);
  route(chosen[0], chosen[1], obs, bits, depth + 1, out);
  route(chosen[1], b, obs, bits, depth + 1, out);
}

}  // namespace detail

/// 1/8 of the minimal pairwise distance between obstacles (1 if fewer than two).
inline long double path_clearance(const std::vector<cld>& roots) {
  long double m = std::numeric_limits<long double>::infinity();
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j) m = std::min(m, std::abs(roots[i] - roots[j]));
  return std::isfinite(m) ? m / 8 : 1.0L;
}

/// Polygonal path from a to b keeping every segment at least the clearance away from obstacles.
inline Path make_path(const Scalar& a, const Scalar& b, const std::vector<Obstacle>& obs) {
  long double minc = 1;
  for (const auto& o : obs) minc = std::min(minc, o.clearance);
  int bits = 4 + static_cast<int>(std::ceil(std::log2(1.0L / minc)));
  Path p;
  p.waypoints.push_back(a);
  if (a == b) return p;
  detail::route(a, b, obs, bits, 0, p.waypoints);
  return p;
}

/// Transition matrix for one Taylor step from c to c + h (both exact).
inline BallMatrix taylor_step(const DiffOp& op, const Scalar& c, const Scalar& h, mpfr_prec_t prec) {
  const int r = op.order();
  ComplexBall H = ComplexBall::exact(h, prec);
  // s_{i,k} = [t^k] p_i(c + t) * h^{k + r - i}
  std::vector<std::vector<ComplexBall>> s(r + 1);
  const int maxk = op.degree();
  std::vector<ComplexBall> hp(maxk + r + 1, ComplexBall(prec));
  hp[0] = ComplexBall::from_si(1, prec);
  for (size_t k = 1; k < hp.size(); ++k) hp[k] = hp[k - 1] * H;
  for (int i = 0; i <= r; ++i) {
    Poly q = taylor_shift(op.coeff(i), c);
    for (int k = 0; k <= q.degree(); ++k) s[i].push_back(ComplexBall::exact(q.coeffs()[k], prec) * hp[k + r - i]);
  }
  if (s[r].empty() || s[r][0].contains_zero())
    throw PathTooCloseToSingularity("taylor step centred at a singular point");
  ComplexBall inv_lead = s[r][0].inverse();
  const Mag eps = Mag::pow2(-static_cast<long>(prec));
  const long max_terms = 40L * prec + 200;

  BallMatrix M(r, r, prec);
  for (int col = 0; col < r; ++col) {
    // scaled coefficients a_n h^n
    std::vector<ComplexBall> a(r, ComplexBall(prec));
    a[col] = hp[col];
    for (int f = 2; f <= col; ++f) a[col] = a[col].divided(f);
    Mag scale = Mag(1.0);
    int small_run = 0;
    Mag last_max;
    for (long m = 0;; ++m) {
      const long n = m + r;
      if (n > max_terms) throw PrecisionExhausted("taylor step did not converge");
      ComplexBall acc(prec);
      for (int i = 0; i <= r; ++i) {
        for (size_t k = 0; k < s[i].size(); ++k) {
          if (i == r && k == 0) continue;
          long idx = m - static_cast<long>(k) + i;
          if (idx < 0) continue;
          if (a[idx].contains_zero() && a[idx].rad().is_zero()) continue;
          ComplexBall t = s[i][k] * a[idx];
          for (int f = 0; f < i; ++f) t = t.scaled(idx - f);
          acc += t;
        }
      }
      ComplexBall an = -(acc * inv_lead);
      for (int f = 0; f < r; ++f) an = an.divided(n - f);
      // Radii would follow the majorant series, which converges far slower than the
      // solution itself; rounding is accounted for once, below.
      an.set_rad(Mag());
      a.push_back(an);
      Mag term = an.abs_up() * Mag(std::pow(static_cast<double>(n + 1), r));
      scale = max(scale, an.abs_up());
      if (term <= eps * scale) {
        ++small_run;
      } else {
        small_run = 0;
      }
      last_max = small_run == 1 ? term : max(last_max, term);
      if (small_run >= 8) break;
    }
    const long N = static_cast<long>(a.size()) - 1;
    // y^{(j)}(c+h) = h^{-j} sum_n a_n h^n n!/(n-j)!
    ComplexBall hinv = H.inverse();
    ComplexBall hj = ComplexBall::from_si(1, prec);
    for (int j = 0; j < r; ++j) {
      ComplexBall sum(prec);
      for (long n = j; n <= N; ++n) {
        ComplexBall t = a[n];
        for (int f = 0; f < j; ++f) t = t.scaled(n - f);
        sum += t;
      }
      sum = sum * hj;
      // heuristic tail: twice the last term magnitude, with derivative growth
      Mag tail = last_max * Mag(2.0 * std::pow(static_cast<double>(N + 1 + j), j));
      tail = tail + eps * scale * Mag(16.0 * std::pow(static_cast<double>(N + 1), j + 1));
      tail = tail * hj.abs_up();
      sum.add_error(tail);
      M(j, col) = sum;
      hj = hj * hinv;
    }
  }
  return M;
}

/// Ball enclosure of the transition matrix along path (analytic continuation of the
/// vector (y, y', ..., y^{(r-1)})).
inline BallMatrix transition_matrix(const DiffOp& op, const Path& path, mpfr_prec_t prec,
                                    const std::vector<cld>& singular) {
  const int r = op.order();
  BallMatrix M = BallMatrix::identity(r, prec);
  if (path.waypoints.size() < 2) return M;
  long double minsep = path_clearance(singular);
  int bits = 8 + static_cast<int>(std::ceil(std::log2(1.0L / std::min(1.0L, minsep))));
  auto dist = [&](cld z) {
    long double m = std::numeric_limits<long double>::infinity();
    for (const auto& s : singular) m = std::min(m, std::abs(z - s));
    return m;
  };
  for (size_t w = 0; w + 1 < path.waypoints.size(); ++w) {
    Scalar c = path.waypoints[w];
    const Scalar& b = path.waypoints[w + 1];
    while (c != b) {
      cld cc = to_cld(c), cb = to_cld(b);
      long double d = dist(cc);
      long double remain = std::abs(cb - cc);
      Scalar next;
      if (remain <= 0.5L * d) {
        next = b;
      } else {
        cld target = cc + (cb - cc) * (0.45L * d / remain);
        next = detail::dyadic(target, bits);
        if (next == c) throw PathTooCloseToSingularity("step size underflow");
      }
      M = taylor_step(op, c, next - c, prec) * M;
      if (!M.is_finite() ||
          Mag(1e-3) * M.max_abs() < M.max_rad())
        throw PrecisionExhausted("transition matrix radius blow-up");
      c = next;
    }
  }
  return M;
}

/// Local coordinate of x at point p, exactly.
inline Scalar local_coordinate(const Point& p, const Scalar& x) {
  return p.infinite ? Scalar(1) / x : x - p.z;
}

namespace detail {

/// Jet in t of the local coordinate x~(x_e + t).
inline jet::Jet coordinate_jet(const Point& p, const Scalar& xe, int r, mpfr_prec_t prec) {
  jet::Jet X(r, ComplexBall(prec));
  if (!p.infinite) {
    X[0] = ComplexBall::exact(xe - p.z, prec);
    if (r > 1) X[1] = ComplexBall::from_si(1, prec);
    return X;
  }
  // 1/(x_e + t) = sum_k (-1)^k t^k / x_e^{k+1}
  Scalar inv = Scalar(1) / xe;
  Scalar c = inv;
  for (int k = 0; k < r; ++k) {
    X[k] = ComplexBall::exact(c, prec);
    c = -c * inv;
  }
  return X;
}

inline jet::Jet exp_part_jet(const ExponentialPart& part, const jet::Jet& X) {
  const mpfr_prec_t prec = X[0].prec();
  jet::Jet g(X.size(), ComplexBall(prec));
  if (!part.alpha.is_zero()) g = jet::scale(jet::log(X), ComplexBall::exact(part.alpha, prec));
  if (!part.u.empty()) {
    jet::Jet xinv = jet::inverse(X);
    jet::Jet pw = xinv;
    for (size_t k = 0; k < part.u.size(); ++k) {
      if (!part.u[k].is_zero())
        g = jet::add(g, jet::scale(pw, ComplexBall::exact(part.u[k], prec)));
      pw = jet::mul(pw, xinv);
    }
  }
  return jet::exp(g);
}

}  // namespace detail

/// Values E, E', ..., E^{(r-1)} (derivatives in x) of x~^alpha exp(u) at x, principal branch.
inline std::vector<ComplexBall> eval_exponential_part(const ExponentialPart& part, const Point& p,
                                                      const Scalar& x, int r, mpfr_prec_t prec) {
  jet::Jet E = detail::exp_part_jet(part, detail::coordinate_jet(p, x, r, prec));
  std::vector<ComplexBall> out;
  long fact = 1;
  for (int j = 0; j < r; ++j) {
    if (j > 1) fact *= j;
    out.push_back(E[j].scaled(fact));
  }
  return out;
}

/// Outcome of the tail estimate for one series.
struct TailInfo {
  double growth = 0;  ///< estimated limsup |b_n|^{1/n}
  bool finite = true;
};

/// Columns (y, y', ..., y^{(r-1)}) at x_e of the series in `basis` (all from one part).
/// Throws TailBoundFailed when the estimated tail exceeds 2^-prec relative, unless
/// accept_any_finite is set.
inline BallMatrix local_initial_values(const std::vector<GeneralizedSeries>& basis, const Point& p,
                                       const Scalar& xe, int r, mpfr_prec_t prec,
                                       bool accept_any_finite = false, TailInfo* info = nullptr) {
  BallMatrix out(r, static_cast<int>(basis.size()), prec);
  if (basis.empty()) return out;
  jet::Jet X = detail::coordinate_jet(p, xe, r, prec);
  jet::Jet E = detail::exp_part_jet(basis[0].part, X);
  const Scalar xt = local_coordinate(p, xe);
  const double axt = std::abs(std::complex<double>(to_cld(xt)));
  for (size_t col = 0; col < basis.size(); ++col) {
    const auto& s = basis[col];
    const int N = s.N;
    jet::Jet B = jet::constant(ComplexBall::exact(s.b[N], prec), r);
    for (int n = N - 1; n >= 0; --n) {
      B = jet::mul(B, X);
      B[0] += ComplexBall::exact(s.b[n], prec);
    }
    // growth estimate from the last quarter of the coefficients
    double K = 0;
    for (int n = std::max(1, 3 * N / 4); n <= N; ++n) {
      if (s.b[n].is_zero()) continue;
      mpfr_t t;
      mpfr_init2(t, 64);
      Real re(64), im(64);
      mpfr_set_q(re.get(), s.b[n].re().get_mpq_t(), MPFR_RNDN);
      mpfr_set_q(im.get(), s.b[n].im().get_mpq_t(), MPFR_RNDN);
      mpfr_hypot(t, re.get(), im.get(), MPFR_RNDU);
      mpfr_log(t, t, MPFR_RNDU);
      double lg = mpfr_get_d(t, MPFR_RNDU) / n;
      mpfr_clear(t);
      K = std::max(K, std::exp(lg));
    }
    if (info) info->growth = std::max(info->growth, K);
    Mag scale;
    for (const auto& c : B) scale = max(scale, c.mid_abs_up());
    if (K > 0) {
      const double q = 2 * K * axt;
      const double ratio = q * std::pow(1.0 + 1.0 / (N + 1), r);
      if (!(ratio < 1)) {
        if (info) info->finite = false;
        throw TailBoundFailed("series tail is not geometrically bounded at the evaluation point");
      }
      Mag qN = Mag(q).pow_ui(N + 1);
      double fact = 1;
      for (int j = 0; j < r; ++j) {
        if (j > 1) fact *= j;
        double growth = p.infinite ? std::pow(N + 1.0 + j, j) * std::pow(axt, j)
                                   : std::pow(N + 1.0, j) / std::pow(axt, j);
        Mag tail = qN * Mag(growth / (fact * (1 - ratio)));
        if (!accept_any_finite && Mag::pow2(-static_cast<long>(prec)) * scale < tail)
          throw TailBoundFailed("series tail above the working precision");
        B[j].add_error(tail);
      }
    }
    jet::Jet Y = jet::mul(E, B);
    long fact = 1;
    for (int j = 0; j < r; ++j) {
      if (j > 1) fact *= j;
      out(j, static_cast<int>(col)) = Y[j].scaled(fact);
    }
  }
  return out;
}

/// Generators of W_{i,j} at the base point for one part.
struct EvaluatedSubspace {
  int point_index = 0;
  int part_index = 0;
  BallMatrix generators;  ///< r x dim, columns (y, y', ..., y^{(r-1)}) at z0
  bool universal = false;  ///< series could not be evaluated; treated as intersecting everything
  std::string note;
};

struct NumericOptions {
  mpfr_prec_t prec = 128;
  int truncation = -1;  ///< fixed truncation order, or -1 for the adaptive default
  double radius_inflation = 0;  ///< test hook: added to every generator radius
};

/// Point near p where the local series are evaluated, and the path from there to z0.
struct EvaluationSite {
  Scalar xe;
  Path path;
};

inline EvaluationSite evaluation_site(const Point& p, const Scalar& z0, double rho,
                                      const std::vector<Obstacle>& obstacles,
                                      const std::vector<Scalar>& finite_points) {
  EvaluationSite site;
  auto clear = [&](const Scalar& x) {
    cld c = to_cld(x);
    for (const auto& o : obstacles) {
      if (!p.infinite && std::abs(o.z - to_cld(p.z)) < 1e-30L) continue;
      if (std::abs(c - o.z) < o.clearance) return false;
    }
    return true;
  };
  if (!p.infinite) {
    const Scalar d = z0 - p.z;
    const double ad = std::abs(std::complex<double>(to_cld(d)));
    int k = 2;
    while (ad * std::ldexp(1.0, -k) > rho / 4 * (1 - 1e-12)) ++k;
    for (;; ++k) {
      site.xe = p.z + d * Scalar(mpq_class(1, mpz_class(1) << k));
      if (clear(site.xe) || k > 60) break;
    }
  } else {
    double maxz = 0;
    for (const auto& z : finite_points) maxz = std::max(maxz, std::abs(std::complex<double>(to_cld(z))));
    double need = 2 * maxz + std::abs(std::complex<double>(to_cld(z0)));
    if (std::isfinite(rho)) need = std::max(need, 4 / rho);
    need = std::max(need, 1.0) * (1 + 1e-9);
    const double az = std::abs(std::complex<double>(to_cld(z0)));
    Scalar dir = az == 0 ? Scalar(1) : z0;
    long t = static_cast<long>(std::ceil(az == 0 ? need : need / az));
    for (;; ++t) {
      site.xe = dir * Scalar(t);
      if (clear(site.xe) || t > 1000000) break;
    }
  }
  std::vector<Obstacle> obs = obstacles;
  if (!p.infinite) {
    // the own singular point only needs to be avoided by half the starting distance
    long double half = std::abs(to_cld(site.xe - p.z)) / 2;
    for (auto& o : obs)
      if (std::abs(o.z - to_cld(p.z)) < 1e-30L) o.clearance = std::min(o.clearance, half);
  }
  site.path = make_path(site.xe, z0, obs);
  return site;
}

/// Obstacles from the singular set: every finite root of p_r with clearance delta.
/// Non-apparent points get more room (a quarter of the distance to the next one, at
/// most 1) since solutions may grow or oscillate wildly near them.
inline std::vector<Obstacle> make_obstacles(const SingularSet& S) {
  auto roots = S.obstacles();
  long double delta = path_clearance(roots);
  std::vector<cld> real_sing;
  for (const auto& z : S.finite_relevant()) real_sing.push_back(to_cld(z));
  std::vector<Obstacle> out;
  for (const auto& z : roots) {
    long double c = delta;
    bool singular = false;
    long double nearest = std::numeric_limits<long double>::infinity();
    for (const auto& w : real_sing) {
      long double d = std::abs(z - w);
      if (d < 1e-30L) singular = true;
      else nearest = std::min(nearest, d);
    }
    if (singular) c = std::max(c, std::min(nearest / 4, 1.0L));
    out.push_back({z, c});
  }
  return out;
}

/// pi_i: generators of W_{i,j} at z0 for every part of the local basis at one point.
/// `local` is the local operator at the point; parts with empty log-free subspace give
/// zero-column generators.
inline std::vector<EvaluatedSubspace> pi_evaluate(const DiffOp& op, const SingularSet& S,
                                                  LocalBasis& lb, int point_index,
                                                  const Scalar& z0, const NumericOptions& opt,
                                                  std::vector<std::string>* warnings = nullptr) {
  const int r = op.order();
  const Point& p = lb.point;
  DiffOp loc = local_operator(op, p);
  Poly app = local_poly(S.apparent_factor(), p);
  double rho = std::numeric_limits<double>::infinity();
  std::vector<double> part_rho(lb.parts.size(), rho);
  for (size_t j = 0; j < lb.parts.size(); ++j) {
    if (lb.parts[j].basis.empty()) continue;
    part_rho[j] = convergence_radius_estimate(twist(loc, lb.parts[j].part.log_derivative()), app);
    rho = std::min(rho, part_rho[j]);
  }
  auto obstacles = make_obstacles(S);
  std::vector<EvaluatedSubspace> out;
  bool any = false;
  for (const auto& lp : lb.parts) any = any || !lp.basis.empty();
  EvaluationSite site;
  BallMatrix M;
  if (any) {
    site = evaluation_site(p, z0, rho, obstacles, S.finite_relevant());
    M = transition_matrix(op, site.path, opt.prec, S.obstacles());
  }
  for (size_t j = 0; j < lb.parts.size(); ++j) {
    auto& lp = lb.parts[j];
    EvaluatedSubspace ev;
    ev.point_index = point_index;
    ev.part_index = static_cast<int>(j);
    ev.generators = BallMatrix(r, 0, opt.prec);
    if (lp.basis.empty()) {
      out.push_back(std::move(ev));
      continue;
    }
    const int base_n = lp.basis[0].N;
    int n = base_n;
    BallMatrix liv;
    for (int attempt = 0;; ++attempt) {
      const bool last = attempt >= 3 || opt.truncation > 0;
      TailInfo info;
      try {
        liv = local_initial_values(lp.basis, p, site.xe, r, opt.prec, last, &info);
        break;
      } catch (const TailBoundFailed&) {
        // coefficient growth against the expected radius: about 1 for a convergent series.
        // Far above it the series is divergent and more terms would only cost time.
        const double rho_j = std::isfinite(part_rho[j])
                                 ? part_rho[j]
                                 : 4 * std::abs(std::complex<double>(to_cld(local_coordinate(p, site.xe))));
        const double growth = info.growth * rho_j;
        if (growth > 4 || (last && (growth > 2 || !info.finite))) {
          ev.universal = true;
          ev.note = "divergent series suspected at " + p.str();
          if (warnings) warnings->push_back(ev.note + "; part treated as intersecting every subspace");
          break;
        }
        if (last) throw PrecisionExhausted("local series tail could not be bounded");
        n *= 2;
        lp.basis = frobenius_basis(loc, lp.part, n);
      }
    }
    if (!ev.universal) {
      ev.generators = M * liv;
      if (opt.radius_inflation > 0) ev.generators.inflate(Mag(opt.radius_inflation));
    }
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace hyperexp
