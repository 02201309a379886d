#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace hyperexp;
using testutil::contains_real;

namespace {

const mpfr_prec_t kPrec = 128;

struct MpVal {
  mpfr_t v;
  MpVal() { mpfr_init2(v, 512); }
  ~MpVal() { mpfr_clear(v); }
  MpVal(const MpVal&) = delete;
  MpVal& operator=(const MpVal&) = delete;
};

Path path_of(std::initializer_list<Scalar> w) {
  Path p;
  p.waypoints = w;
  return p;
}

bool overlap(const ComplexBall& a, const ComplexBall& b) {
  return std::abs(a.mid() - b.mid()) <= a.rad().to_double() + b.rad().to_double() + 1e-300;
}

ComplexBall det3(const BallMatrix& m) {
  auto e = [&](int i, int j) { return m(i, j); };
  return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
         e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
         e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
}

}  // namespace

TEST_CASE("transition matrix of D - 1 from 0 to 1 encloses e", "[numeric]") {
  BallMatrix M = transition_matrix(parse_operator("Dx - 1"), path_of({Scalar(0), Scalar(1)}), kPrec, {});
  MpVal e;
  mpfr_set_ui(e.v, 1, MPFR_RNDN);
  mpfr_exp(e.v, e.v, MPFR_RNDN);
  CHECK(contains_real(M(0, 0), e.v));
  CHECK(M(0, 0).rad().to_double() < 1e-30);
}

TEST_CASE("a path with a single point gives the identity", "[numeric]") {
  BallMatrix M = transition_matrix(parse_operator("Dx^2 + x"), path_of({Scalar(1)}), kPrec, {});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(M(i, j).contains(Scalar(i == j ? 1 : 0)));
}

TEST_CASE("rotation matrix of D^2 + 1, along two different paths", "[numeric]") {
  DiffOp P = parse_operator("Dx^2 + 1");
  MpVal c, s, ms;
  mpfr_set_ui(c.v, 1, MPFR_RNDN);
  mpfr_cos(c.v, c.v, MPFR_RNDN);
  mpfr_set_ui(s.v, 1, MPFR_RNDN);
  mpfr_sin(s.v, s.v, MPFR_RNDN);
  mpfr_neg(ms.v, s.v, MPFR_RNDN);
  for (const Path& path : {path_of({Scalar(0), Scalar(1)}),
                           path_of({Scalar(0), Scalar(mpq_class(1, 2), mpq_class(1, 2)), Scalar(1)})}) {
    BallMatrix M = transition_matrix(P, path, kPrec, {});
    CHECK(contains_real(M(0, 0), c.v));
    CHECK(contains_real(M(0, 1), s.v));
    CHECK(contains_real(M(1, 0), ms.v));
    CHECK(contains_real(M(1, 1), c.v));
  }
}

TEST_CASE("going there and back encloses the identity", "[numeric]") {
  DiffOp airy = parse_operator("Dx^2 - x");
  BallMatrix M = transition_matrix(airy, path_of({Scalar(0), Scalar(2), Scalar(mpq_class(1, 2), 1), Scalar(0)}),
                                   kPrec, {});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(M(i, j).contains(Scalar(i == j ? 1 : 0)));
}

TEST_CASE("higher precision gives nested, tighter enclosures", "[numeric]") {
  DiffOp P = parse_operator("(x^2+1)*Dx^2 + x*Dx - 3");
  Path path = path_of({Scalar(0), Scalar(1, 1), Scalar(2)});
  std::vector<cld> sing{cld(0, 1), cld(0, -1)};
  BallMatrix lo = transition_matrix(P, path, 128, sing), hi = transition_matrix(P, path, 256, sing);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(overlap(lo(i, j), hi(i, j)));
      CHECK(hi(i, j).rad().to_double() < lo(i, j).rad().to_double() * 1e-20);
    }
}

TEST_CASE("paths keep away from obstacles", "[numeric]") {
  std::vector<Obstacle> obs{{cld(1, 0), 0.25L}, {cld(2, 0), 0.25L}, {cld(3, 0.1L), 0.125L}};
  Path p = make_path(Scalar(0), Scalar(4), obs);
  REQUIRE(p.waypoints.front() == Scalar(0));
  REQUIRE(p.waypoints.back() == Scalar(4));
  for (size_t k = 0; k + 1 < p.waypoints.size(); ++k)
    for (const auto& o : obs)
      CHECK(detail::seg_distance(to_cld(p.waypoints[k]), to_cld(p.waypoints[k + 1]), o.z) >=
            o.clearance * 0.999L);
}

TEST_CASE("exponential parts evaluate on the principal branch", "[numeric]") {
  ExponentialPart sq;
  sq.alpha = Scalar(mpq_class(1, 2));
  auto v = eval_exponential_part(sq, Point::at(Scalar(0)), Scalar(4), 2, kPrec);
  CHECK(v[0].contains(Scalar(2)));
  CHECK(v[1].contains(Scalar(mpq_class(1, 4))));
  auto w = eval_exponential_part(sq, Point::at(Scalar(0)), Scalar(-1), 1, kPrec);
  CHECK(w[0].contains(Scalar(0, 1)));

  ExponentialPart ex;
  ex.u = {Scalar(1)};
  auto y = eval_exponential_part(ex, Point::at(Scalar(0)), Scalar(1), 2, kPrec);
  MpVal e, me;
  mpfr_set_ui(e.v, 1, MPFR_RNDN);
  mpfr_exp(e.v, e.v, MPFR_RNDN);
  mpfr_neg(me.v, e.v, MPFR_RNDN);
  CHECK(contains_real(y[0], e.v));
  CHECK(contains_real(y[1], me.v));
}

TEST_CASE("initial values of local solutions against closed forms", "[numeric]") {
  // sqrt(x) at 1/4: (1/2, 1)
  auto sq = local_basis(parse_operator("2*x*Dx - 1"), Point::at(Scalar(0)));
  BallMatrix a = local_initial_values(sq.parts[0].basis, Point::at(Scalar(0)), Scalar(mpq_class(1, 4)), 2, kPrec);
  CHECK(a(0, 0).contains(Scalar(mpq_class(1, 2))));
  CHECK(a(1, 0).contains(Scalar(1)));

  // exp(1/x) at 1/2: (e^2, -4 e^2)
  auto ex = local_basis(parse_operator("x^2*Dx + 1"), Point::at(Scalar(0)));
  BallMatrix b = local_initial_values(ex.parts[0].basis, Point::at(Scalar(0)), Scalar(mpq_class(1, 2)), 2, kPrec);
  MpVal e2, m4;
  mpfr_set_ui(e2.v, 2, MPFR_RNDN);
  mpfr_exp(e2.v, e2.v, MPFR_RNDN);
  mpfr_mul_si(m4.v, e2.v, -4, MPFR_RNDN);
  CHECK(contains_real(b(0, 0), e2.v));
  CHECK(contains_real(b(1, 0), m4.v));

  // 1/(1-x) at 1/4: (4/3, 16/9); the default truncation is too short for 128 bits
  auto geo = local_basis(parse_operator("(1-x)*Dx - 1"), Point::at(Scalar(0)), 200);
  BallMatrix c = local_initial_values(geo.parts[0].basis, Point::at(Scalar(0)), Scalar(mpq_class(1, 4)), 2, kPrec);
  CHECK(c(0, 0).contains(Scalar(mpq_class(4, 3))));
  CHECK(c(1, 0).contains(Scalar(mpq_class(16, 9))));
  auto geo_short = local_basis(parse_operator("(1-x)*Dx - 1"), Point::at(Scalar(0)));
  CHECK_THROWS_AS(local_initial_values(geo_short.parts[0].basis, Point::at(Scalar(0)),
                                       Scalar(mpq_class(1, 4)), 2, kPrec),
                  TailBoundFailed);

  // exp(x) through its expansion at infinity is exp(1/t) t^0, exact
  auto inf = local_basis(parse_operator("Dx - 1"), Point::infinity());
  BallMatrix d = local_initial_values(inf.parts[0].basis, Point::infinity(), Scalar(1), 1, kPrec);
  MpVal e;
  mpfr_set_ui(e.v, 1, MPFR_RNDN);
  mpfr_exp(e.v, e.v, MPFR_RNDN);
  CHECK(contains_real(d(0, 0), e.v));
}

TEST_CASE("truncation N and 2N give overlapping enclosures", "[numeric]") {
  DiffOp P = parse_operator("4*x*Dx^2 + 2*Dx - 1");
  const Point o = Point::at(Scalar(0));
  const Scalar x(mpq_class(11, 10));
  for (size_t part = 0; part < 2; ++part) {
    auto b1 = local_basis(P, o, 40), b2 = local_basis(P, o, 80);
    BallMatrix m1 = local_initial_values(b1.parts[part].basis, o, x, 2, kPrec, true);
    BallMatrix m2 = local_initial_values(b2.parts[part].basis, o, x, 2, kPrec, true);
    for (int j = 0; j < 2; ++j) CHECK(overlap(m1(j, 0), m2(j, 0)));
  }
  // cosh(sqrt(11/10))
  auto lb = local_basis(P, o, 80);
  BallMatrix m = local_initial_values(lb.parts[0].basis, o, x, 1, kPrec, true);
  CHECK(testutil::rel_err(m(0, 0), std::cosh(std::sqrt(1.1))) < 1e-14);
}

TEST_CASE("reference operator: evaluated subspaces at z0 = 3", "[numeric][reference]") {
  DiffOp P = testutil::reference_operator();
  auto S = singular_points(P);
  auto pts = S.relevant();
  REQUIRE(pts.size() == 4);
  NumericOptions opt;
  std::vector<std::vector<EvaluatedSubspace>> ev;
  for (size_t i = 0; i < pts.size(); ++i) {
    auto lb = local_basis(P, pts[i]);
    ev.push_back(pi_evaluate(P, S, lb, static_cast<int>(i), Scalar(3), opt));
  }
  for (const auto& t : testutil::reference_table()) {
    const auto& g = ev.at(t.point).at(t.part).generators;
    REQUIRE(g.cols() > t.column);
    for (int k = 0; k < 3; ++k) {
      INFO("point " << t.point << " part " << t.part << " column " << t.column << " row " << k);
      CHECK(testutil::rel_err(g(k, t.column), t.v[k]) < 1e-4);
      CHECK(g(k, t.column).rad().to_double() < 1e-10);
    }
  }
  // at each point the parts span a direct sum of the full solution space
  for (const auto& row : ev) {
    BallMatrix all = BallMatrix::hcat(row[0].generators, row[1].generators);
    REQUIRE(all.cols() == 3);
    CHECK(det3(all).certainly_nonzero());
  }
}
