#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cubic3/forms.hpp"
#include "generators.hpp"

using namespace cubic3;

namespace {
const char* kF2 = "x0*x1*x2 + x1*x3*x4 + x2^3 - x3^3 + x3*x4^2";

RatVector point(std::initializer_list<int> c) {
  RatVector v(static_cast<Eigen::Index>(c.size()));
  int i = 0;
  for (int x : c) v(i++) = x;
  return v;
}
}  // namespace

TEST_CASE("parser round trip and grammar") {
  Form f = parse_form("3/2*x0^2*x4 - x3^3");
  CHECK(f.coefficient({2, 0, 0, 0, 1}) == Rat(3, 2));
  CHECK(f.coefficient({0, 0, 0, 3, 0}) == -1);
  CHECK(parse_form(f.to_string()) == f);
  CHECK(parse_form("2x0x1x2 + x1 x1 x1") == parse_form("2*x0*x1*x2+x1^3"));
  CHECK(parse_form("x0^2 - x0^2 + x1^2").size() == 1);
}

TEST_CASE("parser errors carry positions") {
  try {
    parse_form("x0^3 + x1^2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("x1^2") != std::string::npos);
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse_form("x0^3 + x7^3"), ParseError);
  CHECK_THROWS_AS(parse_form("x0^3 + y^3"), ParseError);
  CHECK_THROWS_AS(parse_form(""), ParseError);
  CHECK_THROWS_AS(parse_form("1/0*x0^3"), ParseError);
  CHECK_THROWS_AS(parse_form("x0^3 + + x1^3"), ParseError);
  CHECK(parse_form("x0^2 x1") == parse_form("x0^2*x1"));
  CHECK(parse_form("x4*(x0^2+x1^2) + x3^3") == parse_form("x4*x0^2 + x4*x1^2 + x3^3"));
  CHECK(parse_form("(x0+x1)^3") == parse_form("x0^3 + 3x0^2x1 + 3x0x1^2 + x1^3"));
  CHECK(parse_form("x0(x1 - x2)(x1 + x2)") == parse_form("x0x1^2 - x0x2^2"));
  CHECK(parse_form("x0^3 - (x0)^3 + x1^2x2").is_homogeneous());
  CHECK_THROWS_AS(parse_form("x0*(x1 + 1)"), ParseError);
  CHECK_THROWS_AS(parse_form("(x0 + x1"), ParseError);
  CHECK_THROWS_AS(parse_form("x0 + x1)"), ParseError);
  CHECK_THROWS_AS(parse_form("x0*()"), ParseError);
}

TEST_CASE("evaluate") {
  CVector e0 = CVector::Zero(5);
  e0(0) = 1.0;
  CHECK(std::abs(evaluate(parse_form("x0^3"), CPoint(e0)) - 1.0) < 1e-15);
  CVector e1 = CVector::Zero(5);
  e1(1) = 1.0;
  CHECK(std::abs(evaluate(parse_form(kF2), CPoint(e1))) == 0.0);
  CVector iso(2);
  iso << 1.0, Complex(0, 1);
  CHECK(std::abs(evaluate(parse_polynomial("x0^2 + x1^2", 2), CPoint(iso))) < 1e-15);
  CHECK_THROWS(evaluate(parse_form("x0^3"), CPoint(iso)));
}

TEST_CASE("CPoint normalization") {
  CVector v(3);
  v << 1.0, Complex(0, -4.0), 2.0;
  CPoint p(v);
  CHECK(std::abs(p[1] - 1.0) < 1e-15);
  double maxabs = p.coords().cwiseAbs().maxCoeff();
  CHECK(maxabs == doctest::Approx(1.0));
  CHECK_THROWS(CPoint(CVector::Zero(3)));
}

TEST_CASE("gradient") {
  auto g = gradient(parse_form("x0^3"));
  CHECK(g[0] == parse_form("3*x0^2"));
  for (int i = 1; i < 5; ++i) CHECK(g[i].is_zero());
  auto h = gradient(parse_form("x0*x1*x2"));
  CHECK(h[0] == parse_form("x1*x2"));
  CHECK(h[1] == parse_form("x0*x2"));
  CHECK(h[2] == parse_form("x0*x1"));
}

TEST_CASE("Euler identity on random cubics") {
  std::mt19937_64 rng(11);
  Form f2 = parse_form(kF2);
  std::vector<Form> samples{f2};
  for (int k = 0; k < 40; ++k) samples.push_back(gen::random_form(rng, 5, 3));
  for (const auto& f : samples) {
    auto g = gradient(f);
    Form euler(5);
    for (int i = 0; i < 5; ++i) euler += Form::variable(5, i) * g[i];
    CHECK(euler == f * Rat(3));
    for (const auto& gi : g) CHECK((gi.is_zero() || (gi.is_homogeneous() && gi.degree() == 2)));
  }
}

TEST_CASE("substitution") {
  CHECK(substitute(parse_form("x0^2", 5), LinearChange::swap(5, 0, 1)) == parse_form("x1^2"));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    Form f = gen::random_form(rng, 5, 3);
    LinearChange t(gen::random_invertible(rng, 5));
    LinearChange s(gen::random_invertible(rng, 5));
    Form g = substitute(f, t);
    CHECK(g.is_homogeneous());
    CHECK(g.degree() == 3);
    CHECK(substitute(g, t.inverse()) == f);
    CHECK(substitute(f, t.then(s)) == substitute(substitute(f, t), s));
  }
  CHECK_THROWS(LinearChange(RatMatrix::Zero(5, 5)));
}

TEST_CASE("moving a singular point to the last vertex") {
  Form f2 = parse_form(kF2);
  auto t = LinearChange::sending_last_to(point({0, 1, 0, 0, 0}));
  Form g = substitute(f2, t);
  CHECK(g.coefficient({0, 0, 0, 0, 3}) == 0);
  for (int i = 0; i < 4; ++i) {
    Exponent e(5, 0);
    e[i] = 1;
    e[4] = 2;
    CHECK(g.coefficient(e) == 0);
  }
}

TEST_CASE("quadratic forms and exact rank") {
  CHECK(rank_exact(quad_matrix(parse_polynomial("x0*x2 + x2*x3", 4))) == 2);
  RatMatrix m = quad_matrix(parse_polynomial("x0*x2 + x1*x3", 4));
  CHECK(rank_exact(m) == 4);
  CHECK(m(0, 2) == Rat(1, 2));
  CHECK(m == m.transpose());
  CHECK(rank_exact(quad_matrix(parse_polynomial("x0^2", 4))) == 1);
  CHECK(rank_exact(quad_matrix(parse_polynomial("x0*x1", 4))) == 2);
  CHECK(rank_exact(RatMatrix::Identity(4, 4)) == 4);
  CHECK(rank_exact(RatMatrix::Zero(4, 4)) == 0);
  CHECK_THROWS(quad_matrix(parse_polynomial("x0^3", 4)));
}

TEST_CASE("rank is a congruence invariant") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 30; ++k) {
    Form g = gen::random_form(rng, 4, 2, 0.3);
    RatMatrix m = quad_matrix(g);
    RatMatrix a = gen::random_invertible(rng, 4);
    CHECK(rank_exact(RatMatrix(a.transpose() * m * a)) == rank_exact(m));
    auto d = diagonalize_symmetric(m);
    RatMatrix diag = d.transform.transpose() * m * d.transform;
    CHECK(diag == RatMatrix(d.diagonal.asDiagonal()));
    CHECK(d.rank == rank_exact(m));
  }
}

TEST_CASE("cone test") {
  auto c = cone_test(parse_form("x0^3 + x1^3 + x2^3 + x3^3"));
  CHECK(c.is_cone);
  CHECK(c.vertex_dimension == 1);
  CHECK(c.vertex.cols() == 1);
  CHECK(c.vertex(4, 0) != 0);
  CHECK_FALSE(cone_test(parse_form(kF2)).is_cone);
  auto d = cone_test(parse_form("x0^3"));
  CHECK(d.vertex_dimension == 4);
}

TEST_CASE("kernel and inverse") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    RatMatrix a = gen::random_invertible(rng, 4);
    CHECK(*inverse(a) * a == RatMatrix::Identity(4, 4));
    RatMatrix b(3, 5);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) b(i, j) = gen::small_rational(rng);
    RatMatrix ker = kernel(b);
    CHECK(ker.cols() == 5 - rank_exact(b));
    CHECK((b * ker).isZero());
  }
}
