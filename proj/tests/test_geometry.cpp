#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cubic3/geometry.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>

using namespace cubic3;

namespace {

RatVector pt(std::initializer_list<int> c) {
  RatVector v(static_cast<Eigen::Index>(c.size()));
  int i = 0;
  for (int x : c) v(i++) = x;
  return v;
}

Line fermat_line() { return Line::exact(pt({1, -1, 0, 0, 0}), pt({0, 0, 1, -1, 0})); }

// A rank-1 fiber at y = (1, 0, 0): M there is [[1, 0, 1], [0, 0, 0], [1, 0, 1]].
const char* kRankOne =
    "x0^2*x2 + x0*x1*x3 + x1^2*x4 + x0*(2*x2^2 + x3*x4) + x1*(x3^2 - x4^2 + x2*x4)"
    " + x2^3 + x3^3 + x4^3 + x2*x3*x4";
// A, B, C = x2, x3, x2 + x3 are dependent.
const char* kDependentABC =
    "x0^2*x2 + x0*x1*x3 + x1^2*(x2 + x3) + x0*(x4^2 + x2*x3) + x1*(x3*x4 + x2^2)"
    " + x2^3 + x3^3 + x4^3";
Line axis_line() { return Line::exact(pt({1, 0, 0, 0, 0}), pt({0, 1, 0, 0, 0})); }

// Oracle: the six coefficients of g(a, b) = f(a p + b q + Y) read off from
// values at six (a, b); the cubic part in (a, b) is f on the line, so zero.
std::array<Rat, 6> interpolate_parts(const Form& f, const RatVector& p, const RatVector& q, const RatVector& y) {
  auto g = [&](int a, int b) { return f.evaluate(RatVector(Rat(a) * p + Rat(b) * q + y)); };
  Rat F = g(0, 0);
  Rat A = (g(1, 0) + g(-1, 0)) / 2 - F, D = (g(1, 0) - g(-1, 0)) / 2;
  Rat C = (g(0, 1) + g(0, -1)) / 2 - F, E = (g(0, 1) - g(0, -1)) / 2;
  Rat B = g(1, 1) - A - C - D - E - F;
  return {A, B, C, D, E, F};
}

Rat oracle_det(const std::array<Rat, 6>& c) {
  RatMatrix m(3, 3);
  m << c[0], c[1] / 2, c[3] / 2, c[1] / 2, c[2], c[4] / 2, c[3] / 2, c[4] / 2, c[5];
  return determinant(m);
}

RatVector lift(const RatMatrix& change, const RatVector& y) {
  RatVector z = RatVector::Zero(5);
  z.tail(3) = y;
  return change * z;
}

std::vector<int> sorted_coranks(const std::vector<SingularPoint>& points) {
  std::vector<int> out;
  for (const auto& p : points) out.push_back(p.corank);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("conic bundle of a Fermat line") {
  Form f = fixtures::load("fermat");
  auto cb = conic_bundle(f, fermat_line());
  REQUIRE(cb.exact_parts);
  REQUIRE(cb.exact_discriminant);
  CHECK(cb.exact_discriminant->degree() == 5);
  CHECK(cb.exact_discriminant->is_homogeneous());
  // B vanishes on this line; the other parts have their generic degrees.
  const int degrees[6] = {1, -1, 1, 2, 2, 3};
  for (int i = 0; i < 6; ++i) CHECK((*cb.exact_parts)[i].degree() == degrees[i]);

  const RatMatrix& t = *cb.exact_change;
  const RatVector p = t.col(0), q = t.col(1);
  auto grad = gradient(f);
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    RatVector y(3);
    for (int i = 0; i < 3; ++i) y(i) = gen::small_rational(rng, 7);
    CAPTURE(trial);
    RatVector big = lift(t, y);
    auto c = interpolate_parts(f, p, q, big);
    for (int i = 0; i < 6; ++i) CHECK((*cb.exact_parts)[i].evaluate(y) == c[i]);
    CHECK(cb.exact_discriminant->evaluate(y) == oracle_det(c));
    // A and C are the derivatives of f at p and q in the direction Y.
    Rat ga = 0, gc = 0;
    for (int i = 0; i < 5; ++i) {
      ga += grad[i].evaluate(p) * big(i);
      gc += grad[i].evaluate(q) * big(i);
    }
    CHECK(c[0] == ga);
    CHECK(c[2] == gc);
  }

  SUBCASE("the discriminant vanishes exactly on degenerate fibers") {
    CPoly d = cb.discriminant;
    CVector u(3), w(3);
    u << Complex(0.3, 0.1), Complex(-1.2, 0.4), Complex(0.7, -0.5);
    w << Complex(0.9, -0.2), Complex(0.2, 0.6), Complex(-0.4, 1.1);
    // Roots of the quintic D(u + s w) from six values.
    Eigen::Matrix<Complex, 6, 6> v;
    Eigen::Matrix<Complex, 6, 1> rhs;
    for (int i = 0; i < 6; ++i) {
      Complex s(i - 2.5, 0.5 * i);
      for (int j = 0; j < 6; ++j) v(i, j) = std::pow(s, j);
      rhs(i) = d.evaluate(CVector(u + s * w));
    }
    Eigen::Matrix<Complex, 6, 1> coef = v.partialPivLu().solve(rhs);
    Eigen::Matrix<Complex, 5, 5> comp = Eigen::Matrix<Complex, 5, 5>::Zero();
    for (int i = 1; i < 5; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < 5; ++i) comp(i, 4) = -coef(i) / coef(5);
    Eigen::ComplexEigenSolver<Eigen::Matrix<Complex, 5, 5>> es(comp);
    CPoly cf = to_complex(f);
    CMatrix ct = to_complex(t);
    auto smallest = [&](const CVector& y) {
      CVector z = CVector::Zero(5);
      z.tail(3) = y.normalized();
      CVector big = ct * z;
      CVector pc = ct.col(0), qc = ct.col(1);
      auto g = [&](double a, double b) { return cf.evaluate(CVector(a * pc + b * qc + big)); };
      Complex F = g(0, 0);
      Complex A = (g(1, 0) + g(-1, 0)) / 2.0 - F, D = (g(1, 0) - g(-1, 0)) / 2.0;
      Complex C = (g(0, 1) + g(0, -1)) / 2.0 - F, E = (g(0, 1) - g(0, -1)) / 2.0;
      Complex B = g(1, 1) - A - C - D - E - F;
      Eigen::Matrix3cd m;
      m << A, B / 2.0, D / 2.0, B / 2.0, C, E / 2.0, D / 2.0, E / 2.0, F;
      Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m);
      return svd.singularValues()(2) / svd.singularValues()(0);
    };
    for (int i = 0; i < 5; ++i) CHECK(smallest(CVector(u + es.eigenvalues()(i) * w)) < 1e-9);
    CHECK(smallest(u) > 1e-3);
    CHECK(smallest(w) > 1e-3);
  }
}

TEST_CASE("conic bundle preconditions") {
  Form f2 = fixtures::load("f2");
  // {x1 = x2 = x3 = 0} lies on f2 and passes through its D4 point.
  Line through_d4 = Line::exact(pt({1, 0, 0, 0, 0}), pt({0, 0, 0, 0, 1}));
  CHECK(line_on(f2, through_d4));
  CHECK(line_meets_singular_locus(f2, through_d4));
  CHECK_THROWS_AS(conic_bundle(f2, through_d4), LineError);
  Line off = Line::exact(pt({1, 0, 0, 0, 0}), pt({0, 0, 1, 0, 0}));
  CHECK_FALSE(line_on(f2, off));
  CHECK_THROWS_AS(conic_bundle(f2, off), LineError);
  CHECK_FALSE(line_meets_singular_locus(fixtures::load("fermat"), fermat_line()));
}

TEST_CASE("good lines") {
  SUBCASE("sampled lines on a smooth cubic are good") {
    Form f = fixtures::load("fermat");
    for (const auto& l : sample_lines(f, 4, 3)) {
      auto v = good_line_test(conic_bundle(f, l), 3);
      CHECK(v.good == Verdict::Yes);
      CHECK_FALSE(v.witness);
    }
  }
  SUBCASE("the Fermat line lies in the residual conic over y = (0, 0, 1)") {
    auto cb = conic_bundle(fixtures::load("fermat"), fermat_line());
    auto v = good_line_test(cb, 3);
    CHECK(v.good == Verdict::No);
    REQUIRE(v.witness);
    CHECK(std::abs((*v.witness)(0)) < 1e-12);
    CHECK(std::abs((*v.witness)(1)) < 1e-12);
  }
  SUBCASE("a rank-1 fiber makes the line bad") {
    Form f = parse_form(kRankOne);
    auto cb = conic_bundle(f, axis_line());
    // Exact rank at the planted fiber.
    RatVector y0 = pt({1, 0, 0});
    RatVector big = lift(*cb.exact_change, y0);
    auto c = interpolate_parts(f, cb.exact_change->col(0), cb.exact_change->col(1), big);
    RatMatrix m(3, 3);
    m << c[0], c[1] / 2, c[3] / 2, c[1] / 2, c[2], c[4] / 2, c[3] / 2, c[4] / 2, c[5];
    REQUIRE(rank_exact(m) == 1);
    for (std::uint64_t seed : {3, 4, 5}) {
      CAPTURE(seed);
      auto v = good_line_test(cb, seed);
      CHECK(v.good == Verdict::No);
      REQUIRE(v.witness);
      Eigen::JacobiSVD<CMatrix> svd(cb.matrix_at(*v.witness));
      CHECK(svd.singularValues()(1) < 1e-8 * svd.singularValues()(0));
    }
  }
  SUBCASE("dependent A, B, C make the line bad") {
    Form f = parse_form(kDependentABC);
    auto cb = conic_bundle(f, axis_line());
    auto v = good_line_test(cb, 3);
    CHECK(v.good == Verdict::No);
    REQUIRE(v.witness);
    // The fiber where A = B = C = 0 contains the line.
    for (int i = 0; i < 3; ++i) CHECK(std::abs(cb.parts[i].evaluate(*v.witness)) < 1e-12);
  }
}

TEST_CASE("very good lines") {
  SUBCASE("sampled lines on a smooth cubic") {
    Form f = fixtures::load("fermat");
    for (const auto& l : sample_lines(f, 3, 7)) {
      auto v = very_good_test(conic_bundle(f, l), 7);
      CHECK(v.good.good == Verdict::Yes);
      CHECK(v.discriminant_irreducible == Verdict::Yes);
      CHECK(v.cover_connected == Verdict::Yes);
      CHECK(v.cover_certified);
      CHECK(v.very_good);
    }
  }
  // Cubics containing a plane have no very good line.
  for (const char* name : {"f2", "plane_node"}) {
    CAPTURE(std::string(name));
    Form f = fixtures::load(name);
    int good = 0;
    for (const auto& l : sample_lines(f, 4, 5)) {
      auto v = very_good_test(conic_bundle(f, l), 9);
      if (v.good.good != Verdict::Yes) continue;
      ++good;
      CHECK_FALSE(v.very_good);
    }
    CHECK(good > 0);
  }
}

TEST_CASE("plane and scroll verdicts follow the defect") {
  const char* corpus[] = {"f1", "f2", "segre", "nine_nodes", "two_planes", "one_node",
                          "plane_node", "six_nodes", "cusp", "d4"};
  for (const char* name : corpus) {
    CAPTURE(std::string(name));
    auto r = compute_defect(fixtures::load(name), 11);
    REQUIRE(r.sigma);
    REQUIRE(r.chosen());
    auto s = detect_plane_scroll(*r.chosen(), 13, {}, r.sigma);
    CAPTURE(s.pattern);
    CHECK(s.contains_plane != Verdict::Undetermined);
    CHECK(s.contains_scroll != Verdict::Undetermined);
    bool fires = s.contains_plane == Verdict::Yes || s.contains_scroll == Verdict::Yes;
    CHECK(fires == (*r.sigma > 0));
    REQUIRE(s.consistent);
    CHECK(*s.consistent);
    if (std::string(name) == "f2") CHECK(s.contains_plane == Verdict::Yes);
    if (std::string(name) == "six_nodes") CHECK(s.contains_scroll == Verdict::Yes);
    if (std::string(name) == "f1") {
      CHECK(s.contains_plane == Verdict::No);
      CHECK(s.contains_scroll == Verdict::No);
    }
  }
}

TEST_CASE("singularities of the discriminant match those of X on good lines") {
  for (const char* name : {"f1", "f2", "plane_node", "cusp"}) {
    CAPTURE(std::string(name));
    Form f = fixtures::load(name);
    auto expected = sorted_coranks(compute_defect(f, 2).points);
    int checked = 0;
    for (const auto& l : sample_lines(f, 6, 5)) {
      auto cb = conic_bundle(f, l);
      CHECK(cb.discriminant.degree() == 5);
      if (good_line_test(cb, 7).good != Verdict::Yes) continue;
      ++checked;
      // A finite singular locus means D_l is squarefree.
      std::vector<SingularPoint> sing;
      REQUIRE_NOTHROW(sing = discriminant_singularities(cb, 8));
      CHECK(sorted_coranks(sing) == expected);
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("sampled lines lie on X and miss its singular points") {
  for (const char* name : {"fermat", "f1", "segre"}) {
    CAPTURE(std::string(name));
    Form f = fixtures::load(name);
    auto lines = sample_lines(f, 6, 21);
    CHECK(lines.size() == 6);
    for (const auto& l : lines) {
      CHECK(line_on(f, l));
      CHECK_FALSE(line_meets_singular_locus(f, l));
    }
  }
}
