#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cubic3/witness.hpp"
#include "generators.hpp"

using namespace cubic3;

namespace {

const char* kF1 =
    "x0*x1*x2 + x1^2*x4 - 2*x1*x4^2 + x2^2*x4 - 2*x2*x4^2 - x3^3 - x3^2*x4 + x4^3";
const char* kF2 = "x0*x1*x2 + x1*x3*x4 + x2^3 - x3^3 + x3*x4^2";
const char* kSegre =
    "x0^3 + x1^3 + x2^3 + x3^3 + x4^3 - (x0+x1+x2+x3+x4)^3";

// Independent of the library's projection: move q to e4 and read off the
// x4-linear and x4-free parts.
std::pair<Form, Form> split_at(const Form& f, std::initializer_list<int> q) {
  RatVector v(5);
  int i = 0;
  for (int c : q) v(i++) = c;
  Form g = substitute(f, LinearChange::sending_last_to(v));
  std::vector<int> keep{0, 1, 2, 3, -1};
  return {g.coefficient_of(4, 1).relabel(keep, 4), g.coefficient_of(4, 0).relabel(keep, 4)};
}

Form segre() {
  // Sum of cubes minus the cube of the sum, written out.
  Form s(5), lin(5);
  for (int i = 0; i < 5; ++i) {
    s += Form::variable(5, i).pow(3);
    lin += Form::variable(5, i);
  }
  return s - lin.pow(3);
}

std::vector<int> sorted_degrees(const ComponentPartition& p) {
  auto d = p.degrees();
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

TEST_CASE("quadric structure") {
  CHECK(detect_nonreduced(parse_polynomial("x0^2", 4)).kind == QuadricClass::DoublePlane);
  CHECK(detect_nonreduced(parse_polynomial("x0*x1", 4)).kind == QuadricClass::TwoPlanes);
  CHECK(detect_nonreduced(parse_polynomial("x0*x2 + x3*x1", 4)).kind == QuadricClass::Smooth);
  CHECK(detect_nonreduced(parse_polynomial("x0^2 + x1^2 + x2^2", 4)).kind == QuadricClass::Cone);
  CHECK_THROWS_AS(detect_nonreduced(Form(4)), WitnessError);
  auto dp = detect_nonreduced(parse_polynomial("4*x0^2 + 4*x0*x1 + x1^2", 4));
  REQUIRE(dp.double_plane);
  CHECK((*dp.double_plane)(0) == 2);
  CHECK((*dp.double_plane)(1) == 1);
  // Planes of a rank-2 quadric multiply back to it up to scale.
  Form g = parse_polynomial("x0^2 - 2*x1^2 + x2*x3 - x2*x3", 4);
  auto tp = detect_nonreduced(g);
  REQUIRE(tp.planes.size() == 2);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    CVector x(4);
    for (int i = 0; i < 4; ++i) x(i) = Complex(gen::small_rational(rng).convert_to<double>(), 0.3 * i);
    Complex prod = tp.planes[0].dot(x) * tp.planes[1].dot(x);
    Complex gx = to_complex(g).evaluate(x);
    CHECK(std::abs(prod - gx) < 1e-9 * (1 + std::abs(gx)));
  }
}

TEST_CASE("witness sets have degree-many simple points") {
  auto [g2, g3] = split_at(parse_form(kF2), {0, 1, 0, 0, 0});
  auto w = curve_witness(g2, g3, 7);
  CHECK(w.reduced);
  CHECK(w.points.size() == 6);
  for (const auto& p : w.points) CHECK(membership_residual(w.equations, p) < 1e-8);
}

TEST_CASE("trace test on the full set and a split block") {
  auto [g2, g3] = split_at(parse_form(kF1), {1, 0, 0, 0, 0});
  auto w = curve_witness(g2, g3, 3);
  auto td = trace_data(w, 5);
  REQUIRE(td.ok);
  CHECK(trace_test({0, 1, 2, 3, 4, 5}, td).pass);
  auto part = monodromy_partition(w, 50, 11);
  REQUIRE(part.components() == 2);
  const auto& cubic = part.blocks[0].points;
  REQUIRE(cubic.size() == 3);
  // A 2-subset of an irreducible plane cubic is not a component.
  CHECK_FALSE(trace_test({cubic[0], cubic[1]}, td).pass);
  CHECK(trace_test(cubic, td).pass);
}

TEST_CASE("component counts on the projection fixtures") {
  SUBCASE("node of f2: line plus quintic") {
    auto [g2, g3] = split_at(parse_form(kF2), {0, 1, 0, 0, 0});
    auto p = monodromy_partition(curve_witness(g2, g3, 1), 50, 2);
    CHECK(sorted_degrees(p) == std::vector<int>{1, 5});
    for (const auto& b : p.blocks) CHECK(b.certificate.pass);
  }
  SUBCASE("D4 point of f1: two plane cubics") {
    auto [g2, g3] = split_at(parse_form(kF1), {1, 0, 0, 0, 0});
    auto w = curve_witness(g2, g3, 4);
    auto p = monodromy_partition(w, 50, 8);
    CHECK(sorted_degrees(p) == std::vector<int>{3, 3});
    // Each point lies on exactly one plane of Q_q.
    auto q = detect_nonreduced(g2);
    REQUIRE(q.planes.size() == 2);
    for (const auto& x : w.points) {
      CVector u = x / x.norm();
      bool a = std::abs(q.planes[0].dot(u)) < 1e-8, b = std::abs(q.planes[1].dot(u)) < 1e-8;
      CHECK(a != b);
    }
  }
  SUBCASE("Segre node: six lines") {
    auto [g2, g3] = split_at(segre(), {1, 1, 1, -1, -1});
    auto p = monodromy_partition(curve_witness(g2, g3, 5), 50, 6);
    CHECK(sorted_degrees(p) == std::vector<int>{1, 1, 1, 1, 1, 1});
  }
  SUBCASE("generic (2,3) curve on a smooth quadric is irreducible") {
    std::mt19937_64 rng(17);
    Form g3 = gen::random_form(rng, 4, 3, 1.0);
    auto p = monodromy_partition(curve_witness(parse_polynomial("x0*x3 - x1*x2", 4), g3, 9), 50, 10);
    CHECK(p.components() == 1);
  }
}

TEST_CASE("double plane uses the reduced cubic") {
  Form g3 = parse_polynomial("x1^3 + x2^3 + x3^3 + x0*x1*x2", 4);
  auto w = curve_witness(parse_polynomial("x0^2", 4), g3, 3);
  CHECK_FALSE(w.reduced);
  CHECK(w.points.size() == 3);
  auto p = monodromy_partition(w, 50, 4);
  CHECK(p.components() == 1);
}

TEST_CASE("component count is seed independent") {
  auto [g2, g3] = split_at(parse_form(kF2), {0, 1, 0, 0, 0});
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    auto w = curve_witness(g2, g3, seed);
    int total = 0;
    auto p = monodromy_partition(w, 50, seed * 3);
    for (int d : p.degrees()) total += d;
    CHECK(total == 6);
    CHECK(p.components() == 2);
  }
}
