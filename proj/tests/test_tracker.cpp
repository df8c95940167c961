#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cubic3/tracker.hpp"
#include "generators.hpp"

using namespace cubic3;

namespace {

PolySystem system_of(std::initializer_list<const char*> eqs, int nvars) {
  std::vector<Form> forms;
  for (auto e : eqs) forms.push_back(parse_polynomial(e, nvars));
  return PolySystem::from_forms(forms, nvars);
}

}  // namespace

TEST_CASE("settings validation") {
  TrackerSettings s;
  CHECK_NOTHROW(s.validate());
  s.min_step = 1.0;
  CHECK_THROWS(s.validate());
}

TEST_CASE("total degree start system") {
  auto one = total_degree_start(system_of({"x0^2 - 2"}, 1));
  CHECK(one.solutions.size() == 2);
  auto two = total_degree_start(system_of({"x0^2 - 1", "x1^3 - x0"}, 2));
  CHECK(two.solutions.size() == 6);
  for (const auto& x : two.solutions) CHECK(two.system.evaluate(x).norm() < 1e-12);
  CHECK_THROWS(total_degree_start(system_of({"x0 + x1"}, 2)));
}

TEST_CASE("track a single regular path") {
  auto target = system_of({"x0^2 - 2"}, 1);
  auto start = total_degree_start(target);
  StraightLineHomotopy h(start.system, target, 1.0);
  CVector x0(1);
  x0 << 1.0;
  auto p = track(h, x0, TrackerSettings{});
  REQUIRE(p.status == PathStatus::Converged);
  CHECK(std::abs(p.x(0) - std::sqrt(2.0)) < 1e-10);
}

TEST_CASE("solve_all on simple systems") {
  TrackerSettings s;
  auto four = solve_all(system_of({"x0^2 - 1", "x1^2 - 4"}, 2), s, 1);
  CHECK(four.solutions.size() == 4);
  for (const auto& sol : four.solutions) {
    CHECK(sol.multiplicity == 1);
    CHECK(sol.residual < s.corrector_tolerance);
  }
  auto dbl = solve_all(system_of({"x0^2"}, 1), s, 2);
  REQUIRE(dbl.solutions.size() == 1);
  CHECK(dbl.solutions[0].multiplicity == 2);
  CHECK(std::abs(dbl.solutions[0].x(0)) < 1e-8);
}

TEST_CASE("Bezout accounting on random dense systems") {
  // Finite endpoints (with multiplicity) plus diverged paths = Bezout number.
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nd(1, 3), dd(1, 3);
  TrackerSettings s;
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int n = nd(rng);
    std::vector<CPoly> eqs;
    int bezout = 1;
    for (int i = 0; i < n; ++i) {
      int d = dd(rng);
      bezout *= d;
      // Dense polynomial of degree d with all monomials of degree <= d.
      CPoly p(n);
      for (int k = 0; k <= d; ++k)
        for (const auto& e : monomials_of_degree(n, k)) p.add_term(e, to_complex(gen::small_rational(rng)) + Complex(0, 0.37 * k));
      eqs.push_back(p);
    }
    auto res = solve_all(PolySystem(eqs, n), s, trial + 100);
    int mult = 0;
    for (const auto& sol : res.solutions) mult += sol.multiplicity;
    CHECK(res.failed == 0);
    CHECK(mult + res.diverged == bezout);
    CHECK(res.paths == bezout);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("seed independence of clustered solutions") {
  auto sys = system_of({"x0^2 + x1^2 - 5", "x0*x1 - 2"}, 2);
  TrackerSettings s;
  auto a = solve_all(sys, s, 1);
  auto b = solve_all(sys, s, 99);
  REQUIRE(a.solutions.size() == 4);
  REQUIRE(b.solutions.size() == 4);
  for (const auto& sa : a.solutions) {
    double best = 1e9;
    for (const auto& sb : b.solutions) best = std::min(best, (sa.x - sb.x).norm());
    CHECK(best < 1e-8);
  }
}

TEST_CASE("Newton converges quadratically") {
  auto sys = system_of({"x0^2 - 2", "x1^3 - x0"}, 2);
  CVector x(2);
  x << 1.5, 1.1;
  std::vector<double> res;
  CVector v;
  CMatrix j;
  for (int it = 0; it < 5; ++it) {
    sys.evaluate(x, v, j);
    res.push_back(v.norm());
    x += Eigen::PartialPivLU<CMatrix>(j).solve(-v);
  }
  // e_{k+1} <= C e_k^2 once close.
  for (int k = 1; k + 1 < static_cast<int>(res.size()) && res[k + 1] > 1e-14; ++k)
    CHECK(res[k + 1] <= 10.0 * res[k] * res[k]);
}

TEST_CASE("rational reconstruction") {
  CVector p(2);
  p << 0.9999999999, 2.0000000001;
  auto q = rational_reconstruct(p, 100);
  REQUIRE(q);
  CHECK((*q)(0) == 1);
  CHECK((*q)(1) == 2);
  CVector r(2);
  r << 0.70710678, 1.0;
  CHECK_FALSE(rational_reconstruct(r, 10));
  CVector c(2);
  c << Complex(0, 1), 1.0;
  CHECK_FALSE(rational_reconstruct(c, 100));
  CHECK(best_rational(0.333333333333, 1000) == Rat(1, 3));
  auto reject = rational_reconstruct(p, 100, 1e-8, [](const RatVector&) { return false; });
  CHECK_FALSE(reject);
}
