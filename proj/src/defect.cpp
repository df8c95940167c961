#include "cubic3/defect.hpp"

#include <algorithm>

namespace cubic3 {

std::pair<Form, Form> project(const Form& f, const RatVector& q) {
  if (cone_test(f).is_cone) throw std::invalid_argument("project: f is a cone");
  auto loc = local_equation(f, q);
  return {loc.g2, loc.g3};
}

namespace {

QuadricClass class_of_rank(int rank) {
  switch (rank) {
    case 4: return QuadricClass::Smooth;
    case 3: return QuadricClass::Cone;
    case 2: return QuadricClass::TwoPlanes;
    case 1: return QuadricClass::DoublePlane;
    default: return QuadricClass::Zero;
  }
}

// Lines through q on X, cut by a hyperplane missing q: the quadric cone of
// the Hessian at q together with f itself.
WitnessSet numeric_cq(const Form& f, const CVector& q, std::uint64_t seed, const TrackerSettings& settings) {
  const int n = f.nvars();
  auto grad = gradient(f);
  CPoly quad(n);
  for (int i = 0; i < n; ++i) {
    auto second = gradient(grad[i]);
    for (int j = 0; j < n; ++j) {
      Complex hij = to_complex(second[j]).evaluate(q);
      Exponent e(n, 0);
      e[i] += 1;
      e[j] += 1;
      quad.add_term(e, hij);
    }
  }
  Rng rng(seed);
  CVector h;
  do {
    RatVector hr(n);
    for (int i = 0; i < n; ++i) hr(i) = rng.integer(-5, 5);
    h = to_complex(hr);
  } while (std::abs(h.dot(q)) < 0.1 * q.norm());
  return witness_points(std::vector<CPoly>{quad, to_complex(f), CPoly::linear(h)}, rng.next_seed(), settings);
}

}  // namespace

Projection project_from(const Form& f, const SingularPoint& p, std::uint64_t seed, const TrackerSettings& settings,
                        int max_loops) {
  Projection out;
  out.seed = seed;
  out.point = p.exact;
  out.approx = p.approx;
  Rng rng(seed);
  if (p.exact) {
    auto loc = local_equation(f, *p.exact);
    if (loc.g2.is_zero()) throw std::invalid_argument("project_from: the point is a cone vertex");
    int rank = rank_exact(quad_matrix(loc.g2));
    out.corank = 4 - rank;
    out.quadric = class_of_rank(rank);
    if (rank == 3) out.vertex = to_complex(RatVector(kernel(quad_matrix(loc.g2)).col(0)));
    out.witness = curve_witness(loc.g2, loc.g3, rng.next_seed(), settings);
  } else {
    out.corank = numeric_corank(f, p.approx);
    out.quadric = class_of_rank(4 - out.corank);
    out.witness = numeric_cq(f, p.approx, rng.next_seed(), settings);
  }
  out.partition = monodromy_partition(out.witness, max_loops, rng.next_seed(), settings);
  out.k = out.partition.components();
  out.sigma = out.k - (out.corank == 2 ? 2 : 1);
  bool traced = std::all_of(out.partition.blocks.begin(), out.partition.blocks.end(),
                            [](const WitnessBlock& b) { return b.certificate.pass; });
  out.certified = p.exact.has_value() && out.partition.stabilized && traced;
  return out;
}

DefectReport compute_defect(const Form& f, std::uint64_t seed, const TrackerSettings& settings) {
  Rng rng(seed);
  std::uint64_t find_seed = rng.next_seed();
  std::vector<SingularPoint> points;
  try {
    points = find_singular_points(f, find_seed, settings);
  } catch (const NonIsolatedSingularLocus& e) {
    if (cone_test(f).is_cone)
      throw NonIsolatedSingularLocus(std::string("degenerate cone, outside the scope of the defect formula: ") +
                                     e.what());
    throw;
  }
  return compute_defect(f, std::move(points), rng.next_seed(), settings);
}

DefectReport compute_defect(const Form& f, std::vector<SingularPoint> points, std::uint64_t seed,
                            const TrackerSettings& settings) {
  DefectReport r;
  r.seed = seed;
  r.points = std::move(points);
  Rng rng(seed);
  if (r.points.empty()) {
    r.smooth = true;
    r.certified = true;
    r.notes.push_back("no singular points: sigma is undefined without a projection point (X is smooth)");
    return r;
  }
  if (r.points.size() == 1 && r.points[0].exact && local_equation(f, *r.points[0].exact).g2.is_zero()) {
    analyze_point(f, r.points[0], std::nullopt, rng.next_seed());
    r.cone = true;
    r.sigma = 6;
    r.certified = true;
    r.notes.push_back("cone over a smooth cubic surface: sigma = 6 without projection");
    return r;
  }

  // One projection per rational point, the numeric fallback only if none.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < r.points.size(); ++i)
    if (r.points[i].exact) order.push_back(i);
  bool numeric = order.empty();
  if (numeric) {
    order.push_back(0);
    r.notes.push_back("no singular point has rational coordinates: sigma from a numeric projection, uncertified");
  }
  std::vector<std::optional<Projection>> proj(r.points.size());
  for (std::size_t i : order) {
    std::uint64_t s = rng.next_seed();
    try {
      proj[i] = project_from(f, r.points[i], s, settings);
    } catch (const WitnessError& e) {
      r.notes.push_back("projection from point " + std::to_string(i) + " failed: " + e.what());
    }
  }
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    std::optional<int> k;
    if (proj[i]) k = proj[i]->k;
    analyze_point(f, r.points[i], k, rng.next_seed());
  }

  // Preference: corank 2, then 1, then 0, then 3.
  auto rank_key = [](int c) { return c == 2 ? 0 : c == 1 ? 1 : c == 0 ? 2 : 3; };
  std::vector<std::size_t> done;
  for (std::size_t i : order)
    if (proj[i]) done.push_back(i);
  std::stable_sort(done.begin(), done.end(),
                   [&](std::size_t a, std::size_t b) { return rank_key(proj[a]->corank) < rank_key(proj[b]->corank); });
  for (std::size_t i : done) r.projections.push_back(std::move(*proj[i]));
  if (r.projections.empty()) {
    r.notes.push_back("sigma undetermined: no projection could be decomposed");
    return r;
  }

  for (const auto& p : r.projections) {
    int degree_sum = 0;
    for (int d : p.partition.degrees()) degree_sum += d;
    if (degree_sum != p.witness.degree)
      throw CertificationFailure("witness degrees do not add up to the degree of C_q");
    if (p.corank == 2 && p.k < 2)
      throw CertificationFailure("corank-2 projection with irreducible C_q");
    if (p.sigma < 0 || p.sigma > 5)
      throw CertificationFailure("sigma = " + std::to_string(p.sigma) + " out of range for a non-cone");
    if (p.sigma != r.projections.front().sigma)
      throw CertificationFailure("projection points disagree on sigma (" + std::to_string(r.projections.front().sigma) +
                                 " vs " + std::to_string(p.sigma) + ")");
  }
  r.sigma = r.projections.front().sigma;
  r.certified = std::any_of(r.projections.begin(), r.projections.end(), [](const Projection& p) { return p.certified; });
  if (*r.sigma == 5) {
    bool segre = r.points.size() == 10 && std::all_of(r.points.begin(), r.points.end(), [](const SingularPoint& p) {
                   return p.type == SingularityType::A(1);
                 });
    if (!segre) throw CertificationFailure("sigma = 5 without ten nodes");
  }
  if (r.projections.front().quadric == QuadricClass::DoublePlane)
    r.notes.push_back("C_q is non-reduced (double plane); components counted on the reduced curve");
  return r;
}

HodgeReport hodge_numbers(const std::vector<SingularPoint>& points, int sigma) {
  HodgeReport h;
  h.sigma = sigma;
  bool known = true;
  int b = 0, l = 0;
  for (const auto& p : points) {
    if (p.milnor < 0) throw std::invalid_argument("hodge_numbers: Milnor number unknown");
    h.mu_total += p.milnor;
    h.mu_certified = h.mu_certified && p.milnor_certified;
    if (p.invariants) {
      b += p.invariants->b11;
      l += p.invariants->l11;
    } else {
      known = false;
    }
  }
  h.h3 = 10 - h.mu_total + sigma;
  if (known) {
    h.B = b;
    h.L = l;
    h.h12 = 5 - b;
    h.h21 = 5 - (l - sigma) - b;
  }
  return h;
}

}  // namespace cubic3
