#include "cubic3/witness.hpp"

#include <algorithm>
#include <numeric>

namespace cubic3 {

const char* to_string(QuadricClass c) {
  switch (c) {
    case QuadricClass::Smooth: return "smooth";
    case QuadricClass::Cone: return "cone";
    case QuadricClass::TwoPlanes: return "two planes";
    case QuadricClass::DoublePlane: return "double plane";
    case QuadricClass::Zero: return "zero";
  }
  return "?";
}

QuadricStructure detect_nonreduced(const Form& g2) {
  if (g2.is_zero()) throw WitnessError("quadric part vanishes identically: not an isolated singularity or a cone");
  RatMatrix m = quad_matrix(g2);
  auto d = diagonalize_symmetric(m);
  QuadricStructure out;
  out.rank = d.rank;
  // y = P^{-1} x diagonalizes: g2 = sum d_i y_i^2.
  RatMatrix pinv = *inverse(d.transform);
  std::vector<int> nz;
  for (Eigen::Index i = 0; i < d.diagonal.size(); ++i)
    if (d.diagonal(i) != 0) nz.push_back(static_cast<int>(i));
  switch (d.rank) {
    case 4: out.kind = QuadricClass::Smooth; break;
    case 3: out.kind = QuadricClass::Cone; break;
    case 2: {
      out.kind = QuadricClass::TwoPlanes;
      CVector a = to_complex(RatVector(pinv.row(nz[0]).transpose()));
      CVector b = to_complex(RatVector(pinv.row(nz[1]).transpose()));
      Complex s = std::sqrt(Complex(-to_double(d.diagonal(nz[1]) / d.diagonal(nz[0])), 0.0));
      out.planes = {a + s * b, a - s * b};
      break;
    }
    case 1:
      out.kind = QuadricClass::DoublePlane;
      out.double_plane = primitive_integer(RatVector(pinv.row(nz[0]).transpose()));
      break;
    default: out.kind = QuadricClass::Zero;
  }
  return out;
}

double membership_residual(const std::vector<Form>& equations, const CVector& x) {
  CVector u = x / x.norm();
  double r = 0.0;
  for (const auto& f : equations) r = std::max(r, std::abs(f.evaluate(u)));
  return r;
}

double membership_residual(const std::vector<CPoly>& equations, const CVector& x) {
  CVector u = x / x.norm();
  double r = 0.0;
  for (const auto& f : equations) r = std::max(r, std::abs(f.evaluate(u)));
  return r;
}

namespace {

std::vector<CPoly> complex_equations(const std::vector<Form>& eqs) {
  std::vector<CPoly> out;
  for (const auto& f : eqs) out.push_back(to_complex(f));
  return out;
}

// eqs + slice . x + patch . x - 1.
PolySystem sliced_system(const std::vector<CPoly>& eqs, const CVector& slice, const CVector& patch) {
  const int n = static_cast<int>(patch.size());
  std::vector<CPoly> all = eqs;
  all.push_back(CPoly::linear(slice));
  CPoly p = CPoly::linear(patch);
  p.add_term(Exponent(n, 0), -1.0);
  all.push_back(p);
  return PolySystem(std::move(all), n);
}

RatVector random_rational_slice(Rng& rng, int n) {
  RatVector v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = rng.integer(-9, 9);
  } while (v.isZero());
  return v;
}

template <class P>
int expected_degree(const std::vector<P>& eqs) {
  int d = 1;
  for (const auto& f : eqs) d *= f.degree();
  return d;
}

}  // namespace

WitnessSet witness_points(const std::vector<CPoly>& equations, std::uint64_t seed,
                          const TrackerSettings& settings, int max_attempts) {
  if (equations.empty()) throw std::invalid_argument("witness_points needs equations");
  const int n = equations.front().nvars();
  if (static_cast<int>(equations.size()) != n - 2)
    throw std::invalid_argument("witness_points expects a curve: n-2 equations in n variables");
  for (const auto& f : equations)
    if (!f.is_homogeneous() || f.degree() < 1) throw std::invalid_argument("witness equations must be homogeneous");
  Rng rng(seed);
  WitnessSet w;
  w.system = equations;
  w.degree = expected_degree(equations);
  w.seed = seed;
  std::string last;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    w.attempts = attempt;
    w.slice = random_rational_slice(rng, n);
    w.patch = rng.gaussian_vector(n);
    std::vector<CPoly> sys = equations;
    sys.push_back(CPoly::linear(to_complex(w.slice)));
    SolveResult res;
    try {
      res = solve_on_patch(sys, w.patch, settings, rng.next_seed());
    } catch (const TrackingFailure& e) {
      last = e.what();
      continue;
    }
    bool simple = true;
    std::vector<CVector> pts;
    for (const auto& s : res.solutions) {
      if (s.multiplicity != 1 || s.singular) simple = false;
      if (membership_residual(equations, s.x) > 1e-8) simple = false;
      pts.push_back(s.x);
    }
    if (simple && static_cast<int>(pts.size()) == w.degree) {
      w.points = std::move(pts);
      return w;
    }
    last = std::to_string(pts.size()) + " distinct endpoints, expected " + std::to_string(w.degree) + " simple points";
  }
  throw WitnessError("non-reduced or positive-dimensional excess: " + last);
}

WitnessSet witness_points(const std::vector<Form>& equations, std::uint64_t seed,
                          const TrackerSettings& settings, int max_attempts) {
  auto w = witness_points(complex_equations(equations), seed, settings, max_attempts);
  w.equations = equations;
  return w;
}

WitnessSet curve_witness(const Form& g2, const Form& g3, std::uint64_t seed, const TrackerSettings& settings) {
  auto q = detect_nonreduced(g2);
  if (q.kind == QuadricClass::DoublePlane) {
    Form l = Form::linear(*q.double_plane);
    auto w = witness_points({l, g3}, seed, settings);
    w.reduced = false;
    return w;
  }
  return witness_points({g2, g3}, seed, settings);
}

std::optional<std::vector<CVector>> move_slice(const std::vector<CPoly>& ceqs, const CVector& patch,
                                               const std::vector<CVector>& points, const CVector& from,
                                               const CVector& to, const TrackerSettings& settings,
                                               std::vector<std::vector<CVector>>* trails) {
  PolySystem a = sliced_system(ceqs, from, patch);
  PolySystem b = sliced_system(ceqs, to, patch);
  StraightLineHomotopy h(a, b, 1.0);
  std::vector<CVector> out;
  if (trails) trails->assign(points.size(), {});
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::pair<Complex, CVector>> samples;
    auto seg = track_segment(h, points[i], 0.0, 1.0, settings, trails ? &samples : nullptr);
    if (seg.status != PathStatus::Tracking) return std::nullopt;
    CVector x = seg.x;
    newton_refine(b, x, 3, 1e-15);
    if (b.evaluate(x).norm() > 1e-8 * (1.0 + x.norm())) return std::nullopt;
    out.push_back(x);
    if (trails) {
      (*trails)[i].push_back(points[i]);
      for (auto& s : samples) (*trails)[i].push_back(std::move(s.second));
    }
  }
  return out;
}

std::optional<std::vector<int>> monodromy_loop(const WitnessSet& w, const CVector& l1, const CVector& l2,
                                               const TrackerSettings& settings,
                                               std::vector<std::vector<CVector>>* trails) {
  CVector l0 = to_complex(w.slice);
  std::vector<std::vector<CVector>> t1, t2, t3;
  auto p1 = move_slice(w.system, w.patch, w.points, l0, l1, settings, trails ? &t1 : nullptr);
  if (!p1) return std::nullopt;
  auto p2 = move_slice(w.system, w.patch, *p1, l1, l2, settings, trails ? &t2 : nullptr);
  if (!p2) return std::nullopt;
  auto p3 = move_slice(w.system, w.patch, *p2, l2, l0, settings, trails ? &t3 : nullptr);
  if (!p3) return std::nullopt;
  const int m = static_cast<int>(w.points.size());
  std::vector<int> perm(m, -1);
  std::vector<bool> used(m, false);
  for (int i = 0; i < m; ++i) {
    const CVector& x = (*p3)[i];
    int best = -1;
    double bd = 1e300;
    for (int j = 0; j < m; ++j) {
      double d = (x - w.points[j]).norm() / (1.0 + x.norm());
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (bd > 1e-6 || used[best]) return std::nullopt;
    used[best] = true;
    perm[i] = best;
  }
  if (trails) {
    trails->assign(m, {});
    for (int i = 0; i < m; ++i) {
      auto& tr = (*trails)[i];
      tr = t1[i];
      tr.insert(tr.end(), t2[i].begin() + 1, t2[i].end());
      tr.insert(tr.end(), t3[i].begin() + 1, t3[i].end());
    }
  }
  return perm;
}

TraceData trace_data(const WitnessSet& w, std::uint64_t seed, const TrackerSettings& settings) {
  // Slices L0 + t * patch restrict to the parallel affine family L0 . x = -t
  // on the patch, where coordinate sums over a full component are affine in t.
  Rng rng(seed);
  TraceData out;
  CVector l0 = to_complex(w.slice);
  for (int attempt = 0; attempt < 3 && !out.ok; ++attempt) {
    double scale = 0.0;
    for (const auto& p : w.points) scale = std::max(scale, p.norm());
    Complex dir = rng.unit_complex();
    out.delta = 1e-2 * std::pow(2.0, -attempt);
    CVector lp = l0 + out.delta * dir * w.patch;
    CVector lm = l0 - out.delta * dir * w.patch;
    auto plus = move_slice(w.system, w.patch, w.points, l0, lp, settings);
    auto minus = move_slice(w.system, w.patch, w.points, l0, lm, settings);
    if (!plus || !minus) continue;
    out.second_differences.clear();
    for (std::size_t i = 0; i < w.points.size(); ++i)
      out.second_differences.push_back((*plus)[i] - 2.0 * w.points[i] + (*minus)[i]);
    out.scale = scale;
    out.ok = true;
  }
  return out;
}

TraceCertificate trace_test(const std::vector<int>& block, const TraceData& data) {
  TraceCertificate c;
  if (!data.ok) {
    c.indeterminate = true;
    return c;
  }
  const int n = static_cast<int>(data.second_differences.front().size());
  CVector sum = CVector::Zero(n);
  for (int i : block) sum += data.second_differences.at(i);
  double total = 0.0;
  for (const auto& d : data.second_differences) total += d.norm();
  double denom = std::max(total, data.delta * data.delta * (1.0 + data.scale) * 1e-3);
  c.deviation = sum.norm() / denom;
  c.pass = c.deviation < kTraceTolerance;
  return c;
}

TraceCertificate trace_test(const std::vector<int>& block, const WitnessSet& w, std::uint64_t seed,
                            const TrackerSettings& settings) {
  return trace_test(block, trace_data(w, seed, settings));
}

std::vector<int> ComponentPartition::degrees() const {
  std::vector<int> d;
  for (const auto& b : blocks) d.push_back(b.degree);
  return d;
}

namespace {

std::vector<std::vector<int>> orbits(std::vector<int>& parent) {
  const int m = static_cast<int>(parent.size());
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<std::vector<int>> by_root(m);
  for (int i = 0; i < m; ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& b : by_root)
    if (!b.empty()) out.push_back(std::move(b));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  return out;
}

}  // namespace

ComponentPartition monodromy_partition(const WitnessSet& w, int maxloops, std::uint64_t seed,
                                       const TrackerSettings& settings, int window) {
  Rng rng(seed);
  ComponentPartition out;
  out.seed = seed;
  const int m = static_cast<int>(w.points.size());
  const int n = static_cast<int>(w.patch.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  TraceData trace = trace_data(w, rng.next_seed(), settings);
  auto all_certified = [&]() {
    for (const auto& b : orbits(parent))
      if (!trace_test(b, trace).pass) return false;
    return true;
  };

  int quiet = 0;
  while (out.loops < maxloops) {
    if (orbits(parent).size() == 1) break;
    if (quiet >= window && all_certified()) break;
    ++out.loops;
    auto perm = monodromy_loop(w, rng.gaussian_vector(n), rng.gaussian_vector(n), settings);
    if (!perm) {
      ++out.discarded_loops;
      continue;
    }
    bool merged = false;
    for (int i = 0; i < m; ++i) {
      int a = find(i), b = find((*perm)[i]);
      if (a != b) {
        parent[a] = b;
        merged = true;
      }
    }
    quiet = merged ? 0 : quiet + 1;
  }

  auto blocks = orbits(parent);
  if (!all_certified()) {
    out.stabilized = false;
    // Merge failing orbits by the smallest unions whose traces vanish.
    std::vector<std::vector<int>> good, bad;
    for (auto& b : blocks) (trace_test(b, trace).pass ? good : bad).push_back(b);
    while (!bad.empty()) {
      const int k = static_cast<int>(bad.size());
      int best_mask = (1 << k) - 1;
      int best_size = k + 1;
      for (int mask = 1; mask < (1 << k); ++mask) {
        if (!(mask & 1)) continue;  // always include the first failing orbit
        std::vector<int> u;
        for (int j = 0; j < k; ++j)
          if (mask & (1 << j)) u.insert(u.end(), bad[j].begin(), bad[j].end());
        int size = __builtin_popcount(mask);
        if (size < best_size && trace_test(u, trace).pass) {
          best_size = size;
          best_mask = mask;
        }
      }
      std::vector<int> u;
      std::vector<std::vector<int>> rest;
      for (int j = 0; j < k; ++j) {
        if (best_mask & (1 << j)) u.insert(u.end(), bad[j].begin(), bad[j].end());
        else rest.push_back(bad[j]);
      }
      std::sort(u.begin(), u.end());
      good.push_back(u);
      bad = rest;
      out.trace_merged = true;
    }
    blocks = good;
    std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
  }
  for (auto& b : blocks) {
    WitnessBlock wb;
    wb.certificate = trace_test(b, trace);
    wb.degree = static_cast<int>(b.size());
    wb.points = std::move(b);
    out.blocks.push_back(std::move(wb));
  }
  return out;
}

}  // namespace cubic3
