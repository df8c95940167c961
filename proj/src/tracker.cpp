#include "cubic3/tracker.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cubic3 {

void TrackerSettings::validate() const {
  if (!(min_step > 0 && min_step <= initial_step && initial_step <= max_step))
    throw std::invalid_argument("tracker settings need 0 < min_step <= initial_step <= max_step");
  if (!(corrector_tolerance > 0) || !(clustering_radius > 0) || !(divergence_bound > 0))
    throw std::invalid_argument("tracker tolerances must be positive");
  if (max_corrector_iterations < 1) throw std::invalid_argument("need at least one corrector iteration");
  if (!(endgame_radius > 0 && endgame_radius < 1)) throw std::invalid_argument("endgame radius must lie in (0,1)");
  if (endgame_samples < 4 || max_winding < 1) throw std::invalid_argument("bad endgame sampling");
}

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Tracking: return "tracking";
    case PathStatus::Converged: return "converged";
    case PathStatus::Diverged: return "diverged";
    case PathStatus::SingularEndpoint: return "singular-endpoint";
    case PathStatus::Failed: return "failed";
  }
  return "?";
}

// ---------------------------------------------------------------- PolySystem

PolySystem::PolySystem(std::vector<CPoly> equations, int nvars)
    : equations_(std::move(equations)), nvars_(nvars) {
  for (const auto& eq : equations_) {
    if (eq.nvars() != nvars_) throw std::invalid_argument("PolySystem: equations over different variable sets");
    std::vector<Term> terms;
    for (const auto& [e, c] : eq.terms()) {
      terms.push_back({c, e});
      for (int k : e) max_degree_ = std::max(max_degree_, k);
    }
    compiled_.push_back(std::move(terms));
  }
}

PolySystem PolySystem::from_forms(const std::vector<Form>& equations, int nvars) {
  std::vector<CPoly> eqs;
  for (const auto& f : equations) eqs.push_back(to_complex(f));
  return PolySystem(std::move(eqs), nvars);
}

std::vector<int> PolySystem::degrees() const {
  std::vector<int> d;
  for (const auto& eq : equations_) d.push_back(eq.degree());
  return d;
}

CVector PolySystem::evaluate(const CVector& x) const {
  CVector v;
  CMatrix j;
  evaluate(x, v, j);
  return v;
}

void PolySystem::evaluate(const CVector& x, CVector& value, CMatrix& jacobian) const {
  if (x.size() != nvars_) throw std::invalid_argument("PolySystem::evaluate: dimension mismatch");
  const int n = nvars_;
  const int m = size();
  // pw(i, k) = x_i^k
  CMatrix pw(n, max_degree_ + 1);
  for (int i = 0; i < n; ++i) {
    pw(i, 0) = 1.0;
    for (int k = 1; k <= max_degree_; ++k) pw(i, k) = pw(i, k - 1) * x(i);
  }
  value.setZero(m);
  jacobian.setZero(m, n);
  for (int r = 0; r < m; ++r) {
    for (const auto& term : compiled_[r]) {
      Complex mono = term.coefficient;
      for (int i = 0; i < n; ++i)
        if (term.exponent[i]) mono *= pw(i, term.exponent[i]);
      value(r) += mono;
      for (int i = 0; i < n; ++i) {
        int e = term.exponent[i];
        if (e == 0) continue;
        Complex d = term.coefficient * static_cast<double>(e) * pw(i, e - 1);
        for (int j = 0; j < n; ++j)
          if (j != i && term.exponent[j]) d *= pw(j, term.exponent[j]);
        jacobian(r, i) += d;
      }
    }
  }
}

// ------------------------------------------------------------------ Homotopy

StraightLineHomotopy::StraightLineHomotopy(PolySystem start, PolySystem target, Complex gamma)
    : start_(std::move(start)), target_(std::move(target)), gamma_(gamma) {
  if (start_.nvars() != target_.nvars() || start_.size() != target_.size())
    throw std::invalid_argument("start and target systems have different shapes");
  if (target_.size() != target_.nvars()) throw std::invalid_argument("homotopy needs a square system");
}

void StraightLineHomotopy::evaluate(const CVector& x, Complex t, CVector& h, CMatrix& hx, CVector& ht) const {
  CVector g, f;
  CMatrix gx, fx;
  start_.evaluate(x, g, gx);
  target_.evaluate(x, f, fx);
  Complex a = gamma_ * (1.0 - t);
  h = a * g + t * f;
  hx = a * gx + t * fx;
  ht = f - gamma_ * g;
}

StartSystem total_degree_start(const PolySystem& target) {
  const int n = target.nvars();
  if (target.size() != n) throw std::invalid_argument("total-degree start needs a square system");
  auto degrees = target.degrees();
  std::vector<CPoly> eqs;
  for (int i = 0; i < n; ++i) {
    if (degrees[i] < 1) throw std::invalid_argument("equation of degree < 1 in target system");
    Exponent e(n, 0);
    e[i] = degrees[i];
    CPoly g(n);
    g.add_term(e, 1.0);
    g.add_term(Exponent(n, 0), -1.0);
    eqs.push_back(std::move(g));
  }
  StartSystem s{PolySystem(std::move(eqs), n), {}};
  std::vector<int> idx(n, 0);
  while (true) {
    CVector x(n);
    for (int i = 0; i < n; ++i) x(i) = std::polar(1.0, 2.0 * std::numbers::pi * idx[i] / degrees[i]);
    s.solutions.push_back(x);
    int i = 0;
    while (i < n && ++idx[i] == degrees[i]) idx[i++] = 0;
    if (i == n) break;
  }
  return s;
}

// ------------------------------------------------------------------ tracking

namespace {

bool finite(const CVector& v) { return v.allFinite(); }

// Tangent dx/dt = -Hx^{-1} Ht.
bool tangent(const Homotopy& h, const CVector& x, Complex t, CVector& out) {
  CVector hv, ht;
  CMatrix hx;
  h.evaluate(x, t, hv, hx, ht);
  Eigen::PartialPivLU<CMatrix> lu(hx);
  out = lu.solve(-ht);
  return finite(out);
}

// Newton at fixed t; succeeds when an update falls under the tolerance.
bool correct(const Homotopy& h, CVector& x, Complex t, const TrackerSettings& s) {
  CVector hv, ht;
  CMatrix hx;
  double prev = 0.0;
  for (int it = 0; it < s.max_corrector_iterations; ++it) {
    h.evaluate(x, t, hv, hx, ht);
    Eigen::PartialPivLU<CMatrix> lu(hx);
    CVector dx = lu.solve(-hv);
    if (!finite(dx)) return false;
    double nd = dx.norm();
    double scale = 1.0 + x.norm();
    if (it == 0 && nd > 0.1 * scale) return false;  // too far: risk of path jumping
    if (it > 0 && nd > 0.5 * prev && nd > s.corrector_tolerance * scale) return false;
    x += dx;
    if (nd <= s.corrector_tolerance * scale) return true;
    prev = nd;
  }
  return false;
}

}  // namespace

SegmentResult track_segment(const Homotopy& h, const CVector& x0, Complex t0, Complex t1,
                            const TrackerSettings& s,
                            std::vector<std::pair<Complex, CVector>>* samples) {
  SegmentResult r;
  r.x = x0;
  r.t = t0;
  const double length = std::abs(t1 - t0);
  if (length == 0.0) return r;
  const Complex dir = (t1 - t0) / length;
  double pos = 0.0;
  double step = std::min(s.initial_step, length);
  int streak = 0;
  CVector k1, k2, k3, k4;
  while (pos < length) {
    double ds = std::min(step, length - pos);
    bool last = pos + ds >= length;
    Complex t = t0 + pos * dir;
    Complex dt = ds * dir;
    Complex tn = last ? t1 : t + dt;
    CVector xp;
    bool ok = tangent(h, r.x, t, k1) && tangent(h, r.x + 0.5 * dt * k1, t + 0.5 * dt, k2) &&
              tangent(h, r.x + 0.5 * dt * k2, t + 0.5 * dt, k3) && tangent(h, r.x + dt * k3, t + dt, k4);
    if (ok) {
      xp = r.x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ok = finite(xp) && correct(h, xp, tn, s);
    }
    if (ok) {
      r.x = xp;
      pos = last ? length : pos + ds;
      r.t = tn;
      ++r.steps;
      if (samples) samples->emplace_back(tn, r.x);
      if (r.x.norm() > s.divergence_bound) {
        r.status = PathStatus::Diverged;
        return r;
      }
      if (++streak >= 3) {
        step = std::min(2.0 * step, s.max_step);
        streak = 0;
      }
    } else {
      streak = 0;
      step *= 0.5;
      if (step < s.min_step) {
        r.status = PathStatus::Failed;
        return r;
      }
    }
  }
  return r;
}

namespace {

struct CauchyLoop {
  bool closed = false;
  int winding = 0;
  CVector mean;
  double spread = 0.0;
  CVector start;
};

// Loops around t = 1 at the given radius starting from x at t = 1 - radius.
CauchyLoop cauchy_loop(const Homotopy& h, const CVector& x, double radius, const TrackerSettings& s,
                       int& steps) {
  CauchyLoop out;
  out.start = x;
  const int n = s.endgame_samples;
  CVector cur = x;
  CVector sum = CVector::Zero(x.size());
  std::vector<CVector> pts;
  for (int c = 1; c <= s.max_winding; ++c) {
    for (int k = 0; k < n; ++k) {
      Complex ta = 1.0 - radius * std::polar(1.0, 2.0 * std::numbers::pi * k / n);
      Complex tb = 1.0 - radius * std::polar(1.0, 2.0 * std::numbers::pi * (k + 1) / n);
      pts.push_back(cur);
      sum += cur;
      auto seg = track_segment(h, cur, ta, tb, s);
      steps += seg.steps;
      if (seg.status != PathStatus::Tracking) return out;
      cur = seg.x;
    }
    double tol = 1e-6 * (1.0 + x.norm());
    if ((cur - x).norm() < tol) {
      out.closed = true;
      out.winding = c;
      out.mean = sum / static_cast<double>(pts.size());
      for (const auto& p : pts) out.spread = std::max(out.spread, (p - out.mean).norm());
      return out;
    }
  }
  return out;
}

}  // namespace

PathResult track(const Homotopy& h, const CVector& start, const TrackerSettings& s) {
  PathResult out;
  const double re = s.endgame_radius;
  auto seg = track_segment(h, start, 0.0, 1.0 - re, s);
  out.steps = seg.steps;
  out.x = seg.x;
  out.last_t = seg.t;
  if (seg.status != PathStatus::Tracking) {
    out.status = seg.status;
    return out;
  }
  const CVector xe = seg.x;

  // Direct finish: fine when the endpoint is a regular solution.
  auto fin = track_segment(h, xe, 1.0 - re, 1.0, s);
  out.steps += fin.steps;
  if (fin.status == PathStatus::Tracking) {
    CVector hv, ht;
    CMatrix hx;
    h.evaluate(fin.x, 1.0, hv, hx, ht);
    Eigen::JacobiSVD<CMatrix> svd(hx);
    const auto& sv = svd.singularValues();
    double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (cond < 1e8) {
      out.status = PathStatus::Converged;
      out.x = fin.x;
      out.last_t = 1.0;
      out.residual = hv.norm();
      return out;
    }
  } else if (fin.status == PathStatus::Diverged) {
    out.status = PathStatus::Diverged;
    out.x = fin.x;
    out.last_t = fin.t;
    return out;
  }

  // Cauchy endgame on shrinking circles until successive estimates agree.
  CVector x = xe;
  double radius = re;
  std::optional<CauchyLoop> prev;
  int growth = 0;
  for (int level = 0; level < 10; ++level) {
    if (level > 0) {
      auto in = track_segment(h, x, 1.0 - radius, 1.0 - radius / 4.0, s);
      out.steps += in.steps;
      if (in.status != PathStatus::Tracking) {
        out.status = in.status == PathStatus::Diverged ? PathStatus::Diverged : PathStatus::Failed;
        out.last_t = in.t;
        return out;
      }
      x = in.x;
      radius /= 4.0;
    }
    auto loop = cauchy_loop(h, x, radius, s, out.steps);
    if (!loop.closed) continue;
    if (prev) {
      double scale = 1.0 + loop.mean.norm();
      if ((loop.mean - prev->mean).norm() < 1e-9 * scale) {
        // A loop that sweeps up several nearby paths also has a stable mean,
        // the average of their endpoints; only a true root is accepted.
        CVector hv, ht;
        CMatrix hx;
        h.evaluate(loop.mean, 1.0, hv, hx, ht);
        if (hv.norm() <= 1e-8 * (1.0 + hx.norm() * scale)) {
          out.status = PathStatus::SingularEndpoint;
          out.x = loop.mean;
          out.winding = loop.winding;
          out.last_t = 1.0;
          out.residual = hv.norm();
          return out;
        }
      }
      // Samples spreading out while the path itself grows: it runs off to
      // infinity. Spread alone also grows while loops still wander between
      // nearby branches.
      growth = loop.spread > prev->spread && x.norm() > 1.5 * prev->start.norm() ? growth + 1 : 0;
      if (growth >= 2) {
        out.status = PathStatus::Diverged;
        out.x = loop.mean;
        out.last_t = 1.0 - radius;
        return out;
      }
    }
    prev = loop;
  }
  out.status = PathStatus::Failed;
  out.last_t = 1.0 - radius;
  return out;
}

double newton_refine(const PolySystem& sys, CVector& x, int iterations, double tolerance) {
  double nd = INFINITY;
  CVector v;
  CMatrix j;
  for (int it = 0; it < iterations; ++it) {
    sys.evaluate(x, v, j);
    Eigen::PartialPivLU<CMatrix> lu(j);
    CVector dx = lu.solve(-v);
    if (!finite(dx)) break;
    nd = dx.norm();
    x += dx;
    if (nd <= tolerance * (1.0 + x.norm())) break;
  }
  return nd;
}

// ---------------------------------------------------------------- solve_all

SolveResult solve_all(const PolySystem& sys, const TrackerSettings& s, std::uint64_t seed) {
  s.validate();
  Rng rng(seed);
  SolveResult out;
  out.seed = seed;
  out.gamma = rng.unit_complex();
  auto start = total_degree_start(sys);
  StraightLineHomotopy h(start.system, sys, out.gamma);
  TrackerSettings careful = s;
  careful.max_step = std::max(s.min_step, s.max_step / 5.0);
  careful.initial_step = std::min(s.initial_step, careful.max_step);

  struct Endpoint {
    CVector x;
    bool singular;
  };
  std::vector<Endpoint> ends;
  out.paths = static_cast<int>(start.solutions.size());
  for (const auto& x0 : start.solutions) {
    auto p = track(h, x0, s);
    if (p.status == PathStatus::Failed) p = track(h, x0, careful);
    switch (p.status) {
      case PathStatus::Converged:
        ++out.converged;
        ends.push_back({p.x, false});
        break;
      case PathStatus::SingularEndpoint:
        ++out.singular;
        ends.push_back({p.x, true});
        break;
      case PathStatus::Diverged: ++out.diverged; break;
      default: ++out.failed; break;
    }
  }
  if (out.failed > s.max_failure_fraction * out.paths)
    throw TrackingFailure(std::to_string(out.failed) + " of " + std::to_string(out.paths) +
                          " paths failed (seed " + std::to_string(seed) + ")");

  // Single-linkage clustering.
  const int m = static_cast<int>(ends.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double scale = std::max(1.0, ends[a].x.norm());
      if ((ends[a].x - ends[b].x).norm() < s.clustering_radius * scale) parent[find(a)] = find(b);
    }
  std::vector<int> order;
  std::vector<std::vector<int>> members(m);
  for (int a = 0; a < m; ++a) {
    if (members[find(a)].empty()) order.push_back(find(a));
    members[find(a)].push_back(a);
  }
  for (int root : order) {
    const auto& mem = members[root];
    Solution sol;
    sol.multiplicity = static_cast<int>(mem.size());
    sol.x = CVector::Zero(sys.nvars());
    for (int a : mem) sol.x += ends[a].x;
    sol.x /= static_cast<double>(mem.size());
    sol.singular = sol.multiplicity > 1 || ends[mem.front()].singular;
    if (!sol.singular) newton_refine(sys, sol.x, 4, 1e-14);
    sol.residual = sys.evaluate(sol.x).norm();
    out.solutions.push_back(std::move(sol));
  }
  return out;
}

SolveResult solve_on_patch(const std::vector<CPoly>& equations, const CVector& patch,
                           const TrackerSettings& s, std::uint64_t seed) {
  const int n = static_cast<int>(patch.size());
  if (static_cast<int>(equations.size()) != n - 1)
    throw std::invalid_argument("solve_on_patch needs n-1 equations in n variables");
  std::vector<CPoly> eqs = equations;
  CPoly lin = CPoly::linear(patch);
  lin.add_term(Exponent(n, 0), -1.0);
  eqs.push_back(lin);
  return solve_all(PolySystem(std::move(eqs), n), s, seed);
}

// ----------------------------------------------------------------------- Rng

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

Complex Rng::unit_complex() { return std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)); }

Complex Rng::gaussian_complex() {
  std::normal_distribution<double> nd;
  double re = nd(engine_);
  double im = nd(engine_);
  return {re, im};
}

CVector Rng::gaussian_vector(int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = gaussian_complex();
  return v;
}

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

// ----------------------------------------------------- rational reconstruction

Rat best_rational(double x, std::int64_t bound) {
  if (!std::isfinite(x)) throw std::invalid_argument("best_rational of a non-finite value");
  // Convergents h/k of the continued fraction of x.
  BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  long double r = x;
  for (int it = 0; it < 64; ++it) {
    long double a = std::floor(r);
    BigInt ai(static_cast<long long>(a));
    BigInt h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > bound) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    long double frac = r - a;
    if (frac < 1e-15L) break;
    r = 1.0L / frac;
    if (r > 1e18L) break;
  }
  if (k1 == 0) return Rat(BigInt(static_cast<long long>(std::llround(x))));
  return Rat(h1, k1);
}

std::optional<RatVector> rational_reconstruct(const CVector& p, std::int64_t bound, double tolerance) {
  if (p.size() == 0) return std::nullopt;
  Eigen::Index j = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i)
    if (std::abs(p(i)) > std::abs(p(j)) * (1.0 + 1e-12)) j = i;
  if (std::abs(p(j)) == 0.0) return std::nullopt;
  RatVector out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Complex ratio = p(i) / p(j);
    if (std::abs(ratio.imag()) > tolerance) return std::nullopt;
    Rat q = best_rational(ratio.real(), bound);
    if (std::abs(to_double(q) - ratio.real()) > tolerance) return std::nullopt;
    out(i) = q;
  }
  return primitive_integer(out);
}

std::optional<RatVector> rational_reconstruct(const CVector& p, std::int64_t bound, double tolerance,
                                              const std::function<bool(const RatVector&)>& verify) {
  auto q = rational_reconstruct(p, bound, tolerance);
  if (q && !verify(*q)) return std::nullopt;
  return q;
}

}  // namespace cubic3
