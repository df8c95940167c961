#include "cubic3/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cubic3 {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

// ------------------------------------------------------- planes and scrolls

namespace {

SpanTest span_of(const std::vector<CVector>& pts) {
  const int n = static_cast<int>(pts.front().size());
  CMatrix m(static_cast<Eigen::Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].normalized().transpose();
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  SpanTest out;
  out.rank = static_cast<int>(s.size());
  out.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 1; r < s.size(); ++r)
    if (s(r) < 1e-7 * s(0)) {
      out.rank = static_cast<int>(r);
      out.gap = s(r - 1) / std::max(s(r), 1e-300);
      break;
    }
  // Without a clear cut, the largest ratio decides how marginal the rank is.
  if (out.rank == s.size() && s.size() > 1) {
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 1; r < s.size(); ++r) worst = std::min(worst, s(r - 1) / s(r));
    out.gap = std::isfinite(worst) && s(s.size() - 1) < 1e-4 * s(0) ? worst : std::numeric_limits<double>::infinity();
  }
  out.determined = out.gap >= kSpanGap;
  return out;
}

}  // namespace

SpanTest block_span(const WitnessSet& w, const WitnessBlock& block, std::uint64_t seed,
                    const TrackerSettings& settings) {
  const int n = static_cast<int>(w.patch.size());
  std::vector<CVector> pts;
  for (int i : block.points) pts.push_back(w.points[i]);
  Rng rng(seed);
  CVector l0 = to_complex(w.slice);
  for (int attempt = 0; attempt < 12 && (static_cast<int>(pts.size()) < std::max(6, n + 2) || attempt < 1);
       ++attempt) {
    CVector l1 = rng.gaussian_vector(n);
    auto moved = move_slice(w.system, w.patch, w.points, l0, l1, settings);
    if (!moved) continue;
    for (int i : block.points) pts.push_back((*moved)[i]);
  }
  return span_of(pts);
}

SurfaceVerdict detect_plane_scroll(const Projection& p, std::uint64_t seed, const TrackerSettings& settings,
                                   std::optional<int> sigma) {
  SurfaceVerdict v;
  const auto& blocks = p.partition.blocks;
  const int k = p.partition.components();
  Rng rng(seed);
  auto finish = [&](Verdict plane, Verdict scroll, std::string pattern) {
    v.contains_plane = plane;
    v.contains_scroll = scroll;
    v.pattern = std::move(pattern);
    if (sigma && plane != Verdict::Undetermined && scroll != Verdict::Undetermined)
      v.consistent = ((plane == Verdict::Yes) || (scroll == Verdict::Yes)) == (*sigma > 0);
    return v;
  };
  // Corank 2 always splits C_q into the two plane cubics.
  const int forced = p.corank == 2 ? 2 : 1;
  if (k <= forced) return finish(Verdict::No, Verdict::No, "C_q has no extra components");

  for (const auto& b : blocks)
    if (b.degree == 1) return finish(Verdict::Yes, Verdict::No, "line component");
  if (p.corank >= 2) return finish(Verdict::Yes, Verdict::No, "reducible beyond the forced split at corank >= 2");

  bool marginal = false;
  std::vector<SpanTest> spans;
  for (const auto& b : blocks) {
    spans.push_back(block_span(p.witness, b, rng.next_seed(), settings));
    if (!spans.back().determined) marginal = true;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].degree == 2 && spans[i].determined && spans[i].rank == 3)
      return finish(Verdict::Yes, Verdict::No, "plane conic component");
  if (p.corank == 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (!spans[i].determined || spans[i].rank != 3 || !p.vertex) continue;
      std::vector<CVector> pts;
      for (int j : blocks[i].points) pts.push_back(p.witness.points[j]);
      auto more = block_span(p.witness, blocks[i], rng.next_seed(), settings);
      pts.push_back(*p.vertex);
      auto with_vertex = span_of(pts);
      if (more.rank == 3 && with_vertex.determined && with_vertex.rank == 4)
        return finish(Verdict::Yes, Verdict::No, "plane component missing the cone vertex");
    }
  }
  if (blocks.size() == 2 && blocks[0].degree == 3 && blocks[1].degree == 3 && spans[0].determined &&
      spans[1].determined && spans[0].rank == 4 && spans[1].rank == 4 && p.corank <= 1)
    return finish(Verdict::No, Verdict::Yes, "two twisted cubics spanning P^3");
  if (marginal) return finish(Verdict::Undetermined, Verdict::Undetermined, "span tests numerically marginal");
  return finish(Verdict::Undetermined, Verdict::Undetermined, "reducible C_q matching no pattern");
}

// ---------------------------------------------------------------- lines

Line Line::exact(const RatVector& a, const RatVector& b) {
  Line l;
  l.exact_p = primitive_integer(a);
  l.exact_q = primitive_integer(b);
  l.p = to_complex(*l.exact_p);
  l.q = to_complex(*l.exact_q);
  return l;
}

Line Line::numeric(const CVector& a, const CVector& b) {
  Line l;
  l.p = a.normalized();
  l.q = b.normalized();
  return l;
}

CMatrix ConicBundleData::matrix_at(const CVector& y) const {
  Complex a = parts[0].evaluate(y), b = parts[1].evaluate(y), c = parts[2].evaluate(y);
  Complex d = parts[3].evaluate(y), e = parts[4].evaluate(y), f = parts[5].evaluate(y);
  CMatrix m(3, 3);
  m << a, b / 2.0, d / 2.0, b / 2.0, c, e / 2.0, d / 2.0, e / 2.0, f;
  return m;
}

template <class S>
Poly<S> conic_discriminant(const std::array<Poly<S>, 6>& parts) {
  const S half = S(1) / S(2);
  const Poly<S>& a = parts[0];
  Poly<S> b = parts[1] * half;
  const Poly<S>& c = parts[2];
  Poly<S> d = parts[3] * half;
  Poly<S> e = parts[4] * half;
  const Poly<S>& f = parts[5];
  return a * (c * f - e * e) - b * (b * f - e * d) + d * (b * e - c * d);
}

template Form conic_discriminant<Rat>(const std::array<Form, 6>&);
template CPoly conic_discriminant<Complex>(const std::array<CPoly, 6>&);

namespace {

// Buckets f(T z) by the monomial in (z0, z1); y-free terms are dropped.
template <class S>
std::array<Poly<S>, 6> split_parts(const Poly<S>& g) {
  std::array<Poly<S>, 6> out{Poly<S>(3), Poly<S>(3), Poly<S>(3), Poly<S>(3), Poly<S>(3), Poly<S>(3)};
  for (const auto& [e, c] : g.terms()) {
    int slot = -1;
    if (e[0] == 2 && e[1] == 0) slot = 0;
    else if (e[0] == 1 && e[1] == 1) slot = 1;
    else if (e[0] == 0 && e[1] == 2) slot = 2;
    else if (e[0] == 1 && e[1] == 0) slot = 3;
    else if (e[0] == 0 && e[1] == 1) slot = 4;
    else if (e[0] == 0 && e[1] == 0) slot = 5;
    if (slot < 0) continue;
    out[slot].add_term(Exponent{e[2], e[3], e[4]}, c);
  }
  return out;
}

CMatrix complete_numeric(const CVector& p, const CVector& q) {
  CMatrix best;
  double bd = -1.0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      for (int k = j + 1; k < 5; ++k) {
        CMatrix t = CMatrix::Zero(5, 5);
        t.col(0) = p;
        t.col(1) = q;
        t(i, 2) = 1.0;
        t(j, 3) = 1.0;
        t(k, 4) = 1.0;
        double d = std::abs(t.determinant());
        if (d > bd) {
          bd = d;
          best = t;
        }
      }
  return best;
}

// Binary quadratic coefficient rows (a, b, c) of the partials on the line.
template <class S>
Eigen::Matrix<S, Eigen::Dynamic, 3> partials_on_line(const Form& f, const Eigen::Matrix<S, Eigen::Dynamic, 1>& p,
                                                     const Eigen::Matrix<S, Eigen::Dynamic, 1>& q) {
  auto grad = gradient(f);
  Eigen::Matrix<S, Eigen::Dynamic, 3> m(static_cast<Eigen::Index>(grad.size()), 3);
  Eigen::Matrix<S, Eigen::Dynamic, 1> pq = p + q;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    Poly<S> g = [&] {
      if constexpr (std::is_same_v<S, Rat>) return grad[i];
      else return to_complex(grad[i]);
    }();
    S a = g.evaluate(p), c = g.evaluate(q), s = g.evaluate(pq);
    m(static_cast<Eigen::Index>(i), 0) = a;
    m(static_cast<Eigen::Index>(i), 1) = s - a - c;
    m(static_cast<Eigen::Index>(i), 2) = c;
  }
  return m;
}

template <class S>
S binary_resultant(const S& a1, const S& b1, const S& c1, const S& a2, const S& b2, const S& c2) {
  S ac = a1 * c2 - a2 * c1;
  return ac * ac - (a1 * b2 - a2 * b1) * (b1 * c2 - b2 * c1);
}

}  // namespace

bool line_on(const Form& f, const Line& l, double tolerance) {
  if (l.is_exact()) {
    const RatVector& p = *l.exact_p;
    const RatVector& q = *l.exact_q;
    for (int s : {0, 1, -1, 2})
      if (f.evaluate(RatVector(p + Rat(s) * q)) != 0) return false;
    return f.evaluate(q) == 0;
  }
  CPoly cf = to_complex(f);
  double scale = 0.0;
  for (const auto& [e, c] : cf.terms()) scale = std::max(scale, std::abs(c));
  for (Complex s : {Complex(0.0), Complex(1.0), Complex(-1.0), Complex(0.3, 0.7)}) {
    CVector x = (l.p + s * l.q).normalized();
    if (std::abs(cf.evaluate(x)) > tolerance * scale) return false;
  }
  return std::abs(cf.evaluate(l.q.normalized())) <= tolerance * scale;
}

bool line_meets_singular_locus(const Form& f, const Line& l, double tolerance) {
  if (l.is_exact()) {
    RatMatrix m = partials_on_line<Rat>(f, *l.exact_p, *l.exact_q);
    int r = rank_exact(m);
    if (r <= 1) return true;
    if (r == 3) return false;
    // Rank 2: the common zeros of all rows are those of any two independent ones.
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
        RatMatrix two(2, 3);
        two.row(0) = m.row(i);
        two.row(1) = m.row(j);
        if (rank_exact(two) == 2)
          return binary_resultant(m(i, 0), m(i, 1), m(i, 2), m(j, 0), m(j, 1), m(j, 2)) == 0;
      }
    return true;
  }
  CMatrix m = partials_on_line<Complex>(f, l.p, l.q);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return true;
  if (s(2) > tolerance * s(0)) return false;
  if (s(1) <= tolerance * s(0)) return true;
  // Rank 2: orthonormal basis rows of the row space.
  CMatrix basis = svd.matrixV().leftCols(2).adjoint();
  Complex res = binary_resultant(basis(0, 0), basis(0, 1), basis(0, 2), basis(1, 0), basis(1, 1), basis(1, 2));
  return std::abs(res) <= tolerance;
}

ConicBundleData conic_bundle(const Form& f, const Line& l) {
  if (f.nvars() != 5 || f.degree() != 3) throw std::invalid_argument("conic_bundle needs a cubic in five variables");
  if (!line_on(f, l)) throw LineError("the line does not lie on X");
  if (line_meets_singular_locus(f, l)) throw LineError("the line meets the singular locus of X");
  ConicBundleData cb;
  cb.line = l;
  if (l.is_exact()) {
    auto change = LinearChange::with_leading_columns({*l.exact_p, *l.exact_q});
    cb.exact_change = change.matrix();
    cb.change = to_complex(change.matrix());
    Form g = substitute(f, change);
    auto parts = split_parts(g);
    cb.exact_parts = parts;
    cb.exact_discriminant = conic_discriminant(parts);
    for (int i = 0; i < 6; ++i) cb.parts[i] = to_complex(parts[i]);
    cb.discriminant = to_complex(*cb.exact_discriminant);
    if (cb.exact_discriminant->is_zero()) throw LineError("every residual conic is singular");
  } else {
    cb.change = complete_numeric(l.p, l.q);
    CPoly g = to_complex(f).substitute_linear(cb.change);
    cb.parts = split_parts(g);
    cb.discriminant = conic_discriminant(cb.parts);
  }
  if (cb.discriminant.degree() != 5 || !cb.discriminant.is_homogeneous())
    throw LineError("discriminant is not a quintic");
  return cb;
}

// ------------------------------------------------------------ good lines

namespace {

// Rows A, B, C; columns y0, y1, y2.
template <class S>
Eigen::Matrix<S, 3, 3> abc_matrix(const std::array<Poly<S>, 6>& parts) {
  Eigen::Matrix<S, 3, 3> m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      Exponent e{0, 0, 0};
      e[c] = 1;
      m(r, c) = parts[r].coefficient(e);
    }
  return m;
}

double rank_one_ratio(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) == 0.0 ? 0.0 : s(1) / s(0);
}

}  // namespace

GoodVerdict good_line_test(const ConicBundleData& cb, std::uint64_t seed, const TrackerSettings& settings) {
  GoodVerdict v;
  // (i) a fiber whose residual conic contains l.
  if (cb.exact_parts) {
    Eigen::Matrix<Rat, 3, 3> m = abc_matrix(*cb.exact_parts);
    RatMatrix dyn = m;
    if (determinant(dyn) == 0) {
      v.good = Verdict::No;
      v.witness = to_complex(RatVector(kernel(dyn).col(0)));
      v.reason = "a residual conic contains the line";
      return v;
    }
  } else {
    Eigen::Matrix<Complex, 3, 3> m = abc_matrix(cb.parts);
    Eigen::JacobiSVD<CMatrix> svd(CMatrix(m), Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(2) < 1e-9 * s(0)) {
      v.good = Verdict::No;
      v.witness = svd.matrixV().col(2);
      v.reason = "a residual conic contains the line (numerically)";
      return v;
    }
  }
  // (ii) a fiber of rank <= 1: the 2x2 minors have a common zero.
  CPoly m00 = cb.parts[0], m11 = cb.parts[2], m22 = cb.parts[5];
  CPoly m01 = cb.parts[1] * Complex(0.5), m02 = cb.parts[3] * Complex(0.5), m12 = cb.parts[4] * Complex(0.5);
  CPoly upper = m00 * m11 - m01 * m01;
  CPoly c1 = m00 * m12 - m01 * m02;
  CPoly c2 = m01 * m12 - m11 * m02;
  Rng rng(seed);
  std::vector<std::vector<CVector>> hits(2);
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 2; ++round) {
    CPoly mixed = c1 * rng.gaussian_complex() + c2 * rng.gaussian_complex();
    SolveResult res;
    try {
      res = solve_on_patch({upper, mixed}, rng.gaussian_vector(3), settings, rng.next_seed());
    } catch (const TrackingFailure& e) {
      v.good = Verdict::Undetermined;
      v.reason = std::string("rank-1 system could not be solved: ") + e.what();
      return v;
    }
    for (const auto& s : res.solutions) {
      CVector y = s.x.normalized();
      double r = rank_one_ratio(cb.matrix_at(y));
      best = std::min(best, r);
      if (r < 1e-5) hits[round].push_back(y);
    }
  }
  v.residual = best;
  // A solution of a random squaring landing on a rank-1 fiber to this
  // precision is a genuine rank-1 fiber.
  for (const auto& round : hits)
    for (const auto& y : round)
      if (rank_one_ratio(cb.matrix_at(y)) < 1e-8) {
        v.good = Verdict::No;
        v.witness = y;
        v.reason = "a residual conic is a double line";
        return v;
      }
  if (hits[0].empty() && hits[1].empty()) {
    v.good = Verdict::Yes;
    v.reason = "no residual conic contains the line or degenerates to a double line";
    return v;
  }
  v.good = Verdict::Undetermined;
  v.reason = "rank-1 fibers marginal";
  return v;
}

// -------------------------------------------------------- very good lines

namespace {

// The two lines of a rank-2 conic, as dual coordinates.
std::pair<CVector, CVector> split_conic(const CMatrix& m, const CVector& u, const CVector& w) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  CVector k = svd.matrixV().col(2);
  // Points u + t w of the conic: a t^2 + b t + c = 0 (bilinear, no conjugation).
  Complex a = w.transpose() * m * w;
  Complex b = 2.0 * Complex(u.transpose() * m * w);
  Complex c = u.transpose() * m * u;
  Complex disc = std::sqrt(b * b - 4.0 * a * c);
  Complex t1 = (-b + disc) / (2.0 * a), t2 = (-b - disc) / (2.0 * a);
  auto line = [&](Complex t) {
    Eigen::Vector3cd r = u + t * w, kk = k;
    Eigen::Vector3cd l = kk.cross(r);
    return CVector(l.normalized());
  };
  return {line(t1), line(t2)};
}

struct ParityUnion {
  std::vector<int> parent, parity;
  explicit ParityUnion(int n) : parent(n), parity(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
  std::pair<int, int> find(int x) {
    int p = 0;
    while (parent[x] != x) {
      p ^= parity[x];
      x = parent[x];
    }
    return {x, p};
  }
  // Returns false on an odd cycle.
  bool join(int a, int b, int odd) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == odd;
    parent[ra] = rb;
    parity[ra] = pa ^ pb ^ odd;
    return true;
  }
};

}  // namespace

LineVerdict very_good_test(const ConicBundleData& cb, std::uint64_t seed, const TrackerSettings& settings) {
  LineVerdict v;
  v.seed = seed;
  Rng rng(seed);
  v.good = good_line_test(cb, rng.next_seed(), settings);
  if (v.good.good != Verdict::Yes) return v;

  WitnessSet w;
  try {
    w = witness_points(std::vector<CPoly>{cb.discriminant}, rng.next_seed(), settings);
  } catch (const WitnessError&) {
    return v;  // non-reduced discriminant
  }
  auto partition = monodromy_partition(w, 60, rng.next_seed(), settings);
  v.discriminant_components = partition.components();
  v.discriminant_irreducible = partition.components() == 1 ? Verdict::Yes : Verdict::No;
  v.discriminant_certified =
      partition.stabilized && std::all_of(partition.blocks.begin(), partition.blocks.end(),
                                          [](const WitnessBlock& b) { return b.certificate.pass; });

  // Transport the pair of lines over each witness point along random loops.
  TrackerSettings fine = settings;
  fine.max_step = std::min(settings.max_step, 0.01);
  fine.initial_step = std::min(fine.initial_step, fine.max_step);
  const int m = static_cast<int>(w.points.size());
  CVector u = rng.gaussian_vector(3), dir = rng.gaussian_vector(3);
  std::vector<std::pair<CVector, CVector>> base;
  for (const auto& y : w.points) base.push_back(split_conic(cb.matrix_at(y), u, dir));
  std::vector<int> block_of(m, 0);
  for (std::size_t b = 0; b < partition.blocks.size(); ++b)
    for (int i : partition.blocks[b].points) block_of[i] = static_cast<int>(b);
  std::vector<bool> swapped(partition.blocks.size(), false);
  ParityUnion uf(m);
  const int n = static_cast<int>(w.patch.size());
  for (int loop = 0; loop < kCoverLoopBudget; ++loop) {
    if (std::all_of(swapped.begin(), swapped.end(), [](bool s) { return s; })) break;
    ++v.loops;
    std::vector<std::vector<CVector>> trails;
    auto perm = monodromy_loop(w, rng.gaussian_vector(n), rng.gaussian_vector(n), fine, &trails);
    if (!perm) continue;
    for (int i = 0; i < m; ++i) {
      auto cur = base[i];
      bool ok = true;
      for (std::size_t s = 1; s < trails[i].size() && ok; ++s) {
        auto next = split_conic(cb.matrix_at(trails[i][s]), u, dir);
        double keep = projective_distance(cur.first, next.first) + projective_distance(cur.second, next.second);
        double flip = projective_distance(cur.first, next.second) + projective_distance(cur.second, next.first);
        if (std::min(keep, flip) > 0.5 * std::max(keep, flip)) ok = false;  // ambiguous step
        cur = keep <= flip ? next : std::make_pair(next.second, next.first);
      }
      if (!ok) continue;
      int j = (*perm)[i];
      double same = projective_distance(cur.first, base[j].first);
      double other = projective_distance(cur.first, base[j].second);
      if (std::min(same, other) > 1e-4) continue;
      ++v.transports;
      if (!uf.join(i, j, same <= other ? 0 : 1)) swapped[block_of[i]] = true;
    }
  }
  bool all = std::all_of(swapped.begin(), swapped.end(), [](bool s) { return s; });
  v.cover_connected = all ? Verdict::Yes : Verdict::No;
  v.cover_certified = all;
  v.very_good = v.discriminant_irreducible == Verdict::Yes && v.cover_connected == Verdict::Yes;
  return v;
}

// ---------------------------------------------------------------- sampling

namespace {

// Roots of f(a + s b) = 0 as points of X.
std::vector<CVector> points_on_line(const CPoly& f, const CVector& a, const CVector& b) {
  // Interpolate the cubic in s from four values.
  const Complex s[4] = {0.0, 1.0, -1.0, 2.0};
  Eigen::Matrix4cd v;
  Eigen::Vector4cd y;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) v(i, j) = std::pow(s[i], j);
    y(i) = f.evaluate(CVector(a + s[i] * b));
  }
  Eigen::Vector4cd c = v.partialPivLu().solve(y);
  Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  for (int i = 0; i < 3; ++i) companion(i, 2) = -c(i) / c(3);
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion);
  std::vector<CVector> out;
  for (int i = 0; i < 3; ++i) out.push_back(a + es.eigenvalues()(i) * b);
  return out;
}

// Newton with minimum-norm steps on the four coefficients of the binary
// cubic f(p + s v): f(p), grad f(p).v, grad f(v).p and f(v).
void refine_line(const CPoly& f, const std::vector<CPoly>& grad, const std::vector<std::vector<CPoly>>& hess,
                 CVector& p, CVector& v) {
  const int n = static_cast<int>(p.size());
  for (int it = 0; it < 8; ++it) {
    CVector gp(n), gv(n);
    CMatrix hp(n, n), hv(n, n);
    for (int i = 0; i < n; ++i) {
      gp(i) = grad[i].evaluate(p);
      gv(i) = grad[i].evaluate(v);
      for (int j = 0; j < n; ++j) {
        hp(i, j) = hess[i][j].evaluate(p);
        hv(i, j) = hess[i][j].evaluate(v);
      }
    }
    Eigen::Vector4cd c(f.evaluate(p), gp.cwiseProduct(v).sum(), gv.cwiseProduct(p).sum(), f.evaluate(v));
    if (c.norm() < 1e-15) break;
    CMatrix j = CMatrix::Zero(4, 2 * n);
    j.block(0, 0, 1, n) = gp.transpose();
    j.block(1, 0, 1, n) = (hp * v).transpose();
    j.block(1, n, 1, n) = gp.transpose();
    j.block(2, 0, 1, n) = gv.transpose();
    j.block(2, n, 1, n) = (hv * p).transpose();
    j.block(3, n, 1, n) = gv.transpose();
    CVector step = j.completeOrthogonalDecomposition().solve(CVector(c));
    p -= step.head(n);
    v -= step.tail(n);
  }
}

// Canonical rational points of a line, when it is defined over Q.
std::optional<Line> rational_line(const Form& f, const CVector& p, const CVector& q) {
  CMatrix m(2, 5);
  m.row(0) = p.transpose();
  m.row(1) = q.transpose();
  // Row reduce on the two best pivots.
  Eigen::FullPivLU<CMatrix> lu(m.transpose());
  auto pivots = lu.permutationP().indices();
  int c0 = pivots(0), c1 = pivots(1);
  Eigen::Matrix2cd sub;
  sub << m(0, c0), m(0, c1), m(1, c0), m(1, c1);
  CMatrix r = sub.inverse() * m;
  std::vector<RatVector> rows;
  for (int i = 0; i < 2; ++i) {
    RatVector row(5);
    for (int j = 0; j < 5; ++j) {
      if (std::abs(r(i, j).imag()) > 1e-9) return std::nullopt;
      auto q = best_rational(r(i, j).real(), 1000);
      if (std::abs(to_double(q) - r(i, j).real()) > 1e-9) return std::nullopt;
      row(j) = q;
    }
    rows.push_back(row);
  }
  Line l = Line::exact(rows[0], rows[1]);
  if (!line_on(f, l)) return std::nullopt;
  return l;
}

}  // namespace

std::vector<Line> sample_lines(const Form& f, int count, std::uint64_t seed, const TrackerSettings& settings) {
  const int n = f.nvars();
  CPoly cf = to_complex(f);
  auto grad = gradient(f);
  std::vector<CPoly> cgrad;
  std::vector<std::vector<CPoly>> hess(n);
  for (int i = 0; i < n; ++i) {
    cgrad.push_back(to_complex(grad[i]));
    for (const auto& g : gradient(grad[i])) hess[i].push_back(to_complex(g));
  }
  Rng rng(seed);
  std::vector<Line> out;
  for (int attempt = 0; attempt < 10 * count + 10 && static_cast<int>(out.size()) < count; ++attempt) {
    auto pts = points_on_line(cf, rng.gaussian_vector(n), rng.gaussian_vector(n));
    CVector p = pts[rng.integer(0, 2)];
    p.normalize();
    // Directions v with f(p + s v) = 0 identically, inside a random hyperplane.
    CVector g(n);
    for (int i = 0; i < n; ++i) g(i) = to_complex(grad[i]).evaluate(p);
    CPoly quad(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Exponent e(n, 0);
        e[i] += 1;
        e[j] += 1;
        quad.add_term(e, hess[i][j].evaluate(p));
      }
    std::vector<CPoly> eqs{CPoly::linear(g), quad, cf, CPoly::linear(rng.gaussian_vector(n))};
    SolveResult res;
    try {
      res = solve_on_patch(eqs, rng.gaussian_vector(n), settings, rng.next_seed());
    } catch (const TrackingFailure&) {
      continue;
    }
    std::vector<Line> found;
    for (const auto& s : res.solutions) {
      if (s.singular || s.multiplicity != 1) continue;
      CVector a = p, b = s.x / s.x.norm();
      refine_line(cf, cgrad, hess, a, b);
      Line l = Line::numeric(a, b);
      if (!line_on(f, l, 1e-7)) continue;
      if (auto r = rational_line(f, l.p, l.q)) l = *r;
      found.push_back(l);
    }
    if (found.empty()) continue;
    out.push_back(found[rng.integer(0, static_cast<int>(found.size()) - 1)]);
  }
  return out;
}

std::vector<SingularPoint> discriminant_singularities(const ConicBundleData& cb, std::uint64_t seed) {
  if (!cb.exact_discriminant) return find_singular_points(cb.discriminant, seed);
  auto pts = find_singular_points(*cb.exact_discriminant, seed);
  for (auto& p : pts)
    p.corank = numeric_corank(*cb.exact_discriminant, p.approx, p.cluster_multiplicity > 1 ? 1e-4 : 1e-9);
  return pts;
}

}  // namespace cubic3
