#include "cubic3/singular.hpp"

#include "cubic3/witness.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace cubic3 {

std::string SingularityType::name() const {
  switch (family) {
    case Family::A: return "A" + std::to_string(index);
    case Family::D: return "D" + std::to_string(index);
    case Family::E: return "E" + std::to_string(index);
    case Family::T333: return "T333";
    case Family::T334: return "T334";
    case Family::T344: return "T344";
    case Family::T444: return "T444";
    case Family::Q10: return "Q10";
    case Family::S11: return "S11";
    case Family::U12: return "U12";
    case Family::CorankTwoNonADE: return "corank-2 non-ADE";
    case Family::CorankThreeOther: return "corank-3 unresolved";
    case Family::ConeVertex: return "cone vertex";
    case Family::Unclassified: return "unclassified";
  }
  return "?";
}

bool is_singular_at(const Form& f, const RatVector& q) {
  for (const auto& g : gradient(f))
    if (g.evaluate(q) != 0) return false;
  return true;
}

LocalEquation local_equation(const Form& f, const RatVector& q) {
  if (f.nvars() != 5 || q.size() != 5) throw std::invalid_argument("local_equation expects a form in 5 variables");
  if (!is_singular_at(f, q)) throw std::invalid_argument("point is not a singular point of the form");
  LocalEquation out;
  out.change = LinearChange::sending_last_to(q);
  Form g = substitute(f, out.change);
  if (g.degree_in(4) > 1) throw std::invalid_argument("x4^2 terms survive: point is not singular or form is not cubic");
  std::vector<int> keep{0, 1, 2, 3, -1};
  out.g2 = g.coefficient_of(4, 1).relabel(keep, 4);
  out.g3 = g.coefficient_of(4, 0).relabel(keep, 4);
  return out;
}

int corank(const Form& f, const RatVector& q) {
  auto loc = local_equation(f, q);
  if (loc.g2.is_zero()) return 4;
  return 4 - rank_exact(quad_matrix(loc.g2));
}

int numeric_corank(const CPoly& f, const CVector& q, double tolerance) {
  const int n = f.nvars();
  CVector u = q / q.norm();
  CMatrix h(n, n);
  for (int i = 0; i < n; ++i) {
    CPoly g = f.derivative(i);
    for (int j = 0; j < n; ++j) h(i, j) = g.derivative(j).evaluate(u);
  }
  // A vanishing Hessian has to be judged against the size of f, not itself.
  double scale = 0.0;
  for (const auto& [e, c] : f.terms()) scale = std::max(scale, std::abs(c));
  Eigen::JacobiSVD<CMatrix> svd(h);
  const auto& sv = svd.singularValues();
  const double cut = tolerance * std::max(sv(0), scale);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return (n - 1) - rank;
}

int numeric_corank(const Form& f, const CVector& q, double tolerance) {
  return numeric_corank(to_complex(f), q, tolerance);
}

// ------------------------------------------------------------ splitting lemma

namespace {

Form mul_trunc(const Form& a, const Form& b, int jet) {
  const int n = a.nvars();
  Form out(n);
  Exponent e(n);
  for (const auto& [ea, ca] : a.terms()) {
    int da = total_degree(ea);
    if (da > jet) continue;
    for (const auto& [eb, cb] : b.terms()) {
      if (da + total_degree(eb) > jet) continue;
      for (int i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Form compose_trunc(const Form& p, const std::vector<Form>& subs, int jet) {
  const int n = p.nvars();
  const int m = subs.front().nvars();
  std::vector<std::vector<Form>> powers(n);
  for (int i = 0; i < n; ++i) powers[i].push_back(Form::constant(m, Rat(1)));
  Form out(m);
  for (const auto& [e, c] : p.terms()) {
    Form term = Form::constant(m, c);
    for (int i = 0; i < n && !term.is_zero(); ++i) {
      while (static_cast<int>(powers[i].size()) <= e[i])
        powers[i].push_back(mul_trunc(powers[i].back(), subs[i], jet));
      if (e[i]) term = mul_trunc(term, powers[i][e[i]], jet);
    }
    out += term;
  }
  return out;
}

constexpr int kExactJet = 1 << 20;

}  // namespace

ResidualGerm residual_germ(const Form& g2, const Form& g3, int jet) {
  const int n = g3.nvars();
  ResidualGerm out;
  if (g2.is_zero()) {
    // Nothing to split: the germ is g3 itself, exact in every degree.
    out.h = g3;
    out.corank = n;
    out.jet = kExactJet;
    return out;
  }
  auto cong = diagonalize_symmetric(quad_matrix(g2));
  const int r = cong.rank;
  Form c = g3.substitute_linear(cong.transform);
  // y_i = phi_i(z) solves d/dy_i (sum d_j y_j^2 + c) = 0 order by order.
  std::vector<Form> dc;
  for (int i = 0; i < r; ++i) dc.push_back(c.derivative(i));
  std::vector<Form> subs;
  for (int j = 0; j < n; ++j) subs.push_back(j < r ? Form(n) : Form::variable(n, j));
  for (int it = 0; it < jet; ++it) {
    bool changed = false;
    std::vector<Form> next = subs;
    for (int i = 0; i < r; ++i) {
      next[i] = compose_trunc(dc[i], subs, jet) * (Rat(-1) / (Rat(2) * cong.diagonal(i)));
      if (!(next[i] == subs[i])) changed = true;
    }
    subs = std::move(next);
    if (!changed) break;
  }
  Form h = compose_trunc(c, subs, jet);
  for (int i = 0; i < r; ++i) h += mul_trunc(subs[i], subs[i], jet) * cong.diagonal(i);
  std::vector<int> remap(n, -1);
  for (int j = r; j < n; ++j) remap[j] = j - r;
  out.h = h.relabel(remap, n - r);
  out.corank = n - r;
  out.jet = jet;
  return out;
}

// ---------------------------------------------------------- Macaulay nullity

namespace {

constexpr std::uint64_t kPrimes[] = {1000000007ULL, 998244353ULL};

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  b %= p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

std::optional<std::uint64_t> rat_mod(const Rat& x, std::uint64_t p) {
  BigInt num = boost::multiprecision::numerator(x) % BigInt(p);
  BigInt den = boost::multiprecision::denominator(x) % BigInt(p);
  if (num < 0) num += BigInt(p);
  if (den == 0) return std::nullopt;
  std::uint64_t a = num.convert_to<std::uint64_t>(), b = den.convert_to<std::uint64_t>();
  return a * pow_mod(b, p - 2, p) % p;
}

int rank_mod(std::vector<std::vector<std::uint64_t>>& rows, int ncols, std::uint64_t p) {
  int rank = 0;
  for (int col = 0; col < ncols && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col]) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[pivot], rows[rank]);
    std::uint64_t inv = pow_mod(rows[rank][col], p - 2, p);
    for (int c = col; c < ncols; ++c) rows[rank][c] = rows[rank][c] * inv % p;
    for (int r = rank + 1; r < static_cast<int>(rows.size()); ++r) {
      std::uint64_t factor = rows[r][col];
      if (!factor) continue;
      for (int c = col; c < ncols; ++c)
        if (rows[rank][c]) rows[r][c] = (rows[r][c] + (p - factor) * rows[rank][c]) % p;
    }
    ++rank;
  }
  return rank;
}

// Nullity of the degree-d Macaulay matrix of the generators at the origin.
// Rank mod p never exceeds the rational rank; the smallest nullity over
// the primes is used.
int macaulay_nullity(const std::vector<Form>& gens, int nvars, int d) {
  std::map<Exponent, int> column;
  for (int k = 0; k <= d; ++k)
    for (const auto& e : monomials_of_degree(nvars, k)) column.emplace(e, static_cast<int>(column.size()));
  const int ncols = static_cast<int>(column.size());
  std::vector<Form> products;
  for (const auto& g : gens)
    for (int k = 0; k <= d - 1; ++k)
      for (const auto& e : monomials_of_degree(nvars, k)) {
        Form prod = mul_trunc(Form::monomial(e, Rat(1)), g, d);
        if (!prod.is_zero()) products.push_back(std::move(prod));
      }
  int best = ncols;
  for (std::uint64_t p : kPrimes) {
    std::vector<std::vector<std::uint64_t>> rows;
    bool ok = true;
    for (const auto& prod : products) {
      std::vector<std::uint64_t> row(ncols, 0);
      for (const auto& [e, c] : prod.terms()) {
        auto v = rat_mod(c, p);
        if (!v) {
          ok = false;
          break;
        }
        row[column.at(e)] = *v;
      }
      if (!ok) break;
      rows.push_back(std::move(row));
    }
    if (!ok) continue;
    best = std::min(best, ncols - rank_mod(rows, ncols, p));
  }
  return best;
}

}  // namespace

std::optional<int> local_milnor_number(const Form& h, int h_jet, int max_degree) {
  const int n = h.nvars();
  if (n == 0) return 1;
  std::vector<Form> gens;
  for (int i = 0; i < n; ++i) gens.push_back(h.derivative(i));
  // Derivatives are exact up to degree h_jet - 1.
  const int top = std::min(max_degree, h_jet - 1);
  int prev = -1;
  for (int d = 1; d <= top; ++d) {
    int nu = macaulay_nullity(gens, n, d);
    if (nu == prev) return nu;
    prev = nu;
  }
  return std::nullopt;
}

int milnor_number(const Form& f, const RatVector& q) {
  auto loc = local_equation(f, q);
  if (!loc.g2.is_zero() && rank_exact(quad_matrix(loc.g2)) == 4) return 1;
  for (int jet = 8;; jet *= 2) {
    auto res = residual_germ(loc.g2, loc.g3, jet);
    if (auto mu = local_milnor_number(res.h, res.jet, 20)) return *mu;
    if (res.jet - 1 >= 20) break;
  }
  throw NotIsolated("local algebra dimension did not stabilize by degree 20");
}

// ------------------------------------------------------------- classification

int binary_cubic_distinct_roots(const Form& c) {
  if (c.is_zero()) return 0;
  if (c.nvars() != 2 || c.degree() != 3 || !c.is_homogeneous())
    throw std::invalid_argument("binary_cubic_distinct_roots needs a binary cubic form");
  Rat a = c.coefficient({3, 0}), b = c.coefficient({2, 1}), cc = c.coefficient({1, 2}), d = c.coefficient({0, 3});
  Rat disc = b * b * cc * cc - 4 * a * cc * cc * cc - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * cc * d;
  if (disc != 0) return 3;
  Form hess = c.derivative(0).derivative(0) * c.derivative(1).derivative(1) -
              c.derivative(0).derivative(1) * c.derivative(0).derivative(1);
  return hess.is_zero() ? 1 : 2;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InconsistentClassification(what);
}

// Irreducible components of the plane cubic V(c); nullopt if non-reduced.
std::optional<int> plane_cubic_components(const Form& c, std::uint64_t seed) {
  try {
    auto w = witness_points({c}, seed);
    return monodromy_partition(w, 50, seed + 1).components();
  } catch (const WitnessError&) {
    return std::nullopt;
  }
}

}  // namespace

SingularityType classify(const LocalEquation& local, int corank, int mu, std::optional<int> components,
                         std::uint64_t seed) {
  using F = SingularityType::Family;
  require(mu >= 1, "Milnor number must be positive");
  switch (corank) {
    case 0:
      require(mu == 1, "corank 0 forces a node (mu = 1)");
      return SingularityType::A(1);
    case 1:
      require(mu >= 2, "corank 1 forces A_n with n > 1");
      return SingularityType::A(mu);
    case 2: {
      require(mu >= 4, "corank 2 forces mu >= 4");
      auto res = residual_germ(local.g2, local.g3, mu + 2);
      int roots = binary_cubic_distinct_roots(res.h.homogeneous_part(3));
      if (roots == 3) {
        require(mu == 4, "three distinct cubic roots force D4");
        return SingularityType::D(4);
      }
      if (roots == 2) {
        require(mu >= 5, "double root forces D_n with n >= 5");
        return SingularityType::D(mu);
      }
      if (roots == 1) {
        require(mu >= 6, "triple root forces mu >= 6");
        if (mu <= 8) return SingularityType::E(mu);
      }
      return {F::CorankTwoNonADE, 0};
    }
    case 3: {
      if (mu == 8) return {F::T333, 0};
      if (mu == 9) return {F::T334, 0};
      if (mu == 12) return {F::U12, 0};
      if (mu != 10 && mu != 11) return {F::CorankThreeOther, 0};
      auto res = residual_germ(local.g2, local.g3, mu + 2);
      auto cone = plane_cubic_components(res.h.homogeneous_part(3), seed);
      if (mu == 10) {
        // C_q is irreducible exactly for Q10 among the two.
        auto k = components ? components : cone;
        if (!k) return {F::CorankThreeOther, 0};
        return {*k == 1 ? F::Q10 : F::T344, 0};
      }
      // Tangent cone: conic plus tangent line (S11) or a triangle (T444).
      if (cone == 2) return {F::S11, 0};
      if (cone == 3) return {F::T444, 0};
      return {F::CorankThreeOther, 0};
    }
    case 4: return {F::ConeVertex, 0};
    default: throw std::invalid_argument("corank out of range");
  }
}

// ------------------------------------------------------------------ spectrum

std::optional<NormalForm> quasi_homogeneous_normal_form(const SingularityType& t) {
  using F = SingularityType::Family;
  auto make = [](const std::string& text, std::vector<Rat> w) {
    return NormalForm{parse_polynomial(text, 4), std::move(w)};
  };
  const Rat half(1, 2);
  switch (t.family) {
    case F::A: {
      int n = t.index;
      return make("x0^" + std::to_string(n + 1) + " + x1^2 + x2^2 + x3^2", {Rat(1, n + 1), half, half, half});
    }
    case F::D: {
      int n = t.index;
      return make("x0^2*x1 + x1^" + std::to_string(n - 1) + " + x2^2 + x3^2",
                  {Rat(n - 2, 2 * (n - 1)), Rat(1, n - 1), half, half});
    }
    case F::E:
      if (t.index == 6) return make("x0^3 + x1^4 + x2^2 + x3^2", {Rat(1, 3), Rat(1, 4), half, half});
      if (t.index == 7) return make("x0^3 + x0*x1^3 + x2^2 + x3^2", {Rat(1, 3), Rat(2, 9), half, half});
      if (t.index == 8) return make("x0^3 + x1^5 + x2^2 + x3^2", {Rat(1, 3), Rat(1, 5), half, half});
      return std::nullopt;
    case F::T333: return make("x0^3 + x1^3 + x2^3 + x3^2", {Rat(1, 3), Rat(1, 3), Rat(1, 3), half});
    case F::Q10: return make("x0^3 + x1^4 + x1*x2^2 + x3^2", {Rat(1, 3), Rat(1, 4), Rat(3, 8), half});
    case F::S11: return make("x0^4 + x1^2*x2 + x0*x2^2 + x3^2", {Rat(1, 4), Rat(5, 16), Rat(3, 8), half});
    case F::U12: return make("x0^3 + x1^3 + x2^4 + x3^2", {Rat(1, 3), Rat(1, 3), Rat(1, 4), half});
    case F::ConeVertex:
      return make("x0^3 + x1^3 + x2^3 + x3^3", {Rat(1, 3), Rat(1, 3), Rat(1, 3), Rat(1, 3)});
    default: return std::nullopt;
  }
}

namespace {

Rat weighted_degree(const Exponent& e, const std::vector<Rat>& w) {
  Rat s = 0;
  for (std::size_t i = 0; i < e.size(); ++i) s += Rat(e[i]) * w[i];
  return s;
}

void enumerate_bounded(const std::vector<Rat>& w, const Rat& bound, std::size_t var, Exponent& e, const Rat& acc,
                       std::map<Rat, std::vector<Exponent>>& out) {
  if (var == w.size()) {
    out[acc].push_back(e);
    return;
  }
  for (int k = 0; acc + Rat(k) * w[var] <= bound; ++k) {
    e[var] = k;
    enumerate_bounded(w, bound, var + 1, e, acc + Rat(k) * w[var], out);
  }
  e[var] = 0;
}

}  // namespace

Spectrum spectrum(const NormalForm& nf) {
  const int n = nf.f.nvars();
  Rat wsum = 0, socle = 0, mu = 1;
  for (const auto& w : nf.weights) {
    wsum += w;
    socle += 1 - 2 * w;
    mu *= 1 / w - 1;
  }
  for (const auto& [e, c] : nf.f.terms())
    if (weighted_degree(e, nf.weights) != 1) throw std::invalid_argument("normal form is not weighted homogeneous");
  std::map<Rat, std::vector<Exponent>> by_degree;
  Exponent e(n, 0);
  enumerate_bounded(nf.weights, socle, 0, e, Rat(0), by_degree);
  std::vector<Form> partials = gradient(nf.f);
  Spectrum out;
  for (const auto& [delta, monos] : by_degree) {
    std::map<Exponent, int> col;
    for (const auto& m : monos) col.emplace(m, static_cast<int>(col.size()));
    std::vector<RatVector> rows;
    for (int i = 0; i < n; ++i) {
      Rat need = delta - (1 - nf.weights[i]);
      auto it = by_degree.find(need);
      if (need < 0 || it == by_degree.end()) continue;
      for (const auto& m : it->second) {
        Form prod = Form::monomial(m, Rat(1)) * partials[i];
        RatVector row = RatVector::Zero(static_cast<Eigen::Index>(monos.size()));
        for (const auto& [pe, pc] : prod.terms()) row(col.at(pe)) = pc;
        rows.push_back(row);
      }
    }
    int rank = 0;
    if (!rows.empty()) {
      RatMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(monos.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) m.row(r) = rows[r].transpose();
      rank = rank_exact(m);
    }
    int dim = static_cast<int>(monos.size()) - rank;
    for (int k = 0; k < dim; ++k) out.numbers.push_back(delta + wsum);
  }
  if (Rat(static_cast<int>(out.numbers.size())) != mu)
    throw std::logic_error("Jacobian algebra dimension disagrees with the weight formula");
  for (const auto& a : out.numbers)
    for (int p = 0; p < 4; ++p)
      if (Rat(3 - p) < a && a <= Rat(4 - p)) ++out.s[p];
  return out;
}

std::optional<LocalInvariants> local_invariants(const SingularityType& type, int mu) {
  auto nf = quasi_homogeneous_normal_form(type);
  if (!nf) return std::nullopt;
  LocalInvariants inv;
  inv.spec = spectrum(*nf);
  require(static_cast<int>(inv.spec.numbers.size()) == mu, "Milnor number disagrees with the type " + type.name());
  require(inv.spec.s[0] == 0 && inv.spec.s[3] == 0, "spectrum outside (1,3] for " + type.name());
  inv.b11 = inv.spec.s[1];
  inv.l11 = inv.spec.s[2] - inv.spec.s[1];
  require(inv.l11 >= 0, "negative l11 for " + type.name());
  return inv;
}

// -------------------------------------------------------- finding the points

namespace {

struct RawPoint {
  CVector x;
  int multiplicity;
};

struct GradientRun {
  std::vector<RawPoint> points;
  /// No path failed, so no point can have been lost.
  bool complete = true;
};

// Gauss-Newton on all partials plus the patch. Roots, including degenerate
// ones, stay put or sharpen; a root of the squared system that is not a root
// of the gradient stalls, or slides into the degenerate point next to it.
void polish(const std::vector<CPoly>& partials, const std::vector<std::vector<CPoly>>& hessian, const CVector& patch,
            CVector& x) {
  const int n = static_cast<int>(partials.size());
  CVector r(n + 1);
  CMatrix j(n + 1, n);
  for (int it = 0; it < 20; ++it) {
    for (int i = 0; i < n; ++i) {
      r(i) = partials[i].evaluate(x);
      for (int k = 0; k < n; ++k) j(i, k) = hessian[i][k].evaluate(x);
    }
    r(n) = patch.cwiseProduct(x).sum() - 1.0;
    j.row(n) = patch.transpose();
    Eigen::JacobiSVD<CMatrix> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    CVector dx = svd.solve(r);
    x -= dx;
    if (dx.norm() <= 1e-15 * x.norm()) break;
  }
}

GradientRun gradient_run(const std::vector<CPoly>& raw_partials, std::uint64_t seed,
                         const TrackerSettings& settings) {
  const int n = static_cast<int>(raw_partials.size());
  // The tracker's tolerances are absolute: work with unit-size coefficients.
  double scale = 0.0;
  for (const auto& p : raw_partials)
    for (const auto& [e, c] : p.terms()) scale = std::max(scale, std::abs(c));
  std::vector<CPoly> partials;
  std::vector<std::vector<CPoly>> hessian;
  for (const auto& p : raw_partials) {
    partials.push_back(p * Complex(1.0 / scale));
    hessian.emplace_back();
    for (int k = 0; k < n; ++k) hessian.back().push_back(partials.back().derivative(k));
  }
  Rng rng(seed);
  std::vector<CPoly> eqs;
  for (int i = 0; i < n - 1; ++i) {
    CPoly e(n);
    for (int j = 0; j < n; ++j) e += partials[j] * rng.gaussian_complex();
    eqs.push_back(e);
  }
  CVector patch = rng.gaussian_vector(n);
  auto res = solve_on_patch(eqs, patch, settings, rng.next_seed());
  std::vector<RawPoint> out;
  std::vector<double> best;
  for (const auto& s : res.solutions) {
    CVector x = s.x;
    polish(partials, hessian, patch, x);
    if (projective_distance(x, s.x) > 1e-4) continue;
    CVector u = x / x.norm();
    double r = 0.0;
    for (const auto& p : partials) r = std::max(r, std::abs(p.evaluate(u)));
    if (r > 1e-11) continue;
    // Paths into a degenerate point end a little apart; the cluster keeps
    // its most accurate member.
    bool merged = false;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (projective_distance(out[i].x, x) < 1e-4) {
        out[i].multiplicity += s.multiplicity;
        if (r < best[i]) {
          out[i].x = x;
          best[i] = r;
        }
        merged = true;
        break;
      }
    if (!merged) {
      out.push_back({x, s.multiplicity});
      best.push_back(r);
    }
  }
  return {std::move(out), res.failed == 0};
}

bool contains(const std::vector<RawPoint>& big, const std::vector<RawPoint>& small) {
  return std::all_of(small.begin(), small.end(), [&](const RawPoint& p) {
    return std::any_of(big.begin(), big.end(), [&](const RawPoint& q) { return projective_distance(p.x, q.x) < 1e-4; });
  });
}

bool same_points(const std::vector<RawPoint>& a, const std::vector<RawPoint>& b) {
  return a.size() == b.size() && contains(a, b);
}

// Independent squared-up solves until two complete ones find the same finite
// set. A run can lose a badly conditioned path; a positive-dimensional locus
// gives different points every time.
std::vector<RawPoint> two_runs(const std::vector<CPoly>& partials, std::uint64_t seed, const TrackerSettings& settings) {
  constexpr int kMaxRuns = 6;
  Rng rng(seed);
  std::vector<GradientRun> runs;
  for (int i = 0; i < kMaxRuns; ++i) {
    runs.push_back(gradient_run(partials, rng.next_seed(), settings));
    if (!runs.back().complete) continue;
    for (int j = 0; j + 1 < static_cast<int>(runs.size()); ++j)
      if (runs[j].complete && same_points(runs[j].points, runs.back().points)) return runs[j].points;
  }
  // Polished points are true roots, so a run that lost paths only misses
  // points. Settle for a complete run that contains every other run.
  for (const auto& r : runs) {
    if (!r.complete) continue;
    if (std::all_of(runs.begin(), runs.end(), [&](const GradientRun& o) { return contains(r.points, o.points); }))
      return r.points;
  }
  // Or the union, when each of its points turned up in two runs at least;
  // points of a positive-dimensional locus do not repeat.
  std::vector<RawPoint> all;
  std::vector<int> seen;
  for (const auto& r : runs)
    for (const auto& p : r.points) {
      auto it = std::find_if(all.begin(), all.end(), [&](const RawPoint& q) { return projective_distance(p.x, q.x) < 1e-4; });
      if (it == all.end()) {
        all.push_back(p);
        seen.push_back(1);
      } else {
        ++seen[it - all.begin()];
      }
    }
  if (std::all_of(seen.begin(), seen.end(), [](int c) { return c >= 2; })) return all;
  std::string sizes;
  for (const auto& r : runs) sizes += (sizes.empty() ? "" : ", ") + std::to_string(r.points.size());
  throw NonIsolatedSingularLocus("independent gradient solves disagree (" + sizes +
                                 " points): singular locus is not finite");
}

SingularPoint exact_point(const RatVector& v, int multiplicity) {
  SingularPoint p;
  p.exact = primitive_integer(v);
  p.approx = CPoint(to_complex(*p.exact)).coords();
  p.cluster_multiplicity = multiplicity;
  return p;
}

}  // namespace

std::vector<SingularPoint> find_singular_points(const Form& f, std::uint64_t seed, const TrackerSettings& settings) {
  const int n = f.nvars();
  if (n < 2 || f.is_zero() || !f.is_homogeneous()) throw std::invalid_argument("find_singular_points needs a nonzero form");
  auto cone = cone_test(f);
  if (cone.is_cone) {
    if (cone.vertex_dimension >= 2) throw NonIsolatedSingularLocus("cone with a positive-dimensional vertex");
    RatVector v = cone.vertex.col(0);
    Form g = substitute(f, LinearChange::sending_last_to(v));
    std::vector<int> keep(n, -1);
    for (int i = 0; i + 1 < n; ++i) keep[i] = i;
    Form base = g.relabel(keep, n - 1);
    if (n - 1 >= 2 && !find_singular_points(base, seed, settings).empty())
      throw NonIsolatedSingularLocus("cone over a singular base: singular along lines through the vertex");
    return {exact_point(v, 0)};
  }
  std::vector<CPoly> partials;
  for (const auto& g : gradient(f)) partials.push_back(to_complex(g));
  auto first = two_runs(partials, seed, settings);
  std::vector<SingularPoint> out;
  for (const auto& raw : first) {
    auto exact = rational_reconstruct(CPoint(raw.x).coords(), 10000, 1e-7,
                                      [&](const RatVector& q) { return is_singular_at(f, q); });
    if (exact) {
      out.push_back(exact_point(*exact, raw.multiplicity));
    } else {
      SingularPoint p;
      p.approx = CPoint(raw.x).coords();
      p.cluster_multiplicity = raw.multiplicity;
      out.push_back(std::move(p));
    }
  }
  // Exact points first, in a canonical order.
  std::stable_sort(out.begin(), out.end(), [](const SingularPoint& a, const SingularPoint& b) {
    if (a.exact.has_value() != b.exact.has_value()) return a.exact.has_value();
    if (!a.exact) return false;
    for (Eigen::Index i = 0; i < a.exact->size(); ++i)
      if ((*a.exact)(i) != (*b.exact)(i)) return (*a.exact)(i) > (*b.exact)(i);
    return false;
  });
  return out;
}

std::vector<SingularPoint> find_singular_points(const CPoly& f, std::uint64_t seed, const TrackerSettings& settings) {
  const int n = f.nvars();
  if (n < 2 || f.is_zero() || !f.is_homogeneous()) throw std::invalid_argument("find_singular_points needs a nonzero form");
  std::vector<CPoly> partials;
  for (int i = 0; i < n; ++i) partials.push_back(f.derivative(i));
  std::vector<SingularPoint> out;
  for (const auto& raw : two_runs(partials, seed, settings)) {
    SingularPoint p;
    p.approx = CPoint(raw.x).coords();
    p.cluster_multiplicity = raw.multiplicity;
    // A simple root of the squared system is located to roundoff; a cluster
    // only to about the square root of it.
    p.corank = numeric_corank(f, p.approx, raw.multiplicity > 1 ? 1e-4 : 1e-9);
    out.push_back(std::move(p));
  }
  return out;
}

void analyze_point(const Form& f, SingularPoint& p, std::optional<int> components, std::uint64_t seed) {
  if (p.exact) {
    auto loc = local_equation(f, *p.exact);
    p.corank = loc.g2.is_zero() ? 4 : 4 - rank_exact(quad_matrix(loc.g2));
    p.corank_certified = true;
    p.milnor = milnor_number(f, *p.exact);
    p.milnor_certified = true;
    p.type = classify(loc, p.corank, p.milnor, components, seed);
  } else {
    p.corank = numeric_corank(f, p.approx);
    p.corank_certified = false;
    p.milnor_certified = false;
    if (p.corank == 0) {
      p.milnor = 1;
      p.type = SingularityType::A(1);
    } else {
      p.milnor = p.cluster_multiplicity;
      p.type = p.corank == 1 && p.milnor >= 2 ? SingularityType::A(p.milnor) : SingularityType{};
    }
  }
  p.invariants = local_invariants(p.type, p.milnor);
}

}  // namespace cubic3
