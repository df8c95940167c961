#pragma once

#include "cubic3/rational.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubic3 {

using Exponent = std::vector<int>;

inline int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Graded lexicographic order, largest monomial first: higher total degree
/// wins, ties broken lexicographically with x0 > x1 > ...
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

/// All exponent vectors in `nvars` variables of total degree `degree`, in
/// graded-lex order.
std::vector<Exponent> monomials_of_degree(int nvars, int degree);

/// Sparse multivariate polynomial with coefficients in Scalar (Rat or
/// Complex). Zero coefficients are never stored, so structural equality is
/// polynomial equality.
template <typename Scalar>
class Poly {
 public:
  using Terms = std::map<Exponent, Scalar, GradedLex>;

  Poly() = default;
  explicit Poly(int nvars) : nvars_(nvars) {}

  static Poly constant(int nvars, const Scalar& c) {
    Poly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }
  static Poly variable(int nvars, int index) {
    Poly p(nvars);
    Exponent e(nvars, 0);
    e.at(index) = 1;
    p.add_term(e, Scalar(1));
    return p;
  }
  static Poly monomial(const Exponent& e, const Scalar& c) {
    Poly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }
  /// Linear form sum_i coeffs(i) x_i.
  static Poly linear(const Vector<Scalar>& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    Poly p(n);
    for (int i = 0; i < n; ++i) {
      Exponent e(n, 0);
      e[i] = 1;
      p.add_term(e, coeffs(i));
    }
    return p;
  }

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }
  /// Lowest total degree of a term (order at the origin); -1 for zero.
  int order() const { return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first); }

  bool is_homogeneous() const { return terms_.empty() || degree() == order(); }

  /// Degree in a single variable.
  int degree_in(int var) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  Scalar coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  void add_term(const Exponent& e, const Scalar& c) {
    if (static_cast<int>(e.size()) != nvars_)
      throw std::invalid_argument("exponent length does not match variable count");
    if (is_zero_scalar(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (is_zero_scalar(it->second)) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Poly& operator*=(const Scalar& s) {
    if (is_zero_scalar(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Scalar(-1); }
  friend Poly operator*(Poly a, const Scalar& s) { return a *= s; }
  friend Poly operator*(const Scalar& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Poly pow(int k) const {
    Poly out = constant(nvars_, Scalar(1));
    for (int i = 0; i < k; ++i) out *= *this;
    return out;
  }

  Poly derivative(int var) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponent d = e;
      d[var] -= 1;
      out.add_term(d, c * Scalar(e[var]));
    }
    return out;
  }

  Poly homogeneous_part(int d) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == d) out.terms_.emplace(e, c);
    return out;
  }

  /// Drops every term of total degree above max_degree.
  Poly truncate(int max_degree) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) <= max_degree) out.terms_.emplace(e, c);
    return out;
  }

  /// Coefficient of var^k, as a polynomial in the same variable set with
  /// var removed from every exponent (var's slot is zero).
  Poly coefficient_of(int var, int k) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_)
      if (e[var] == k) {
        Exponent r = e;
        r[var] = 0;
        out.terms_.emplace(r, c);
      }
    return out;
  }

  /// Substitutes x_i -> subs[i] for every variable.
  Poly compose(const std::vector<Poly>& subs) const {
    if (static_cast<int>(subs.size()) != nvars_)
      throw std::invalid_argument("compose: substitution count does not match variable count");
    const int m = subs.empty() ? 0 : subs.front().nvars();
    for (const auto& s : subs)
      if (s.nvars() != m) throw std::invalid_argument("compose: mixed variable counts");
    // Cache powers of each substituted polynomial.
    std::vector<std::vector<Poly>> powers(nvars_);
    for (int i = 0; i < nvars_; ++i) powers[i].push_back(Poly::constant(m, Scalar(1)));
    auto power = [&](int i, int k) -> const Poly& {
      while (static_cast<int>(powers[i].size()) <= k) powers[i].push_back(powers[i].back() * subs[i]);
      return powers[i][k];
    };
    Poly out(m);
    for (const auto& [e, c] : terms_) {
      Poly term = Poly::constant(m, c);
      for (int i = 0; i < nvars_; ++i)
        if (e[i] > 0) term = term * power(i, e[i]);
      out += term;
    }
    return out;
  }

  /// f(T y): substitutes x_i -> sum_j T(i,j) y_j.
  Poly substitute_linear(const Matrix<Scalar>& t) const {
    if (t.rows() != nvars_) throw std::invalid_argument("substitute_linear: dimension mismatch");
    std::vector<Poly> subs;
    for (int i = 0; i < nvars_; ++i) subs.push_back(Poly::linear(Vector<Scalar>(t.row(i).transpose())));
    return compose(subs);
  }

  /// Evaluates at a point. Same-scalar points evaluate exactly; any other
  /// point type evaluates in complex floating arithmetic.
  template <typename Elem>
  auto evaluate(const Vector<Elem>& x) const {
    if (static_cast<int>(x.size()) != nvars_)
      throw std::invalid_argument("evaluate: point dimension does not match variable count");
    if constexpr (std::is_same_v<Elem, Scalar>) {
      Scalar sum = Scalar(0);
      for (const auto& [e, c] : terms_) {
        Scalar term = c;
        for (int i = 0; i < nvars_; ++i)
          for (int k = 0; k < e[i]; ++k) term *= x[i];
        sum += term;
      }
      return sum;
    } else {
      Complex sum = 0.0;
      for (const auto& [e, c] : terms_) {
        Complex term = to_complex(c);
        for (int i = 0; i < nvars_; ++i)
          for (int k = 0; k < e[i]; ++k) term *= Complex(x[i]);
        sum += term;
      }
      return sum;
    }
  }

  /// Converts coefficients with a callable.
  template <typename Other, typename Fn>
  Poly<Other> map(Fn fn) const {
    Poly<Other> out(nvars_);
    for (const auto& [e, c] : terms_) out.add_term(e, fn(c));
    return out;
  }

  /// Renames variables: variable i goes to slot remap[i] of an
  /// `new_nvars`-variable polynomial. remap[i] < 0 requires x_i absent.
  Poly relabel(const std::vector<int>& remap, int new_nvars) const {
    Poly out(new_nvars);
    for (const auto& [e, c] : terms_) {
      Exponent r(new_nvars, 0);
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (remap[i] < 0) throw std::invalid_argument("relabel drops a variable that occurs");
        r[remap[i]] += e[i];
      }
      out.add_term(r, c);
    }
    return out;
  }

  std::string to_string() const;

 private:
  static bool is_zero_scalar(const Scalar& s) { return cubic3::is_zero(s); }
  void check_compatible(const Poly& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("polynomials over different variable sets");
  }

  int nvars_ = 0;
  Terms terms_;
};

using Form = Poly<Rat>;
using CPoly = Poly<Complex>;

inline CPoly to_complex(const Form& f) {
  return f.map<Complex>([](const Rat& c) { return to_complex(c); });
}
inline CPoly to_complex(const CPoly& f) { return f; }

namespace detail {
inline std::string scalar_text(const Rat& c) { return c.str(); }
inline std::string scalar_text(const Complex& c) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  return os.str();
}
inline bool is_one(const Rat& c) { return c == 1; }
inline bool is_one(const Complex& c) { return c == Complex(1.0, 0.0); }
inline bool is_minus_one(const Rat& c) { return c == -1; }
inline bool is_minus_one(const Complex& c) { return c == Complex(-1.0, 0.0); }
inline bool is_negative(const Rat& c) { return c < 0; }
inline bool is_negative(const Complex&) { return false; }
}  // namespace detail

/// Text form in the input grammar, e.g. `3/2*x0^2*x4 - x3^3`.
template <typename Scalar>
std::string Poly<Scalar>::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Scalar coef = c;
    bool negative = detail::is_negative(coef);
    if (negative) coef = -coef;
    if (first) os << (negative ? "-" : "");
    else os << (negative ? " - " : " + ");
    first = false;
    bool constant = total_degree(e) == 0;
    bool printed = false;
    if (constant || !detail::is_one(coef)) {
      os << detail::scalar_text(coef);
      printed = true;
    }
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (printed) os << "*";
      os << "x" << i;
      if (e[i] > 1) os << "^" << e[i];
      printed = true;
    }
  }
  return os.str();
}

}  // namespace cubic3
