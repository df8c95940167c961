#include "cubic3/forms.hpp"

#include <cctype>

namespace cubic3 {

std::vector<Exponent> monomials_of_degree(int nvars, int degree) {
  std::vector<Exponent> out;
  if (nvars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Exponent e(nvars, 0);
  // Lexicographically decreasing enumeration.
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      e[var] = remaining;
      out.push_back(e);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[var] = k;
      self(self, var + 1, remaining - k);
    }
  };
  rec(rec, 0, degree);
  return out;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int nvars) : text_(text), nvars_(nvars) {}

  struct Term {
    Form poly;
    std::size_t begin, end;
  };

  /// Top-level summands, each fully expanded.
  std::vector<Term> parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty polynomial", 0, 0);
    auto terms = parse_sum();
    if (pos_ < text_.size()) throw ParseError("unmatched ')'", pos_);
    return terms;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  std::string digits() {
    std::size_t begin = pos_;
    while (peek_digit()) ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  Rat parse_number() {
    std::size_t begin = pos_;
    std::string num = digits();
    if (num.empty()) throw ParseError("expected a number", begin);
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      skip_ws();
      std::size_t dbegin = pos_;
      std::string den = digits();
      if (den.empty()) throw ParseError("expected a denominator", dbegin);
      if (BigInt(den) == 0) throw ParseError("zero denominator", dbegin, den.size());
      return Rat(BigInt(num), BigInt(den));
    }
    return Rat(BigInt(num));
  }

  std::vector<Term> parse_sum() {
    std::vector<Term> terms;
    bool first = true;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] == ')') break;
      std::size_t begin = pos_;
      int sign = 1;
      if (text_[pos_] == '+' || text_[pos_] == '-') {
        sign = text_[pos_] == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        throw ParseError("expected '+' or '-' between terms", pos_);
      }
      Form t = parse_term();
      if (sign < 0) t = -t;
      terms.push_back({std::move(t), begin, pos_});
      first = false;
    }
    return terms;
  }

  int parse_power() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      skip_ws();
      std::size_t pbegin = pos_;
      std::string p = digits();
      if (p.empty()) throw ParseError("expected exponent after '^'", pbegin);
      return std::stoi(p);
    }
    return 1;
  }

  Form parse_term() {
    Form t = Form::constant(nvars_, Rat(1));
    bool need_factor = true;
    while (need_factor) {
      skip_ws();
      if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_, 0);
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        t *= parse_number();
      } else if (c == 'x') {
        std::size_t begin = pos_;
        ++pos_;
        std::string idx = digits();
        if (idx.empty()) throw ParseError("expected variable index after 'x'", begin, 1);
        int var = std::stoi(idx);
        if (var >= nvars_)
          throw ParseError("variable x" + idx + " out of range (expected x0..x" +
                               std::to_string(nvars_ - 1) + ")",
                           begin, pos_ - begin);
        Exponent e(nvars_, 0);
        e[var] = parse_power();
        Form m(nvars_);
        m.add_term(e, Rat(1));
        t = t * m;
      } else if (c == '(') {
        std::size_t open = pos_;
        ++pos_;
        Form inner(nvars_);
        auto inner_terms = parse_sum();
        if (inner_terms.empty()) throw ParseError("empty parentheses", open, pos_ - open + 1);
        if (pos_ >= text_.size()) throw ParseError("unclosed '('", open);
        ++pos_;
        for (const auto& it : inner_terms) inner += it.poly;
        t = t * inner.pow(parse_power());
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
      }
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
      } else if (pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == '(' || peek_digit())) {
        // implicit multiplication, e.g. 3x0, x0x1 or x0(x1+x2)
      } else {
        need_factor = false;
      }
    }
    return t;
  }

  std::string_view text_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Form parse_polynomial(std::string_view text, int nvars) {
  Parser parser(text, nvars);
  Form f(nvars);
  for (const auto& t : parser.parse()) f += t.poly;
  return f;
}

Form parse_form(std::string_view text, int nvars) {
  Parser parser(text, nvars);
  auto terms = parser.parse();
  Form f(nvars);
  int degree = -1;
  for (const auto& t : terms) {
    if (t.poly.is_zero()) continue;
    std::string term(text.substr(t.begin, t.end - t.begin));
    if (!t.poly.is_homogeneous())
      throw ParseError("inhomogeneous polynomial: term '" + term + "' mixes degrees " +
                           std::to_string(t.poly.order()) + " and " + std::to_string(t.poly.degree()),
                       t.begin, t.end - t.begin);
    int d = t.poly.degree();
    if (degree < 0) degree = d;
    else if (d != degree) {
      throw ParseError("inhomogeneous polynomial: term '" + term + "' has degree " +
                           std::to_string(d) + ", expected " + std::to_string(degree),
                       t.begin, t.end - t.begin);
    }
    f += t.poly;
  }
  return f;
}

LinearChange::LinearChange(RatMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || determinant(matrix_) == 0)
    throw std::invalid_argument("linear change must be square and invertible");
}

LinearChange LinearChange::identity(int n) { return LinearChange(RatMatrix::Identity(n, n)); }

LinearChange LinearChange::swap(int n, int i, int j) {
  RatMatrix m = RatMatrix::Identity(n, n);
  m.row(i).swap(m.row(j));
  return LinearChange(m);
}

LinearChange LinearChange::sending_last_to(const RatVector& point) {
  const int n = static_cast<int>(point.size());
  int pivot = -1;
  for (int i = n - 1; i >= 0; --i)
    if (point(i) != 0) {
      pivot = i;
      break;
    }
  if (pivot < 0) throw std::invalid_argument("zero vector is not a projective point");
  RatMatrix m = RatMatrix::Zero(n, n);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (i == pivot) continue;
    m(i, col++) = 1;
  }
  m.col(n - 1) = point;
  return LinearChange(m);
}

LinearChange LinearChange::with_leading_columns(const std::vector<RatVector>& columns) {
  if (columns.empty()) throw std::invalid_argument("no columns given");
  const int n = static_cast<int>(columns.front().size());
  RatMatrix m(n, 0);
  auto append = [&](const RatVector& v) {
    RatMatrix next(n, m.cols() + 1);
    next.leftCols(m.cols()) = m;
    next.col(m.cols()) = v;
    return next;
  };
  for (const auto& c : columns) {
    RatMatrix next = append(c);
    if (rank_exact(next) != next.cols()) throw std::invalid_argument("leading columns are dependent");
    m = next;
  }
  for (int i = 0; i < n && m.cols() < n; ++i) {
    RatVector e = RatVector::Zero(n);
    e(i) = 1;
    RatMatrix next = append(e);
    if (rank_exact(next) == next.cols()) m = next;
  }
  return LinearChange(m);
}

LinearChange LinearChange::inverse() const { return LinearChange(*cubic3::inverse(matrix_)); }

LinearChange LinearChange::then(const LinearChange& other) const {
  return LinearChange(RatMatrix(matrix_ * other.matrix_));
}

CPoint::CPoint(CVector coords) : coords_(std::move(coords)) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < coords_.size(); ++i)
    if (std::abs(coords_(i)) > best_abs * (1.0 + 1e-12)) {
      best_abs = std::abs(coords_(i));
      best = i;
    }
  if (best_abs <= 0.0) throw std::invalid_argument("all coordinates are zero");
  coords_ /= coords_(best);
}

double projective_distance(const CVector& a, const CVector& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  double c = std::abs(a.dot(b)) / (na * nb);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Complex evaluate(const Form& f, const CPoint& p) {
  if (p.size() != f.nvars()) throw std::invalid_argument("evaluate: dimension mismatch");
  return f.evaluate(p.coords());
}

std::vector<Form> gradient(const Form& f) {
  std::vector<Form> out;
  for (int i = 0; i < f.nvars(); ++i) out.push_back(f.derivative(i));
  return out;
}

Form substitute(const Form& f, const LinearChange& change) {
  if (change.size() != f.nvars()) throw std::invalid_argument("substitute: dimension mismatch");
  return f.substitute_linear(change.matrix());
}

RatMatrix quad_matrix(const Form& g) {
  if (!g.is_zero() && (g.degree() != 2 || !g.is_homogeneous()))
    throw std::invalid_argument("quad_matrix needs a quadratic form");
  const int n = g.nvars();
  RatMatrix m = RatMatrix::Zero(n, n);
  for (const auto& [e, c] : g.terms()) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < e[i]; ++k) idx.push_back(i);
    if (idx[0] == idx[1]) m(idx[0], idx[0]) = c;
    else {
      m(idx[0], idx[1]) = c / 2;
      m(idx[1], idx[0]) = c / 2;
    }
  }
  return m;
}

RatMatrix coefficient_matrix(const std::vector<Form>& forms, int nvars, int degree) {
  auto monos = monomials_of_degree(nvars, degree);
  RatMatrix m = RatMatrix::Zero(static_cast<Eigen::Index>(forms.size()),
                                static_cast<Eigen::Index>(monos.size()));
  for (std::size_t r = 0; r < forms.size(); ++r)
    for (std::size_t c = 0; c < monos.size(); ++c) m(r, c) = forms[r].coefficient(monos[c]);
  return m;
}

ConeVerdict cone_test(const Form& f) {
  if (f.is_zero()) throw std::invalid_argument("cone_test on the zero form");
  const int n = f.nvars();
  auto partials = gradient(f);
  RatMatrix coeffs = coefficient_matrix(partials, n, f.degree() - 1);
  ConeVerdict v;
  v.vertex_dimension = n - rank_exact(coeffs);
  v.is_cone = v.vertex_dimension >= 1;
  // A dependency sum_i a_i ∂_i f = 0 is a vertex direction a.
  v.vertex = kernel(RatMatrix(coeffs.transpose()));
  return v;
}

}  // namespace cubic3
