#pragma once

#include "cubic3/polynomial.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cubic3 {

/// Parse failure with the byte offset of the offending input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position, std::size_t length = 1)
      : std::runtime_error(message), position_(position), length_(length) {}
  std::size_t position() const { return position_; }
  std::size_t length() const { return length_; }

 private:
  std::size_t position_;
  std::size_t length_;
};

/// Parses `3/2*x0^2*x4 - x3^3`-style text over variables x0..x{nvars-1}.
/// Rejects inhomogeneous input, naming the first term whose degree differs.
Form parse_form(std::string_view text, int nvars = 5);

/// Like parse_form but without the homogeneity check.
Form parse_polynomial(std::string_view text, int nvars);

/// Invertible linear coordinate change x = T y over Q.
class LinearChange {
 public:
  explicit LinearChange(RatMatrix matrix);

  static LinearChange identity(int n);
  static LinearChange swap(int n, int i, int j);
  /// A change whose last column is `point`, so that y = e_{n-1} maps to it;
  /// the remaining columns are standard basis vectors.
  static LinearChange sending_last_to(const RatVector& point);
  /// First columns are the given vectors; completed by standard basis
  /// vectors to an invertible matrix.
  static LinearChange with_leading_columns(const std::vector<RatVector>& columns);

  const RatMatrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }
  LinearChange inverse() const;
  /// (this ∘ other): x = T_this (T_other z).
  LinearChange then(const LinearChange& other) const;

 private:
  RatMatrix matrix_;
};

/// Complex projective point scaled so the largest-modulus coordinate is 1.
class CPoint {
 public:
  CPoint() = default;
  explicit CPoint(CVector coords);

  const CVector& coords() const { return coords_; }
  int size() const { return static_cast<int>(coords_.size()); }
  Complex operator[](int i) const { return coords_(i); }

 private:
  CVector coords_;
};

/// Scale-invariant distance between projective points: the sine of the
/// angle between the representing lines.
double projective_distance(const CVector& a, const CVector& b);

Complex evaluate(const Form& f, const CPoint& p);

/// The partial derivatives of f.
std::vector<Form> gradient(const Form& f);

/// f ∘ T.
Form substitute(const Form& f, const LinearChange& change);

/// Symmetric M with g(x) = x^T M x.
RatMatrix quad_matrix(const Form& g);

struct ConeVerdict {
  bool is_cone = false;
  /// 5 - rank of the span of the partial derivatives.
  int vertex_dimension = 0;
  /// Columns span the vertex (common kernel of the partials).
  RatMatrix vertex;
};

/// A form is a cone iff its partial derivatives are linearly dependent.
ConeVerdict cone_test(const Form& f);

/// Coefficient vectors of forms of equal degree, one row per form, columns
/// indexed by monomials_of_degree.
RatMatrix coefficient_matrix(const std::vector<Form>& forms, int nvars, int degree);

}  // namespace cubic3
