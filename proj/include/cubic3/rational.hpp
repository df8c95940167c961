#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace cubic3 {

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RatMatrix = Matrix<Rat>;
using RatVector = Vector<Rat>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline Complex to_complex(const Rat& r) { return {to_double(r), 0.0}; }
inline Complex to_complex(const Complex& c) { return c; }

// Zero tests used by the scalar-generic code. Complex zero is exact zero.
inline bool is_zero(const Rat& r) { return r == 0; }
inline bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }

Rat parse_rational(const std::string& text);
std::string to_string(const Rat& r);

CMatrix to_complex(const RatMatrix& m);
CVector to_complex(const RatVector& v);

/// Rank over Q by fraction-free (Bareiss) elimination on the row-scaled
/// integer matrix.
int rank_exact(const RatMatrix& m);

Rat determinant(const RatMatrix& m);

std::optional<RatMatrix> inverse(const RatMatrix& m);

/// Columns form a basis of the right kernel {v : m v = 0}.
RatMatrix kernel(const RatMatrix& m);

/// Symmetric congruence diagonalization: returns invertible P with
/// P^T M P diagonal; the diagonal is returned in `diagonal`. Nonzero entries
/// come first.
struct Congruence {
  RatMatrix transform;
  RatVector diagonal;
  int rank = 0;
};
Congruence diagonalize_symmetric(const RatMatrix& m);

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
RatVector primitive_integer(const RatVector& v);

/// Rank of a complex matrix by singular values: the number of values above
/// rel_tol times the largest.
int numeric_rank(const CMatrix& m, double rel_tol);

}  // namespace cubic3
