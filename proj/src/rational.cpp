#include "cubic3/rational.hpp"

#include <stdexcept>

namespace cubic3 {

Rat parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rat(BigInt(text));
  BigInt num(text.substr(0, slash));
  BigInt den(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in " + text);
  return Rat(num, den);
}

std::string to_string(const Rat& r) { return r.str(); }

CMatrix to_complex(const RatMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_complex(m(i, j));
  return out;
}

CVector to_complex(const RatVector& v) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = to_complex(v(i));
  return out;
}

namespace {

std::vector<std::vector<BigInt>> integer_rows(const RatMatrix& m) {
  std::vector<std::vector<BigInt>> rows(m.rows(), std::vector<BigInt>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    BigInt lcm = 1;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(m(i, j)));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      Rat scaled = m(i, j) * Rat(lcm);
      rows[i][j] = boost::multiprecision::numerator(scaled);
    }
  }
  return rows;
}

}  // namespace

int rank_exact(const RatMatrix& m) {
  auto a = integer_rows(m);
  const int nrows = static_cast<int>(m.rows());
  const int ncols = static_cast<int>(m.cols());
  BigInt prev = 1;
  int rank = 0;
  for (int col = 0; col < ncols && rank < nrows; ++col) {
    int pivot = -1;
    for (int r = rank; r < nrows; ++r)
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[pivot], a[rank]);
    for (int r = rank + 1; r < nrows; ++r) {
      for (int c = col + 1; c < ncols; ++c)
        a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
      a[r][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RatMatrix& a) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
    int pivot = -1;
    for (int r = row; r < a.rows(); ++r)
      if (a(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    a.row(pivot).swap(a.row(row));
    Rat inv = Rat(1) / a(row, col);
    for (int c = col; c < a.cols(); ++c) a(row, c) *= inv;
    for (int r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      Rat factor = a(r, col);
      for (int c = col; c < a.cols(); ++c) a(r, c) -= factor * a(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

Rat determinant(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  RatMatrix a = m;
  const int n = static_cast<int>(a.rows());
  Rat det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return Rat(0);
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (a(r, col) == 0) continue;
      Rat factor = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
    }
  }
  return det;
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  const Eigen::Index n = m.rows();
  RatMatrix aug(n, 2 * n);
  aug.leftCols(n) = m;
  aug.rightCols(n) = RatMatrix::Identity(n, n);
  auto pivots = rref(aug);
  if (static_cast<Eigen::Index>(pivots.size()) < n || pivots.back() >= n) return std::nullopt;
  return RatMatrix(aug.rightCols(n));
}

RatMatrix kernel(const RatMatrix& m) {
  RatMatrix a = m;
  auto pivots = rref(a);
  const int ncols = static_cast<int>(m.cols());
  std::vector<bool> is_pivot(ncols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < ncols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  RatMatrix basis = RatMatrix::Zero(ncols, static_cast<Eigen::Index>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    int fc = free_cols[k];
    basis(fc, k) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) basis(pivots[r], k) = -a(r, fc);
  }
  return basis;
}

Congruence diagonalize_symmetric(const RatMatrix& m) {
  const Eigen::Index n = m.rows();
  RatMatrix a = m;
  RatMatrix p = RatMatrix::Identity(n, n);
  // Invariant: a = P^T M P, with rows/cols < k already diagonal.
  auto apply = [&](const RatMatrix& e) {
    a = (e.transpose() * a * e).eval();
    p = (p * e).eval();
  };
  Eigen::Index k = 0;
  while (k < n) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = k; i < n; ++i)
      if (a(i, i) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) {
      // All remaining diagonal entries vanish; use a nonzero off-diagonal.
      Eigen::Index pi = -1, pj = -1;
      for (Eigen::Index i = k; i < n && pi < 0; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          if (a(i, j) != 0) {
            pi = i;
            pj = j;
            break;
          }
      if (pi < 0) break;  // remaining block is zero
      RatMatrix e = RatMatrix::Identity(n, n);
      e(pj, pi) = 1;  // e_i -> e_i + e_j gives diagonal 2 a_ij
      apply(e);
      pivot = pi;
    }
    if (pivot != k) {
      RatMatrix e = RatMatrix::Identity(n, n);
      e(k, k) = 0;
      e(pivot, pivot) = 0;
      e(k, pivot) = 1;
      e(pivot, k) = 1;
      apply(e);
    }
    RatMatrix e = RatMatrix::Identity(n, n);
    for (Eigen::Index j = k + 1; j < n; ++j) e(k, j) = -a(k, j) / a(k, k);
    apply(e);
    ++k;
  }
  Congruence out;
  out.transform = p;
  out.diagonal = a.diagonal();
  out.rank = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (out.diagonal(i) != 0) ++out.rank;
  return out;
}

RatVector primitive_integer(const RatVector& v) {
  BigInt lcm = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(v(i)));
  RatVector out = v * Rat(lcm);
  BigInt g = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    g = boost::multiprecision::gcd(g, boost::multiprecision::numerator(out(i)));
  if (g == 0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) /= Rat(g);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) == 0) continue;
    if (out(i) < 0) out = -out;
    break;
  }
  return out;
}

int numeric_rank(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

}  // namespace cubic3
