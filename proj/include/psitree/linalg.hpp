#pragma once

// Small dense linear algebra over the project's scalar fields: Gaussian
// elimination with pivot scoring (exact fields score zero/nonzero, floating
// fields score by magnitude), a rank-(s-1) nullspace routine for resonance
// matrices, and determinants / characteristic polynomials.

#include <stdexcept>
#include <vector>

#include "psitree/field.hpp"

namespace psitree {

template <class F>
using Vec = std::vector<F>;
template <class F>
using Mat = std::vector<std::vector<F>>;  // row major, square in practice

template <class F>
Mat<F> mat_transpose(const Mat<F>& a) {
  std::size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
  Mat<F> t(m, Vec<F>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) t[j][i] = a[i][j];
  return t;
}

// Solves A x = b for nonsingular A (throws on singular input).
template <class F>
Vec<F> gauss_solve(Mat<F> a, Vec<F> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = FieldTraits<F>::pivot_score(a[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double s = FieldTraits<F>::pivot_score(a[r][col]);
      if (s > best) {
        best = s;
        piv = r;
      }
    }
    if (FieldTraits<F>::is_zero(a[piv][col]))
      throw std::domain_error("gauss_solve: singular matrix");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (FieldTraits<F>::is_zero(a[r][col])) continue;
      F f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] = a[r][c] - f * a[col][c];
      b[r] = b[r] - f * b[col];
    }
  }
  Vec<F> x(n);
  for (std::size_t i = n; i-- > 0;) {
    F s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s = s - a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Nullspace vector of a matrix of known rank n-1 (resonance matrices A_r).
// Eliminates with n-1 pivots chosen by score; the remaining column is the
// free variable, set to 1.
template <class F>
Vec<F> nullspace_rank1(Mat<F> a, const typename FieldTraits<F>::Ctx& ctx) {
  const std::size_t n = a.size();
  std::vector<std::size_t> pivot_col;
  std::vector<bool> col_used(n, false), row_used(n, false);
  std::vector<std::size_t> pivot_row;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    // Full pivoting over unused rows/cols.
    double best = -std::numeric_limits<double>::infinity();
    std::size_t pr = 0, pc = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (row_used[r]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (col_used[c]) continue;
        double s = FieldTraits<F>::pivot_score(a[r][c]);
        if (s > best) {
          best = s;
          pr = r;
          pc = c;
        }
      }
    }
    if (FieldTraits<F>::is_zero(a[pr][pc]))
      throw std::domain_error("nullspace_rank1: rank deficiency > 1");
    row_used[pr] = true;
    col_used[pc] = true;
    pivot_row.push_back(pr);
    pivot_col.push_back(pc);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == pr || FieldTraits<F>::is_zero(a[r][pc])) continue;
      F f = a[r][pc] / a[pr][pc];
      for (std::size_t c = 0; c < n; ++c) a[r][c] = a[r][c] - f * a[pr][c];
    }
  }
  std::size_t free_col = 0;
  for (std::size_t c = 0; c < n; ++c)
    if (!col_used[c]) free_col = c;
  Vec<F> x(n, FieldTraits<F>::from_rational(ctx, Rational(0)));
  x[free_col] = FieldTraits<F>::from_rational(ctx, Rational(1));
  for (std::size_t k = pivot_row.size(); k-- > 0;) {
    std::size_t r = pivot_row[k], c = pivot_col[k];
    F s = -(a[r][free_col]);
    // After full elimination each pivot row has zeros in the other pivot
    // columns, so back-substitution is a single division.
    x[c] = s / a[r][c];
  }
  return x;
}

// Solves A x = rhs where A has rank n-1, rhs is in the range of A, and the
// solution is gauged so that x[gauge] = 0 (null direction removed). Achieved
// by appending the row e_gauge^T and solving the consistent stacked system
// with column elimination restricted to n unknowns.
template <class F>
Vec<F> gauss_solve_gauged(const Mat<F>& a, const Vec<F>& rhs, std::size_t gauge,
                          const typename FieldTraits<F>::Ctx& ctx) {
  const std::size_t n = a.size();
  // Stack [A; e_gauge] and [rhs; 0], then solve the n x n system formed by
  // dropping the most redundant row (detected during elimination).
  Mat<F> m = a;
  Vec<F> b = rhs;
  m.push_back(Vec<F>(n, FieldTraits<F>::from_rational(ctx, Rational(0))));
  m.back()[gauge] = FieldTraits<F>::from_rational(ctx, Rational(1));
  b.push_back(FieldTraits<F>::from_rational(ctx, Rational(0)));

  const std::size_t rows = n + 1;
  std::vector<bool> row_used(rows, false);
  std::vector<std::size_t> pivot_row(n), pivot_col;
  for (std::size_t col = 0; col < n; ++col) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t pr = rows;
    for (std::size_t r = 0; r < rows; ++r) {
      if (row_used[r]) continue;
      double s = FieldTraits<F>::pivot_score(m[r][col]);
      if (s > best) {
        best = s;
        pr = r;
      }
    }
    if (pr == rows || FieldTraits<F>::is_zero(m[pr][col]))
      throw std::domain_error("gauss_solve_gauged: inconsistent system");
    row_used[pr] = true;
    pivot_row[col] = pr;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pr || FieldTraits<F>::is_zero(m[r][col])) continue;
      F f = m[r][col] / m[pr][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] = m[r][c] - f * m[pr][c];
      b[r] = b[r] - f * b[pr];
    }
  }
  Vec<F> x(n);
  for (std::size_t col = 0; col < n; ++col)
    x[col] = b[pivot_row[col]] / m[pivot_row[col]][col];
  return x;
}

template <class F>
F dot(const Vec<F>& a, const Vec<F>& b) {
  F s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

// Characteristic polynomial det(r I - M) of a rational matrix, as exact
// rational coefficients (index = power of r), via evaluation at s+1 integer
// points and Lagrange interpolation.
inline std::vector<Rational> char_poly(const Mat<Rational>& m) {
  const long n = static_cast<long>(m.size());
  auto det_at = [&](long r) -> Rational {
    Mat<Rational> a = m;
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) a[i][j] = -a[i][j];
      a[i][i] += Rational(r);
    }
    // Fraction-free-ish elimination (plain rational Gauss).
    Rational det = 1;
    for (long col = 0; col < n; ++col) {
      long piv = -1;
      for (long row = col; row < n; ++row)
        if (!a[row][col].is_zero()) {
          piv = row;
          break;
        }
      if (piv < 0) return 0;
      if (piv != col) {
        std::swap(a[piv], a[col]);
        det = -det;
      }
      det *= a[col][col];
      for (long row = col + 1; row < n; ++row) {
        if (a[row][col].is_zero()) continue;
        Rational f = a[row][col] / a[col][col];
        for (long c = col; c < n; ++c) a[row][c] -= f * a[col][c];
      }
    }
    return det;
  };
  // Interpolate the degree-n polynomial from values at r = 0..n.
  std::vector<Rational> xs(n + 1), ys(n + 1);
  for (long i = 0; i <= n; ++i) {
    xs[i] = Rational(i);
    ys[i] = det_at(i);
  }
  // Newton divided differences.
  std::vector<Rational> dd = ys;
  for (long level = 1; level <= n; ++level)
    for (long i = n; i >= level; --i)
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
  std::vector<Rational> poly(n + 1, Rational(0));
  std::vector<Rational> basis = {Rational(1)};  // prod (r - xs[j])
  for (long k = 0; k <= n; ++k) {
    for (std::size_t j = 0; j < basis.size(); ++j) poly[j] += dd[k] * basis[j];
    if (k < n) {
      basis.push_back(Rational(0));
      for (std::size_t j = basis.size(); j-- > 1;)
        basis[j] = basis[j - 1] - xs[k] * basis[j];
      basis[0] = -xs[k] * basis[0];
    }
  }
  return poly;
}

}  // namespace psitree
