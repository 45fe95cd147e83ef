#include "kummer/linalg.hpp"

namespace kummer {

Matrix::Matrix(const Field* f, std::size_t rows, std::size_t cols)
    : f_(f), rows_(rows), cols_(cols), a_(rows * cols, f->zero()) {}

Matrix Matrix::identity(const Field* f, std::size_t n) {
  Matrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = f->one();
  return m;
}

Matrix Matrix::from_ints(const Field* f, const std::vector<std::vector<long>>& rows) {
  Matrix m(f, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = f->from_int(rows[i].at(j));
  return m;
}

Matrix Matrix::from_rows(const Field* f, const std::vector<Vec>& rows) {
  Matrix m(f, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i].at(j);
  return m;
}

Matrix Matrix::from_columns(const Field* f, const std::vector<Vec>& cols) {
  Matrix m(f, cols.empty() ? 0 : cols[0].size(), cols.size());
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = cols[j].at(i);
  return m;
}

Vec Matrix::row(std::size_t i) const { return Vec(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }

Vec Matrix::column(std::size_t j) const {
  Vec v;
  v.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
  return v;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) fail(ErrorKind::Contract, "matrix product dimension mismatch");
  Matrix r(f_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Fe& x = (*this)(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        if (!o(k, j).is_zero()) r(i, j) += x * o(k, j);
    }
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::Contract, "matrix sum dimension mismatch");
  Matrix r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] += o.a_[k];
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::Contract, "matrix difference dimension mismatch");
  Matrix r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] -= o.a_[k];
  return r;
}

Matrix Matrix::scaled(const Fe& s) const {
  Matrix r = *this;
  for (auto& x : r.a_) x *= s;
  return r;
}

Vec Matrix::operator*(const Vec& v) const {
  if (v.size() != cols_) fail(ErrorKind::Contract, "matrix-vector dimension mismatch");
  Vec r(rows_, f_->zero());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (!(*this)(i, j).is_zero() && !v[j].is_zero()) r[i] += (*this)(i, j) * v[j];
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(f_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

bool Matrix::operator==(const Matrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

bool Matrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

bool Matrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && !(*this)(i, j).is_zero()) return false;
  return true;
}

Matrix echelon_form(const Matrix& m, std::vector<std::size_t>& pivots) {
  Matrix r = m;
  pivots.clear();
  std::size_t row = 0;
  for (std::size_t col = 0; col < r.cols() && row < r.rows(); ++col) {
    std::size_t piv = row;
    while (piv < r.rows() && r(piv, col).is_zero()) ++piv;
    if (piv == r.rows()) continue;
    if (piv != row)
      for (std::size_t j = col; j < r.cols(); ++j) std::swap(r(piv, j), r(row, j));
    Fe s = r(row, col).inv();
    for (std::size_t j = col; j < r.cols(); ++j)
      if (!r(row, j).is_zero()) r(row, j) = r(row, j) * s;
    for (std::size_t i = 0; i < r.rows(); ++i) {
      if (i == row || r(i, col).is_zero()) continue;
      Fe t = r(i, col);
      for (std::size_t j = col; j < r.cols(); ++j)
        if (!r(row, j).is_zero()) r(i, j) -= t * r(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return r;
}

Matrix echelon_form(const Matrix& m) {
  std::vector<std::size_t> pivots;
  return echelon_form(m, pivots);
}

std::size_t rank(const Matrix& m) {
  std::vector<std::size_t> pivots;
  echelon_form(m, pivots);
  return pivots.size();
}

Vec normalize_first(const Vec& v) {
  for (const auto& x : v) {
    if (x.is_zero()) continue;
    if (x.is_one()) return v;
    Fe s = x.inv();
    Vec r;
    r.reserve(v.size());
    for (const auto& y : v) r.push_back(y * s);
    return r;
  }
  return v;
}

std::vector<Vec> kernel_basis(const Matrix& m) {
  std::vector<std::size_t> pivots;
  Matrix r = echelon_form(m, pivots);
  const Field* f = m.field();
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t fc = 0; fc < m.cols(); ++fc) {
    if (is_pivot[fc]) continue;
    Vec v(m.cols(), f->zero());
    v[fc] = f->one();
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r(i, fc);
    basis.push_back(normalize_first(v));
  }
  return basis;
}

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::Contract, "inverse of a non-square matrix");
  std::size_t n = m.rows();
  const Field* f = m.field();
  Matrix aug(f, n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = f->one();
  }
  std::vector<std::size_t> pivots;
  Matrix r = echelon_form(aug, pivots);
  if (pivots.size() < n || pivots[n - 1] != n - 1) fail(ErrorKind::Degenerate, "singular matrix");
  Matrix inv(f, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
  return inv;
}

Fe determinant(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::Contract, "determinant of a non-square matrix");
  Matrix r = m;
  std::size_t n = m.rows();
  const Field* f = m.field();
  Fe det = f->one();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && r(piv, col).is_zero()) ++piv;
    if (piv == n) return f->zero();
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(r(piv, j), r(col, j));
      det = -det;
    }
    det *= r(col, col);
    Fe s = r(col, col).inv();
    for (std::size_t i = col + 1; i < n; ++i) {
      if (r(i, col).is_zero()) continue;
      Fe t = r(i, col) * s;
      for (std::size_t j = col; j < n; ++j) r(i, j) -= t * r(col, j);
    }
  }
  return det;
}

std::optional<Vec> solve(const Matrix& m, const Vec& b) {
  const Field* f = m.field();
  Matrix aug(f, m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b.at(i);
  }
  std::vector<std::size_t> pivots;
  Matrix r = echelon_form(aug, pivots);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  Vec x(m.cols(), f->zero());
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = r(i, m.cols());
  return x;
}

std::vector<Vec> eigenspace(const Matrix& m, const Fe& lambda) {
  if (m.rows() != m.cols()) fail(ErrorKind::Contract, "eigenspace of a non-square matrix");
  return kernel_basis(m - Matrix::identity(m.field(), m.rows()).scaled(lambda));
}

Matrix simultaneous_diagonalizer(const Matrix& m1, const Matrix& m2, std::pair<Fe, Fe> eigs1,
                                 std::pair<Fe, Fe> eigs2) {
  const Field* f = m1.field();
  if (m1.rows() != 4 || m1.cols() != 4 || m2.rows() != 4 || m2.cols() != 4)
    fail(ErrorKind::Contract, "simultaneous_diagonalizer expects 4x4 matrices");
  if (m1 * m2 != m2 * m1) fail(ErrorKind::Structure, "matrices do not commute");
  Matrix id = Matrix::identity(f, 4);
  std::vector<Vec> cols;
  for (const Fe& l : {eigs1.first, eigs1.second})
    for (const Fe& mu : {eigs2.first, eigs2.second}) {
      Matrix a = m1 - id.scaled(l), b = m2 - id.scaled(mu);
      Matrix st(f, 8, 4);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          st(i, j) = a(i, j);
          st(4 + i, j) = b(i, j);
        }
      auto ker = kernel_basis(st);
      if (ker.size() != 1)
        fail(ErrorKind::Structure,
             "eigenspace intersection has dimension " + std::to_string(ker.size()) + ", expected 1");
      cols.push_back(ker[0]);
    }
  Matrix p = Matrix::from_columns(f, cols);
  if (determinant(p).is_zero()) fail(ErrorKind::Structure, "common eigenvectors are dependent");
  return p;
}

}  // namespace kummer
