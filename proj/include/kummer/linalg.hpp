#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kummer/field.hpp"

namespace kummer {

using Vec = std::vector<Fe>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(const Field* f, std::size_t rows, std::size_t cols);

  static Matrix identity(const Field* f, std::size_t n);
  static Matrix from_ints(const Field* f, const std::vector<std::vector<long>>& rows);
  static Matrix from_rows(const Field* f, const std::vector<Vec>& rows);
  static Matrix from_columns(const Field* f, const std::vector<Vec>& cols);

  const Field* field() const { return f_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Fe& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Fe& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Vec row(std::size_t i) const;
  Vec column(std::size_t j) const;

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scaled(const Fe& s) const;
  Vec operator*(const Vec& v) const;
  Matrix transpose() const;

  bool operator==(const Matrix& o) const;
  bool operator!=(const Matrix& o) const { return !(*this == o); }
  bool is_zero() const;
  bool is_diagonal() const;

 private:
  const Field* f_ = nullptr;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Fe> a_;
};

// Reduced row-echelon form. Pivots are chosen column by column, left to
// right, taking the first nonzero entry at or below the current row.
Matrix echelon_form(const Matrix& m);
// Same, also reporting the pivot columns.
Matrix echelon_form(const Matrix& m, std::vector<std::size_t>& pivots);

std::size_t rank(const Matrix& m);

// Right null space; one vector per free column in increasing order, each
// scaled so that its first nonzero coordinate is 1.
std::vector<Vec> kernel_basis(const Matrix& m);

Matrix inverse(const Matrix& m);
Fe determinant(const Matrix& m);

// Some solution of m x = b, if one exists.
std::optional<Vec> solve(const Matrix& m, const Vec& b);

std::vector<Vec> eigenspace(const Matrix& m, const Fe& lambda);

// Columns are common eigenvectors for the eigenvalue pairs
// (l1,m1), (l1,m2), (l2,m1), (l2,m2).
Matrix simultaneous_diagonalizer(const Matrix& m1, const Matrix& m2, std::pair<Fe, Fe> eigs1,
                                 std::pair<Fe, Fe> eigs2);

// Scale so the first nonzero entry is 1. Zero vectors are returned unchanged.
Vec normalize_first(const Vec& v);

}  // namespace kummer
