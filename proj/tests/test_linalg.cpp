#include <doctest.h>

#include "kummer/linalg.hpp"

using namespace kummer;

namespace {

Matrix random_matrix(const Field* f, std::size_t r, std::size_t c, Rng& rng, int zero_rows = 0) {
  Matrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = f->random(rng);
  // make the last rows combinations of the first ones
  for (int z = 0; z < zero_rows; ++z) {
    std::size_t i = r - 1 - z;
    for (std::size_t j = 0; j < c; ++j) m(i, j) = m(0, j) * f->from_int(3) + m(1, j);
  }
  return m;
}

}  // namespace

TEST_CASE("echelon form") {
  auto f = Field::make(11);
  auto id = Matrix::identity(f.get(), 3);
  CHECK(echelon_form(id) == id);
  Matrix z(f.get(), 2, 3);
  CHECK(echelon_form(z) == z);
  CHECK(echelon_form(Matrix::from_ints(f.get(), {{2, 4}, {1, 2}})) == Matrix::from_ints(f.get(), {{1, 2}, {0, 0}}));

  Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    Matrix m = random_matrix(f.get(), 5, 7, rng, k % 3);
    Matrix e = echelon_form(m);
    CHECK(echelon_form(e) == e);
  }
}

TEST_CASE("kernel basis") {
  auto f = Field::make(11);
  auto k = kernel_basis(Matrix(f.get(), 2, 2));
  REQUIRE(k.size() == 2);
  CHECK(k[0] == Vec{f->one(), f->zero()});
  CHECK(kernel_basis(Matrix::identity(f.get(), 3)).empty());
  auto k1 = kernel_basis(Matrix::from_ints(f.get(), {{1, 1}}));
  REQUIRE(k1.size() == 1);
  CHECK(k1[0] == Vec{f->one(), f->from_int(10)});

  auto q = Field::make(1000003, 2);
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    Matrix m = random_matrix(q.get(), 6, 9, rng, t % 4);
    auto basis = kernel_basis(m);
    CHECK(rank(m) + basis.size() == m.cols());
    for (const auto& v : basis) {
      for (const auto& x : m * v) CHECK(x.is_zero());
    }
  }
}

TEST_CASE("inverse, determinant, solve") {
  auto f = Field::make(1000003);
  Rng rng(11);
  for (int t = 0; t < 5; ++t) {
    Matrix m = random_matrix(f.get(), 5, 5, rng);
    CHECK(inverse(m) * m == Matrix::identity(f.get(), 5));
    CHECK(determinant(m * m) == determinant(m) * determinant(m));
    Vec b(5);
    for (auto& x : b) x = f->random(rng);
    auto x = solve(m, b);
    REQUIRE(x.has_value());
    CHECK(m * *x == b);
  }
  Matrix s = random_matrix(f.get(), 4, 4, rng, 1);
  CHECK(determinant(s).is_zero());
  CHECK_THROWS_AS(inverse(s), Error);
}

TEST_CASE("eigenspaces and simultaneous diagonalisation") {
  auto f = Field::make(11);
  CHECK(eigenspace(Matrix::identity(f.get(), 3), f->one()).size() == 3);
  auto d = Matrix::from_ints(f.get(), {{2, 0}, {0, 3}});
  CHECK(eigenspace(d, f->from_int(5)).empty());

  auto g = Field::make(101);
  auto m1 = Matrix::from_ints(g.get(), {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 2}});
  auto m2 = Matrix::from_ints(g.get(), {{5, 0, 0, 0}, {0, 7, 0, 0}, {0, 0, 5, 0}, {0, 0, 0, 7}});
  Matrix p = simultaneous_diagonalizer(m1, m2, {g->from_int(1), g->from_int(2)}, {g->from_int(5), g->from_int(7)});
  CHECK(p == Matrix::identity(g.get(), 4));

  auto bad = Matrix::from_ints(g.get(), {{5, 0, 0, 0}, {0, 5, 0, 0}, {0, 0, 7, 0}, {0, 0, 0, 7}});
  CHECK_THROWS_AS(
      simultaneous_diagonalizer(m1, bad, {g->from_int(1), g->from_int(2)}, {g->from_int(5), g->from_int(7)}),
      Error);
  auto noncomm = Matrix::from_ints(g.get(), {{5, 1, 0, 0}, {0, 7, 0, 0}, {0, 0, 5, 0}, {1, 0, 0, 7}});
  CHECK_THROWS_AS(
      simultaneous_diagonalizer(m1, noncomm, {g->from_int(1), g->from_int(2)}, {g->from_int(5), g->from_int(7)}),
      Error);
}
