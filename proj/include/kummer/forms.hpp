#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kummer/field.hpp"

namespace kummer {

using Mono = std::array<int, 4>;
using Point4 = std::array<Fe, 4>;

// Exponent tuples are packed one byte per variable, X in the high byte, so
// that numeric order on keys of equal degree is lexicographic order.
inline std::uint32_t mono_key(const Mono& e) {
  return (std::uint32_t(e[0]) << 24) | (std::uint32_t(e[1]) << 16) | (std::uint32_t(e[2]) << 8) |
         std::uint32_t(e[3]);
}
inline Mono mono_of(std::uint32_t k) {
  return {int(k >> 24), int((k >> 16) & 0xff), int((k >> 8) & 0xff), int(k & 0xff)};
}

// Homogeneous form in X, Y, Z, T (equivalently k1..k4). Terms are kept in
// descending lexicographic order of exponents, so X^d comes first.
class Form {
 public:
  using Terms = std::map<std::uint32_t, Fe, std::greater<std::uint32_t>>;

  Form() = default;
  Form(const Field* f, int degree) : f_(f), degree_(degree) {}

  static Form monomial(const Field* f, const Mono& e, const Fe& c);
  static Form variable(const Field* f, int i);
  static Form constant(const Field* f, const Fe& c);

  const Field* field() const { return f_; }
  int degree() const { return degree_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Fe coeff(const Mono& e) const;
  void add_term(const Mono& e, const Fe& c);
  void add_term_key(std::uint32_t k, const Fe& c);

  Form operator+(const Form& g) const;
  Form operator-(const Form& g) const;
  Form operator-() const;
  Form operator*(const Form& g) const;
  Form scaled(const Fe& s) const;
  Form& operator+=(const Form& g);
  Form& operator-=(const Form& g);

  bool operator==(const Form& g) const;
  bool operator!=(const Form& g) const { return !(*this == g); }

  Fe eval(const Point4& p) const;

  // Divide every term by the monomial m; throws if some term is not divisible.
  Form div_monomial(const Mono& m) const;

  // Largest exponent of variable i over all terms (-1 for the zero form).
  int max_exponent(int i) const;

 private:
  const Field* f_ = nullptr;
  int degree_ = 0;
  Terms terms_;
};

// Substitution (X,Y,Z,T) -> (s0 V[p0], s1 V[p1], s2 V[p2], s3 V[p3]).
struct SignedPermutation {
  std::array<int, 4> perm{0, 1, 2, 3};
  std::array<int, 4> signs{1, 1, 1, 1};

  Point4 apply(const Point4& p) const;
  SignedPermutation compose(const SignedPermutation& inner) const;  // this after inner
};

// The 16 translations by 2-torsion on the Fast model, in row-major order.
const SignedPermutation& sigma_action(int i);

Form apply_signed_permutation(const Form& f, const SignedPermutation& s);

// Parity class 1..4 of a monomial under the diagonal actions sigma_1..sigma_3.
int partition_class(const Mono& e);
// Class of a form whose terms all share one class; 0 for the zero form,
// -1 for mixed support.
int form_class(const Form& f);

// Exponent tuples of degree d, optionally restricted to one parity class.
std::vector<Mono> monomials_of_degree(int d, int cls = 0);

// Normal form modulo a quartic with unit X^4 coefficient: every term ends up
// with exponent of X at most 3. The quotient is returned through q if given.
Form reduce_mod_quartic(const Form& f, const Form& K, Form* q = nullptr);

// Remainder of f on division by K under the lexicographic order whose
// variable priority is `order` (most significant first). The result has no
// term divisible by the leading monomial of K and is the same for every order
// that gives K that leading monomial.
Form normal_form(const Form& f, const Form& K, const std::array<int, 4>& order);

// Pseudo-remainder of f by K viewed as polynomials in the last variable,
// where K has degree 2 in it. Zero iff K divides f when K is irreducible.
Form pseudo_remainder_last(const Form& f, const Form& K);

// Truncated power series in two variables; only terms with d1 + d2 < trunc
// are stored.
class BivariateSeries {
 public:
  BivariateSeries() = default;
  BivariateSeries(const Field* f, int trunc);

  static BivariateSeries constant(const Field* f, int trunc, const Fe& c);
  static BivariateSeries monomial(const Field* f, int trunc, int d1, int d2, const Fe& c);

  const Field* field() const { return f_; }
  int trunc() const { return trunc_; }
  const Fe& coeff(int d1, int d2) const;
  void set(int d1, int d2, const Fe& c);
  void add(int d1, int d2, const Fe& c);

  BivariateSeries operator+(const BivariateSeries& o) const;
  BivariateSeries operator-(const BivariateSeries& o) const;
  BivariateSeries operator*(const BivariateSeries& o) const;
  BivariateSeries scaled(const Fe& s) const;
  bool is_zero() const;
  bool operator==(const BivariateSeries& o) const { return trunc_ == o.trunc_ && c_ == o.c_; }

 private:
  void check(const BivariateSeries& o) const;
  const Field* f_ = nullptr;
  int trunc_ = 0;
  std::vector<Fe> c_;  // index d1 * trunc + d2
};

// Text such as "3 X^2 Y - [1,2] Z T" or "k1 k4^4 + 7 k_2^2 k_4^3". Variables are X, Y, Z, T
// or k1..k4 (k_1..k_4); products may use spaces or '*'. Zero forms are "0".
Form parse_form(const Field* f, const std::string& text, int degree);
// "c X^a Y^b ..." with terms in the stored order; X, Y, Z, T or k1..k4 as names.
std::string format_form(const Form& g, bool k_names = false);

// Substitute four series for the variables of a form.
BivariateSeries substitute(const Form& f, const std::array<BivariateSeries, 4>& s);

}  // namespace kummer
