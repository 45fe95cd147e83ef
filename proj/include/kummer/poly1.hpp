#pragma once

#include <algorithm>
#include <vector>

#include "kummer/field.hpp"

namespace kummer {

// Dense univariate polynomial, constant term first, no trailing zeros.
using Poly1 = std::vector<Fe>;

void poly_trim(Poly1& a);
Poly1 poly_mul(const Poly1& a, const Poly1& b);
Poly1 poly_sub(const Poly1& a, const Poly1& b);
// Remainder of a modulo b (b nonzero); quotient through q if given.
Poly1 poly_mod(const Poly1& a, const Poly1& b, Poly1* q = nullptr);
Poly1 poly_gcd(Poly1 a, Poly1 b);  // monic
Fe poly_eval(const Poly1& a, const Fe& x);
Poly1 poly_derivative(const Poly1& a);
// base^e modulo m
Poly1 poly_powmod(const Poly1& base, const mpz_class& e, const Poly1& m);

// Monic irreducible factors of a squarefree f whose factors all have degree d.
std::vector<Poly1> equal_degree_factors(const Poly1& f, int d, Rng& rng);

// All roots in the field, by equal-degree splitting of gcd(f, x^q - x).
std::vector<Fe> poly_roots(Poly1 f, Rng& rng);

}  // namespace kummer
