#pragma once

#include <array>
#include <utility>

#include "kummer/field.hpp"
#include "kummer/forms.hpp"

namespace kummer {

using Matrix4 = std::array<std::array<Fe, 4>, 4>;
using FormMatrix4 = std::array<std::array<Form, 4>, 4>;

// Coefficients of the quadratic forms R_ij = B_ij(k, Q) for a fixed Q.
//   R_ii = sum_m diag[i ^ m] k_m^2
//   for i < j with s = i ^ j, u_s = k_0 k_s and v_s the complementary product:
//     R_{0s} = cu[s] u_s + cv[s] v_s, and the other pair of group s swaps cu, cv.
struct BiquadCoeffs {
  std::array<Fe, 4> diag;
  std::array<Fe, 4> cu, cv;  // index 1..3
};

bool proj_equal(const Point4& p, const Point4& q);
// (X+Y+Z+T, X+Y-Z-T, X-Y+Z-T, X-Y-Z+T)
Point4 hadamard(const Point4& p);

// Fast Kummer surface with theta constants (a,b,c,d).
class FastKummer {
 public:
  FastKummer(FieldPtr field, const Point4& theta);

  const Field* field() const { return field_.get(); }
  const FieldPtr& field_ptr() const { return field_; }
  const Point4& theta() const { return theta_; }
  const Point4& dual() const { return g_; }  // A, B, C, D
  const Fe& E() const { return e_; }
  const Fe& F() const { return f_; }
  const Fe& G() const { return gg_; }
  const Fe& H() const { return h_; }
  // g_first of the off-diagonal group s = 1, 2, 3 (AB - CD, AC - BD, AD - BC).
  const Fe& g_off(int s) const { return goff_[s]; }
  const Form& quartic() const { return quartic_; }

  bool on_surface(const Point4& p) const;
  bool is_identity(const Point4& p) const { return proj_equal(p, theta_); }
  Point4 two_torsion(int i) const;
  Point4 sigma(int i, const Point4& p) const;
  FastKummer hadamard_surface() const;

  Matrix4 biquadratics(const Point4& p, const Point4& q) const;
  BiquadCoeffs biquad_coefficients(const Point4& q) const;
  FormMatrix4 biquadratics_symbolic(const Point4& q) const;
  static FormMatrix4 coefficient_forms(const Field* f, const BiquadCoeffs& c);

  Point4 dbl(const Point4& p) const;
  Point4 diff_add(const Point4& p, const Point4& q, const Point4& pmq) const;
  Point4 scalar_mul(const mpz_class& n, const Point4& p) const;
  bool is_N_torsion(const Point4& p, long n) const;

  // Multiplication-by-N as four forms of degree N^2, modulo the quartic.
  std::array<Form, 4> division_polynomials(int n) const;

  Point4 sample_point(Rng& rng) const;
  Point4 sample_torsion(long n, const mpz_class& cofactor, Rng& rng, int budget = 200) const;

  // The unordered pair {P+Q, P-Q}, from the rank-2 matrix B(P,Q).
  std::pair<Point4, Point4> sum_and_difference(const Point4& p, const Point4& q) const;

  // Weil pairing e_N(R,S) from differential-addition chains on affine lifts,
  // determined up to inversion (the lift of R+S may be either of R+S, R-S).
  Fe pairing(long n, const Point4& r, const Point4& s) const;

  // Order-N points R, S with trivial pairing and S outside <R>.
  std::pair<Point4, Point4> sample_kernel(long n, const mpz_class& cofactor, Rng& rng, int budget = 400) const;

 private:
  Point4 diag_biquad(const Point4& p, const Point4& q) const;
  Point4 diff_add_general(const Point4& p, const Point4& q, const Point4& pmq) const;
  Point4 affine_diff_add(const Point4& p, const Point4& q, const Point4& pmq) const;

  FieldPtr field_;
  Point4 theta_;
  Point4 g_;
  Fe e_, f_, gg_, h_;
  std::array<Fe, 4> goff_;
  // precomputed constants
  Point4 inv4g_;        // 1/(4 g_k)
  Point4 inv_theta_;    // 1/a, 1/b, 1/c, 1/d
  std::array<Fe, 4> alpha_, beta_;  // theta_0 theta_s, complementary product
  std::array<Fe, 4> ka_, kb_;       // 4 alpha/g, 4 beta/g
  std::array<Fe, 4> ks_, kd_;       // Karatsuba constants for numeric evaluation
  Form quartic_;
};

}  // namespace kummer
