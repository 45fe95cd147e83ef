#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kummer/fast_kummer.hpp"
#include "kummer/field.hpp"
#include "kummer/forms.hpp"
#include "kummer/linalg.hpp"
#include "kummer/poly1.hpp"

namespace kummer {

// y^2 = f6 x^6 + ... + f0. A quintic (f6 = 0) has a Weierstrass point at infinity.
struct Genus2Curve {
  std::array<Fe, 7> f;

  static Genus2Curve from_ints(const Field* k, const std::array<long, 7>& c);
  static Genus2Curve from_poly(const Poly1& p);

  const Field* field() const { return f[0].field(); }
  Poly1 poly() const;
  // Discriminant of the binary sextic, up to a nonzero constant.
  Fe discriminant() const;
  bool operator==(const Genus2Curve& o) const { return f == o.f; }
};

// Resultant of polynomials of formal degrees m and n (leading coefficients may vanish).
Fe resultant(const Poly1& a, int m, const Poly1& b, int n);

// Curve = g * h with g quadratic and h quartic, both in formal degree.
struct QuadraticFactorization {
  std::array<Fe, 3> g;  // g0, g1, g2
  std::array<Fe, 5> h;  // h0..h4
};

class GeneralKummer {
 public:
  explicit GeneralKummer(const Genus2Curve& c);

  const Genus2Curve& curve() const { return curve_; }
  const Field* field() const { return curve_.field(); }
  // F1, F2, F3 as forms in k1..k4 not involving k4.
  const Form& F1() const { return f1_; }
  const Form& F2() const { return f2_; }
  const Form& F3() const { return f3_; }
  const Form& quartic() const { return quartic_; }

  Point4 identity() const;
  bool on_surface(const Point4& p) const;
  Point4 sample_point(Rng& rng) const;

  // Rational points of order 2 as factorizations of the sextic.
  std::vector<QuadraticFactorization> two_torsion(Rng& rng) const;

 private:
  Genus2Curve curve_;
  Form f1_, f2_, f3_, quartic_;
};

Point4 divisor_to_kummer(const Genus2Curve& c, const Fe& x1, const Fe& y1, const Fe& x2, const Fe& y2);

// Translation by the 2-torsion point of g, as a 4x4 matrix on (k1,k2,k3,k4).
Matrix two_torsion_matrix(const QuadraticFactorization& q);
// Image of the 2-torsion point of g: W applied to the identity.
Point4 two_torsion_point(const QuadraticFactorization& q);

struct Twist {
  GeneralKummer surface;
  Fe c;
  Point4 map(const Point4& p) const { return {p[0], p[1], p[2], p[3] * c}; }
};
// The surface of c y^2 = F(x), with its point map.
Twist quadratic_twist(const GeneralKummer& s, const Fe& c);

// Codomain of the Richelot isogeny for y^2 = H1 H2 H3 (each h0, h1, h2).
Genus2Curve richelot_codomain(const std::array<Fe, 3>& h1, const std::array<Fe, 3>& h2, const std::array<Fe, 3>& h3);

struct RosenhainParams {
  Fe gamma, lambda, mu, nu;
};
std::optional<RosenhainParams> rosenhain_params(const Point4& theta);
std::optional<Genus2Curve> rosenhain_curve(const Point4& theta);

// y^2 = x (x - 1)(x - rho)(x - sigma)(x - tau).
Genus2Curve curve_D(const Point4& theta);
std::array<Fe, 3> rho_sigma_tau(const Point4& theta);

// General Kummer of the Rosenhain curve to the squared model.
Matrix matrix_M(const Point4& theta);
// Columns are common eigenvectors of the 2-torsion translations on the General Kummer of D.
Matrix matrix_P(const Point4& theta);

// f(P v), where v = (X,Y,Z,T): the variables k_i become sum_j P_ij v_j.
Form substitute_linear(const Form& f, const Matrix& p);

// Whether k = P (X,Y,Z,T) carries the General Kummer of D onto the Fast Kummer of theta.
bool verify_fast_map(const Point4& theta);
bool verify_fast_map(const Point4& theta, const Matrix& p);

struct SparseModel {
  Matrix P;     // k = P (X,Y,Z,T)
  Matrix Pinv;  // (X,Y,Z,T) = Pinv k, each row scaled to lead with 1
  Form quartic;
  std::array<Fe, 2> eig1, eig2;  // eigenvalue order of the two translations
};
// Eigenvalue orders default to (s, -s) for the canonical square root s of each resultant;
// coordinates are ordered (e1[0],e2[0]), (e1[0],e2[1]), (e1[1],e2[0]), (e1[1],e2[1]).
SparseModel sparse_model_from_factored_curve(const std::array<Fe, 3>& h1, const std::array<Fe, 3>& h2,
                                             const std::array<Fe, 3>& h3,
                                             std::optional<std::array<Fe, 2>> eig1 = std::nullopt,
                                             std::optional<std::array<Fe, 2>> eig2 = std::nullopt);

// Local-parameter expansions of (k1,k2,k3,k4), exact below total degree 8.
std::array<BivariateSeries, 4> power_series_coordinates(const Genus2Curve& c, int trunc);

// The ten biquadratic forms B_ij of the General Kummer, specialised to a curve.
class BiquadraticTable {
 public:
  struct Term {
    Mono ep, eq;
    Fe c;
  };

  static BiquadraticTable load(const Genus2Curve& c, const std::string& path = default_path());
  static std::string default_path();

  const std::vector<Term>& entry(int i, int j) const { return b_[index(i, j)]; }
  Matrix4 eval(const Point4& p, const Point4& q) const;
  // B_ij(k, Q) as quadratic forms in k.
  FormMatrix4 symbolic(const Point4& q) const;

 private:
  static int index(int i, int j);
  std::array<std::vector<Term>, 10> b_;
  const Field* f_ = nullptr;
};

// Pseudo-group law on the General Kummer from the biquadratic table.
class GeneralArithmetic {
 public:
  GeneralArithmetic(GeneralKummer s, BiquadraticTable t) : s_(std::move(s)), t_(std::move(t)) {}

  const GeneralKummer& surface() const { return s_; }
  const BiquadraticTable& table() const { return t_; }

  Point4 dbl(const Point4& p) const;
  Point4 diff_add(const Point4& p, const Point4& q, const Point4& pmq) const;
  Point4 scalar_mul(long n, const Point4& p) const;
  bool is_identity(const Point4& p) const { return proj_equal(p, s_.identity()); }

 private:
  GeneralKummer s_;
  BiquadraticTable t_;
};

// B(k(P), k(E)) = 2 (WkP)(WkP)^T projectively for every rational 2-torsion E and sampled P,
// and B(P, O) = P P^T.
bool validate_biquadratics(const BiquadraticTable& t, const GeneralKummer& s, Rng& rng, int samples = 4);

}  // namespace kummer
