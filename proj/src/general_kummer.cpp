#include "kummer/general_kummer.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

namespace kummer {

namespace {

Mono mono3(int e1, int e2, int e3, int e4 = 0) { return {e1, e2, e3, e4}; }

Poly1 poly_of(const std::array<Fe, 3>& h) {
  Poly1 p{h[0], h[1], h[2]};
  poly_trim(p);
  return p;
}

Fe int_to_fe(const Field* k, long long v) { return k->from_mpz(mpz_class(std::to_string(v))); }

}  // namespace

// ---- curves ----

Genus2Curve Genus2Curve::from_ints(const Field* k, const std::array<long, 7>& c) {
  Genus2Curve r;
  for (int i = 0; i < 7; ++i) r.f[i] = k->from_int(c[i]);
  return r;
}

Genus2Curve Genus2Curve::from_poly(const Poly1& p) {
  if (p.empty()) fail(ErrorKind::Degenerate, "zero polynomial is not a curve");
  if (p.size() > 7) fail(ErrorKind::Contract, "curve polynomial has degree above 6");
  const Field* k = p[0].field();
  Genus2Curve r;
  for (int i = 0; i < 7; ++i) r.f[i] = std::size_t(i) < p.size() ? p[i] : k->zero();
  return r;
}

Poly1 Genus2Curve::poly() const {
  Poly1 p(f.begin(), f.end());
  poly_trim(p);
  return p;
}

Fe resultant(const Poly1& a, int m, const Poly1& b, int n) {
  const Field* k = a.empty() ? b[0].field() : a[0].field();
  auto coef = [&](const Poly1& p, int i) { return std::size_t(i) < p.size() ? p[i] : k->zero(); };
  std::size_t sz = std::size_t(m + n);
  if (sz == 0) return k->one();
  Matrix s(k, sz, sz);
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) s(r, r + i) = coef(a, m - i);
  for (int r = 0; r < m; ++r)
    for (int i = 0; i <= n; ++i) s(n + r, r + i) = coef(b, n - i);
  return determinant(s);
}

Fe Genus2Curve::discriminant() const {
  const Field* k = field();
  Poly1 p = poly();
  int deg = int(p.size()) - 1;
  if (deg < 5) return k->zero();
  Poly1 dp = poly_derivative(p);
  Fe r = resultant(p, deg, dp, deg - 1) / p.back();
  // a root at infinity contributes the square of the leading coefficient
  if (deg == 5) r *= p.back().sq();
  return r;
}

// ---- the surface ----

GeneralKummer::GeneralKummer(const Genus2Curve& c) : curve_(c) {
  CountPause pause;
  const Field* k = field();
  for (const auto& x : c.f)
    if (x.field() != k) fail(ErrorKind::Contract, "curve coefficients over different fields");
  if (c.discriminant().is_zero()) fail(ErrorKind::Degenerate, "singular curve: the sextic has a repeated root");
  const auto& f = c.f;
  auto two = [&](const Fe& x) { return x.dbl(); };
  auto four = [&](const Fe& x) { return x.mul_int(4); };

  f1_ = Form(k, 2);
  f1_.add_term(mono3(0, 2, 0), k->one());
  f1_.add_term(mono3(1, 0, 1), k->from_int(-4));

  // -2 (2 k1^3 f0 + k1^2 k2 f1 + 2 k1^2 k3 f2 + k1 k2 k3 f3 + 2 k1 k3^2 f4 + k2 k3^2 f5 + 2 k3^3 f6)
  f2_ = Form(k, 3);
  f2_.add_term(mono3(3, 0, 0), -four(f[0]));
  f2_.add_term(mono3(2, 1, 0), -two(f[1]));
  f2_.add_term(mono3(2, 0, 1), -four(f[2]));
  f2_.add_term(mono3(1, 1, 1), -two(f[3]));
  f2_.add_term(mono3(1, 0, 2), -four(f[4]));
  f2_.add_term(mono3(0, 1, 2), -two(f[5]));
  f2_.add_term(mono3(0, 0, 3), -four(f[6]));

  f3_ = Form(k, 4);
  struct T3 {
    int e1, e2, e3, c, i, j;
  };
  static const T3 terms[] = {
      {4, 0, 0, -4, 0, 2}, {4, 0, 0, 1, 1, 1},  {3, 1, 0, -4, 0, 3}, {3, 0, 1, -2, 1, 3}, {2, 2, 0, -4, 0, 4},
      {2, 1, 1, 4, 0, 5},  {2, 1, 1, -4, 1, 4}, {2, 0, 2, -4, 0, 6}, {2, 0, 2, 2, 1, 5},  {2, 0, 2, -4, 2, 4},
      {2, 0, 2, 1, 3, 3},  {1, 3, 0, -4, 0, 5}, {1, 2, 1, 8, 0, 6},  {0, 4, 0, -4, 0, 6}, {1, 2, 1, -4, 1, 5},
      {1, 1, 2, 4, 1, 6},  {1, 1, 2, -4, 2, 5}, {1, 0, 3, -2, 3, 5}, {0, 3, 1, -4, 1, 6}, {0, 2, 2, -4, 2, 6},
      {0, 1, 3, -4, 3, 6}, {0, 0, 4, -4, 4, 6}, {0, 0, 4, 1, 5, 5},
  };
  for (const auto& t : terms) f3_.add_term(mono3(t.e1, t.e2, t.e3), (f[t.i] * f[t.j]).mul_int(t.c));

  Form k4 = Form::variable(k, 3);
  quartic_ = f1_ * k4 * k4 + f2_ * k4 + f3_;
}

Point4 GeneralKummer::identity() const {
  const Field* k = field();
  return {k->zero(), k->zero(), k->zero(), k->one()};
}

bool GeneralKummer::on_surface(const Point4& p) const {
  CountPause pause;
  return quartic_.eval(p).is_zero();
}

Point4 GeneralKummer::sample_point(Rng& rng) const {
  CountPause pause;
  const Field* k = field();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Point4 p{k->random(rng), k->random(rng), k->random(rng), k->zero()};
    Fe a = f1_.eval(p), b = f2_.eval(p), c = f3_.eval(p);
    if (a.is_zero()) continue;
    auto r = (b.sq() - (a * c).mul_int(4)).sqrt();
    if (!r) continue;
    Fe sign = (rng() & 1) ? k->one() : -k->one();
    p[3] = (-b + sign * *r) / a.dbl();
    if (!on_surface(p)) fail(ErrorKind::Internal, "sampled point is not on the General Kummer");
    return p;
  }
  fail(ErrorKind::Sampling, "no General Kummer point found");
}

std::vector<QuadraticFactorization> GeneralKummer::two_torsion(Rng& rng) const {
  CountPause pause;
  const Field* k = field();
  Poly1 f = curve_.poly();
  int deg = int(f.size()) - 1;
  std::vector<Poly1> quads;  // g as polynomials, formal degree 2
  auto roots = poly_roots(f, rng);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      quads.push_back({roots[i] * roots[j], -(roots[i] + roots[j]), k->one()});
    if (deg == 5) quads.push_back({-roots[i], k->one()});  // paired with infinity
  }
  // irreducible quadratic factors
  Poly1 x{k->zero(), k->one()};
  Poly1 g1 = poly_gcd(f, poly_sub(poly_powmod(x, k->order(), f), x));
  mpz_class q2 = k->order() * k->order();
  Poly1 g2 = poly_gcd(f, poly_sub(poly_powmod(x, q2, f), x));
  Poly1 quad;
  poly_mod(g2, g1, &quad);
  if (quad.size() > 1)
    for (auto& h : equal_degree_factors(quad, 2, rng)) quads.push_back(h);

  std::vector<QuadraticFactorization> out;
  for (const auto& g : quads) {
    Poly1 h;
    Poly1 rem = poly_mod(f, g, &h);
    if (!rem.empty()) fail(ErrorKind::Internal, "quadratic factor does not divide the curve");
    QuadraticFactorization qf;
    for (int i = 0; i < 3; ++i) qf.g[i] = std::size_t(i) < g.size() ? g[i] : k->zero();
    for (int i = 0; i < 5; ++i) qf.h[i] = std::size_t(i) < h.size() ? h[i] : k->zero();
    out.push_back(qf);
  }
  return out;
}

Point4 divisor_to_kummer(const Genus2Curve& c, const Fe& x1, const Fe& y1, const Fe& x2, const Fe& y2) {
  const Field* k = c.field();
  if (x1 == x2) fail(ErrorKind::Contract, "unsupported divisor: x1 = x2");
  const auto& f = c.f;
  Fe s = x1 + x2, p = x1 * x2;
  Fe f0 = f[0].dbl() + f[1] * s + f[2].dbl() * p + f[3] * p * s + f[4].dbl() * p.sq() + f[5] * p.sq() * s +
          f[6].dbl() * p.sq() * p;
  Fe k4 = (f0 - (y1 * y2).dbl()) / (x1 - x2).sq();
  return {k->one(), s, p, k4};
}

Matrix two_torsion_matrix(const QuadraticFactorization& q) {
  const auto& [g0, g1, g2] = q.g;
  const auto& [h0, h1, h2, h3, h4] = q.h;
  const Field* k = g0.field();
  Matrix w(k, 4, 4);
  w(0, 0) = g2 * g2 * h0 + g0 * g2 * h2 - g0 * g0 * h4;
  w(0, 1) = g0 * g2 * h3 - g0 * g1 * h4;
  w(0, 2) = g1 * g2 * h3 - g1 * g1 * h4 + (g0 * g2 * h4).dbl();
  w(0, 3) = g2;
  w(1, 0) = -(g0 * g2 * h1) - g0 * g1 * h2 + g0 * g0 * h3;
  w(1, 1) = g2 * g2 * h0 - g0 * g2 * h2 + g0 * g0 * h4;
  w(1, 2) = g2 * g2 * h1 - g1 * g2 * h2 - g0 * g2 * h3;
  w(1, 3) = -g1;
  w(2, 0) = -(g1 * g1 * h0) + (g0 * g2 * h0).dbl() + g0 * g1 * h1;
  w(2, 1) = -(g1 * g2 * h0) + g0 * g2 * h1;
  w(2, 2) = -(g2 * g2 * h0) + g0 * g2 * h2 + g0 * g0 * h4;
  w(2, 3) = g0;
  w(3, 0) = -(g1 * g2 * g2 * h0 * h1) + g1 * g1 * g2 * h0 * h2 + g0 * g2 * g2 * h1 * h1 -
            (g0 * g2 * g2 * h0 * h2).mul_int(4) - g0 * g1 * g2 * h1 * h2 + g0 * g1 * g2 * h0 * h3 -
            g0 * g0 * g2 * h1 * h3;
  w(3, 1) = g1 * g1 * g2 * h0 * h3 - g1 * g1 * g1 * h0 * h4 - (g0 * g2 * g2 * h0 * h3).dbl() -
            g0 * g1 * g2 * h1 * h3 + (g0 * g1 * g2 * h0 * h4).mul_int(4) + g0 * g1 * g1 * h1 * h4 -
            (g0 * g0 * g2 * h1 * h4).dbl();
  w(3, 2) = -(g0 * g2 * g2 * h1 * h3) - g0 * g1 * g2 * h2 * h3 + g0 * g1 * g2 * h1 * h4 + g0 * g1 * g1 * h2 * h4 +
            g0 * g0 * g2 * h3 * h3 - (g0 * g0 * g2 * h2 * h4).mul_int(4) - g0 * g0 * g1 * h3 * h4;
  w(3, 3) = -(g2 * g2 * h0) - g0 * g2 * h2 - g0 * g0 * h4;
  return w;
}

Point4 two_torsion_point(const QuadraticFactorization& q) {
  Matrix w = two_torsion_matrix(q);
  return {w(0, 3), w(1, 3), w(2, 3), w(3, 3)};
}

Twist quadratic_twist(const GeneralKummer& s, const Fe& c) {
  if (c.is_zero()) fail(ErrorKind::Contract, "quadratic twist by zero");
  Genus2Curve t = s.curve();
  for (auto& x : t.f) x *= c;
  return Twist{GeneralKummer(t), c};
}

Genus2Curve richelot_codomain(const std::array<Fe, 3>& h1, const std::array<Fe, 3>& h2, const std::array<Fe, 3>& h3) {
  const Field* k = h1[0].field();
  Matrix m(k, 3, 3);
  const std::array<Fe, 3>* hs[3] = {&h1, &h2, &h3};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) m(j, i) = (*hs[j])[2 - i];
  Fe delta = determinant(m);
  if (delta.is_zero()) fail(ErrorKind::Degenerate, "degenerate Richelot isogeny: det(h_ij) = 0");
  Poly1 p1 = poly_of(h1), p2 = poly_of(h2), p3 = poly_of(h3);
  auto wr = [](const Poly1& a, const Poly1& b) {  // a' b - a b'
    return poly_sub(poly_mul(poly_derivative(a), b), poly_mul(a, poly_derivative(b)));
  };
  Poly1 r = poly_mul(poly_mul(wr(p2, p3), wr(p3, p1)), wr(p1, p2));
  for (auto& x : r) x *= delta;
  return Genus2Curve::from_poly(r);
}

// ---- squared and fast models ----

namespace {

struct Dual {
  Fe a2, b2, c2, d2, A, B, C, D;
};

Dual dual_of(const Point4& t) {
  Dual d;
  d.a2 = t[0].sq();
  d.b2 = t[1].sq();
  d.c2 = t[2].sq();
  d.d2 = t[3].sq();
  Point4 h = hadamard({d.a2, d.b2, d.c2, d.d2});
  d.A = h[0];
  d.B = h[1];
  d.C = h[2];
  d.D = h[3];
  return d;
}

Genus2Curve monic_with_roots(const Field* k, const std::vector<Fe>& roots) {
  Poly1 p{k->one()};
  for (const auto& r : roots) p = poly_mul(p, {-r, k->one()});
  return Genus2Curve::from_poly(p);
}

}  // namespace

std::optional<RosenhainParams> rosenhain_params(const Point4& theta) {
  Dual d = dual_of(theta);
  if (d.A.is_zero() || d.B.is_zero() || d.b2.is_zero() || d.d2.is_zero())
    fail(ErrorKind::Degenerate, "degenerate theta constants for the Rosenhain curve");
  auto g = (d.C * d.D / (d.A * d.B)).sqrt();
  if (!g) return std::nullopt;
  const Field* k = theta[0].field();
  Fe one = k->one();
  if ((one - *g).is_zero()) fail(ErrorKind::Degenerate, "gamma = 1");
  RosenhainParams r;
  r.gamma = *g;
  r.lambda = d.a2 * d.c2 / (d.b2 * d.d2);
  Fe q = (one + *g) / (one - *g);
  r.mu = d.c2 * q / d.d2;
  r.nu = d.a2 * q / d.b2;
  return r;
}

std::optional<Genus2Curve> rosenhain_curve(const Point4& theta) {
  auto r = rosenhain_params(theta);
  if (!r) return std::nullopt;
  const Field* k = theta[0].field();
  return monic_with_roots(k, {k->zero(), k->one(), r->lambda, r->mu, r->nu});
}

std::array<Fe, 3> rho_sigma_tau(const Point4& theta) {
  const auto& [a, b, c, d] = theta;
  Dual q = dual_of(theta);
  Fe n1 = a * c - b * d, n2 = a * c + b * d;
  if (q.A.is_zero() || q.B.is_zero() || n1.is_zero()) fail(ErrorKind::Degenerate, "degenerate theta constants for curve D");
  Fe rho = q.C * q.D / (q.A * q.B);
  Fe sigma = n2 * q.C / (n1 * q.A);
  Fe tau = n2 * q.D / (n1 * q.B);
  return {rho, sigma, tau};
}

Genus2Curve curve_D(const Point4& theta) {
  const Field* k = theta[0].field();
  auto [rho, sigma, tau] = rho_sigma_tau(theta);
  std::vector<Fe> roots{k->zero(), k->one(), rho, sigma, tau};
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (roots[i] == roots[j]) fail(ErrorKind::Degenerate, "curve D has a repeated root");
  return monic_with_roots(k, roots);
}

Matrix matrix_M(const Point4& theta) {
  auto r = rosenhain_params(theta);
  if (!r) fail(ErrorKind::Degenerate, "CD/(AB) is not a square: the Rosenhain curve is not rational");
  Dual d = dual_of(theta);
  const Field* k = theta[0].field();
  Fe one = k->one();
  const Fe &l = r->lambda, &m = r->mu, &n = r->nu;
  Matrix M(k, 4, 4);
  M(0, 0) = d.a2 * m * (l + n);
  M(0, 1) = -(d.a2 * m);
  M(0, 2) = d.a2 * (m + one);
  M(0, 3) = -d.a2;
  M(1, 0) = d.b2 * l * n * (one + m);
  M(1, 1) = -(d.b2 * l * n);
  M(1, 2) = d.b2 * (l + n);
  M(1, 3) = -d.b2;
  M(2, 0) = d.c2 * n * (l + m);
  M(2, 1) = -(d.c2 * n);
  M(2, 2) = d.c2 * (n + one);
  M(2, 3) = -d.c2;
  M(3, 0) = d.d2 * l * m * (one + n);
  M(3, 1) = -(d.d2 * l * m);
  M(3, 2) = d.d2 * (l + m);
  M(3, 3) = -d.d2;
  if (determinant(M).is_zero()) fail(ErrorKind::Degenerate, "matrix M is singular");
  return M;
}

Matrix matrix_P(const Point4& theta) {
  const auto& [a, b, c, d] = theta;
  Dual q = dual_of(theta);
  const Field* k = a.field();
  Fe a4 = q.a2.sq(), b4 = q.b2.sq(), c4 = q.c2.sq(), d4 = q.d2.sq();
  Fe m1 = q.c2 * (a4 + b4 - c4 + d4) - (q.a2 * q.b2 * q.d2).dbl();
  Fe m2 = q.d2 * (a4 + b4 + c4 - d4) - (q.a2 * q.b2 * q.c2).dbl();
  Fe m3 = q.a2 * (a4 - b4 - c4 - d4) + (q.b2 * q.c2 * q.d2).dbl();
  Fe m4 = q.b2 * (a4 - b4 + c4 + d4) - (q.a2 * q.c2 * q.d2).dbl();
  Fe n1 = a * c - b * d, n2 = a * c + b * d;
  Fe ab = q.A * q.B, cd = q.C * q.D;
  Fe r0 = n1.sq() * ab.sq();
  Fe r1 = (n1 * ab).dbl();
  Fe r2 = n1 * n2 * ab * cd;
  Fe r3 = (n2 * cd).dbl();
  Matrix P(k, 4, 4);
  P(0, 0) = c * r0;
  P(0, 1) = -(d * r0);
  P(0, 2) = -(a * r0);
  P(0, 3) = b * r0;
  P(1, 0) = a * r1 * m1;
  P(1, 1) = b * r1 * m2;
  P(1, 2) = -(c * r1 * m3);
  P(1, 3) = d * r1 * m4;
  P(2, 0) = c * r2;
  P(2, 1) = d * r2;
  P(2, 2) = -(a * r2);
  P(2, 3) = -(b * r2);
  P(3, 0) = a * r3 * m1;
  P(3, 1) = -(b * r3 * m2);
  P(3, 2) = -(c * r3 * m3);
  P(3, 3) = -(d * r3 * m4);
  if (determinant(P).is_zero()) fail(ErrorKind::Degenerate, "matrix P is singular");
  return P;
}

Form substitute_linear(const Form& f, const Matrix& p) {
  const Field* k = f.field();
  std::array<Form, 4> lin;
  for (int i = 0; i < 4; ++i) {
    lin[i] = Form(k, 1);
    for (int j = 0; j < 4; ++j)
      if (!p(i, j).is_zero()) {
        Mono e{0, 0, 0, 0};
        e[j] = 1;
        lin[i].add_term(e, p(i, j));
      }
  }
  std::array<std::vector<Form>, 4> pw;
  for (int i = 0; i < 4; ++i) pw[i].push_back(Form::constant(k, k->one()));
  auto power = [&](int i, int e) -> const Form& {
    while (int(pw[i].size()) <= e) pw[i].push_back(pw[i].back() * lin[i]);
    return pw[i][e];
  };
  Form r(k, f.degree());
  for (const auto& [key, c] : f.terms()) {
    Mono e = mono_of(key);
    Form t = Form::constant(k, c);
    for (int i = 0; i < 4; ++i)
      if (e[i] > 0) t = t * power(i, e[i]);
    r += t;
  }
  return r;
}

bool verify_fast_map(const Point4& theta, const Matrix& p) {
  const Field* k = theta[0].field();
  // non-owning handle: the field outlives this call
  FastKummer fast(FieldPtr(FieldPtr{}, k), theta);
  GeneralKummer gen(curve_D(theta));
  Form sub = substitute_linear(gen.quartic(), p);
  const Form& target = fast.quartic();
  Fe s = sub.coeff({4, 0, 0, 0});
  if (s.is_zero()) return false;
  return sub == target.scaled(s);
}

bool verify_fast_map(const Point4& theta) { return verify_fast_map(theta, matrix_P(theta)); }

SparseModel sparse_model_from_factored_curve(const std::array<Fe, 3>& h1, const std::array<Fe, 3>& h2,
                                             const std::array<Fe, 3>& h3, std::optional<std::array<Fe, 2>> eig1,
                                             std::optional<std::array<Fe, 2>> eig2) {
  const Field* k = h1[0].field();
  Poly1 p1 = poly_of(h1), p2 = poly_of(h2), p3 = poly_of(h3);
  Genus2Curve curve = Genus2Curve::from_poly(poly_mul(poly_mul(p1, p2), p3));
  GeneralKummer gen(curve);
  auto factor = [&](const std::array<Fe, 3>& g, const Poly1& h) {
    QuadraticFactorization q;
    q.g = g;
    for (int i = 0; i < 5; ++i) q.h[i] = std::size_t(i) < h.size() ? h[i] : k->zero();
    return q;
  };
  Poly1 h23 = poly_mul(p2, p3), h13 = poly_mul(p1, p3);
  Matrix w1 = two_torsion_matrix(factor(h1, h23));
  Matrix w2 = two_torsion_matrix(factor(h2, h13));
  Fe r1 = resultant(p1, 2, h23, 4), r2 = resultant(p2, 2, h13, 4);
  auto s1 = r1.sqrt(), s2 = r2.sqrt();
  if (!s1 || !s2) fail(ErrorKind::Structure, "resultants are not squares: the translations are not diagonalisable over the field");
  SparseModel out;
  out.eig1 = eig1 ? *eig1 : std::array<Fe, 2>{*s1, -*s1};
  out.eig2 = eig2 ? *eig2 : std::array<Fe, 2>{*s2, -*s2};
  for (const auto& e : out.eig1)
    if (e.sq() != r1) fail(ErrorKind::Contract, "eigenvalue does not square to the resultant");
  for (const auto& e : out.eig2)
    if (e.sq() != r2) fail(ErrorKind::Contract, "eigenvalue does not square to the resultant");
  Matrix P = simultaneous_diagonalizer(w1, w2, {out.eig1[0], out.eig1[1]}, {out.eig2[0], out.eig2[1]});
  Matrix Q = inverse(P);
  for (std::size_t i = 0; i < 4; ++i) {
    Fe s;
    for (std::size_t j = 0; j < 4; ++j)
      if (!Q(i, j).is_zero()) {
        s = Q(i, j).inv();
        break;
      }
    for (std::size_t j = 0; j < 4; ++j) Q(i, j) = Q(i, j) * s;
  }
  out.Pinv = Q;
  out.P = inverse(Q);
  out.quartic = substitute_linear(gen.quartic(), out.P);
  for (const auto& [key, c] : out.quartic.terms())
    if (form_class(Form::monomial(k, mono_of(key), c)) != 1 || mono_of(key)[0] % 2 != mono_of(key)[1] % 2)
      fail(ErrorKind::Internal, "diagonalised quartic is not sparse");
  return out;
}

// ---- power series ----

std::array<BivariateSeries, 4> power_series_coordinates(const Genus2Curve& c, int trunc) {
  if (trunc > 8) fail(ErrorKind::Precision, "power series are known only below total degree 8");
  if (trunc < 1) fail(ErrorKind::Contract, "truncation degree must be positive");
  const Field* k = c.field();
  // coefficient * f_i * f_j * s1^d1 s2^d2, with -1 for an absent factor
  struct Term {
    int coef, i, j, d1, d2;
  };
  static const std::vector<Term> k1 = {
      {1, -1, -1, 0, 2}, {-1, 2, -1, 0, 4}, {-1, 6, -1, 4, 0}, {4, 0, 4, 0, 6},  {8, 0, 5, 1, 5},
      {18, 0, 6, 2, 4},  {-1, 1, 3, 0, 6},  {1, 1, 5, 2, 4},   {4, 1, 6, 3, 3},  {2, 2, 2, 0, 6},
      {2, 2, 6, 4, 2},   {2, 4, 6, 6, 0},
  };
  static const std::vector<Term> k2 = {
      {2, -1, -1, 1, 1}, {1, 1, -1, 0, 4}, {1, 3, -1, 2, 2}, {1, 5, -1, 4, 0}, {1, 0, 3, 0, 6},  {8, 0, 4, 1, 5},
      {16, 0, 5, 2, 4},  {40, 0, 6, 3, 3}, {-2, 1, 2, 0, 6}, {2, 1, 4, 2, 4},  {6, 1, 5, 3, 3},  {16, 1, 6, 4, 2},
      {-1, 2, 3, 2, 4},  {2, 2, 5, 4, 2},  {8, 2, 6, 5, 1},  {-1, 3, 4, 4, 2}, {1, 3, 6, 6, 0},  {-2, 4, 5, 6, 0},
  };
  static const std::vector<Term> k3 = {
      {1, -1, -1, 2, 0}, {-1, 0, -1, 0, 4}, {-1, 4, -1, 4, 0}, {2, 0, 2, 0, 6}, {2, 0, 4, 2, 4},
      {4, 0, 5, 3, 3},   {18, 0, 6, 4, 2},  {1, 1, 5, 4, 2},   {8, 1, 6, 5, 1}, {4, 2, 6, 6, 0},
      {-1, 3, 5, 6, 0},  {2, 4, 4, 6, 0},
  };
  auto build = [&](const std::vector<Term>& ts) {
    BivariateSeries s(k, trunc);
    for (const auto& t : ts) {
      if (t.d1 + t.d2 >= trunc) continue;
      Fe v = k->from_int(t.coef);
      if (t.i >= 0) v *= c.f[t.i];
      if (t.j >= 0) v *= c.f[t.j];
      s.add(t.d1, t.d2, v);
    }
    return s;
  };
  return {build(k1), build(k2), build(k3), BivariateSeries::constant(k, trunc, k->one())};
}

// ---- biquadratic forms ----

std::string BiquadraticTable::default_path() { return std::string(KUMMER_DATA_DIR) + "/general_biquadratics.json"; }

int BiquadraticTable::index(int i, int j) {
  if (i > j) std::swap(i, j);
  static const int base[4] = {0, 4, 7, 9};
  return base[i] + (j - i);
}

BiquadraticTable BiquadraticTable::load(const Genus2Curve& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot open biquadratic table " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorKind::Usage, std::string("malformed biquadratic table: ") + e.what());
  }
  const Field* k = c.field();
  BiquadraticTable t;
  t.f_ = k;
  long long scale = j.value("scale", 1LL);
  if (scale == 0) fail(ErrorKind::Usage, "biquadratic table has zero scale");
  Fe inv_scale = int_to_fe(k, scale).inv();
  // powers f_i^e
  std::array<std::vector<Fe>, 7> pw;
  for (int i = 0; i < 7; ++i) pw[i].push_back(k->one());
  auto fpow = [&](int i, int e) {
    while (int(pw[i].size()) <= e) pw[i].push_back(pw[i].back() * c.f[i]);
    return pw[i][e];
  };
  const auto& forms = j.at("forms");
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      std::string key = "B" + std::to_string(a + 1) + std::to_string(b + 1);
      if (!forms.contains(key)) fail(ErrorKind::Usage, "biquadratic table lacks " + key);
      auto& dst = t.b_[index(a, b)];
      std::map<std::pair<std::uint32_t, std::uint32_t>, Fe> acc;
      for (const auto& term : forms.at(key)) {
        auto ep = term.at("exp_p").get<std::array<int, 4>>();
        auto eq = term.at("exp_q").get<std::array<int, 4>>();
        Fe v = k->zero();
        for (const auto& cm : term.at("coeff")) {
          auto ex = cm.at("exponents").get<std::array<int, 7>>();
          Fe m = int_to_fe(k, cm.at("integer").get<long long>());
          for (int i = 0; i < 7; ++i)
            if (ex[i] > 0) m *= fpow(i, ex[i]);
          v += m;
        }
        auto kk = std::make_pair(mono_key(ep), mono_key(eq));
        auto it = acc.find(kk);
        if (it == acc.end())
          acc.emplace(kk, v);
        else
          it->second += v;
      }
      for (const auto& [kk, v] : acc)
        if (!v.is_zero()) dst.push_back({mono_of(kk.first), mono_of(kk.second), v * inv_scale});
    }
  return t;
}

Matrix4 BiquadraticTable::eval(const Point4& p, const Point4& q) const {
  CountPause pause;
  // all degree-2 monomial values
  auto quad = [](const Point4& x) {
    std::array<std::array<Fe, 4>, 4> m;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) m[i][j] = m[j][i] = x[i] * x[j];
    return m;
  };
  auto mp = quad(p), mq = quad(q);
  auto val = [](const std::array<std::array<Fe, 4>, 4>& m, const Mono& e) {
    int idx[2], n = 0;
    for (int i = 0; i < 4; ++i)
      for (int r = 0; r < e[i]; ++r) idx[n++] = i;
    return m[idx[0]][idx[1]];
  };
  Matrix4 r;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      Fe s = f_->zero();
      for (const auto& t : b_[index(a, b)]) s += t.c * val(mp, t.ep) * val(mq, t.eq);
      r[a][b] = r[b][a] = s;
    }
  return r;
}

FormMatrix4 BiquadraticTable::symbolic(const Point4& q) const {
  FormMatrix4 r;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      Form f(f_, 2);
      for (const auto& t : b_[index(a, b)]) {
        Fe v = t.c;
        for (int i = 0; i < 4; ++i)
          for (int e = 0; e < t.eq[i]; ++e) v *= q[i];
        if (!v.is_zero()) f.add_term(t.ep, v);
      }
      r[a][b] = r[b][a] = f;
    }
  return r;
}

Point4 GeneralArithmetic::dbl(const Point4& p) const {
  // B(P,P) = 2P O^T + O (2P)^T with O = (0,0,0,1)
  Matrix4 b = t_.eval(p, p);
  Fe half = s_.field()->from_int(2).inv();
  return {b[0][3], b[1][3], b[2][3], b[3][3] * half};
}

Point4 GeneralArithmetic::diff_add(const Point4& p, const Point4& q, const Point4& pmq) const {
  int j = -1;
  for (int i = 0; i < 4; ++i)
    if (!pmq[i].is_zero()) {
      j = i;
      break;
    }
  if (j < 0) fail(ErrorKind::Degenerate, "differential addition with zero difference");
  Matrix4 m = t_.eval(p, q);
  const Fe& zj = pmq[j];
  Fe xj = m[j][j];
  Fe two_zj = zj.dbl();
  Point4 r;
  for (int i = 0; i < 4; ++i) r[i] = i == j ? xj * zj : m[i][j] * two_zj - pmq[i] * xj;
  bool zero = true;
  for (const auto& x : r) zero = zero && x.is_zero();
  if (zero) fail(ErrorKind::Degenerate, "differential addition produced the zero vector");
  return r;
}

Point4 GeneralArithmetic::scalar_mul(long n, const Point4& p) const {
  if (n < 0) n = -n;
  if (n == 0) return s_.identity();
  if (n == 1) return p;
  Point4 r0 = p, r1 = dbl(p);
  int nb = 0;
  while ((n >> nb) > 1) ++nb;
  for (int k = nb - 1; k >= 0; --k) {
    if ((n >> k) & 1) {
      r0 = diff_add(r1, r0, p);
      r1 = dbl(r1);
    } else {
      r1 = diff_add(r1, r0, p);
      r0 = dbl(r0);
    }
  }
  return r0;
}

namespace {

bool proportional(const Matrix4& m, const Matrix4& want) {
  Fe s, t;
  bool set = false;
  for (int i = 0; i < 4 && !set; ++i)
    for (int j = 0; j < 4 && !set; ++j)
      if (!want[i][j].is_zero()) {
        s = m[i][j];
        t = want[i][j];
        set = true;
      }
  if (!set || s.is_zero()) return false;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (m[i][j] * t != want[i][j] * s) return false;
  return true;
}

}  // namespace

bool validate_biquadratics(const BiquadraticTable& t, const GeneralKummer& s, Rng& rng, int samples) {
  CountPause pause;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (t.entry(a, b).size() != t.entry(b, a).size()) return false;
  auto tors = s.two_torsion(rng);
  Point4 o = s.identity();
  for (int n = 0; n < samples; ++n) {
    Point4 p = s.sample_point(rng);
    Matrix4 want;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) want[i][j] = p[i] * p[j];
    if (!proportional(t.eval(p, o), want)) return false;
    for (const auto& q : tors) {
      Matrix w = two_torsion_matrix(q);
      Point4 e = two_torsion_point(q);
      Vec xi = w * Vec(p.begin(), p.end());
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) want[i][j] = xi[i] * xi[j];
      if (!proportional(t.eval(p, e), want)) return false;
    }
  }
  return true;
}

}  // namespace kummer
