#include "kummer/poly1.hpp"

namespace kummer {

void poly_trim(Poly1& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

Poly1 poly_mul(const Poly1& a, const Poly1& b) {
  if (a.empty() || b.empty()) return {};
  Poly1 r(a.size() + b.size() - 1, a[0].field()->zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_trim(r);
  return r;
}

Poly1 poly_sub(const Poly1& a, const Poly1& b) {
  const Field* f = a.empty() ? b[0].field() : a[0].field();
  Poly1 r(std::max(a.size(), b.size()), f->zero());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  poly_trim(r);
  return r;
}

Poly1 poly_mod(const Poly1& a, const Poly1& b, Poly1* q) {
  if (b.empty()) fail(ErrorKind::DivisionByZero, "polynomial division by zero");
  Poly1 r = a;
  poly_trim(r);
  const Field* f = b[0].field();
  Fe lead_inv = b.back().inv();
  std::size_t db = b.size() - 1;
  Poly1 quot;
  if (r.size() > db) quot.assign(r.size() - db, f->zero());
  while (r.size() > db) {
    std::size_t shift = r.size() - 1 - db;
    Fe c = r.back() * lead_inv;
    quot[shift] = c;
    for (std::size_t i = 0; i <= db; ++i) r[shift + i] -= c * b[i];
    r.pop_back();
    poly_trim(r);
  }
  if (q) {
    poly_trim(quot);
    *q = quot;
  }
  return r;
}

Poly1 poly_gcd(Poly1 a, Poly1 b) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly1 r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.empty()) return a;
  Fe s = a.back().inv();
  for (auto& x : a) x *= s;
  return a;
}

Fe poly_eval(const Poly1& a, const Fe& x) {
  Fe r = x.field()->zero();
  for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
  return r;
}

Poly1 poly_derivative(const Poly1& a) {
  Poly1 r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i].mul_int(long(i)));
  poly_trim(r);
  return r;
}

Poly1 poly_powmod(const Poly1& base, const mpz_class& e, const Poly1& m) {
  const Field* f = m[0].field();
  Poly1 r{f->one()};
  Poly1 b = poly_mod(base, m);
  std::size_t nb = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t k = nb; k-- > 0;) {
    r = poly_mod(poly_mul(r, r), m);
    if (mpz_tstbit(e.get_mpz_t(), k)) r = poly_mod(poly_mul(r, b), m);
  }
  return r;
}

namespace {

// Cantor-Zassenhaus splitting of a product of distinct degree-d factors.
void split_degree(const Poly1& g, int d, Rng& rng, std::vector<Poly1>& out) {
  const Field* f = g[0].field();
  std::size_t deg = g.size() - 1;
  if (deg == std::size_t(d)) {
    out.push_back(g);
    return;
  }
  mpz_class qd;
  mpz_pow_ui(qd.get_mpz_t(), f->order().get_mpz_t(), d);
  mpz_class e = (qd - 1) / 2;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Poly1 a;
    for (std::size_t i = 0; i < deg; ++i) a.push_back(f->random(rng));
    poly_trim(a);
    if (a.size() < 2) continue;
    Poly1 h = poly_sub(poly_powmod(a, e, g), {f->one()});
    Poly1 c = poly_gcd(g, h);
    if (c.size() > 1 && c.size() < g.size()) {
      Poly1 q;
      poly_mod(g, c, &q);
      Fe s = q.back().inv();
      for (auto& x : q) x *= s;
      split_degree(c, d, rng, out);
      split_degree(q, d, rng, out);
      return;
    }
  }
  fail(ErrorKind::Sampling, "polynomial splitting did not converge");
}

// Roots of a product of distinct linear factors.
void split(const Poly1& g, Rng& rng, std::vector<Fe>& out) {
  const Field* f = g[0].field();
  std::size_t d = g.size() - 1;
  if (d == 0) return;
  if (d == 1) {
    out.push_back(-g[0] / g[1]);
    return;
  }
  mpz_class e = (f->order() - 1) / 2;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Poly1 lin{f->random(rng), f->one()};
    Poly1 h = poly_powmod(lin, e, g);
    h = poly_sub(h, {f->one()});
    Poly1 c = poly_gcd(g, h);
    if (c.size() > 1 && c.size() < g.size()) {
      Poly1 q;
      poly_mod(g, c, &q);
      split(c, rng, out);
      split(q, rng, out);
      return;
    }
  }
  fail(ErrorKind::Sampling, "root splitting did not converge");
}

}  // namespace

std::vector<Fe> poly_roots(Poly1 f, Rng& rng) {
  poly_trim(f);
  if (f.size() < 2) return {};
  const Field* K = f[0].field();
  Poly1 x{K->zero(), K->one()};
  Poly1 xq = poly_powmod(x, K->order(), f);
  Poly1 g = poly_gcd(f, poly_sub(xq, x));
  std::vector<Fe> out;
  if (g.size() > 1) split(g, rng, out);
  return out;
}

std::vector<Poly1> equal_degree_factors(const Poly1& f, int d, Rng& rng) {
  Poly1 g = f;
  poly_trim(g);
  if (g.size() < 2) return {};
  Fe s = g.back().inv();
  for (auto& x : g) x *= s;
  if ((g.size() - 1) % std::size_t(d) != 0) fail(ErrorKind::Contract, "degree is not a multiple of the factor degree");
  std::vector<Poly1> out;
  split_degree(g, d, rng, out);
  return out;
}

}  // namespace kummer
