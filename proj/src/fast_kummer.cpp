#include "kummer/fast_kummer.hpp"

#include "kummer/poly1.hpp"

namespace kummer {

namespace {

// complementary pair of {1,2,3} minus s
std::pair<int, int> complement(int s) {
  switch (s) {
    case 1: return {2, 3};
    case 2: return {1, 3};
    default: return {1, 2};
  }
}

}  // namespace

bool proj_equal(const Point4& p, const Point4& q) {
  CountPause pause;
  bool pz = true, qz = true;
  for (int i = 0; i < 4; ++i) {
    pz = pz && p[i].is_zero();
    qz = qz && q[i].is_zero();
  }
  if (pz || qz) return pz && qz;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] * q[j] != p[j] * q[i]) return false;
  for (int i = 0; i < 4; ++i)
    if (p[i].is_zero() != q[i].is_zero()) return false;
  return true;
}

Point4 hadamard(const Point4& p) {
  Fe s01 = p[0] + p[1], d01 = p[0] - p[1], s23 = p[2] + p[3], d23 = p[2] - p[3];
  return {s01 + s23, s01 - s23, d01 + d23, d01 - d23};
}

FastKummer::FastKummer(FieldPtr field, const Point4& theta) : field_(std::move(field)), theta_(theta) {
  CountPause pause;
  const Field* K = field_.get();
  const auto& [a, b, c, d] = theta_;
  for (int i = 0; i < 4; ++i)
    if (theta_[i].field() != K) fail(ErrorKind::Contract, "theta constants over a different field");
  static const char* names[4] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i)
    if (theta_[i].is_zero()) fail(ErrorKind::Degenerate, std::string("theta constant ") + names[i] + " = 0");
  Point4 sq{a.sq(), b.sq(), c.sq(), d.sq()};
  g_ = hadamard(sq);
  static const char* gnames[4] = {"A", "B", "C", "D"};
  for (int i = 0; i < 4; ++i)
    if (g_[i].is_zero()) fail(ErrorKind::Degenerate, std::string("dual constant ") + gnames[i] + " = 0");
  const auto& [a2, b2, c2, d2] = sq;
  Fe q1 = a2 * d2 - b2 * c2, q2 = a2 * c2 - b2 * d2, q3 = a2 * b2 - c2 * d2;
  if (q1.is_zero()) fail(ErrorKind::Degenerate, "a^2 d^2 - b^2 c^2 = 0");
  if (q2.is_zero()) fail(ErrorKind::Degenerate, "a^2 c^2 - b^2 d^2 = 0");
  if (q3.is_zero()) fail(ErrorKind::Degenerate, "a^2 b^2 - c^2 d^2 = 0");
  Fe a4 = a2.sq(), b4 = b2.sq(), c4 = c2.sq(), d4 = d2.sq();
  e_ = a * b * c * d * g_[0] * g_[1] * g_[2] * g_[3] / (q1 * q2 * q3);
  f_ = (a4 - b4 - c4 + d4) / q1;
  gg_ = (a4 - b4 + c4 - d4) / q2;
  h_ = (a4 + b4 - c4 - d4) / q3;

  static const char* offnames[4] = {"", "AB - CD", "AC - BD", "AD - BC"};
  for (int s = 1; s <= 3; ++s) {
    auto [s1, s2] = complement(s);
    goff_[s] = g_[0] * g_[s] - g_[s1] * g_[s2];
    if (goff_[s].is_zero()) fail(ErrorKind::Degenerate, std::string("biquadratic denominator ") + offnames[s] + " = 0");
    alpha_[s] = theta_[0] * theta_[s];
    beta_[s] = theta_[s1] * theta_[s2];
  }
  Fe four = K->from_int(4);
  std::vector<Fe> dens{four * g_[0], four * g_[1], four * g_[2], four * g_[3], a, b, c, d, goff_[1], goff_[2], goff_[3]};
  auto inv = batch_invert(dens);
  for (int i = 0; i < 4; ++i) {
    inv4g_[i] = inv[i];
    inv_theta_[i] = inv[4 + i];
  }
  Fe two = K->from_int(2);
  for (int s = 1; s <= 3; ++s) {
    Fe kappa = four * inv[7 + s];
    ka_[s] = kappa * alpha_[s];
    kb_[s] = kappa * beta_[s];
    ks_[s] = (ka_[s] - kb_[s]) / two;
    kd_[s] = (ka_[s] + kb_[s]) / two;
  }

  // X^4 + Y^4 + Z^4 + T^4 - F(X^2T^2 + Y^2Z^2) - G(X^2Z^2 + Y^2T^2) - H(X^2Y^2 + Z^2T^2) + 2E XYZT
  quartic_ = Form(K, 4);
  for (int i = 0; i < 4; ++i) {
    Mono m{0, 0, 0, 0};
    m[i] = 4;
    quartic_.add_term(m, K->one());
  }
  quartic_.add_term({2, 0, 0, 2}, -f_);
  quartic_.add_term({0, 2, 2, 0}, -f_);
  quartic_.add_term({2, 0, 2, 0}, -gg_);
  quartic_.add_term({0, 2, 0, 2}, -gg_);
  quartic_.add_term({2, 2, 0, 0}, -h_);
  quartic_.add_term({0, 0, 2, 2}, -h_);
  quartic_.add_term({1, 1, 1, 1}, two * e_);

  if (!on_surface(theta_)) fail(ErrorKind::Internal, "theta null point is not on its surface");
}

bool FastKummer::on_surface(const Point4& p) const {
  CountPause pause;
  return quartic_.eval(p).is_zero();
}

Point4 FastKummer::two_torsion(int i) const { return sigma_action(i).apply(theta_); }

Point4 FastKummer::sigma(int i, const Point4& p) const { return sigma_action(i).apply(p); }

FastKummer FastKummer::hadamard_surface() const { return FastKummer(field_, hadamard(theta_)); }

// Diagonal entries B_ii(P,Q): 8S + 8M + 24a.
Point4 FastKummer::diag_biquad(const Point4& p, const Point4& q) const {
  Point4 hp = hadamard({p[0].sq(), p[1].sq(), p[2].sq(), p[3].sq()});
  Point4 hq = hadamard({q[0].sq(), q[1].sq(), q[2].sq(), q[3].sq()});
  Point4 w;
  for (int k = 0; k < 4; ++k) w[k] = hp[k] * hq[k] * inv4g_[k];
  return hadamard(w);
}

Matrix4 FastKummer::biquadratics(const Point4& p, const Point4& q) const {
  Matrix4 m;
  Point4 dg = diag_biquad(p, q);
  for (int i = 0; i < 4; ++i) m[i][i] = dg[i];
  for (int s = 1; s <= 3; ++s) {
    auto [s1, s2] = complement(s);
    Fe u = p[0] * p[s], v = p[s1] * p[s2];
    Fe u2 = q[0] * q[s], v2 = q[s1] * q[s2];
    Fe sum = (u + v) * (u2 + v2), dif = (u - v) * (u2 - v2);
    Fe x = ks_[s] * sum, y = kd_[s] * dif;
    Fe first = x + y, second = x - y;
    m[0][s] = m[s][0] = first;
    m[s1][s2] = m[s2][s1] = second;
  }
  return m;
}

// 4S + 22M + 22a: the cost of one R^(l) in the basis computation.
BiquadCoeffs FastKummer::biquad_coefficients(const Point4& q) const {
  BiquadCoeffs c;
  Point4 hq = hadamard({q[0].sq(), q[1].sq(), q[2].sq(), q[3].sq()});
  Point4 w;
  for (int k = 0; k < 4; ++k) w[k] = hq[k] * inv4g_[k];
  c.diag = hadamard(w);
  for (int s = 1; s <= 3; ++s) {
    auto [s1, s2] = complement(s);
    Fe u2 = q[0] * q[s], v2 = q[s1] * q[s2];
    c.cu[s] = ka_[s] * u2 - kb_[s] * v2;
    c.cv[s] = ka_[s] * v2 - kb_[s] * u2;
  }
  return c;
}

FormMatrix4 FastKummer::coefficient_forms(const Field* f, const BiquadCoeffs& c) {
  FormMatrix4 r;
  for (int i = 0; i < 4; ++i) {
    Form d(f, 2);
    for (int m = 0; m < 4; ++m) {
      Mono e{0, 0, 0, 0};
      e[m] = 2;
      d.add_term(e, c.diag[i ^ m]);
    }
    r[i][i] = d;
  }
  for (int s = 1; s <= 3; ++s) {
    auto [s1, s2] = complement(s);
    Mono u{0, 0, 0, 0}, v{0, 0, 0, 0};
    u[0] += 1;
    u[s] += 1;
    v[s1] += 1;
    v[s2] += 1;
    Form first(f, 2), second(f, 2);
    first.add_term(u, c.cu[s]);
    first.add_term(v, c.cv[s]);
    second.add_term(u, c.cv[s]);
    second.add_term(v, c.cu[s]);
    r[0][s] = r[s][0] = first;
    r[s1][s2] = r[s2][s1] = second;
  }
  return r;
}

FormMatrix4 FastKummer::biquadratics_symbolic(const Point4& q) const {
  return coefficient_forms(field(), biquad_coefficients(q));
}

Point4 FastKummer::dbl(const Point4& p) const {
  Point4 b = diag_biquad(p, p);
  for (int i = 0; i < 4; ++i) b[i] = b[i] * inv_theta_[i];
  return b;
}

Point4 FastKummer::diff_add(const Point4& p, const Point4& q, const Point4& pmq) const {
  for (const auto& x : pmq)
    if (x.is_zero()) return diff_add_general(p, q, pmq);
  Point4 b = diag_biquad(p, q);
  // multiply through by the product of the other coordinates instead of inverting
  Fe z01 = pmq[0] * pmq[1], z23 = pmq[2] * pmq[3];
  return {b[0] * pmq[1] * z23, b[1] * pmq[0] * z23, b[2] * pmq[3] * z01, b[3] * pmq[2] * z01};
}

// With zeta = k(P-Q) known, B = c (xi zeta^T + zeta xi^T) determines xi from a
// row j with zeta_j != 0.
Point4 FastKummer::diff_add_general(const Point4& p, const Point4& q, const Point4& pmq) const {
  int j = -1;
  for (int i = 0; i < 4; ++i)
    if (!pmq[i].is_zero()) {
      j = i;
      break;
    }
  if (j < 0) fail(ErrorKind::Degenerate, "differential addition with zero difference");
  Matrix4 m = biquadratics(p, q);
  const Fe& zj = pmq[j];
  // xi_j = B_jj / (2 zeta_j); xi_i = (B_ij - zeta_i xi_j) / zeta_j, scaled by 2 zeta_j^2
  Fe xj = m[j][j];
  Fe two_zj = zj.dbl();
  Point4 r;
  for (int i = 0; i < 4; ++i) r[i] = i == j ? xj * zj : m[i][j] * two_zj - pmq[i] * xj;
  bool zero = true;
  for (const auto& x : r) zero = zero && x.is_zero();
  if (zero) fail(ErrorKind::Degenerate, "differential addition produced the zero vector");
  return r;
}

Point4 FastKummer::scalar_mul(const mpz_class& n, const Point4& p) const {
  if (n < 0) return scalar_mul(-n, p);
  if (n == 0) return theta_;
  if (n == 1) return p;
  bool has_zero = false;
  for (const auto& x : p) has_zero = has_zero || x.is_zero();
  Point4 r0 = p, r1 = dbl(p);
  std::size_t nb = mpz_sizeinbase(n.get_mpz_t(), 2);
  if (has_zero) {
    for (std::size_t k = nb - 1; k-- > 0;) {
      if (mpz_tstbit(n.get_mpz_t(), k)) {
        r0 = diff_add(r1, r0, p);
        r1 = dbl(r1);
      } else {
        r1 = diff_add(r1, r0, p);
        r0 = dbl(r0);
      }
    }
    return r0;
  }
  Point4 ip;
  auto inv = batch_invert({p[0], p[1], p[2], p[3]});
  for (int i = 0; i < 4; ++i) ip[i] = inv[i];
  auto add = [&](const Point4& x, const Point4& y) {
    Point4 b = diag_biquad(x, y);
    for (int i = 0; i < 4; ++i) b[i] = b[i] * ip[i];
    return b;
  };
  for (std::size_t k = nb - 1; k-- > 0;) {
    if (mpz_tstbit(n.get_mpz_t(), k)) {
      r0 = add(r1, r0);
      r1 = dbl(r1);
    } else {
      r1 = add(r1, r0);
      r0 = dbl(r0);
    }
  }
  return r0;
}

bool FastKummer::is_N_torsion(const Point4& p, long n) const {
  CountPause pause;
  if (n < 1) fail(ErrorKind::Contract, "torsion order must be positive");
  if (!is_identity(scalar_mul(n, p))) return false;
  for (long m = 1; m < n; ++m)
    if (n % m == 0 && is_identity(scalar_mul(m, p))) return false;
  return true;
}

// ---- division polynomials ----

namespace {

// Hadamard combination of squared forms: out_k = sum_m H_km F_m G_m.
std::array<Form, 4> hadamard_products(const std::array<Form, 4>& f, const std::array<Form, 4>& g) {
  std::array<Form, 4> pr;
  for (int m = 0; m < 4; ++m) pr[m] = f[m] * g[m];
  Form s01 = pr[0] + pr[1], d01 = pr[0] - pr[1], s23 = pr[2] + pr[3], d23 = pr[2] - pr[3];
  return {s01 + s23, s01 - s23, d01 + d23, d01 - d23};
}

// Exact quotient by the variable v of some G = B + h K.
Form divide_by_variable_mod(const Form& b, const Form& K, int v) {
  const Field* f = b.field();
  int w = v == 0 ? 1 : 0;  // K restricted to k_v = 0 is monic in k_w^4
  Form b0(f, b.degree()), k0(f, 4);
  for (const auto& [key, c] : b.terms())
    if (mono_of(key)[v] == 0) b0.add_term_key(key, c);
  for (const auto& [key, c] : K.terms())
    if (mono_of(key)[v] == 0) k0.add_term_key(key, c);
  Mono lead{0, 0, 0, 0};
  lead[w] = 4;
  if (!k0.coeff(lead).is_one()) fail(ErrorKind::Internal, "quartic is not monic in the pivot variable");
  Form h(f, b.degree() - 4);
  Form r = b0;
  while (true) {
    std::uint32_t key = 0;
    bool found = false;
    for (const auto& [k, c] : r.terms())
      if (mono_of(k)[w] >= 4) {
        key = k;
        found = true;
        break;
      }
    if (!found) break;
    Mono e = mono_of(key);
    Fe c = r.terms().at(key);
    e[w] -= 4;
    Form t = Form::monomial(f, e, c);
    r -= t * k0;
    h += t;
  }
  if (!r.is_zero()) fail(ErrorKind::Internal, "division polynomial step is not divisible modulo the quartic");
  Form g = b - h * K;
  Mono m{0, 0, 0, 0};
  m[v] = 1;
  return g.div_monomial(m);
}

}  // namespace

std::array<Form, 4> FastKummer::division_polynomials(int n) const {
  const Field* K = field();
  if (n < 0) fail(ErrorKind::Contract, "division polynomial index must be nonnegative");
  std::array<Form, 4> base;
  for (int i = 0; i < 4; ++i) base[i] = Form::variable(K, i);
  if (n == 0) {
    std::array<Form, 4> r;
    for (int i = 0; i < 4; ++i) r[i] = Form::constant(K, theta_[i]);
    return r;
  }
  auto even = [&](const std::array<Form, 4>& f) {
    auto hp = hadamard_products(f, f);
    std::array<Form, 4> w;
    for (int k = 0; k < 4; ++k) w[k] = (hp[k] * hp[k]).scaled(inv4g_[k]);
    Form s01 = w[0] + w[1], d01 = w[0] - w[1], s23 = w[2] + w[3], d23 = w[2] - w[3];
    std::array<Form, 4> b{s01 + s23, s01 - s23, d01 + d23, d01 - d23};
    for (int i = 0; i < 4; ++i) b[i] = reduce_mod_quartic(b[i].scaled(inv_theta_[i]), quartic_);
    return b;
  };
  auto odd = [&](const std::array<Form, 4>& f1, const std::array<Form, 4>& f0) {
    auto h1 = hadamard_products(f1, f1), h0 = hadamard_products(f0, f0);
    std::array<Form, 4> w;
    for (int k = 0; k < 4; ++k) w[k] = (h1[k] * h0[k]).scaled(inv4g_[k]);
    Form s01 = w[0] + w[1], d01 = w[0] - w[1], s23 = w[2] + w[3], d23 = w[2] - w[3];
    std::array<Form, 4> b{s01 + s23, s01 - s23, d01 + d23, d01 - d23};
    for (int i = 0; i < 4; ++i) b[i] = reduce_mod_quartic(divide_by_variable_mod(b[i], quartic_, i), quartic_);
    return b;
  };
  // ladder over (phi^(m), phi^(m+1))
  std::array<Form, 4> r0 = base, r1 = even(base);
  int nb = 0;
  while ((n >> nb) > 1) ++nb;
  for (int k = nb - 1; k >= 0; --k) {
    if ((n >> k) & 1) {
      r0 = odd(r1, r0);
      r1 = even(r1);
    } else {
      r1 = odd(r1, r0);
      r0 = even(r0);
    }
  }
  return r0;
}

// ---- sampling ----

Point4 FastKummer::sample_point(Rng& rng) const {
  CountPause pause;
  const Field* K = field();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Fe x = K->random(rng), y = K->random(rng), z = K->random(rng);
    Fe x2 = x.sq(), y2 = y.sq(), z2 = z.sq();
    // T^4 + c2 T^2 + c1 T + c0
    Fe c2 = -(f_ * x2 + gg_ * y2 + h_ * z2);
    Fe c1 = (e_ * x * y * z).dbl();
    Fe c0 = x2.sq() + y2.sq() + z2.sq() - f_ * y2 * z2 - gg_ * x2 * z2 - h_ * x2 * y2;
    Poly1 q{c0, c1, c2, K->zero(), K->one()};
    auto rts = poly_roots(q, rng);
    if (rts.empty()) continue;
    Point4 p{x, y, z, rts[rng() % rts.size()]};
    if (!on_surface(p)) fail(ErrorKind::Internal, "sampled point is not on the surface");
    return p;
  }
  fail(ErrorKind::Sampling, "no surface point found");
}

Point4 FastKummer::sample_torsion(long n, const mpz_class& cofactor, Rng& rng, int budget) const {
  CountPause pause;
  for (int attempt = 0; attempt < budget; ++attempt) {
    Point4 p = scalar_mul(cofactor, sample_point(rng));
    bool zero = false;
    for (const auto& x : p) zero = zero || x.is_zero();
    if (zero) continue;
    if (is_N_torsion(p, n)) return p;
  }
  fail(ErrorKind::Sampling, "no point of order " + std::to_string(n) + " found within the retry budget");
}

std::pair<Point4, Point4> FastKummer::sum_and_difference(const Point4& p, const Point4& q) const {
  CountPause pause;
  Matrix4 m = biquadratics(p, q);
  int j = -1;
  for (int i = 0; i < 4; ++i)
    if (!m[i][i].is_zero()) {
      j = i;
      break;
    }
  if (j < 0) fail(ErrorKind::Sampling, "biquadratic matrix has zero diagonal");
  // normalise so that xi_j = zeta_j = 1: N = 2 M / M_jj
  Fe s = m[j][j].inv().dbl();
  Matrix4 nm;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) nm[i][k] = m[i][k] * s;
  Fe half = field()->from_int(2).inv();
  // xi_i, zeta_i are the roots of z^2 - N_ij z + N_ii / 2
  std::array<Fe, 4> r1, r2;
  int pivot = -1;
  for (int i = 0; i < 4; ++i) {
    if (i == j) continue;
    const Fe& sum = nm[i][j];
    Fe disc = sum.sq() - nm[i][i].dbl();
    auto r = disc.sqrt();
    if (!r) fail(ErrorKind::Sampling, "P+Q is not rational over the field");
    r1[i] = (sum + *r) * half;
    r2[i] = (sum - *r) * half;
    if (pivot < 0 && !r->is_zero()) pivot = i;
  }
  Point4 xi, zeta;
  xi[j] = zeta[j] = field()->one();
  for (int i = 0; i < 4; ++i) {
    if (i == j) continue;
    xi[i] = r1[i];
    zeta[i] = r2[i];
    // the pairing of roots across coordinates is fixed by N_{pivot,i}
    if (pivot >= 0 && i != pivot && !(r1[pivot] * r2[i] + r2[pivot] * r1[i] == nm[pivot][i]))
      std::swap(xi[i], zeta[i]);
  }
  return {xi, zeta};
}

Point4 FastKummer::affine_diff_add(const Point4& p, const Point4& q, const Point4& pmq) const {
  Point4 b = diag_biquad(p, q);
  for (int i = 0; i < 4; ++i) {
    if (pmq[i].is_zero()) fail(ErrorKind::Sampling, "affine chain hit a zero coordinate");
    b[i] = b[i] / pmq[i];
  }
  return b;
}

Fe FastKummer::pairing(long n, const Point4& r, const Point4& s) const {
  CountPause pause;
  Point4 rs = sum_and_difference(r, s).first;
  auto ratio = [&](const Point4& x, const Point4& base) {
    for (int i = 0; i < 4; ++i)
      if (!base[i].is_zero()) {
        Fe l = x[i] / base[i];
        if (!proj_equal(x, base)) fail(ErrorKind::Internal, "pairing chain did not close");
        return l;
      }
    fail(ErrorKind::Internal, "zero base point in pairing");
  };
  // lift of (kx + y) along x0 = y, x1 = x + y
  auto chain = [&](const Point4& x, const Point4& y0, const Point4& y1) {
    Point4 prev = y0, cur = y1;
    for (long k = 1; k < n; ++k) {
      Point4 next = affine_diff_add(cur, x, prev);
      prev = cur;
      cur = next;
    }
    return cur;
  };
  Fe lr0 = ratio(chain(r, theta_, r), theta_);
  Fe lr1 = ratio(chain(r, s, rs), s);
  Fe ls0 = ratio(chain(s, theta_, s), theta_);
  Fe ls1 = ratio(chain(s, r, rs), r);
  return lr1 * ls0 / (lr0 * ls1);
}

std::pair<Point4, Point4> FastKummer::sample_kernel(long n, const mpz_class& cofactor, Rng& rng, int budget) const {
  CountPause pause;
  Point4 r = sample_torsion(n, cofactor, rng);
  std::vector<Point4> multiples;
  for (long k = 1; k <= n / 2; ++k) multiples.push_back(scalar_mul(k, r));
  for (int attempt = 0; attempt < budget; ++attempt) {
    Point4 s = sample_torsion(n, cofactor, rng);
    bool dependent = false;
    for (const auto& m : multiples) dependent = dependent || proj_equal(m, s);
    if (dependent) continue;
    Fe e;
    try {
      e = pairing(n, r, s);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::Sampling) continue;
      throw;
    }
    if (e.is_one()) return {r, s};
  }
  fail(ErrorKind::Sampling, "no isotropic kernel pair found within the retry budget");
}

}  // namespace kummer
