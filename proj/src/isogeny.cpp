#include "kummer/isogeny.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "kummer/linalg.hpp"

namespace kummer {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_odd(int N) {
  if (N < 3 || N % 2 == 0) fail(ErrorKind::Usage, "N must be odd and at least 3");
}

const Field* field_of(const PairForms& r) {
  for (const auto& m : r)
    for (const auto& row : m)
      for (const auto& f : row)
        if (f.field()) return f.field();
  fail(ErrorKind::Contract, "biquadratic forms carry no field");
}

// k_i f, by shifting exponents.
Form times_variable(const Form& f, int i) {
  Form r(f.field(), f.degree() + 1);
  std::uint32_t shift = 1u << (8 * (3 - i));
  for (const auto& [k, c] : f.terms()) r.add_term_key(k + shift, c);
  return r;
}

// Translations by E4, E8, E12 on the Fast model, as substitutions.
const SignedPermutation& swap_action(int k) {
  static const std::array<SignedPermutation, 4> t = [] {
    std::array<SignedPermutation, 4> a;
    for (int k = 1; k < 4; ++k)
      for (int j = 0; j < 4; ++j) a[k].perm[j] = j ^ k;
    return a;
  }();
  return t[k];
}

template <class A>
std::vector<Point4> ladder_multiples(const A& a, const Point4& p, int n) {
  std::vector<Point4> m{p};
  if (n >= 2) m.push_back(a.dbl(p));
  for (int l = 3; l <= n; ++l) m.push_back(a.diff_add(m[l - 2], p, m[l - 3]));
  return m;
}

Matrix coefficient_matrix(const std::vector<Form>& forms, std::map<std::uint32_t, std::size_t>& index) {
  const Field* f = nullptr;
  for (const auto& g : forms) {
    if (!f) f = g.field();
    for (const auto& [k, c] : g.terms()) index.emplace(k, 0);
  }
  std::size_t i = 0;
  for (auto& [k, row] : index) row = i++;
  Matrix m(f, index.size(), forms.size());
  for (std::size_t j = 0; j < forms.size(); ++j)
    for (const auto& [k, c] : forms[j].terms()) m(index[k], j) = c;
  return m;
}

using Reducer = std::function<Form(const Form&)>;

std::vector<std::array<int, 4>> all_multisets(int N) {
  std::vector<std::array<int, 4>> out;
  for (int a = N; a >= 0; --a)
    for (int b = N - a; b >= 0; --b)
      for (int c = N - a - b; c >= 0; --c) out.push_back({a, b, c, N - a - b - c});
  return out;
}

std::mutex cache_mutex;
std::map<std::pair<int, int>, std::vector<std::array<int, 4>>> enumeration_cache;

// Fallback when the index list does not give a basis: multisets in turn,
// reduced, keeping those that raise the rank of their class.
InvariantBasis enumerate_basis(const PairForms& r, int N, const Reducer& reduce, bool partitioned, int model_tag) {
  std::size_t want = partitioned ? std::size_t(N + 1) / 2 : std::size_t(2 * (N + 1));
  int used = partitioned ? 4 : 1;
  std::vector<std::array<int, 4>> chosen;
  auto select = [&](const std::vector<std::array<int, 4>>& candidates, InvariantBasis& b) {
    b = InvariantBasis{};
    b.enumerated = true;
    chosen.clear();
    int full = 0;
    for (const auto& counts : candidates) {
      Form g = reduce(invariant_form(r, counts));
      if (g.is_zero()) continue;
      int part = partitioned ? form_class(g) - 1 : 0;
      if (part < 0) fail(ErrorKind::Internal, "invariant form with mixed parity classes");
      auto& dst = b.parts[part];
      if (dst.size() >= want) continue;
      dst.push_back(g);
      if (form_rank(dst) < dst.size()) {
        dst.pop_back();
        continue;
      }
      chosen.push_back(counts);
      if (dst.size() == want && ++full == used) return true;
    }
    return false;
  };

  std::optional<std::vector<std::array<int, 4>>> cached;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = enumeration_cache.find({model_tag, N});
    if (it != enumeration_cache.end()) cached = it->second;
  }
  InvariantBasis b;
  // a cached selection need not suit every kernel point
  if (cached && select(*cached, b)) return b;
  if (!select(all_multisets(N), b))
    fail(ErrorKind::Conjecture, "full enumeration found no basis of invariant forms for N = " + std::to_string(N));
  if (!cached) {
    std::lock_guard<std::mutex> lock(cache_mutex);
    enumeration_cache.emplace(std::make_pair(model_tag, N), chosen);
  }
  return b;
}

InvariantBasis build_basis(const PairForms& r, int N, const Reducer& reduce, bool partitioned, int model_tag,
                           const BasisOptions& opt) {
  if (int(r.size()) != (N - 1) / 2) fail(ErrorKind::Contract, "need the multiples R, ..., ((N-1)/2) R");
  if (opt.force_enumeration) return enumerate_basis(r, N, reduce, partitioned, model_tag);
  Model model = partitioned ? Model::Fast : Model::General;
  auto idx = index_list(N, model);
  auto forms = index_forms(r, N, model);
  InvariantBasis b;
  for (std::size_t i = 0; i < forms.size(); ++i) b.parts[partitioned ? idx[i].cls - 1 : 0].push_back(reduce(forms[i]));
  if (opt.check_rank && (N <= 9 || opt.force_rank_check)) {
    bool ok = true;
    for (const auto& part : b.parts)
      if (!part.empty()) ok = ok && form_rank(part) == part.size();
    if (!ok) {
      if (!opt.fallback_full_enumeration)
        fail(ErrorKind::Conjecture, "index-list forms have deficient rank for N = " + std::to_string(N));
      return enumerate_basis(r, N, reduce, partitioned, model_tag);
    }
  }
  return b;
}

}  // namespace

const char* branch_name(ScalingBranch b) {
  switch (b) {
    case ScalingBranch::Auto: return "auto";
    case ScalingBranch::Five: return "5";
    case ScalingBranch::GE: return "GE";
    case ScalingBranch::Sqrt: return "sqrt";
  }
  return "?";
}

ScalingBranch parse_branch(const std::string& s) {
  if (s == "auto") return ScalingBranch::Auto;
  if (s == "5") return ScalingBranch::Five;
  if (s == "GE") return ScalingBranch::GE;
  if (s == "sqrt") return ScalingBranch::Sqrt;
  fail(ErrorKind::Usage, "unknown scaling branch '" + s + "'");
}

namespace {

// Index pairs (a, b) of the two families.
std::array<std::array<int, 2>, 2> families(Model model) {
  if (model == Model::General) return {{{0, 3}, {1, 2}}};
  return {{{0, 1}, {2, 3}}};
}

}  // namespace

std::vector<IndexMultiset> index_list(int N, Model model) {
  check_odd(N);
  auto fams = families(model);
  std::vector<IndexMultiset> out;
  for (int fam = 0; fam < 2; ++fam)
    for (int j = 0; j <= N; ++j) {
      IndexMultiset m{{0, 0, 0, 0}, model == Model::Fast ? 2 * fam + 1 + (j & 1) : 0};
      m.counts[fams[fam][0]] = N - j;
      m.counts[fams[fam][1]] = j;
      out.push_back(m);
    }
  return out;
}

IsogenyKernel make_kernel(const FastKummer& k, int N, const Point4& R, const Point4& S) {
  check_odd(N);
  if (k.field()->p() <= N) fail(ErrorKind::Usage, "the characteristic must exceed N");
  CountPause pause;
  for (const auto* p : {&R, &S}) {
    if (!k.on_surface(*p)) fail(ErrorKind::InvalidKernel, "kernel point is not on the surface");
    if (!k.is_N_torsion(*p, N)) fail(ErrorKind::InvalidKernel, "kernel point does not have order N");
  }
  IsogenyKernel ker;
  ker.N = N;
  ker.R = R;
  ker.S = S;
  ker.mult_R = ladder_multiples(k, R, (N - 1) / 2);
  ker.mult_S = ladder_multiples(k, S, (N - 1) / 2);
  return ker;
}

IsogenyKernel make_kernel(const GeneralArithmetic& g, int N, const Point4& R, const Point4& S) {
  check_odd(N);
  if (g.surface().field()->p() <= N) fail(ErrorKind::Usage, "the characteristic must exceed N");
  CountPause pause;
  for (const auto* p : {&R, &S}) {
    if (!g.surface().on_surface(*p)) fail(ErrorKind::InvalidKernel, "kernel point is not on the surface");
    if (g.is_identity(*p) || !g.is_identity(g.scalar_mul(N, *p)))
      fail(ErrorKind::InvalidKernel, "kernel point does not have order N");
  }
  IsogenyKernel ker;
  ker.N = N;
  ker.R = R;
  ker.S = S;
  ker.mult_R = ladder_multiples(g, R, (N - 1) / 2);
  ker.mult_S = ladder_multiples(g, S, (N - 1) / 2);
  return ker;
}

PairForms pair_forms(const FastKummer& k, const std::vector<Point4>& multiples) {
  PairForms r;
  for (const auto& q : multiples) r.push_back(k.biquadratics_symbolic(q));
  return r;
}

PairForms pair_forms(const BiquadraticTable& t, const std::vector<Point4>& multiples) {
  PairForms r;
  for (const auto& q : multiples) r.push_back(t.symbolic(q));
  return r;
}

Form invariant_form(const PairForms& r, const std::array<int, 4>& counts) {
  int N = counts[0] + counts[1] + counts[2] + counts[3];
  if (N != 2 * int(r.size()) + 1) fail(ErrorKind::Contract, "multiset size does not match the multiples");
  const Field* f = field_of(r);
  Form total(f, N);
  std::array<int, 4> c = counts;
  std::function<void(std::size_t, const Form&)> rec = [&](std::size_t l, const Form& acc) {
    if (l == r.size()) {
      total += acc;
      return;
    }
    for (int i = 0; i < 4; ++i) {
      if (!c[i]) continue;
      --c[i];
      for (int j = i; j < 4; ++j) {
        if (!c[j]) continue;
        --c[j];
        Form t = acc * r[l][i][j];
        rec(l + 1, i == j ? t : t + t);
        ++c[j];
      }
      ++c[i];
    }
  };
  for (int i = 0; i < 4; ++i)
    if (c[i]) {
      --c[i];
      rec(0, Form::variable(f, i));
      ++c[i];
    }
  return total;
}

std::vector<Form> index_forms(const PairForms& r, int N, Model model) {
  check_odd(N);
  std::size_t n = std::size_t(N - 1) / 2;
  if (r.size() != n) fail(ErrorKind::Contract, "need the multiples R, ..., ((N-1)/2) R");
  const Field* f = field_of(r);
  struct Node {
    Form f;
    int cb;  // occurrences of the second index
  };
  std::vector<Form> out;
  auto fams = families(model);
  for (int fam = 0; fam < 2; ++fam) {
    int a = fams[fam][0], b = fams[fam][1];
    std::vector<std::array<Form, 3>> factors(n);
    for (std::size_t l = 0; l < n; ++l) factors[l] = {r[l][a][a], r[l][a][b] + r[l][a][b], r[l][b][b]};
    std::vector<Node> cur;
    for (int t = 0; t < 3; ++t) cur.push_back({factors[0][t], t});
    for (std::size_t l = 1; l < n; ++l) {
      std::vector<Node> next;
      next.reserve(cur.size() * 3);
      for (const auto& node : cur)
        for (int t = 0; t < 3; ++t) next.push_back({node.f * factors[l][t], node.cb + t});
      cur = std::move(next);
    }
    std::vector<Form> F(N + 1, Form(f, N));
    for (const auto& node : cur) {
      F[node.cb] += times_variable(node.f, a);
      F[node.cb + 1] += times_variable(node.f, b);
    }
    for (auto& g : F) out.push_back(std::move(g));
  }
  return out;
}

InvariantBasis find_basis(const FastKummer& k, const std::vector<Point4>& multiples, int N, const BasisOptions& opt) {
  check_odd(N);
  const Form& K = k.quartic();
  return build_basis(pair_forms(k, multiples), N, [&](const Form& g) { return reduce_mod_quartic(g, K); }, true, 0,
                     opt);
}

InvariantBasis find_basis(const GeneralKummer& s, const BiquadraticTable& t, const std::vector<Point4>& multiples,
                          int N, const BasisOptions& opt) {
  check_odd(N);
  return build_basis(pair_forms(t, multiples), N, [&](const Form& g) { return reduce_general(g, s); }, false, 1, opt);
}

InvariantBasis find_basis_enumerated(const FastKummer& k, const std::vector<Point4>& multiples, int N) {
  check_odd(N);
  const Form& K = k.quartic();
  return enumerate_basis(pair_forms(k, multiples), N, [&](const Form& g) { return reduce_mod_quartic(g, K); }, true,
                         0);
}

std::size_t form_rank(const std::vector<Form>& forms) {
  if (forms.empty()) return 0;
  std::map<std::uint32_t, std::size_t> index;
  Matrix m = coefficient_matrix(forms, index);
  if (index.empty()) return 0;
  return rank(m);
}

std::vector<Form> find_intersection(const std::vector<Form>& bR, const std::vector<Form>& bS, std::size_t expected) {
  if (bR.empty() || bS.empty()) fail(ErrorKind::Contract, "empty basis");
  std::vector<Form> all = bR;
  for (const auto& g : bS) all.push_back(-g);
  std::map<std::uint32_t, std::size_t> index;
  Matrix m = coefficient_matrix(all, index);
  auto ker = kernel_basis(m);
  if (ker.size() != expected)
    fail(ErrorKind::InvalidKernel, "intersection of invariant spaces has dimension " + std::to_string(ker.size()) +
                                       ", expected " + std::to_string(expected));
  std::vector<Form> out;
  for (const auto& v : ker) {
    Form psi(bR[0].field(), bR[0].degree());
    for (std::size_t j = 0; j < bR.size(); ++j)
      if (!v[j].is_zero()) psi += bR[j].scaled(v[j]);
    if (psi.is_zero()) fail(ErrorKind::InvalidKernel, "intersection vector gives the zero form");
    out.push_back(std::move(psi));
  }
  return out;
}

Form normalize_leading(const Form& f) {
  if (f.is_zero()) return f;
  return f.scaled(f.terms().begin()->second.inv());
}

Point4 evaluate(const Map4& phi, const Point4& p) {
  return {phi[0].eval(p), phi[1].eval(p), phi[2].eval(p), phi[3].eval(p)};
}

// ---- scaling ----

std::optional<ScaledMap> scaling_5(const Map4& psi) {
  if (psi[0].degree() != 5) fail(ErrorKind::Contract, "Scaling_5 needs a quintic map");
  Fe cY = psi[0].coeff({0, 1, 1, 3});
  Fe dY = psi[1].coeff({1, 0, 3, 1});
  Fe cZ = psi[0].coeff({0, 1, 1, 3});
  Fe dZ = psi[2].coeff({1, 3, 0, 1});
  Fe cT = psi[2].coeff({1, 1, 0, 3});
  Fe dT = psi[3].coeff({1, 1, 3, 0});
  for (const auto* c : {&cY, &dY, &cZ, &dZ, &cT, &dT})
    if (c->is_zero()) return std::nullopt;
  Fe alpha = dZ * dT;
  Fe beta = dY * cZ;
  ScaledMap out;
  out.lambda = {dY * alpha, cY * alpha, dT * beta, cT * beta};
  for (int i = 0; i < 4; ++i) out.phi[i] = psi[i].scaled(out.lambda[i]);
  return out;
}

std::optional<ScaledMap> scaling_ge(const Map4& psi, const FastKummer& k) {
  const Field* f = k.field();
  int N = psi[0].degree();
  const Form& K = k.quartic();
  std::vector<Mono> mons;
  if (N >= 4) mons = monomials_of_degree(N - 4, 1);
  const std::size_t l = mons.size();
  // Rows m_j X^4 make the G part triangular (K has X^4 with coefficient 1 and
  // every other term lowers the X-degree); one more row fixes lambda_k.
  std::vector<Mono> rows;
  for (const auto& m : mons) rows.push_back({m[0] + 4, m[1], m[2], m[3]});
  auto k_coeff = [&](const Mono& r, const Mono& m) {
    Mono t{r[0] - m[0], r[1] - m[1], r[2] - m[2], r[3] - m[3]};
    for (int e : t)
      if (e < 0) return f->zero();
    return K.coeff(t);
  };
  ScaledMap out;
  out.lambda[0] = f->one();
  for (int kk = 1; kk < 4; ++kk) {
    // lambda_k psi_k(permuted) + G K = psi_X
    Form moved = apply_signed_permutation(psi[kk], swap_action(kk));
    std::optional<Fe> lam;
    for (const auto& [key, c] : moved.terms()) {
      Mono mu = mono_of(key);
      if (mu[0] >= 4) continue;
      rows.push_back(mu);
      Matrix m(f, l + 1, l + 2);
      for (std::size_t i = 0; i <= l; ++i) {
        m(i, 0) = moved.coeff(rows[i]);
        for (std::size_t j = 0; j < l; ++j) m(i, j + 1) = k_coeff(rows[i], mons[j]);
        m(i, l + 1) = psi[0].coeff(rows[i]);
      }
      rows.pop_back();
      std::vector<std::size_t> pivots;
      Matrix e = echelon_form(m, pivots);
      if (pivots.size() == l + 1 && pivots.back() == l) {
        lam = e(0, l + 1);
        break;
      }
    }
    if (!lam || lam->is_zero()) return std::nullopt;
    out.lambda[kk] = *lam;
  }
  for (int i = 0; i < 4; ++i) out.phi[i] = i == 0 ? psi[0] : psi[i].scaled(out.lambda[i]);
  return out;
}

ImageInputs image_inputs(const Map4& psi, const Point4& theta) {
  ImageInputs in;
  in.x = evaluate(psi, theta);
  in.y = evaluate(psi, {theta[1], theta[0], theta[3], theta[2]});
  in.z = evaluate(psi, {theta[3], theta[2], theta[1], theta[0]});
  return in;
}

std::optional<ScaledMap> scaling_sqrt(const Map4& psi, const FastKummer& k) {
  const Form& K = k.quartic();
  ImageInputs in = image_inputs(psi, k.theta());
  const Point4 &x = in.x, &y = in.y, &z = in.z;
  // (lY/lX)^2, (lZ/lY)^2 and lY lT / (lX lZ)
  Fe na = x[0] * y[0], da = x[1] * y[1];
  Fe nb = x[1] * z[1], db = x[2] * z[2];
  Fe ng = x[0] * z[2], dg = x[1] * z[3];
  if (da.is_zero() || db.is_zero() || dg.is_zero()) return std::nullopt;
  auto inv = batch_invert({da, db, dg});
  Fe qa = na * inv[0], qb = nb * inv[1], gamma = ng * inv[2];
  auto sa = qa.sqrt();
  auto sb = qb.sqrt();
  if (!sa || !sb) return std::nullopt;

  // lambda_k psi_k(pi_k P) = psi_X(P) on the surface; at P = theta and P = (b,a,d,c)
  // this reads lY y1 = x0, lZ z2 = y0, lT z3 = x0.
  bool pointwise = !x[0].is_zero() && !y[0].is_zero();
  std::array<Form, 4> moved;
  Form target;
  if (!pointwise) {
    CountPause pause;
    target = reduce_mod_quartic(psi[0], K);
    for (int kk = 1; kk < 4; ++kk)
      moved[kk] = reduce_mod_quartic(apply_signed_permutation(psi[kk], swap_action(kk)), K);
  }
  const Field* f = k.field();
  for (const Fe& alpha : {*sa, -*sa})
    for (const Fe& beta : {*sb, -*sb}) {
      Point4 lam{f->one(), alpha, alpha * beta, beta * gamma};
      bool ok;
      if (pointwise) {
        ok = lam[1] * y[1] == x[0] && lam[2] * z[2] == y[0] && lam[3] * z[3] == x[0];
      } else {
        CountPause pause;
        ok = true;
        for (int kk = 1; kk < 4 && ok; ++kk) ok = moved[kk].scaled(lam[kk]) == target;
      }
      if (!ok) continue;
      ScaledMap out;
      out.lambda = lam;
      for (int i = 0; i < 4; ++i) out.phi[i] = i == 0 ? psi[0] : psi[i].scaled(lam[i]);
      return out;
    }
  return std::nullopt;
}

ImageConstants get_image(const ImageInputs& in) {
  const Point4 &x = in.x, &y = in.y, &z = in.z;
  // squared image thetas up to a common factor
  Fe m = z[2] * y[3], q = z[1] * y[0];
  Fe a2 = (x[0] * y[1]) * m;
  Fe b2 = (x[1] * y[0]) * m;
  Fe c2 = (x[2] * y[3]) * q;
  Fe d2 = (x[3] * y[2]) * q;
  // beta = a'c' / (b'd')
  Fe nb = x[0] * z[1], db = x[1] * z[0];

  Fe s = a2 + b2, d = a2 - b2, s_ = c2 + d2, d_ = c2 - d2;
  Fe ss = s.sq(), dd = d.sq(), ss_ = s_.sq(), dd_ = d_.sq();
  Fe AB = ss - ss_, CD = dd - dd_;
  Fe ABCD = AB * CD;
  Fe nH2 = AB + CD;  // 2 (a^4 + b^4 - c^4 - d^4)
  Fe sd = s * d, sd_ = s_ * d_;
  Fe nF = sd - sd_, nG = sd + sd_;
  Fe u = d * s_, v = s * d_;
  Fe G1 = u - v;     // 2 (a2 d2 - b2 c2)
  Fe G2 = u + v;     // 2 (a2 c2 - b2 d2)
  Fe G3 = AB - CD;   // 4 (a2 b2 - c2 d2)
  Fe bd = b2 * d2;

  Fe p12 = G1 * G2, p123 = p12 * G3, Q = p123 * db;
  if (Q.is_zero()) fail(ErrorKind::Degenerate, "image constants have a vanishing denominator");
  Fe inv = Q.inv();
  Fe w = inv * db;
  Fe g3 = w * p12;
  Fe w2 = w * G3;
  Fe g1 = w2 * G2, g2 = w2 * G1;

  ImageConstants out;
  out.F = (nF + nF) * g1;
  out.G = (nG + nG) * g2;
  out.H = (nH2 + nH2) * g3;
  Fe e = ((nb * bd) * ABCD) * inv;
  e = e.dbl();
  e = e.dbl();
  e = e.dbl();
  out.E = e.dbl();
  out.theta_sq = {a2, b2, c2, d2};
  return out;
}

CostEstimate cost_model(int N, double log2p) {
  check_odd(N);
  CostEstimate c;
  double n = N;
  c.crossover_lhs = std::pow(n, 9) - 20736 * std::pow(n, 3) - 124416 * n * n - 228096 * n - 539136;
  c.crossover_rhs = 207360 * log2p;
  if (N == 5)
    c.branch = ScalingBranch::Five;
  else
    c.branch = c.crossover_lhs <= c.crossover_rhs ? ScalingBranch::GE : ScalingBranch::Sqrt;
  double t = std::pow(3.0, (N - 1) / 2);
  c.basis_Mpoly = 9 * (t - 1);
  c.basis_apoly = 2 * (t - n - 1);
  c.intersection_M = (n + 1) * (n + 12) * (n - 1) / 6;
  c.intersection_a = (n + 1) * (n + 6) * (n - 1) / 6;
  long l = long(N - 1) * (N - 2) * (N - 3) / 24;
  c.ge_unknowns = l;
  double L = double(l);
  c.ge_M = L * (L + 1) * (2 * L + 13) / 6;
  c.ge_a = L * (L + 1) * (2 * L + 7) / 6;
  double lp = double(long(N + 1) * (N + 2) * (N + 3) / 24);
  c.sqrt_M = 10 + 12 * lp;
  return c;
}

FastIsogeny get_isogeny(const FastKummer& k, const IsogenyKernel& ker, const IsogenyOptions& opt) {
  const int N = ker.N;
  check_odd(N);
  const Field* f = k.field();
  FastIsogeny out;
  out.N = N;
  OpCounter counter;

  auto t0 = Clock::now();
  InvariantBasis bR = find_basis(k, ker.mult_R, N, opt.basis);
  InvariantBasis bS = find_basis(k, ker.mult_S, N, opt.basis);
  out.times.basis = since(t0);
  out.enumerated = bR.enumerated || bS.enumerated;

  t0 = Clock::now();
  for (int i = 0; i < 4; ++i) out.psi[i] = normalize_leading(find_intersection(bR.parts[i], bS.parts[i], 1)[0]);
  out.times.intersection = since(t0);

  t0 = Clock::now();
  ScalingBranch br = opt.branch;
  if (br == ScalingBranch::Auto) br = N == 5 ? ScalingBranch::Five : cost_model(N, double(f->bits())).branch;
  if (br == ScalingBranch::Five && N != 5) fail(ErrorKind::Usage, "Scaling_5 applies to N = 5 only");
  std::optional<ScaledMap> sm;
  if (br == ScalingBranch::Five) {
    sm = scaling_5(out.psi);
    if (!sm) br = ScalingBranch::Sqrt;
  }
  if (br == ScalingBranch::GE) sm = scaling_ge(out.psi, k);
  if (br == ScalingBranch::Sqrt) sm = scaling_sqrt(out.psi, k);
  if (!sm) fail(ErrorKind::Structure, std::string("scaling (") + branch_name(br) + ") found no consistent map");
  out.branch = br;
  out.phi = sm->phi;
  out.lambda = sm->lambda;
  out.times.scaling = since(t0);

  t0 = Clock::now();
  out.image_theta = evaluate(out.phi, k.theta());
  out.times.image = since(t0);
  out.counts = counter.counts();

  t0 = Clock::now();
  CountPause pause;
  FastKummer image(k.field_ptr(), out.image_theta);
  try {
    ImageConstants ic = get_image(image_inputs(out.psi, k.theta()));
    if (ic.E != image.E() || ic.F != image.F() || ic.G != image.G() || ic.H != image.H())
      fail(ErrorKind::Internal, "image constants disagree with the image thetas");
    Point4 sq{out.image_theta[0].sq(), out.image_theta[1].sq(), out.image_theta[2].sq(), out.image_theta[3].sq()};
    if (!proj_equal(ic.theta_sq, sq)) fail(ErrorKind::Internal, "squared image thetas disagree");
    out.image_constants = ic;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Degenerate) throw;
  }
  for (const auto* mult : {&ker.mult_R, &ker.mult_S})
    for (const auto& p : *mult)
      if (!image.is_identity(evaluate(out.phi, p)))
        fail(ErrorKind::Internal, "isogeny does not send the kernel to the image identity");
  Rng rng(opt.seed);
  for (int i = 0; i < opt.validation_points; ++i) {
    Point4 p = k.sample_point(rng);
    Point4 q = evaluate(out.phi, p);
    bool zero = q[0].is_zero() && q[1].is_zero() && q[2].is_zero() && q[3].is_zero();
    if (!zero && !image.on_surface(q)) fail(ErrorKind::Internal, "image point is off the image surface");
  }
  out.times.validation = since(t0);
  return out;
}

// ---- general model ----

Form reduce_general(const Form& f, const GeneralKummer& s) { return normal_form(f, s.quartic(), {3, 1, 0, 2}); }

Map4 normalize_general(const Map4& psi, int N) {
  const Field* f = psi[0].field();
  const std::array<Mono, 4> markers = {Mono{1, 0, 0, N - 1}, Mono{0, 1, 0, N - 1}, Mono{0, 0, 1, N - 1},
                                       Mono{0, 0, 0, N}};
  Matrix c(f, 4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c(i, j) = psi[i].coeff(markers[j]);
  if (determinant(c).is_zero()) fail(ErrorKind::Structure, "marker coefficients are singular; cannot normalize");
  Matrix a = inverse(c);
  Map4 out;
  for (int j = 0; j < 4; ++j) {
    out[j] = Form(f, N);
    for (int i = 0; i < 4; ++i)
      if (!a(j, i).is_zero()) out[j] += psi[i].scaled(a(j, i));
  }
  return out;
}

Form recover_quartic(const Map4& ell, const GeneralKummer& s) {
  const Field* f = ell[0].field();
  std::map<Mono, Form> cache;
  std::function<const Form&(const Mono&)> prod = [&](const Mono& e) -> const Form& {
    auto it = cache.find(e);
    if (it != cache.end()) return it->second;
    int i = 0;
    while (e[i] == 0) ++i;
    Mono rest = e;
    --rest[i];
    Form v = (rest == Mono{0, 0, 0, 0}) ? ell[i] : reduce_general(prod(rest) * ell[i], s);
    return cache.emplace(e, std::move(v)).first->second;
  };

  // unknowns: mu1 (cubics in l1..l3, times l4) and mu0 (quartics in l1..l3)
  std::vector<Mono> unknowns;
  for (const auto& m : monomials_of_degree(3)) {
    if (m[3] != 0) continue;
    unknowns.push_back({m[0], m[1], m[2], 1});
  }
  for (const auto& m : monomials_of_degree(4))
    if (m[3] == 0) unknowns.push_back(m);

  Form base = prod({0, 2, 0, 2}) - prod({1, 0, 1, 2}).scaled(f->from_int(4));
  std::vector<Form> cols;
  for (const auto& m : unknowns) cols.push_back(prod(m));
  cols.push_back(base);
  std::map<std::uint32_t, std::size_t> index;
  Matrix all = coefficient_matrix(cols, index);
  Matrix m(f, all.rows(), unknowns.size());
  Vec b(all.rows(), f->zero());
  for (std::size_t i = 0; i < all.rows(); ++i) {
    for (std::size_t j = 0; j < unknowns.size(); ++j) m(i, j) = all(i, j);
    b[i] = -all(i, unknowns.size());
  }
  auto sol = solve(m, b);
  if (!sol) fail(ErrorKind::Structure, "no quartic of the expected shape vanishes on the image");
  if (rank(m) != unknowns.size()) fail(ErrorKind::Precision, "quartic coefficients are underdetermined");

  Form q(f, 4);
  q.add_term({0, 2, 0, 2}, f->one());
  q.add_term({1, 0, 1, 2}, f->from_int(-4));
  for (std::size_t j = 0; j < unknowns.size(); ++j) q.add_term(unknowns[j], (*sol)[j]);

  // the local expansion at the identity must also be annihilated
  auto ser = power_series_coordinates(s.curve(), 8);
  std::array<BivariateSeries, 4> ls;
  for (int i = 0; i < 4; ++i) ls[i] = substitute(ell[i], ser);
  if (!substitute(q, ls).is_zero()) fail(ErrorKind::Internal, "recovered quartic fails the power-series check");
  return q;
}

CrossTermRemoval remove_cross_terms(const Form& quartic) {
  const Field* f = quartic.field();
  Fe lead = quartic.coeff({0, 2, 0, 2});
  if (lead.is_zero()) fail(ErrorKind::Structure, "quartic has no l2^2 l4^2 term");
  Fe h = (lead.dbl()).inv();
  CrossTermRemoval out;
  out.u = {-(quartic.coeff({1, 2, 0, 1}) * h), -(quartic.coeff({0, 3, 0, 1}) * h), -(quartic.coeff({0, 2, 1, 1}) * h)};
  Matrix p = Matrix::identity(f, 4);
  for (int j = 0; j < 3; ++j) p(3, j) = out.u[j];
  out.quartic = substitute_linear(quartic, p);
  for (const Mono& e : {Mono{1, 2, 0, 1}, Mono{0, 3, 0, 1}, Mono{0, 2, 1, 1}})
    if (!out.quartic.coeff(e).is_zero()) fail(ErrorKind::Structure, "cross terms survive the substitution");
  return out;
}

Genus2Curve read_off_curve(const Form& quartic) {
  const Field* f = quartic.field();
  Fe m4 = f->from_int(-4).inv(), m2 = f->from_int(-2).inv();
  Genus2Curve c;
  c.f = {quartic.coeff({3, 0, 0, 1}) * m4, quartic.coeff({2, 1, 0, 1}) * m2, quartic.coeff({2, 0, 1, 1}) * m4,
         quartic.coeff({1, 1, 1, 1}) * m2, quartic.coeff({1, 0, 2, 1}) * m4, quartic.coeff({0, 1, 2, 1}) * m2,
         quartic.coeff({0, 0, 3, 1}) * m4};
  std::optional<GeneralKummer> s;
  try {
    s.emplace(c);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Degenerate) throw;
    fail(ErrorKind::Structure, "read-off curve is singular; not a General Kummer equation");
  }
  if (s->quartic() != quartic) fail(ErrorKind::Structure, "quartic is not the General Kummer equation of its curve");
  return c;
}

GeneralIsogeny general_pipeline(const GeneralArithmetic& g, const IsogenyKernel& ker, const BasisOptions& opt) {
  const int N = ker.N;
  const GeneralKummer& s = g.surface();
  GeneralIsogeny out;
  out.N = N;
  OpCounter counter;

  auto t0 = Clock::now();
  InvariantBasis bR = find_basis(s, g.table(), ker.mult_R, N, opt);
  InvariantBasis bS = find_basis(s, g.table(), ker.mult_S, N, opt);
  out.times.basis = since(t0);
  out.enumerated = bR.enumerated || bS.enumerated;

  t0 = Clock::now();
  auto inter = find_intersection(bR.parts[0], bS.parts[0], 4);
  Map4 psi{inter[0], inter[1], inter[2], inter[3]};
  out.times.intersection = since(t0);

  t0 = Clock::now();
  out.ell = normalize_general(psi, N);
  out.quartic = recover_quartic(out.ell, s);
  auto ct = remove_cross_terms(out.quartic);
  out.u = ct.u;
  out.target_quartic = ct.quartic;
  out.phi = out.ell;
  for (int j = 0; j < 3; ++j) out.phi[3] -= out.ell[j].scaled(ct.u[j]);
  out.times.scaling = since(t0);

  t0 = Clock::now();
  out.image = read_off_curve(ct.quartic);
  out.times.image = since(t0);
  out.counts = counter.counts();

  t0 = Clock::now();
  CountPause pause;
  GeneralKummer image(out.image);
  for (const auto* mult : {&ker.mult_R, &ker.mult_S})
    for (const auto& p : *mult)
      if (!proj_equal(evaluate(out.phi, p), image.identity()))
        fail(ErrorKind::Internal, "isogeny does not send the kernel to the image identity");
  out.times.validation = since(t0);
  return out;
}

}  // namespace kummer
