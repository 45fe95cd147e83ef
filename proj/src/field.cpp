#include "kummer/field.hpp"

namespace kummer {

namespace {
thread_local OpCounter* t_counter = nullptr;
}

struct CountHook {
  static void M() {
    if (t_counter) ++t_counter->counts_.M;
  }
  static void S() {
    if (t_counter) ++t_counter->counts_.S;
  }
  static void I() {
    if (t_counter) ++t_counter->counts_.I;
  }
  static void a() {
    if (t_counter) ++t_counter->counts_.a;
  }
  static void Sq() {
    if (t_counter) ++t_counter->counts_.Sq;
  }
};

OpCounter::OpCounter() : parent_(t_counter) { t_counter = this; }

OpCounter::~OpCounter() {
  if (parent_) parent_->counts_ += counts_;
  t_counter = parent_;
}

OpCounter* OpCounter::active() { return t_counter; }

CountPause::CountPause() : saved_(t_counter) { t_counter = nullptr; }
CountPause::~CountPause() { t_counter = saved_; }

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::Degenerate: return "degenerate-parameters";
    case ErrorKind::Structure: return "structure";
    case ErrorKind::InvalidKernel: return "invalid-kernel";
    case ErrorKind::Sampling: return "sampling-failure";
    case ErrorKind::Precision: return "precision";
    case ErrorKind::Conjecture: return "conjecture-failure";
    case ErrorKind::Internal: return "internal-consistency";
  }
  return "unknown";
}

int error_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage:
    case ErrorKind::Contract: return 2;
    case ErrorKind::InvalidKernel: return 3;
    case ErrorKind::Degenerate:
    case ErrorKind::DivisionByZero: return 4;
    default: return 5;
  }
}

// ---- Field ----

Field::Field(const mpz_class& p, int degree) : p_(p), degree_(degree) {
  if (p_ <= 2 || mpz_probab_prime_p(p_.get_mpz_t(), 30) == 0)
    fail(ErrorKind::Contract, "field modulus must be an odd prime");
  if (degree_ != 1 && degree_ != 2) fail(ErrorKind::Contract, "extension degree must be 1 or 2");
  if (degree_ == 2 && (p_ % 4) != 3)
    fail(ErrorKind::Contract, "F_p^2 = F_p(i) requires p = 3 mod 4");
  ts_q_ = p_ - 1;
  ts_s_ = mpz_scan1(ts_q_.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(ts_q_.get_mpz_t(), ts_q_.get_mpz_t(), ts_s_);
  ts_z_ = 2;
  while (mpz_legendre(ts_z_.get_mpz_t(), p_.get_mpz_t()) != -1) ++ts_z_;
}

mpz_class Field::order() const { return degree_ == 1 ? p_ : p_ * p_; }

Fe Field::zero() const { return Fe(this, 0, 0); }
Fe Field::one() const { return Fe(this, 1, 0); }
Fe Field::from_int(long v) const { return Fe(this, v, 0); }

Fe Field::from_mpz(const mpz_class& c0, const mpz_class& c1) const {
  if (degree_ == 1 && c1 % p_ != 0) fail(ErrorKind::Contract, "prime field element with nonzero i-part");
  return Fe(this, c0, c1);
}

Fe Field::gen() const {
  if (degree_ != 2) fail(ErrorKind::Contract, "no generator i in a prime field");
  return Fe(this, 0, 1);
}

Fe Field::parse(const std::string& s) const {
  mpz_class v, w;
  if (s.size() > 2 && s.front() == '[' && s.back() == ']') {
    auto comma = s.find(',');
    if (degree_ != 2 || comma == std::string::npos || v.set_str(s.substr(1, comma - 1), 10) != 0 ||
        w.set_str(s.substr(comma + 1, s.size() - comma - 2), 10) != 0)
      fail(ErrorKind::Usage, "bad field element '" + s + "'");
    return Fe(this, v, w);
  }
  if (v.set_str(s, 10) != 0) fail(ErrorKind::Usage, "bad field element '" + s + "'");
  return Fe(this, v, 0);
}

Fe Field::random(Rng& rng) const {
  auto draw = [&] {
    mpz_class v = 0;
    std::size_t words = bits() / 64 + 2;
    for (std::size_t k = 0; k < words; ++k) {
      v <<= 64;
      v += static_cast<unsigned long>(rng());
    }
    return mpz_class(v % p_);
  };
  mpz_class c0 = draw();
  mpz_class c1 = degree_ == 2 ? draw() : mpz_class(0);
  return Fe(this, c0, c1);
}

// ---- Fe ----

Fe::Fe(const Field* f, mpz_class c0, mpz_class c1) : f_(f), c0_(std::move(c0)), c1_(std::move(c1)) {
  mpz_fdiv_r(c0_.get_mpz_t(), c0_.get_mpz_t(), f_->p_.get_mpz_t());
  mpz_fdiv_r(c1_.get_mpz_t(), c1_.get_mpz_t(), f_->p_.get_mpz_t());
}

Fe Fe::raw(mpz_class c0, mpz_class c1) const {
  Fe r;
  r.f_ = f_;
  r.c0_ = std::move(c0);
  r.c1_ = std::move(c1);
  return r;
}

Fe Fe::operator+(const Fe& o) const {
  CountHook::a();
  const mpz_class& p = f_->p_;
  mpz_class r0 = c0_ + o.c0_;
  if (r0 >= p) r0 -= p;
  mpz_class r1;
  if (f_->degree_ == 2) {
    r1 = c1_ + o.c1_;
    if (r1 >= p) r1 -= p;
  }
  return raw(std::move(r0), std::move(r1));
}

Fe Fe::operator-(const Fe& o) const {
  CountHook::a();
  const mpz_class& p = f_->p_;
  mpz_class r0 = c0_ - o.c0_;
  if (r0 < 0) r0 += p;
  mpz_class r1;
  if (f_->degree_ == 2) {
    r1 = c1_ - o.c1_;
    if (r1 < 0) r1 += p;
  }
  return raw(std::move(r0), std::move(r1));
}

Fe Fe::operator-() const {
  const mpz_class& p = f_->p_;
  mpz_class r0 = c0_ == 0 ? mpz_class(0) : mpz_class(p - c0_);
  mpz_class r1 = c1_ == 0 ? mpz_class(0) : mpz_class(p - c1_);
  return raw(std::move(r0), std::move(r1));
}

Fe Fe::operator*(const Fe& o) const {
  CountHook::M();
  mpz_srcptr p = f_->p_.get_mpz_t();
  mpz_class r0, r1;
  if (f_->degree_ == 1) {
    mpz_mul(r0.get_mpz_t(), c0_.get_mpz_t(), o.c0_.get_mpz_t());
    mpz_mod(r0.get_mpz_t(), r0.get_mpz_t(), p);
    return raw(std::move(r0), std::move(r1));
  }
  mpz_class t0 = c0_ * o.c0_;
  mpz_class t1 = c1_ * o.c1_;
  r1 = (c0_ + c1_) * (o.c0_ + o.c1_) - t0 - t1;
  r0 = t0 - t1;
  mpz_mod(r0.get_mpz_t(), r0.get_mpz_t(), p);
  mpz_mod(r1.get_mpz_t(), r1.get_mpz_t(), p);
  return raw(std::move(r0), std::move(r1));
}

Fe Fe::sq() const {
  CountHook::S();
  mpz_srcptr p = f_->p_.get_mpz_t();
  mpz_class r0, r1;
  if (f_->degree_ == 1) {
    mpz_mul(r0.get_mpz_t(), c0_.get_mpz_t(), c0_.get_mpz_t());
    mpz_mod(r0.get_mpz_t(), r0.get_mpz_t(), p);
    return raw(std::move(r0), std::move(r1));
  }
  r0 = (c0_ + c1_) * (c0_ - c1_);
  r1 = 2 * c0_ * c1_;
  mpz_mod(r0.get_mpz_t(), r0.get_mpz_t(), p);
  mpz_mod(r1.get_mpz_t(), r1.get_mpz_t(), p);
  return raw(std::move(r0), std::move(r1));
}

Fe Fe::inv() const {
  if (is_zero()) fail(ErrorKind::DivisionByZero, "inversion of zero");
  CountHook::I();
  mpz_srcptr p = f_->p_.get_mpz_t();
  if (f_->degree_ == 1) {
    mpz_class r;
    mpz_invert(r.get_mpz_t(), c0_.get_mpz_t(), p);
    return raw(std::move(r), 0);
  }
  mpz_class n = c0_ * c0_ + c1_ * c1_, ni;
  mpz_mod(n.get_mpz_t(), n.get_mpz_t(), p);
  mpz_invert(ni.get_mpz_t(), n.get_mpz_t(), p);
  mpz_class r0 = c0_ * ni, r1 = -c1_ * ni;
  mpz_mod(r0.get_mpz_t(), r0.get_mpz_t(), p);
  mpz_mod(r1.get_mpz_t(), r1.get_mpz_t(), p);
  return raw(std::move(r0), std::move(r1));
}

Fe Fe::pow(const mpz_class& e) const {
  if (e < 0) return inv().pow(-e);
  Fe r = f_->one();
  std::size_t nb = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t k = nb; k-- > 0;) {
    r = r.sq();
    if (mpz_tstbit(e.get_mpz_t(), k)) r = r * *this;
  }
  return r;
}

Fe Fe::mul_int(long k) const { return *this * f_->from_int(k); }

Fe Fe::conj() const { return Fe(f_, c0_, -c1_); }

Fe Fe::norm() const {
  if (f_->degree_ == 1) return *this;
  return Fe(f_, c0_ * c0_ + c1_ * c1_, 0);
}

bool Fe::is_square() const {
  CountPause pause;
  if (is_zero()) return true;
  // x is a square in F_p^2 iff its norm is a square in F_p.
  mpz_class n = norm().c0_;
  return mpz_legendre(n.get_mpz_t(), f_->p_.get_mpz_t()) == 1;
}

std::optional<Fe> Fe::sqrt_prime() const {
  const mpz_class& p = f_->p_;
  if (c0_ == 0) return *this;
  if (mpz_legendre(c0_.get_mpz_t(), p.get_mpz_t()) != 1) return std::nullopt;
  if (p % 4 == 3) return pow((p + 1) / 4);
  // Tonelli-Shanks
  unsigned long m = f_->ts_s_;
  Fe c = Fe(f_, f_->ts_z_).pow(f_->ts_q_);
  Fe t = pow(f_->ts_q_);
  Fe r = pow((f_->ts_q_ + 1) / 2);
  while (!t.is_one()) {
    unsigned long i = 0;
    Fe u = t;
    while (!u.is_one()) {
      u = u.sq();
      ++i;
    }
    Fe b = c;
    for (unsigned long k = 0; k + i + 1 < m; ++k) b = b.sq();
    m = i;
    c = b.sq();
    t = t * c;
    r = r * b;
  }
  return r;
}

std::optional<Fe> Fe::sqrt() const {
  CountHook::Sq();
  CountPause pause;
  std::optional<Fe> r;
  if (is_zero()) return *this;
  if (f_->degree_ == 1) {
    r = sqrt_prime();
  } else {
    const mpz_class& p = f_->p_;
    Fe a1 = pow((p - 3) / 4);
    Fe alpha = a1 * (a1 * *this);
    Fe x0 = a1 * *this;
    if (alpha == -f_->one()) {
      r = f_->gen() * x0;
    } else {
      Fe b = (f_->one() + alpha).pow((p - 1) / 2);
      r = b * x0;
    }
  }
  if (!r || r->sq() != *this) return std::nullopt;
  Fe neg = -*r;
  if (neg.lex_less(*r)) return neg;
  return r;
}

std::string Fe::str() const {
  if (f_ && f_->degree_ == 2) return "[" + c0_.get_str() + "," + c1_.get_str() + "]";
  return c0_.get_str();
}

std::vector<Fe> batch_invert(const std::vector<Fe>& xs) {
  std::size_t n = xs.size();
  if (n == 0) return {};
  for (std::size_t k = 0; k < n; ++k)
    if (xs[k].is_zero()) fail(ErrorKind::DivisionByZero, "batch_invert: zero at index " + std::to_string(k));
  std::vector<Fe> pre(n);
  pre[0] = xs[0];
  for (std::size_t k = 1; k < n; ++k) pre[k] = pre[k - 1] * xs[k];
  Fe acc = pre[n - 1].inv();
  std::vector<Fe> out(n);
  for (std::size_t k = n - 1; k > 0; --k) {
    out[k] = acc * pre[k - 1];
    acc = acc * xs[k];
  }
  out[0] = acc;
  return out;
}

}  // namespace kummer
