#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kummer/errors.hpp"

namespace kummer {

using Rng = std::mt19937_64;

struct OpCounts {
  std::uint64_t M = 0;
  std::uint64_t S = 0;
  std::uint64_t I = 0;
  std::uint64_t a = 0;
  std::uint64_t Sq = 0;

  OpCounts& operator+=(const OpCounts& o) {
    M += o.M;
    S += o.S;
    I += o.I;
    a += o.a;
    Sq += o.Sq;
    return *this;
  }
};

// Counts field operations performed on this thread while in scope. Scopes
// nest: when an inner counter ends, its totals are added to the enclosing one.
class OpCounter {
 public:
  OpCounter();
  ~OpCounter();
  OpCounter(const OpCounter&) = delete;
  OpCounter& operator=(const OpCounter&) = delete;

  const OpCounts& counts() const { return counts_; }
  void reset() { counts_ = OpCounts{}; }

  static OpCounter* active();

 private:
  friend class CountPause;
  friend struct CountHook;
  OpCounts counts_;
  OpCounter* parent_;
};

// Suspends counting for the current thread while in scope.
class CountPause {
 public:
  CountPause();
  ~CountPause();
  CountPause(const CountPause&) = delete;
  CountPause& operator=(const CountPause&) = delete;

 private:
  OpCounter* saved_;
};

class Fe;

// F_p, or F_p(i) with i^2 = -1 when degree is 2 (requires p = 3 mod 4).
class Field {
 public:
  Field(const mpz_class& p, int degree);

  static std::shared_ptr<const Field> make(const mpz_class& p, int degree = 1) {
    return std::make_shared<const Field>(p, degree);
  }

  const mpz_class& p() const { return p_; }
  int degree() const { return degree_; }
  mpz_class order() const;
  std::size_t bits() const { return mpz_sizeinbase(p_.get_mpz_t(), 2); }

  Fe zero() const;
  Fe one() const;
  Fe from_int(long v) const;
  Fe from_mpz(const mpz_class& c0, const mpz_class& c1 = 0) const;
  Fe gen() const;  // i for degree 2
  Fe parse(const std::string& s) const;
  Fe random(Rng& rng) const;

  bool operator==(const Field& o) const { return degree_ == o.degree_ && p_ == o.p_; }
  bool operator!=(const Field& o) const { return !(*this == o); }

 private:
  friend class Fe;
  mpz_class p_;
  int degree_;
  // Tonelli-Shanks data for F_p: p - 1 = q * 2^s, z a non-residue.
  mpz_class ts_q_;
  unsigned long ts_s_ = 0;
  mpz_class ts_z_;
};

using FieldPtr = std::shared_ptr<const Field>;

class Fe {
 public:
  Fe() = default;
  Fe(const Field* f, mpz_class c0, mpz_class c1 = 0);

  const Field* field() const { return f_; }
  const mpz_class& c0() const { return c0_; }
  const mpz_class& c1() const { return c1_; }

  Fe operator+(const Fe& o) const;
  Fe operator-(const Fe& o) const;
  Fe operator*(const Fe& o) const;
  Fe operator/(const Fe& o) const { return *this * o.inv(); }
  Fe operator-() const;
  Fe& operator+=(const Fe& o) { return *this = *this + o; }
  Fe& operator-=(const Fe& o) { return *this = *this - o; }
  Fe& operator*=(const Fe& o) { return *this = *this * o; }

  Fe sq() const;
  Fe dbl() const { return *this + *this; }
  Fe inv() const;
  Fe pow(const mpz_class& e) const;
  Fe mul_int(long k) const;  // counted as one M
  Fe conj() const;           // Frobenius on F_p^2
  Fe norm() const;           // element of F_p

  bool is_square() const;
  std::optional<Fe> sqrt() const;

  bool is_zero() const { return c0_ == 0 && c1_ == 0; }
  bool is_one() const { return c0_ == 1 && c1_ == 0; }
  bool operator==(const Fe& o) const { return c0_ == o.c0_ && c1_ == o.c1_; }
  bool operator!=(const Fe& o) const { return !(*this == o); }
  // Lexicographic on (c0, c1); used for canonical choices.
  bool lex_less(const Fe& o) const { return c0_ < o.c0_ || (c0_ == o.c0_ && c1_ < o.c1_); }

  std::string str() const;

 private:
  Fe raw(mpz_class c0, mpz_class c1) const;
  std::optional<Fe> sqrt_prime() const;

  const Field* f_ = nullptr;
  mpz_class c0_;
  mpz_class c1_;
};

// Montgomery's trick: one inversion and 3(n-1) multiplications.
std::vector<Fe> batch_invert(const std::vector<Fe>& xs);

}  // namespace kummer
