#include <doctest.h>

#include "kummer/field.hpp"

using namespace kummer;

TEST_CASE("prime field arithmetic") {
  auto f = Field::make(11);
  CHECK(f->from_int(7) * f->from_int(8) == f->one());
  CHECK(f->from_int(3).inv() == f->from_int(4));
  CHECK((-f->from_int(3)) == f->from_int(8));
  auto g = Field::make(1697);
  CHECK(g->from_int(289) * g->from_int(283) == g->from_int(331));
  CHECK_THROWS_AS(f->zero().inv(), Error);
}

TEST_CASE("field validation") {
  CHECK_THROWS_AS(Field::make(15), Error);
  CHECK_THROWS_AS(Field::make(2), Error);
  CHECK_THROWS_AS(Field::make(13, 2), Error);  // 13 = 1 mod 4
  CHECK_NOTHROW(Field::make(11, 2));
}

TEST_CASE("batch inversion") {
  auto f = Field::make(11);
  auto r = batch_invert({f->from_int(2), f->from_int(3), f->from_int(4)});
  CHECK(r == std::vector<Fe>{f->from_int(6), f->from_int(4), f->from_int(3)});
  CHECK(batch_invert({f->from_int(5)})[0] == f->from_int(5).inv());
  try {
    batch_invert({f->from_int(5), f->zero(), f->from_int(7)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivisionByZero);
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }

  auto h = Field::make(1000003, 2);
  Rng rng(5);
  for (int len = 1; len <= 100; len += 33) {
    std::vector<Fe> xs;
    for (int k = 0; k < len; ++k) xs.push_back(h->random(rng));
    auto ys = batch_invert(xs);
    for (int k = 0; k < len; ++k) CHECK(ys[k] == xs[k].inv());
  }
}

TEST_CASE("square roots") {
  auto f = Field::make(11);
  CHECK(*f->from_int(4).sqrt() == f->from_int(2));
  CHECK(*f->zero().sqrt() == f->zero());
  CHECK_FALSE(f->from_int(2).sqrt().has_value());
  int squares = 0;
  for (int x = 1; x < 11; ++x) squares += f->from_int(x).is_square();
  CHECK(squares == 5);

  // p = 1 mod 4 exercises Tonelli-Shanks proper.
  auto t = Field::make(1000000009);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    Fe x = t->random(rng);
    Fe s = x.sq();
    CHECK(s.is_square());
    auto r = s.sqrt();
    REQUIRE(r.has_value());
    CHECK(r->sq() == s);
  }

  auto q = Field::make(924018479, 2);
  for (int k = 0; k < 50; ++k) {
    Fe x = q->random(rng);
    auto r = x.sq().sqrt();
    REQUIRE(r.has_value());
    CHECK(r->sq() == x.sq());
    CHECK(!(-*r).lex_less(*r));
    Fe y = q->random(rng);
    CHECK(y.is_square() == y.sqrt().has_value());
  }
}

TEST_CASE("extension field identities") {
  auto q = Field::make(1699, 2);
  Fe i = q->gen();
  CHECK(i.sq() == -q->one());
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    Fe x = q->random(rng);
    if (x.is_zero()) continue;
    CHECK(x * x.inv() == q->one());
    CHECK(x.norm() == x * x.conj());
    CHECK(x.pow(q->order() - 1) == q->one());
  }
  CHECK(q->from_mpz(3, 5).str() == "[3,5]");
}

TEST_CASE("operation counters nest") {
  auto f = Field::make(101);
  Fe x = f->from_int(5), y = f->from_int(7);
  OpCounter outer;
  {
    OpCounter inner;
    x* y;
    x.sq();
    x + y;
    x.inv();
    CHECK(inner.counts().M == 1);
    CHECK(inner.counts().S == 1);
    CHECK(inner.counts().a == 1);
    CHECK(inner.counts().I == 1);
  }
  x - y;
  CHECK(outer.counts().M == 1);
  CHECK(outer.counts().a == 2);
  {
    CountPause pause;
    x* y;
  }
  CHECK(outer.counts().M == 1);
  outer.reset();
  CHECK(outer.counts().a == 0);
}
