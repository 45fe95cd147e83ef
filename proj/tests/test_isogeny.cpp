#include <doctest.h>

#include "fixtures.hpp"
#include "kummer/isogeny.hpp"
#include "kummer/suites.hpp"

using namespace kummer;

namespace {

Point4 ints(const Field* f, long a, long b, long c, long d) {
  return {f->from_int(a), f->from_int(b), f->from_int(c), f->from_int(d)};
}

bool proj_equal_forms(const Form& a, const Form& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  const Fe& ca = a.terms().begin()->second;
  Fe cb = b.coeff(mono_of(a.terms().begin()->first));
  if (cb.is_zero()) return false;
  return a.scaled(cb) == b.scaled(ca);
}

struct Golden {
  nlohmann::json fx = fixtures::load("f1697_fast_5.json");
  FieldPtr f = Field::make(1697);
  FastKummer K{f, fixtures::point(f.get(), fx["theta"])};
  Point4 R = fixtures::point(f.get(), fx["kernel"]["R"]);
  Point4 S = fixtures::point(f.get(), fx["kernel"]["S"]);

  Map4 printed_psi() const {
    Map4 m;
    for (int i = 0; i < 4; ++i) m[i] = parse_form(f.get(), fx["expected"]["psi"][i].get<std::string>(), 5);
    return m;
  }
};

// The 30-bit superspecial setting; the working domain is 3-isogenous to (1 : 1 : i : 1).
struct Superspecial30 : Superspecial {
  Superspecial30() : Superspecial(mpz_class(kTestPrime)) {}
};

struct GeneralExample {
  nlohmann::json fx = fixtures::load("f11_general_5.json");
  FieldPtr f = Field::make(11);
  Genus2Curve c = curve(fx["curve"]);
  GeneralArithmetic g{GeneralKummer(c), BiquadraticTable::load(c)};
  Point4 R = fixtures::point(f.get(), fx["kernel"]["R"]);
  Point4 S = fixtures::point(f.get(), fx["kernel"]["S"]);

  Genus2Curve curve(const nlohmann::json& v) const {
    Genus2Curve r;
    for (int i = 0; i < 7; ++i) r.f[i] = fixtures::fe(f.get(), v[i]);
    return r;
  }
  Form form(const std::string& key, int i = -1, int deg = 5) const {
    const auto& v = i < 0 ? fx["expected"][key] : fx["expected"][key][i];
    return parse_form(f.get(), v.get<std::string>(), deg);
  }
};

// phi(P + R) and phi(P - R) both equal phi(P) for kernel points R.
bool kernel_invariant(const FastKummer& k, const Map4& phi, const Point4& p, const Point4& r) {
  auto [s, d] = k.sum_and_difference(p, r);
  Point4 q = evaluate(phi, p);
  return proj_equal(evaluate(phi, s), q) && proj_equal(evaluate(phi, d), q);
}

void check_end_to_end(const Superspecial30& ss, const FastKummer& k, const IsogenyKernel& ker, const FastIsogeny& iso,
                      Rng& rng) {
  FastKummer image(k.field_ptr(), iso.image_theta);
  for (const auto* mult : {&ker.mult_R, &ker.mult_S})
    for (const auto& p : *mult) CHECK(image.is_identity(evaluate(iso.phi, p)));
  for (int t = 0; t < 20; ++t) {
    Point4 p = ss.point(rng);
    Point4 q = evaluate(iso.phi, p);
    CHECK(image.on_surface(q));
    if (t < 3) {
      CHECK(kernel_invariant(k, iso.phi, p, ker.R));
      CHECK(kernel_invariant(k, iso.phi, p, ker.S));
    }
    if (t == 0)
      for (int i = 1; i < 16; ++i) CHECK(proj_equal(evaluate(iso.phi, k.sigma(i, p)), image.sigma(i, q)));
  }
}

}  // namespace

TEST_CASE("index list") {
  auto idx = index_list(5);
  REQUIRE(idx.size() == 12);
  CHECK(idx[0].counts == std::array<int, 4>{5, 0, 0, 0});
  CHECK(idx[0].cls == 1);
  CHECK(idx[1].counts == std::array<int, 4>{4, 1, 0, 0});
  CHECK(idx[1].cls == 2);
  CHECK(idx[6].counts == std::array<int, 4>{0, 0, 5, 0});
  CHECK(idx[6].cls == 3);
  CHECK(idx[11].counts == std::array<int, 4>{0, 0, 0, 5});
  CHECK(idx[11].cls == 4);
  for (int N : {3, 7, 9}) {
    auto l = index_list(N);
    CHECK(l.size() == std::size_t(2 * (N + 1)));
    std::array<int, 5> per{};
    for (const auto& m : l) ++per[m.cls];
    for (int c = 1; c <= 4; ++c) CHECK(per[c] == (N + 1) / 2);
  }
  auto gen = index_list(5, Model::General);
  CHECK(gen[1].counts == std::array<int, 4>{4, 0, 0, 1});
  CHECK(gen[7].counts == std::array<int, 4>{0, 4, 1, 0});
  CHECK_THROWS_AS(index_list(4), Error);
  CHECK_THROWS_AS(index_list(1), Error);
}

TEST_CASE("product tree agrees with direct enumeration") {
  Golden g;
  auto ker = make_kernel(g.K, 5, g.R, g.S);
  auto r = pair_forms(g.K, ker.mult_R);
  auto tree = index_forms(r, 5);
  auto idx = index_list(5);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    CHECK(tree[i] == invariant_form(r, idx[i].counts));
    CHECK(form_class(reduce_mod_quartic(tree[i], g.K.quartic())) == idx[i].cls);
  }

  Superspecial30 ss;
  Rng rng(71);
  auto k7 = ss.kernel(7, rng);
  auto r7 = pair_forms(ss.K, k7.mult_R);
  auto t7 = index_forms(r7, 7);
  auto i7 = index_list(7);
  for (std::size_t i : {0u, 3u, 8u, 13u}) CHECK(t7[i] == invariant_form(r7, i7[i].counts));
}

TEST_CASE("invariant forms are constant on kernel cosets") {
  Superspecial30 ss;
  Rng rng(5);
  auto ker = ss.kernel(5, rng);
  auto b = find_basis(ss.K, ker.mult_R, 5);
  Point4 p = ss.point(rng);
  auto [s, d] = ss.K.sum_and_difference(p, ker.R);
  // one common factor relates f(P) and f(P +- R) across the whole basis
  std::vector<Form> all;
  for (const auto& part : b.parts) all.insert(all.end(), part.begin(), part.end());
  for (const Point4& q : {s, d}) {
    Fe num, den;
    bool set = false;
    for (const auto& f : all) {
      Fe a = f.eval(p), c = f.eval(q);
      if (!set && !a.is_zero()) {
        num = c;
        den = a;
        set = true;
      }
      CHECK(c * den == a * num);
    }
    CHECK(set);
  }
}

TEST_CASE("golden (5,5)-isogeny over F_1697") {
  Golden g;
  auto ker = make_kernel(g.K, 5, g.R, g.S);
  auto iso = get_isogeny(g.K, ker);
  CHECK(iso.branch == ScalingBranch::Five);
  Map4 printed = g.printed_psi();
  const Form& Kq = g.K.quartic();
  for (int i = 0; i < 4; ++i)
    CHECK(proj_equal_forms(reduce_mod_quartic(iso.psi[i], Kq), reduce_mod_quartic(printed[i], Kq)));
  CHECK(proj_equal(iso.image_theta, fixtures::point(g.f.get(), g.fx["expected"]["image_theta"])));
  REQUIRE(iso.image_constants.has_value());
  FastKummer image(g.f, iso.image_theta);
  CHECK(iso.image_constants->E == image.E());
  CHECK(iso.image_constants->H == image.H());
}

TEST_CASE("scaling routines on the printed quintic map") {
  Golden g;
  Map4 psi = g.printed_psi();
  Point4 want = fixtures::point(g.f.get(), g.fx["expected"]["lambda"]);
  const Field* k = g.f.get();
  // the coefficient relations quoted with the example
  CHECK(psi[0].coeff({0, 1, 1, 3}) == k->from_int(331));
  CHECK(psi[1].coeff({1, 0, 3, 1}) * want[1] == k->from_int(331));
  CHECK(psi[2].coeff({1, 3, 0, 1}) * want[2] == k->from_int(331));
  CHECK(psi[2].coeff({1, 1, 0, 3}) * want[2] == psi[3].coeff({1, 1, 3, 0}) * want[3]);
  auto s5 = scaling_5(psi);
  REQUIRE(s5.has_value());
  CHECK(proj_equal(s5->lambda, want));
  auto ge = scaling_ge(psi, g.K);
  REQUIRE(ge.has_value());
  CHECK(ge->lambda == want);
  auto sq = scaling_sqrt(psi, g.K);
  REQUIRE(sq.has_value());
  CHECK(sq->lambda == want);
  Point4 img = evaluate(s5->phi, g.K.theta());
  CHECK(proj_equal(img, fixtures::point(k, g.fx["expected"]["image_theta"])));
}

TEST_CASE("Scaling_5 declines a map with a missing coefficient") {
  Golden g;
  Map4 psi = g.printed_psi();
  psi[3] = psi[3] - Form::monomial(g.f.get(), {1, 1, 3, 0}, psi[3].coeff({1, 1, 3, 0}));
  CHECK_FALSE(scaling_5(psi).has_value());
}

TEST_CASE("GetImage matches the image surface constants") {
  Golden g;
  Map4 psi = g.printed_psi();
  auto s5 = scaling_5(psi);
  REQUIRE(s5.has_value());
  Point4 theta = evaluate(s5->phi, g.K.theta());
  FastKummer image(g.f, theta);
  // unscaled inputs: the constants do not depend on lambda
  auto ic = get_image(image_inputs(psi, g.K.theta()));
  CHECK(ic.E == image.E());
  CHECK(ic.F == image.F());
  CHECK(ic.G == image.G());
  CHECK(ic.H == image.H());
  CHECK(proj_equal(ic.theta_sq, {theta[0].sq(), theta[1].sq(), theta[2].sq(), theta[3].sq()}));
}

TEST_CASE("operation budgets for scaling and image constants") {
  Golden g;
  Map4 psi = g.printed_psi();
  OpCounts c5;
  {
    OpCounter ctr;
    auto s = scaling_5(psi);
    c5 = ctr.counts();
    REQUIRE(s.has_value());
  }
  CHECK(c5.M + c5.S <= 62);
  CHECK(c5.I == 0);
  auto in = image_inputs(psi, g.K.theta());
  OpCounts ci;
  {
    OpCounter ctr;
    get_image(in);
    ci = ctr.counts();
  }
  CHECK(ci.M <= 34);
  CHECK(ci.S <= 4);
  CHECK(ci.I <= 1);
  CHECK(ci.a <= 20);
  CHECK(ci.Sq == 0);
}

TEST_CASE("cost model") {
  CHECK(cost_model(5, 100).branch == ScalingBranch::Five);
  CHECK(cost_model(3, 30).branch == ScalingBranch::GE);
  CHECK(cost_model(7, 100).branch == ScalingBranch::Sqrt);
  CHECK(cost_model(7, 121).branch == ScalingBranch::GE);
  CHECK(cost_model(11, 100).branch == ScalingBranch::Sqrt);
  CHECK(cost_model(11, 4000).branch == ScalingBranch::Sqrt);
  auto c = cost_model(7, 100);
  CHECK(c.ge_unknowns == 5);
  CHECK(c.basis_Mpoly == doctest::Approx(9 * 26));
  CHECK(c.basis_apoly == doctest::Approx(2 * (27 - 8)));
  CHECK(c.intersection_M == doctest::Approx(8.0 * 19 * 6 / 6));
  CHECK(c.sqrt_M == doctest::Approx(10 + 12 * 30));
  CHECK_THROWS_AS(cost_model(6, 100), Error);
  CHECK(parse_branch("GE") == ScalingBranch::GE);
  CHECK(std::string(branch_name(ScalingBranch::Sqrt)) == "sqrt");
  CHECK_THROWS_AS(parse_branch("fast"), Error);
}

TEST_CASE("dimension laws and intersections") {
  Superspecial30 ss;
  for (int N : {3, 5, 7}) {
    Rng rng(1000 + N);
    for (int inst = 0; inst < 10; ++inst) {
      auto ker = ss.kernel(N, rng);
      auto bR = find_basis(ss.K, ker.mult_R, N);
      auto bS = find_basis(ss.K, ker.mult_S, N);
      std::vector<Form> all;
      for (int c = 0; c < 4; ++c) {
        CHECK(bR.parts[c].size() == std::size_t(N + 1) / 2);
        CHECK(form_rank(bR.parts[c]) == std::size_t(N + 1) / 2);
        all.insert(all.end(), bR.parts[c].begin(), bR.parts[c].end());
        auto inter = find_intersection(bR.parts[c], bS.parts[c], 1);
        CHECK(form_class(inter[0]) == c + 1);
      }
      CHECK(form_rank(all) == std::size_t(2 * (N + 1)));
    }
  }
}

TEST_CASE("dependent kernel generators are rejected") {
  Golden g;
  auto fail_kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  auto same = make_kernel(g.K, 5, g.R, g.R);
  CHECK(fail_kind([&] { get_isogeny(g.K, same); }) == ErrorKind::InvalidKernel);
  auto dbl = make_kernel(g.K, 5, g.R, g.K.dbl(g.R));
  CHECK(fail_kind([&] { get_isogeny(g.K, dbl); }) == ErrorKind::InvalidKernel);
  CHECK(fail_kind([&] { make_kernel(g.K, 7, g.R, g.S); }) == ErrorKind::InvalidKernel);
  CHECK(fail_kind([&] { make_kernel(g.K, 5, g.R, g.K.theta()); }) == ErrorKind::InvalidKernel);
  CHECK(fail_kind([&] { make_kernel(g.K, 4, g.R, g.S); }) == ErrorKind::Usage);
}

TEST_CASE("index list rank failures fall back to full enumeration") {
  Superspecial30 ss;
  // the fifth N = 5 kernel drawn with this seed on the base surface defeats the index list
  Rng rng(1005);
  std::pair<Point4, Point4> rs;
  for (int inst = 0; inst < 5; ++inst) rs = ss.base.sample_kernel(5, ss.order / 5, rng);
  auto ker = make_kernel(ss.base, 5, rs.first, rs.second);
  BasisOptions off;
  off.check_rank = false;
  auto b = find_basis(ss.base, ker.mult_R, 5, off);
  CHECK(form_rank(b.parts[0]) == 2);
  BasisOptions strict;
  strict.fallback_full_enumeration = false;
  try {
    find_basis(ss.base, ker.mult_R, 5, strict);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Conjecture);
  }
  auto e = find_basis(ss.base, ker.mult_R, 5);
  CHECK(e.enumerated);
  for (int c = 0; c < 4; ++c) CHECK(form_rank(e.parts[c]) == 3);
  auto iso = get_isogeny(ss.base, ker);
  CHECK(iso.enumerated);
  FastKummer image(ss.f, iso.image_theta);
  Point4 p = ss.base.sample_point(rng);
  CHECK(image.on_surface(evaluate(iso.phi, p)));
}

TEST_CASE("general index families reach full rank where the Fast pairing does not") {
  GeneralExample ex;
  auto ker = make_kernel(ex.g, 5, ex.R, ex.S);
  auto r = pair_forms(ex.g.table(), ker.mult_R);
  const auto& s = ex.g.surface();
  std::vector<Form> fast, general;
  for (const auto& f : index_forms(r, 5, Model::Fast)) fast.push_back(reduce_general(f, s));
  for (const auto& f : index_forms(r, 5, Model::General)) general.push_back(reduce_general(f, s));
  CHECK(form_rank(fast) == 10);
  CHECK(form_rank(general) == 12);
}

TEST_CASE("full enumeration spans the same invariant spaces") {
  Golden g;
  auto ker = make_kernel(g.K, 5, g.R, g.S);
  auto b = find_basis(g.K, ker.mult_R, 5);
  auto e = find_basis_enumerated(g.K, ker.mult_R, 5);
  CHECK(e.enumerated);
  BasisOptions forced;
  forced.force_enumeration = true;
  CHECK(find_basis(g.K, ker.mult_R, 5, forced).parts[1] == e.parts[1]);
  for (int c = 0; c < 4; ++c) {
    REQUIRE(e.parts[c].size() == 3);
    std::vector<Form> both = b.parts[c];
    both.insert(both.end(), e.parts[c].begin(), e.parts[c].end());
    CHECK(form_rank(both) == 3);
  }
  // second call is served from the cached selection
  auto again = find_basis_enumerated(g.K, ker.mult_R, 5);
  for (int c = 0; c < 4; ++c) CHECK(again.parts[c] == e.parts[c]);
}

TEST_CASE("(5,5) and (7,7) isogenies on a superspecial surface") {
  Superspecial30 ss;
  for (int N : {5, 7}) {
    Rng rng(40 + N);
    auto ker = ss.kernel(N, rng);
    IsogenyOptions opt;
    opt.validation_points = 4;
    auto iso = get_isogeny(ss.K, ker, opt);
    check_end_to_end(ss, ss.K, ker, iso, rng);
    // GE and sqrt give the same map up to one overall scalar
    opt.branch = ScalingBranch::GE;
    auto a = get_isogeny(ss.K, ker, opt);
    opt.branch = ScalingBranch::Sqrt;
    auto b = get_isogeny(ss.K, ker, opt);
    CHECK(a.lambda == b.lambda);
    CHECK(proj_equal(a.image_theta, b.image_theta));
    CHECK(proj_equal(a.image_theta, iso.image_theta));
  }
}

TEST_CASE("(11,11) isogeny on a superspecial surface") {
  Superspecial30 ss;
  Rng rng(111);
  auto ker = ss.kernel(11, rng);
  IsogenyOptions opt;
  opt.branch = ScalingBranch::Sqrt;
  auto iso = get_isogeny(ss.K, ker, opt);
  check_end_to_end(ss, ss.K, ker, iso, rng);
  opt.branch = ScalingBranch::GE;
  auto ge = get_isogeny(ss.K, ker, opt);
  CHECK(ge.lambda == iso.lambda);
}

TEST_CASE("isogeny images are valid domains") {
  Superspecial30 ss;
  Rng rng(9);
  auto ker = ss.kernel(3, rng);
  auto iso = get_isogeny(ss.K, ker);
  FastKummer image(ss.f, iso.image_theta);
  Point4 p = ss.point(rng);
  Point4 q = evaluate(iso.phi, p);
  // phi commutes with doubling
  CHECK(proj_equal(evaluate(iso.phi, ss.K.dbl(p)), image.dbl(q)));
}

TEST_CASE("general model (5,5)-isogeny over F_11") {
  GeneralExample ex;
  const Field* k = ex.f.get();
  CHECK(proj_equal(ex.g.dbl(ex.R), fixtures::point(k, ex.fx["expected"]["2R"])));
  CHECK(proj_equal(ex.g.dbl(ex.S), fixtures::point(k, ex.fx["expected"]["2S"])));
  auto ker = make_kernel(ex.g, 5, ex.R, ex.S);
  auto iso = general_pipeline(ex.g, ker);
  // S = (0,1,0,0) is not served by the index list
  CHECK(iso.enumerated);
  const auto& s = ex.g.surface();
  for (int i = 0; i < 3; ++i) CHECK(iso.ell[i] == ex.form("ell", i));
  // the printed fourth form already carries the cross-term shift: it is l4'
  CHECK(iso.phi[3] == ex.form("ell", 3));
  CHECK(iso.ell[3].coeff({0, 0, 0, 5}) == k->one());
  CHECK(iso.ell[3].coeff({1, 0, 0, 4}).is_zero());
  CHECK(iso.quartic == ex.form("quartic", -1, 4));
  for (int i = 0; i < 3; ++i) CHECK(iso.u[i] == fixtures::fe(k, ex.fx["expected"]["u"][i]));
  Genus2Curve want = ex.curve(ex.fx["expected"]["image_curve"]);
  CHECK(iso.image == want);
  CHECK(iso.target_quartic == GeneralKummer(want).quartic());
  // the printed target quartic drops the k1^4, k1 k3^3 and k2 k3^3 terms
  Form printed_target = ex.form("target_quartic", -1, 4);
  Form gap = iso.target_quartic - printed_target;
  CHECK(gap.size() == 3);
  for (const Mono& m : {Mono{4, 0, 0, 0}, Mono{1, 0, 3, 0}, Mono{0, 1, 3, 0}}) {
    CHECK(printed_target.coeff(m).is_zero());
    CHECK(gap.coeff(m) == iso.target_quartic.coeff(m));
  }

  // the printed forms, with l4 restored, satisfy the printed quartic
  Map4 printed{ex.form("ell", 0), ex.form("ell", 1), ex.form("ell", 2), ex.form("ell", 3)};
  Fe two = k->from_int(2);
  printed[3] = printed[3] + (printed[0] + printed[1] + printed[2]).scaled(two);
  CHECK(printed[3] == iso.ell[3]);
  CHECK(recover_quartic(printed, s) == ex.form("quartic", -1, 4));
}

TEST_CASE("general model maps sampled points onto the image") {
  GeneralExample ex;
  auto ker = make_kernel(ex.g, 5, ex.R, ex.S);
  auto iso = general_pipeline(ex.g, ker);
  GeneralKummer image(iso.image);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Point4 q = evaluate(iso.phi, ex.g.surface().sample_point(rng));
    CHECK(image.on_surface(q));
  }
}

TEST_CASE("normal form is independent of the admissible order") {
  GeneralExample ex;
  const auto& s = ex.g.surface();
  Form l = ex.form("ell", 0);
  Form sq = l * l;
  CHECK(normal_form(sq, s.quartic(), {3, 1, 0, 2}) == normal_form(sq, s.quartic(), {3, 1, 2, 0}));
  CHECK(normal_form(s.quartic(), s.quartic(), {3, 1, 0, 2}).is_zero());
}

TEST_CASE("general pipeline rejects a dependent kernel") {
  GeneralExample ex;
  auto ker = make_kernel(ex.g, 5, ex.R, ex.g.dbl(ex.R));
  CHECK_THROWS_AS(general_pipeline(ex.g, ker), Error);
}

TEST_CASE("form text round trip") {
  Golden g;
  Map4 psi = g.printed_psi();
  for (const auto& f : psi) CHECK(parse_form(g.f.get(), format_form(f), 5) == f);
  CHECK(format_form(parse_form(g.f.get(), "k1 k4^4 - 2 k_2^2 k_4^3", 5), true) == "k1 k4^4 + 1695 k2^2 k4^3");
  CHECK_THROWS_AS(parse_form(g.f.get(), "X^2 Y", 2), Error);
  CHECK_THROWS_AS(parse_form(g.f.get(), "X^2 W", 3), Error);
}
