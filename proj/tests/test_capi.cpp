#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "kummer/kummer_c.h"

using nlohmann::json;

namespace {

struct FieldFree {
  void operator()(kummer_field* f) const { kummer_field_free(f); }
};
struct SurfaceFree {
  void operator()(kummer_surface* s) const { kummer_surface_free(s); }
};
struct IsogenyFree {
  void operator()(kummer_isogeny* i) const { kummer_isogeny_free(i); }
};

json take(char* s) {
  json j = json::parse(s);
  kummer_string_free(s);
  return j;
}

const char* const kTheta[4] = {"883", "375", "1692", "1586"};
const char* const kR[4] = {"1593", "713", "1161", "1"};
const char* const kS[4] = {"615", "1249", "125", "1"};

}  // namespace

TEST_CASE("C API: golden isogeny and deterministic JSON") {
  kummer_field* fr = nullptr;
  REQUIRE(kummer_field_new("1697", 1, &fr) == KUMMER_OK);
  std::unique_ptr<kummer_field, FieldFree> f(fr);
  kummer_surface* sr = nullptr;
  REQUIRE(kummer_fast_new(f.get(), kTheta, &sr) == KUMMER_OK);
  std::unique_ptr<kummer_surface, SurfaceFree> s(sr);

  int on = 0;
  REQUIRE(kummer_surface_contains(s.get(), kR, &on) == KUMMER_OK);
  CHECK(on == 1);
  char* out = nullptr;
  REQUIRE(kummer_surface_multiply(s.get(), "5", kR, &out) == KUMMER_OK);
  CHECK(take(out)["identity"] == true);

  std::string first;
  for (int run = 0; run < 2; ++run) {
    kummer_isogeny* ir = nullptr;
    REQUIRE(kummer_isogeny_new(s.get(), 5, kR, kS, nullptr, &ir) == KUMMER_OK);
    std::unique_ptr<kummer_isogeny, IsogenyFree> iso(ir);
    REQUIRE(kummer_isogeny_json(iso.get(), &out) == KUMMER_OK);
    std::string text = out;
    kummer_string_free(out);
    if (run == 0) first = text;
    CHECK(text == first);
    json j = json::parse(text);
    CHECK(j["branch"] == "5");
    CHECK(j["N"] == 5);
    CHECK(j["phi"].size() == 4);
    // terms in descending lexicographic order of exponents
    for (const auto& g : j["phi"])
      for (std::size_t t = 1; t < g.size(); ++t)
        CHECK(g[t - 1]["exponents"].get<std::vector<int>>() > g[t]["exponents"].get<std::vector<int>>());
    for (const char* key : {"M", "S", "I", "a", "Sq"}) CHECK(j["op_counts"].contains(key));
    // image theta is (381 : 960 : 69 : 1199) up to scale; compare cross ratios mod 1697
    auto v = [&](int i) { return std::stol(j["image"]["theta"][i].get<std::string>()); };
    const long want[4] = {381, 960, 69, 1199};
    for (int i = 1; i < 4; ++i) CHECK((v(i) * want[0] - v(0) * want[i]) % 1697 == 0);

    REQUIRE(kummer_isogeny_evaluate(iso.get(), kR, &out) == KUMMER_OK);
    json e = take(out);
    CHECK(e["on_image"] == true);
  }
}

TEST_CASE("C API: status codes and error kinds") {
  kummer_field* fr = nullptr;
  CHECK(kummer_field_new("12", 1, &fr) != KUMMER_OK);
  CHECK(kummer_field_new("abc", 1, &fr) == KUMMER_ERR_USAGE);
  CHECK(std::string(kummer_last_error_kind()) == "usage");
  REQUIRE(kummer_field_new("1697", 1, &fr) == KUMMER_OK);
  std::unique_ptr<kummer_field, FieldFree> f(fr);

  kummer_surface* sr = nullptr;
  const char* degenerate[4] = {"1", "1", "1", "1"};
  CHECK(kummer_fast_new(f.get(), degenerate, &sr) == KUMMER_ERR_DEGENERATE);
  CHECK(std::string(kummer_last_error_kind()) == "degenerate-parameters");
  REQUIRE(kummer_fast_new(f.get(), kTheta, &sr) == KUMMER_OK);
  std::unique_ptr<kummer_surface, SurfaceFree> s(sr);

  kummer_isogeny* ir = nullptr;
  CHECK(kummer_isogeny_new(s.get(), 5, kR, kR, nullptr, &ir) == KUMMER_ERR_INVALID_KERNEL);
  CHECK(std::string(kummer_last_error_kind()) == "invalid-kernel");
  CHECK(kummer_isogeny_new(s.get(), 4, kR, kS, nullptr, &ir) == KUMMER_ERR_USAGE);
  kummer_isogeny_options o;
  kummer_isogeny_options_init(&o);
  o.branch = "fast";
  CHECK(kummer_isogeny_new(s.get(), 5, kR, kS, &o, &ir) == KUMMER_ERR_USAGE);
  CHECK(kummer_isogeny_new(nullptr, 5, kR, kS, nullptr, &ir) == KUMMER_ERR_USAGE);
  CHECK(ir == nullptr);
}

TEST_CASE("C API: general model over F_11") {
  kummer_field* fr = nullptr;
  REQUIRE(kummer_field_new("11", 1, &fr) == KUMMER_OK);
  std::unique_ptr<kummer_field, FieldFree> f(fr);
  const char* curve[7] = {"3", "9", "10", "9", "3", "1", "0"};
  kummer_surface* sr = nullptr;
  REQUIRE(kummer_general_new(f.get(), curve, nullptr, &sr) == KUMMER_OK);
  std::unique_ptr<kummer_surface, SurfaceFree> s(sr);
  const char* R[4] = {"0", "1", "4", "5"};
  const char* S[4] = {"0", "1", "0", "0"};
  kummer_isogeny* ir = nullptr;
  REQUIRE(kummer_isogeny_new(s.get(), 5, R, S, nullptr, &ir) == KUMMER_OK);
  std::unique_ptr<kummer_isogeny, IsogenyFree> iso(ir);
  char* out = nullptr;
  REQUIRE(kummer_isogeny_json(iso.get(), &out) == KUMMER_OK);
  json j = take(out);
  CHECK(j["image"]["curve"] == json::array({"2", "3", "4", "9", "5", "1", "5"}));
  CHECK(j["u"] == json::array({"2", "2", "2"}));
  CHECK(j["branch"].is_null());
}

TEST_CASE("C API: F_101 diagonalization") {
  kummer_field* fr = nullptr;
  REQUIRE(kummer_field_new("101", 1, &fr) == KUMMER_OK);
  std::unique_ptr<kummer_field, FieldFree> f(fr);
  const char* const h[3][3] = {{"13", "15", "1"}, {"83", "53", "1"}, {"64", "10", "1"}};
  const char* const e1[2] = {"52", "49"};
  const char* const e2[2] = {"33", "68"};
  char* out = nullptr;
  REQUIRE(kummer_diagonalize(f.get(), h, e1, e2, &out) == KUMMER_OK);
  json j = take(out);
  CHECK(j["resultants"] == json::array({"78", "79"}));
  CHECK(j["quartic"].size() == 11);
  CHECK(j["quartic"][0]["exponents"] == json::array({4, 0, 0, 0}));
  CHECK(j["quartic"][0]["coefficient"] == "50");
}

TEST_CASE("C API: degree 2 elements") {
  kummer_field* fr = nullptr;
  REQUIRE(kummer_field_new("924018479", 2, &fr) == KUMMER_OK);
  std::unique_ptr<kummer_field, FieldFree> f(fr);
  const char* theta[4] = {"1", "1", "[0,1]", "1"};
  kummer_surface* sr = nullptr;
  REQUIRE(kummer_fast_new(f.get(), theta, &sr) == KUMMER_OK);
  std::unique_ptr<kummer_surface, SurfaceFree> s(sr);
  char* out = nullptr;
  REQUIRE(kummer_surface_json(s.get(), &out) == KUMMER_OK);
  json j = take(out);
  CHECK(j["theta"][2] == json::array({"0", "1"}));
  CHECK(j["field"]["degree"] == 2);
}
