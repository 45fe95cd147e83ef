#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kummer/isogeny.hpp"

namespace kummer {

// Superspecial setting over F_p^2 with p = 3 mod 4: every rational point on the
// surface (1 : 1 : i : 1) is killed by p + 1. Kernels on that base surface can
// defeat the index list, so the working domain K is the image of a fixed
// (3,3)-isogeny (requires 3 | p + 1).
struct Superspecial {
  explicit Superspecial(const mpz_class& p, std::uint64_t seed = 5);

  FieldPtr f;
  mpz_class order;  // p + 1
  FastKummer base;
  FastKummer K;

  IsogenyKernel kernel(int N, Rng& rng) const;
  Point4 point(Rng& rng) const;  // a rational point of K
};

// 30-bit test prime: 2^4 * 3 * 5 * 7 * 11 divides p + 1.
inline const char* kTestPrime = "924018479";

struct SuiteResult {
  std::string name;
  bool passed = false;
  int checks = 0;
  int failures = 0;
  std::string detail;  // first failure, or a summary
};

// "fast_map", "biquadratic_identity", "f101_sparse", "dimension_laws".
std::vector<std::string> suite_names();
// An empty name runs every suite; an unknown one throws Usage.
std::vector<SuiteResult> run_suites(const std::string& name, std::uint64_t seed);

// Fixtures shipped with the sources; KUMMER_FIXTURE_DIR in the environment overrides.
std::string default_fixture_dir();

}  // namespace kummer
