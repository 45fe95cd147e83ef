#ifndef KUMMER_C_H
#define KUMMER_C_H

#include <stdint.h>

#if defined(__GNUC__)
#define KUMMER_API __attribute__((visibility("default")))
#else
#define KUMMER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; they double as CLI exit codes. */
typedef enum {
  KUMMER_OK = 0,
  KUMMER_ERR_USAGE = 2,
  KUMMER_ERR_INVALID_KERNEL = 3,
  KUMMER_ERR_DEGENERATE = 4,
  KUMMER_ERR_INTERNAL = 5
} kummer_status;

typedef struct kummer_field kummer_field;
typedef struct kummer_surface kummer_surface;
typedef struct kummer_isogeny kummer_isogeny;

/* Message and error-kind name of the last failure on this thread. */
KUMMER_API const char* kummer_last_error(void);
KUMMER_API const char* kummer_last_error_kind(void);

/* Strings returned through char** are owned by the caller. */
KUMMER_API void kummer_string_free(char* s);

/* Elements are decimal strings, or "[c0,c1]" for c0 + c1*i in degree 2. */
KUMMER_API kummer_status kummer_field_new(const char* p, int degree, kummer_field** out);
KUMMER_API void kummer_field_free(kummer_field* f);

/* Fast model from theta constants a, b, c, d. */
KUMMER_API kummer_status kummer_fast_new(const kummer_field* f, const char* const theta[4], kummer_surface** out);
/* General model of y^2 = f6 x^6 + ... + f0, coefficients f0..f6. The optional
   table path selects the biquadratic data (NULL: bundled table). */
KUMMER_API kummer_status kummer_general_new(const kummer_field* f, const char* const curve[7], const char* table_path,
                                 kummer_surface** out);
KUMMER_API void kummer_surface_free(kummer_surface* s);

/* Surface description as JSON. */
KUMMER_API kummer_status kummer_surface_json(const kummer_surface* s, char** json);
KUMMER_API kummer_status kummer_surface_contains(const kummer_surface* s, const char* const point[4], int* on_surface);
/* [n]P as a JSON array of four elements, plus whether it is the identity. */
KUMMER_API kummer_status kummer_surface_multiply(const kummer_surface* s, const char* n, const char* const point[4],
                                      char** json);

typedef struct {
  const char* branch;              /* "auto", "5", "GE", "sqrt"; NULL means auto */
  int force_enumeration;           /* select the basis from all index multisets */
  int validation_points;           /* sampled points checked on the image */
  uint64_t seed;
} kummer_isogeny_options;

KUMMER_API void kummer_isogeny_options_init(kummer_isogeny_options* o);

KUMMER_API kummer_status kummer_isogeny_new(const kummer_surface* s, int N, const char* const R[4], const char* const S[4],
                                 const kummer_isogeny_options* opt, kummer_isogeny** out);
KUMMER_API void kummer_isogeny_free(kummer_isogeny* iso);
/* Deterministic description: model, N, domain, kernel, phi, image, branch, op_counts. */
KUMMER_API kummer_status kummer_isogeny_json(const kummer_isogeny* iso, char** json);
/* Stage times in seconds as JSON (not deterministic). */
KUMMER_API kummer_status kummer_isogeny_timings_json(const kummer_isogeny* iso, char** json);
KUMMER_API kummer_status kummer_isogeny_evaluate(const kummer_isogeny* iso, const char* const point[4], char** json);

/* Sparse model of y^2 = H1 H2 H3, each given as h0, h1, h2. Eigenvalue orders
   are optional pairs (NULL: canonical square roots). */
KUMMER_API kummer_status kummer_diagonalize(const kummer_field* f, const char* const h[3][3], const char* const eig1[2],
                                 const char* const eig2[2], char** json);

/* Identity suites ("" or NULL runs all); *all_passed is set to 0 or 1. */
KUMMER_API kummer_status kummer_verify(const char* suite, uint64_t seed, char** json, int* all_passed);

/* Benchmark CSV over the superspecial grid of primes and degrees N. Branches
   are a comma list of "5", "GE", "sqrt". */
typedef struct {
  const char* prime;      /* NULL: the built-in 101-bit prime */
  const int* degrees;     /* NULL: 3, 5, 7, 9, 11, 13 */
  int n_degrees;
  const char* branches;   /* NULL: "5,GE,sqrt" */
  int repeats;            /* kernels per (N, branch) */
  uint64_t seed;
} kummer_bench_options;

KUMMER_API void kummer_bench_options_init(kummer_bench_options* o);
KUMMER_API kummer_status kummer_bench(const kummer_bench_options* o, char** csv);

#ifdef __cplusplus
}
#endif

#endif
