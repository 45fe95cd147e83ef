#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kummer/fast_kummer.hpp"
#include "kummer/field.hpp"
#include "kummer/forms.hpp"
#include "kummer/general_kummer.hpp"

namespace kummer {

enum class Model { Fast, General };
enum class ScalingBranch { Auto, Five, GE, Sqrt };

const char* branch_name(ScalingBranch b);
ScalingBranch parse_branch(const std::string& s);

// Index multiset by the number of occurrences of k1..k4, with its class 1..4.
struct IndexMultiset {
  std::array<int, 4> counts;
  int cls;
};

// Fast model: {1^(N-j) 2^j} for j = 0..N, then {3^(N-j) 4^j}. Classes: 1 and 2
// for an even or odd number of 2s, 3 and 4 for an even or odd number of 4s.
// General model: {1^(N-j) 4^j}, then {2^(N-j) 3^j}, all with class 0; the Fast
// pairing loses rank there.
std::vector<IndexMultiset> index_list(int N, Model model = Model::Fast);

// The quadratic forms B_ij(k, lR) for l = 1..(N-1)/2.
using PairForms = std::vector<FormMatrix4>;

struct IsogenyKernel {
  int N = 0;
  Point4 R, S;
  std::vector<Point4> mult_R, mult_S;  // lR and lS for l = 1..(N-1)/2
};

IsogenyKernel make_kernel(const FastKummer& k, int N, const Point4& R, const Point4& S);
IsogenyKernel make_kernel(const GeneralArithmetic& g, int N, const Point4& R, const Point4& S);

PairForms pair_forms(const FastKummer& k, const std::vector<Point4>& multiples);
PairForms pair_forms(const BiquadraticTable& t, const std::vector<Point4>& multiples);

// Sum over the distinct arrangements of I of k_i1 R1_{i2 i3} ... Rn_{i(N-1) iN},
// each unordered pair with distinct entries weighted by 2. Direct enumeration.
Form invariant_form(const PairForms& r, const std::array<int, 4>& counts);

// The forms of index_list(N, model), in that order, by the shared product tree.
std::vector<Form> index_forms(const PairForms& r, int N, Model model = Model::Fast);

// Invariant forms split by class; the general model uses parts[0] only.
struct InvariantBasis {
  std::array<std::vector<Form>, 4> parts;
  bool enumerated = false;  // built by the full-enumeration fallback
};

struct BasisOptions {
  bool check_rank = true;  // only applied for N <= 9 unless forced
  bool force_rank_check = false;
  // On a rank failure, select a basis from all multisets instead of throwing Conjecture.
  bool fallback_full_enumeration = true;
  bool force_enumeration = false;  // skip the index list entirely
};

InvariantBasis find_basis(const FastKummer& k, const std::vector<Point4>& multiples, int N,
                          const BasisOptions& opt = {});
InvariantBasis find_basis(const GeneralKummer& s, const BiquadraticTable& t, const std::vector<Point4>& multiples,
                          int N, const BasisOptions& opt = {});

// Basis chosen from all index multisets, used when the index list falls short.
// The selected multisets are cached per model and N.
InvariantBasis find_basis_enumerated(const FastKummer& k, const std::vector<Point4>& multiples, int N);

// Forms spanning span(bR) and span(bS) together; throws InvalidKernel unless
// the intersection has dimension `expected`.
std::vector<Form> find_intersection(const std::vector<Form>& bR, const std::vector<Form>& bS, std::size_t expected);

// Rank of a list of forms as coefficient vectors.
std::size_t form_rank(const std::vector<Form>& forms);

// Scale so the leading term (lexicographic, X first) has coefficient 1.
Form normalize_leading(const Form& f);

using Map4 = std::array<Form, 4>;

struct ScaledMap {
  Map4 phi;
  Point4 lambda;
};

std::optional<ScaledMap> scaling_5(const Map4& psi);
std::optional<ScaledMap> scaling_ge(const Map4& psi, const FastKummer& k);
std::optional<ScaledMap> scaling_sqrt(const Map4& psi, const FastKummer& k);

// psi at (a,b,c,d), (b,a,d,c) and (d,c,b,a).
struct ImageInputs {
  Point4 x, y, z;
};
ImageInputs image_inputs(const Map4& psi, const Point4& theta);

struct ImageConstants {
  Fe E, F, G, H;
  Point4 theta_sq;  // (a'^2 : b'^2 : c'^2 : d'^2)
};
ImageConstants get_image(const ImageInputs& in);

struct CostEstimate {
  ScalingBranch branch;
  double crossover_lhs, crossover_rhs;
  double basis_Mpoly, basis_apoly;
  double intersection_M, intersection_a;  // partitioned, all four classes
  long ge_unknowns;
  double ge_M, ge_a;
  double sqrt_M;  // plus 2 Sq and 1 I
};
CostEstimate cost_model(int N, double log2p);

struct StageTimes {
  double multiples = 0, basis = 0, intersection = 0, scaling = 0, image = 0, validation = 0;
};

struct IsogenyOptions {
  ScalingBranch branch = ScalingBranch::Auto;
  BasisOptions basis;
  int validation_points = 0;  // extra sampled points checked for image membership
  std::uint64_t seed = 1;
};

struct FastIsogeny {
  int N = 0;
  Map4 psi;
  Map4 phi;
  Point4 lambda;
  ScalingBranch branch = ScalingBranch::Auto;
  bool enumerated = false;  // a basis came from full enumeration
  Point4 image_theta;
  std::optional<ImageConstants> image_constants;
  OpCounts counts;
  StageTimes times;
};

FastIsogeny get_isogeny(const FastKummer& k, const IsogenyKernel& ker, const IsogenyOptions& opt = {});

Point4 evaluate(const Map4& phi, const Point4& p);

// General model.

// Recombine so that form i carries the i-th marker k1 k4^(N-1), k2 k4^(N-1),
// k3 k4^(N-1), k4^N with coefficient 1 and no other marker.
Map4 normalize_general(const Map4& psi, int N);

// The quartic (l2^2 - 4 l1 l3) l4^2 + mu1 l4 + mu0 satisfied by l, as a form in
// (l1,l2,l3,l4). Coefficients come from exact divisibility by the domain quartic;
// the power-series expansion is checked below total degree 8.
Form recover_quartic(const Map4& ell, const GeneralKummer& s);

struct CrossTermRemoval {
  Form quartic;
  std::array<Fe, 3> u;  // l4 = l4' + u1 l1 + u2 l2 + u3 l3
};
CrossTermRemoval remove_cross_terms(const Form& quartic);

Genus2Curve read_off_curve(const Form& quartic);

// Normal form modulo the General Kummer quartic (no term divisible by k2^2 k4^2).
Form reduce_general(const Form& f, const GeneralKummer& s);

struct GeneralIsogeny {
  int N = 0;
  Map4 ell;     // normalized intersection
  Form quartic;  // satisfied by ell
  std::array<Fe, 3> u;
  Map4 phi;  // (l1, l2, l3, l4')
  Form target_quartic;
  Genus2Curve image;
  bool enumerated = false;
  OpCounts counts;
  StageTimes times;
};

GeneralIsogeny general_pipeline(const GeneralArithmetic& g, const IsogenyKernel& ker, const BasisOptions& opt = {});

}  // namespace kummer
