#include "kummer/kummer_c.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "kummer/general_kummer.hpp"
#include "kummer/isogeny.hpp"
#include "kummer/suites.hpp"

using nlohmann::json;
using namespace kummer;

struct kummer_field {
  FieldPtr f;
};

struct kummer_surface {
  FieldPtr f;
  Model model = Model::Fast;
  std::optional<FastKummer> fast;
  std::optional<GeneralArithmetic> general;
};

struct kummer_isogeny {
  FieldPtr f;
  Model model = Model::Fast;
  Point4 domain_theta;
  Genus2Curve domain_curve;
  IsogenyKernel kernel;
  std::optional<FastIsogeny> fast;
  std::optional<GeneralIsogeny> general;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_kind;

kummer_status record(ErrorKind k, const std::string& msg) {
  last_error = msg;
  last_kind = error_name(k);
  return kummer_status(error_code(k));
}

template <class Fn>
kummer_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    last_kind.clear();
    return KUMMER_OK;
  } catch (const Error& e) {
    return record(e.kind(), e.what());
  } catch (const json::exception& e) {
    return record(ErrorKind::Usage, std::string("malformed JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return record(ErrorKind::Usage, e.what());
  } catch (const std::exception& e) {
    return record(ErrorKind::Internal, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::Usage, std::string("missing argument: ") + what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mpz_class parse_int(const char* s, const char* what) {
  need(s, what);
  mpz_class v;
  if (v.set_str(s, 10) != 0) fail(ErrorKind::Usage, std::string("not an integer for ") + what + ": '" + s + "'");
  return v;
}

Point4 parse_point(const Field* f, const char* const p[4], const char* what) {
  need(p, what);
  Point4 out;
  for (int i = 0; i < 4; ++i) {
    need(p[i], what);
    out[i] = f->parse(p[i]);
  }
  return out;
}

json fe_json(const Fe& x) {
  if (x.field()->degree() == 1) return x.c0().get_str();
  return json::array({x.c0().get_str(), x.c1().get_str()});
}

json point_json(const Point4& p) {
  json a = json::array();
  for (const auto& x : p) a.push_back(fe_json(x));
  return a;
}

json form_json(const Form& g) {
  json a = json::array();
  for (const auto& [k, c] : g.terms()) {
    Mono e = mono_of(k);
    a.push_back({{"exponents", {e[0], e[1], e[2], e[3]}}, {"coefficient", fe_json(c)}});
  }
  return a;
}

json curve_json(const Genus2Curve& c) {
  json a = json::array();
  for (const auto& x : c.f) a.push_back(fe_json(x));
  return a;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(fe_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

json field_json(const Field* f) { return {{"p", f->p().get_str()}, {"degree", f->degree()}}; }

json counts_json(const OpCounts& c) {
  return {{"M", c.M}, {"S", c.S}, {"I", c.I}, {"a", c.a}, {"Sq", c.Sq}};
}

bool is_zero_point(const Point4& p) {
  return std::all_of(p.begin(), p.end(), [](const Fe& x) { return x.is_zero(); });
}

const char* const kBenchPrime = "1267650600228229401496709036639";

using Clock = std::chrono::steady_clock;
double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Fastest of several runs of one scaling routine on a fixed quintic map.
double time_scaling(ScalingBranch br, const Map4& psi, const FastKummer& k, int runs) {
  double best = 1e300;
  for (int i = 0; i < runs; ++i) {
    auto t0 = Clock::now();
    std::optional<ScaledMap> sm;
    if (br == ScalingBranch::Five) sm = scaling_5(psi);
    if (br == ScalingBranch::GE) sm = scaling_ge(psi, k);
    if (br == ScalingBranch::Sqrt) sm = scaling_sqrt(psi, k);
    best = std::min(best, seconds(t0));
    if (!sm) fail(ErrorKind::Internal, "scaling failed during timing");
  }
  return best;
}

}  // namespace

extern "C" {

const char* kummer_last_error(void) { return last_error.c_str(); }
const char* kummer_last_error_kind(void) { return last_kind.c_str(); }

void kummer_string_free(char* s) { std::free(s); }

kummer_status kummer_field_new(const char* p, int degree, kummer_field** out) {
  return guard([&] {
    need(out, "out");
    mpz_class q = parse_int(p, "p");
    if (degree != 1 && degree != 2) fail(ErrorKind::Usage, "extension degree must be 1 or 2");
    *out = new kummer_field{Field::make(q, degree)};
  });
}

void kummer_field_free(kummer_field* f) { delete f; }

kummer_status kummer_fast_new(const kummer_field* f, const char* const theta[4], kummer_surface** out) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    auto s = std::make_unique<kummer_surface>();
    s->f = f->f;
    s->model = Model::Fast;
    s->fast.emplace(f->f, parse_point(f->f.get(), theta, "theta"));
    *out = s.release();
  });
}

kummer_status kummer_general_new(const kummer_field* f, const char* const curve[7], const char* table_path,
                                 kummer_surface** out) {
  return guard([&] {
    need(f, "field");
    need(curve, "curve");
    need(out, "out");
    Genus2Curve c;
    for (int i = 0; i < 7; ++i) {
      need(curve[i], "curve");
      c.f[i] = f->f->parse(curve[i]);
    }
    GeneralKummer gk(c);
    auto table = BiquadraticTable::load(c, table_path ? table_path : BiquadraticTable::default_path());
    auto s = std::make_unique<kummer_surface>();
    s->f = f->f;
    s->model = Model::General;
    s->general.emplace(std::move(gk), std::move(table));
    *out = s.release();
  });
}

void kummer_surface_free(kummer_surface* s) { delete s; }

kummer_status kummer_surface_json(const kummer_surface* s, char** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    json j;
    j["field"] = field_json(s->f.get());
    if (s->fast) {
      const FastKummer& k = *s->fast;
      j["model"] = "fast";
      j["theta"] = point_json(k.theta());
      j["dual"] = point_json(k.dual());
      j["constants"] = {{"E", fe_json(k.E())}, {"F", fe_json(k.F())}, {"G", fe_json(k.G())}, {"H", fe_json(k.H())}};
      j["quartic"] = form_json(k.quartic());
    } else {
      const GeneralKummer& g = s->general->surface();
      j["model"] = "general";
      j["curve"] = curve_json(g.curve());
      j["identity"] = point_json(g.identity());
      j["quartic"] = form_json(g.quartic());
    }
    *out = dup(j.dump());
  });
}

kummer_status kummer_surface_contains(const kummer_surface* s, const char* const point[4], int* on_surface) {
  return guard([&] {
    need(s, "surface");
    need(on_surface, "out");
    Point4 p = parse_point(s->f.get(), point, "point");
    *on_surface = s->fast ? s->fast->on_surface(p) : s->general->surface().on_surface(p);
  });
}

kummer_status kummer_surface_multiply(const kummer_surface* s, const char* n, const char* const point[4],
                                      char** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    mpz_class m = parse_int(n, "n");
    if (m < 0) fail(ErrorKind::Usage, "n must be non-negative");
    Point4 p = parse_point(s->f.get(), point, "point");
    json j;
    if (s->fast) {
      if (!s->fast->on_surface(p)) fail(ErrorKind::Usage, "point is not on the surface");
      Point4 q = s->fast->scalar_mul(m, p);
      j = {{"n", m.get_str()}, {"point", point_json(q)}, {"identity", s->fast->is_identity(q)}};
    } else {
      if (!s->general->surface().on_surface(p)) fail(ErrorKind::Usage, "point is not on the surface");
      if (!m.fits_slong_p()) fail(ErrorKind::Usage, "n is too large for the General model");
      Point4 q = s->general->scalar_mul(m.get_si(), p);
      j = {{"n", m.get_str()}, {"point", point_json(q)}, {"identity", s->general->is_identity(q)}};
    }
    *out = dup(j.dump());
  });
}

void kummer_isogeny_options_init(kummer_isogeny_options* o) {
  if (!o) return;
  o->branch = nullptr;
  o->force_enumeration = 0;
  o->validation_points = 0;
  o->seed = 1;
}

kummer_status kummer_isogeny_new(const kummer_surface* s, int N, const char* const R[4], const char* const S[4],
                                 const kummer_isogeny_options* opt, kummer_isogeny** out) {
  return guard([&] {
    need(s, "surface");
    need(out, "out");
    kummer_isogeny_options o;
    kummer_isogeny_options_init(&o);
    if (opt) o = *opt;
    if (o.validation_points < 0) fail(ErrorKind::Usage, "validation_points must be non-negative");
    Point4 r = parse_point(s->f.get(), R, "R"), q = parse_point(s->f.get(), S, "S");
    auto iso = std::make_unique<kummer_isogeny>();
    iso->f = s->f;
    iso->model = s->model;
    BasisOptions bo;
    bo.force_enumeration = o.force_enumeration != 0;
    if (s->fast) {
      const FastKummer& k = *s->fast;
      if (!k.on_surface(r) || !k.on_surface(q)) fail(ErrorKind::InvalidKernel, "kernel point is not on the surface");
      iso->domain_theta = k.theta();
      iso->kernel = make_kernel(k, N, r, q);
      IsogenyOptions io;
      io.branch = parse_branch(o.branch ? o.branch : "auto");
      io.basis = bo;
      io.validation_points = o.validation_points;
      io.seed = o.seed;
      iso->fast = get_isogeny(k, iso->kernel, io);
    } else {
      if (o.branch && parse_branch(o.branch) != ScalingBranch::Auto)
        fail(ErrorKind::Usage, "branch selection applies to the Fast model only");
      const GeneralArithmetic& g = *s->general;
      if (!g.surface().on_surface(r) || !g.surface().on_surface(q))
        fail(ErrorKind::InvalidKernel, "kernel point is not on the surface");
      iso->domain_curve = g.surface().curve();
      iso->kernel = make_kernel(g, N, r, q);
      iso->general = general_pipeline(g, iso->kernel, bo);
    }
    *out = iso.release();
  });
}

void kummer_isogeny_free(kummer_isogeny* iso) { delete iso; }

kummer_status kummer_isogeny_json(const kummer_isogeny* iso, char** out) {
  return guard([&] {
    need(iso, "isogeny");
    need(out, "out");
    json j;
    j["model"] = iso->fast ? "fast" : "general";
    j["field"] = field_json(iso->f.get());
    j["N"] = iso->kernel.N;
    j["kernel"] = {{"R", point_json(iso->kernel.R)}, {"S", point_json(iso->kernel.S)}};
    json phi = json::array();
    if (iso->fast) {
      const FastIsogeny& r = *iso->fast;
      j["domain"] = {{"theta", point_json(iso->domain_theta)}};
      for (const auto& g : r.phi) phi.push_back(form_json(g));
      j["phi"] = phi;
      j["lambda"] = point_json(r.lambda);
      j["image"] = {{"theta", point_json(r.image_theta)}};
      j["branch"] = branch_name(r.branch);
      j["enumerated"] = r.enumerated;
      j["op_counts"] = counts_json(r.counts);
    } else {
      const GeneralIsogeny& r = *iso->general;
      j["domain"] = {{"curve", curve_json(iso->domain_curve)}};
      for (const auto& g : r.phi) phi.push_back(form_json(g));
      j["phi"] = phi;
      j["u"] = json::array({fe_json(r.u[0]), fe_json(r.u[1]), fe_json(r.u[2])});
      j["quartic"] = form_json(r.quartic);
      j["target_quartic"] = form_json(r.target_quartic);
      j["image"] = {{"curve", curve_json(r.image)}};
      j["branch"] = nullptr;
      j["enumerated"] = r.enumerated;
      j["op_counts"] = counts_json(r.counts);
    }
    *out = dup(j.dump());
  });
}

kummer_status kummer_isogeny_timings_json(const kummer_isogeny* iso, char** out) {
  return guard([&] {
    need(iso, "isogeny");
    need(out, "out");
    const StageTimes& t = iso->fast ? iso->fast->times : iso->general->times;
    json j = {{"multiples", t.multiples}, {"basis", t.basis},       {"intersection", t.intersection},
              {"scaling", t.scaling},     {"image", t.image},       {"validation", t.validation}};
    *out = dup(j.dump());
  });
}

kummer_status kummer_isogeny_evaluate(const kummer_isogeny* iso, const char* const point[4], char** out) {
  return guard([&] {
    need(iso, "isogeny");
    need(out, "out");
    Point4 p = parse_point(iso->f.get(), point, "point");
    json j;
    if (iso->fast) {
      FastKummer domain(iso->f, iso->domain_theta);
      if (!domain.on_surface(p)) fail(ErrorKind::Usage, "point is not on the domain surface");
      Point4 q = evaluate(iso->fast->phi, p);
      FastKummer image(iso->f, iso->fast->image_theta);
      bool zero = is_zero_point(q);
      j = {{"point", point_json(q)}, {"on_image", !zero && image.on_surface(q)}, {"indeterminate", zero}};
    } else {
      GeneralKummer domain(iso->domain_curve);
      if (!domain.on_surface(p)) fail(ErrorKind::Usage, "point is not on the domain surface");
      Point4 q = evaluate(iso->general->phi, p);
      GeneralKummer image(iso->general->image);
      bool zero = is_zero_point(q);
      j = {{"point", point_json(q)}, {"on_image", !zero && image.on_surface(q)}, {"indeterminate", zero}};
    }
    *out = dup(j.dump());
  });
}

kummer_status kummer_diagonalize(const kummer_field* f, const char* const h[3][3], const char* const eig1[2],
                                 const char* const eig2[2], char** out) {
  return guard([&] {
    need(f, "field");
    need(h, "factors");
    need(out, "out");
    const Field* k = f->f.get();
    std::array<std::array<Fe, 3>, 3> q;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        need(h[i][j], "factor coefficient");
        q[i][j] = k->parse(h[i][j]);
      }
    auto pair = [&](const char* const e[2]) -> std::optional<std::array<Fe, 2>> {
      if (!e) return std::nullopt;
      need(e[0], "eigenvalue");
      need(e[1], "eigenvalue");
      return std::array<Fe, 2>{k->parse(e[0]), k->parse(e[1])};
    };
    auto poly = [](const std::array<Fe, 3>& a) { return Poly1{a[0], a[1], a[2]}; };
    auto fact = [&](int i, int a, int b) {
      Poly1 r = poly_mul(poly(q[a]), poly(q[b]));
      QuadraticFactorization qf{q[i], {}};
      for (int e = 0; e < 5; ++e) qf.h[e] = e < int(r.size()) ? r[e] : k->zero();
      return qf;
    };
    auto sm = sparse_model_from_factored_curve(q[0], q[1], q[2], pair(eig1), pair(eig2));
    json j;
    j["field"] = field_json(k);
    j["M1"] = matrix_json(two_torsion_matrix(fact(0, 1, 2)));
    j["M2"] = matrix_json(two_torsion_matrix(fact(1, 0, 2)));
    j["resultants"] = json::array({fe_json(resultant(poly(q[0]), 2, poly_mul(poly(q[1]), poly(q[2])), 4)),
                                   fe_json(resultant(poly(q[1]), 2, poly_mul(poly(q[0]), poly(q[2])), 4))});
    j["eigenvalues"] = json::array({json::array({fe_json(sm.eig1[0]), fe_json(sm.eig1[1])}),
                                    json::array({fe_json(sm.eig2[0]), fe_json(sm.eig2[1])})});
    j["P"] = matrix_json(sm.P);
    j["Pinv"] = matrix_json(sm.Pinv);
    j["quartic"] = form_json(sm.quartic);
    *out = dup(j.dump());
  });
}

kummer_status kummer_verify(const char* suite, uint64_t seed, char** out, int* all_passed) {
  return guard([&] {
    need(out, "out");
    auto results = run_suites(suite ? suite : "", seed);
    bool ok = true;
    json arr = json::array();
    for (const auto& r : results) {
      ok &= r.passed;
      arr.push_back({{"name", r.name},
                     {"passed", r.passed},
                     {"checks", r.checks},
                     {"failures", r.failures},
                     {"detail", r.detail}});
    }
    if (all_passed) *all_passed = ok;
    *out = dup(json{{"seed", seed}, {"suites", arr}, {"passed", ok}}.dump());
  });
}

void kummer_bench_options_init(kummer_bench_options* o) {
  if (!o) return;
  o->prime = nullptr;
  o->degrees = nullptr;
  o->n_degrees = 0;
  o->branches = nullptr;
  o->repeats = 3;
  o->seed = 1;
}

kummer_status kummer_bench(const kummer_bench_options* opt, char** out) {
  return guard([&] {
    need(out, "out");
    kummer_bench_options o;
    kummer_bench_options_init(&o);
    if (opt) o = *opt;
    if (o.repeats < 1) fail(ErrorKind::Usage, "repeats must be positive");
    std::vector<int> degrees = {3, 5, 7, 9, 11, 13};
    if (o.degrees && o.n_degrees > 0) degrees.assign(o.degrees, o.degrees + o.n_degrees);
    std::vector<ScalingBranch> branches;
    {
      std::stringstream ss(o.branches ? o.branches : "5,GE,sqrt");
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        ScalingBranch b = parse_branch(tok);
        if (b == ScalingBranch::Auto) fail(ErrorKind::Usage, "bench needs explicit branches");
        branches.push_back(b);
      }
    }
    Superspecial ss(parse_int(o.prime ? o.prime : kBenchPrime, "prime"));
    const int log2p = int(ss.f->bits());
    for (int N : degrees) {
      if (N < 3 || N % 2 == 0) fail(ErrorKind::Usage, "bench degrees must be odd and at least 3");
      if (ss.order % N != 0) fail(ErrorKind::Usage, "N = " + std::to_string(N) + " does not divide p + 1");
    }

    std::ostringstream csv;
    csv << "N,log2p,branch,repeat,wall_s,multiples_s,basis_s,intersection_s,scaling_s,image_s,M,S,I,a,Sq,enumerated\n";
    Rng rng(o.seed);
    for (int N : degrees)
      for (int rep = 0; rep < o.repeats; ++rep) {
        // one kernel per repeat, shared by every branch
        auto [r, s] = ss.K.sample_kernel(N, ss.order / N, rng);
        for (ScalingBranch br : branches) {
          if (br == ScalingBranch::Five && N != 5) continue;
          auto t0 = Clock::now();
          IsogenyKernel ker = make_kernel(ss.K, N, r, s);
          double mult = seconds(t0);
          IsogenyOptions io;
          io.branch = br;
          FastIsogeny iso = get_isogeny(ss.K, ker, io);
          if (iso.branch != br) fail(ErrorKind::Internal, "requested scaling branch was not applied");
          double scal = time_scaling(br, iso.psi, ss.K, 5);
          const StageTimes& t = iso.times;
          double wall = mult + t.basis + t.intersection + scal + t.image;
          char buf[256];
          std::snprintf(buf, sizeof buf, "%d,%d,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,", N, log2p, branch_name(br), rep,
                        wall, mult, t.basis, t.intersection, scal, t.image);
          csv << buf << iso.counts.M << ',' << iso.counts.S << ',' << iso.counts.I << ',' << iso.counts.a << ','
              << iso.counts.Sq << ',' << (iso.enumerated ? 1 : 0) << '\n';
        }
      }
    *out = dup(csv.str());
  });
}

}  // extern "C"
