// Command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kummer/kummer_c.h"

using nlohmann::json;

namespace {

struct Failure {
  int code;
  std::string kind, message;
};

[[noreturn]] void usage(const std::string& msg) { throw Failure{KUMMER_ERR_USAGE, "usage", msg}; }

void check(kummer_status st) {
  if (st != KUMMER_OK) throw Failure{int(st), kummer_last_error_kind(), kummer_last_error()};
}

std::string take(char* s) {
  std::string out(s);
  kummer_string_free(s);
  return out;
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using FieldPtr = std::unique_ptr<kummer_field, Deleter<kummer_field, kummer_field_free>>;
using SurfacePtr = std::unique_ptr<kummer_surface, Deleter<kummer_surface, kummer_surface_free>>;
using IsogenyPtr = std::unique_ptr<kummer_isogeny, Deleter<kummer_isogeny, kummer_isogeny_free>>;

// Split on commas outside brackets, so "[1,2],3" gives "[1,2]" and "3".
std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

// Job-file element: "12", 12, or ["c0","c1"].
std::string element(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_array() && v.size() == 2) return "[" + element(v[0]) + "," + element(v[1]) + "]";
  usage("cannot read a field element from " + v.dump());
}

std::vector<std::string> elements(const json& v, std::size_t n, const std::string& what) {
  if (!v.is_array() || v.size() != n) usage(what + " needs " + std::to_string(n) + " entries");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(element(x));
  return out;
}

std::vector<std::string> inline_list(const std::string& s, std::size_t n, const std::string& what) {
  auto v = split_list(s);
  if (v.size() != n) usage(what + " needs " + std::to_string(n) + " comma-separated entries");
  return v;
}

std::vector<const char*> cstrs(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

struct Config {
  std::string command;
  std::string field_p;
  int ext_degree = 0;
  std::string model;
  std::string theta, curve, point, suite, table;
  std::string kernel_file, input_file, out;
  std::string n_text;
  std::string branch = "auto";
  std::uint64_t seed = 1;
  int repeats = 3;
  int validation_points = 0;
  bool counters = false;
  bool fallback = false;
  json job = json::object();  // merged job files
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    usage("malformed JSON in " + path + ": " + e.what());
  }
}

void load_jobs(Config& c) {
  for (const auto* path : {&c.input_file, &c.kernel_file})
    if (!path->empty()) c.job.merge_patch(read_json(*path));
}

std::string model_of(const Config& c) {
  std::string m = c.model;
  if (m.empty()) m = c.job.value("model", std::string("fast"));
  if (m != "fast" && m != "general") usage("model must be fast or general");
  return m;
}

FieldPtr make_field(const Config& c) {
  std::string p = c.field_p;
  int degree = c.ext_degree;
  if (c.job.contains("field")) {
    const json& f = c.job["field"];
    if (p.empty() && f.contains("p")) p = element(f["p"]);
    if (degree == 0 && f.contains("degree")) degree = f["degree"].get<int>();
  }
  if (p.empty()) usage("--field-p is required");
  if (degree == 0) degree = 1;
  kummer_field* h = nullptr;
  check(kummer_field_new(p.c_str(), degree, &h));
  return FieldPtr(h);
}

SurfacePtr make_surface(const Config& c, const kummer_field* f) {
  kummer_surface* s = nullptr;
  if (model_of(c) == "fast") {
    std::vector<std::string> th;
    if (!c.theta.empty()) th = inline_list(c.theta, 4, "--theta");
    else if (c.job.contains("theta")) th = elements(c.job["theta"], 4, "theta");
    else usage("--theta is required for the fast model");
    auto p = cstrs(th);
    check(kummer_fast_new(f, p.data(), &s));
  } else {
    std::vector<std::string> cv;
    if (!c.curve.empty()) cv = inline_list(c.curve, 7, "--curve");
    else if (c.job.contains("curve")) cv = elements(c.job["curve"], 7, "curve");
    else usage("--curve is required for the general model");
    auto p = cstrs(cv);
    check(kummer_general_new(f, p.data(), c.table.empty() ? nullptr : c.table.c_str(), &s));
  }
  return SurfacePtr(s);
}

int degree_N(const Config& c) {
  if (!c.n_text.empty()) {
    try {
      std::size_t used = 0;
      int n = std::stoi(c.n_text, &used);
      if (used != c.n_text.size()) throw std::invalid_argument("N");
      return n;
    } catch (const std::exception&) {
      usage("--N must be an integer");
    }
  }
  if (c.job.contains("N")) return c.job["N"].get<int>();
  usage("--N is required");
}

std::vector<std::string> kernel_point(const Config& c, const char* name) {
  if (!c.job.contains("kernel") || !c.job["kernel"].contains(name))
    usage(std::string("kernel point ") + name + " missing; pass --kernel-file");
  return elements(c.job["kernel"][name], 4, std::string("kernel ") + name);
}

std::vector<std::string> input_point(const Config& c) {
  if (!c.point.empty()) return inline_list(c.point, 4, "--point");
  if (c.job.contains("point")) return elements(c.job["point"], 4, "point");
  return kernel_point(c, "R");
}

IsogenyPtr make_isogeny(const Config& c, const kummer_surface* s) {
  auto R = kernel_point(c, "R"), S = kernel_point(c, "S");
  auto pr = cstrs(R), ps = cstrs(S);
  kummer_isogeny_options o;
  kummer_isogeny_options_init(&o);
  o.branch = c.branch.c_str();
  o.force_enumeration = c.fallback;
  o.validation_points = c.validation_points;
  o.seed = c.seed;
  kummer_isogeny* iso = nullptr;
  check(kummer_isogeny_new(s, degree_N(c), pr.data(), ps.data(), &o, &iso));
  return IsogenyPtr(iso);
}

std::string run_surface(const Config& c) {
  auto f = make_field(c);
  auto s = make_surface(c, f.get());
  char* out = nullptr;
  check(kummer_surface_json(s.get(), &out));
  json j = json::parse(take(out));
  if (!c.point.empty() || c.job.contains("point")) {
    auto pt = input_point(c);
    auto p = cstrs(pt);
    int on = 0;
    check(kummer_surface_contains(s.get(), p.data(), &on));
    j["point_on_surface"] = bool(on);
  }
  return j.dump(2);
}

std::string run_isogeny(const Config& c) {
  auto f = make_field(c);
  auto s = make_surface(c, f.get());
  auto iso = make_isogeny(c, s.get());
  char* out = nullptr;
  check(kummer_isogeny_json(iso.get(), &out));
  json j = json::parse(take(out));
  if (!c.counters) j.erase("op_counts");
  return j.dump(2);
}

std::string run_evaluate(const Config& c) {
  auto f = make_field(c);
  auto s = make_surface(c, f.get());
  auto iso = make_isogeny(c, s.get());
  std::vector<std::string> pt;
  if (!c.point.empty()) pt = inline_list(c.point, 4, "--point");
  else if (c.job.contains("point")) pt = elements(c.job["point"], 4, "point");
  else usage("--point is required");
  auto p = cstrs(pt);
  char* out = nullptr;
  check(kummer_isogeny_evaluate(iso.get(), p.data(), &out));
  return json::parse(take(out)).dump(2);
}

std::string run_multiply(const Config& c) {
  auto f = make_field(c);
  auto s = make_surface(c, f.get());
  std::string n = c.n_text.empty() ? std::to_string(degree_N(c)) : c.n_text;
  auto pt = input_point(c);
  auto p = cstrs(pt);
  char* out = nullptr;
  check(kummer_surface_multiply(s.get(), n.c_str(), p.data(), &out));
  return json::parse(take(out)).dump(2);
}

std::string run_diagonalize(const Config& c) {
  auto f = make_field(c);
  if (!c.job.contains("factors")) usage("diagonalize needs a job file with \"factors\"");
  const json& fx = c.job["factors"];
  if (!fx.is_array() || fx.size() != 3) usage("factors needs three quadratics");
  std::vector<std::vector<std::string>> h;
  for (const auto& q : fx) h.push_back(elements(q, 3, "factor"));
  const char* hp[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hp[i][j] = h[i][j].c_str();
  std::vector<std::string> e1, e2;
  const char* p1[2] = {nullptr, nullptr};
  const char* p2[2] = {nullptr, nullptr};
  bool eig = c.job.contains("eigenvalues");
  if (eig) {
    const json& ev = c.job["eigenvalues"];
    if (!ev.is_array() || ev.size() != 2) usage("eigenvalues needs two pairs");
    e1 = elements(ev[0], 2, "eigenvalues");
    e2 = elements(ev[1], 2, "eigenvalues");
    p1[0] = e1[0].c_str(), p1[1] = e1[1].c_str();
    p2[0] = e2[0].c_str(), p2[1] = e2[1].c_str();
  }
  char* out = nullptr;
  check(kummer_diagonalize(f.get(), hp, eig ? p1 : nullptr, eig ? p2 : nullptr, &out));
  return json::parse(take(out)).dump(2);
}

std::string run_verify(const Config& c, int& status) {
  char* out = nullptr;
  int ok = 0;
  check(kummer_verify(c.suite.c_str(), c.seed, &out, &ok));
  status = ok ? 0 : KUMMER_ERR_INTERNAL;
  return json::parse(take(out)).dump(2);
}

std::string run_bench(const Config& c) {
  kummer_bench_options o;
  kummer_bench_options_init(&o);
  if (!c.field_p.empty()) o.prime = c.field_p.c_str();
  std::vector<int> degrees;
  if (!c.n_text.empty())
    for (const auto& t : split_list(c.n_text)) {
      try {
        degrees.push_back(std::stoi(t));
      } catch (const std::exception&) {
        usage("--N must be a comma list of integers");
      }
    }
  o.degrees = degrees.empty() ? nullptr : degrees.data();
  o.n_degrees = int(degrees.size());
  if (c.branch != "auto") o.branches = c.branch.c_str();
  o.repeats = c.repeats;
  o.seed = c.seed;
  char* out = nullptr;
  check(kummer_bench(&o, &out));
  return take(out);
}

void emit(const Config& c, const std::string& text) {
  std::string body = text;
  if (body.empty() || body.back() != '\n') body += '\n';
  if (c.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(c.out);
  if (!f) usage("cannot write " + c.out);
  f << body;
}

json error_json(const Failure& f) {
  return {{"error", {{"kind", f.kind}, {"message", f.message}, {"code", f.code}}}};
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Kummer surface arithmetic and (N,N)-isogenies"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--field-p", c.field_p, "Field characteristic p");
  app.add_option("--ext-degree", c.ext_degree, "Extension degree (1 or 2)");
  app.add_option("--model", c.model, "fast or general");
  app.add_option("--theta", c.theta, "Theta constants a,b,c,d");
  app.add_option("--curve", c.curve, "Curve coefficients f0,...,f6");
  app.add_option("--kernel-file", c.kernel_file, "JSON job file with kernel {R,S}");
  app.add_option("--input", c.input_file, "JSON job file");
  app.add_option("--N", c.n_text, "Isogeny degree, scalar, or bench degree list");
  app.add_option("--branch", c.branch, "Scaling branch: auto, 5, GE, sqrt");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_flag("--counters", c.counters, "Report field operation counts");
  app.add_flag("--fallback-full-enumeration", c.fallback, "Build bases from all index multisets");
  app.add_option("--out", c.out, "Write output to a file");
  app.add_option("--point", c.point, "Point x,y,z,t");
  app.add_option("--table", c.table, "General biquadratic table (JSON)");

  auto* surface = app.add_subcommand("surface", "Describe a surface");
  auto* isogeny = app.add_subcommand("isogeny", "Compute an (N,N)-isogeny");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate an isogeny at a point");
  isogeny->add_option("--validate", c.validation_points, "Sampled points checked on the image");
  auto* multiply = app.add_subcommand("multiply", "Scalar multiplication [N]P");
  auto* diagonalize = app.add_subcommand("diagonalize", "Sparse model of y^2 = H1 H2 H3");
  auto* verify = app.add_subcommand("verify", "Run the identity suites");
  verify->add_option("--suite", c.suite, "fast_map, biquadratic_identity, f101_sparse or dimension_laws");
  auto* bench = app.add_subcommand("bench", "Isogeny timings over the superspecial grid");
  bench->add_option("--repeats", c.repeats, "Kernels per degree");

  int status = 0;
  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      usage(e.what());
    }
    load_jobs(c);
    std::string text;
    if (*surface) text = run_surface(c);
    else if (*isogeny) text = run_isogeny(c);
    else if (*evaluate) text = run_evaluate(c);
    else if (*multiply) text = run_multiply(c);
    else if (*diagonalize) text = run_diagonalize(c);
    else if (*verify) text = run_verify(c, status);
    else if (*bench) text = run_bench(c);
    emit(c, text);
  } catch (const Failure& f) {
    std::cout << error_json(f).dump(2) << '\n';
    return f.code;
  } catch (const json::exception& e) {
    std::cout << error_json(Failure{KUMMER_ERR_USAGE, "usage", e.what()}).dump(2) << '\n';
    return KUMMER_ERR_USAGE;
  } catch (const std::exception& e) {
    std::cout << error_json(Failure{KUMMER_ERR_INTERNAL, "internal-consistency", e.what()}).dump(2) << '\n';
    return KUMMER_ERR_INTERNAL;
  }
  return status;
}
