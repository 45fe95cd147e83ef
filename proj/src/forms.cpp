#include "kummer/forms.hpp"

#include <cctype>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace kummer {

Form Form::monomial(const Field* f, const Mono& e, const Fe& c) {
  Form r(f, e[0] + e[1] + e[2] + e[3]);
  r.add_term(e, c);
  return r;
}

Form Form::variable(const Field* f, int i) {
  Mono e{0, 0, 0, 0};
  e[i] = 1;
  return monomial(f, e, f->one());
}

Form Form::constant(const Field* f, const Fe& c) { return monomial(f, {0, 0, 0, 0}, c); }

Fe Form::coeff(const Mono& e) const {
  auto it = terms_.find(mono_key(e));
  return it == terms_.end() ? f_->zero() : it->second;
}

void Form::add_term_key(std::uint32_t k, const Fe& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.emplace(k, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

void Form::add_term(const Mono& e, const Fe& c) {
  if (e[0] + e[1] + e[2] + e[3] != degree_) fail(ErrorKind::Contract, "monomial degree does not match form");
  for (int x : e)
    if (x < 0 || x > 255) fail(ErrorKind::Contract, "exponent out of range");
  add_term_key(mono_key(e), c);
}

Form& Form::operator+=(const Form& g) {
  if (g.is_zero()) return *this;
  if (!f_) f_ = g.f_;
  if (degree_ != g.degree_) fail(ErrorKind::Contract, "adding forms of different degrees");
  for (const auto& [k, c] : g.terms_) add_term_key(k, c);
  return *this;
}

Form& Form::operator-=(const Form& g) {
  if (g.is_zero()) return *this;
  if (!f_) f_ = g.f_;
  if (degree_ != g.degree_) fail(ErrorKind::Contract, "subtracting forms of different degrees");
  for (const auto& [k, c] : g.terms_) add_term_key(k, -c);
  return *this;
}

Form Form::operator+(const Form& g) const {
  Form r = *this;
  r += g;
  return r;
}

Form Form::operator-(const Form& g) const {
  Form r = *this;
  r -= g;
  return r;
}

Form Form::operator-() const {
  Form r(f_, degree_);
  for (const auto& [k, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), k, -c);
  return r;
}

Form Form::operator*(const Form& g) const {
  Form r(f_ ? f_ : g.f_, degree_ + g.degree_);
  if (is_zero() || g.is_zero()) return r;
  std::unordered_map<std::uint32_t, Fe> acc;
  acc.reserve(terms_.size() * g.terms_.size());
  for (const auto& [k1, c1] : terms_)
    for (const auto& [k2, c2] : g.terms_) {
      Fe t = c1 * c2;
      auto [it, fresh] = acc.emplace(k1 + k2, t);
      if (!fresh) it->second += t;
    }
  for (auto& [k, c] : acc)
    if (!c.is_zero()) r.terms_.emplace(k, std::move(c));
  return r;
}

Form Form::scaled(const Fe& s) const {
  Form r(f_, degree_);
  if (s.is_zero()) return r;
  for (const auto& [k, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), k, c * s);
  return r;
}

bool Form::operator==(const Form& g) const {
  if (is_zero() && g.is_zero()) return true;
  return degree_ == g.degree_ && terms_ == g.terms_;
}

Fe Form::eval(const Point4& p) const {
  Fe acc = p[0].field()->zero();
  if (is_zero()) return acc;
  std::array<std::vector<Fe>, 4> pw;
  for (int i = 0; i < 4; ++i) {
    int m = max_exponent(i);
    pw[i].push_back(p[0].field()->one());
    for (int k = 1; k <= m; ++k) pw[i].push_back(k == 1 ? p[i] : pw[i][k - 1] * p[i]);
  }
  for (const auto& [k, c] : terms_) {
    Mono e = mono_of(k);
    Fe t = c;
    for (int i = 0; i < 4; ++i)
      if (e[i]) t = t * pw[i][e[i]];
    acc += t;
  }
  return acc;
}

Form Form::div_monomial(const Mono& m) const {
  Form r(f_, degree_ - (m[0] + m[1] + m[2] + m[3]));
  std::uint32_t mk = mono_key(m);
  for (const auto& [k, c] : terms_) {
    Mono e = mono_of(k);
    for (int i = 0; i < 4; ++i)
      if (e[i] < m[i]) fail(ErrorKind::Internal, "form is not divisible by the monomial");
    r.terms_.emplace_hint(r.terms_.end(), k - mk, c);
  }
  return r;
}

int Form::max_exponent(int i) const {
  int m = -1;
  for (const auto& [k, c] : terms_) m = std::max(m, mono_of(k)[i]);
  return m;
}

// ---- signed permutations ----

Point4 SignedPermutation::apply(const Point4& p) const {
  Point4 r;
  for (int j = 0; j < 4; ++j) r[j] = signs[j] > 0 ? p[perm[j]] : -p[perm[j]];
  return r;
}

SignedPermutation SignedPermutation::compose(const SignedPermutation& inner) const {
  // (this o inner)(V)_j = s_j * inner(V)_{p_j} = s_j * t_{p_j} * V_{q_{p_j}}
  SignedPermutation r;
  for (int j = 0; j < 4; ++j) {
    r.perm[j] = inner.perm[perm[j]];
    r.signs[j] = signs[j] * inner.signs[perm[j]];
  }
  return r;
}

const SignedPermutation& sigma_action(int i) {
  static const std::array<SignedPermutation, 16> table = [] {
    std::array<SignedPermutation, 16> t;
    const int sg[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        SignedPermutation s;
        for (int j = 0; j < 4; ++j) {
          s.perm[j] = j ^ r;
          s.signs[j] = sg[c][j];
        }
        t[4 * r + c] = s;
      }
    return t;
  }();
  if (i < 0 || i > 15) fail(ErrorKind::Contract, "2-torsion index out of range");
  return table[i];
}

Form apply_signed_permutation(const Form& f, const SignedPermutation& s) {
  Form r(f.field(), f.degree());
  for (const auto& [k, c] : f.terms()) {
    Mono e = mono_of(k), ne{0, 0, 0, 0};
    int sign = 1;
    for (int j = 0; j < 4; ++j) {
      ne[s.perm[j]] += e[j];
      if (s.signs[j] < 0 && (e[j] & 1)) sign = -sign;
    }
    r.add_term_key(mono_key(ne), sign > 0 ? c : -c);
  }
  return r;
}

int partition_class(const Mono& e) {
  int s1 = (e[2] + e[3]) & 1;  // sign under (X,Y,-Z,-T)
  int s2 = (e[1] + e[3]) & 1;  // sign under (X,-Y,Z,-T)
  return 1 + 2 * s1 + s2;
}

int form_class(const Form& f) {
  int cls = 0;
  for (const auto& [k, c] : f.terms()) {
    int x = partition_class(mono_of(k));
    if (cls == 0) cls = x;
    if (cls != x) return -1;
  }
  return cls;
}

std::vector<Mono> monomials_of_degree(int d, int cls) {
  std::vector<Mono> out;
  for (int a = d; a >= 0; --a)
    for (int b = d - a; b >= 0; --b)
      for (int c = d - a - b; c >= 0; --c) {
        Mono e{a, b, c, d - a - b - c};
        if (cls == 0 || partition_class(e) == cls) out.push_back(e);
      }
  return out;
}

Form reduce_mod_quartic(const Form& f, const Form& K, Form* q) {
  if (K.degree() != 4 || !K.coeff({4, 0, 0, 0}).is_one())
    fail(ErrorKind::Contract, "reduction needs a quartic with unit X^4 coefficient");
  Form tail = K - Form::monomial(K.field(), {4, 0, 0, 0}, K.field()->one());
  Form r = f;
  Form quot(f.field(), std::max(0, f.degree() - 4));
  while (!r.is_zero()) {
    auto it = r.terms().begin();
    Mono e = mono_of(it->first);
    if (e[0] < 4) break;
    Fe c = it->second;
    Mono m{e[0] - 4, e[1], e[2], e[3]};
    Form qt = Form::monomial(f.field(), m, c);
    r -= qt * K;
    if (q) quot += qt;
  }
  if (q) *q = quot;
  return r;
}

Form normal_form(const Form& f, const Form& K, const std::array<int, 4>& order) {
  if (K.is_zero()) fail(ErrorKind::Contract, "normal form modulo the zero form");
  auto pack = [&](const Mono& e) {
    return (std::uint32_t(e[order[0]]) << 24) | (std::uint32_t(e[order[1]]) << 16) |
           (std::uint32_t(e[order[2]]) << 8) | std::uint32_t(e[order[3]]);
  };
  auto unpack = [&](std::uint32_t k) {
    Mono e;
    e[order[0]] = int(k >> 24);
    e[order[1]] = int((k >> 16) & 0xff);
    e[order[2]] = int((k >> 8) & 0xff);
    e[order[3]] = int(k & 0xff);
    return e;
  };
  using Work = std::map<std::uint32_t, Fe, std::greater<std::uint32_t>>;
  Work kt;
  for (const auto& [k, c] : K.terms()) kt.emplace(pack(mono_of(k)), c);
  Mono lead = unpack(kt.begin()->first);
  Fe linv = kt.begin()->second.inv();
  std::vector<std::pair<std::uint32_t, Fe>> tail;
  for (auto it = std::next(kt.begin()); it != kt.end(); ++it) tail.emplace_back(it->first, it->second * linv);

  Work w;
  for (const auto& [k, c] : f.terms()) w.emplace(pack(mono_of(k)), c);
  Form r(f.field(), f.degree());
  while (!w.empty()) {
    auto it = w.begin();
    Mono e = unpack(it->first);
    Fe c = it->second;
    w.erase(it);
    bool divisible = true;
    for (int i = 0; i < 4; ++i) divisible = divisible && e[i] >= lead[i];
    if (!divisible) {
      r.add_term(e, c);
      continue;
    }
    Mono m{e[0] - lead[0], e[1] - lead[1], e[2] - lead[2], e[3] - lead[3]};
    std::uint32_t mk = pack(m);
    for (const auto& [tk, tc] : tail) {
      Fe t = -(c * tc);
      auto [jt, fresh] = w.emplace(mk + tk, t);
      if (fresh) continue;
      jt->second += t;
      if (jt->second.is_zero()) w.erase(jt);
    }
  }
  return r;
}

Form pseudo_remainder_last(const Form& f, const Form& K) {
  const Field* fld = f.field();
  int kd = K.max_exponent(3);
  if (kd != 2) fail(ErrorKind::Contract, "pseudo-division needs degree 2 in the last variable");
  Form lead(fld, K.degree() - 2);
  for (const auto& [k, c] : K.terms()) {
    Mono e = mono_of(k);
    if (e[3] == 2) lead.add_term({e[0], e[1], e[2], 0}, c);
  }
  Form r = f;
  while (!r.is_zero()) {
    int top = r.max_exponent(3);
    if (top < 2) break;
    Form ct(fld, r.degree() - top);
    for (const auto& [k, c] : r.terms()) {
      Mono e = mono_of(k);
      if (e[3] == top) ct.add_term({e[0], e[1], e[2], 0}, c);
    }
    Form shift = Form::monomial(fld, {0, 0, 0, top - 2}, fld->one());
    r = lead * r - ct * shift * K;
  }
  return r;
}

// ---- bivariate series ----

BivariateSeries::BivariateSeries(const Field* f, int trunc)
    : f_(f), trunc_(trunc), c_(std::size_t(trunc) * trunc, f->zero()) {}

BivariateSeries BivariateSeries::constant(const Field* f, int trunc, const Fe& c) {
  BivariateSeries s(f, trunc);
  if (trunc > 0) s.set(0, 0, c);
  return s;
}

BivariateSeries BivariateSeries::monomial(const Field* f, int trunc, int d1, int d2, const Fe& c) {
  BivariateSeries s(f, trunc);
  if (d1 + d2 < trunc) s.set(d1, d2, c);
  return s;
}

const Fe& BivariateSeries::coeff(int d1, int d2) const {
  if (d1 < 0 || d2 < 0 || d1 + d2 >= trunc_) fail(ErrorKind::Contract, "series index beyond truncation");
  return c_[std::size_t(d1) * trunc_ + d2];
}

void BivariateSeries::set(int d1, int d2, const Fe& c) {
  if (d1 < 0 || d2 < 0 || d1 + d2 >= trunc_) fail(ErrorKind::Contract, "series index beyond truncation");
  c_[std::size_t(d1) * trunc_ + d2] = c;
}

void BivariateSeries::add(int d1, int d2, const Fe& c) {
  if (d1 + d2 >= trunc_) return;
  c_[std::size_t(d1) * trunc_ + d2] += c;
}

void BivariateSeries::check(const BivariateSeries& o) const {
  if (trunc_ != o.trunc_) fail(ErrorKind::Contract, "series truncation mismatch");
}

BivariateSeries BivariateSeries::operator+(const BivariateSeries& o) const {
  check(o);
  BivariateSeries r = *this;
  for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] += o.c_[k];
  return r;
}

BivariateSeries BivariateSeries::operator-(const BivariateSeries& o) const {
  check(o);
  BivariateSeries r = *this;
  for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] -= o.c_[k];
  return r;
}

BivariateSeries BivariateSeries::operator*(const BivariateSeries& o) const {
  check(o);
  BivariateSeries r(f_, trunc_);
  for (int a1 = 0; a1 < trunc_; ++a1)
    for (int a2 = 0; a1 + a2 < trunc_; ++a2) {
      const Fe& x = coeff(a1, a2);
      if (x.is_zero()) continue;
      for (int b1 = 0; a1 + a2 + b1 < trunc_; ++b1)
        for (int b2 = 0; a1 + a2 + b1 + b2 < trunc_; ++b2) {
          const Fe& y = o.coeff(b1, b2);
          if (!y.is_zero()) r.c_[std::size_t(a1 + b1) * trunc_ + a2 + b2] += x * y;
        }
    }
  return r;
}

BivariateSeries BivariateSeries::scaled(const Fe& s) const {
  BivariateSeries r = *this;
  for (auto& x : r.c_) x *= s;
  return r;
}

bool BivariateSeries::is_zero() const {
  for (const auto& x : c_)
    if (!x.is_zero()) return false;
  return true;
}

BivariateSeries substitute(const Form& f, const std::array<BivariateSeries, 4>& s) {
  const Field* fld = s[0].field();
  int t = s[0].trunc();
  BivariateSeries acc(fld, t);
  std::array<std::vector<BivariateSeries>, 4> pw;
  for (int i = 0; i < 4; ++i) {
    pw[i].push_back(BivariateSeries::constant(fld, t, fld->one()));
    for (int k = 1; k <= f.degree(); ++k) pw[i].push_back(pw[i][k - 1] * s[i]);
  }
  for (const auto& [k, c] : f.terms()) {
    Mono e = mono_of(k);
    BivariateSeries term = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]];
    acc = acc + term.scaled(c);
  }
  return acc;
}

Form parse_form(const Field* f, const std::string& text, int degree) {
  Form r(f, degree);
  std::size_t i = 0, n = text.size();
  auto skip = [&] {
    while (i < n && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*')) ++i;
  };
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorKind::Usage, "cannot parse form near position " + std::to_string(i) + ": " + why);
  };
  skip();
  if (text.substr(i) == "0") return r;
  bool first = true;
  while (true) {
    skip();
    if (i >= n) break;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
      neg = text[i] == '-';
      ++i;
      skip();
    } else if (!first) {
      bad("expected '+' or '-'");
    }
    first = false;
    Fe c = f->one();
    if (i < n && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '[')) {
      std::size_t j = i;
      if (text[i] == '[') {
        j = text.find(']', i);
        if (j == std::string::npos) bad("unclosed '['");
        ++j;
      } else {
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      c = f->parse(text.substr(i, j - i));
      i = j;
    }
    Mono e{0, 0, 0, 0};
    while (true) {
      skip();
      if (i >= n || text[i] == '+' || text[i] == '-') break;
      int v = -1;
      char ch = text[i];
      if (ch == 'X' || ch == 'Y' || ch == 'Z' || ch == 'T') {
        v = ch == 'X' ? 0 : ch == 'Y' ? 1 : ch == 'Z' ? 2 : 3;
        ++i;
      } else if (ch == 'k') {
        ++i;
        if (i < n && text[i] == '_') ++i;
        if (i >= n || text[i] < '1' || text[i] > '4') bad("expected k1..k4");
        v = text[i] - '1';
        ++i;
      } else {
        bad(std::string("unexpected '") + ch + "'");
      }
      int pw = 1;
      if (i < n && text[i] == '^') {
        ++i;
        std::size_t j = i;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) bad("missing exponent");
        pw = std::stoi(text.substr(i, j - i));
        i = j;
      }
      e[v] += pw;
    }
    if (e[0] + e[1] + e[2] + e[3] != degree) bad("term of the wrong degree");
    r.add_term(e, neg ? -c : c);
  }
  return r;
}

std::string format_form(const Form& g, bool k_names) {
  if (g.is_zero()) return "0";
  static const char* xyzt[4] = {"X", "Y", "Z", "T"};
  static const char* ks[4] = {"k1", "k2", "k3", "k4"};
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : g.terms()) {
    if (!first) os << " + ";
    first = false;
    Mono e = mono_of(key);
    bool unit = c.is_one();
    if (!unit) os << c.str();
    bool any = false;
    for (int v = 0; v < 4; ++v) {
      if (!e[v]) continue;
      if (!unit || any) os << ' ';
      os << (k_names ? ks[v] : xyzt[v]);
      if (e[v] > 1) os << '^' << e[v];
      any = true;
    }
    if (unit && !any) os << '1';
  }
  return os.str();
}

}  // namespace kummer
