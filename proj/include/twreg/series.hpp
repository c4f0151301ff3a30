#pragma once

// Sparse multivariate formal series with rational exponents, known exactly on
// a per-variable window.
//
// Each variable carries a window [lo, hi] on which coefficients are exact and
// optional support bounds slo / shi (no terms below slo / above shi). The
// support mode is derived from the bounds:
//   slo and shi   Polynomial
//   slo only      LowerFinite
//   shi only      UpperFinite
//   neither       Window
// A series may also be homogeneous: every term has the same total degree.
//
// Products are legal when every output coefficient is a finite sum. Per
// variable, the a-exponents contributing to output exponent e lie in
//   [max(slo_a, e - shi_b), min(shi_a, e - slo_b)]
// so the product is legal in that variable in these cases:
//   Polynomial   x anything
//   LowerFinite  x LowerFinite
//   UpperFinite  x UpperFinite
// LowerFinite x UpperFinite and Window x (non-polynomial) are ill-defined,
// except that one such variable may be pinned by the homogeneity of a factor.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scalars.hpp"

namespace twreg {

class series_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Support { Polynomial, LowerFinite, UpperFinite, Window };

inline const char* support_name(Support s) {
  switch (s) {
    case Support::Polynomial: return "Polynomial";
    case Support::LowerFinite: return "LowerFinite";
    case Support::UpperFinite: return "UpperFinite";
    default: return "Window";
  }
}

inline Rat rat_gcd(const Rat& a, const Rat& b) {
  if (a.is_zero()) return b.sign() < 0 ? -b : b;
  if (b.is_zero()) return a.sign() < 0 ? -a : a;
  mpz_class n1 = a.num() * b.den(), n2 = b.num() * a.den(), g;
  mpz_gcd(g.get_mpz_t(), n1.get_mpz_t(), n2.get_mpz_t());
  return Rat(mpq_class(g, a.den() * b.den()));
}

// Exponents offset + step*Z.
struct ExponentCoset {
  Rat offset = 0, step = 1;
  ExponentCoset normalized() const {
    Rat q = offset / step;
    return {offset - Rat(q.floor()) * step, step};
  }
  bool contains(const Rat& e) const { return ((e - offset) / step).is_integer(); }
  bool operator==(const ExponentCoset& o) const {
    return step == o.step && ((offset - o.offset) / step).is_integer();
  }
  ExponentCoset operator+(const ExponentCoset& o) const {
    return ExponentCoset{offset + o.offset, rat_gcd(step, o.step)}.normalized();
  }
  ExponentCoset join(const ExponentCoset& o) const {
    return ExponentCoset{offset, rat_gcd(rat_gcd(step, o.step), offset - o.offset)}.normalized();
  }
};

struct SeriesVar {
  std::string name;
  Rat lo = 0, hi = 0;
  std::optional<Rat> slo, shi;
  ExponentCoset coset;

  Support mode() const {
    if (slo && shi) return Support::Polynomial;
    if (slo) return Support::LowerFinite;
    if (shi) return Support::UpperFinite;
    return Support::Window;
  }
  // Region where coefficients are known (window plus the provably empty tails).
  std::optional<Rat> klo() const {
    if (slo && *slo >= lo) return std::nullopt;
    return lo;
  }
  std::optional<Rat> khi() const {
    if (shi && *shi <= hi) return std::nullopt;
    return hi;
  }
  bool truncated() const { return !(slo && shi && *slo >= lo && *shi <= hi); }
};

using Exps = std::vector<Rat>;
using Box = std::map<std::string, std::pair<Rat, Rat>>;

template <class S>
class Series {
 public:
  std::vector<SeriesVar> vars;  // sorted by name
  std::map<Exps, S> terms;
  std::optional<Rat> degree;  // set when homogeneous

  Series() = default;

  static Series constant(const S& c) {
    Series s;
    if (!c.is_zero()) s.terms[{}] = c;
    s.degree = Rat(0);
    return s;
  }
  static Series monomial(const std::string& x, const Rat& e, const S& c = S(1)) {
    Series s;
    s.vars.push_back(SeriesVar{x, e, e, e, e, ExponentCoset{e, 1}.normalized()});
    if (!c.is_zero()) s.terms[{e}] = c;
    s.degree = e;
    return s;
  }

  int index(const std::string& x) const {
    for (size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == x) return int(i);
    return -1;
  }
  const SeriesVar& var(const std::string& x) const {
    int i = index(x);
    if (i < 0) throw series_error("unknown variable " + x);
    return vars[i];
  }
  Support mode(const std::string& x) const { return var(x).mode(); }
  bool truncated() const {
    for (auto& v : vars)
      if (v.truncated()) return true;
    return false;
  }

  void add(const Exps& e, const S& c) {
    if (c.is_zero()) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
      terms.emplace(e, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  S coeff(const Exps& e) const {
    for (size_t i = 0; i < vars.size(); ++i) {
      auto& v = vars[i];
      auto lo = v.klo(), hi = v.khi();
      if ((lo && e[i] < *lo) || (hi && e[i] > *hi))
        throw series_error("coefficient outside known window for " + v.name + ": " + e[i].str());
    }
    auto it = terms.find(e);
    return it == terms.end() ? S(0) : it->second;
  }

  // Same series with extra variables appearing only to the power 0.
  Series extended(const std::vector<std::string>& names) const {
    Series r;
    r.degree = degree;
    std::vector<int> src;
    for (auto& n : names) {
      int i = index(n);
      src.push_back(i);
      if (i >= 0)
        r.vars.push_back(vars[i]);
      else
        r.vars.push_back(SeriesVar{n, 0, 0, Rat(0), Rat(0), ExponentCoset{}});
    }
    for (auto& [e, c] : terms) {
      Exps f(names.size(), Rat(0));
      for (size_t k = 0; k < names.size(); ++k)
        if (src[k] >= 0) f[k] = e[src[k]];
      r.terms.emplace(std::move(f), c);
    }
    return r;
  }

  bool check_invariants(std::string* why = nullptr) const {
    for (size_t i = 1; i < vars.size(); ++i)
      if (!(vars[i - 1].name < vars[i].name)) {
        if (why) *why = "variables not sorted";
        return false;
      }
    for (auto& [e, c] : terms) {
      if (c.is_zero()) {
        if (why) *why = "stored zero";
        return false;
      }
      Rat tot = 0;
      for (size_t i = 0; i < vars.size(); ++i) {
        auto& v = vars[i];
        tot += e[i];
        if (!v.coset.contains(e[i]) || e[i] < v.lo || e[i] > v.hi || (v.slo && e[i] < *v.slo) ||
            (v.shi && e[i] > *v.shi)) {
          if (why) *why = "exponent " + e[i].str() + " violates declared support of " + v.name;
          return false;
        }
      }
      if (degree && tot != *degree) {
        if (why) *why = "inhomogeneous term";
        return false;
      }
    }
    return true;
  }

  Series operator-() const {
    Series r = *this;
    for (auto& [e, c] : r.terms) c = -c;
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) { return combine(a, b, false); }
  friend Series operator-(const Series& a, const Series& b) { return combine(a, b, true); }

  Series scaled(const S& c) const {
    Series r = *this;
    r.terms.clear();
    for (auto& [e, v] : terms) r.add(e, v * c);
    return r;
  }

  // Restrict the window of each named variable to the given interval.
  Series restricted(const Box& box) const {
    Series r = *this;
    r.terms.clear();
    for (auto& v : r.vars) {
      auto it = box.find(v.name);
      if (it == box.end()) continue;
      v.lo = std::max(v.lo, it->second.first);
      v.hi = std::min(v.hi, it->second.second);
    }
    for (auto& [e, c] : terms) {
      bool in = true;
      for (size_t i = 0; i < r.vars.size(); ++i) in = in && e[i] >= r.vars[i].lo && e[i] <= r.vars[i].hi;
      if (in) r.terms.emplace(e, c);
    }
    return r;
  }

  // Deterministic rendering: variables by name, terms by ascending exponents.
  std::string str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : terms) {
      std::string cs = c.str();
      bool compound = cs.find_first_of("+-", 1) != std::string::npos || cs.find('*') != std::string::npos;
      if (!first) os << " + ";
      first = false;
      os << (compound ? "(" + cs + ")" : cs);
      for (size_t i = 0; i < vars.size(); ++i) {
        if (e[i].is_zero()) continue;
        os << "*" << vars[i].name;
        if (e[i] != Rat(1)) os << "^" << (e[i].is_integer() && e[i].sign() > 0 ? e[i].str() : "(" + e[i].str() + ")");
      }
    }
    return os.str();
  }

  std::string describe() const {
    std::ostringstream os;
    for (auto& v : vars) {
      os << v.name << ":" << support_name(v.mode()) << "[" << v.lo.str() << "," << v.hi.str() << "]";
      os << (v.truncated() ? "(truncated) " : " ");
    }
    return os.str();
  }

 private:
  static std::vector<std::string> union_names(const Series& a, const Series& b) {
    std::vector<std::string> n;
    for (auto& v : a.vars) n.push_back(v.name);
    for (auto& v : b.vars) n.push_back(v.name);
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
    return n;
  }

  static Series combine(const Series& a0, const Series& b0, bool minus) {
    auto names = union_names(a0, b0);
    Series a = a0.extended(names), b = b0.extended(names), r;
    r.degree = (a.degree && b.degree && *a.degree == *b.degree) ? a.degree : std::nullopt;
    if (a.terms.empty() && a.degree) r.degree = b.degree;
    if (b.terms.empty() && b.degree) r.degree = a.degree;
    for (size_t i = 0; i < names.size(); ++i) {
      auto &va = a.vars[i], &vb = b.vars[i];
      SeriesVar v{names[i]};
      if (va.slo && vb.slo) v.slo = std::min(*va.slo, *vb.slo);
      if (va.shi && vb.shi) v.shi = std::max(*va.shi, *vb.shi);
      auto la = va.klo(), lb = vb.klo(), ha = va.khi(), hb = vb.khi();
      if (la && lb)
        v.lo = std::max(*la, *lb);
      else if (la || lb)
        v.lo = la ? *la : *lb;
      else
        v.lo = *v.slo;
      if (ha && hb)
        v.hi = std::min(*ha, *hb);
      else if (ha || hb)
        v.hi = ha ? *ha : *hb;
      else
        v.hi = *v.shi;
      v.coset = va.coset.join(vb.coset);
      r.vars.push_back(v);
    }
    auto put = [&](const Series& s, bool neg) {
      for (auto& [e, c] : s.terms) {
        bool in = true;
        for (size_t i = 0; i < names.size(); ++i) in = in && e[i] >= r.vars[i].lo && e[i] <= r.vars[i].hi;
        if (in) r.add(e, neg ? -c : c);
      }
    };
    put(a, false);
    put(b, minus);
    return r;
  }
};

using FracSeries = Series<Cyc>;

namespace detail {

using ORat = std::optional<Rat>;

inline ORat omax(const ORat& a, const ORat& b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}
inline ORat omin(const ORat& a, const ORat& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}
inline ORat oadd(const ORat& a, const Rat& b) { return a ? ORat(*a + b) : std::nullopt; }
inline ORat osub(const Rat& a, const ORat& b) { return b ? ORat(a - *b) : std::nullopt; }

}  // namespace detail

// Output window of a product computed from the decision table alone.
template <class S>
Box product_window(const Series<S>& a0, const Series<S>& b0) {
  std::vector<std::string> names;
  for (auto& v : a0.vars) names.push_back(v.name);
  for (auto& v : b0.vars) names.push_back(v.name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto a = a0.extended(names), b = b0.extended(names);
  Box box;
  using detail::ORat;
  for (size_t i = 0; i < names.size(); ++i) {
    auto &va = a.vars[i], &vb = b.vars[i];
    ORat lo, hi;
    auto need_lo = [&](const ORat& v) { lo = detail::omax(lo, v); };
    auto need_hi = [&](const ORat& v) { hi = detail::omin(hi, v); };
    // a-range lower end must be known
    if (va.klo()) {
      if (!vb.shi) throw series_error("ill-defined-product in " + names[i]);
      need_lo(*va.klo() + *vb.shi);
    }
    if (vb.khi()) {
      if (!va.slo) throw series_error("ill-defined-product in " + names[i]);
      need_hi(*va.slo + *vb.khi());
    }
    if (va.khi()) {
      if (!vb.slo) throw series_error("ill-defined-product in " + names[i]);
      need_hi(*va.khi() + *vb.slo);
    }
    if (vb.klo()) {
      if (!va.shi) throw series_error("ill-defined-product in " + names[i]);
      need_lo(*va.shi + *vb.klo());
    }
    if (!lo) {
      if (!(va.slo && vb.slo)) throw series_error("ill-defined-product in " + names[i]);
      lo = *va.slo + *vb.slo;
    }
    if (!hi) {
      if (!(va.shi && vb.shi)) throw series_error("ill-defined-product in " + names[i]);
      hi = *va.shi + *vb.shi;
    }
    box[names[i]] = {*lo, *hi};
  }
  return box;
}

// Exact product on the target box (every variable of a and b must be covered).
// Throws "ill-defined-product" when some output coefficient is an infinite sum
// and "window-too-small" when a contributing coefficient is not known.
template <class S>
Series<S> multiply(const Series<S>& a0, const Series<S>& b0, const Box& target) {
  using detail::ORat;
  std::vector<std::string> names;
  for (auto& v : a0.vars) names.push_back(v.name);
  for (auto& v : b0.vars) names.push_back(v.name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto a = a0.extended(names), b = b0.extended(names);
  size_t n = names.size();
  std::vector<ORat> aL(n), aU(n), bL(n), bU(n);
  std::vector<Rat> elo(n), ehi(n);
  for (size_t i = 0; i < n; ++i) {
    auto it = target.find(names[i]);
    if (it == target.end()) throw series_error("target box misses variable " + names[i]);
    elo[i] = it->second.first;
    ehi[i] = it->second.second;
    auto &va = a.vars[i], &vb = b.vars[i];
    aL[i] = detail::omax(va.slo, detail::osub(elo[i], vb.shi));
    aU[i] = detail::omin(va.shi, detail::osub(ehi[i], vb.slo));
    bL[i] = detail::omax(vb.slo, detail::osub(elo[i], va.shi));
    bU[i] = detail::omin(vb.shi, detail::osub(ehi[i], va.slo));
  }
  std::vector<size_t> open;
  for (size_t i = 0; i < n; ++i)
    if (!aL[i] || !aU[i] || !bL[i] || !bU[i]) open.push_back(i);
  if (open.size() > 1) throw series_error("ill-defined-product in " + names[open[1]]);
  if (open.size() == 1) {
    size_t f = open[0];
    auto pin = [&](const Series<S>& s, std::vector<ORat>& L, std::vector<ORat>& U, std::vector<ORat>& OL,
                   std::vector<ORat>& OU) {
      Rat lo = *s.degree, hi = *s.degree;
      for (size_t i = 0; i < n; ++i) {
        if (i == f) continue;
        hi -= *L[i];
        lo -= *U[i];
      }
      L[f] = detail::omax(L[f], lo);
      U[f] = detail::omin(U[f], hi);
      OL[f] = detail::omax(OL[f], ORat(elo[f] - *U[f]));
      OU[f] = detail::omin(OU[f], ORat(ehi[f] - *L[f]));
    };
    if (a.degree)
      pin(a, aL, aU, bL, bU);
    else if (b.degree)
      pin(b, bL, bU, aL, aU);
    else
      throw series_error("ill-defined-product in " + names[f]);
  }
  for (size_t i = 0; i < n; ++i) {
    auto check = [&](const SeriesVar& v, const ORat& L, const ORat& U) {
      if (L && U && *L > *U) return;
      auto kl = v.klo(), kh = v.khi();
      if ((kl && (!L || *L < *kl)) || (kh && (!U || *U > *kh)))
        throw series_error("window-too-small in " + v.name);
    };
    check(a.vars[i], aL[i], aU[i]);
    check(b.vars[i], bL[i], bU[i]);
  }
  Series<S> r;
  if (a.degree && b.degree) r.degree = *a.degree + *b.degree;
  for (size_t i = 0; i < n; ++i) {
    auto &va = a.vars[i], &vb = b.vars[i];
    SeriesVar v{names[i], elo[i], ehi[i]};
    if (va.slo && vb.slo) v.slo = *va.slo + *vb.slo;
    if (va.shi && vb.shi) v.shi = *va.shi + *vb.shi;
    v.coset = va.coset + vb.coset;
    r.vars.push_back(v);
  }
  for (auto& [ea, ca] : a.terms)
    for (auto& [eb, cb] : b.terms) {
      Exps e(n);
      bool in = true;
      for (size_t i = 0; i < n && in; ++i) {
        e[i] = ea[i] + eb[i];
        in = e[i] >= elo[i] && e[i] <= ehi[i];
      }
      if (in) r.add(e, ca * cb);
    }
  return r;
}

template <class S>
Series<S> multiply(const Series<S>& a, const Series<S>& b) {
  return multiply(a, b, product_window(a, b));
}

// Coefficientwise equality on a box; both sides must be known there.
template <class S>
bool equal_on(const Series<S>& a0, const Series<S>& b0, const Box& box, std::string* where = nullptr) {
  Series<S> d = a0 - b0;
  for (auto& v : d.vars) {
    auto it = box.find(v.name);
    Rat lo = it == box.end() ? Rat(0) : it->second.first, hi = it == box.end() ? Rat(0) : it->second.second;
    auto kl = v.klo(), kh = v.khi();
    if ((kl && lo < *kl) || (kh && hi > *kh)) throw series_error("window-too-small in " + v.name);
  }
  for (auto& [e, c] : d.terms) {
    bool in = true;
    for (size_t i = 0; i < d.vars.size(); ++i) {
      auto it = box.find(d.vars[i].name);
      Rat lo = it == box.end() ? Rat(0) : it->second.first, hi = it == box.end() ? Rat(0) : it->second.second;
      in = in && e[i] >= lo && e[i] <= hi;
    }
    if (in) {
      if (where) {
        std::string s = "(";
        for (size_t i = 0; i < d.vars.size(); ++i) s += (i ? "," : "") + d.vars[i].name + "^" + e[i].str();
        *where = s + ") differs by " + c.str();
      }
      return false;
    }
  }
  return true;
}

// Coefficient of var^-1, as a series in the remaining variables.
template <class S>
Series<S> residue(const Series<S>& a, const std::string& x) {
  int k = a.index(x);
  if (k < 0) return Series<S>();
  auto& v = a.vars[k];
  auto kl = v.klo(), kh = v.khi();
  if ((kl && Rat(-1) < *kl) || (kh && Rat(-1) > *kh)) throw series_error("window-too-small in " + x);
  Series<S> r;
  if (a.degree) r.degree = *a.degree + Rat(1);
  for (size_t i = 0; i < a.vars.size(); ++i)
    if (int(i) != k) r.vars.push_back(a.vars[i]);
  for (auto& [e, c] : a.terms) {
    if (e[k] != Rat(-1)) continue;
    Exps f;
    for (size_t i = 0; i < e.size(); ++i)
      if (int(i) != k) f.push_back(e[i]);
    r.terms.emplace(std::move(f), c);
  }
  return r;
}

// Inverse of a one-variable LowerFinite series with invertible lowest term,
// known up to exponent upto (default: as far as a determines it).
template <class S>
Series<S> invert_lower(const Series<S>& a, std::optional<Rat> upto = std::nullopt) {
  if (a.vars.size() != 1) throw series_error("invert_lower needs one variable");
  auto& v = a.vars[0];
  if (!v.slo || v.klo()) throw series_error("invert_lower needs a LowerFinite series");
  if (a.terms.empty()) throw series_error("non-invertible leading coefficient");
  Rat m = a.terms.begin()->first[0];
  S lead = a.terms.begin()->second;
  if (lead.is_zero()) throw series_error("non-invertible leading coefficient");
  S li = S(1) / lead;
  Rat step = v.coset.step;
  if (!v.khi() && !upto && a.terms.size() > 1) throw series_error("invert_lower needs an upper exponent");
  std::optional<long long> K0;
  if (v.khi()) K0 = ((*v.khi() - m) / step).floor();
  if (upto) {
    long long k = ((*upto + m) / step).floor();
    K0 = K0 ? std::min(*K0, k) : k;
  }
  long long K = std::max(0LL, K0 ? *K0 : 0LL);
  std::vector<S> ac(K + 1, S(0)), bc(K + 1, S(0));
  for (auto& [e, c] : a.terms) {
    Rat k = (e[0] - m) / step;
    if (!k.is_integer()) throw series_error("invert_lower: exponents outside one coset");
    if (k.num64() <= K) ac[k.num64()] = c;
  }
  bc[0] = li;
  for (long long d = 1; d <= K; ++d) {
    S s(0);
    for (long long t = 1; t <= d; ++t)
      if (!ac[t].is_zero() && !bc[d - t].is_zero()) s = s + ac[t] * bc[d - t];
    bc[d] = -(s * li);
  }
  Series<S> r;
  SeriesVar w{v.name, -m, -m + Rat(K) * step, -m, std::nullopt, ExponentCoset{-m, step}.normalized()};
  if (!v.khi()) w.shi = w.hi;  // a was a monomial
  r.vars.push_back(w);
  if (a.degree) r.degree = -*a.degree;
  for (long long d = 0; d <= K; ++d) r.add({-m + Rat(d) * step}, bc[d]);
  return r;
}

// A binomial base. With xi_leading it is xi + sx*x, expanded in nonnegative
// powers of x. Otherwise it is x + sy*y + xi, expanded in nonnegative powers of
// xi and then of y (x is the dominant variable; y may be empty).
struct Base {
  std::string x;
  int sx = 1;
  std::string y;
  int sy = 0;
  Rat xi = 0;
  bool xi_leading = false;

  static Base x_plus(const std::string& x, const Rat& xi) { return {x, 1, "", 0, xi, false}; }
  static Base xi_plus(const Rat& xi, int sx, const std::string& x) { return {x, sx, "", 0, xi, true}; }
  static Base x_plus_y(const std::string& x, int sy, const std::string& y, const Rat& xi = 0) {
    return {x, 1, y, sy, xi, false};
  }
  static Base var(const std::string& x) { return {x, 1, "", 0, 0, false}; }
  bool single_var() const { return !xi_leading && y.empty() && xi.is_zero(); }
  std::vector<std::string> names() const {
    std::vector<std::string> n{x};
    if (!y.empty()) n.push_back(y);
    std::sort(n.begin(), n.end());
    return n;
  }
  std::string str() const {
    auto sgn = [](int s) { return s < 0 ? " - " : " + "; };
    if (xi_leading) return xi.str() + sgn(sx) + x;
    std::string s = x;
    if (!y.empty()) s += sgn(sy) + y;
    if (!xi.is_zero()) s += (xi.sign() < 0 ? " - " + (-xi).str() : " + " + xi.str());
    return s;
  }
};

// B^alpha on the box.
inline FracSeries expand_binomial(const Base& B, const Rat& alpha, const Box& box, const Branch* br = nullptr) {
  auto win = [&](const std::string& v) {
    auto it = box.find(v);
    if (it == box.end()) throw series_error("box misses variable " + v);
    return it->second;
  };
  FracSeries r;
  if (B.xi_leading) {
    if (B.xi.is_zero()) throw series_error("zero base");
    auto [lo, hi] = win(B.x);
    Cyc head;
    if (alpha.is_integer())
      head = Cyc(rpow(B.xi, alpha.num64()));
    else if (br)
      head = br->power_of(B.xi, alpha);
    else
      throw series_error("branch needed for " + B.xi.str() + "^" + alpha.str());
    Rat top = std::max(hi, Rat(-1));
    if (alpha.is_integer() && alpha.sign() >= 0) top = std::max(top, alpha);
    r.vars.push_back(SeriesVar{B.x, std::min(lo, Rat(0)), top, Rat(0), std::nullopt, ExponentCoset{}});
    if (alpha.is_integer() && alpha.sign() >= 0) r.vars[0].shi = alpha;
    Rat xinv = Rat(1) / B.xi;
    for (long long j = 0; Rat(j) <= top; ++j) {
      Rat c = binom(alpha, j) * rpow(xinv, j) * Rat(j % 2 && B.sx < 0 ? -1 : 1);
      if (!c.is_zero()) r.add({Rat(j)}, head * Cyc(c));
    }
    return r;
  }
  auto [xlo, xhi] = win(B.x);
  bool poly = alpha.is_integer() && alpha.sign() >= 0;
  Rat low = poly ? Rat(0) : xlo;
  if (B.y.empty()) {
    SeriesVar v{B.x, std::min(low, alpha), std::max(alpha, xhi), std::nullopt, alpha,
                ExponentCoset{alpha, 1}.normalized()};
    if (poly) v.slo = B.xi.is_zero() ? alpha : Rat(0);
    if (B.xi.is_zero()) v.slo = alpha;
    r.vars.push_back(v);
    for (long long j = 0; alpha - Rat(j) >= v.lo; ++j) {
      Rat c = binom(alpha, j) * rpow(B.xi, j);
      if (!c.is_zero()) r.add({alpha - Rat(j)}, Cyc(c));
      if (B.xi.is_zero()) break;
    }
    if (B.xi.is_zero()) r.degree = alpha;
    return r;
  }
  auto [ylo, yhi] = win(B.y);
  SeriesVar vx{B.x, std::min(low, alpha), std::max(alpha, xhi), std::nullopt, alpha,
               ExponentCoset{alpha, 1}.normalized()};
  SeriesVar vy{B.y, std::min(ylo, Rat(0)), std::max(yhi, Rat(-1)), Rat(0), std::nullopt, ExponentCoset{}};
  if (poly) {
    vx.slo = Rat(0);
    vy.shi = alpha;
    vy.hi = std::max(vy.hi, alpha);
  }
  if (B.x < B.y)
    r.vars = {vx, vy};
  else
    r.vars = {vy, vx};
  bool xfirst = B.x < B.y;
  for (long long j = 0; alpha - Rat(j) >= vx.lo; ++j) {
    Rat cj = binom(alpha, j) * rpow(B.xi, j);
    if (cj.is_zero()) {
      if (B.xi.is_zero()) break;
      continue;
    }
    Rat beta = alpha - Rat(j);
    for (long long i = 0; Rat(i) <= vy.hi && beta - Rat(i) >= vx.lo; ++i) {
      Rat c = cj * binom(beta, i) * Rat(i % 2 && B.sy < 0 ? -1 : 1);
      if (c.is_zero()) continue;
      Rat ex = beta - Rat(i), ey = Rat(i);
      r.add(xfirst ? Exps{ex, ey} : Exps{ey, ex}, Cyc(c));
    }
    if (B.xi.is_zero()) break;
  }
  if (B.xi.is_zero()) r.degree = alpha;
  return r;
}

// sum_{n in Z} s^n x^{-n-1-alpha} B^{n+alpha}, i.e. x^-1 delta(B/(s x)) (B/x)^alpha,
// exact on the box.
inline FracSeries delta_series(const std::string& x, const Base& B, int s, const Rat& alpha, const Box& box,
                               const Branch* br = nullptr) {
  auto it = box.find(x);
  if (it == box.end()) throw series_error("box misses variable " + x);
  auto [lo, hi] = it->second;
  FracSeries r;
  std::vector<std::string> names = B.names();
  names.push_back(x);
  std::sort(names.begin(), names.end());
  Box inner;
  for (auto& n : B.names()) inner[n] = box.at(n);
  // outer exponent -n-1-alpha in [lo, hi]
  long long nmin = (-hi - Rat(1) - alpha).floor(), nmax = (-lo - Rat(1) - alpha).floor();
  bool first = true;
  for (long long n = nmin; n <= nmax; ++n) {
    Rat ex = -Rat(n) - Rat(1) - alpha;
    if (ex < lo || ex > hi) continue;
    FracSeries p = expand_binomial(B, Rat(n) + alpha, inner, br).restricted(inner);
    FracSeries t = multiply(p, FracSeries::monomial(x, ex, Cyc(Rat((n % 2 && s < 0) ? -1 : 1))));
    if (first) {
      r = t;
      first = false;
    } else {
      r = r + t;
    }
  }
  // Rebuild the declared shape: window in x, inner supports from the base.
  FracSeries out;
  for (auto& n : names) {
    SeriesVar v{n, box.at(n).first, box.at(n).second};
    if (n == x) {
      v.coset = ExponentCoset{-Rat(1) - alpha, 1}.normalized();
    } else if (!B.xi_leading && n == B.x) {
      v.coset = ExponentCoset{alpha, 1}.normalized();
      if (B.single_var()) v.coset = ExponentCoset{alpha, 1}.normalized();
    } else {
      v.slo = Rat(0);
    }
    out.vars.push_back(v);
  }
  if (B.xi.is_zero() && !B.xi_leading) out.degree = Rat(-1);
  for (auto& [e, c] : r.terms) {
    Exps f;
    for (auto& n : names) f.push_back(e[r.index(n)]);
    bool in = true;
    for (size_t i = 0; i < names.size(); ++i) in = in && f[i] >= out.vars[i].lo && f[i] <= out.vars[i].hi;
    if (in) out.add(f, c);
  }
  return out;
}

// x^-1 delta((z+x0)/x) - x0^-1 delta((x-z)/x0) + x0^-1 delta((z-x)/(-x0)) on the box
// |exponents| <= radius; perturb flips the sign of the last term.
struct DeltaCheck {
  bool pass = true;
  long long checked = 0;
  std::string failure;
};

inline DeltaCheck delta_three_term(const Rat& z, const Rat& radius, bool perturb = false) {
  DeltaCheck rep;
  Box box{{"x", {-radius, radius}}, {"x0", {-radius, radius}}};
  auto lhs = delta_series("x", Base::xi_plus(z, 1, "x0"), 1, 0, box);
  auto t1 = delta_series("x0", Base::x_plus("x", -z), 1, 0, box);
  auto t2 = delta_series("x0", Base::xi_plus(z, -1, "x"), -1, 0, box);
  auto rhs = perturb ? t1 + t2 : t1 - t2;
  for (Rat a = -radius; a <= radius; a += Rat(1))
    for (Rat b = -radius; b <= radius; b += Rat(1)) {
      ++rep.checked;
      Cyc d = lhs.coeff({a, b}) - rhs.coeff({a, b});
      if (!d.is_zero() && rep.pass) {
        rep.pass = false;
        rep.failure = "coefficient of x^" + a.str() + " x0^" + b.str();
      }
    }
  return rep;
}

// A delta function times a product of factors, with the substitution rules
// that are legal only in the presence of the delta.
struct DeltaProduct {
  struct Delta {
    std::string x;
    Base B;
    int s = 1;
    Rat alpha = 0;
  };
  struct Factor {
    std::optional<std::pair<Base, Rat>> binomial;  // B^alpha
    FracSeries series;
  };
  std::optional<Delta> delta;
  std::vector<Factor> factors;

  enum class Rule { ReplaceOuter, ReplaceInner, PowerTransfer };

  // Product on the box; inputs are built on the box widened by margin.
  FracSeries evaluate(const Box& box, const Rat& margin = 10, const Branch* br = nullptr) const {
    Box wide;
    for (auto& [n, w] : box) wide[n] = {w.first - margin, w.second + margin};
    FracSeries acc = FracSeries::constant(Cyc(1));
    for (auto& f : factors) {
      FracSeries p = f.binomial ? expand_binomial(f.binomial->first, f.binomial->second, wide, br) : f.series;
      acc = multiply(acc, p);
    }
    if (delta) {
      auto d = delta_series(delta->x, delta->B, delta->s, delta->alpha, wide, br);
      Box tb;
      for (auto& v : acc.vars) tb[v.name] = box.at(v.name);
      for (auto& v : d.vars) tb[v.name] = box.at(v.name);
      return multiply(d, acc, tb);
    }
    for (auto& v : acc.vars) {
      auto kl = v.klo(), kh = v.khi();
      auto& w = box.at(v.name);
      if ((kl && w.first < *kl) || (kh && w.second > *kh)) throw series_error("window-too-small in " + v.name);
    }
    return acc.restricted(box);
  }

  DeltaProduct substitute(Rule rule, const Box& box, const Branch* br = nullptr) const {
    if (!delta) throw series_error("illegal-delta-substitution: no delta function present");
    const Delta& d = *delta;
    DeltaProduct r = *this;
    if (rule == Rule::PowerTransfer) {
      // x^-1 d(B/x)(B/x)^a (x + xi)^g = x^-1 d(B/x)(B/x)^{a-g} (B + xi)^g
      if (d.s != 1 || d.B.xi_leading || !d.B.xi.is_zero())
        throw series_error("illegal-delta-substitution: power transfer needs x^-1 delta((x1 +- x0)/x)");
      for (auto& f : r.factors) {
        if (!f.binomial) continue;
        auto& [fb, g] = *f.binomial;
        if (fb.xi_leading || fb.x != d.x || !fb.y.empty()) continue;
        Base nb = d.B;
        nb.xi = fb.xi;
        r.delta->alpha = d.alpha - g;
        f.binomial = std::make_pair(nb, g);
        return r;
      }
      throw series_error("illegal-delta-substitution: no (" + d.x + " + xi)^alpha factor");
    }
    if (d.s != 1 || !d.alpha.is_zero())
      throw series_error("illegal-delta-substitution: substitution needs an unshifted delta");
    Box wide;
    for (auto& [n, w] : box) wide[n] = {w.first - Rat(10), w.second + Rat(10)};
    for (auto& f : r.factors) {
      FracSeries s = f.binomial ? expand_binomial(f.binomial->first, f.binomial->second, wide, br) : f.series;
      std::string from = rule == Rule::ReplaceOuter ? d.x : d.B.x;
      if (rule == Rule::ReplaceInner && !d.B.single_var())
        throw series_error("illegal-delta-substitution: inner argument is not a single variable");
      int k = s.index(from);
      if (k < 0) {
        f = Factor{std::nullopt, s};
        continue;
      }
      if (s.vars[k].mode() != Support::Polynomial)
        throw series_error("illegal-delta-substitution: factor is not a Laurent polynomial in " + from);
      Base to = rule == Rule::ReplaceOuter ? d.B : Base::var(d.x);
      FracSeries acc;
      bool first = true;
      for (auto& [e, c] : s.terms) {
        FracSeries mono = FracSeries::constant(c);
        for (size_t i = 0; i < s.vars.size(); ++i)
          if (int(i) != k) mono = multiply(mono, FracSeries::monomial(s.vars[i].name, e[i]));
        Box inner;
        for (auto& n : to.names()) inner[n] = wide.at(n);
        FracSeries p = expand_binomial(to, e[k], inner, br);
        Box tb;
        for (auto& v : p.vars) tb[v.name] = {box.at(v.name).first - Rat(5), box.at(v.name).second + Rat(5)};
        for (auto& v : mono.vars) tb[v.name] = {box.at(v.name).first - Rat(5), box.at(v.name).second + Rat(5)};
        FracSeries t = multiply(p, mono, tb);
        acc = first ? t : acc + t;
        first = false;
      }
      f = Factor{std::nullopt, first ? FracSeries() : acc};
    }
    return r;
  }
};

}  // namespace twreg
