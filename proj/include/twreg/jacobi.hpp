#pragma once

#include <functional>
#include <sstream>

#include "module.hpp"
#include "report.hpp"

namespace twreg {

struct Window {
  Rat lo = -5, hi = 5;
  std::string str() const { return "[" + lo.str() + "," + hi.str() + "]"; }
};

// Exponents e in [lo, hi] with e - offset integral.
inline std::vector<Rat> window_points(const Window& w, const Rat& offset) {
  std::vector<Rat> out;
  Rat start = offset + Rat((w.lo - offset).floor());
  if (start < w.lo) start += Rat(1);
  for (Rat e = start; e <= w.hi; e += Rat(1)) out.push_back(e);
  return out;
}

// Coefficient of x0^e0 x1^e1 x2^e2 in
//   x0^-1 d((x1-x2)/x0) ((x1-x2)/x0)^a1 F1 - c x0^-1 d((x2-x1)/(-x0)) ((x2-x1)/x0)^a2 F2
//   - x2^-1 d((x1-x0)/x2) ((x1-x0)/x2)^a3 F3,
// with F1, F2 in (x1, x2) and F3 in (x0, x2). The imax bounds cut the lower-truncated sums.
template <class Val, class S>
struct ThreeTerm {
  std::function<Val(const Rat&, const Rat&)> F1, F2, F3;
  std::function<long long(const Rat&, const Rat&, const Rat&)> imax1, imax2, imax3;
  Rat a1 = 0, a2 = 0, a3 = 0;
  S c = S(1);

  Val residual(const Rat& e0, const Rat& e1, const Rat& e2) const {
    Val r{};
    Rat n1 = -e0 - Rat(1) - a1;
    if (n1.is_integer()) {
      long long im = imax1(e0, e1, e2);
      for (long long i = 0; i <= im; ++i) {
        Rat b = binom(-e0 - Rat(1), i) * Rat(i % 2 ? -1 : 1);
        if (b.is_zero()) continue;
        axpy_any(r, S(b), F1(e1 + e0 + Rat(1) + Rat(i), e2 - Rat(i)));
      }
    }
    Rat n2 = -e0 - Rat(1) - a2;
    if (n2.is_integer()) {
      long long im = imax2(e0, e1, e2);
      long long nn = n2.num64();
      for (long long i = 0; i <= im; ++i) {
        Rat b = binom(-e0 - Rat(1), i) * Rat((nn + i) % 2 ? -1 : 1);
        if (b.is_zero()) continue;
        axpy_any(r, S(-b) * c, F2(e1 - Rat(i), e2 + e0 + Rat(1) + Rat(i)));
      }
    }
    if ((e1 - a3).is_integer()) {
      long long im = imax3(e0, e1, e2);
      for (long long i = 0; i <= im; ++i) {
        Rat b = binom(e1 + Rat(i), i) * Rat(i % 2 ? -1 : 1);
        if (b.is_zero()) continue;
        axpy_any(r, S(-b), F3(e0 - Rat(i), e1 + e2 + Rat(i) + Rat(1)));
      }
    }
    return r;
  }

 private:
  template <class V2>
  static void axpy_any(V2& r, const S& c, const V2& v) {
    if constexpr (std::is_same_v<V2, Vec> || std::is_same_v<V2, CVec>) {
      axpy(r, c, v);
    } else {
      r = r + c * v;
    }
  }
};

inline std::string rats(std::initializer_list<Rat> l) {
  std::string s = "(";
  bool f = true;
  for (auto& r : l) {
    if (!f) s += ",";
    f = false;
    s += r.str();
  }
  return s + ")";
}

// Twisted Jacobi identity for M applied to w. drop_factor removes the
// ((x1-x0)/x2)^{-j/T} factor; flip_second multiplies the second term by -1.
struct JacobiOptions {
  bool drop_factor = false;
  bool flip_second = false;
};

// The same identity for any vertex algebra given by its modes vmode(u, k, v) in Z.
inline VerificationReport verify_twisted_jacobi_with(
    const std::function<Vec(const Label&, long long, const Label&)>& vmode, const Rat& wu, const Rat& wv,
    const TwistedModule& M, const Label& u, const Label& v, const Label& w, const Window& win, JacobiOptions opt,
    std::string params) {
  VerificationReport rep;
  rep.identity = "twisted-jacobi";
  rep.params = std::move(params);
  rep.window = win.str();
  int T = M.T();
  int ju = M.twist_j(u), jv = M.twist_j(v);
  Rat ww = M.weight(w), lam = M.lowest_weight();
  Vec w1{{w, Rat(1)}};
  // F[p, q]: coefficient of x1^p x2^q (or x0^p x2^q)
  auto mode = [&](const Label& a, const Rat& e, const Vec& x) { return M.act_on(a, -e - Rat(1), x); };
  ThreeTerm<Vec, Rat> J;
  J.F1 = [&](const Rat& p, const Rat& q) { return mode(u, p, mode(v, q, w1)); };
  J.F2 = [&](const Rat& p, const Rat& q) { return mode(v, q, mode(u, p, w1)); };
  J.F3 = [&](const Rat& p, const Rat& q) {
    Rat k = -p - Rat(1);
    if (!k.is_integer()) return Vec{};
    Vec uv = vmode(u, k.num64(), v);
    return M.act_vec_on(uv, -q - Rat(1), w1);
  };
  J.imax1 = [&](const Rat&, const Rat&, const Rat& e2) { return (wv + ww - lam + e2).floor(); };
  J.imax2 = [&](const Rat&, const Rat& e1, const Rat&) { return (wu + ww - lam + e1).floor(); };
  J.imax3 = [&](const Rat& e0, const Rat&, const Rat&) { return (wu + wv + e0).floor(); };
  J.a3 = opt.drop_factor ? Rat(0) : Rat(-ju, T);
  J.c = opt.flip_second ? Rat(-1) : Rat(1);
  for (auto& e0 : window_points(win, Rat(0)))
    for (auto& e1 : window_points(win, Rat(-ju, T)))
      for (auto& e2 : window_points(win, Rat(-jv, T))) {
        Vec r = J.residual(e0, e1, e2);
        ++rep.checked;
        if (!r.empty()) {
          rep.fail("nonzero residual at (x0,x1,x2)^" + rats({e0, e1, e2}));
          return rep;
        }
      }
  return rep;
}

inline VerificationReport verify_twisted_jacobi(const Heisenberg& V, const TwistedModule& M, const Label& u,
                                                const Label& v, const Label& w, const Window& win,
                                                JacobiOptions opt = {}) {
  return verify_twisted_jacobi_with([&V](const Label& a, long long k, const Label& b) { return V.mode(a, k, b); },
                                    fock::degree(u), fock::degree(v), M, u, v, w, win, opt,
                                    M.name() + " u=" + fock::show(u, false) + " v=" + fock::show(v, false) +
                                        " w=" + M.show(w));
}

}  // namespace twreg
