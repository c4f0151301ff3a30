#pragma once

// Independent brute-force oracles used only by the tests.

#include <vector>

#include "twreg/module.hpp"

namespace oracle {

using namespace twreg;

// u_N w for u = a(-n1)...a(-nr)1 acting on a Fock space through the normal
// ordered product of derivatives of a(x); modes in Z (untwisted) or 1/2 + Z.
inline Vec normal_ordered(const Label& u, const Rat& N, const Label& w, bool twisted) {
  std::vector<long long> ns;
  for (unsigned char c : u) ns.push_back(c / 2);
  Rat S = N + Rat(1) - fock::degree(u);
  Rat dw = fock::degree(w);
  Rat bound = (S.sign() < 0 ? -S : S) + dw + Rat(1);
  Rat off = twisted ? Rat(1, 2) : Rat(0);
  std::vector<Rat> choices;
  for (Rat m = off - Rat(bound.floor() + 1); m <= dw; m += Rat(1))
    if (!m.is_zero()) choices.push_back(m);
  Vec out;
  std::vector<Rat> ms(ns.size());
  std::function<void(size_t, Rat)> rec = [&](size_t i, Rat sum) {
    if (i == ns.size()) {
      if (sum != S) return;
      Rat coef = 1;
      for (size_t t = 0; t < ns.size(); ++t) coef *= binom(-ms[t] - Rat(1), ns[t] - 1);
      if (coef.is_zero()) return;
      Vec cur{{w, Rat(1)}};
      for (size_t t = 0; t < ns.size(); ++t)
        if (ms[t].sign() > 0) cur = fock::alpha_vec((ms[t] * Rat(2)).num64(), cur);
      for (size_t t = 0; t < ns.size(); ++t)
        if (ms[t].sign() < 0) cur = fock::alpha_vec((ms[t] * Rat(2)).num64(), cur);
      axpy(out, coef, cur);
      return;
    }
    for (auto& m : choices) {
      ms[i] = m;
      rec(i + 1, sum + m);
    }
  };
  if (u.empty()) return N == Rat(-1) ? Vec{{w, Rat(1)}} : Vec{};
  rec(0, Rat(0));
  return out;
}

// Dense bivariate truncated power series in (x, y).
struct Bi {
  int K;
  std::vector<std::vector<Rat>> c;
  explicit Bi(int k) : K(k), c(k + 1, std::vector<Rat>(k + 1, Rat(0))) {}
  Bi operator*(const Bi& o) const {
    Bi r(K);
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j)
        if (!c[i][j].is_zero())
          for (int a = 0; i + a <= K; ++a)
            for (int b = 0; i + j + a + b <= K; ++b) r.c[i + a][j + b] += c[i][j] * o.c[a][b];
    return r;
  }
};

// c_{mn} with sum c_{mn} x^m y^n = -log(((1+x)^{1/2} + (1+y)^{1/2}) / 2)
inline std::vector<std::vector<Rat>> twist_coefficients(int K) {
  Bi g(K);
  for (int i = 1; i <= K; ++i) {
    g.c[i][0] += binom(Rat(1, 2), i) / Rat(2);
    g.c[0][i] += binom(Rat(1, 2), i) / Rat(2);
  }
  Bi lg(K), pw = g;
  for (int k = 1; k <= K; ++k) {
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j) lg.c[i][j] += pw.c[i][j] * Rat(k % 2 ? 1 : -1, k);
    pw = pw * g;
  }
  for (auto& row : lg.c)
    for (auto& x : row) x = -x;
  return lg.c;
}

// u_N w on the twisted Fock space via Y_W(u, x) = Y_0(e^{Delta_x} u, x).
inline Vec twisted_action(const Label& u, const Rat& N, const Label& w) {
  int K = (int)fock::degree(u).num64() + 2;
  auto c = twist_coefficients(K);
  // terms[s] = component of e^{Delta} u multiplying x^{-s}
  std::map<long long, Vec> cur{{0, Vec{{u, Rat(1)}}}}, total = cur;
  for (int k = 1; k <= K; ++k) {
    std::map<long long, Vec> nxt;
    for (auto& [s, v] : cur)
      for (int m = 1; m <= K; ++m)
        for (int n = 1; m + n <= K; ++n) {
          if (c[m][n].is_zero()) continue;
          Vec t = fock::alpha_vec(2 * m, fock::alpha_vec(2 * n, v));
          if (t.empty()) continue;
          axpy(nxt[s + m + n], c[m][n] / Rat(k), t);
        }
    if (nxt.empty()) break;
    for (auto& [s, v] : nxt) axpy(total[s], Rat(1), v);
    cur = nxt;
  }
  Vec out;
  for (auto& [s, v] : total)
    for (auto& [lab, coef] : v) axpy(out, coef, normal_ordered(lab, N - Rat(s), w, true));
  return out;
}

}  // namespace oracle
