#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace twreg {

class scalar_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using IPoly = std::vector<long long>;  // little-endian integer polynomial

inline IPoly poly_divide_exact(IPoly num, const IPoly& den) {
  IPoly q(num.size() - den.size() + 1, 0);
  for (long long i = (long long)num.size() - 1; i >= (long long)den.size() - 1; --i) {
    long long c = num[i] / den.back();
    q[i - den.size() + 1] = c;
    for (size_t j = 0; j < den.size(); ++j) num[i - den.size() + 1 + j] -= c * den[j];
  }
  return q;
}

inline IPoly cyclotomic_poly(int n) {
  IPoly p(n + 1, 0);
  p[0] = -1;
  p[n] = 1;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) p = poly_divide_exact(p, cyclotomic_poly(d));
  return p;
}

inline bool perfect_root(const mpz_class& v, unsigned long k, mpz_class& out) {
  if (v < 0) return false;
  return mpz_root(out.get_mpz_t(), v.get_mpz_t(), k) != 0;
}

inline bool rational_root(const Rat& v, long long k, Rat& out) {
  mpz_class a, b;
  if (!perfect_root(v.num(), k, a) || !perfect_root(v.den(), k, b)) return false;
  out = Rat(mpq_class(a, b));
  return true;
}

inline long long squarefree_part(mpz_class v) {
  long long s = 1;
  for (long long p = 2; v > 1 && p < 100000; ++p) {
    int e = 0;
    while (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
      v /= (unsigned long)p;
      ++e;
    }
    if (e % 2) s *= p;
  }
  if (v > 1) throw scalar_error("radical base too large to factor");
  return s;
}

}  // namespace detail

// Arithmetic context for Q(zeta_N)[rho], rho = m^(1/D) > 0 real.
struct CycContext {
  int N = 4;
  int phi = 2;
  int D = 1;
  Rat m = 1;
  int Dp = 1;
  Rat mp = 1;
  int e = 1;                                            // rho-degree of the representation
  std::vector<std::pair<int, Rat>> R;                   // rho^e as sparse zeta polynomial
  std::vector<std::vector<std::pair<int, Rat>>> zred;   // zeta^a reduced, a in [0, N)

  int dim() const { return phi * e; }

  static std::shared_ptr<const CycContext> make(int N, int D = 1, Rat m = 1) {
    if (N % 4 != 0) N = (int)lcm_ll(N, 4);
    if (m.sign() <= 0) throw scalar_error("radical base must be positive");
    auto c = std::make_shared<CycContext>();
    c->N = N;
    auto cp = detail::cyclotomic_poly(N);
    c->phi = (int)cp.size() - 1;
    std::vector<Rat> cur(c->phi, Rat(0));
    cur[0] = 1;
    for (int a = 0; a < N; ++a) {
      std::vector<std::pair<int, Rat>> s;
      for (int i = 0; i < c->phi; ++i)
        if (!cur[i].is_zero()) s.emplace_back(i, cur[i]);
      c->zred.push_back(std::move(s));
      std::vector<Rat> nx(c->phi, Rat(0));
      for (int i = 0; i + 1 < c->phi; ++i) nx[i + 1] = cur[i];
      Rat top = cur[c->phi - 1];
      if (!top.is_zero())
        for (int i = 0; i < c->phi; ++i) nx[i] -= top * Rat(cp[i]);
      cur = std::move(nx);
    }
    c->D = D;
    c->m = m;
    int g = 1;
    for (int cand = D; cand >= 1; --cand) {
      Rat r;
      if (D % cand == 0 && detail::rational_root(m, cand, r)) {
        g = cand;
        c->mp = r;
        break;
      }
    }
    c->Dp = D / g;
    if (c->Dp == 1) {
      c->e = 1;
      c->R = {{0, c->mp}};
    } else if (c->Dp % 2 == 0) {
      long long s = detail::squarefree_part(c->mp.num() * c->mp.den());
      long long cond = (s % 4 == 1) ? s : 4 * s;
      if (s == 2 && N % 8 == 0) {
        c->e = c->Dp / 2;
        Rat t;
        detail::rational_root(c->mp / Rat(2), 2, t);
        std::map<int, Rat> acc;
        for (int a : {N / 8, N - N / 8})
          for (auto& [i, v] : c->zred[a]) acc[i] += v * t;
        for (auto& [i, v] : acc)
          if (!v.is_zero()) c->R.emplace_back(i, v);
      } else if (N % cond == 0) {
        throw scalar_error("reducible-radical");
      } else {
        c->e = c->Dp;
        c->R = {{0, c->mp}};
      }
    } else {
      c->e = c->Dp;
      c->R = {{0, c->mp}};
    }
    return c;
  }
};

using CtxPtr = std::shared_ptr<const CycContext>;

// Element of Q(zeta_N)[rho]; terms keyed by b*phi + a for zeta^a rho^b.
class Cyc {
 public:
  Cyc() = default;
  Cyc(int v) : Cyc(Rat(v)) {}
  Cyc(long long v) : Cyc(Rat(v)) {}
  Cyc(const Rat& r) {
    if (!r.is_zero()) t_.emplace_back(0, r);
  }
  Cyc(CtxPtr c, std::vector<std::pair<int, Rat>> terms) : c_(std::move(c)), t_(std::move(terms)) {}

  static Cyc zeta(const CtxPtr& c, long long a) {
    a %= c->N;
    if (a < 0) a += c->N;
    return Cyc(c, c->zred[a]);
  }
  static Cyc rho(const CtxPtr& c, long long k) {
    long long q = k >= 0 ? k / c->e : -((-k + c->e - 1) / c->e);
    long long r = k - q * c->e;
    Cyc Rv(c, c->R);
    Cyc base = Rv.pow(q < 0 ? -q : q);
    if (q < 0) base = base.inv();
    Cyc mono(c, {{int(r * c->phi), Rat(1)}});
    return mono * base;
  }

  const CtxPtr& ctx() const { return c_; }
  const std::vector<std::pair<int, Rat>>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_rational() const { return t_.empty() || (t_.size() == 1 && t_[0].first == 0); }
  Rat rational() const {
    if (!is_rational()) throw scalar_error("not rational");
    return t_.empty() ? Rat(0) : t_[0].second;
  }

  friend Cyc operator+(const Cyc& a, const Cyc& b) {
    Cyc r;
    r.c_ = merge_ctx(a, b);
    auto i = a.t_.begin(), j = b.t_.begin();
    r.t_.reserve(a.t_.size() + b.t_.size());
    while (i != a.t_.end() || j != b.t_.end()) {
      if (j == b.t_.end() || (i != a.t_.end() && i->first < j->first)) {
        r.t_.push_back(*i++);
      } else if (i == a.t_.end() || j->first < i->first) {
        r.t_.push_back(*j++);
      } else {
        Rat s = i->second + j->second;
        if (!s.is_zero()) r.t_.emplace_back(i->first, std::move(s));
        ++i;
        ++j;
      }
    }
    return r;
  }
  Cyc operator-() const {
    Cyc r = *this;
    for (auto& [k, v] : r.t_) v = -v;
    return r;
  }
  friend Cyc operator-(const Cyc& a, const Cyc& b) { return a + (-b); }

  friend Cyc operator*(const Cyc& a, const Cyc& b) {
    if (a.is_zero() || b.is_zero()) return Cyc();
    if (a.is_rational()) return b.scaled(a.t_[0].second);
    if (b.is_rational()) return a.scaled(b.t_[0].second);
    auto c = merge_ctx(a, b);
    int phi = c->phi, N = c->N, e = c->e;
    std::vector<Rat> res(c->dim(), Rat(0));
    std::map<std::pair<int, int>, Rat> acc;
    for (auto& [ka, va] : a.t_)
      for (auto& [kb, vb] : b.t_) {
        int bb = ka / phi + kb / phi, aa = (ka % phi + kb % phi) % N;
        acc[{bb, aa}] += va * vb;
      }
    for (auto& [k, v] : acc) {
      if (v.is_zero()) continue;
      int bb = k.first, aa = k.second;
      if (bb >= e) {
        bb -= e;
        for (auto& [ri, rv] : c->R)
          for (auto& [zi, zv] : c->zred[(aa + ri) % N]) res[bb * phi + zi] += v * rv * zv;
      } else {
        for (auto& [zi, zv] : c->zred[aa]) res[bb * phi + zi] += v * zv;
      }
    }
    Cyc r;
    r.c_ = c;
    for (int i = 0; i < (int)res.size(); ++i)
      if (!res[i].is_zero()) r.t_.emplace_back(i, std::move(res[i]));
    return r;
  }
  Cyc& operator+=(const Cyc& o) { return *this = *this + o; }
  Cyc& operator-=(const Cyc& o) { return *this = *this - o; }
  Cyc& operator*=(const Cyc& o) { return *this = *this * o; }

  Cyc scaled(const Rat& s) const {
    if (s.is_zero()) return Cyc();
    Cyc r = *this;
    for (auto& [k, v] : r.t_) v *= s;
    return r;
  }

  Cyc pow(long long n) const {
    if (n < 0) return inv().pow(-n);
    Cyc r(1), x = *this;
    r.c_ = c_;
    while (n) {
      if (n & 1) r = r * x;
      x = x * x;
      n >>= 1;
    }
    return r;
  }

  Cyc inv() const {
    if (is_zero()) throw scalar_error("division by zero");
    if (is_rational()) return Cyc(Rat(1) / t_[0].second);
    auto& c = *c_;
    int n = c.dim();
    std::vector<std::vector<Rat>> M(n, std::vector<Rat>(n + 1, Rat(0)));
    for (int j = 0; j < n; ++j) {
      Cyc col = *this * Cyc(c_, {{j, Rat(1)}});
      for (auto& [k, v] : col.t_) M[k][j] = v;
    }
    M[0][n] = 1;
    for (int col = 0, row = 0; col < n; ++col, ++row) {
      int p = row;
      while (p < n && M[p][col].is_zero()) ++p;
      if (p == n) throw scalar_error("reducible-radical");
      std::swap(M[p], M[row]);
      Rat pv = M[row][col];
      for (int k = col; k <= n; ++k) M[row][k] /= pv;
      for (int r2 = 0; r2 < n; ++r2) {
        if (r2 == row || M[r2][col].is_zero()) continue;
        Rat f = M[r2][col];
        for (int k = col; k <= n; ++k)
          if (!M[row][k].is_zero()) M[r2][k] -= f * M[row][k];
      }
    }
    Cyc r;
    r.c_ = c_;
    for (int i = 0; i < n; ++i)
      if (!M[i][n].is_zero()) r.t_.emplace_back(i, M[i][n]);
    return r;
  }
  friend Cyc operator/(const Cyc& a, const Cyc& b) {
    if (b.is_rational()) return a.scaled(Rat(1) / b.rational());
    return a * b.inv();
  }

  friend bool operator==(const Cyc& a, const Cyc& b) {
    if (a.t_.size() != b.t_.size()) return false;
    if (!a.is_rational() && !b.is_rational() && a.c_ != b.c_) merge_ctx(a, b);
    for (size_t i = 0; i < a.t_.size(); ++i)
      if (a.t_[i].first != b.t_[i].first || a.t_[i].second != b.t_[i].second) return false;
    return true;
  }
  friend bool operator!=(const Cyc& a, const Cyc& b) { return !(a == b); }

  std::complex<long double> numeric() const {
    std::complex<long double> s = 0;
    if (t_.empty()) return s;
    if (is_rational()) return t_[0].second.to_ldouble();
    const long double pi = std::acos(-1.0L);
    long double rho = std::pow(c_->mp.to_ldouble(), 1.0L / c_->Dp);
    for (auto& [k, v] : t_) {
      int a = k % c_->phi, b = k / c_->phi;
      s += v.to_ldouble() * std::pow(rho, (long double)b) * std::polar(1.0L, 2 * pi * a / c_->N);
    }
    return s;
  }

  std::string str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : t_) {
      if (!first) os << " + ";
      first = false;
      os << v;
      if (k == 0) continue;
      int a = k % c_->phi, b = k / c_->phi;
      if (a) os << "*z" << c_->N << "^" << a;
      if (b) os << "*r^" << b;
    }
    return os.str();
  }

 private:
  static CtxPtr merge_ctx(const Cyc& a, const Cyc& b) {
    if (!a.c_) return b.c_;
    if (!b.c_ || a.c_ == b.c_) return a.c_;
    if (a.is_rational()) return b.c_;
    if (b.is_rational()) return a.c_;
    throw scalar_error("mixing scalars from different contexts");
  }

  CtxPtr c_;
  std::vector<std::pair<int, Rat>> t_;
};

// Branch data for one instance: z, its argument in [0, 2pi), the twist order T.
struct Branch {
  Rat z = 1;
  int T = 1;
  int D = 1;
  CtxPtr ctx;

  static Branch make(const Rat& z, int T, int D) {
    if (z.is_zero()) throw scalar_error("z must be nonzero");
    Branch b;
    b.z = z;
    b.T = T;
    b.D = D;
    Rat az = z.sign() < 0 ? -z : z;
    b.ctx = CycContext::make((int)lcm_ll(4, 2LL * T * D), D, az);
    return b;
  }

  int eps_z() const { return z.sign() < 0 ? -1 : 0; }

  // e^{i pi a}
  Cyc phase(const Rat& a) const {
    Rat k = a * Rat(ctx->N) / Rat(2);
    if (!k.is_integer()) throw scalar_error("phase outside zeta_" + std::to_string(ctx->N) + ": " + a.str());
    return Cyc::zeta(ctx, k.num64());
  }

  // xi^alpha = e^{alpha log xi}, log with arg in [0, 2pi)
  Cyc power_of(const Rat& xi, const Rat& alpha) const {
    if (xi.is_zero()) throw scalar_error("zero base");
    Rat ax = xi.sign() < 0 ? -xi : xi;
    Cyc mag;
    Rat root;
    if (alpha.is_integer()) {
      mag = Cyc(rpow(ax, alpha.num64()));
    } else if (detail::rational_root(ax, alpha.den64(), root)) {
      mag = Cyc(rpow(root, alpha.num64()));
    } else {
      long long k = 0;
      for (long long t = -16; t <= 16 && !k; ++t)
        if (t && rpow(ctx->m, t) == ax) k = t;
      Rat E = Rat(k) * alpha * Rat(D);
      if (!k || !E.is_integer()) throw scalar_error("unsupported-scalar-base: " + xi.str() + "^" + alpha.str());
      mag = Cyc::rho(ctx, E.num64());
    }
    if (xi.sign() < 0) return mag * phase(alpha);
    return mag;
  }

  Cyc z_pow(const Rat& alpha) const { return power_of(z, alpha); }

  // (-z)^beta through the branch relation with eps_z
  Cyc minus_z_power(const Rat& beta) const {
    return phase(beta) * z_pow(beta) * phase(Rat(2) * beta * Rat(eps_z()));
  }
};

inline std::ostream& operator<<(std::ostream& os, const Cyc& c) { return os << c.str(); }

inline std::complex<long double> embed_numeric(const Cyc& c) { return c.numeric(); }

}  // namespace twreg
