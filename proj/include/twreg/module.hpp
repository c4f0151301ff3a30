#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vec.hpp"

namespace twreg {

// Thread-safe memo table. The lock is never held while computing.
template <class K, class V>
class Memo {
 public:
  template <class F>
  V get(const K& k, F&& compute) const {
    {
      std::lock_guard<std::mutex> g(m_);
      auto it = t_.find(k);
      if (it != t_.end()) return it->second;
    }
    V v = compute();
    std::lock_guard<std::mutex> g(m_);
    return t_.emplace(k, std::move(v)).first->second;
  }
  size_t size() const {
    std::lock_guard<std::mutex> g(m_);
    return t_.size();
  }

 private:
  mutable std::mutex m_;
  mutable std::unordered_map<K, V> t_;
};

namespace fock {

inline Rat degree(const Label& w) {
  long long s = 0;
  for (unsigned char c : w) s += c;
  return Rat(s, 2);
}

inline int parity(const Label& v) { return int(v.size() % 2); }

// Apply the oscillator alpha(p), p = p2/2, to a basis label.
inline bool apply_alpha(long long p2, const Label& w, Rat& coef, Label& out) {
  if (p2 == 0) return false;
  if (p2 < 0) {
    unsigned char part = (unsigned char)(-p2);
    size_t pos = 0;
    while (pos < w.size() && (unsigned char)w[pos] >= part) ++pos;
    out = w;
    out.insert(out.begin() + pos, (char)part);
    coef = 1;
    return true;
  }
  auto pos = w.find((char)p2);
  if (pos == std::string::npos) return false;
  size_t mult = 0;
  for (unsigned char c : w) mult += (c == p2);
  out = w;
  out.erase(pos, 1);
  coef = Rat(p2 * (long long)mult, 2);
  return true;
}

inline Vec alpha_vec(long long p2, const Vec& v) {
  Vec r;
  Rat c;
  Label l;
  for (auto& [k, x] : v)
    if (apply_alpha(p2, k, c, l)) add_term(r, l, x * c);
  return r;
}

// Partitions of deg into parts from {step, 2 step, ...} (twisted: odd halves).
inline void partitions_rec(long long rem2, long long maxpart2, bool twisted, Label& cur, std::vector<Label>& out) {
  if (rem2 == 0) {
    out.push_back(cur);
    return;
  }
  for (long long p = std::min(rem2, maxpart2); p >= 1; --p) {
    if (twisted ? (p % 2 == 0) : (p % 2 == 1)) continue;
    cur.push_back((char)p);
    partitions_rec(rem2 - p, p, twisted, cur, out);
    cur.pop_back();
  }
}

inline std::vector<Label> partitions(const Rat& deg, bool twisted) {
  std::vector<Label> out;
  Rat d2 = deg * Rat(2);
  if (deg.sign() < 0 || !d2.is_integer()) return out;
  Label cur;
  partitions_rec(d2.num64(), d2.num64(), twisted, cur, out);
  return out;
}

inline std::string show(const Label& w, bool twisted) {
  if (w.empty()) return twisted ? "vac" : "1";
  std::string s;
  for (unsigned char c : w) {
    if (!s.empty()) s += " ";
    s += "a(-" + (c % 2 ? std::to_string(c) + "/2" : std::to_string(c / 2)) + ")";
  }
  return s + (twisted ? " vac" : " 1");
}

}  // namespace fock

// Graded sigma-twisted module over V = M(1). Modes v_n with n in j/T + Z for v in V^j.
class TwistedModule {
 public:
  virtual ~TwistedModule() = default;
  virtual std::string name() const = 0;
  virtual int T() const = 0;
  virtual Rat lowest_weight() const = 0;
  virtual Rat weight(const Label& w) const = 0;
  virtual std::vector<Label> basis(const Rat& h) const = 0;
  virtual int twist_j(const Label& v) const = 0;
  virtual Vec act(const Label& v, const Rat& n, const Label& w) const = 0;
  virtual std::string show(const Label& w) const = 0;

  Rat step() const { return Rat(1, T()); }

  bool in_coset(const Label& v, const Rat& n) const {
    return (n - Rat(twist_j(v), T())).is_integer();
  }

  std::vector<Rat> weights_upto(const Rat& hmax) const {
    std::vector<Rat> out;
    for (Rat h = lowest_weight(); h <= hmax; h += step()) out.push_back(h);
    return out;
  }
  std::vector<Label> basis_upto(const Rat& hmax) const {
    std::vector<Label> out;
    for (auto& h : weights_upto(hmax))
      for (auto& b : basis(h)) out.push_back(b);
    return out;
  }

  Vec act_vec(const Vec& v, const Rat& n, const Label& w) const {
    Vec r;
    for (auto& [k, c] : v) axpy(r, c, act(k, n, w));
    return r;
  }
  Vec act_on(const Label& v, const Rat& n, const Vec& w) const {
    Vec r;
    for (auto& [k, c] : w) axpy(r, c, act(v, n, k));
    return r;
  }
  Vec act_vec_on(const Vec& v, const Rat& n, const Vec& w) const {
    Vec r;
    for (auto& [k, c] : v) axpy(r, c, act_on(k, n, w));
    return r;
  }

  // L(n) = omega_{n+1}, omega = (1/2) a(-1)^2 1
  Vec L(long long n, const Vec& w) const {
    Vec r = act_on(omega_label(), Rat(n + 1), w);
    for (auto& [k, c] : r) c *= Rat(1, 2);
    return r;
  }
  static Label omega_label() { return Label("\x02\x02", 2); }
};

// Fock space of the rank-one Heisenberg algebra; untwisted (V itself) or Z2-twisted.
class FockModule : public TwistedModule {
 public:
  explicit FockModule(bool twisted) : tw_(twisted) {
    if (tw_) {
      Vec l0 = act(omega_label(), Rat(1), Label());
      lambda_ = l0.count(Label()) ? l0.at(Label()) * Rat(1, 2) : Rat(0);
    }
  }

  std::string name() const override { return tw_ ? "twisted-fock" : "free-boson"; }
  int T() const override { return tw_ ? 2 : 1; }
  bool twisted() const { return tw_; }
  Rat lowest_weight() const override { return lambda_; }
  Rat weight(const Label& w) const override { return lambda_ + fock::degree(w); }
  std::vector<Label> basis(const Rat& h) const override { return fock::partitions(h - lambda_, tw_); }
  int twist_j(const Label& v) const override { return tw_ ? fock::parity(v) : 0; }
  std::string show(const Label& w) const override { return fock::show(w, tw_); }

  Vec act(const Label& v, const Rat& n, const Label& w) const override {
    if (!in_coset(v, n)) return {};
    Rat deg = fock::degree(v) + fock::degree(w) - n - Rat(1);
    if (deg.sign() < 0) return {};
    if (v.empty()) return n == Rat(-1) ? Vec{{w, Rat(1)}} : Vec{};
    std::string key = v;
    key.push_back('\xff');
    key += (n * Rat(2)).str();
    key.push_back('\xff');
    key += w;
    return memo_.get(key, [&] { return compute(v, n, w); });
  }

  size_t cache_size() const { return memo_.size(); }

 private:
  Vec act_v(const Vec& v, const Rat& n, const Label& w) const { return act_vec(v, n, w); }

  Vec compute(const Label& v, const Rat& N, const Label& w) const {
    long long k2 = (unsigned char)v[0];
    long long k = k2 / 2;
    Label v0 = v.substr(1);
    Vec res;
    if (v0.empty()) {
      Rat c = binom(Rat(k) - N - Rat(2), k - 1);
      Rat cc;
      Label l;
      Rat p = N + Rat(1) - Rat(k);
      if (fock::apply_alpha((p * Rat(2)).num64(), w, cc, l)) add_term(res, l, c * cc);
      return res;
    }
    Rat m0 = tw_ ? Rat(1, 2) : Rat(0);
    Rat n = N - m0;
    Rat dv0 = fock::degree(v0), dw = fock::degree(w);
    long long imax1 = (dv0 + dw - n - Rat(1)).floor();
    for (long long i = 0; i <= imax1; ++i) {
      Vec inner = act(v0, n + Rat(i), w);
      if (inner.empty()) continue;
      Rat c = binom(Rat(-k), i) * Rat(i % 2 ? -1 : 1);
      long long p2 = ((m0 - Rat(k) - Rat(i)) * Rat(2)).num64();
      axpy(res, c, fock::alpha_vec(p2, inner));
    }
    long long imax2 = (dw - m0).floor();
    for (long long i = 0; i <= imax2; ++i) {
      long long p2 = ((m0 + Rat(i)) * Rat(2)).num64();
      Vec aw = fock::alpha_vec(p2, Vec{{w, Rat(1)}});
      if (aw.empty()) continue;
      Rat c = binom(Rat(-k), i) * Rat(i % 2 ? -1 : 1) * Rat(k % 2 ? 1 : -1);
      axpy(res, c, act_on(v0, n - Rat(k) - Rat(i), aw));
    }
    if (tw_) {
      long long maxp = (unsigned char)v0[0] / 2;
      for (long long i = 1; i <= k + maxp; ++i) {
        if (i == k) continue;
        Vec av = fock::alpha_vec(2 * (i - k), Vec{{v0, Rat(1)}});
        if (av.empty()) continue;
        axpy(res, -binom(m0, i), act_v(av, N - Rat(i), w));
      }
    }
    return res;
  }

  bool tw_;
  Rat lambda_ = 0;
  mutable Memo<std::string, Vec> memo_;
};

// The vertex operator algebra M(1) with the involution a -> -a.
class Heisenberg {
 public:
  Heisenberg() : adj_(std::make_shared<FockModule>(false)) {}

  const FockModule& adjoint() const { return *adj_; }
  std::shared_ptr<const FockModule> adjoint_ptr() const { return adj_; }

  static Label vacuum() { return Label(); }
  static Label alpha() { return Label("\x02", 1); }
  static Vec omega() { return Vec{{TwistedModule::omega_label(), Rat(1, 2)}}; }
  static Rat central_charge() { return Rat(1); }
  static long long weight(const Label& v) { return fock::degree(v).num64(); }
  static int sigma_j(const Label& v) { return fock::parity(v); }
  static int sigma_sign(const Label& v) { return fock::parity(v) ? -1 : 1; }

  std::vector<Label> basis(long long n) const { return fock::partitions(Rat(n), false); }
  std::vector<Label> basis_upto(long long n) const {
    std::vector<Label> out;
    for (long long k = 0; k <= n; ++k)
      for (auto& b : basis(k)) out.push_back(b);
    return out;
  }

  Vec mode(const Label& u, long long n, const Label& v) const { return adj_->act(u, Rat(n), v); }
  Vec mode_vec(const Vec& u, long long n, const Vec& v) const { return adj_->act_vec_on(u, Rat(n), v); }
  Vec L(long long n, const Vec& v) const { return adj_->L(n, v); }

  // L(1)^i v / i!
  Vec L1_power_over_fact(const Label& v, long long i) const {
    Vec r{{v, Rat(1)}};
    for (long long t = 1; t <= i; ++t) {
      r = L(1, r);
      for (auto& [k, c] : r) c /= Rat(t);
    }
    return r;
  }

  // Projection onto V^{(j1,j2)} for sigma1 = sigma^{s1}, sigma2 = sigma^{s2} (s in {0,1}).
  static Vec eigenspace(const Vec& v, int j1, int j2, int s1, int s2) {
    Vec r;
    for (auto& [k, c] : v) {
      int p = sigma_j(k);
      if ((s1 ? p : 0) == j1 && (s2 ? p : 0) == j2) r.emplace(k, c);
    }
    return r;
  }

 private:
  std::shared_ptr<FockModule> adj_;
};

// (W', Y'), with <Y'(v,x)w', w> = <w', Y_W(e^{xL(1)}(-x^{-2})^{L(0)} v, x^{-1}) w>.
class Contragredient : public TwistedModule {
 public:
  Contragredient(std::shared_ptr<const TwistedModule> m, std::shared_ptr<const Heisenberg> V)
      : m_(std::move(m)), V_(std::move(V)) {}

  std::string name() const override { return m_->name() + "'"; }
  int T() const override { return m_->T(); }
  Rat lowest_weight() const override { return m_->lowest_weight(); }
  Rat weight(const Label& w) const override { return m_->weight(w); }
  std::vector<Label> basis(const Rat& h) const override { return m_->basis(h); }
  int twist_j(const Label& v) const override { return (T() - m_->twist_j(v)) % T(); }
  std::string show(const Label& w) const override { return "(" + m_->show(w) + ")*"; }
  const TwistedModule& base() const { return *m_; }

  Vec act(const Label& v, const Rat& N, const Label& wp) const override {
    if (!in_coset(v, N)) return {};
    Rat hs = weight(wp);
    Rat ht = hs + Rat(Heisenberg::weight(v)) - N - Rat(1);
    if (ht < lowest_weight()) return {};
    std::string key = v + '\xff' + (N * Rat(2)).str() + '\xff' + hs.str();
    auto block = memo_.get(key, [&] {
      std::map<Label, Vec> tab;
      long long d = Heisenberg::weight(v);
      Rat sgn(d % 2 ? -1 : 1);
      std::vector<Vec> L1;
      for (long long i = 0; i <= d; ++i) L1.push_back(V_->L1_power_over_fact(v, i));
      for (auto& w : m_->basis(ht)) {
        Vec y;
        for (long long i = 0; i <= d; ++i)
          if (!L1[i].empty()) axpy(y, sgn, m_->act_vec(L1[i], Rat(2 * d - i) - N - Rat(2), w));
        for (auto& [b, c] : y) tab[b].emplace(w, c);
      }
      return tab;
    });
    auto it = block.find(wp);
    return it == block.end() ? Vec{} : it->second;
  }

 private:
  std::shared_ptr<const TwistedModule> m_;
  std::shared_ptr<const Heisenberg> V_;
  mutable Memo<std::string, std::map<Label, Vec>> memo_;
};

// (W, Y_W o tau) for tau = sigma^s.
class Precomposed : public TwistedModule {
 public:
  Precomposed(std::shared_ptr<const TwistedModule> m, int s, int tau_order = 2) : m_(std::move(m)), s_(s) {
    if (tau_order != 1 && tau_order != 2) throw std::invalid_argument("automorphism does not commute with sigma");
  }
  std::string name() const override { return m_->name() + (s_ ? "∘sigma" : ""); }
  int T() const override { return m_->T(); }
  Rat lowest_weight() const override { return m_->lowest_weight(); }
  Rat weight(const Label& w) const override { return m_->weight(w); }
  std::vector<Label> basis(const Rat& h) const override { return m_->basis(h); }
  int twist_j(const Label& v) const override { return m_->twist_j(v); }
  std::string show(const Label& w) const override { return m_->show(w); }
  Vec act(const Label& v, const Rat& n, const Label& w) const override {
    Vec r = m_->act(v, n, w);
    if (s_ && Heisenberg::sigma_sign(v) < 0)
      for (auto& [k, c] : r) c = -c;
    return r;
  }

 private:
  std::shared_ptr<const TwistedModule> m_;
  int s_;
};

// Versioned plain-text module description used by the CLI.
struct ModuleDescription {
  static constexpr int kVersion = 1;
  std::string engine = "fock";
  int T = 1;
  std::string sigma = "id";
  Rat lowest_weight = 0;
  std::vector<std::string> basis;

  static ModuleDescription of(const TwistedModule& m, const Rat& hmax) {
    ModuleDescription d;
    d.T = m.T();
    d.sigma = m.T() == 1 ? "id" : "minus";
    d.lowest_weight = m.lowest_weight();
    for (auto& b : m.basis_upto(hmax)) d.basis.push_back(m.show(b));
    return d;
  }

  std::string serialize() const {
    std::string s = "twreg-module " + std::to_string(kVersion) + "\n";
    s += "engine=" + engine + "\nT=" + std::to_string(T) + "\nsigma=" + sigma + "\n";
    s += "lowest_weight=" + lowest_weight.str() + "\n";
    for (auto& b : basis) s += "basis=" + b + "\n";
    return s;
  }

  static ModuleDescription parse(const std::string& text) {
    ModuleDescription d;
    size_t pos = 0;
    bool header = false;
    while (pos < text.size()) {
      size_t e = text.find('\n', pos);
      if (e == std::string::npos) e = text.size();
      std::string line = text.substr(pos, e - pos);
      pos = e + 1;
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        if (line != "twreg-module " + std::to_string(kVersion))
          throw std::invalid_argument("bad module description header: " + line);
        header = true;
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad module description line: " + line);
      std::string k = line.substr(0, eq), v = line.substr(eq + 1);
      if (k == "engine") d.engine = v;
      else if (k == "T") d.T = std::stoi(v);
      else if (k == "sigma") d.sigma = v;
      else if (k == "lowest_weight") d.lowest_weight = Rat::parse(v);
      else if (k == "basis") d.basis.push_back(v);
      else throw std::invalid_argument("unknown module description key: " + k);
    }
    if (!header) throw std::invalid_argument("empty module description");
    if (d.engine != "fock" || !((d.T == 1 && d.sigma == "id") || (d.T == 2 && d.sigma == "minus")))
      throw std::invalid_argument("unsupported module description");
    return d;
  }
};

}  // namespace twreg
