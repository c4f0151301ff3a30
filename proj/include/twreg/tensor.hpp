#pragma once

#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobi.hpp"
#include "module.hpp"
#include "regular.hpp"

namespace twreg {

class tensor_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Labels of V (x) V and of product spaces: first + '\xfe' + second.
namespace pairs {
inline constexpr char kSep = '\xfe';
inline Label make(const Label& a, const Label& b) { return a + kSep + b; }
inline std::pair<Label, Label> split(const Label& p) {
  auto i = p.find(kSep);
  if (i == Label::npos) throw std::invalid_argument("not a pair label");
  return {p.substr(0, i), p.substr(i + 1)};
}
}  // namespace pairs

// A bigraded space with two V-actions: act1 is sigma1-twisted, act2 is sigma2-twisted.
class TwoActionSpace {
 public:
  virtual ~TwoActionSpace() = default;
  virtual std::string name() const = 0;
  virtual int T1() const = 0;
  virtual int T2() const = 0;
  virtual Rat lowest1() const = 0;
  virtual Rat lowest2() const = 0;
  virtual Rat weight1(const Label& w) const = 0;
  virtual Rat weight2(const Label& w) const = 0;
  virtual std::vector<Label> basis(const Rat& h) const = 0;  // total weight h
  virtual int j1(const Label& u) const = 0;
  virtual int j2(const Label& u) const = 0;
  virtual Vec act1(const Label& u, const Rat& n, const Label& w) const = 0;
  virtual Vec act2(const Label& u, const Rat& n, const Label& w) const = 0;
  virtual std::string show(const Label& w) const = 0;
  // Vectors of V on which the second action is defined, up to weight n.
  virtual std::vector<Label> second_domain(long long n) const { return Heisenberg().basis_upto(n); }

  Vec act1_on(const Label& u, const Rat& n, const Vec& w) const {
    Vec r;
    for (auto& [k, c] : w) axpy(r, c, act1(u, n, k));
    return r;
  }
  Vec act2_on(const Label& u, const Rat& n, const Vec& w) const {
    Vec r;
    for (auto& [k, c] : w) axpy(r, c, act2(u, n, k));
    return r;
  }
};

// W1 (x) W2 with the two actions on the two factors.
class ProductSpace : public TwoActionSpace {
 public:
  ProductSpace(std::shared_ptr<const TwistedModule> a, std::shared_ptr<const TwistedModule> b)
      : a_(std::move(a)), b_(std::move(b)) {}
  std::string name() const override { return a_->name() + "(x)" + b_->name(); }
  int T1() const override { return a_->T(); }
  int T2() const override { return b_->T(); }
  Rat lowest1() const override { return a_->lowest_weight(); }
  Rat lowest2() const override { return b_->lowest_weight(); }
  Rat weight1(const Label& w) const override { return a_->weight(pairs::split(w).first); }
  Rat weight2(const Label& w) const override { return b_->weight(pairs::split(w).second); }
  std::vector<Label> basis(const Rat& h) const override {
    std::vector<Label> out;
    for (auto& h1 : a_->weights_upto(h - b_->lowest_weight()))
      for (auto& x : a_->basis(h1))
        for (auto& y : b_->basis(h - h1)) out.push_back(pairs::make(x, y));
    return out;
  }
  int j1(const Label& u) const override { return a_->twist_j(u); }
  int j2(const Label& u) const override { return b_->twist_j(u); }
  Vec act1(const Label& u, const Rat& n, const Label& w) const override {
    auto [x, y] = pairs::split(w);
    Vec r;
    for (auto& [k, c] : a_->act(u, n, x)) r.emplace(pairs::make(k, y), c);
    return r;
  }
  Vec act2(const Label& u, const Rat& n, const Label& w) const override {
    auto [x, y] = pairs::split(w);
    Vec r;
    for (auto& [k, c] : b_->act(u, n, y)) r.emplace(pairs::make(x, k), c);
    return r;
  }
  std::string show(const Label& w) const override {
    auto [x, y] = pairs::split(w);
    return a_->show(x) + " (x) " + b_->show(y);
  }

 private:
  std::shared_ptr<const TwistedModule> a_, b_;
};

// W with its own action first and the trivial second action: Y2(1,x) = id, nothing else is used.
class TrivialSecond : public TwoActionSpace {
 public:
  explicit TrivialSecond(std::shared_ptr<const TwistedModule> a) : a_(std::move(a)) {}
  std::string name() const override { return a_->name() + "(x)trivial"; }
  int T1() const override { return a_->T(); }
  int T2() const override { return 1; }
  Rat lowest1() const override { return a_->lowest_weight(); }
  Rat lowest2() const override { return Rat(0); }
  Rat weight1(const Label& w) const override { return a_->weight(w); }
  Rat weight2(const Label&) const override { return Rat(0); }
  std::vector<Label> basis(const Rat& h) const override { return a_->basis(h); }
  int j1(const Label& u) const override { return a_->twist_j(u); }
  int j2(const Label&) const override { return 0; }
  Vec act1(const Label& u, const Rat& n, const Label& w) const override { return a_->act(u, n, w); }
  Vec act2(const Label& u, const Rat& n, const Label& w) const override {
    if (!u.empty()) throw tensor_error("trivial second action only defined on the vacuum");
    return n == Rat(-1) ? unit(w) : Vec{};
  }
  std::string show(const Label& w) const override { return a_->show(w); }
  std::vector<Label> second_domain(long long) const override { return {Label()}; }

 private:
  static Vec unit(const Label& w) { return Vec{{w, Rat(1)}}; }
  std::shared_ptr<const TwistedModule> a_;
};

// Both actions are the action of one module on itself; they do not commute.
class DoubledAction : public TwoActionSpace {
 public:
  explicit DoubledAction(std::shared_ptr<const TwistedModule> a) : a_(std::move(a)) {}
  std::string name() const override { return a_->name() + "(doubled)"; }
  int T1() const override { return a_->T(); }
  int T2() const override { return a_->T(); }
  Rat lowest1() const override { return a_->lowest_weight(); }
  Rat lowest2() const override { return Rat(0); }
  Rat weight1(const Label& w) const override { return a_->weight(w); }
  Rat weight2(const Label&) const override { return Rat(0); }
  std::vector<Label> basis(const Rat& h) const override { return a_->basis(h); }
  int j1(const Label& u) const override { return a_->twist_j(u); }
  int j2(const Label& u) const override { return a_->twist_j(u); }
  Vec act1(const Label& u, const Rat& n, const Label& w) const override { return a_->act(u, n, w); }
  Vec act2(const Label& u, const Rat& n, const Label& w) const override { return a_->act(u, n, w); }
  std::string show(const Label& w) const override { return a_->show(w); }

 private:
  std::shared_ptr<const TwistedModule> a_;
};

// Commutation of the two actions on V-basis vectors up to vweight, modes in the window, and
// basis vectors up to total weight lowest + wbound; each action must also keep the other grading.
inline VerificationReport check_actions_commute(const TwoActionSpace& S, long long vweight, const Rat& wbound,
                                                const Window& win) {
  VerificationReport rep;
  rep.identity = "actions-commute";
  rep.params = S.name();
  rep.window = win.str();
  Heisenberg V;
  auto vs = V.basis_upto(vweight), vs2 = S.second_domain(vweight);
  std::vector<Label> ws;
  for (Rat h = S.lowest1() + S.lowest2(); h <= S.lowest1() + S.lowest2() + wbound; h += Rat(1, 2))
    for (auto& b : S.basis(h)) ws.push_back(b);
  auto modes = [&](int T, int j) { return window_points(win, Rat(j, T)); };
  std::string grading;
  for (auto& u1 : vs)
    for (auto& u2 : vs2)
      for (auto& n1 : modes(S.T1(), S.j1(u1)))
        for (auto& n2 : modes(S.T2(), S.j2(u2)))
          for (auto& w : ws) {
            ++rep.checked;
            Vec a = S.act2(u2, n2, w), b = S.act1(u1, n1, w);
            Vec lhs = S.act1_on(u1, n1, a), rhs = S.act2_on(u2, n2, b);
            if (!vec_equal(lhs, rhs)) {
              rep.fail("witness " + fock::show(u1, false) + "_" + n1.str() + ", " + fock::show(u2, false) + "_" +
                       n2.str() + " on " + S.show(w));
              return rep;
            }
            if (!grading.empty()) continue;
            for (auto& [k, c] : a)
              if (S.weight1(k) != S.weight1(w))
                grading = "second action moves the first grading: " + fock::show(u2, false) + "_" + n2.str() +
                          " on " + S.show(w);
            for (auto& [k, c] : b)
              if (S.weight2(k) != S.weight2(w))
                grading = "first action moves the second grading: " + fock::show(u1, false) + "_" + n1.str() +
                          " on " + S.show(w);
          }
  if (!grading.empty()) rep.fail(grading);
  return rep;
}

// V (x) V for V = M(1), with the automorphism sigma^{s1} (x) sigma^{s2}.
class TensorVOA {
 public:
  static Rat weight(const Label& u) {
    auto [a, b] = pairs::split(u);
    return fock::degree(a) + fock::degree(b);
  }
  static std::string show(const Label& u) {
    auto [a, b] = pairs::split(u);
    return fock::show(a, false) + "(x)" + fock::show(b, false);
  }
  std::vector<Label> basis_upto(long long n) const {
    std::vector<Label> out;
    for (long long k = 0; k <= n; ++k)
      for (long long i = 0; i <= k; ++i)
        for (auto& a : V_.basis(i))
          for (auto& b : V_.basis(k - i)) out.push_back(pairs::make(a, b));
    return out;
  }
  // (u1 (x) u2)_n (v1 (x) v2) = sum_a (u1)_a v1 (x) (u2)_{n-1-a} v2
  Vec mode(const Label& u, long long n, const Label& v) const {
    auto [u1, u2] = pairs::split(u);
    auto [v1, v2] = pairs::split(v);
    long long amax = (fock::degree(u1) + fock::degree(v1)).num64() - 1;
    long long amin = n - (fock::degree(u2) + fock::degree(v2)).num64();
    Vec r;
    for (long long a = amin; a <= amax; ++a) {
      Vec x = V_.mode(u1, a, v1);
      if (x.empty()) continue;
      Vec y = V_.mode(u2, n - 1 - a, v2);
      for (auto& [k1, c1] : x)
        for (auto& [k2, c2] : y) r[pairs::make(k1, k2)] += c1 * c2;
    }
    for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return r;
  }

 private:
  Heisenberg V_;
};

// The sigma1 (x) sigma2-twisted V (x) V-module with Y(u1 (x) u2, x) = Y1(u1,x) Y2(u2,x).
class TensorModule : public TwistedModule {
 public:
  TensorModule(std::shared_ptr<const TwoActionSpace> S, long long vweight = 2, const Rat& wbound = Rat(2),
               const Window& win = Window{-3, 3})
      : S_(std::move(S)) {
    auto rep = check_actions_commute(*S_, vweight, wbound, win);
    if (!rep.pass) throw tensor_error("actions-do-not-commute: " + rep.failure);
  }

  const TwoActionSpace& space() const { return *S_; }
  std::string name() const override { return "tensor[" + S_->name() + "]"; }
  int T() const override { return std::lcm(S_->T1(), S_->T2()); }
  Rat lowest_weight() const override { return S_->lowest1() + S_->lowest2(); }
  Rat weight(const Label& w) const override { return S_->weight1(w) + S_->weight2(w); }
  std::vector<Label> basis(const Rat& h) const override { return S_->basis(h); }
  int twist_j(const Label& u) const override {
    auto [u1, u2] = pairs::split(u);
    int t = T();
    return (S_->j1(u1) * (t / S_->T1()) + S_->j2(u2) * (t / S_->T2())) % t;
  }
  std::string show(const Label& w) const override { return S_->show(w); }

  Vec act(const Label& u, const Rat& n, const Label& w) const override {
    if (!in_coset(u, n)) return {};
    auto [u1, u2] = pairs::split(u);
    Rat off(S_->j1(u1), S_->T1());
    Rat amax = fock::degree(u1) + S_->weight1(w) - S_->lowest1() - Rat(1);
    Rat amin = n - fock::degree(u2) - S_->weight2(w) + S_->lowest2();
    Rat a = off + Rat((amin - off).floor());
    if (a < amin) a += Rat(1);
    Vec r;
    for (; a <= amax; a += Rat(1)) {
      Vec y = S_->act2(u2, n - Rat(1) - a, w);
      if (y.empty()) continue;
      axpy(r, Rat(1), S_->act1_on(u1, a, y));
    }
    return r;
  }

 private:
  std::shared_ptr<const TwoActionSpace> S_;
};

// Twisted Jacobi identity of a tensor module for the tensor algebra.
inline VerificationReport verify_tensor_jacobi(const TensorModule& M, const Label& u, const Label& v, const Label& w,
                                               const Window& win, JacobiOptions opt = {}) {
  TensorVOA VV;
  return verify_twisted_jacobi_with(
      [&VV](const Label& a, long long k, const Label& b) { return VV.mode(a, k, b); }, TensorVOA::weight(u),
      TensorVOA::weight(v), M, u, v, w, win, opt,
      M.name() + " u=" + TensorVOA::show(u) + " v=" + TensorVOA::show(v) + " w=" + M.show(w));
}

// The V (x) V-module structure on D: Y^L for the left factor and Y^R for the right one. Since u (x) 1 and
// 1 (x) v generate V (x) V, the check is the Jacobi identity of each action on its own generators and
// their commutation.
inline VerificationReport verify_regular_tensor(const RegularRep& rr, const FPtr& a, const std::vector<Label>& us,
                                                const Window& win) {
  VerificationReport rep;
  rep.identity = "regular-tensor-module";
  rep.params = rr.describe() + " alpha=" + a->name();
  rep.window = win.str();
  for (auto& u : us)
    for (auto& v : us) {
      rep.absorb(rr.verify_action_jacobi(a, false, u, v, win));
      rep.absorb(rr.verify_action_jacobi(a, true, u, v, win));
      rep.absorb(rr.verify_LR_commutation(a, u, v, win));
      if (!rep.pass) return rep;
    }
  return rep;
}

}  // namespace twreg
