#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobi.hpp"
#include "module.hpp"
#include "report.hpp"
#include "scalars.hpp"
#include "series.hpp"

namespace twreg {

class regular_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline long long ceil_rat(const Rat& r) { return -(-r).floor(); }

// Pole orders: x^{r+j2/T}(x-z)^{k+j1/T} Y*(v,x)a has no negative powers of x.
struct PoleBounds {
  long long k = 0, r = 0;
  bool operator==(const PoleBounds& o) const { return k == o.k && r == o.r; }
};

// A linear functional on the basis of a module, evaluated lazily.
class Functional {
 public:
  using Oracle = std::function<Cyc(const Label&)>;
  using BoundFn = std::function<std::optional<PoleBounds>(const Label&)>;

  Functional(std::shared_ptr<const TwistedModule> W, std::string tag, std::string name, Oracle f)
      : W_(std::move(W)), tag_(std::move(tag)), name_(std::move(name)), f_(std::move(f)), id_(next_id()) {}

  std::optional<Rat> bound;  // oracle defined on weights <= bound
  std::optional<Rat> floor;  // declared: vanishes on weights < floor
  BoundFn poles;             // symbolic pole orders, when derivable

  const TwistedModule& module() const { return *W_; }
  std::shared_ptr<const TwistedModule> module_ptr() const { return W_; }
  const std::string& tag() const { return tag_; }
  const std::string& name() const { return name_; }
  long long id() const { return id_; }

  Cyc operator()(const Label& w) const {
    if (bound && W_->weight(w) > *bound) throw regular_error("oracle-bound-exceeded: " + W_->show(w));
    return memo_.get(w, [&] { return f_(w); });
  }
  Cyc on(const Vec& v) const {
    Cyc s;
    for (auto& [k, c] : v) s = s + (*this)(k).scaled(c);
    return s;
  }
  Cyc on(const CVec& v) const {
    Cyc s;
    for (auto& [k, c] : v) s = s + c * (*this)(k);
    return s;
  }
  std::optional<PoleBounds> symbolic(const Label& v) const { return poles ? poles(v) : std::nullopt; }

 private:
  static long long next_id() {
    static std::atomic<long long> n{0};
    return ++n;
  }
  std::shared_ptr<const TwistedModule> W_;
  std::string tag_, name_;
  Oracle f_;
  long long id_;
  mutable Memo<Label, Cyc> memo_;
};

using FPtr = std::shared_ptr<const Functional>;

// The dual-basis functional of a basis vector b of W.
inline FPtr finite_dual(std::shared_ptr<const TwistedModule> W, const Label& b) {
  auto f = std::make_shared<Functional>(W, "finite-dual", "(" + W->show(b) + ")*",
                                        [b](const Label& w) { return Cyc(Rat(w == b ? 1 : 0)); });
  f->floor = W->weight(b);
  return f;
}

struct MembershipResult {
  bool found = false;
  PoleBounds witness;
  std::optional<PoleBounds> symbolic;
  std::string window;
  long long checked = 0;
  std::string message;  // "no-witness-up-to(k_max)" on refutation
};

struct RegularOptions {
  Rat weight_bound = 3;  // test vectors w have weight <= lowest weight + weight_bound
  long long r_max = 6;   // largest pole order at x = 0 searched
  long long band = 2;    // exponents below -r_max that must vanish
  long long k_max = 10;
};

// D^{(z)}_{sigma1,sigma2}(W) for sigma_i = sigma^{s_i}, sigma the involution of M(1).
// W is a (sigma1 sigma2)^{-1}-twisted module, used as a right module through Y^o.
class RegularRep {
 public:
  RegularRep(std::shared_ptr<const Heisenberg> V, std::shared_ptr<const TwistedModule> W, int s1, int s2, Branch br,
             RegularOptions opt = {})
      : V_(std::move(V)), W_(std::move(W)), s1_(s1), s2_(s2), br_(std::move(br)), opt_(opt) {
    T_ = (s1_ || s2_ || W_->T() == 2) ? 2 : 1;
    Label a = Heisenberg::alpha();
    Rat tw = Rat(W_->twist_j(a), W_->T());
    if (!(tw + b1(a) + b2(a)).is_integer())
      throw regular_error("module twist does not match (sigma1 sigma2)^{-1}");
  }

  const Heisenberg& V() const { return *V_; }
  const TwistedModule& W() const { return *W_; }
  std::shared_ptr<const TwistedModule> W_ptr() const { return W_; }
  const Branch& branch() const { return br_; }
  const RegularOptions& options() const { return opt_; }
  int T() const { return T_; }
  int s1() const { return s1_; }
  int s2() const { return s2_; }
  std::string describe() const {
    return "D(z=" + br_.z.str() + ")[s1=" + std::to_string(s1_) + ",s2=" + std::to_string(s2_) + "](" + W_->name() +
           ")";
  }

  Rat b1(const Label& v) const { return s1_ ? Rat(fock::parity(v), 2) : Rat(0); }
  Rat b2(const Label& v) const { return s2_ ? Rat(fock::parity(v), 2) : Rat(0); }
  std::vector<Label> test_basis() const { return W_->basis_upto(W_->lowest_weight() + opt_.weight_bound); }

  // [x^q] Y^o(v,x) w = sum_i (-1)^d/i! (L(1)^i v)_{q+2d-i-1} w
  Vec yo(const Label& v, const Rat& q, const Label& w) const {
    if (!in_p_coset(v, q) || q > p_top(v, w)) return {};
    std::string key = v + '\xff' + q.str() + '\xff' + w;
    return yo_memo_.get(key, [&] {
      long long d = Heisenberg::weight(v);
      Rat sg(d % 2 ? -1 : 1);
      Vec r;
      for (long long i = 0; i <= d; ++i) {
        Vec u = V_->L1_power_over_fact(v, i);
        if (u.empty()) continue;
        axpy(r, sg, W_->act_vec(u, q + Rat(2 * d - i - 1), w));
      }
      return r;
    });
  }
  Rat p_top(const Label& v, const Label& w) const {
    return W_->weight(w) - Rat(Heisenberg::weight(v)) - W_->lowest_weight();
  }
  bool in_p_coset(const Label& v, const Rat& q) const { return W_->in_coset(v, q); }

  // <Y*(v,x)a, w> at x^q
  Cyc P(const Functional& a, const Label& v, const Label& w, const Rat& q) const {
    if (!in_p_coset(v, q) || q > p_top(v, w)) return Cyc();
    std::string key = std::to_string(a.id()) + '\xff' + v + '\xff' + q.str() + '\xff' + w;
    return pair_memo_.get(key, [&] { return a.on(yo(v, q, w)); });
  }

  // [x^m] (x-z)^{beta} <Y*(v,x)a, w>; both factors expanded in negative powers of x.
  Cyc Q(const Functional& a, const Label& v, const Label& w, const Rat& beta, const Rat& m) const {
    Rat p0 = m - beta;
    if (!in_p_coset(v, p0)) return Cyc();
    long long imax = (p_top(v, w) - p0).floor();
    Cyc s;
    Rat mz = -br_.z;
    for (long long i = 0; i <= imax; ++i) {
      Cyc p = P(a, v, w, p0 + Rat(i));
      if (p.is_zero()) continue;
      s = s + p.scaled(binom(beta, i) * rpow(mz, i));
    }
    return s;
  }

  // [x^m] <Y^R(v,x)a, w> computed with pole orders (k, r).
  Cyc R(const Functional& a, const Label& v, const Label& w, const PoleBounds& pb, const Rat& m) const {
    Rat beta = Rat(pb.k) + b1(v);
    Rat low = -Rat(pb.r) - b2(v);
    if (!in_p_coset(v, m - beta) || m < low) return Cyc();
    long long imax = (m - low).floor();
    Cyc s;
    for (long long i = 0; i <= imax; ++i) {
      Cyc q = Q(a, v, w, beta, m - Rat(i));
      if (q.is_zero()) continue;
      s = s + q * br_.z_pow(-beta - Rat(i)).scaled(binom(-beta, i) * Rat(i % 2 ? -1 : 1));
    }
    return s * br_.phase(-beta);
  }

  // [x^m] (x+z)^{l+j2/T} <Y*(v,x+z)a, w>, expanded in nonnegative powers of z.
  Cyc U(const Functional& a, const Label& v, const Label& w, long long l, const Rat& m) const {
    Rat sh = Rat(l) + b2(v);
    Rat top = p_top(v, w) + sh;
    if (!in_p_coset(v, m - sh)) return Cyc();
    long long tmax = (top - m).floor();
    Cyc s;
    for (long long t = 0; t <= tmax; ++t) {
      Cyc p = P(a, v, w, m + Rat(t) - sh);
      if (p.is_zero()) continue;
      s = s + p.scaled(binom(m + Rat(t), t) * rpow(br_.z, t));
    }
    return s;
  }

  // [x^m] <Y^L(v,x)a, w>, with l = pb.r and the lower bound -k - j1/T.
  Cyc L(const Functional& a, const Label& v, const Label& w, const PoleBounds& pb, const Rat& m) const {
    Rat sh = Rat(pb.r) + b2(v);
    Rat low = -Rat(pb.k) - b1(v);
    if (!in_p_coset(v, m - sh) || m < low) return Cyc();
    long long imax = (m - low).floor();
    Cyc s;
    for (long long i = 0; i <= imax; ++i) {
      Cyc u = U(a, v, w, pb.r, m - Rat(i));
      if (u.is_zero()) continue;
      s = s + u * br_.z_pow(-sh - Rat(i)).scaled(binom(-sh, i));
    }
    return s;
  }

  // Scalar series <Y*(v,x)a, w> on the window; support bounded above.
  FracSeries ystar_pairing(const Label& v, const Functional& a, const Label& w, const Window& win) const {
    FracSeries s;
    Rat off = Rat(W_->twist_j(v), W_->T());
    Rat top = p_top(v, w);
    s.vars.push_back(SeriesVar{"x", win.lo, win.hi, std::nullopt, top, ExponentCoset{off, 1}.normalized()});
    for (auto& q : window_points(win, off)) s.add({q}, P(a, v, w, q));
    return s;
  }

  // Coefficient functionals of the two actions.
  FPtr yR_coeff(const FPtr& a, const Label& v, const Rat& m, std::optional<PoleBounds> pb = {}) const {
    return coeff(a, v, m, pb, true);
  }
  FPtr yL_coeff(const FPtr& a, const Label& v, const Rat& m, std::optional<PoleBounds> pb = {}) const {
    return coeff(a, v, m, pb, false);
  }
  FPtr coeff(const FPtr& a, const Label& v, const Rat& m, std::optional<PoleBounds> pb, bool right) const {
    PoleBounds b = pb ? *pb : witness(*a, v);
    std::string key = std::to_string(a->id()) + (right ? "R" : "L") + '\xff' + v + '\xff' + m.str() + '\xff' +
                      std::to_string(b.k) + "," + std::to_string(b.r);
    return coeff_memo_.get(key, [&] {
      const RegularRep* self = this;
      std::string nm = "[x^" + m.str() + "]" + (right ? "YR(" : "YL(") + fock::show(v, false) + ")" + a->name();
      Functional::Oracle f;
      if (right)
        f = [self, a, v, m, b](const Label& w) { return self->R(*a, v, w, b, m); };
      else
        f = [self, a, v, m, b](const Label& w) { return self->L(*a, v, w, b, m); };
      return FPtr(std::make_shared<Functional>(W_, "derived", nm, f));
    });
  }

  // Twisted Jacobi identity for Y^R (right) or Y^L on a, coefficientwise on the window.
  VerificationReport verify_action_jacobi(const FPtr& a, bool right, const Label& u, const Label& v,
                                          const Window& win) const {
    VerificationReport rep;
    rep.identity = right ? "YR-jacobi" : "YL-jacobi";
    rep.params = describe() + " alpha=" + a->name() + " u=" + fock::show(u, false) + " v=" + fock::show(v, false);
    rep.window = win.str();
    auto bb = [&](const Label& x) { return right ? b2(x) : b1(x); };
    auto low = [&](const PoleBounds& pb, const Label& x) {
      return right ? -Rat(pb.r) - b2(x) : -Rat(pb.k) - b1(x);
    };
    auto val = [&](const FPtr& f, const Label& x, const Label& w, const Rat& m) {
      PoleBounds pb = witness(*f, x);
      return right ? R(*f, x, w, pb, m) : L(*f, x, w, pb, m);
    };
    PoleBounds pu = witness(*a, u), pv = witness(*a, v);
    Rat wu(Heisenberg::weight(u)), wv(Heisenberg::weight(v));
    for (auto& w : test_basis()) {
      ThreeTerm<Cyc, Cyc> J;
      J.F1 = [&](const Rat& p, const Rat& q) { return val(coeff(a, v, q, {}, right), u, w, p); };
      J.F2 = [&](const Rat& p, const Rat& q) { return val(coeff(a, u, p, {}, right), v, w, q); };
      J.F3 = [&](const Rat& p, const Rat& q) {
        Rat n = -p - Rat(1);
        Cyc s;
        if (!n.is_integer()) return s;
        for (auto& [t, c] : V_->mode(u, n.num64(), v)) s = s + val(a, t, w, q).scaled(c);
        return s;
      };
      J.imax1 = [&](const Rat&, const Rat&, const Rat& e2) { return (e2 - low(pv, v)).floor(); };
      J.imax2 = [&](const Rat&, const Rat& e1, const Rat&) { return (e1 - low(pu, u)).floor(); };
      J.imax3 = [&](const Rat& e0, const Rat&, const Rat&) { return (e0 + wu + wv).floor(); };
      J.a3 = -bb(u);
      for (auto& e0 : window_points(win, Rat(0)))
        for (auto& e1 : window_points(win, -bb(u)))
          for (auto& e2 : window_points(win, -bb(v))) {
            ++rep.checked;
            Cyc r = J.residual(e0, e1, e2);
            if (!r.is_zero()) {
              rep.fail("nonzero residual at (x0,x1,x2)^" + rats({e0, e1, e2}) + " on " + W_->show(w));
              return rep;
            }
          }
    }
    return rep;
  }

  // Least k <= k_max for which (x-z)^{k+j1/T} Y*(v,x)a is lower truncated on the test vectors:
  // the coefficients of x^{j2/T}(...) at exponents -r_max-band..-r_max-1 vanish, and r is the deepest
  // nonzero exponent above that band.
  MembershipResult check_membership(const Functional& a, const Label& v, std::optional<long long> k_max = {}) const {
    MembershipResult res;
    res.symbolic = a.symbolic(v);
    long long kmax = k_max ? *k_max : opt_.k_max;
    long long rmax = opt_.r_max;
    if (res.symbolic) rmax = std::max(rmax, res.symbolic->r);
    auto basis = test_basis();
    Rat bb2 = b2(v);
    res.window = "[" + std::to_string(-rmax - opt_.band) + ",-1]";
    for (long long k = 0; k <= kmax; ++k) {
      Rat beta = Rat(k) + b1(v);
      bool ok = true;
      long long rf = 0;
      for (auto& w : basis) {
        for (long long e = -rmax - opt_.band; e <= -1 && ok; ++e) {
          Rat m = Rat(e) - bb2;
          ++res.checked;
          if (Q(a, v, w, beta, m).is_zero()) continue;
          if (e < -rmax) ok = false;
          else rf = std::max(rf, -e);
        }
        if (!ok) break;
      }
      if (ok) {
        res.found = true;
        res.witness = PoleBounds{k, rf};
        return res;
      }
    }
    res.message = "no-witness-up-to(" + std::to_string(kmax) + ")";
    return res;
  }

  // Translated criterion: x^{k+j1/T}(x+z)^{r+j2/T} Y*(v,x+z)a has no negative powers (band check).
  bool check_translated(const Functional& a, const Label& v, const PoleBounds& pb, std::string* why = nullptr) const {
    Rat bb1 = b1(v);
    for (auto& w : test_basis())
      for (long long e = -pb.k - opt_.band; e <= -pb.k - 1; ++e) {
        Rat m = Rat(e) - bb1;
        Cyc u = U(a, v, w, pb.r, m);
        if (!u.is_zero()) {
          if (why) *why = "translated series nonzero at x^" + m.str() + " on " + W_->show(w);
          return false;
        }
      }
    return true;
  }

  // Pole orders used for the actions: symbolic when available, otherwise searched.
  PoleBounds witness(const Functional& a, const Label& v) const {
    if (auto s = a.symbolic(v)) return *s;
    std::string key = std::to_string(a.id()) + '\xff' + v;
    auto r = wit_memo_.get(key, [&] { return check_membership(a, v); });
    if (!r.found) throw regular_error("missing witness for " + a.name() + " v=" + fock::show(v, false));
    return r.witness;
  }

  // Y^R(v,x)a on the window, per test vector; also checks independence of k.
  VerificationReport yR_action(const Functional& a, const Label& v, const Window& win, const PoleBounds& pb) const {
    VerificationReport rep = start("yR-k-independence", a, v, win);
    PoleBounds pb1{pb.k + 1, pb.r};
    Rat off = -b2(v);
    for (auto& w : test_basis())
      for (auto& m : window_points(win, off)) {
        ++rep.checked;
        Cyc c0 = R(a, v, w, pb, m), c1 = R(a, v, w, pb1, m);
        if (!(c0 == c1)) {
          rep.fail("k vs k+1 differ at x^" + m.str() + " on " + W_->show(w) + ": " + c0.str() + " vs " + c1.str());
          return rep;
        }
      }
    return rep;
  }

  VerificationReport yL_action(const Functional& a, const Label& v, const Window& win, const PoleBounds& pb) const {
    VerificationReport rep = start("yL-l-independence", a, v, win);
    std::string why;
    if (!check_translated(a, v, pb, &why)) {
      rep.fail(why);
      return rep;
    }
    PoleBounds pb1{pb.k, pb.r + 1};
    Rat off = -b1(v);
    for (auto& w : test_basis())
      for (auto& m : window_points(win, off)) {
        ++rep.checked;
        Cyc c0 = L(a, v, w, pb, m), c1 = L(a, v, w, pb1, m);
        if (!(c0 == c1)) {
          rep.fail("l vs l+1 differ at x^" + m.str() + " on " + W_->show(w) + ": " + c0.str() + " vs " + c1.str());
          return rep;
        }
      }
    return rep;
  }

  // x0^-1 d((x-z)/x0)((x-z)/x0)^{j1/T} Y*(v,x)a - e^{j1 pi i/T} x0^-1 d((z-x)/(-x0))((z-x)/x0)^{j1/T} Y^R(v,x)a
  //   = x^-1 d((z+x0)/x)((z+x0)/x)^{j2/T} Y^L(v,x0)a, coefficientwise in (x0, x).
  VerificationReport verify_bridge(const Functional& a, const Label& v, const Window& win, const PoleBounds& pb,
                                   bool drop_phase = false) const {
    VerificationReport rep = start(drop_phase ? "bridge-without-phase" : "bridge", a, v, win);
    Rat bb1 = b1(v), bb2 = b2(v);
    Rat lowR = -Rat(pb.r) - bb2, lowL = -Rat(pb.k) - bb1;
    Cyc ph = drop_phase ? Cyc(Rat(1)) : br_.phase(bb1);
    for (auto& w : test_basis())
      for (auto& a0 : window_points(win, -bb1))
        for (auto& b : window_points(win, -bb2)) {
          ++rep.checked;
          Cyc lhs, rhs;
          Rat n1 = -a0 - Rat(1) - bb1;
          if (n1.is_integer()) {
            lhs = lhs + Q(a, v, w, n1 + bb1, b);
            long long nn = n1.num64();
            Cyc t2;
            Rat g = n1 + bb1;
            for (long long i = 0; Rat(i) <= b - lowR; ++i) {
              Cyc r = R(a, v, w, pb, b - Rat(i));
              if (r.is_zero()) continue;
              t2 = t2 + r * br_.z_pow(g - Rat(i)).scaled(binom(g, i) * Rat(i % 2 ? -1 : 1));
            }
            lhs = lhs - (ph * t2).scaled(Rat(nn % 2 ? -1 : 1));
          }
          Rat n3 = -b - Rat(1) - bb2;
          if (n3.is_integer()) {
            Rat g = n3 + bb2;
            for (long long i = 0; Rat(i) <= a0 - lowL; ++i) {
              Cyc l = L(a, v, w, pb, a0 - Rat(i));
              if (l.is_zero()) continue;
              rhs = rhs + l * br_.z_pow(g - Rat(i)).scaled(binom(g, i));
            }
          }
          if (!(lhs == rhs)) {
            rep.fail("mismatch at (x0,x)^" + rats({a0, b}) + " on " + W_->show(w) + ": " + lhs.str() + " vs " +
                     rhs.str());
            return rep;
          }
        }
    return rep;
  }

  // Y^L(u,x1) Y^R(v,x2) a = Y^R(v,x2) Y^L(u,x1) a on the window.
  VerificationReport verify_LR_commutation(const FPtr& a, const Label& u, const Label& v, const Window& win) const {
    VerificationReport rep;
    rep.identity = "LR-commutation";
    rep.params = describe() + " alpha=" + a->name() + " u=" + fock::show(u, false) + " v=" + fock::show(v, false);
    rep.window = win.str();
    std::vector<std::pair<Rat, FPtr>> gam, del;
    for (auto& b : window_points(win, -b2(v))) gam.emplace_back(b, yR_coeff(a, v, b));
    for (auto& a1 : window_points(win, -b1(u))) del.emplace_back(a1, yL_coeff(a, u, a1));
    auto basis = test_basis();
    for (auto& [b, g] : gam) {
      PoleBounds pg = witness(*g, u);
      for (auto& [a1, d] : del) {
        PoleBounds pd = witness(*d, v);
        for (auto& w : basis) {
          ++rep.checked;
          Cyc lhs = L(*g, u, w, pg, a1), rhs = R(*d, v, w, pd, b);
          if (!(lhs == rhs)) {
            rep.fail("mismatch at (x1,x2)^" + rats({a1, b}) + " on " + W_->show(w) + ": " + lhs.str() + " vs " +
                     rhs.str());
            return rep;
          }
        }
      }
    }
    return rep;
  }

  // W-star pattern: a vanishes below its declared floor, and the window coefficients of both
  // actions vanish below floor + wt v - k - r - (j1 + j2)/T.
  VerificationReport wstar_closure_check(const FPtr& a, const Label& v, const Window& win) const {
    VerificationReport rep = start("wstar-closure", *a, v, win);
    if (!a->floor) {
      rep.fail("functional has no declared vanishing floor");
      return rep;
    }
    auto basis = test_basis();
    for (auto& w : basis)
      if (W_->weight(w) < *a->floor) {
        ++rep.checked;
        if (!(*a)(w).is_zero()) {
          rep.fail("nonzero below declared floor on " + W_->show(w));
          return rep;
        }
      }
    PoleBounds pb = witness(*a, v);
    Rat fl = *a->floor + Rat(Heisenberg::weight(v)) - Rat(pb.k + pb.r) - b1(v) - b2(v);
    auto scan = [&](const FPtr& g, const std::string& what) {
      for (auto& w : basis)
        if (W_->weight(w) < fl) {
          ++rep.checked;
          if (!(*g)(w).is_zero()) {
            rep.fail(what + " nonzero below " + fl.str() + " on " + W_->show(w));
            return false;
          }
        }
      return true;
    };
    for (auto& m : window_points(win, -b2(v)))
      if (!scan(yR_coeff(a, v, m, pb), "[x^" + m.str() + "]YR")) return rep;
    for (auto& m : window_points(win, -b1(v)))
      if (!scan(yL_coeff(a, v, m, pb), "[x^" + m.str() + "]YL")) return rep;
    return rep;
  }

 private:
  VerificationReport start(const std::string& id, const Functional& a, const Label& v, const Window& win) const {
    VerificationReport rep;
    rep.identity = id;
    rep.params = describe() + " alpha=" + a.name() + " v=" + fock::show(v, false);
    rep.window = win.str();
    return rep;
  }

  std::shared_ptr<const Heisenberg> V_;
  std::shared_ptr<const TwistedModule> W_;
  int s1_, s2_, T_;
  Branch br_;
  RegularOptions opt_;
  mutable Memo<std::string, Vec> yo_memo_;
  mutable Memo<std::string, Cyc> pair_memo_;
  mutable Memo<std::string, MembershipResult> wit_memo_;
  mutable Memo<std::string, FPtr> coeff_memo_;
};

}  // namespace twreg
