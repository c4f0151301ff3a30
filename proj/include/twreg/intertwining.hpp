#pragma once

#include <functional>
#include <map>
#include <tuple>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jacobi.hpp"
#include "module.hpp"
#include "regular.hpp"
#include "report.hpp"
#include "scalars.hpp"
#include "series.hpp"

namespace twreg {

inline Vec unit(const Label& w) { return Vec{{w, Rat(1)}}; }

inline Cyc coeff_of(const CVec& v, const Label& k) {
  auto it = v.find(k);
  return it == v.end() ? Cyc() : it->second;
}

inline CVec cvec_of(const Vec& v) { return to_cvec(v); }

// e^{cL(1)} w on a module, c rational (L(1) lowers weight, so the sum terminates).
inline Vec exp_L1(const TwistedModule& M, const Vec& w, const Rat& c) {
  Vec r = w, term = w;
  for (long long i = 1; !term.empty(); ++i) {
    term = scaled(M.L(1, term), c / Rat(i));
    axpy(r, Rat(1), term);
  }
  return r;
}

// Intertwining operator of type (M3; M1 M2) given by its modes (w1)_h w2.
struct IntertwinerData {
  std::string name;
  std::shared_ptr<const TwistedModule> M1, M2, M3;
  std::function<CVec(const Label&, const Rat&, const Label&)> mode;

  CVec mode_vec(const CVec& w1, const Rat& h, const CVec& w2) const {
    CVec r;
    for (auto& [a, ca] : w1)
      for (auto& [b, cb] : w2) axpy(r, ca * cb, mode(a, h, b));
    return r;
  }

  // Exponents h with (w1)_h w2 landing in M3 weights up to hmax3.
  std::vector<Rat> exponents(const Label& w1, const Label& w2, const Rat& hmax3) const {
    std::vector<Rat> out;
    Rat s = M1->weight(w1) + M2->weight(w2) - Rat(1);
    for (auto& h3 : M3->weights_upto(hmax3)) out.push_back(s - h3);
    return out;
  }
};

using IntertwinerPtr = std::shared_ptr<const IntertwinerData>;

// Y^W_{WV}(w,x)v = e^{xL(-1)} Y_W(v, e^{pi i}x) w.
inline IntertwinerPtr standard_intertwiner_WV(std::shared_ptr<const TwistedModule> W,
                                              std::shared_ptr<const Heisenberg> V, const Branch& br) {
  auto d = std::make_shared<IntertwinerData>();
  d->name = "Y^W_{W V}(" + W->name() + ")";
  d->M1 = W;
  d->M2 = V->adjoint_ptr();
  d->M3 = W;
  auto memo = std::make_shared<Memo<std::string, CVec>>();
  const TwistedModule* Wp = W.get();
  Branch b = br;
  d->mode = [Wp, b, memo](const Label& w, const Rat& h, const Label& v) {
    std::string key = w + '\xff' + h.str() + '\xff' + v;
    return memo->get(key, [&] {
      CVec r;
      Rat top = Rat(Heisenberg::weight(v)) + Wp->weight(w) - h - Rat(1) - Wp->lowest_weight();
      if (top.sign() < 0) return r;
      long long jmax = top.floor();
      Rat fact(1);
      for (long long j = 0; j <= jmax; ++j) {
        if (j) fact *= Rat(j);
        Vec t = Wp->act(v, h + Rat(j), w);
        if (t.empty()) continue;
        for (long long s = 0; s < j; ++s) t = Wp->L(-1, t);
        axpy(r, b.phase(-(h + Rat(j) + Rat(1))) * Cyc(Rat(1) / fact), to_cvec(t));
      }
      return r;
    });
  };
  return d;
}

// Y^{V'}_{W W'} through <Y(w,x)w', v> = <theta w', Y^W_{WV}(e^{xL(1)} e^{pi i L(0)} x^{-2L(0)} w, x^{-1}) v>
// with theta the parity operator.
// Modes land in V' = contragredient of the adjoint module, whose basis is dual to that of V.
inline IntertwinerPtr standard_intertwiner_VWW(std::shared_ptr<const TwistedModule> W,
                                               std::shared_ptr<const Heisenberg> V, const Branch& br) {
  auto d = std::make_shared<IntertwinerData>();
  d->name = "Y^{V'}_{W W'}(" + W->name() + ")";
  d->M1 = W;
  d->M2 = std::make_shared<Contragredient>(W, V);
  d->M3 = std::make_shared<Contragredient>(V->adjoint_ptr(), V);
  auto first = standard_intertwiner_WV(W, V, br);
  auto memo = std::make_shared<Memo<std::string, CVec>>();
  const TwistedModule* Wp = W.get();
  const Heisenberg* Vp = V.get();
  Branch b = br;
  d->mode = [Wp, Vp, b, first, memo](const Label& w, const Rat& h, const Label& wp) {
    std::string key = w + '\xff' + h.str() + '\xff' + wp;
    return memo->get(key, [&] {
      CVec r;
      Rat hw = Wp->weight(w), hp = Wp->weight(wp);
      Rat dd = hw + hp - h - Rat(1);
      if (!dd.is_integer() || dd.sign() < 0) return r;
      long long dv = dd.num64();
      // The parity operator on W' turns the transpose, of type (V'; W, W' o sigma), into type (V'; W, W').
      Cyc ph = b.phase(hw);
      if (((hp - Wp->lowest_weight()) * Rat(2)).num64() % 2) ph = -ph;
      std::vector<Vec> wi;
      Vec cur = unit(w);
      for (long long i = 0; !cur.empty(); ++i) {
        wi.push_back(cur);
        cur = scaled(Wp->L(1, cur), Rat(1, i + 1));
      }
      for (auto& u : Vp->basis(dv)) {
        Cyc c;
        for (size_t i = 0; i < wi.size(); ++i) {
          Rat hi = hw - Rat((long long)i) + Rat(dv) - Rat(1) - hp;
          c = c + coeff_of(first->mode_vec(to_cvec(wi[i]), hi, CVec{{u, Cyc(Rat(1))}}), wp);
        }
        c = c * ph;
        if (!c.is_zero()) r.emplace(u, c);
      }
      return r;
    });
  };
  return d;
}

inline long long pole_order(const TwistedModule& M, const Label& v, const Label& w) {
  Rat b = Rat(M.twist_j(v), M.T());
  Rat top = Rat(Heisenberg::weight(v)) + M.weight(w) - M.lowest_weight() - Rat(1);
  Rat n = b + Rat((top - b).floor());
  for (; n + Rat(1) - b > Rat(0); n -= Rat(1))
    if (!M.act(v, n, w).empty()) return (n + Rat(1) - b).num64();
  return 0;
}

// A bilinear map W1 x W2 -> X* with values as functionals on X.
class PzMap {
 public:
  using Bilinear = std::function<Cyc(const Label&, const Label&, const Label&)>;

  PzMap(std::string name, std::shared_ptr<const TwistedModule> M1, std::shared_ptr<const TwistedModule> M2,
        std::shared_ptr<const TwistedModule> X, Branch br, Bilinear f)
      : name_(std::move(name)), M1_(std::move(M1)), M2_(std::move(M2)), X_(std::move(X)), br_(std::move(br)),
        f_(std::move(f)) {}

  const std::string& name() const { return name_; }
  const TwistedModule& M1() const { return *M1_; }
  const TwistedModule& M2() const { return *M2_; }
  const TwistedModule& X() const { return *X_; }
  std::shared_ptr<const TwistedModule> M1_ptr() const { return M1_; }
  std::shared_ptr<const TwistedModule> M2_ptr() const { return M2_; }
  std::shared_ptr<const TwistedModule> X_ptr() const { return X_; }
  const Branch& branch() const { return br_; }

  Cyc value(const Label& w1, const Label& w2, const Label& x) const { return f_(w1, w2, x); }

  Cyc value(const CVec& w1, const CVec& w2, const Label& x) const {
    Cyc s;
    for (auto& [a, ca] : w1)
      for (auto& [b, cb] : w2) s = s + ca * cb * f_(a, b, x);
    return s;
  }

  // F(w1 (x) w2) as a functional, with pole orders from the two arguments.
  FPtr image(const CVec& w1, const CVec& w2) const {
    std::string nm = "F(" + show(*M1_, w1) + "|" + show(*M2_, w2) + ")";
    std::string key = nm;
    return images_.get(key, [&] {
      const PzMap* self = this;
      auto f = std::make_shared<Functional>(X_, "F-image", nm,
                                            [self, w1, w2](const Label& x) { return self->value(w1, w2, x); });
      f->floor = X_->lowest_weight();
      auto m1 = M1_, m2 = M2_;
      f->poles = [m1, m2, w1, w2](const Label& v) -> std::optional<PoleBounds> {
        PoleBounds pb;
        for (auto& [a, c] : w1) pb.k = std::max(pb.k, pole_order(*m1, v, a));
        for (auto& [b, c] : w2) pb.r = std::max(pb.r, pole_order(*m2, v, b));
        return pb;
      };
      return FPtr(f);
    });
  }
  FPtr image(const Label& w1, const Label& w2) const {
    return image(CVec{{w1, Cyc(Rat(1))}}, CVec{{w2, Cyc(Rat(1))}});
  }

  Rat b1(const Label& v) const { return Rat(M1_->twist_j(v), M1_->T()); }
  Rat b2(const Label& v) const { return Rat(M2_->twist_j(v), M2_->T()); }

  static std::string show(const TwistedModule& M, const CVec& w) {
    std::string s;
    for (auto& [k, c] : w) {
      if (!s.empty()) s += " + ";
      s += "(" + c.str() + ")" + M.show(k);
    }
    return s.empty() ? "0" : s;
  }

 private:
  std::string name_;
  std::shared_ptr<const TwistedModule> M1_, M2_, X_;
  Branch br_;
  Bilinear f_;
  mutable Memo<std::string, FPtr> images_;
};

using PzPtr = std::shared_ptr<const PzMap>;

// F(w1 (x) w2) = Y(w1, e^{log z}) w2 for Y of type (X'; M1 M2); X' must be the contragredient of X.
inline PzPtr f_z(const IntertwinerPtr& Y, std::shared_ptr<const TwistedModule> X, const Branch& br) {
  auto c = std::dynamic_pointer_cast<const Contragredient>(Y->M3);
  if (!c || c->base().name() != X->name()) throw regular_error("unsupported: target is not the contragredient of X");
  Branch b = br;
  auto Xp = X;
  auto f = [Y, Xp, b](const Label& w1, const Label& w2, const Label& x) {
    Rat h = Y->M1->weight(w1) + Y->M2->weight(w2) - Xp->weight(x) - Rat(1);
    Cyc c0 = coeff_of(Y->mode(w1, h, w2), x);
    if (c0.is_zero()) return Cyc();
    Rat e = -h - Rat(1);
    if (!(e * Rat(b.D)).is_integer()) throw regular_error("coset-denominator mismatch: " + e.str());
    return c0 * b.z_pow(e);
  };
  return std::make_shared<PzMap>("F^(z=" + br.z.str() + ")[" + Y->name + "]", Y->M1, Y->M2, X, br, f);
}

// (w1)_n w2 = e^{(n+1) log z} psi(w1 (x) w2)_{h1+h2-n-1}, valued in X'.
inline IntertwinerPtr hom_to_intertwiner(const PzPtr& psi, std::shared_ptr<const Heisenberg> V) {
  auto d = std::make_shared<IntertwinerData>();
  d->name = "recovered[" + psi->name() + "]";
  d->M1 = psi->M1_ptr();
  d->M2 = psi->M2_ptr();
  d->M3 = std::make_shared<Contragredient>(psi->X_ptr(), V);
  PzPtr p = psi;
  d->mode = [p](const Label& w1, const Rat& n, const Label& w2) {
    CVec r;
    Rat hx = p->M1().weight(w1) + p->M2().weight(w2) - n - Rat(1);
    const TwistedModule& X = p->X();
    if (hx < X.lowest_weight() || !((hx - X.lowest_weight()) * Rat(X.T())).is_integer()) return r;
    Cyc zf = p->branch().z_pow(n + Rat(1));
    for (auto& x : X.basis(hx)) {
      Cyc c = p->value(w1, w2, x);
      if (!c.is_zero()) r.emplace(x, c * zf);
    }
    return r;
  };
  return d;
}

// The P(z)-intertwining map identity for F, paired with the test vectors of rr.
inline VerificationReport verify_pz_jacobi(const RegularRep& rr, const PzMap& F, const Label& v, const Label& w1,
                                           const Label& w2, const Window& win) {
  VerificationReport rep;
  rep.identity = "pz-jacobi";
  rep.params = F.name() + " v=" + fock::show(v, false) + " w1=" + F.M1().show(w1) + " w2=" + F.M2().show(w2);
  rep.window = win.str();
  const Branch& br = F.branch();
  const TwistedModule& X = F.X();
  Rat b1 = F.b1(v), b2 = F.b2(v);
  Rat d = Rat(Heisenberg::weight(v));
  Rat h1 = F.M1().weight(w1), h2 = F.M2().weight(w2);
  Rat lowG = -d - h2 + F.M2().lowest_weight(), lowH = -d - h1 + F.M1().lowest_weight();
  FPtr a = F.image(w1, w2);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  auto G = [&](const Rat& e, const Label& x) {
    Vec y = F.M2().act(v, -e - Rat(1), w2);
    return y.empty() ? Cyc() : F.value(W1, to_cvec(y), x);
  };
  auto H = [&](const Rat& e, const Label& x) {
    Vec y = F.M1().act(v, -e - Rat(1), w1);
    return y.empty() ? Cyc() : F.value(to_cvec(y), W2, x);
  };
  for (auto& x : rr.test_basis())
    for (auto& e0 : window_points(win, -b1))
      for (auto& e1 : window_points(win, -b2)) {
        ++rep.checked;
        Cyc lhs, rhs;
        Rat n = -e0 - Rat(1) - b1;
        if (n.is_integer()) {
          lhs = lhs + rr.Q(*a, v, x, n + b1, e1);
          Rat g = n + b1;
          Cyc t2;
          for (long long i = 0; Rat(i) <= e1 - lowG; ++i) {
            Cyc gg = G(e1 - Rat(i), x);
            if (gg.is_zero()) continue;
            t2 = t2 + gg * br.z_pow(g - Rat(i)).scaled(binom(g, i) * Rat(i % 2 ? -1 : 1));
          }
          lhs = lhs - (br.phase(b1) * t2).scaled(Rat(n.num64() % 2 ? -1 : 1));
        }
        for (long long i = 0; Rat(i) <= e0 - lowH; ++i) {
          Rat m = e1 + b2 + Rat(i);
          if (!m.is_integer()) continue;
          Cyc hh = H(e0 - Rat(i), x);
          if (hh.is_zero()) continue;
          rhs = rhs + hh * br.z_pow(b2 - m - Rat(1)).scaled(binom(m - b2, i) * Rat(i % 2 ? -1 : 1));
        }
        if (!(lhs == rhs)) {
          rep.fail("mismatch at (x0,x1)^" + rats({e0, e1}) + " on " + X.show(x) + ": " + lhs.str() + " vs " +
                   rhs.str());
          return rep;
        }
      }
  return rep;
}

inline CVec act_c(const TwistedModule& M, const Label& v, const Rat& n, const CVec& w) {
  CVec r;
  for (auto& [k, c] : w) axpy(r, c, to_cvec(M.act(v, n, k)));
  return r;
}

// Twisted Jacobi identity of an intertwining operator applied to w1 (x) w2, with
// j1, j2 read off from the twists of M1 and M2.
inline VerificationReport verify_intertwiner_jacobi(const IntertwinerData& Y, const Branch& br, const Label& v,
                                                    const Label& w1, const Label& w2, const Window& win,
                                                    bool drop_phase = false) {
  VerificationReport rep;
  rep.identity = drop_phase ? "intertwiner-jacobi-without-phase" : "intertwiner-jacobi";
  rep.params = Y.name + " v=" + fock::show(v, false) + " w1=" + Y.M1->show(w1) + " w2=" + Y.M2->show(w2);
  rep.window = win.str();
  const TwistedModule &M1 = *Y.M1, &M2 = *Y.M2, &M3 = *Y.M3;
  Rat b1(M1.twist_j(v), M1.T()), b2(M2.twist_j(v), M2.T());
  Rat d(Heisenberg::weight(v)), h1 = M1.weight(w1), h2 = M2.weight(w2);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  ThreeTerm<CVec, Cyc> J;
  J.F1 = [&](const Rat& p, const Rat& q) { return act_c(M3, v, -p - Rat(1), Y.mode_vec(W1, -q - Rat(1), W2)); };
  J.F2 = [&](const Rat& p, const Rat& q) {
    return Y.mode_vec(W1, -q - Rat(1), to_cvec(M2.act(v, -p - Rat(1), w2)));
  };
  J.F3 = [&](const Rat& p, const Rat& q) {
    return Y.mode_vec(to_cvec(M1.act(v, -p - Rat(1), w1)), -q - Rat(1), W2);
  };
  J.imax1 = [&](const Rat&, const Rat&, const Rat& e2) { return (e2 - M3.lowest_weight() + h1 + h2).floor(); };
  J.imax2 = [&](const Rat&, const Rat& e1, const Rat&) { return (e1 - M2.lowest_weight() + d + h2).floor(); };
  J.imax3 = [&](const Rat& e0, const Rat&, const Rat&) { return (e0 - M1.lowest_weight() + d + h1).floor(); };
  J.a1 = b1;
  J.a2 = b1;
  J.a3 = -b2;
  J.c = drop_phase ? Cyc(Rat(1)) : br.phase(b1);
  for (int t = 0; t < M3.T(); ++t)
    for (auto& e0 : window_points(win, -b1))
      for (auto& e1 : window_points(win, -b2))
        for (auto& e2 : window_points(win, M3.lowest_weight() - h1 - h2 + Rat(t, M3.T()))) {
          ++rep.checked;
          CVec r = J.residual(e0, e1, e2);
          if (!r.empty()) {
            rep.fail("nonzero residual at (x0,x1,x2)^" + rats({e0, e1, e2}));
            return rep;
          }
        }
  return rep;
}


inline CVec L_c(const TwistedModule& M, long long n, const CVec& w) {
  CVec r;
  for (auto& [k, c] : w) axpy(r, c, to_cvec(M.L(n, unit(k))));
  return r;
}

inline CVec scaled_c(const CVec& v, const Cyc& c) {
  CVec r;
  axpy(r, c, v);
  return r;
}

// Mode indices h with (w1)_h w2 of weight at most hmax3, for an argument of weight h1.
inline std::vector<Rat> mode_indices(const IntertwinerData& Y, const Rat& h1, const Label& w2, const Rat& hmax3) {
  std::vector<Rat> out;
  for (auto& h3 : Y.M3->weights_upto(hmax3)) out.push_back(h1 + Y.M2->weight(w2) - Rat(1) - h3);
  return out;
}

inline VerificationReport intertwiner_report(const std::string& id, const IntertwinerData& Y, const Label& w1,
                                             const Label& w2, const Rat& hmax3) {
  VerificationReport rep;
  rep.identity = id;
  rep.params = Y.name + " w1=" + Y.M1->show(w1) + " w2=" + Y.M2->show(w2);
  rep.window = "wt<=" + hmax3.str();
  return rep;
}

// Y(L(-1)w1, x) = d/dx Y(w1, x), i.e. (L(-1)w1)_h w2 = -h (w1)_{h-1} w2.
inline VerificationReport verify_intertwiner_derivative(const IntertwinerData& Y, const Label& w1, const Label& w2,
                                                        const Rat& hmax3) {
  auto rep = intertwiner_report("intertwiner-derivative", Y, w1, w2, hmax3);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  CVec d = to_cvec(Y.M1->L(-1, unit(w1)));
  for (auto& h : mode_indices(Y, Y.M1->weight(w1) + Rat(1), w2, hmax3)) {
    ++rep.checked;
    CVec lhs = Y.mode_vec(d, h, W2), rhs = scaled_c(Y.mode_vec(W1, h - Rat(1), W2), Cyc(-h));
    if (!(lhs == rhs)) {
      rep.fail("mismatch at mode " + h.str());
      return rep;
    }
  }
  return rep;
}

// [L(0), Y(w1,x)] = x Y(L(-1)w1, x) + Y(L(0)w1, x) and the weight rule for (w1)_h w2.
inline VerificationReport verify_intertwiner_L0(const IntertwinerData& Y, const Label& w1, const Label& w2,
                                                const Rat& hmax3) {
  auto rep = intertwiner_report("intertwiner-L(0)-bracket", Y, w1, w2, hmax3);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  CVec dw = to_cvec(Y.M1->L(-1, unit(w1))), zw = to_cvec(Y.M1->L(0, unit(w1)));
  CVec zw2 = to_cvec(Y.M2->L(0, unit(w2)));
  Rat h1 = Y.M1->weight(w1), h2 = Y.M2->weight(w2);
  for (auto& h : mode_indices(Y, h1, w2, hmax3)) {
    ++rep.checked;
    CVec m = Y.mode_vec(W1, h, W2);
    CVec lhs = L_c(*Y.M3, 0, m);
    axpy(lhs, Cyc(Rat(-1)), Y.mode_vec(W1, h, zw2));
    CVec rhs = Y.mode_vec(dw, h + Rat(1), W2);
    axpy(rhs, Cyc(Rat(1)), Y.mode_vec(zw, h, W2));
    if (!(lhs == rhs)) {
      rep.fail("bracket mismatch at mode " + h.str());
      return rep;
    }
    if (!(L_c(*Y.M3, 0, m) == scaled_c(m, Cyc(h1 + h2 - h - Rat(1))))) {
      rep.fail("weight rule fails at mode " + h.str());
      return rep;
    }
  }
  return rep;
}

// x^{L(0)} Y(w1,x0) x^{-L(0)} w2 = Y(x^{L(0)} w1, x x0) w2, compared as two-variable coefficients.
inline VerificationReport verify_conjugation(const IntertwinerData& Y, const Label& w1, const Label& w2,
                                             const Rat& hmax3) {
  auto rep = intertwiner_report("intertwiner-conjugation", Y, w1, w2, hmax3);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  Rat h1 = Y.M1->weight(w1), h2 = Y.M2->weight(w2);
  using Key = std::tuple<std::string, std::string, Label>;
  std::map<Key, Cyc> lhs, rhs;
  for (auto& h : mode_indices(Y, h1, w2, hmax3)) {
    CVec m = Y.mode_vec(W1, h, W2);
    for (auto& [u, c] : m) {
      CVec lu = L_c(*Y.M3, 0, CVec{{u, Cyc(Rat(1))}});
      Rat mu;
      if (!lu.empty()) {
        if (lu.size() != 1 || lu.begin()->first != u || !lu.begin()->second.is_rational()) {
          rep.fail("L(0) not semisimple on " + Y.M3->show(u));
          return rep;
        }
        mu = lu.begin()->second.rational();
      }
      lhs[{(mu - h2).str(), (-h - Rat(1)).str(), u}] = c;
      rhs[{(h1 - h - Rat(1)).str(), (-h - Rat(1)).str(), u}] = c;
      ++rep.checked;
    }
  }
  if (lhs != rhs) rep.fail("two-variable coefficients differ");
  return rep;
}

// Every nonzero mode index of (w1)_h w2 lies in the given coset.
inline VerificationReport verify_mode_coset(const IntertwinerData& Y, const Label& w1, const Label& w2,
                                            const Rat& hmax3, const ExponentCoset& coset) {
  auto rep = intertwiner_report("intertwiner-mode-coset", Y, w1, w2, hmax3);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  for (auto& h : mode_indices(Y, Y.M1->weight(w1), w2, hmax3)) {
    ++rep.checked;
    if (!Y.mode_vec(W1, h, W2).empty() && !coset.contains(h)) {
      rep.fail("nonzero mode " + h.str() + " outside the coset");
      return rep;
    }
  }
  return rep;
}

// Reports whether the twists of the type satisfy g3 = g1 g2 on the odd generator.
inline VerificationReport twist_compatibility(const IntertwinerData& Y) {
  VerificationReport rep;
  rep.identity = "twist-compatibility";
  rep.params = Y.name;
  Label a = Heisenberg::alpha();
  Rat t = Rat(Y.M1->twist_j(a), Y.M1->T()) + Rat(Y.M2->twist_j(a), Y.M2->T()) - Rat(Y.M3->twist_j(a), Y.M3->T());
  ++rep.checked;
  if (!t.is_integer()) rep.fail("g3 differs from g1 g2");
  return rep;
}

// Comm/assoc form of the P(z)-Jacobi identity with the symbolic pole orders k and l:
//   (x-z)^{k+j1/T} Y*(v,x)F(w1 (x) w2) = e^{(k+j1/T)pi i}(z-x)^{k+j1/T} F(w1 (x) Y(v,x)w2),
//   (x+z)^{l+j2/T} Y*(v,x+z)F(w1 (x) w2) = (z+x)^{l+j2/T} F(Y(v,x)w1 (x) w2).
inline VerificationReport verify_pz_comm_assoc(const RegularRep& rr, const PzMap& F, const Label& v, const Label& w1,
                                               const Label& w2, const Window& win) {
  VerificationReport rep;
  rep.identity = "pz-comm-assoc";
  rep.params = F.name() + " v=" + fock::show(v, false) + " w1=" + F.M1().show(w1) + " w2=" + F.M2().show(w2);
  rep.window = win.str();
  const Branch& br = F.branch();
  Rat b1 = F.b1(v), b2 = F.b2(v);
  Rat d = Rat(Heisenberg::weight(v));
  Rat lowG = -d - F.M2().weight(w2) + F.M2().lowest_weight();
  Rat lowH = -d - F.M1().weight(w1) + F.M1().lowest_weight();
  FPtr a = F.image(w1, w2);
  PoleBounds pb = *a->symbolic(v);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  Rat beta = Rat(pb.k) + b1, sh = Rat(pb.r) + b2;
  for (auto& x : rr.test_basis()) {
    for (auto& m : window_points(win, -b2)) {
      ++rep.checked;
      Cyc lhs = rr.Q(*a, v, x, beta, m), rhs;
      for (long long i = 0; Rat(i) <= m - lowG; ++i) {
        Vec y = F.M2().act(v, -(m - Rat(i)) - Rat(1), w2);
        if (y.empty()) continue;
        rhs = rhs + F.value(W1, to_cvec(y), x) * br.z_pow(beta - Rat(i)).scaled(binom(beta, i) * Rat(i % 2 ? -1 : 1));
      }
      rhs = rhs * br.phase(beta);
      if (!(lhs == rhs)) {
        rep.fail("commutativity fails at x^" + m.str() + " on " + F.X().show(x));
        return rep;
      }
    }
    for (auto& m : window_points(win, -b1)) {
      ++rep.checked;
      Cyc lhs = rr.U(*a, v, x, pb.r, m), rhs;
      for (long long i = 0; Rat(i) <= m - lowH; ++i) {
        Vec y = F.M1().act(v, -(m - Rat(i)) - Rat(1), w1);
        if (y.empty()) continue;
        rhs = rhs + F.value(to_cvec(y), W2, x) * br.z_pow(sh - Rat(i)).scaled(binom(sh, i));
      }
      if (!(lhs == rhs)) {
        rep.fail("associativity fails at x^" + m.str() + " on " + F.X().show(x));
        return rep;
      }
    }
  }
  return rep;
}

// Y^R(v,x)F(w1 (x) w2) = F(w1 (x) Y(v,x)w2) and Y^L(v,x)F(w1 (x) w2) = F(Y(v,x)w1 (x) w2).
inline VerificationReport verify_homomorphism(const RegularRep& rr, const PzMap& F, const Label& v, const Label& w1,
                                              const Label& w2, const Window& win) {
  VerificationReport rep;
  rep.identity = "pz-homomorphism";
  rep.params = F.name() + " v=" + fock::show(v, false) + " w1=" + F.M1().show(w1) + " w2=" + F.M2().show(w2);
  rep.window = win.str();
  FPtr a = F.image(w1, w2);
  PoleBounds pb = rr.witness(*a, v);
  CVec W1{{w1, Cyc(Rat(1))}}, W2{{w2, Cyc(Rat(1))}};
  for (auto& x : rr.test_basis()) {
    for (auto& m : window_points(win, -F.b2(v))) {
      ++rep.checked;
      Vec y = F.M2().act(v, -m - Rat(1), w2);
      Cyc g = y.empty() ? Cyc() : F.value(W1, to_cvec(y), x);
      if (!(rr.R(*a, v, x, pb, m) == g)) {
        rep.fail("Y^R differs from the right factor at x^" + m.str() + " on " + F.X().show(x));
        return rep;
      }
    }
    for (auto& m : window_points(win, -F.b1(v))) {
      ++rep.checked;
      Vec y = F.M1().act(v, -m - Rat(1), w1);
      Cyc h = y.empty() ? Cyc() : F.value(to_cvec(y), W2, x);
      if (!(rr.L(*a, v, x, pb, m) == h)) {
        rep.fail("Y^L differs from the left factor at x^" + m.str() + " on " + F.X().show(x));
        return rep;
      }
    }
  }
  return rep;
}

// f_z(hom_to_intertwiner(psi)) = psi on the given pairs, and the recovered modes agree with Y when supplied.
inline VerificationReport verify_round_trip(const PzPtr& psi, std::shared_ptr<const Heisenberg> V,
                                            const std::vector<Label>& w1s, const std::vector<Label>& w2s,
                                            const Rat& hmaxX, const IntertwinerPtr& Y = nullptr) {
  VerificationReport rep;
  rep.identity = "round-trip";
  rep.params = psi->name();
  rep.window = "wt<=" + hmaxX.str();
  auto rec = hom_to_intertwiner(psi, V);
  auto again = f_z(rec, psi->X_ptr(), psi->branch());
  auto xs = psi->X().basis_upto(hmaxX);
  for (auto& w1 : w1s)
    for (auto& w2 : w2s) {
      for (auto& x : xs) {
        ++rep.checked;
        if (!(again->value(w1, w2, x) == psi->value(w1, w2, x))) {
          rep.fail("values differ on " + psi->M1().show(w1) + " | " + psi->M2().show(w2) + " at " + psi->X().show(x));
          return rep;
        }
      }
      if (!Y) continue;
      for (auto& h : mode_indices(*Y, Y->M1->weight(w1), w2, hmaxX)) {
        ++rep.checked;
        if (!(rec->mode(w1, h, w2) == Y->mode(w1, h, w2))) {
          rep.fail("recovered mode " + h.str() + " differs on " + psi->M1().show(w1) + " | " + psi->M2().show(w2));
          return rep;
        }
      }
    }
  return rep;
}

// ---- q-graded trace ----

// tr over W_(h) of the zero mode v_{wt v - 1}.
inline Rat trace_coefficient(const TwistedModule& W, const Vec& v, const Rat& h) {
  Rat t;
  for (auto& [u, c] : v) {
    Rat n = Rat(Heisenberg::weight(u) - 1);
    for (auto& w : W.basis(h)) {
      Vec y = W.act(u, n, w);
      auto it = y.find(w);
      if (it != y.end()) t += c * it->second;
    }
  }
  return t;
}

inline FracSeries graded_trace(const TwistedModule& W, const Vec& v, const Rat& depth) {
  if (depth.sign() < 0) throw regular_error("depth beyond available graded data");
  FracSeries s;
  Rat lam = W.lowest_weight();
  s.vars.push_back(SeriesVar{"q", lam, lam + depth, lam, std::nullopt, ExponentCoset{lam, W.step()}.normalized()});
  for (auto& h : W.weights_upto(lam + depth)) s.add({h}, Cyc(trace_coefficient(W, v, h)));
  return s;
}

// Graded basis pairs (e^{pi i h} e^{-L(1)} w_a, e^{L(1)} theta w^a) of W_(h) for the trace identity;
// theta is the parity operator relating the pairing-defined operator to the standard one.
inline std::vector<std::pair<CVec, CVec>> trace_pairs(const PzMap& F, const Rat& h, bool omit_first = false) {
  std::vector<std::pair<CVec, CVec>> out;
  const TwistedModule& W = F.M1();
  const TwistedModule& Wd = F.M2();
  Rat sg = (((h - W.lowest_weight()) * Rat(2)).num64() % 2) ? Rat(-1) : Rat(1);
  bool skip = omit_first;
  for (auto& w : W.basis(h)) {
    if (skip) {
      skip = false;
      continue;
    }
    CVec a = scaled_c(to_cvec(exp_L1(W, unit(w), Rat(-1))), F.branch().phase(h));
    CVec b = to_cvec(exp_L1(Wd, Vec{{w, sg}}, Rat(1)));
    out.emplace_back(a, b);
  }
  return out;
}

// q^h coefficient of the trace function as a functional on V, with pole orders from the trace pairs.
inline FPtr trace_functional(const PzPtr& F, const Rat& h) {
  auto pairs = trace_pairs(*F, h);
  auto X = F->X_ptr();
  auto W = F->M1_ptr();
  auto f = std::make_shared<Functional>(X, "trace", "chi[q^" + h.str() + "]", [W, h](const Label& v) {
    return Cyc(trace_coefficient(*W, unit(v), h));
  });
  f->floor = X->lowest_weight();
  auto m1 = F->M1_ptr(), m2 = F->M2_ptr();
  f->poles = [m1, m2, pairs](const Label& v) -> std::optional<PoleBounds> {
    PoleBounds pb;
    for (auto& [a, b] : pairs) {
      for (auto& [k, c] : a) pb.k = std::max(pb.k, pole_order(*m1, v, k));
      for (auto& [k, c] : b) pb.r = std::max(pb.r, pole_order(*m2, v, k));
    }
    return pb;
  };
  return f;
}

struct TraceOptions {
  Rat depth = 2;               // through q^{lambda + depth}
  long long v_weight = 2;      // algebra vectors tested in the identity and the actions
  long long member_weight = 1; // algebra vectors used for membership and the actions
  Window win{-3, 3};
  bool omit_term = false;      // negative control: drop one basis term from the identity
};

// (i) membership of each coefficient, with the searched witness dominated by the symbolic one;
// (ii) chi coefficient = sum of standard P(-1)-map matrix coefficients;
// (iii) the actions on each coefficient agree with the P(-1)-map on the acted tensor element.
inline VerificationReport trace_membership(const RegularRep& rr, const PzPtr& F, const TraceOptions& opt) {
  VerificationReport rep;
  rep.identity = opt.omit_term ? "trace-membership-omitted-term" : "trace-membership";
  rep.params = rr.describe() + " W=" + F->M1().name() + " depth=" + opt.depth.str();
  rep.window = opt.win.str();
  const TwistedModule& W = F->M1();
  const Heisenberg& V = rr.V();
  for (auto& h : W.weights_upto(W.lowest_weight() + opt.depth)) {
    FPtr chi = trace_functional(F, h);
    auto pairs = trace_pairs(*F, h, opt.omit_term);
    for (auto& v : V.basis_upto(opt.v_weight)) {
      ++rep.checked;
      Cyc g;
      for (auto& [a, b] : pairs) g = g + F->value(a, b, v);
      if (!((*chi)(v) == g)) {
        rep.fail("matrix-coefficient identity fails at q^" + h.str() + " on " + fock::show(v, false) + ": " +
                 (*chi)(v).str() + " vs " + g.str());
        return rep;
      }
    }
    for (auto& v : V.basis_upto(opt.member_weight)) {
      ++rep.checked;
      auto m = rr.check_membership(*chi, v);
      if (!m.found || !m.symbolic || m.witness.k > m.symbolic->k || m.witness.r > m.symbolic->r) {
        rep.fail("membership of q^" + h.str() + " coefficient fails for v=" + fock::show(v, false) +
                 (m.found ? "" : " (" + m.message + ")"));
        return rep;
      }
      PoleBounds pb = *m.symbolic;
      for (auto& x : rr.test_basis()) {
        for (auto& e : window_points(opt.win, -F->b2(v))) {
          ++rep.checked;
          Cyc g;
          for (auto& [a, b] : pairs) {
            CVec y;
            for (auto& [k, c] : b) axpy(y, c, to_cvec(F->M2().act(v, -e - Rat(1), k)));
            if (!y.empty()) g = g + F->value(a, y, x);
          }
          if (!(rr.R(*chi, v, x, pb, e) == g)) {
            rep.fail("Y^R on q^" + h.str() + " coefficient differs from the P(-1)-map at x^" + e.str());
            return rep;
          }
        }
        for (auto& e : window_points(opt.win, -F->b1(v))) {
          ++rep.checked;
          Cyc g;
          for (auto& [a, b] : pairs) {
            CVec y;
            for (auto& [k, c] : a) axpy(y, c, to_cvec(F->M1().act(v, -e - Rat(1), k)));
            if (!y.empty()) g = g + F->value(y, b, x);
          }
          if (!(rr.L(*chi, v, x, pb, e) == g)) {
            rep.fail("Y^L on q^" + h.str() + " coefficient differs from the P(-1)-map at x^" + e.str());
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace twreg
