#include <gtest/gtest.h>

#include "twreg/intertwining.hpp"
#include "twreg/tensor.hpp"

using namespace twreg;

namespace {

std::shared_ptr<Heisenberg> Vp() {
  static auto v = std::make_shared<Heisenberg>();
  return v;
}
std::shared_ptr<FockModule> Wtw() {
  static auto w = std::make_shared<FockModule>(true);
  return w;
}

Label H(std::initializer_list<int> doubled) {
  Label l;
  for (int p : doubled) l.push_back(char(p));
  return l;
}

const Window kWin{-3, 3};

// Finite duals on the twisted Fock space, acted on through D_{1,sigma}(W).
struct DualCase {
  Branch br;
  std::unique_ptr<RegularRep> rr;
  std::vector<FPtr> duals;
  explicit DualCase(const Rat& z) : br(Branch::make(z, 2, 8)) {
    rr = std::make_unique<RegularRep>(Vp(), Wtw(), 0, 1, br);
    auto b = Wtw()->basis_upto(Wtw()->lowest_weight() + Rat(3, 2));
    for (size_t i = 0; i < 5; ++i) duals.push_back(finite_dual(Wtw(), b[i]));
  }
};

// F-images of the standard P(z)-map W x W' -> V*, in D_{sigma,sigma}(V).
struct ImageCase {
  Branch br;
  PzPtr F;
  std::unique_ptr<RegularRep> rr;
  std::vector<std::pair<Label, Label>> args;
  explicit ImageCase(const Rat& z) : br(Branch::make(z, 2, 8)) {
    auto Y = standard_intertwiner_VWW(Wtw(), Vp(), br);
    F = f_z(Y, Vp()->adjoint_ptr(), br);
    rr = std::make_unique<RegularRep>(Vp(), Vp()->adjoint_ptr(), 1, 1, br);
    for (auto& w1 : Wtw()->basis_upto(Wtw()->lowest_weight() + Rat(1)))
      for (auto& w2 : F->M2().basis_upto(Wtw()->lowest_weight() + Rat(1))) args.emplace_back(w1, w2);
  }
};

void expect_core(const RegularRep& rr, const FPtr& a, const Label& v) {
  auto m = rr.check_membership(*a, v, 4);
  ASSERT_TRUE(m.found) << a->name() << " v=" << fock::show(v, false) << " " << m.message;
  EXPECT_LE(m.witness.k, 4);
  PoleBounds pb = rr.witness(*a, v);
  auto r1 = rr.yR_action(*a, v, kWin, pb);
  auto r2 = rr.yL_action(*a, v, kWin, pb);
  auto r3 = rr.verify_bridge(*a, v, kWin, pb);
  EXPECT_TRUE(r1.pass) << r1.params << " " << r1.failure;
  EXPECT_TRUE(r2.pass) << r2.params << " " << r2.failure;
  EXPECT_TRUE(r3.pass) << r3.params << " " << r3.failure;
  EXPECT_GT(r1.checked, 0);
  EXPECT_GT(r3.checked, 0);
}

}  // namespace

// <Y*(a(-1)1,x) b*, w> = -<b*, a(n) w> x^{n-1} for b = a(-1/2)vac, so on the vacuum Y* = -x^{-3/2}.
// Y^R agrees with it and Y^L(v,x)b* = -(z+x)^{-3/2} on the vacuum.
TEST(RegularFiniteDual, HandComputedActionsAtMinusOne) {
  DualCase c(Rat(-1));
  FPtr a = finite_dual(Wtw(), H({1}));
  Label al = Heisenberg::alpha(), vac;
  PoleBounds pb = c.rr->witness(*a, al);
  EXPECT_EQ(c.rr->P(*a, al, vac, Rat(-3, 2)), Cyc(Rat(-1)));
  EXPECT_EQ(c.rr->R(*a, al, vac, pb, Rat(-3, 2)), Cyc(Rat(-1)));
  EXPECT_TRUE(c.rr->R(*a, al, vac, pb, Rat(-1, 2)).is_zero());
  // e^{-3 pi i/2} = i and e^{-5 pi i/2} = -i
  Cyc i = c.br.phase(Rat(1, 2));
  EXPECT_EQ(i * i, Cyc(Rat(-1)));
  EXPECT_EQ(c.rr->L(*a, al, vac, pb, Rat(0)), -i);
  EXPECT_EQ(c.rr->L(*a, al, vac, pb, Rat(1)), i.scaled(Rat(-3, 2)));
  EXPECT_EQ(c.rr->L(*a, al, vac, pb, Rat(2)), i.scaled(Rat(-15, 8)));
}

TEST(RegularFiniteDual, HandComputedActionsAtTwo) {
  DualCase c(Rat(2));
  FPtr a = finite_dual(Wtw(), H({1}));
  Label al = Heisenberg::alpha(), vac;
  PoleBounds pb = c.rr->witness(*a, al);
  Cyc l0 = c.rr->L(*a, al, vac, pb, Rat(0)), l1 = c.rr->L(*a, al, vac, pb, Rat(1));
  EXPECT_EQ(l0 * l0, Cyc(Rat(1, 8)));
  EXPECT_EQ(l1, l0.scaled(Rat(-3, 4)));
}

class RegularCoreAtZ : public ::testing::TestWithParam<int> {};

TEST_P(RegularCoreAtZ, FiniteDuals) {
  DualCase c{Rat(GetParam())};
  for (auto& a : c.duals)
    for (auto& v : Vp()->basis_upto(2)) expect_core(*c.rr, a, v);
}

TEST_P(RegularCoreAtZ, FImages) {
  ImageCase c{Rat(GetParam())};
  for (auto& [w1, w2] : c.args) {
    FPtr a = c.F->image(w1, w2);
    for (auto& v : Vp()->basis_upto(2)) expect_core(*c.rr, a, v);
  }
}

TEST_P(RegularCoreAtZ, LRCommutationAndActionJacobi) {
  ImageCase c{Rat(GetParam())};
  Label al = Heisenberg::alpha();
  std::vector<FPtr> as{c.F->image(c.args[0].first, c.args[0].second), c.F->image(c.args[5].first, c.args[5].second)};
  for (auto& a : as)
    for (auto& u : {Label(), al})
      for (auto& v : {Label(), al}) {
        auto r = c.rr->verify_LR_commutation(a, u, v, kWin);
        EXPECT_TRUE(r.pass) << r.params << " " << r.failure;
      }
  auto t = verify_regular_tensor(*c.rr, as[1], {Label(), al}, Window{-2, 2});
  EXPECT_TRUE(t.pass) << t.failure;
  DualCase d{Rat(GetParam())};
  for (auto& a : d.duals) {
    auto r = d.rr->verify_LR_commutation(a, al, al, kWin);
    EXPECT_TRUE(r.pass) << r.params << " " << r.failure;
  }
}

INSTANTIATE_TEST_SUITE_P(Z, RegularCoreAtZ, ::testing::Values(-1, 2));

TEST(RegularBridge, PhaseIsLoadBearing) {
  ImageCase c(Rat(-1));
  Label al = Heisenberg::alpha();
  for (auto& [w1, w2] : c.args) {
    FPtr a = c.F->image(w1, w2);
    PoleBounds pb = c.rr->witness(*a, al);
    EXPECT_TRUE(c.rr->verify_bridge(*a, al, kWin, pb).pass);
  }
  FPtr a = c.F->image(c.args[0].first, c.args[0].second);
  EXPECT_FALSE(c.rr->verify_bridge(*a, al, kWin, c.rr->witness(*a, al), true).pass);
}

TEST(RegularBridge, VacuumIsTrivial) {
  ImageCase c(Rat(-1));
  FPtr a = c.F->image(c.args[1].first, c.args[1].second);
  auto m = c.rr->check_membership(*a, Label());
  ASSERT_TRUE(m.found);
  EXPECT_EQ(m.witness, (PoleBounds{0, 0}));
  for (auto& w : c.rr->test_basis()) {
    EXPECT_EQ(c.rr->R(*a, Label(), w, m.witness, Rat(0)), (*a)(w));
    EXPECT_EQ(c.rr->L(*a, Label(), w, m.witness, Rat(0)), (*a)(w));
    EXPECT_TRUE(c.rr->R(*a, Label(), w, m.witness, Rat(-1)).is_zero());
  }
}

// Whenever the bridge identity holds for u and v, the two actions commute.
TEST(RegularBridge, BridgeImpliesCommutation) {
  ImageCase c(Rat(-1));
  Label al = Heisenberg::alpha();
  for (size_t i = 0; i < c.args.size(); i += 3) {
    FPtr a = c.F->image(c.args[i].first, c.args[i].second);
    bool bridge = c.rr->verify_bridge(*a, al, kWin, c.rr->witness(*a, al)).pass;
    if (bridge) EXPECT_TRUE(c.rr->verify_LR_commutation(a, al, al, kWin).pass) << a->name();
  }
}

// The all-ones functional pairs Y*(a(-1)1,x) with every a(n)vac: unbounded poles at 0.
TEST(RegularMembership, RefutesFullDualFunctional) {
  Branch br = Branch::make(Rat(-1), 2, 8);
  RegularRep rr(Vp(), Wtw(), 0, 1, br);
  auto a = std::make_shared<Functional>(Wtw(), "synthetic", "all-ones", [](const Label&) { return Cyc(Rat(1)); });
  auto m = rr.check_membership(*a, Heisenberg::alpha(), 4);
  EXPECT_FALSE(m.found);
  EXPECT_EQ(m.message, "no-witness-up-to(4)");
  EXPECT_THROW(rr.witness(*a, Heisenberg::alpha()), regular_error);
  auto v = rr.check_membership(*a, Label(), 4);
  EXPECT_TRUE(v.found);
}

TEST(RegularMembership, RejectsMismatchedTwist) {
  Branch br = Branch::make(Rat(-1), 2, 8);
  EXPECT_THROW(RegularRep(Vp(), Wtw(), 0, 0, br), regular_error);
  EXPECT_THROW(RegularRep(Vp(), Vp()->adjoint_ptr(), 0, 1, br), regular_error);
}

TEST(RegularWstar, FiniteDualsAndImagesStayInPattern) {
  DualCase c(Rat(-1));
  for (auto& a : c.duals)
    for (auto& v : Vp()->basis_upto(1)) {
      auto r = c.rr->wstar_closure_check(a, v, kWin);
      EXPECT_TRUE(r.pass) << r.failure;
    }
  ImageCase d(Rat(-1));
  auto r = d.rr->wstar_closure_check(d.F->image(d.args[2].first, d.args[2].second), Heisenberg::alpha(), kWin);
  EXPECT_TRUE(r.pass) << r.failure;
}

TEST(RegularWstar, DetectsViolatedFloor) {
  DualCase c(Rat(-1));
  auto base = c.duals[0];
  auto a = std::make_shared<Functional>(Wtw(), "synthetic", "misdeclared", [base](const Label& w) { return (*base)(w); });
  a->floor = Wtw()->lowest_weight() + Rat(1);
  auto r = c.rr->wstar_closure_check(a, Heisenberg::alpha(), kWin);
  EXPECT_FALSE(r.pass);
  auto b = std::make_shared<Functional>(Wtw(), "synthetic", "undeclared", [base](const Label& w) { return (*base)(w); });
  EXPECT_FALSE(c.rr->wstar_closure_check(b, Heisenberg::alpha(), kWin).pass);
}

// T = 1: W = V, both automorphisms trivial, every exponent integral and every branch phase 1.
TEST(RegularUntwisted, PipelineDegenerates) {
  Branch br = Branch::make(Rat(-1), 1, 1);
  auto V0 = Vp()->adjoint_ptr();
  RegularRep rr(Vp(), V0, 0, 0, br);
  EXPECT_EQ(rr.T(), 1);
  auto Y = standard_intertwiner_VWW(V0, Vp(), br);
  auto F = f_z(Y, V0, br);
  for (auto& w1 : V0->basis_upto(Rat(1)))
    for (auto& w2 : F->M2().basis_upto(Rat(1))) {
      FPtr a = F->image(w1, w2);
      for (auto& v : Vp()->basis_upto(2)) {
        expect_core(rr, a, v);
        EXPECT_EQ(rr.b1(v), Rat(0));
        EXPECT_EQ(rr.b2(v), Rat(0));
        for (auto& x : rr.test_basis())
          for (auto& m : window_points(kWin, Rat(0))) {
            EXPECT_TRUE(rr.R(*a, v, x, rr.witness(*a, v), m).is_rational());
            EXPECT_TRUE(rr.L(*a, v, x, rr.witness(*a, v), m).is_rational());
          }
      }
      auto h = verify_homomorphism(rr, *F, Heisenberg::alpha(), w1, w2, kWin);
      EXPECT_TRUE(h.pass) << h.failure;
      auto l = rr.verify_LR_commutation(a, Heisenberg::alpha(), Heisenberg::alpha(), kWin);
      EXPECT_TRUE(l.pass) << l.failure;
    }
  for (auto& e : {Rat(0), Rat(1), Rat(-2), Rat(3)}) EXPECT_EQ(br.phase(e * Rat(2)), Cyc(Rat(1)));
}

TEST(RegularOpposite, VacuumActsTriviallyAndSupportIsBoundedAbove) {
  Branch br = Branch::make(Rat(-1), 2, 8);
  RegularRep rr(Vp(), Wtw(), 0, 1, br);
  for (auto& w : rr.test_basis()) {
    EXPECT_TRUE(vec_equal(rr.yo(Label(), Rat(0), w), Vec{{w, Rat(1)}}));
    EXPECT_TRUE(rr.yo(Label(), Rat(-1), w).empty());
  }
  // Y^o(a(-1)1, x)vac = -sum a(n) vac x^{n-1}: top exponent -3/2.
  Vec top = rr.yo(Heisenberg::alpha(), Rat(-3, 2), "");
  EXPECT_TRUE(vec_equal(top, Vec{{H({1}), Rat(-1)}}));
  EXPECT_TRUE(rr.yo(Heisenberg::alpha(), Rat(-1, 2), "").empty());
  EXPECT_EQ(rr.p_top(Heisenberg::alpha(), ""), Rat(-1));
}
