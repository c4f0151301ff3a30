#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twreg/jacobi.hpp"

using namespace twreg;

namespace {

std::shared_ptr<Heisenberg> Vp() {
  static auto v = std::make_shared<Heisenberg>();
  return v;
}
std::shared_ptr<FockModule> Wp() {
  static auto w = std::make_shared<FockModule>(true);
  return w;
}

Label H(std::initializer_list<int> doubled) {
  Label l;
  for (int p : doubled) l.push_back(char(p));
  return l;
}

}  // namespace

TEST(TwistedFock, VacuumWeightIsComputed) {
  EXPECT_EQ(Wp()->lowest_weight(), Rat(1, 16));
  auto c = oracle::twist_coefficients(4);
  EXPECT_EQ(c[1][1], Rat(1, 16));
  Vec vac{{"", Rat(1)}};
  EXPECT_TRUE(vec_equal(Wp()->L(0, vac), scaled(vac, Rat(1, 16))));
}

TEST(TwistedFock, OscillatorCommutator) {
  auto a = Heisenberg::alpha();
  Vec vac{{"", Rat(1)}};
  EXPECT_TRUE(Wp()->act(a, Rat(1, 2), "").empty());
  Vec lhs = Wp()->act_on(a, Rat(1, 2), Wp()->act_on(a, Rat(-1, 2), vac));
  axpy(lhs, Rat(-1), Wp()->act_on(a, Rat(-1, 2), Wp()->act_on(a, Rat(1, 2), vac)));
  EXPECT_TRUE(vec_equal(lhs, scaled(vac, Rat(1, 2))));
}

TEST(TwistedFock, ModesAgreeWithExpDeltaOracle) {
  auto U = Vp()->basis_upto(4);
  auto B = Wp()->basis_upto(Rat(1, 16) + Rat(2));
  for (auto& u : U)
    for (auto& w : B)
      for (Rat n = Rat(-7, 2); n <= Rat(5); n += Rat(1, 2)) {
        if (!Wp()->in_coset(u, n)) continue;
        EXPECT_TRUE(vec_equal(Wp()->act(u, n, w), oracle::twisted_action(u, n, w)))
            << fock::show(u, false) << " _" << n << " " << Wp()->show(w);
      }
}

TEST(TwistedFock, CosetRuleAndGrading) {
  auto U = Vp()->basis_upto(3);
  auto B = Wp()->basis_upto(Rat(1, 16) + Rat(2));
  for (auto& u : U)
    for (auto& w : B)
      for (Rat n = Rat(-4); n <= Rat(4); n += Rat(1, 2)) {
        Vec r = Wp()->act(u, n, w);
        if (!((n - Rat(Heisenberg::sigma_j(u), 2)).is_integer())) EXPECT_TRUE(r.empty());
        for (auto& [k, c] : r)
          EXPECT_EQ(Wp()->weight(k), Rat(Heisenberg::weight(u)) + Wp()->weight(w) - n - Rat(1));
      }
}

TEST(TwistedFock, DerivativeProperty) {
  auto U = Vp()->basis_upto(3);
  auto B = Wp()->basis_upto(Rat(1, 16) + Rat(3, 2));
  for (auto& u : U) {
    Vec Du = Vp()->L(-1, Vec{{u, Rat(1)}});
    for (auto& w : B)
      for (Rat n = Rat(-4); n <= Rat(4); n += Rat(1, 2))
        EXPECT_TRUE(vec_equal(Wp()->act_vec(Du, n, w), scaled(Wp()->act(u, n - Rat(1), w), -n)));
  }
}

TEST(TwistedFock, JacobiSamples) {
  auto a = Heisenberg::alpha();
  auto r = verify_twisted_jacobi(*Vp(), *Wp(), a, a, "", Window{-4, 4});
  EXPECT_TRUE(r.pass) << r.failure;
  EXPECT_TRUE(verify_twisted_jacobi(*Vp(), *Wp(), "", "", "", Window{-4, 4}).pass);
  EXPECT_FALSE(verify_twisted_jacobi(*Vp(), *Wp(), a, a, "", Window{-4, 4}, {true, false}).pass);
  EXPECT_FALSE(verify_twisted_jacobi(*Vp(), *Wp(), a, a, "", Window{-4, 4}, {false, true}).pass);
  auto w3 = H({3, 1});
  auto u = H({4, 2});
  EXPECT_TRUE(verify_twisted_jacobi(*Vp(), *Wp(), u, a, w3, Window{-3, 3}).pass);
}

TEST(Contragredient, PairingAndJacobi) {
  auto Wd = std::make_shared<Contragredient>(Wp(), Vp());
  auto a = Heisenberg::alpha();
  auto B = Wd->basis_upto(Rat(1, 16) + Rat(2));
  for (auto& w : B) {
    EXPECT_TRUE(vec_equal(Wd->act("", Rat(-1), w), Vec{{w, Rat(1)}}));
    auto r = verify_twisted_jacobi(*Vp(), *Wd, a, H({2, 2}), w, Window{-3, 3});
    EXPECT_TRUE(r.pass) << r.failure;
  }
  EXPECT_FALSE(verify_twisted_jacobi(*Vp(), *Wd, a, a, "", Window{-3, 3}, {true, false}).pass);
}

TEST(Contragredient, DoubleDualIsOriginal) {
  auto Wd = std::make_shared<Contragredient>(Wp(), Vp());
  Contragredient Wdd(Wd, Vp());
  auto B = Wp()->basis_upto(Rat(1, 16) + Rat(3));
  for (auto& u : Vp()->basis_upto(3))
    for (auto& w : B)
      for (Rat n = Rat(-3); n <= Rat(3); n += Rat(1, 2))
        EXPECT_TRUE(vec_equal(Wdd.act(u, n, w), Wp()->act(u, n, w)));
}

TEST(Contragredient, UntwistedCase) {
  auto Vd = std::make_shared<Contragredient>(Vp()->adjoint_ptr(), Vp());
  EXPECT_EQ(Vd->T(), 1);
  auto r = verify_twisted_jacobi(*Vp(), *Vd, Heisenberg::alpha(), Heisenberg::alpha(), H({2}), Window{-3, 3});
  EXPECT_TRUE(r.pass) << r.failure;
}

TEST(Precompose, SigmaFlipsOddModes) {
  auto P = Precomposed(Wp(), 1);
  auto a = Heisenberg::alpha();
  EXPECT_TRUE(vec_equal(P.act(a, Rat(-1, 2), ""), scaled(Wp()->act(a, Rat(-1, 2), ""), Rat(-1))));
  EXPECT_TRUE(verify_twisted_jacobi(*Vp(), P, a, a, "", Window{-3, 3}).pass);
  EXPECT_TRUE(verify_twisted_jacobi(*Vp(), P, a, H({2, 2}), H({1}), Window{-3, 3}).pass);
  auto Id = Precomposed(Wp(), 0);
  EXPECT_TRUE(vec_equal(Id.act(a, Rat(1, 2), H({1})), Wp()->act(a, Rat(1, 2), H({1}))));
  EXPECT_THROW(Precomposed(Wp(), 1, 3), std::invalid_argument);
}

TEST(ModuleDescription, RoundTrip) {
  auto d = ModuleDescription::of(*Wp(), Rat(1, 16) + Rat(1));
  auto text = d.serialize();
  auto e = ModuleDescription::parse(text);
  EXPECT_EQ(e.serialize(), text);
  EXPECT_EQ(e.lowest_weight, Rat(1, 16));
  EXPECT_EQ(e.T, 2);
  EXPECT_THROW(ModuleDescription::parse("bogus\n"), std::invalid_argument);
}
