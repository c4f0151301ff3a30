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

Label P(const Label& a, const Label& b) { return pairs::make(a, b); }

}  // namespace

TEST(TensorVOA, ModesFactorOnPureTensors) {
  TensorVOA VV;
  Label a = Heisenberg::alpha(), vac;
  // (a (x) 1)_n (v (x) 1) = a_n v (x) 1
  for (long long n = -3; n <= 2; ++n)
    for (auto& v : Vp()->basis_upto(2)) {
      Vec lhs = VV.mode(P(a, vac), n, P(v, vac));
      Vec rhs;
      for (auto& [k, c] : Vp()->mode(a, n, v)) rhs.emplace(P(k, vac), c);
      EXPECT_TRUE(vec_equal(lhs, rhs));
    }
  // (a (x) a)_{-1} (1 (x) 1) = a(-1)1 (x) a(-1)1
  EXPECT_TRUE(vec_equal(VV.mode(P(a, a), -1, P(vac, vac)), Vec{{P(a, a), Rat(1)}}));
  EXPECT_EQ(TensorVOA::weight(P(a, a)), Rat(2));
}

TEST(TensorModule, ProductOfTwistedAndUntwistedPassesJacobi) {
  auto S = std::make_shared<ProductSpace>(Wtw(), Vp()->adjoint_ptr());
  TensorModule M(S);
  EXPECT_EQ(M.T(), 2);
  EXPECT_EQ(M.lowest_weight(), Rat(1, 16));
  TensorVOA VV;
  auto us = VV.basis_upto(2);
  auto ws = M.basis_upto(M.lowest_weight() + Rat(1));
  for (auto& u : us)
    for (auto& v : us)
      for (auto& w : ws) {
        auto r = verify_tensor_jacobi(M, u, v, w, Window{-3, 3});
        ASSERT_TRUE(r.pass) << r.params << " " << r.failure;
      }
  Label a = Heisenberg::alpha(), vac;
  EXPECT_FALSE(verify_tensor_jacobi(M, P(a, vac), P(vac, a), ws[0], Window{-3, 3}, JacobiOptions{true, false}).pass);
}

TEST(TensorModule, TwistCosetsCombine) {
  auto S = std::make_shared<ProductSpace>(Wtw(), Wtw());
  TensorModule M(S, 1, Rat(1));
  Label a = Heisenberg::alpha(), vac;
  EXPECT_EQ(M.twist_j(P(a, vac)), 1);
  EXPECT_EQ(M.twist_j(P(a, a)), 0);
  EXPECT_EQ(M.lowest_weight(), Rat(1, 8));
  auto w = M.basis(M.lowest_weight())[0];
  auto r = verify_tensor_jacobi(M, P(a, a), P(a, vac), w, Window{-2, 2});
  EXPECT_TRUE(r.pass) << r.failure;
}

TEST(TensorModule, TrivialSecondActionReducesToFirst) {
  auto S = std::make_shared<TrivialSecond>(Wtw());
  TensorModule M(S);
  Label vac;
  for (auto& u : Vp()->basis_upto(2))
    for (auto& w : Wtw()->basis_upto(Wtw()->lowest_weight() + Rat(1)))
      for (Rat n = Rat(-3); n <= Rat(3); n += Rat(1, 2))
        EXPECT_TRUE(vec_equal(M.act(P(u, vac), n, w), Wtw()->act(u, n, w)));
  for (auto& u : Vp()->basis_upto(2))
    for (auto& v : Vp()->basis_upto(1)) {
      auto r = verify_tensor_jacobi(M, P(u, vac), P(v, vac), "", Window{-3, 3});
      EXPECT_TRUE(r.pass) << r.failure;
    }
}

TEST(TensorModule, NonCommutingActionsAreRejected) {
  try {
    TensorModule M(std::make_shared<DoubledAction>(Vp()->adjoint_ptr()));
    FAIL() << "expected rejection";
  } catch (const tensor_error& e) {
    std::string what = e.what();
    EXPECT_EQ(what.rfind("actions-do-not-commute", 0), 0u);
    EXPECT_NE(what.find("witness"), std::string::npos);
  }
  auto rep = check_actions_commute(DoubledAction(Wtw()), 1, Rat(1), Window{-2, 2});
  EXPECT_FALSE(rep.pass);
}

TEST(TensorModule, RegularRepresentationPath) {
  Branch br = Branch::make(Rat(-1), 2, 8);
  auto Y = standard_intertwiner_VWW(Wtw(), Vp(), br);
  auto F = f_z(Y, Vp()->adjoint_ptr(), br);
  RegularRep rr(Vp(), Vp()->adjoint_ptr(), 1, 1, br);
  Label a = Heisenberg::alpha();
  auto ws = Wtw()->basis_upto(Wtw()->lowest_weight() + Rat(1, 2));
  auto wds = Y->M2->basis_upto(Wtw()->lowest_weight() + Rat(1, 2));
  auto r = verify_regular_tensor(rr, F->image(ws[1], wds[0]), {Label(), a, Label("\x04", 1)}, Window{-2, 2});
  EXPECT_TRUE(r.pass) << r.failure;
  EXPECT_GT(r.checked, 0);
}
