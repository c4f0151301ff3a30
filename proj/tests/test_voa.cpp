#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twreg/jacobi.hpp"

using namespace twreg;

namespace {

const Heisenberg& V() {
  static Heisenberg v;
  return v;
}

Label P(std::initializer_list<int> parts) {
  Label l;
  for (int p : parts) l.push_back(char(2 * p));
  return l;
}

}  // namespace

TEST(Heisenberg, GradedDimensionsArePartitionNumbers) {
  std::vector<size_t> p{1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42};
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(V().basis(n).size(), p[n]);
}

TEST(Heisenberg, ModesAgreeWithNormalOrderingOracle) {
  auto B = V().basis_upto(4);
  for (auto& u : B)
    for (auto& w : B)
      for (int n = -4; n <= 5; ++n)
        EXPECT_TRUE(vec_equal(V().mode(u, n, w), oracle::normal_ordered(u, Rat(n), w, false)))
            << fock::show(u, false) << " _" << n << " " << fock::show(w, false);
}

TEST(Heisenberg, FirstModeOfGenerator) {
  auto a = Heisenberg::alpha();
  EXPECT_TRUE(vec_equal(V().mode(a, 1, a), Vec{{"", Rat(1)}}));
  for (auto& u : V().basis_upto(4)) {
    EXPECT_TRUE(vec_equal(V().mode(u, -1, ""), Vec{{u, Rat(1)}}));
    for (int n = 0; n <= 4; ++n) EXPECT_TRUE(V().mode(u, n, "").empty());
  }
}

TEST(Heisenberg, LZeroIsWeight) {
  Vec v{{P({2, 1}), Rat(1)}};
  EXPECT_TRUE(vec_equal(V().L(0, v), Vec{{P({2, 1}), Rat(3)}}));
  for (auto& b : V().basis_upto(5)) {
    Vec x{{b, Rat(1)}};
    EXPECT_TRUE(vec_equal(V().L(0, x), scaled(x, Rat(Heisenberg::weight(b)))));
  }
}

TEST(Heisenberg, VirasoroBracket) {
  for (auto& b : V().basis_upto(4)) {
    Vec x{{b, Rat(1)}};
    for (int m = -3; m <= 3; ++m)
      for (int n = -3; n <= 3; ++n) {
        Vec lhs = V().L(m, V().L(n, x));
        axpy(lhs, Rat(-1), V().L(n, V().L(m, x)));
        Vec rhs = scaled(V().L(m + n, x), Rat(m - n));
        if (m + n == 0) axpy(rhs, Rat(m * m * m - m, 12) * Heisenberg::central_charge(), x);
        EXPECT_TRUE(vec_equal(lhs, rhs)) << m << " " << n;
      }
  }
}

TEST(Heisenberg, DerivationBracket) {
  auto B = V().basis_upto(3);
  for (auto& v : B)
    for (auto& w : B)
      for (int n = -4; n <= 4; ++n) {
        Vec w1{{w, Rat(1)}};
        Vec lhs = V().L(-1, V().adjoint().act_on(v, Rat(n), w1));
        axpy(lhs, Rat(-1), V().adjoint().act_on(v, Rat(n), V().L(-1, w1)));
        Vec rhs = scaled(V().adjoint().act_on(v, Rat(n - 1), w1), Rat(-n));
        EXPECT_TRUE(vec_equal(lhs, rhs));
        Vec Dv = V().L(-1, Vec{{v, Rat(1)}});
        EXPECT_TRUE(vec_equal(V().adjoint().act_vec(Dv, Rat(n), w), rhs));
      }
}

TEST(Heisenberg, AutomorphismCommutesWithModes) {
  auto B = V().basis_upto(4);
  for (auto& u : B)
    for (auto& v : B)
      for (int n = -3; n <= 3; ++n)
        for (auto& [k, c] : V().mode(u, n, v))
          EXPECT_EQ(Heisenberg::sigma_sign(k), Heisenberg::sigma_sign(u) * Heisenberg::sigma_sign(v));
  EXPECT_EQ(Heisenberg::sigma_sign(TwistedModule::omega_label()), 1);
}

TEST(Heisenberg, EigenspaceProjection) {
  Vec v{{P({1}), Rat(1)}, {P({2, 1}), Rat(2)}, {P({1, 1, 1}), Rat(3)}};
  Vec odd = Heisenberg::eigenspace(v, 1, 1, 1, 1), even = Heisenberg::eigenspace(v, 0, 0, 1, 1);
  EXPECT_EQ(odd.size(), 2u);
  EXPECT_EQ(even.size(), 1u);
  axpy(odd, Rat(1), even);
  EXPECT_TRUE(vec_equal(odd, v));
  EXPECT_TRUE(Heisenberg::eigenspace(v, 1, 0, 1, 1).empty());
}

TEST(Jacobi, UntwistedSamples) {
  auto a = Heisenberg::alpha();
  EXPECT_TRUE(verify_twisted_jacobi(V(), V().adjoint(), "", "", "", Window{-5, 5}).pass);
  auto r = verify_twisted_jacobi(V(), V().adjoint(), a, a, "", Window{-5, 5});
  EXPECT_TRUE(r.pass) << r.failure;
  EXPECT_GT(r.checked, 1000);
  auto bad = verify_twisted_jacobi(V(), V().adjoint(), a, a, "", Window{-5, 5}, {false, true});
  EXPECT_FALSE(bad.pass);
}
