#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jacobi.hpp"
#include "report.hpp"
#include "scalars.hpp"

namespace twreg {

// Scalar three-term data A(x1,x2), B(x1,x2), C(x0,x2) as coefficient oracles, with the
// support modes of the generalized Jacobi identity:
//   A in x1^{-alpha-beta} C((x1)){x2} with x2-exponents >= lowA2,
//   B in x1^{-beta} C{x2}((x1)) with x1-exponents >= lowB1,
//   C in x0^{-alpha} C{x2}((x0)) with x0-exponents >= lowC0.
// x2-exponents of A lie in gamma + Z.
struct JacobiData {
  using Coeff = std::function<Cyc(const Rat&, const Rat&)>;
  Coeff A, B, C;
  Rat alpha, beta, gamma;
  Rat lowA2, lowB1, lowC0;
  std::string label;
};

// The three-term identity, coefficientwise in (x0, x1, x2) on the window.
inline VerificationReport verify_formal_jacobi(const JacobiData& d, const Branch& br, const Window& win) {
  VerificationReport rep;
  rep.identity = "formal-jacobi";
  rep.params = d.label;
  rep.window = win.str();
  ThreeTerm<Cyc, Cyc> J;
  J.F1 = d.A;
  J.F2 = d.B;
  J.F3 = d.C;
  J.imax1 = [&](const Rat&, const Rat&, const Rat& e2) { return (e2 - d.lowA2).floor(); };
  J.imax2 = [&](const Rat&, const Rat& e1, const Rat&) { return (e1 - d.lowB1).floor(); };
  J.imax3 = [&](const Rat& e0, const Rat&, const Rat&) { return (e0 - d.lowC0).floor(); };
  J.a1 = d.alpha;
  J.a2 = d.alpha;
  J.a3 = -d.beta;
  J.c = br.phase(d.alpha);
  for (auto& e0 : window_points(win, -d.alpha))
    for (auto& e1 : window_points(win, -d.beta))
      for (auto& e2 : window_points(win, d.gamma)) {
        ++rep.checked;
        Cyc r = J.residual(e0, e1, e2);
        if (!r.is_zero()) {
          rep.fail("nonzero residual at (x0,x1,x2)^" + rats({e0, e1, e2}));
          return rep;
        }
      }
  return rep;
}

// (x1-x2)^{k+alpha} A = e^{(k+alpha) pi i} (x2-x1)^{k+alpha} B.
inline VerificationReport verify_generalized_comm(const JacobiData& d, const Branch& br, long long k,
                                                  const Window& win) {
  VerificationReport rep;
  rep.identity = "generalized-commutativity";
  rep.params = d.label + " k=" + std::to_string(k);
  rep.window = win.str();
  Rat g = Rat(k) + d.alpha;
  for (auto& e1 : window_points(win, -d.beta))
    for (auto& e2 : window_points(win, d.gamma)) {
      ++rep.checked;
      Cyc lhs, rhs;
      for (long long i = 0; Rat(i) <= e2 - d.lowA2; ++i)
        lhs = lhs + d.A(e1 - g + Rat(i), e2 - Rat(i)).scaled(binom(g, i) * Rat(i % 2 ? -1 : 1));
      for (long long i = 0; Rat(i) <= e1 - d.lowB1; ++i)
        rhs = rhs + d.B(e1 - Rat(i), e2 - g + Rat(i)).scaled(binom(g, i) * Rat(i % 2 ? -1 : 1));
      rhs = rhs * br.phase(g);
      if (!(lhs == rhs)) {
        rep.fail("mismatch at (x1,x2)^" + rats({e1, e2}));
        return rep;
      }
    }
  return rep;
}

// (x0+x2)^{l+beta} A(x0+x2, x2) = (x2+x0)^{l+beta} C(x0, x2).
inline VerificationReport verify_generalized_assoc(const JacobiData& d, long long l, const Window& win) {
  VerificationReport rep;
  rep.identity = "generalized-associativity";
  rep.params = d.label + " l=" + std::to_string(l);
  rep.window = win.str();
  Rat g = Rat(l) + d.beta;
  for (auto& e0 : window_points(win, -d.alpha))
    for (auto& e2 : window_points(win, d.gamma)) {
      ++rep.checked;
      Cyc lhs, rhs;
      for (long long t = 0; Rat(t) <= e2 - d.lowA2; ++t)
        lhs = lhs + d.A(e0 + Rat(t) - g, e2 - Rat(t)).scaled(binom(e0 + Rat(t), t));
      for (long long i = 0; Rat(i) <= e0 - d.lowC0; ++i)
        rhs = rhs + d.C(e0 - Rat(i), e2 - g + Rat(i)).scaled(binom(g, i));
      if (!(lhs == rhs)) {
        rep.fail("mismatch at (x0,x2)^" + rats({e0, e2}));
        return rep;
      }
    }
  return rep;
}

// k and l read off from the declared supports: x0^{k+alpha} C and x1^{l+beta} B have no negative powers.
inline std::pair<long long, long long> extract_kl(const JacobiData& d) {
  long long k = std::max<long long>(0, -(d.lowC0 + d.alpha).floor());
  long long l = std::max<long long>(0, -(d.lowB1 + d.beta).floor());
  return {k, l};
}

struct EquivalenceOutcome {
  VerificationReport report;
  bool jacobi = false;
  bool relations = false;
  long long k = 0, l = 0;
};

// direction 1: the three-term identity implies the two relations with the extracted k, l.
// direction 2: the relations with the supplied k, l imply the three-term identity.
inline EquivalenceOutcome generic_jacobi_equivalence(const JacobiData& d, const Branch& br, const Window& win,
                                                     int direction, std::optional<std::pair<long long, long long>> kl = {}) {
  EquivalenceOutcome out;
  out.report.identity = direction == 1 ? "jacobi-implies-relations" : "relations-imply-jacobi";
  out.report.params = d.label;
  out.report.window = win.str();
  auto [k, l] = kl ? *kl : extract_kl(d);
  out.k = k;
  out.l = l;
  auto jac = verify_formal_jacobi(d, br, win);
  auto com = verify_generalized_comm(d, br, k, win);
  auto asc = verify_generalized_assoc(d, l, win);
  out.jacobi = jac.pass;
  out.relations = com.pass && asc.pass;
  out.report.checked = jac.checked + com.checked + asc.checked;
  if (direction == 1) {
    if (out.jacobi && !out.relations) out.report.fail("identity holds but " + (com.pass ? asc.failure : com.failure));
    if (!out.jacobi && out.relations) out.report.fail("relations hold but identity fails: " + jac.failure);
  } else {
    if (out.relations && !out.jacobi) out.report.fail("relations hold but identity fails: " + jac.failure);
    if (!out.relations && out.jacobi) out.report.fail("identity holds but relations fail");
  }
  return out;
}

// Random instances built from p(x1,x2) = sum c_ab x1^a x2^b with a,b in [0,2]:
//   A = x1^{-l-beta}(x1-x2)^{-k-alpha} p x2^gamma,
//   B = e^{-(k+alpha) pi i}(x2-x1)^{-k-alpha} x1^{-l-beta} p x2^gamma,
//   C = x0^{-k-alpha}(x2+x0)^{-l-beta} p(x0+x2, x2) x2^gamma,
// optionally with one coefficient of A, B or C perturbed.
struct RandomInstance {
  JacobiData data;
  long long k = 0, l = 0;
  int perturbed = -1;  // -1 none, 0 A, 1 B, 2 C
};

inline RandomInstance random_instance(std::mt19937_64& rng, const Branch& br, int perturb) {
  static const Rat choices[] = {Rat(0), Rat(1, 2), Rat(1, 3)};
  std::uniform_int_distribution<int> pick3(0, 2), coef(-3, 3);
  RandomInstance ri;
  Rat alpha = choices[pick3(rng)], beta = choices[pick3(rng)];
  Rat gamma = Rat(pick3(rng), 4);
  long long k = pick3(rng), l = pick3(rng);
  struct Term {
    long long a, b;
    Rat c;
  };
  std::vector<Term> p;
  for (long long a = 0; a <= 2; ++a)
    for (long long b = 0; b <= 2; ++b) {
      int c = coef(rng);
      if (c) p.push_back({a, b, Rat(c)});
    }
  if (p.empty()) p.push_back({0, 0, Rat(1)});
  Rat g = Rat(k) + alpha, h = Rat(l) + beta;
  Cyc ph = br.phase(-g);
  auto A = [p, g, h, gamma](const Rat& e1, const Rat& e2) {
    Rat s;
    for (auto& t : p) {
      Rat i = e2 - Rat(t.b) - gamma;
      if (!i.is_integer() || i.sign() < 0) continue;
      if (!(e1 == Rat(t.a) - h - g - i)) continue;
      s += t.c * binom(-g, i.num64()) * Rat(i.num64() % 2 ? -1 : 1);
    }
    return Cyc(s);
  };
  auto B = [p, g, h, gamma, ph](const Rat& e1, const Rat& e2) {
    Rat s;
    for (auto& t : p) {
      Rat i = e1 - Rat(t.a) + h;
      if (!i.is_integer() || i.sign() < 0) continue;
      if (!(e2 == Rat(t.b) + gamma - g - i)) continue;
      s += t.c * binom(-g, i.num64()) * Rat(i.num64() % 2 ? -1 : 1);
    }
    return ph.scaled(s);
  };
  auto C = [p, g, h, gamma](const Rat& e0, const Rat& e2) {
    Rat s;
    for (auto& t : p) {
      Rat i = e0 + g;
      if (!i.is_integer() || i.sign() < 0) continue;
      if (!(e2 == Rat(t.a) - h - i + Rat(t.b) + gamma)) continue;
      s += t.c * binom(Rat(t.a) - h, i.num64());
    }
    return Cyc(s);
  };
  JacobiData d;
  d.A = A;
  d.B = B;
  d.C = C;
  d.alpha = alpha;
  d.beta = beta;
  d.gamma = gamma;
  d.lowA2 = gamma;
  d.lowB1 = -h;
  d.lowC0 = -g;
  ri.k = k;
  ri.l = l;
  if (perturb >= 0) {
    // A coefficient inside both windows: A at (x1,x2) = (s - alpha - beta, gamma + t), B at
    // (s - beta, gamma - alpha + t), C at (s - alpha, gamma - beta + t).
    std::uniform_int_distribution<int> sh(-1, 1), tt(0, 1);
    Rat s0(sh(rng)), t0(tt(rng));
    Rat pe1, pe2;
    JacobiData::Coeff* f = nullptr;
    if (perturb == 0) {
      pe1 = s0 - alpha - beta;
      pe2 = gamma + t0;
      f = &d.A;
    } else if (perturb == 1) {
      s0 = Rat(tt(rng));
      pe1 = s0 - beta;
      pe2 = gamma - alpha + t0;
      f = &d.B;
    } else {
      s0 = Rat(tt(rng));
      pe1 = s0 - alpha;
      pe2 = gamma - beta + t0;
      f = &d.C;
    }
    auto base = *f;
    *f = [base, pe1, pe2](const Rat& e1, const Rat& e2) {
      Cyc c = base(e1, e2);
      return (e1 == pe1 && e2 == pe2) ? c + Cyc(Rat(1)) : c;
    };
    ri.perturbed = perturb;
  }
  d.label = "alpha=" + alpha.str() + " beta=" + beta.str() + " gamma=" + gamma.str() + " k=" + std::to_string(k) +
            " l=" + std::to_string(l) + (perturb >= 0 ? " perturbed=" + std::string(1, "ABC"[perturb]) : "");
  ri.data = d;
  return ri;
}

}  // namespace twreg
