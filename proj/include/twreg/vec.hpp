#pragma once

#include <map>
#include <string>

#include "scalars.hpp"

namespace twreg {

// Basis labels are byte strings; for Fock spaces each byte is twice a part, nonincreasing.
using Label = std::string;

template <class S>
using SVec = std::map<Label, S>;

using Vec = SVec<Rat>;
using CVec = SVec<Cyc>;

template <class S, class C>
inline void axpy(SVec<S>& dst, const C& c, const SVec<S>& src) {
  if constexpr (std::is_same_v<C, Rat>) {
    if (c.is_zero()) return;
  } else {
    if (c.is_zero()) return;
  }
  for (auto& [k, v] : src) {
    auto it = dst.find(k);
    S add = S(v * c);
    if (it == dst.end()) {
      if (!add.is_zero()) dst.emplace(k, std::move(add));
    } else {
      it->second = it->second + add;
      if (it->second.is_zero()) dst.erase(it);
    }
  }
}

template <class S>
inline void add_term(SVec<S>& dst, const Label& k, const S& c) {
  if (c.is_zero()) return;
  auto it = dst.find(k);
  if (it == dst.end()) {
    dst.emplace(k, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) dst.erase(it);
  }
}

template <class S, class C>
inline SVec<S> scaled(const SVec<S>& v, const C& c) {
  SVec<S> r;
  axpy(r, c, v);
  return r;
}

inline CVec to_cvec(const Vec& v) {
  CVec r;
  for (auto& [k, c] : v) r.emplace(k, Cyc(c));
  return r;
}

template <class S>
inline bool vec_equal(const SVec<S>& a, const SVec<S>& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || ia->second != ib->second) return false;
  return true;
}

}  // namespace twreg
