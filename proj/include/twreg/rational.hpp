#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace twreg {

namespace detail {

using i128 = __int128;
using u128 = unsigned __int128;

inline u128 uabs128(i128 v) { return v < 0 ? u128(-(v + 1)) + 1 : u128(v); }

inline u128 gcd128(u128 a, u128 b) {
  while (b) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline bool fits64(i128 v) { return v >= INT64_MIN && v <= INT64_MAX; }

}  // namespace detail

// Exact rational with an int64 fast path; spills to mpq_class on overflow.
class Rat {
 public:
  Rat() = default;
  Rat(int v) : n_(v) {}
  Rat(long v) : n_(v) {}
  Rat(long long v) : n_(v) {}
  Rat(long long n, long long d) { set128(n, d); }
  explicit Rat(const mpq_class& q) { set_big(q); }

  Rat(const Rat& o) : n_(o.n_), d_(o.d_) {
    if (o.b_) b_ = std::make_unique<mpq_class>(*o.b_);
  }
  Rat(Rat&&) noexcept = default;
  Rat& operator=(const Rat& o) {
    if (this != &o) {
      n_ = o.n_;
      d_ = o.d_;
      b_ = o.b_ ? std::make_unique<mpq_class>(*o.b_) : nullptr;
    }
    return *this;
  }
  Rat& operator=(Rat&&) noexcept = default;

  static Rat parse(const std::string& s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) {
        if (s.find('.') != std::string::npos) {
          auto dot = s.find('.');
          std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
          bool neg = !ip.empty() && ip[0] == '-';
          mpz_class den = 1;
          for (size_t i = 0; i < fp.size(); ++i) den *= 10;
          mpz_class num(ip.empty() || ip == "-" || ip == "+" ? std::string("0") : ip);
          mpz_class frac(fp.empty() ? std::string("0") : fp);
          if (neg) frac = -frac;
          mpq_class q(num * den + frac, den);
          q.canonicalize();
          return Rat(q);
        }
        return Rat(mpq_class(mpz_class(s)));
      }
      mpq_class q(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
      if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
      q.canonicalize();
      return Rat(q);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("not a rational: " + s);
    }
  }

  bool small() const { return !b_; }
  bool is_zero() const { return small() ? n_ == 0 : sgn(*b_) == 0; }
  bool is_integer() const { return small() ? d_ == 1 : b_->get_den() == 1; }
  int sign() const { return small() ? (n_ > 0) - (n_ < 0) : sgn(*b_); }

  mpq_class to_mpq() const {
    if (b_) return *b_;
    return mpq_class(mpz_class(static_cast<long>(n_)), mpz_class(static_cast<long>(d_)));
  }
  mpz_class num() const { return b_ ? b_->get_num() : mpz_class(static_cast<long>(n_)); }
  mpz_class den() const { return b_ ? b_->get_den() : mpz_class(static_cast<long>(d_)); }

  // Only valid when the value fits; used for exponents and small indices.
  long long num64() const {
    if (b_) throw std::overflow_error("rational too large");
    return n_;
  }
  long long den64() const {
    if (b_) throw std::overflow_error("rational too large");
    return d_;
  }

  long long floor() const {
    if (b_) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), b_->get_num_mpz_t(), b_->get_den_mpz_t());
      return f.get_si();
    }
    long long q = n_ / d_;
    if (n_ % d_ != 0 && n_ < 0) --q;
    return q;
  }
  Rat frac() const { return *this - Rat(floor()); }

  double to_double() const { return b_ ? b_->get_d() : double(n_) / double(d_); }
  long double to_ldouble() const {
    if (b_) return static_cast<long double>(b_->get_d());
    return static_cast<long double>(n_) / static_cast<long double>(d_);
  }

  std::string str() const {
    if (b_) return b_->get_str();
    return d_ == 1 ? std::to_string(n_) : std::to_string(n_) + "/" + std::to_string(d_);
  }

  Rat operator-() const {
    if (small() && n_ != INT64_MIN) {
      Rat r;
      r.n_ = -n_;
      r.d_ = d_;
      return r;
    }
    return Rat(mpq_class(-to_mpq()));
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    if (a.small() && b.small()) {
      if (a.d_ == 1 && b.d_ == 1) {
        Rat r;
        r.set128(detail::i128(a.n_) + b.n_, 1);
        return r;
      }
      Rat r;
      r.set128(detail::i128(a.n_) * b.d_ + detail::i128(b.n_) * a.d_, detail::i128(a.d_) * b.d_);
      return r;
    }
    return Rat(mpq_class(a.to_mpq() + b.to_mpq()));
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    if (a.small() && b.small()) {
      Rat r;
      r.set128(detail::i128(a.n_) * b.d_ - detail::i128(b.n_) * a.d_, detail::i128(a.d_) * b.d_);
      return r;
    }
    return Rat(mpq_class(a.to_mpq() - b.to_mpq()));
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    if (a.small() && b.small()) {
      if (a.n_ == 0 || b.n_ == 0) return Rat();
      Rat r;
      r.set128(detail::i128(a.n_) * b.n_, detail::i128(a.d_) * b.d_);
      return r;
    }
    return Rat(mpq_class(a.to_mpq() * b.to_mpq()));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    if (a.small() && b.small()) {
      Rat r;
      r.set128(detail::i128(a.n_) * b.d_, detail::i128(a.d_) * b.n_);
      return r;
    }
    return Rat(mpq_class(a.to_mpq() / b.to_mpq()));
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    if (a.small() && b.small()) return a.n_ == b.n_ && a.d_ == b.d_;
    return a.to_mpq() == b.to_mpq();
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    if (a.small() && b.small()) return detail::i128(a.n_) * b.d_ < detail::i128(b.n_) * a.d_;
    return a.to_mpq() < b.to_mpq();
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

 private:
  void set128(detail::i128 n, detail::i128 d) {
    if (d == 0) throw std::domain_error("division by zero");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      n_ = 0;
      d_ = 1;
      b_.reset();
      return;
    }
    if (d != 1) {
      auto g = detail::gcd128(detail::uabs128(n), detail::u128(d));
      if (g > 1) {
        n /= detail::i128(g);
        d /= detail::i128(g);
      }
    }
    if (detail::fits64(n) && detail::fits64(d)) {
      n_ = static_cast<long long>(n);
      d_ = static_cast<long long>(d);
      b_.reset();
    } else {
      set_big(mpq_class(to_mpz(n), to_mpz(d)));
    }
  }

  static mpz_class to_mpz(detail::i128 v) {
    bool neg = v < 0;
    detail::u128 u = detail::uabs128(v);
    mpz_class hi(static_cast<unsigned long>(u >> 64));
    mpz_class lo(static_cast<unsigned long>(u & ~0ULL));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
  }

  void set_big(mpq_class q) {
    q.canonicalize();
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
      n_ = q.get_num().get_si();
      d_ = q.get_den().get_si();
      b_.reset();
    } else {
      b_ = std::make_unique<mpq_class>(std::move(q));
    }
  }

  long long n_ = 0;
  long long d_ = 1;
  std::unique_ptr<mpq_class> b_;
};

// Generalized binomial coefficient binom(a, i) for rational a.
inline Rat binom(const Rat& a, long long i) {
  if (i < 0) return Rat(0);
  Rat r(1);
  for (long long t = 0; t < i; ++t) r = r * (a - Rat(t)) / Rat(t + 1);
  return r;
}

inline Rat factorial(long long n) {
  Rat r(1);
  for (long long i = 2; i <= n; ++i) r *= Rat(i);
  return r;
}

inline Rat rpow(const Rat& b, long long e) {
  if (e < 0) return Rat(1) / rpow(b, -e);
  Rat r(1), x = b;
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

inline long long lcm_ll(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  long long g = std::gcd(a, b);
  return a / g * b;
}

}  // namespace twreg
