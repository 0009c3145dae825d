#pragma once

// Compensated double-double arithmetic: a value is the unevaluated sum hi + lo
// with |lo| <= ulp(hi)/2, giving roughly 106 bits of significand.

#include <cmath>
#include <limits>

namespace gsm::dd {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(implicit)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }
};

namespace detail {

inline DoubleDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace detail

inline DoubleDouble operator-(const DoubleDouble& a) { return {-a.hi, -a.lo}; }

inline DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) {
  if (!std::isfinite(a.hi) || !std::isfinite(b.hi)) return {a.hi + b.hi, 0.0};
  DoubleDouble s = detail::two_sum(a.hi, b.hi);
  DoubleDouble t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) { return a + (-b); }

inline DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) {
  if (!std::isfinite(a.hi) || !std::isfinite(b.hi)) return {a.hi * b.hi, 0.0};
  DoubleDouble p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) {
  if (!std::isfinite(a.hi) || !std::isfinite(b.hi) || b.hi == 0.0) return {a.hi / b.hi, 0.0};
  double q1 = a.hi / b.hi;
  DoubleDouble r = a - DoubleDouble(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - DoubleDouble(q2) * b;
  double q3 = r.hi / b.hi;
  DoubleDouble q = detail::quick_two_sum(q1, q2);
  return q + DoubleDouble(q3);
}

inline DoubleDouble& operator+=(DoubleDouble& a, const DoubleDouble& b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, const DoubleDouble& b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, const DoubleDouble& b) { return a = a * b; }
inline DoubleDouble& operator/=(DoubleDouble& a, const DoubleDouble& b) { return a = a / b; }

inline bool operator==(const DoubleDouble& a, const DoubleDouble& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(const DoubleDouble& a, const DoubleDouble& b) { return !(a == b); }
inline bool operator<(const DoubleDouble& a, const DoubleDouble& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const DoubleDouble& a, const DoubleDouble& b) { return b < a; }
inline bool operator<=(const DoubleDouble& a, const DoubleDouble& b) { return !(b < a); }
inline bool operator>=(const DoubleDouble& a, const DoubleDouble& b) { return !(a < b); }

inline DoubleDouble abs(const DoubleDouble& a) { return a.hi < 0.0 ? -a : a; }
inline DoubleDouble ldexp(const DoubleDouble& a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }
inline bool isfinite(const DoubleDouble& a) { return std::isfinite(a.hi); }

inline const DoubleDouble kLn2{6.931471805599452862e-01, 2.319046813846299558e-17};

namespace detail {

struct InverseFactorials {
  static constexpr int kCount = 24;
  DoubleDouble v[kCount];
  InverseFactorials() {
    v[0] = DoubleDouble(1.0);
    for (int n = 1; n < kCount; ++n) v[n] = v[n - 1] / DoubleDouble(static_cast<double>(n));
  }
};

inline const InverseFactorials& inverse_factorials() {
  static const InverseFactorials table;
  return table;
}

// expm1 by Taylor series plus repeated doubling; slow but table-free.
inline DoubleDouble expm1_doubling(const DoubleDouble& r) {
  constexpr int kHalvings = 9;
  const auto& inv = inverse_factorials();
  const DoubleDouble u = ldexp(r, -kHalvings);
  DoubleDouble s = u;
  DoubleDouble power = u;
  for (int n = 2; n < InverseFactorials::kCount; ++n) {
    power = power * u;
    DoubleDouble term = power * inv.v[n];
    s = s + term;
    if (std::abs(term.hi) <= 1e-34 * std::abs(s.hi)) break;
  }
  for (int i = 0; i < kHalvings; ++i) s = ldexp(s, 1) + s * s;
  return s;
}

// exp(j/1024) and expm1(j/1024) for |j| <= 512.
struct ExpTable {
  static constexpr int kScale = 1024;
  static constexpr int kHalf = 512;
  DoubleDouble e[2 * kHalf + 1];
  DoubleDouble em1[2 * kHalf + 1];
  ExpTable() {
    for (int j = -kHalf; j <= kHalf; ++j) {
      DoubleDouble x = DoubleDouble(static_cast<double>(j) / kScale);
      em1[j + kHalf] = expm1_doubling(x);
      e[j + kHalf] = em1[j + kHalf] + DoubleDouble(1.0);
    }
  }
};

inline const ExpTable& exp_table() {
  static const ExpTable table;
  return table;
}

// expm1(s) for |s| <= 1/2048. Terms of order >= 6 are below 1e-19 relative
// and are summed in double.
inline DoubleDouble expm1_small(const DoubleDouble& s) {
  const auto& inv = inverse_factorials();
  const double x = s.hi;
  const double tail = x * (1.0 / 720 + x * (1.0 / 5040 + x * (1.0 / 40320 + x * (1.0 / 362880))));
  DoubleDouble acc = inv.v[5] + DoubleDouble(tail);
  for (int n = 4; n >= 1; --n) acc = acc * s + inv.v[n];
  return acc * s;
}

// For |r| <= 0.5: exp and expm1 of the table node j/1024 nearest r, and
// expm1(s) with s = r - j/1024.
struct Reduced {
  const DoubleDouble* e;
  const DoubleDouble* em1;
  DoubleDouble p;
};

inline Reduced reduce(const DoubleDouble& r) {
  const auto& tab = exp_table();
  const double jd = std::nearbyint(r.hi * ExpTable::kScale);
  const int j = static_cast<int>(jd);
  const DoubleDouble s = r - DoubleDouble(jd / ExpTable::kScale);
  return {&tab.e[j + ExpTable::kHalf], &tab.em1[j + ExpTable::kHalf], expm1_small(s)};
}

}  // namespace detail

inline DoubleDouble exp(const DoubleDouble& a) {
  if (std::isnan(a.hi)) return a;
  if (a.hi > 709.78) return {std::numeric_limits<double>::infinity(), 0.0};
  if (a.hi < -745.2) return {0.0, 0.0};
  if (a.hi == 0.0 && a.lo == 0.0) return {1.0, 0.0};
  const double m = std::nearbyint(a.hi / kLn2.hi);
  const DoubleDouble r = a - kLn2 * DoubleDouble(m);
  const detail::Reduced red = detail::reduce(r);
  const DoubleDouble s = *red.e + *red.e * red.p;
  return ldexp(s, static_cast<int>(m));
}

inline DoubleDouble expm1(const DoubleDouble& a) {
  if (std::isnan(a.hi)) return a;
  if (std::abs(a.hi) > 0.5) return exp(a) - DoubleDouble(1.0);
  const detail::Reduced red = detail::reduce(a);
  return *red.em1 + *red.e * red.p;
}

inline DoubleDouble log(const DoubleDouble& a) {
  if (std::isnan(a.hi) || a.hi < 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  if (a.hi == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
  if (std::isinf(a.hi)) return a;
  int e = 0;
  std::frexp(a.hi, &e);
  const DoubleDouble m = ldexp(a, -e);
  DoubleDouble x = std::log(m.hi);
  x = x + m * exp(-x) - DoubleDouble(1.0);
  return x + kLn2 * DoubleDouble(static_cast<double>(e));
}

// Newton iteration on expm1(y) = a; the corrections are tiny, so they are
// formed in double once the residual has been computed in double-double.
inline DoubleDouble log1p(const DoubleDouble& a) {
  if (std::isnan(a.hi) || a.hi < -1.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  if (a.hi == -1.0 && a.lo <= 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
  if (std::isinf(a.hi)) return a;
  if (a.hi == 0.0 && a.lo == 0.0) return {0.0, 0.0};
  DoubleDouble y = std::log1p(a.hi);
  for (int it = 0; it < 4; ++it) {
    const DoubleDouble e = expm1(y);
    const double corr = static_cast<double>(e - a) / (1.0 + e.hi);
    y = y - DoubleDouble(corr);
    if (std::abs(corr) <= 1e-15 * std::abs(y.hi)) break;
  }
  return y;
}

}  // namespace gsm::dd
