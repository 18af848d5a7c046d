// Double-double arithmetic: an unevaluated sum of two doubles giving
// roughly 32 significant digits.  Algorithms follow the classical
// error-free transformations (Dekker/Knuth, see also Joldes et al.,
// ACM TOMS 44, 2018).
#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace hessianlab {

struct DDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DDouble() = default;
  constexpr DDouble(double x) : hi(x), lo(0.0) {}
  constexpr DDouble(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }
};

namespace detail {

inline DDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

// requires |a| >= |b|
inline DDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace detail

inline DDouble operator+(DDouble a, DDouble b) {
  DDouble s = detail::two_sum(a.hi, b.hi);
  DDouble t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline DDouble operator-(DDouble a) { return {-a.hi, -a.lo}; }
inline DDouble operator-(DDouble a, DDouble b) { return a + (-b); }

inline DDouble operator*(DDouble a, DDouble b) {
  DDouble p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline DDouble operator/(DDouble a, DDouble b) {
  double q1 = a.hi / b.hi;
  DDouble r = a - DDouble(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - DDouble(q2) * b;
  double q3 = r.hi / b.hi;
  DDouble q = detail::quick_two_sum(q1, q2);
  return q + DDouble(q3);
}

inline DDouble& operator+=(DDouble& a, DDouble b) { return a = a + b; }
inline DDouble& operator-=(DDouble& a, DDouble b) { return a = a - b; }
inline DDouble& operator*=(DDouble& a, DDouble b) { return a = a * b; }
inline DDouble& operator/=(DDouble& a, DDouble b) { return a = a / b; }

inline bool operator==(DDouble a, DDouble b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(DDouble a, DDouble b) { return !(a == b); }
inline bool operator<(DDouble a, DDouble b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(DDouble a, DDouble b) { return b < a; }
inline bool operator<=(DDouble a, DDouble b) { return !(b < a); }
inline bool operator>=(DDouble a, DDouble b) { return !(a < b); }

inline DDouble abs(DDouble a) { return a.hi < 0.0 ? -a : a; }

inline bool isfinite(DDouble a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

inline double to_double(DDouble a) { return a.hi + a.lo; }
inline double to_double(double a) { return a; }

}  // namespace hessianlab

namespace Eigen {

template <>
struct NumTraits<hessianlab::DDouble> : GenericNumTraits<hessianlab::DDouble> {
  typedef hessianlab::DDouble Real;
  typedef hessianlab::DDouble NonInteger;
  typedef hessianlab::DDouble Nested;
  static inline Real epsilon() { return {4.93e-32, 0.0}; }
  static inline Real dummy_precision() { return {1e-28, 0.0}; }
  static inline int digits10() { return 31; }
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 10
  };
};

}  // namespace Eigen
