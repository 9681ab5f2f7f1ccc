#ifndef IRMESH_DUAL_HPP_
#define IRMESH_DUAL_HPP_

#include <array>
#include <cmath>
#include <cstddef>

namespace irm {

/// Number of derivative lanes carried by a Dual. Gradients of functions with
/// more inputs are computed in passes of kDualWidth seeds each.
inline constexpr int kDualWidth = 8;

/// Forward-mode dual number with a fixed-width derivative vector.
struct Dual {
  double v = 0.0;
  std::array<double, kDualWidth> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Dual(double value, int lane) : v(value) { d[lane] = 1.0; }

  double value() const { return v; }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
inline Dual operator-(const Dual& a) {
  Dual r(-a.v);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = -a.d[i];
  return r;
}
inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  Dual r(a.v * inv);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}

inline Dual operator+(const Dual& a, double b) { return a + Dual(b); }
inline Dual operator+(double a, const Dual& b) { return Dual(a) + b; }
inline Dual operator-(const Dual& a, double b) { return a - Dual(b); }
inline Dual operator-(double a, const Dual& b) { return Dual(a) - b; }
inline Dual operator*(const Dual& a, double b) {
  Dual r(a.v * b);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = a.d[i] * b;
  return r;
}
inline Dual operator*(double a, const Dual& b) { return b * a; }
inline Dual operator/(const Dual& a, double b) { return a * (1.0 / b); }
inline Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

inline Dual& operator+=(Dual& a, const Dual& b) { return a = a + b; }
inline Dual& operator-=(Dual& a, const Dual& b) { return a = a - b; }
inline Dual& operator*=(Dual& a, const Dual& b) { return a = a * b; }
inline Dual& operator/=(Dual& a, const Dual& b) { return a = a / b; }

// Comparisons act on values only; branches in user code see the primal path.
inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }

inline Dual chain(double fv, double dfv, const Dual& x) {
  Dual r(fv);
  for (int i = 0; i < kDualWidth; ++i) r.d[i] = dfv * x.d[i];
  return r;
}

inline Dual exp(const Dual& x) {
  const double e = std::exp(x.v);
  return chain(e, e, x);
}
inline Dual log(const Dual& x) { return chain(std::log(x.v), 1.0 / x.v, x); }
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.v);
  return chain(s, 0.5 / s, x);
}
inline Dual sin(const Dual& x) { return chain(std::sin(x.v), std::cos(x.v), x); }
inline Dual cos(const Dual& x) { return chain(std::cos(x.v), -std::sin(x.v), x); }
inline Dual pow(const Dual& x, double p) {
  return chain(std::pow(x.v, p), p * std::pow(x.v, p - 1.0), x);
}
inline Dual pow(const Dual& x, int p) { return pow(x, static_cast<double>(p)); }

/// C2 replacement for |y|: sqrt(y^2 + eps^2). Bias is at most eps.
template <class S>
S smooth_abs(const S& y, double eps) {
  using std::sqrt;
  return sqrt(y * y + eps * eps);
}

/// C2 replacement for max(a, b) built on smooth_abs.
template <class S>
S smooth_max(const S& a, const S& b, double eps) {
  return 0.5 * (a + b + smooth_abs(a - b, eps));
}

template <class S>
S smooth_min(const S& a, const S& b, double eps) {
  return 0.5 * (a + b - smooth_abs(a - b, eps));
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace irm

#endif  // IRMESH_DUAL_HPP_
