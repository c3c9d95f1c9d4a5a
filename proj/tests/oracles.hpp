#pragma once

// Reference computations for the tests. They share no code with the library
// beyond evaluating a Profile's interpolant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dewet/profile.hpp"

namespace oracle {

/// Composite Simpson on [a, b] with `panels` panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double x0 = a + k * h;
    s += f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h);
  }
  return s * h / 6.0;
}

/// Simpson with one panel per spline interval, exact for piecewise cubics.
inline double spline_area(const dewet::Profile& p) {
  double s = 0.0;
  const int n = p.intervals();
  for (int j = 0; j < n; ++j) {
    const double a = p.node_x(j), b = j + 1 == n ? p.beta() : p.node_x(j + 1);
    auto f = [&](double x) { return dewet::extend_by_zero(p, std::min(std::max(x, p.alpha()), p.beta())); };
    s += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return s;
}

/// || p - q ||_{L2(R)} of the zero extensions by Simpson on a fine uniform grid.
inline double l2_distance(const dewet::Profile& p, const dewet::Profile& q, int panels = 20000) {
  const double a = std::min(p.alpha(), q.alpha()), b = std::max(p.beta(), q.beta());
  auto f = [&](double x) {
    const double d = dewet::extend_by_zero(p, x) - dewet::extend_by_zero(q, x);
    return d * d;
  };
  return std::sqrt(simpson(f, a, b, panels));
}

/// Bitwise CRC-32 (IEEE, reflected, polynomial 0xEDB88320).
inline std::uint32_t crc32(const std::string& data) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char ch : data) {
    c ^= ch;
    for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
  }
  return c ^ 0xFFFFFFFFu;
}

/// Truncated Taylor series in one variable, used to differentiate closed-form expressions.
template <int N>
struct Jet {
  double c[N + 1] = {};  ///< c[k] = f^(k)(x0) / k!

  static Jet variable(double x0) {
    Jet j;
    j.c[0] = x0;
    if (N >= 1) j.c[1] = 1.0;
    return j;
  }
  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }
  /// Shift: the jet of f' from the jet of f.
  Jet d() const {
    Jet j;
    for (int k = 0; k < N; ++k) j.c[k] = (k + 1) * c[k + 1];
    return j;
  }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) {
  for (int k = 0; k <= N; ++k) a.c[k] += b.c[k];
  return a;
}
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) {
  for (int k = 0; k <= N; ++k) a.c[k] -= b.c[k];
  return a;
}
template <int N>
Jet<N> operator*(double s, Jet<N> a) {
  for (int k = 0; k <= N; ++k) a.c[k] *= s;
  return a;
}
template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (int i = 0; i <= N; ++i)
    for (int k = 0; i + k <= N; ++k) r.c[i + k] += a.c[i] * b.c[k];
  return r;
}
template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (int k = 0; k <= N; ++k) {
    double s = a.c[k];
    for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
    r.c[k] = s / b.c[0];
  }
  return r;
}
/// a^p for real p via (r^p)' = p r^(p-1) r' on the series.
template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
  Jet<N> r;
  r.c[0] = std::pow(a.c[0], p);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += (p * i - (k - i)) * a.c[i] * r.c[k - i];
    r.c[k] = s / (k * a.c[0]);
  }
  return r;
}
template <int N>
Jet<N> sin(const Jet<N>& a);
template <int N>
Jet<N> cos(const Jet<N>& a);
/// sin and cos together by the coupled recurrence.
template <int N>
void sincos(const Jet<N>& a, Jet<N>& s, Jet<N>& c) {
  s = Jet<N>{};
  c = Jet<N>{};
  s.c[0] = std::sin(a.c[0]);
  c.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double ss = 0.0, cc = 0.0;
    for (int i = 1; i <= k; ++i) {
      ss += i * a.c[i] * c.c[k - i];
      cc -= i * a.c[i] * s.c[k - i];
    }
    s.c[k] = ss / k;
    c.c[k] = cc / k;
  }
}
template <int N>
Jet<N> sin(const Jet<N>& a) {
  Jet<N> s, c;
  sincos(a, s, c);
  return s;
}
template <int N>
Jet<N> cos(const Jet<N>& a) {
  Jet<N> s, c;
  sincos(a, s, c);
  return c;
}

}  // namespace oracle
