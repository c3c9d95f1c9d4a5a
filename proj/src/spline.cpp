#include "dewet/spline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dewet {

void solve_moment_system(std::span<double> r) {
  // Thomas algorithm for tridiag(1, 4, 1).
  const std::size_t k = r.size();
  if (k == 0) return;
  std::vector<double> c(k);
  double b = 4.0;
  r[0] /= b;
  c[0] = 1.0 / b;
  for (std::size_t i = 1; i < k; ++i) {
    b = 4.0 - c[i - 1];
    c[i] = 1.0 / b;
    r[i] = (r[i] - r[i - 1]) / b;
  }
  for (std::size_t i = k - 1; i-- > 0;) r[i] -= c[i] * r[i + 1];
}

UniformSpline::UniformSpline(std::vector<double> values) : y_(std::move(values)) {
  if (y_.size() < 3) throw std::invalid_argument("UniformSpline: need at least 2 intervals");
  const int n = intervals();
  d_ = 1.0 / n;
  m_.assign(n + 1, 0.0);
  const double s = 6.0 * n * n;
  for (int j = 1; j < n; ++j) m_[j] = s * (y_[j - 1] - 2.0 * y_[j] + y_[j + 1]);
  solve_moment_system(std::span<double>(m_).subspan(1, n - 1));
}

UniformSpline::Segment UniformSpline::locate(double xi) const {
  const int n = intervals();
  if (!(xi > 0.0)) return {0, 0.0};
  if (xi >= 1.0) return {n - 1, 1.0};
  const double u = xi * n;
  int j = static_cast<int>(u);
  if (j >= n) j = n - 1;
  return {j, u - j};
}

std::array<double, 4> UniformSpline::eval(Segment seg) const {
  const int j = seg.index;
  const double t = seg.t, u = 1.0 - t, d = d_;
  const double y0 = y_[j], y1 = y_[j + 1], m0 = m_[j], m1 = m_[j + 1];
  const double s = u * y0 + t * y1 + d * d / 6.0 * ((u * u * u - u) * m0 + (t * t * t - t) * m1);
  const double s1 = (y1 - y0) / d + d / 6.0 * (-(3.0 * u * u - 1.0) * m0 + (3.0 * t * t - 1.0) * m1);
  const double s2 = u * m0 + t * m1;
  const double s3 = (m1 - m0) / d;
  return {s, s1, s2, s3};
}

double UniformSpline::integral() const {
  const int n = intervals();
  double trap = 0.0, mom = 0.0;
  for (int j = 0; j < n; ++j) {
    trap += 0.5 * (y_[j] + y_[j + 1]);
    mom += m_[j] + m_[j + 1];
  }
  return d_ * trap - d_ * d_ * d_ / 24.0 * mom;
}

double UniformSpline::max_abs_slope() const {
  double best = 0.0;
  const int n = intervals();
  for (int j = 0; j < n; ++j) {
    best = std::max({best, std::abs(eval({j, 0.0})[1]), std::abs(eval({j, 1.0})[1])});
    const double den = m_[j] - m_[j + 1];
    if (den != 0.0) {
      const double t = m_[j] / den;
      if (t > 0.0 && t < 1.0) best = std::max(best, std::abs(eval({j, t})[1]));
    }
  }
  return best;
}

const std::vector<double>& spline_integral_weights(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // integral = d*trap(y) - d^3/24 * sum_j c_j M_j, with c_j = 2 for interior knots.
  const double d = 1.0 / n;
  std::vector<double> w(n + 1, d);
  w[0] = w[n] = 0.5 * d;
  std::vector<double> z(n - 1, -d * d * d / 24.0 * 2.0);
  solve_moment_system(z);
  const double s = 6.0 * n * n;
  for (int j = 1; j < n; ++j) {
    const double zj = z[j - 1] * s;
    w[j - 1] += zj;
    w[j] -= 2.0 * zj;
    w[j + 1] += zj;
  }
  return cache.emplace(n, std::move(w)).first->second;
}

SplineAdjoint::SplineAdjoint(int n) : n_(n), d_(1.0 / n), dy_(n + 1, 0.0), dm_(n + 1, 0.0) {}

void SplineAdjoint::add(UniformSpline::Segment seg, double g0, double g1, double g2) {
  const int j = seg.index;
  const double t = seg.t, u = 1.0 - t, d = d_;
  dy_[j] += g0 * u - g1 / d;
  dy_[j + 1] += g0 * t + g1 / d;
  dm_[j] += g0 * d * d / 6.0 * (u * u * u - u) - g1 * d / 6.0 * (3.0 * u * u - 1.0) + g2 * u;
  dm_[j + 1] += g0 * d * d / 6.0 * (t * t * t - t) + g1 * d / 6.0 * (3.0 * t * t - 1.0) + g2 * t;
}

void SplineAdjoint::pull_back(std::span<double> dy) const {
  std::vector<double> z(dm_.begin() + 1, dm_.end() - 1);
  solve_moment_system(z);
  const double s = 6.0 * n_ * n_;
  for (int j = 0; j <= n_; ++j) dy[j] += dy_[j];
  for (int j = 1; j < n_; ++j) {
    const double zj = z[j - 1] * s;
    dy[j - 1] += zj;
    dy[j] -= 2.0 * zj;
    dy[j + 1] += zj;
  }
}

}  // namespace dewet
