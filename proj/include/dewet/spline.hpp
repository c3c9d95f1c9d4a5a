#pragma once

#include <array>
#include <span>
#include <vector>

namespace dewet {

/// Natural cubic spline through values y_j at xi_j = j/n on [0, 1].
/// Derivatives are taken with respect to xi.
class UniformSpline {
public:
  UniformSpline() = default;
  explicit UniformSpline(std::vector<double> values);

  int intervals() const { return static_cast<int>(y_.size()) - 1; }
  double spacing() const { return d_; }
  std::span<const double> values() const { return y_; }
  /// Knot second derivatives; zero at both ends.
  std::span<const double> moments() const { return m_; }

  struct Segment {
    int index;  ///< interval [xi_index, xi_index+1]
    double t;   ///< local coordinate in [0, 1]
  };
  /// Interval lookup, clamping xi to [0, 1].
  Segment locate(double xi) const;

  /// s, s', s'', s''' at a segment point.
  std::array<double, 4> eval(Segment seg) const;
  double value(double xi) const { return eval(locate(xi))[0]; }

  /// Exact integral over [0, 1].
  double integral() const;
  /// max |s'| over [0, 1], using per-interval extrema of the quadratic s'.
  double max_abs_slope() const;

private:
  std::vector<double> y_, m_;
  double d_ = 0.0;
};

/// Solves the [1 4 1] system of the natural spline in place (interior rows).
void solve_moment_system(std::span<double> rhs);

/// Weights w_j with integral() == sum_j w_j y_j.
const std::vector<double>& spline_integral_weights(int n);

/// Accumulates dG/ds, dG/ds', dG/ds'' at segment points and pulls them back
/// to dG/dy through the moment solve.
class SplineAdjoint {
public:
  explicit SplineAdjoint(int n);
  void add(UniformSpline::Segment seg, double g0, double g1, double g2);
  /// Adds the pulled-back gradient into `dy` (size n+1).
  void pull_back(std::span<double> dy) const;

private:
  int n_;
  double d_;
  std::vector<double> dy_, dm_;
};

}  // namespace dewet
