#pragma once

// Energy integrals in step-local coordinates X = x - alpha_prev, with
// gradients with respect to nodal heights and the two contact offsets.

#include <span>
#include <vector>

#include "dewet/config.hpp"
#include "dewet/spline.hpp"

namespace dewet::kernel {

/// Spline placed on [offset, offset + length].
struct Shape {
  const UniformSpline* spline;
  double offset;
  double length;

  double xi(double X) const { return (X - offset) / length; }
  double node(int j) const { return offset + length * j / spline->intervals(); }
};

/// Gradient container: d/dy_j, d/d(offset), d/d(offset + length).
struct Grad {
  std::vector<double> dy;
  double da = 0.0, db = 0.0;
  explicit Grad(int n = 0) : dy(n + 1, 0.0) {}
  void clear();
  void axpy(double s, const Grad& g);
};

/// Piecewise-linear function of X with constant extension.
struct Piecewise {
  std::vector<double> x, v;
  double operator()(double X) const;
  bool empty() const { return x.empty(); }
};

/// S = gamma int J - gamma0 L + nu0/2 int h''^2 / J^5.
/// `bending_only` returns just the last term.
double surface(const Shape& s, const SimConfig& cfg, Grad* g, bool bending_only = false);

/// (1/2tau) int_0^{L0} (h - h0)^2 / J0 dX (contact terms excluded).
double metric_bulk(const Shape& cur, const Shape& prev, double tau, Grad* g);

/// (1/tau) int_0^{L0} |h - h0| dX.
double metric_l1(const Shape& cur, const Shape& prev, double tau);

/// int w(X) h(X) dX over the support of cur.
double coupling(const Shape& cur, const Piecewise& w, Grad* g);

/// int (h_a - h_b)^2 dX over the union of supports.
double l2_distance_sq(const Shape& a, const Shape& b);

/// Sorted union of breakpoints clipped to [lo, hi], including lo and hi.
std::vector<double> panels(double lo, double hi, std::initializer_list<const Shape*> shapes,
                           const std::vector<double>* extra = nullptr);

}  // namespace dewet::kernel
