#pragma once

#include <span>

namespace dewet {

/// Gauss-Legendre rule on [0, 1] with `points` nodes (1..12).
struct GaussRule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

GaussRule gauss_rule(int points);

/// Composite Gauss integral of f over [a, b] split into `panels` equal pieces.
template <class F>
double integrate(F&& f, double a, double b, int panels, int points = 6) {
  const GaussRule g = gauss_rule(points);
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + p * w;
    double part = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) part += g.weights[q] * f(x0 + g.nodes[q] * w);
    sum += part * w;
  }
  return sum;
}

}  // namespace dewet
