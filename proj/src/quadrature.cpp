#include "dewet/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dewet {

namespace {

struct Table {
  std::array<std::vector<double>, 13> x, w;
  Table() {
    for (int n = 1; n <= 12; ++n) {
      x[n].resize(n);
      w[n].resize(n);
      for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0, p1 = z;
          for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (z * p1 - p0) / (z * z - 1.0);
          const double dz = p1 / dp;
          z -= dz;
          if (std::abs(dz) < 1e-16) break;
        }
        {
          double p0 = 1.0, p1 = z;
          for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        // Map [-1,1] -> [0,1], ascending order.
        x[n][n - 1 - i] = 0.5 * (1.0 + z);
        w[n][n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
      }
    }
  }
};

const Table& table() {
  static const Table t;
  return t;
}

}  // namespace

GaussRule gauss_rule(int points) {
  if (points < 1 || points > 12) throw std::invalid_argument("gauss_rule: points must be in 1..12");
  const Table& t = table();
  return {t.x[points], t.w[points]};
}

}  // namespace dewet
