#pragma once

#include <utility>
#include <vector>

#include "dewet/profile.hpp"

namespace dewet {

double slope_factor(const Profile& p, double x);
double curvature(const Profile& p, double x);
double arc_length(const Profile& p, double x);
/// Inverse of arc_length by safeguarded Newton.
double x_at_arc_length(const Profile& p, double s);

/// (theta_alpha, theta_beta) with theta = arcsin(h'/J).
std::pair<double, double> contact_angles(const Profile& p);

enum class Side { left, right };

/// Corner flattening data. Local coordinate x is the distance from the
/// contact point into the film, so the corner sits at x = 0.
struct CornerMap {
  Side side = Side::left;
  double r = 0.0;
  double l = 0.0;  ///< |h'| at the contact point
  std::vector<double> x_samples, sigma_samples;

  double sigma_dev = 0.0;  ///< max |sigma - 1|
  double sigma_d1 = 0.0;   ///< max |sigma'|
  double y_sigma_d1 = 0.0; ///< sup over the corner region of |y sigma'|
  double y_sigma_d2 = 0.0; ///< sup over the corner region of |y sigma''|

  /// sigma and its first two derivatives at local x in [0, r].
  std::array<double, 3> sigma(double x) const;
  /// Phi(x, y) = (x, y / sigma(x)).
  std::pair<double, double> flatten(double x, double y) const;
  /// Psi(x, y) = (x, y sigma(x)).
  std::pair<double, double> unflatten(double x, double y) const;

  Profile profile;
};

/// sigma = l x / g and two derivatives from the height g(x) and its derivatives.
std::array<double, 3> corner_sigma(double l, double x, double g, double g1, double g2);

/// Throws std::domain_error when sigma leaves [1/2, 3/2] or the corner slope vanishes.
CornerMap build_corner_map(const Profile& p, Side side, double r);
/// r = (beta - alpha)/16, halved until the sigma band holds.
double default_corner_radius(const Profile& p);

}  // namespace dewet
