#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dewet/config.hpp"
#include "dewet/spline.hpp"

namespace dewet {

/// One surface state: contact points and nodal heights on a uniform grid
/// mapped affinely onto [alpha, beta]. Stored as (alpha, length) so that
/// translations leave the length bit-identical.
class Profile {
public:
  Profile() = default;
  Profile(double alpha, double beta, std::vector<double> h_nodes);
  static Profile from_length(double alpha, double length, std::vector<double> h_nodes);

  double alpha() const { return alpha_; }
  double beta() const { return alpha_ + length_; }
  double length() const { return length_; }
  int intervals() const { return spline_.intervals(); }
  const std::vector<double>& nodes() const { return h_; }
  const UniformSpline& spline() const { return spline_; }

  double node_x(int j) const { return alpha_ + length_ * j / intervals(); }
  /// Reference coordinate (x - alpha) / length.
  double xi(double x) const { return (x - alpha_) / length_; }

  /// Spline area.
  double area() const { return length_ * spline_.integral(); }
  /// Lipschitz constant of the interpolant.
  double lipschitz() const { return spline_.max_abs_slope() / length_; }
  /// max_j |h_{j+1} - h_j| / dx.
  double nodal_lipschitz() const;

  Profile translated(double dx) const { return from_length(alpha_ + dx, length_, h_); }
  Profile mirrored(double center) const;

private:
  double alpha_ = 0.0, length_ = 0.0;
  std::vector<double> h_;
  UniformSpline spline_;
};

struct Check {
  std::string name;
  bool passed;
  double margin;  ///< positive when satisfied
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool ok() const;
  const Check* find(const std::string& name) const;
  std::string summary() const;
};

/// Report-only membership test for the admissible class.
ValidationReport validate_admissible(const Profile& p, const SimConfig& cfg);

/// Interpolated height on [alpha, beta], zero outside.
double extend_by_zero(const Profile& p, double x);

/// h, h', h'' or h''' of the interpolant; throws std::domain_error outside [alpha, beta].
double eval_derivatives(const Profile& p, double x, int order);

/// All four derivatives at x in [alpha, beta] (no domain check).
std::array<double, 4> derivatives_at(const Profile& p, double x);

/// Rescales interior nodes so the spline area equals `area`.
Profile scale_to_area(const Profile& p, double area);
/// Adds a constant to interior nodes so the spline area equals `area`.
Profile shift_to_area(const Profile& p, double area);

namespace shapes {
/// Circular cap with contact angle `theta` in (0, pi/2) and spline area `area`.
Profile circular_cap(double area, double theta, int n, double center = 0.0);
/// h = c (1 - s^2) on [center - w, center + w], s = (x - center)/w.
Profile parabolic_cap(double half_width, double c, int n, double center = 0.0);
/// h = c (1 - s^2)(1 - s^2/5): zero curvature at both contact points.
/// Scaled to the given area.
Profile quartic_cap(double half_width, double area, int n, double center = 0.0);
/// Resamples `p` on a grid of n intervals over the same support.
Profile resample(const Profile& p, int n);
}  // namespace shapes

/// Header `# alpha beta n` then rows `x h`, 17 significant digits.
void write_profile(std::ostream& os, const Profile& p);
Profile read_profile(std::istream& is);
void save_profile(const std::string& path, const Profile& p);
Profile load_profile(const std::string& path);

}  // namespace dewet
