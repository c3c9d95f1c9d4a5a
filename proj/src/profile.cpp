#include "dewet/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dewet {

Profile::Profile(double alpha, double beta, std::vector<double> h_nodes)
    : Profile(from_length(alpha, beta - alpha, std::move(h_nodes))) {}

Profile Profile::from_length(double alpha, double length, std::vector<double> h_nodes) {
  if (h_nodes.size() < 3) throw std::invalid_argument("Profile: need at least 2 intervals");
  Profile p;
  p.alpha_ = alpha;
  p.length_ = length;
  p.spline_ = UniformSpline(h_nodes);
  p.h_ = std::move(h_nodes);
  return p;
}

double Profile::nodal_lipschitz() const {
  double best = 0.0;
  const double dx = length_ / intervals();
  for (std::size_t j = 0; j + 1 < h_.size(); ++j) best = std::max(best, std::abs(h_[j + 1] - h_[j]) / dx);
  return best;
}

Profile Profile::mirrored(double center) const {
  std::vector<double> h(h_.rbegin(), h_.rend());
  return from_length(2.0 * center - beta(), length_, std::move(h));
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.passed ? "pass " : "FAIL ") << c.name << " margin=" << c.margin
       << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  return os.str();
}

ValidationReport validate_admissible(const Profile& p, const SimConfig& cfg) {
  ValidationReport r;
  auto add = [&](std::string name, double margin, std::string detail = {}) {
    r.checks.push_back({std::move(name), margin >= 0.0 && std::isfinite(margin), margin, std::move(detail)});
  };
  const auto& h = p.nodes();
  const bool interval_ok = p.length() > 0.0 && std::isfinite(p.length());
  add("interval", p.length());
  add("endpoints", -std::max(std::abs(h.front()), std::abs(h.back())));
  add("nonnegative", *std::min_element(h.begin(), h.end()));
  if (interval_ok) {
    add("lipschitz_nodal", cfg.lip0 - p.nodal_lipschitz());
    add("lipschitz", cfg.lip0 - p.lipschitz(), "interpolant extrema");
    const double err = std::abs(p.area() - cfg.area0);
    add("area", cfg.tol_mass * cfg.area0 - err, "relative error " + std::to_string(err / cfg.area0));
    add("support_floor", p.length() - cfg.min_support());
  } else {
    for (const char* n : {"lipschitz_nodal", "lipschitz", "area", "support_floor"})
      r.checks.push_back({n, false, -1.0, "degenerate interval"});
  }
  return r;
}

std::array<double, 4> derivatives_at(const Profile& p, double x) {
  const double L = p.length();
  auto s = p.spline().eval(p.spline().locate(p.xi(x)));
  return {s[0], s[1] / L, s[2] / (L * L), s[3] / (L * L * L)};
}

double extend_by_zero(const Profile& p, double x) {
  if (!(x >= p.alpha() && x <= p.beta())) return 0.0;
  return derivatives_at(p, x)[0];
}

double eval_derivatives(const Profile& p, double x, int order) {
  if (order < 0 || order > 3) throw std::domain_error("eval_derivatives: order must be 0..3");
  if (!(x >= p.alpha() && x <= p.beta())) throw std::domain_error("eval_derivatives: x outside [alpha, beta]");
  return derivatives_at(p, x)[order];
}

Profile scale_to_area(const Profile& p, double area) {
  const double a = p.area();
  if (!(a > 0.0)) throw std::domain_error("scale_to_area: nonpositive area");
  std::vector<double> h = p.nodes();
  for (auto& v : h) v *= area / a;
  return Profile::from_length(p.alpha(), p.length(), std::move(h));
}

Profile shift_to_area(const Profile& p, double area) {
  const int n = p.intervals();
  const auto& w = spline_integral_weights(n);
  double wi = 0.0;
  for (int j = 1; j < n; ++j) wi += w[j];
  std::vector<double> h = p.nodes();
  const double c = (area / p.length() - p.spline().integral()) / wi;
  for (int j = 1; j < n; ++j) h[j] += c;
  return Profile::from_length(p.alpha(), p.length(), std::move(h));
}

namespace shapes {

Profile circular_cap(double area, double theta, int n, double center) {
  if (!(theta > 0.0 && theta < 1.5707963267948966))
    throw std::domain_error("circular_cap: theta must lie in (0, pi/2)");
  const double R = std::sqrt(area / (theta - std::sin(theta) * std::cos(theta)));
  const double w = R * std::sin(theta), c = R * std::cos(theta);
  std::vector<double> h(n + 1, 0.0);
  for (int j = 1; j < n; ++j) {
    const double x = -w + 2.0 * w * j / n;
    h[j] = std::sqrt(R * R - x * x) - c;
  }
  return scale_to_area(Profile::from_length(center - w, 2.0 * w, std::move(h)), area);
}

Profile parabolic_cap(double half_width, double c, int n, double center) {
  std::vector<double> h(n + 1, 0.0);
  for (int j = 1; j < n; ++j) {
    const double s = -1.0 + 2.0 * j / n;
    h[j] = c * (1.0 - s * s);
  }
  return Profile::from_length(center - half_width, 2.0 * half_width, std::move(h));
}

Profile quartic_cap(double half_width, double area, int n, double center) {
  std::vector<double> h(n + 1, 0.0);
  for (int j = 1; j < n; ++j) {
    const double s = -1.0 + 2.0 * j / n;
    h[j] = (1.0 - s * s) * (1.0 - 0.2 * s * s);
  }
  return scale_to_area(Profile::from_length(center - half_width, 2.0 * half_width, std::move(h)), area);
}

Profile resample(const Profile& p, int n) {
  std::vector<double> h(n + 1, 0.0);
  for (int j = 1; j < n; ++j) h[j] = p.spline().value(static_cast<double>(j) / n);
  return Profile::from_length(p.alpha(), p.length(), std::move(h));
}

}  // namespace shapes

void write_profile(std::ostream& os, const Profile& p) {
  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << std::setprecision(17);
  o << "# alpha=" << p.alpha() << " beta=" << p.beta() << " n=" << p.intervals()
    << " length=" << p.length() << '\n';
  for (int j = 0; j <= p.intervals(); ++j) o << p.node_x(j) << ' ' << p.nodes()[j] << '\n';
  os << o.str();
}

Profile read_profile(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    throw std::runtime_error("read_profile: missing header");
  double alpha = 0.0, beta = 0.0, length = std::nan("");
  int n = -1;
  {
    std::istringstream hs(line.substr(1));
    hs.imbue(std::locale::classic());
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
      std::istringstream vs(v);
      vs.imbue(std::locale::classic());
      if (k == "alpha") vs >> alpha;
      else if (k == "beta") vs >> beta;
      else if (k == "n") vs >> n;
      else if (k == "length") vs >> length;
    }
  }
  if (n < 2) throw std::runtime_error("read_profile: bad header '" + line + "'");
  std::vector<double> h;
  h.reserve(n + 1);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double x = 0.0, v = 0.0;
    if (!(ls >> x >> v)) throw std::runtime_error("read_profile: bad row '" + line + "'");
    h.push_back(v);
  }
  if (static_cast<int>(h.size()) != n + 1) throw std::runtime_error("read_profile: row count does not match n");
  if (std::isnan(length)) length = beta - alpha;
  return Profile::from_length(alpha, length, std::move(h));
}

void save_profile(const std::string& path, const Profile& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_profile(os, p);
}

Profile load_profile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_profile(is);
}

}  // namespace dewet
