#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dewet::svg {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-300) {
      const double d = std::max(std::abs(lo), 1.0) * 1e-3;
      lo -= d;
      hi += d;
    }
  }
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

void draw_panel(std::ostringstream& os, const Panel& p, double ox, double oy, double w, double h) {
  const double ml = 64, mr = 12, mt = 28, mb = 40;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto ty = [&](double v) { return p.log_y ? (v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN()) : v; };
  Range rx, ry;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      rx.add(s.x[i]);
      ry.add(ty(s.y[i]));
    }
  rx.pad();
  ry.pad();
  auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double v) { return oy + mt + ph - (ty(v) - ry.lo) / (ry.hi - ry.lo) * ph; };

  os << "<rect x='" << ox + ml << "' y='" << oy + mt << "' width='" << pw << "' height='" << ph
     << "' fill='none' stroke='#444'/>\n";
  os << "<text x='" << ox + ml + pw / 2 << "' y='" << oy + 18 << "' text-anchor='middle' font-size='13'>"
     << escape(p.title) << "</text>\n";
  os << "<text x='" << ox + ml + pw / 2 << "' y='" << oy + h - 6 << "' text-anchor='middle' font-size='11'>"
     << escape(p.xlabel) << "</text>\n";
  os << "<text x='" << ox + 12 << "' y='" << oy + mt + ph / 2 << "' text-anchor='middle' font-size='11' transform='rotate(-90 "
     << ox + 12 << ' ' << oy + mt + ph / 2 << ")'>" << escape(p.ylabel) << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = rx.lo + (rx.hi - rx.lo) * k / 4.0, fy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    const double px = ox + ml + pw * k / 4.0, py = oy + mt + ph - ph * k / 4.0;
    os << "<text x='" << px << "' y='" << oy + mt + ph + 14 << "' text-anchor='middle' font-size='9'>" << num(fx)
       << "</text>\n";
    os << "<text x='" << ox + ml - 4 << "' y='" << py + 3 << "' text-anchor='end' font-size='9'>"
       << (p.log_y ? "1e" + num(fy) : num(fy)) << "</text>\n";
  }
  int legend = 0;
  for (const auto& s : p.series) {
    os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='" << s.width << "' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double py = Y(s.y[i]);
      if (!std::isfinite(py)) continue;
      os << num(X(s.x[i])) << ',' << num(py) << ' ';
    }
    os << "'/>\n";
    if (!s.label.empty()) {
      const double ly = oy + mt + 12 + 13 * legend++;
      os << "<line x1='" << ox + ml + pw - 90 << "' y1='" << ly - 4 << "' x2='" << ox + ml + pw - 74 << "' y2='" << ly - 4
         << "' stroke='" << s.color << "' stroke-width='2'/>\n";
      os << "<text x='" << ox + ml + pw - 70 << "' y='" << ly << "' font-size='10'>" << escape(s.label) << "</text>\n";
    }
  }
}

}  // namespace

std::string ramp(int i, int n) {
  const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
  const int r = static_cast<int>(40 + 200 * t), b = static_cast<int>(220 - 180 * t), g = 60;
  std::ostringstream os;
  os << "rgb(" << r << ',' << g << ',' << b << ')';
  return os.str();
}

std::string render(const std::vector<Panel>& panels, int cols, double panel_w, double panel_h) {
  const int rows = static_cast<int>((panels.size() + cols - 1) / cols);
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << cols * panel_w << "' height='" << rows * panel_h
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t k = 0; k < panels.size(); ++k)
    draw_panel(os, panels[k], (k % cols) * panel_w, (k / cols) * panel_h, panel_w, panel_h);
  os << "</svg>\n";
  return os.str();
}

}  // namespace dewet::svg
