#include "shiftspec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shiftspec {

namespace {

constexpr double kSide = 512.0;
constexpr double kCenter = kSide / 2.0;
constexpr double kDrawRadius = 0.9 * kCenter;

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

void circle(std::ostream& os, double r, const std::string& style) {
  os << "  <circle cx=\"" << num(kCenter) << "\" cy=\"" << num(kCenter) << "\" r=\"" << num(r)
     << "\" " << style << "/>\n";
}

void annulus(std::ostream& os, double r_in, double r_out, const std::string& fill) {
  // Even-odd fill between two full circles.
  os << "  <path fill-rule=\"evenodd\" fill=\"" << fill << "\" d=\"";
  for (double r : {r_out, r_in}) {
    os << "M " << num(kCenter - r) << " " << num(kCenter) << " a " << num(r) << " " << num(r)
       << " 0 1 0 " << num(2 * r) << " 0 a " << num(r) << " " << num(r) << " 0 1 0 "
       << num(-2 * r) << " 0 ";
  }
  os << "\"/>\n";
}

}  // namespace

std::string render_spectrum_svg(const SpectrumDescription& s) {
  const double rmax = std::max(s.radius, 1e-12);
  const double scale = kDrawRadius / rmax;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" "
        "viewBox=\"0 0 512 512\">\n";
  os << "  <rect width=\"512\" height=\"512\" fill=\"#ffffff\"/>\n";
  circle(os, kDrawRadius, "fill=\"none\" stroke=\"#dddddd\" stroke-dasharray=\"4 4\"");
  if (s.disk_radius && *s.disk_radius > 0.0)
    circle(os, *s.disk_radius * scale, "fill=\"#4878cf\" fill-opacity=\"0.55\"");
  for (const auto& ring : s.rings) {
    if (ring.r_plus - ring.r_minus < 1e-9 * rmax) {
      circle(os, ring.r_plus * scale,
             "fill=\"none\" stroke=\"#d65f5f\" stroke-width=\"2.5\"");
    } else {
      annulus(os, ring.r_minus * scale, ring.r_plus * scale, "#d65f5f");
    }
  }
  os << "  <circle cx=\"" << num(kCenter) << "\" cy=\"" << num(kCenter)
     << "\" r=\"1.5\" fill=\"#000000\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_pseudospectrum_svg(const PseudospectrumReport& rep) {
  const double scale = kDrawRadius / rep.bound;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" "
        "viewBox=\"0 0 512 512\">\n";
  os << "  <rect width=\"512\" height=\"512\" fill=\"#ffffff\"/>\n";
  const double dth = rep.angles.size() > 1 ? rep.angles[1] - rep.angles[0] : 2 * M_PI;
  for (const auto& pt : rep.points) {
    const char* color = pt.verdict == Verdict::in      ? "#4878cf"
                        : pt.verdict == Verdict::out   ? "#f2f2f2"
                                                       : "#f0c674";
    const double r = pt.radius * scale;
    const double x = kCenter + r * std::cos(pt.angle);
    const double y = kCenter - r * std::sin(pt.angle);
    const double size = std::max(1.5, 0.6 * r * dth);
    os << "  <circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(size / 2)
       << "\" fill=\"" << color << "\"/>\n";
  }
  for (const auto& ring : rep.prediction.rings) {
    circle(os, ring.r_minus * scale, "fill=\"none\" stroke=\"#d65f5f\" stroke-width=\"1\"");
    circle(os, ring.r_plus * scale, "fill=\"none\" stroke=\"#d65f5f\" stroke-width=\"1\"");
  }
  if (rep.prediction.disk_radius)
    circle(os, *rep.prediction.disk_radius * scale,
           "fill=\"none\" stroke=\"#d65f5f\" stroke-width=\"1\"");
  os << "</svg>\n";
  return os.str();
}

}  // namespace shiftspec
