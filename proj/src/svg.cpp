#include "herald/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "herald/qcore.hpp"

namespace herald {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double raw) {
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  if (f <= 1.0) return mag;
  if (f <= 2.0) return 2.0 * mag;
  if (f <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double step = nice_step((hi - lo) / std::max(target - 1, 1));
  std::vector<double> t;
  const double start = std::ceil(lo / step - 1e-9) * step;
  for (int i = 0;; ++i) {
    double v = start + i * step;
    if (v > hi + step * 1e-9) break;
    if (std::abs(v) < step * 1e-9) v = 0.0;
    t.push_back(v);
  }
  return t;
}

std::string render_svg(const std::vector<Series>& series, const SvgStyle& style) {
  if (series.empty()) throw InvalidArgument("render_svg: no series");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.xs.size() != s.ys.size()) throw InvalidArgument("render_svg: series '" + s.label + "' has mismatched lengths");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (std::isnan(s.xs[i]) || std::isnan(s.ys[i])) throw InvalidArgument("render_svg: NaN in series '" + s.label + "'");
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      xlo = std::min(xlo, s.xs[i]);
      xhi = std::max(xhi, s.xs[i]);
      ylo = std::min(ylo, s.ys[i]);
      yhi = std::max(yhi, s.ys[i]);
      ++points;
    }
  }
  if (points == 0) throw InvalidArgument("render_svg: no finite points");
  auto widen = [](double& lo, double& hi) {
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.1, 0.5);
      lo -= pad;
      hi += pad;
    }
  };
  widen(xlo, xhi);
  widen(ylo, yhi);
  const auto xt = nice_ticks(xlo, xhi);
  const auto yt = nice_ticks(ylo, yhi);
  xlo = std::min(xlo, xt.front());
  xhi = std::max(xhi, xt.back());
  ylo = std::min(ylo, yt.front());
  yhi = std::max(yhi, yt.back());

  const double W = style.width, H = style.height;
  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return top + ph - (y - ylo) / (yhi - ylo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
    << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    o << "<text x=\"" << fmt("%.2f", left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(style.title) << "</text>\n";
  }
  o << "<rect x=\"" << fmt("%.2f", left) << "\" y=\"" << fmt("%.2f", top) << "\" width=\"" << fmt("%.2f", pw)
    << "\" height=\"" << fmt("%.2f", ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : xt) {
    const std::string x = fmt("%.2f", px(t));
    o << "<line x1=\"" << x << "\" y1=\"" << fmt("%.2f", top + ph) << "\" x2=\"" << x << "\" y2=\""
      << fmt("%.2f", top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << x << "\" y=\"" << fmt("%.2f", top + ph + 18) << "\" text-anchor=\"middle\">"
      << fmt("%.4g", t) << "</text>\n";
  }
  for (double t : yt) {
    const std::string y = fmt("%.2f", py(t));
    o << "<line x1=\"" << fmt("%.2f", left - 5) << "\" y1=\"" << y << "\" x2=\"" << fmt("%.2f", left) << "\" y2=\""
      << y << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt("%.2f", left - 8) << "\" y=\"" << fmt("%.2f", py(t) + 4) << "\" text-anchor=\"end\">"
      << fmt("%.4g", t) << "</text>\n";
  }
  o << "<text x=\"" << fmt("%.2f", left + pw / 2) << "\" y=\"" << fmt("%.2f", H - 10)
    << "\" text-anchor=\"middle\">" << escape(style.x_label) << "</text>\n";
  o << "<text x=\"15\" y=\"" << fmt("%.2f", top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << fmt("%.2f", top + ph / 2) << ")\">" << escape(style.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += fmt("%.2f", px(s.xs[i])) + "," + fmt("%.2f", py(s.ys[i]));
    }
    if (style.lines && pts.find(' ') != std::string::npos) {
      o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      o << "<circle cx=\"" << fmt("%.2f", px(s.xs[i])) << "\" cy=\"" << fmt("%.2f", py(s.ys[i]))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 10 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << fmt("%.2f", left + pw + 15) << "\" y1=\"" << fmt("%.2f", ly) << "\" x2=\""
      << fmt("%.2f", left + pw + 35) << "\" y2=\"" << fmt("%.2f", ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fmt("%.2f", left + pw + 40) << "\" y=\"" << fmt("%.2f", ly + 4) << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace herald
