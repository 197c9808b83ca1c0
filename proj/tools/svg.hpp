#pragma once

// Minimal self-contained SVG plotter for the CLI: polylines and point
// markers over linear or log10 axes. No timestamps or external resources,
// so identical inputs render byte-identical files.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> pts;
  bool markers = false;
};

class Plot {
 public:
  Plot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
       bool logy = false)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
        logx_(logx), logy_(logy) {}

  void add(Series s) { series_.push_back(std::move(s)); }

  std::string render() const {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series_) {
      for (auto [x, y] : s.pts) {
        double tx = tx_(x), ty = ty_(y);
        if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
        xmin = std::min(xmin, tx);
        xmax = std::max(xmax, tx);
        ymin = std::min(ymin, ty);
        ymax = std::max(ymax, ty);
      }
    }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    double padx = 0.04 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

    const double W = 760, H = 560, ml = 72, mr = 20, mt = 40, mb = 52;
    auto px = [&](double tx) { return ml + (tx - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double ty) { return H - mb - (ty - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ostringstream o;
    o.precision(10);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    o << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"15\">" << escape(title_) << "</text>\n";

    // frame + ticks
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
      << H - mt - mb << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : ticks(xmin, xmax)) {
      double x = px(t);
      o << "<line x1=\"" << x << "\" y1=\"" << H - mb << "\" x2=\"" << x << "\" y2=\""
        << H - mb + 5 << "\" stroke=\"#333\"/>\n";
      o << "<text x=\"" << x << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, logx_) << "</text>\n";
    }
    for (double t : ticks(ymin, ymax)) {
      double y = py(t);
      o << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
        << "\" stroke=\"#333\"/>\n";
      o << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t, logy_) << "</text>\n";
    }
    o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(xlabel_) << "</text>\n";
    o << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
      << " transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">" << escape(ylabel_)
      << "</text>\n";

    int li = 0;
    for (const auto& s : series_) {
      std::ostringstream path;
      bool any = false;
      for (auto [x, y] : s.pts) {
        double tx = tx_(x), ty = ty_(y);
        if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
        path << (any ? " " : "") << px(tx) << "," << py(ty);
        any = true;
      }
      if (any) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\""
          << " points=\"" << path.str() << "\"/>\n";
      }
      if (s.markers) {
        for (auto [x, y] : s.pts) {
          double tx = tx_(x), ty = ty_(y);
          if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
          o << "<circle cx=\"" << px(tx) << "\" cy=\"" << py(ty) << "\" r=\"2.4\" fill=\""
            << s.color << "\"/>\n";
        }
      }
      if (!s.label.empty()) {
        double lx = ml + 12, ly = mt + 18 + 16 * li++;
        o << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\""
          << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << lx + 28 << "\" y=\"" << ly
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
      }
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  double tx_(double x) const { return logx_ ? std::log10(x) : x; }
  double ty_(double y) const { return logy_ ? std::log10(y) : y; }

  static std::vector<double> ticks(double lo, double hi) {
    double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    if (span / step > 10) step *= 2;
    if (span / step > 10) step *= 2.5;
    std::vector<double> out;
    double t0 = std::ceil(lo / step) * step;
    for (double t = t0; t <= hi + 1e-12 * span && out.size() < 24; t += step) out.push_back(t);
    return out;
  }

  static std::string tick_label(double t, bool logscale) {
    std::ostringstream o;
    if (logscale) {
      o << "1e" << (std::abs(t - std::round(t)) < 1e-9 ? std::to_string((long)std::llround(t))
                                                       : format(t));
    } else {
      o << format(t);
    }
    return o.str();
  }

  static std::string format(double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else if (c == '&') out += "&amp;";
      else out += c;
    }
    return out;
  }

  std::string title_, xlabel_, ylabel_;
  bool logx_, logy_;
  std::vector<Series> series_;
};

}  // namespace svg
