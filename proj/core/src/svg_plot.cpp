#include "invobs/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace invobs {

namespace {

constexpr double kWidth = 900, kPanelH = 260, kLeft = 80, kRight = 170, kTop = 40, kGap = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

std::string tick(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

double yval(double y, bool log_y) {
  if (!log_y) return y;
  return std::log10(std::max(std::abs(y), 1e-16));
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<PlotPanel>& panels) {
  const double H = kTop + panels.size() * (kPanelH + kGap);
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(H) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + esc(title) + "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& pn = panels[p];
    const double y0 = kTop + p * (kPanelH + kGap) + 20;
    const double pw = kWidth - kLeft - kRight, ph = kPanelH - 20;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& sr : pn.series)
      for (std::size_t i = 0; i < sr.x.size(); ++i) {
        const double yv = yval(sr.y[i], pn.log_y);
        if (!std::isfinite(yv) || !std::isfinite(sr.x[i])) continue;
        xmin = std::min(xmin, sr.x[i]);
        xmax = std::max(xmax, sr.x[i]);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    if (!(xmax > xmin)) { xmin = 0; xmax = 1; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }
    auto X = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return y0 + ph - (y - ymin) / (ymax - ymin) * ph; };

    s += "<text x=\"" + num(kLeft) + "\" y=\"" + num(y0 - 6) + "\" font-size=\"13\">" + esc(pn.title) +
         (pn.log_y ? " (log10 |.|)" : "") + "</text>\n";
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(y0) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
      s += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(y0 + ph + 14) + "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
      s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(Y(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
      s += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(Y(yv)) + "\" y2=\"" + num(Y(yv)) +
           "\" stroke=\"#ddd\"/>\n";
    }
    for (std::size_t k = 0; k < pn.series.size(); ++k) {
      const auto& sr = pn.series[k];
      const char* col = kColors[k % 8];
      const std::size_t stride = std::max<std::size_t>(1, sr.x.size() / 2000);
      s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < sr.x.size(); i += stride) {
        const double yv = yval(sr.y[i], pn.log_y);
        if (!std::isfinite(yv)) continue;
        s += num(X(sr.x[i])) + "," + num(Y(yv)) + " ";
      }
      s += "\"/>\n";
      const double ly = y0 + 14 + 16 * k;
      s += "<line x1=\"" + num(kLeft + pw + 12) + "\" x2=\"" + num(kLeft + pw + 32) + "\" y1=\"" + num(ly - 4) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
      s += "<text x=\"" + num(kLeft + pw + 38) + "\" y=\"" + num(ly) + "\">" + esc(sr.label) + "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace invobs
