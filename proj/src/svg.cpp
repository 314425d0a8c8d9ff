#include "cellflow/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cellflow/io.hpp"

namespace cellflow::svg {

namespace {

using io::format_double;

// Two decimals are plenty for drawing coordinates and keep files small.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& out, double width, double height) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void title_text(std::ostringstream& out, double x, double y, const std::string& title) {
  out << "<text x=\"" << num(x) << "\" y=\"" << num(y)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
}

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();
  void add(Vec2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  bool empty() const { return !(x1 >= x0); }
};

}  // namespace

std::string ramp_colour(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops = {{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(k);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

std::string msd_plot(const MsdSeries& series, const std::string& title, bool has_fit) {
  const double W = 520, H = 400, left = 70, right = 20, top = 40, bottom = 55;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (series.values[i] > 0.0 && series.abscissae[i] > 0.0) {
      pts.emplace_back(std::log10(series.abscissae[i]), std::log10(series.values[i]));
    }
  }
  std::ostringstream out;
  open_svg(out, W, H);
  title_text(out, W / 2, 22, title);
  if (pts.empty()) {
    out << "</svg>\n";
    return out.str();
  }
  double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  x0 = std::floor(x0 * 2) / 2 - 0.1;
  x1 = std::ceil(x1 * 2) / 2 + 0.1;
  y0 = std::floor(y0 * 2) / 2 - 0.1;
  y1 = std::ceil(y1 * 2) / 2 + 0.1;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto sy = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  out << "<g stroke=\"#888\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(H - bottom) << "\" x2=\"" << num(W - right) << "\" y2=\""
      << num(H - bottom) << "\"/>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(H - bottom)
      << "\"/>\n</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double d = std::ceil(x0); d <= x1; d += 1.0) {
    out << "<text x=\"" << num(sx(d)) << "\" y=\"" << num(H - bottom + 16) << "\" text-anchor=\"middle\">1e"
        << static_cast<int>(d) << "</text>\n";
  }
  for (double d = std::ceil(y0); d <= y1; d += 1.0) {
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(d) + 4) << "\" text-anchor=\"end\">1e"
        << static_cast<int>(d) << "</text>\n";
  }
  out << "<text x=\"" << num((left + W - right) / 2) << "\" y=\"" << num(H - 12)
      << "\" text-anchor=\"middle\">lag time (min)</text>\n";
  out << "<text x=\"16\" y=\"" << num((top + H - bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((top + H - bottom) / 2) << ")\">MSD (µm²)</text>\n</g>\n";

  out << "<g fill=\"#1f77b4\">\n";
  for (const auto& [x, y] : pts) out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\"/>\n";
  out << "</g>\n";
  if (has_fit) {
    // ln ρ = α ln t + c  ⇔  log10 ρ = α log10 t + c / ln 10
    const double c10 = series.intercept / std::log(10.0);
    const double ax = pts.front().first, bx = pts.back().first;
    out << "<line x1=\"" << num(sx(ax)) << "\" y1=\"" << num(sy(series.alpha * ax + c10)) << "\" x2=\"" << num(sx(bx))
        << "\" y2=\"" << num(sy(series.alpha * bx + c10)) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(left + 12) << "\" y=\"" << num(top + 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">alpha = " << format_double(series.alpha)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string track_plot(const std::vector<TrackLayer>& layers, const std::string& title) {
  Bounds b;
  for (const auto& layer : layers) {
    for (const auto& line : layer.lines) {
      for (const auto& p : line) b.add(p);
    }
  }
  const double pad = 20, top = 36;
  double scale = 1.0;
  double W = 400, H = 300;
  if (!b.empty()) {
    const double span = std::max({b.x1 - b.x0, b.y1 - b.y0, 1e-9});
    scale = 760.0 / span;
    W = (b.x1 - b.x0) * scale + 2 * pad;
    H = (b.y1 - b.y0) * scale + 2 * pad + top;
  }
  std::ostringstream out;
  open_svg(out, std::max(W, 200.0), H);
  title_text(out, std::max(W, 200.0) / 2, 22, title);
  for (const auto& layer : layers) {
    out << "<g fill=\"none\" stroke=\"" << layer.colour << "\" stroke-width=\"" << num(layer.width) << "\">\n";
    for (const auto& line : layer.lines) {
      if (line.empty()) continue;
      out << "<polyline points=\"";
      for (std::size_t i = 0; i < line.size(); ++i) {
        out << (i ? " " : "") << num(pad + (line[i].x - b.x0) * scale) << ',' << num(top + pad + (line[i].y - b.y0) * scale);
      }
      out << "\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string quiver_plot(const VectorField& field, const DomainMask& mask, std::size_t stride, const std::string& title) {
  if (stride == 0) stride = 1;
  const double cell = 8.0;  // drawing units per grid cell
  const double top = 36;
  const double W = static_cast<double>(mask.cols) * cell;
  const double H = static_cast<double>(mask.rows) * cell + top;
  double vmax = 0.0;
  for (std::size_t v = 0; v < field.speed.size(); ++v) {
    if (field.valid[v]) vmax = std::max(vmax, field.speed[v]);
  }
  std::ostringstream out;
  open_svg(out, std::max(W, 200.0), H);
  title_text(out, std::max(W, 200.0) / 2, 22, title);
  out << "<g fill=\"#eeeeee\" stroke=\"none\">\n";
  for (std::size_t j = 0; j < mask.rows; ++j) {
    for (std::size_t i = 0; i < mask.cols; ++i) {
      if (!mask.contains(static_cast<long>(i), static_cast<long>(j))) continue;
      out << "<rect x=\"" << num(i * cell) << "\" y=\"" << num(top + j * cell) << "\" width=\"" << num(cell)
          << "\" height=\"" << num(cell) << "\"/>\n";
    }
  }
  out << "</g>\n<g stroke-width=\"1.2\">\n";
  const double arrow = cell * static_cast<double>(stride) * 0.9;
  for (std::size_t vj = 0; vj < field.vertex_rows; vj += stride) {
    for (std::size_t vi = 0; vi < field.vertex_cols; vi += stride) {
      const std::size_t v = vj * field.vertex_cols + vi;
      if (!field.valid[v] || !(field.speed[v] > 0.0) || !(vmax > 0.0)) continue;
      const Vec2 d = field.vectors[v] / field.speed[v];
      const double len = arrow * (0.3 + 0.7 * field.speed[v] / vmax);
      const double x0 = vi * cell, y0 = top + vj * cell;
      const double x1 = x0 + d.x * len, y1 = y0 + d.y * len;
      const Vec2 back = d * (-0.35 * len);
      const Vec2 side = perp(d) * (0.2 * len);
      const std::string colour = ramp_colour(field.speed[v] / vmax);
      out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
          << "\" stroke=\"" << colour << "\"/>";
      out << "<polygon points=\"" << num(x1) << ',' << num(y1) << ' ' << num(x1 + back.x + side.x) << ','
          << num(y1 + back.y + side.y) << ' ' << num(x1 + back.x - side.x) << ',' << num(y1 + back.y - side.y)
          << "\" fill=\"" << colour << "\" stroke=\"none\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string heatmap(const ScalarField& field, const std::string& title) {
  const double cell = 6.0, top = 36;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : field.values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double W = static_cast<double>(field.vertex_cols) * cell;
  const double H = static_cast<double>(field.vertex_rows) * cell + top + 24;
  std::ostringstream out;
  open_svg(out, std::max(W, 200.0), H);
  title_text(out, std::max(W, 200.0) / 2, 22, title);
  out << "<g stroke=\"none\">\n";
  for (std::size_t vj = 0; vj < field.vertex_rows; ++vj) {
    for (std::size_t vi = 0; vi < field.vertex_cols; ++vi) {
      const double v = field.at(vi, vj);
      if (std::isnan(v)) continue;
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      out << "<rect x=\"" << num(vi * cell) << "\" y=\"" << num(top + vj * cell) << "\" width=\"" << num(cell)
          << "\" height=\"" << num(cell) << "\" fill=\"" << ramp_colour(t) << "\"/>\n";
    }
  }
  out << "</g>\n";
  if (std::isfinite(lo)) {
    out << "<text x=\"4\" y=\"" << num(H - 8) << "\" font-family=\"sans-serif\" font-size=\"11\">min "
        << format_double(lo) << "  max " << format_double(hi) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cellflow::svg
