#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mla/cli_io.hpp"

namespace mla {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

struct Style {
  const char* title;
  const char* x_label;
  const char* y_label;
  bool log_x;
  bool log_y;
  bool scatter;
};

Style style_for(PlotKind kind) {
  switch (kind) {
    case PlotKind::bounds_vs_g: return {"dimension bounds", "G", "dim", true, true, false};
    case PlotKind::sigma_vs_lambda: return {"growth rate", "Lambda", "sigma_hat", true, false, false};
    case PlotKind::lattice_scaling: return {"lattice count", "s", "d(s)/s^2", false, false, false};
    case PlotKind::spectrum: return {"spectrum", "Re", "Im", false, false, true};
  }
  return {"", "x", "y", false, false, false};
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_svg(const PlotData& data, const Style& st, const std::filesystem::path& file) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return st.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return st.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : data.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = tx(s.x[i]), y = ty(s.y[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ofstream out(file);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(st.title) << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double vx = st.log_x ? std::pow(10.0, fx) : fx, vy = st.log_y ? std::pow(10.0, fy) : fy;
    std::ostringstream lx, ly;
    lx.precision(3);
    ly.precision(3);
    lx << vx;
    ly << vy;
    out << "<text x=\"" << L + (W - L - R) * i / 4.0 << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
        << lx.str() << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << H - B - (H - T - B) * i / 4.0 + 4 << "\" text-anchor=\"end\">"
        << ly.str() << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(st.x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\" text-anchor=\"middle\">" << escape(st.y_label) << "</text>\n";

  for (std::size_t k = 0; k < data.series.size(); ++k) {
    const auto& s = data.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(tx(s.x[i])) && std::isfinite(ty(s.y[i]))) pts.emplace_back(px(s.x[i]), py(s.y[i]));
    }
    if (st.scatter) {
      for (const auto& [x, y] : pts) {
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    } else if (!pts.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) out << x << "," << y << " ";
      out << "\"/>\n";
    }
    out << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\"" << color
        << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const PlotData& data, const std::filesystem::path& dir,
                                                  const std::string& stem, bool svg) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto csv = dir / (stem + ".csv");
  {
    std::ofstream out(csv);
    out << "series,x,y\n";
    for (const auto& s : data.series) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        out << s.name << ',' << format_number(s.x[i]) << ',' << format_number(s.y[i]) << '\n';
      }
    }
  }
  written.push_back(csv);
  if (svg) {
    const auto file = dir / (stem + ".svg");
    write_svg(data, style_for(data.kind), file);
    written.push_back(file);
  }
  return written;
}

}  // namespace mla
