#include "crystal/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "crystal/errors.hpp"

namespace crystal {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_echo(std::ostream& out, const Echo& echo) {
  for (const auto& [k, v] : echo) out << "# " << k << " = " << v << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const Echo& echo, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  write_echo(out, echo);
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_key_values(std::ostream& out, const Echo& echo,
                      const std::vector<std::pair<std::string, std::string>>& records) {
  write_echo(out, echo);
  out << "key,value\n";
  for (const auto& [k, v] : records) out << k << ',' << v << '\n';
}

void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::vector<double>& x, const std::vector<Series>& series) {
  const double W = 800, H = 500, L = 70, R = 20, T = 40, B = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!x.empty()) {
    xmin = *std::min_element(x.begin(), x.end());
    xmax = *std::max_element(x.begin(), x.end());
  }
  bool first = true;
  for (const auto& s : series)
    for (double y : s.y) {
      if (!std::isfinite(y)) continue;
      if (first) {
        ymin = ymax = y;
        first = false;
      }
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymin -= 1;
    ymax += 1;
  }
  auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"" << L - 5 << "\" y=\"" << py(ymax) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_number(ymax).substr(0, 8) << "</text>\n";
  out << "<text x=\"" << L - 5 << "\" y=\"" << py(ymin) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_number(ymin).substr(0, 8) << "</text>\n";
  out << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << format_number(xmin).substr(0, 8) << "</text>\n";
  out << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << format_number(xmax).substr(0, 8) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(x.size(), series[s].y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[s].y[i]));
      out << buf;
    }
    out << "\"/>\n";
    out << "<text x=\"" << W - R - 5 << "\" y=\"" << T + 16 * (s + 1) << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
        << color << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot write '" + path + "'");
  f << contents;
}

}  // namespace crystal
