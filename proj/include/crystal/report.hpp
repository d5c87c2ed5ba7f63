#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace crystal {

using Echo = std::vector<std::pair<std::string, std::string>>;

/// "%.17g", with "nan"/"inf"/"-inf" spelled out.
std::string format_number(double v);

/// CSV with `# key = value` header lines, a column header, then rows.
void write_csv(std::ostream& out, const Echo& echo, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// CSV of `key,value` records after the echo header.
void write_key_values(std::ostream& out, const Echo& echo,
                      const std::vector<std::pair<std::string, std::string>>& records);

struct Series {
  std::string label;
  std::vector<double> y;
};

/// Minimal SVG line plot of several series against a shared x axis.
void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::vector<double>& x, const std::vector<Series>& series);

void write_file(const std::string& path, const std::string& contents);

}  // namespace crystal
