#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "crystal/errors.hpp"
#include "crystal/models.hpp"

namespace crystal {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

template <class T>
T read_field(std::istringstream& is, int line_no, const char* what) {
  T v{};
  if (!(is >> v)) throw ConfigError(std::string("hopping file: expected ") + what, line_no, what);
  return v;
}

void expect_end(std::istringstream& is, int line_no) {
  std::string extra;
  if (is >> extra) throw ConfigError("hopping file: unexpected token '" + extra + "'", line_no);
}

}  // namespace

HoppingList parse_hopping_list(std::istream& in) {
  std::optional<Lattice2D> lattice;
  std::vector<Vec2> orbitals;
  std::vector<Hopping> hops;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream is(strip_comment(raw));
    std::string head;
    if (!(is >> head)) continue;
    if (head == "lattice") {
      if (!hops.empty() || !orbitals.empty())
        throw ConfigError("hopping file: lattice must come first", line_no, "lattice");
      if (lattice) throw ConfigError("hopping file: duplicate lattice line", line_no, "lattice");
      const double a1x = read_field<double>(is, line_no, "a1x");
      const double a1y = read_field<double>(is, line_no, "a1y");
      const double a2x = read_field<double>(is, line_no, "a2x");
      const double a2y = read_field<double>(is, line_no, "a2y");
      expect_end(is, line_no);
      try {
        lattice.emplace(Vec2(a1x, a1y), Vec2(a2x, a2y));
      } catch (const DegenerateBasisError& e) {
        throw ConfigError(std::string("hopping file: ") + e.what(), line_no, "lattice");
      }
    } else if (head == "orbital") {
      if (!hops.empty()) throw ConfigError("hopping file: orbital after hopping records", line_no, "orbital");
      const double x = read_field<double>(is, line_no, "x");
      const double y = read_field<double>(is, line_no, "y");
      expect_end(is, line_no);
      orbitals.emplace_back(x, y);
    } else {
      std::istringstream rec(strip_comment(raw));
      Hopping h;
      h.from = read_field<int>(rec, line_no, "a");
      h.to = read_field<int>(rec, line_no, "b");
      h.cell.x() = read_field<int>(rec, line_no, "R1");
      h.cell.y() = read_field<int>(rec, line_no, "R2");
      const double re = read_field<double>(rec, line_no, "re");
      const double im = read_field<double>(rec, line_no, "im");
      expect_end(rec, line_no);
      const int m = static_cast<int>(orbitals.size());
      if (h.from < 0 || h.from >= m || h.to < 0 || h.to >= m)
        throw ConfigError("hopping file: orbital index out of range", line_no);
      h.amplitude = cplx(re, im);
      hops.push_back(h);
    }
  }
  if (orbitals.empty()) throw ConfigError("hopping file: no orbital lines", line_no, "orbital");
  try {
    return HoppingList(lattice.value_or(Lattice2D::honeycomb()), std::move(orbitals), std::move(hops));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("hopping file: ") + e.what(), line_no);
  }
}

HoppingList load_hopping_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open hopping file '" + path + "'");
  return parse_hopping_list(in);
}

void write_hopping_list(std::ostream& out, const HoppingList& h) {
  const auto flags = out.flags();
  out << std::setprecision(17);
  const auto& lat = h.lattice();
  out << "lattice " << lat.a1().x() << ' ' << lat.a1().y() << ' ' << lat.a2().x() << ' ' << lat.a2().y()
      << '\n';
  for (const auto& t : h.orbitals()) out << "orbital " << t.x() << ' ' << t.y() << '\n';
  for (const auto& hop : h.hoppings())
    out << hop.from << ' ' << hop.to << ' ' << hop.cell.x() << ' ' << hop.cell.y() << ' '
        << hop.amplitude.real() << ' ' << hop.amplitude.imag() << '\n';
  out.flags(flags);
}

}  // namespace crystal
