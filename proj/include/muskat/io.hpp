#ifndef MUSKAT_IO_HPP
#define MUSKAT_IO_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"

namespace muskat {

/// Shortest round-trip decimal with 17 significant digits.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Write through a sibling temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string profile_csv(const Profile& f) {
  std::string s = "x,f\n";
  for (int i = 0; i < f.grid().n_points; ++i)
    s += fmt17(f.grid().node(i)) + "," + fmt17(f[static_cast<std::size_t>(i)]) + "\n";
  return s;
}

inline void write_profile_csv(const std::filesystem::path& path, const Profile& f) { write_atomic(path, profile_csv(f)); }

inline void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  std::string out = "k,re,im\n";
  for (int k = s.kmin(); k <= s.kmax(); ++k)
    out += std::to_string(k) + "," + fmt17(s.at(k).real()) + "," + fmt17(s.at(k).imag()) + "\n";
  write_atomic(path, out);
}

namespace detail {

inline double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw IoError("trailing characters in number '" + tok + "' at " + where);
    return v;
  } catch (const std::logic_error&) {
    throw IoError("cannot parse number '" + tok + "' at " + where);
  }
}

/// Parse `x,f` rows; the grid is recovered from the first node (-L) and the row count.
inline Profile parse_profile_rows(std::istream& in, const std::string& source, int first_line) {
  std::vector<double> xs, fs;
  std::string line;
  int lineno = first_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(source + ":" + std::to_string(lineno) + ": expected 'x,f'");
    const std::string where = source + ":" + std::to_string(lineno);
    xs.push_back(parse_double(line.substr(0, comma), where));
    fs.push_back(parse_double(line.substr(comma + 1), where));
  }
  if (xs.size() < 16) throw IoError(source + ": too few rows for a grid");
  const double L = -xs.front();
  const GridSpec g(L, static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - g.node(static_cast<int>(i))) > 1e-9 * std::max(1.0, L))
      throw IoError(source + ": nodes are not a uniform grid on [-L, L)");
  return Profile(g, std::move(fs));
}

}  // namespace detail

inline Profile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (header != "x,f") throw IoError(path.string() + ": expected header 'x,f'");
  return detail::parse_profile_rows(in, path.string(), 1);
}

}  // namespace muskat

#endif  // MUSKAT_IO_HPP
