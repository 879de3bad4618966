#ifndef MUSKAT_SNAPSHOT_HPP
#define MUSKAT_SNAPSHOT_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "muskat/error.hpp"
#include "muskat/grid.hpp"
#include "muskat/io.hpp"

namespace muskat {

/// Header line: MUSKAT-SNAP v1,N,L,t,dt,step_count,sigma,delta_rho,theta
/// followed by an `x,f` CSV body.
struct Snapshot {
  Profile f;
  double t = 0.0;
  double dt = 0.0;
  long long step_count = 0;
  double sigma = 0.0;
  double delta_rho = 0.0;
  double theta = 0.0;
};

inline constexpr const char* kSnapshotTag = "MUSKAT-SNAP v1";

inline std::string snapshot_text(const Snapshot& s) {
  const GridSpec& g = s.f.grid();
  std::string out = std::string(kSnapshotTag) + "," + std::to_string(g.n_points) + "," + fmt17(g.half_width) + "," +
                    fmt17(s.t) + "," + fmt17(s.dt) + "," + std::to_string(s.step_count) + "," + fmt17(s.sigma) + "," +
                    fmt17(s.delta_rho) + "," + fmt17(s.theta) + "\n";
  return out + profile_csv(s.f);
}

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) { write_atomic(path, snapshot_text(s)); }

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw IoError(path.string() + ": empty snapshot");
  std::vector<std::string> fields;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
  }
  if (fields.size() != 9 || fields[0] != kSnapshotTag) throw IoError(path.string() + ": not a MUSKAT-SNAP v1 file");
  const std::string where = path.string() + ":1";
  Snapshot s;
  const double n_field = detail::parse_double(fields[1], where);
  const double L = detail::parse_double(fields[2], where);
  s.t = detail::parse_double(fields[3], where);
  s.dt = detail::parse_double(fields[4], where);
  s.step_count = static_cast<long long>(detail::parse_double(fields[5], where));
  s.sigma = detail::parse_double(fields[6], where);
  s.delta_rho = detail::parse_double(fields[7], where);
  s.theta = detail::parse_double(fields[8], where);
  std::string body_header;
  std::getline(in, body_header);
  if (body_header != "x,f") throw IoError(path.string() + ":2: expected 'x,f'");
  s.f = detail::parse_profile_rows(in, path.string(), 2);
  if (s.f.grid().n_points != static_cast<int>(n_field))
    throw IoError(path.string() + ": header N does not match the number of rows");
  if (std::abs(s.f.grid().half_width - L) > 1e-12 * std::max(1.0, L))
    throw IoError(path.string() + ": header L does not match the node coordinates");
  s.f = Profile(GridSpec(L, s.f.grid().n_points), {s.f.values().begin(), s.f.values().end()});
  if (!s.f.all_finite()) throw IoError(path.string() + ": non-finite profile values");
  return s;
}

}  // namespace muskat

#endif  // MUSKAT_SNAPSHOT_HPP
