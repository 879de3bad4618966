#ifndef MUSKAT_CLI_HPP
#define MUSKAT_CLI_HPP

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "muskat/config.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/linear.hpp"
#include "muskat/snapshot.hpp"
#include "muskat/verify.hpp"

namespace muskat {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int usage = 2;
}  // namespace exit_code

struct CliInvocation {
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path output_dir = "runs";
  std::optional<std::filesystem::path> resume_path;
  std::vector<std::string> overrides;
  /// reconstruct-fields input, optional profile source for linear-analysis.
  std::optional<std::filesystem::path> snapshot_path;
  /// verify: "identity" or "full".
  std::string level = "full";
  /// linear-analysis: node where coefficients are frozen; -1 picks x = 0.
  int x0_index = -1;
  /// reconstruct-fields: sample counts of the output lattice.
  int field_nx = 64;
  int field_ny = 33;
};

namespace detail {

inline SimConfig load_config(const CliInvocation& inv, const std::string& defaults = {}) {
  if (!inv.config_path) {
    std::vector<std::string> all;
    std::istringstream in(defaults);
    for (std::string line; std::getline(in, line);)
      if (!trim(line).empty()) all.push_back(line);
    all.insert(all.end(), inv.overrides.begin(), inv.overrides.end());
    return parse_config_text("", "<defaults>", all);
  }
  return parse_config(*inv.config_path, inv.overrides);
}

/// <output_dir>/<prefix>-<UTC timestamp>[-k], created fresh.
inline std::filesystem::path fresh_run_dir(const std::filesystem::path& root, const std::string& prefix) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  std::filesystem::create_directories(root);
  std::filesystem::path dir = root / (prefix + "-" + stamp);
  for (int k = 2; std::filesystem::exists(dir); ++k) dir = root / (prefix + "-" + stamp + "-" + std::to_string(k));
  std::filesystem::create_directory(dir);
  return dir;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Diagnostics rows of an earlier run with t <= t_max (header dropped).
inline std::string diagnostics_rows_until(const std::filesystem::path& csv, double t_max) {
  if (!std::filesystem::exists(csv)) return {};
  std::istringstream in(read_text(csv));
  std::string line, out;
  std::getline(in, line);
  if (line + "\n" != diagnostics_header()) throw IoError(csv.string() + ": unexpected diagnostics header");
  for (int no = 2; std::getline(in, line); ++no) {
    if (line.empty()) continue;
    const double t = parse_double(line.substr(0, line.find(',')), csv.string() + ":" + std::to_string(no));
    if (t <= t_max) out += line + "\n";
  }
  return out;
}

inline int cmd_simulate(const CliInvocation& inv, std::ostream& out) {
  SimConfig cfg = load_config(inv);
  std::filesystem::path dir;
  RunOptions opts;
  SimState state;
  if (inv.resume_path) {
    state = resume(*inv.resume_path, cfg);
    const Snapshot snap = read_snapshot(*inv.resume_path);
    if (snap.sigma != cfg.params.sigma || snap.delta_rho != cfg.params.delta_rho || snap.theta != cfg.params.theta)
      throw ConfigError("physical parameters differ from those recorded in " + inv.resume_path->string());
    const auto src = std::filesystem::absolute(*inv.resume_path).parent_path();
    // resuming continues the run directory unless an explicit target was given
    dir = inv.output_dir.empty() ? src : inv.output_dir;
    std::filesystem::create_directories(dir);
    opts.diagnostics_prefix = diagnostics_rows_until(src / "diagnostics.csv", state.t);
  } else {
    dir = fresh_run_dir(inv.output_dir, "simulate");
    state = initial_state(cfg, make_initial(cfg));
  }
  write_atomic(dir / "config.txt", config_text(cfg));
  opts.output_dir = dir;
  const RunResult r = run_from(cfg, std::move(state), opts);
  out << "run directory: " << dir.string() << "\n";
  out << "status: " << to_string(r.status) << " at t = " << fmt17(r.state.t) << " after " << r.state.step_count
      << " steps\n";
  if (!r.message.empty()) out << r.message << "\n";
  return r.status == StepStatus::Finished ? exit_code::ok : exit_code::check_failed;
}

inline int cmd_verify(const CliInvocation& inv, std::ostream& out) {
  if (inv.level != "identity" && inv.level != "full")
    throw ConfigError("--level must be identity or full, got '" + inv.level + "'");
  const SimConfig cfg = load_config(inv, "N = 512\n");
  std::vector<CheckResult> results = run_identity_checks(cfg.grid, cfg.seed);
  if (inv.level == "full") {
    auto phys = run_physics_checks(cfg);
    results.insert(results.end(), phys.begin(), phys.end());
    sort_by_name(results);
  }
  const auto dir = fresh_run_dir(inv.output_dir, "verify");
  write_atomic(dir / "config.txt", config_text(cfg));
  write_atomic(dir / "report.csv", report_csv(results));
  write_atomic(dir / "report.txt", report_text(results));
  out << report_text(results);
  out << "report directory: " << dir.string() << "\n";
  return all_passed(results) ? exit_code::ok : exit_code::check_failed;
}

inline Profile source_profile(const CliInvocation& inv, const SimConfig& cfg) {
  if (inv.snapshot_path) {
    const Snapshot s = read_snapshot(*inv.snapshot_path);
    if (!(s.f.grid() == cfg.grid)) throw GridMismatch("snapshot grid does not match the configured grid");
    return s.f;
  }
  return make_initial(cfg);
}

inline int cmd_linear_analysis(const CliInvocation& inv, std::ostream& out) {
  const SimConfig cfg = load_config(inv);
  const Profile f = source_profile(inv, cfg);
  const int x0 = inv.x0_index < 0 ? cfg.grid.nyquist() : inv.x0_index;
  const int order = cfg.params.surface_tension() ? 3 : 1;
  const FrozenSymbol sym = freeze_symbol(f, 1.0, x0, order, QuadratureRule::midpoint(cfg.grid));
  const ResolventReport rep = verify_resolvent_inequality(sym, cfg.grid, 20);
  std::string csv = "lambda_re,lambda_im,xi,ratio\n";
  for (const auto& s : rep.worst_per_lambda)
    csv += fmt17(s.lambda.real()) + "," + fmt17(s.lambda.imag()) + "," + fmt17(s.xi) + "," + fmt17(s.ratio) + "\n";
  const auto dir = fresh_run_dir(inv.output_dir, "linear-analysis");
  write_atomic(dir / "config.txt", config_text(cfg));
  write_atomic(dir / "resolvent.csv", csv);
  const bool bounded = std::isfinite(rep.kappa0_measured) &&
                       (order != 1 || rep.max_lambda_ratio <= rep.lambda_ratio_ceiling + 1e-9);
  std::string summary = "order = " + std::to_string(order) + "\nx0 = " + fmt17(cfg.grid.node(x0)) +
                        "\nalpha = " + fmt17(sym.alpha) + "\nbeta = " + fmt17(sym.beta) +
                        "\nkappa0 = " + fmt17(rep.kappa0_measured) + "\nmax_lambda_ratio = " +
                        fmt17(rep.max_lambda_ratio) + "\n";
  if (order == 1)
    summary += "lambda_ratio_ceiling = " + fmt17(rep.lambda_ratio_ceiling) + "\nkappa0_ceiling = " +
               fmt17(rep.kappa0_ceiling) + "\n";
  write_atomic(dir / "summary.txt", summary);
  out << summary << "output directory: " << dir.string() << "\n";
  return bounded ? exit_code::ok : exit_code::check_failed;
}

inline int cmd_reconstruct_fields(const CliInvocation& inv, std::ostream& out) {
  if (!inv.snapshot_path) throw ConfigError("reconstruct-fields needs --snapshot PATH");
  if (inv.field_nx < 2 || inv.field_ny < 2) throw ConfigError("field lattice needs at least 2 x 2 points");
  const Snapshot snap = read_snapshot(*inv.snapshot_path);
  SimConfig cfg = load_config(inv, "N = " + std::to_string(snap.f.grid().n_points) + "\nL = " +
                                       fmt17(snap.f.grid().half_width) + "\n");
  PhysParams params = cfg.params;
  params.sigma = snap.sigma;
  params.delta_rho = snap.delta_rho;
  params.theta = snap.theta;
  params.validate();
  const GridSpec& g = snap.f.grid();
  const double d = max_abs(snap.f) + std::max(0.25 * g.half_width, 4.0 * g.dx());
  const PressureField pressure(snap.f, params, d);
  std::vector<double> xs, ys;
  for (int i = 0; i < inv.field_nx; ++i) xs.push_back(-g.half_width + g.length() * i / inv.field_nx);
  for (int j = 0; j < inv.field_ny; ++j) ys.push_back(-d + 2.0 * d * j / (inv.field_ny - 1));
  const VelocityField2D v = sample_velocity(pressure.biot_savart(), xs, ys);
  const auto p = pressure.on_grid(v);
  std::string csv = "x,y,vx,vy,p,side\n";
  for (std::size_t r = 0; r < ys.size(); ++r)
    for (std::size_t c = 0; c < xs.size(); ++c)
      csv += fmt17(xs[c]) + "," + fmt17(ys[r]) + "," + fmt17(v.vx[r][c]) + "," + fmt17(v.vy[r][c]) + "," +
             fmt17(p[r][c]) + "," + to_string(v.mask[r][c]) + "\n";
  const auto dir = fresh_run_dir(inv.output_dir, "fields");
  write_atomic(dir / "fields.csv", csv);
  out << "fields: " << (dir / "fields.csv").string() << "\n";
  return exit_code::ok;
}

inline int cmd_make_initial(const CliInvocation& inv, std::ostream& out) {
  const SimConfig cfg = load_config(inv);
  const Profile f = make_initial(cfg);
  const auto dir = fresh_run_dir(inv.output_dir, "initial");
  write_atomic(dir / "config.txt", config_text(cfg));
  write_profile_csv(dir / "profile.csv", f);
  out << "profile: " << (dir / "profile.csv").string() << "\n";
  return exit_code::ok;
}

}  // namespace detail

/// Runs one parsed invocation; errors are reported on `err` and mapped to exit codes.
inline int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.resume_path && inv.subcommand != "simulate") throw ConfigError("--resume only applies to simulate");
    if (inv.subcommand == "simulate") return detail::cmd_simulate(inv, out);
    if (inv.subcommand == "verify") return detail::cmd_verify(inv, out);
    if (inv.subcommand == "linear-analysis") return detail::cmd_linear_analysis(inv, out);
    if (inv.subcommand == "reconstruct-fields") return detail::cmd_reconstruct_fields(inv, out);
    if (inv.subcommand == "make-initial") return detail::cmd_make_initial(inv, out);
    err << "unknown subcommand '" << inv.subcommand << "'\n";
    return exit_code::usage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const GridMismatch& e) {
    err << "grid mismatch: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::check_failed;
  }
}

/// Parses argv and dispatches. Usage errors print help and return 2.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Muskat interface simulator and verification suite", "muskat"};
  app.require_subcommand(1);
  CliInvocation inv;
  inv.output_dir.clear();
  std::string config, resume, snapshot;
  std::string output_dir;
  app.add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--output-dir", output_dir, "root directory for run outputs (default: runs)");
  app.add_option("--resume", resume, "simulate: continue from this snapshot");
  app.add_option("--set", inv.overrides, "override a config key, key=value (repeatable)")->take_all()->allow_extra_args(false);

  const auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  sub("simulate", "evolve the interface, writing snapshots and diagnostics.csv");
  auto* verify = sub("verify", "run the identity and physics checks");
  verify->add_option("--level", inv.level, "identity or full")->check(CLI::IsMember({"identity", "full"}));
  auto* linear = sub("linear-analysis", "frozen-coefficient resolvent sampling");
  linear->add_option("--snapshot", snapshot, "profile to freeze (default: configured initial profile)");
  linear->add_option("--x0-index", inv.x0_index, "grid node where coefficients are frozen");
  auto* fields = sub("reconstruct-fields", "velocity and pressure around a snapshot interface");
  fields->add_option("--snapshot", snapshot, "snapshot file")->required();
  fields->add_option("--nx", inv.field_nx, "lattice points in x");
  fields->add_option("--ny", inv.field_ny, "lattice points in y");
  sub("make-initial", "write the configured initial profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return exit_code::usage;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  if (!config.empty()) inv.config_path = config;
  if (!resume.empty()) inv.resume_path = resume;
  if (!snapshot.empty()) inv.snapshot_path = snapshot;
  // an empty output dir means "continue in place" for resume, "runs" otherwise
  if (!output_dir.empty()) inv.output_dir = output_dir;
  else if (!inv.resume_path) inv.output_dir = "runs";
  return dispatch(inv, out, err);
}

}  // namespace muskat

#endif  // MUSKAT_CLI_HPP
