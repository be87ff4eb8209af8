#pragma once

// Subcommand drivers shared by the command-line tool and the test suite.
// Exit statuses for simulate: 0 run reached t_end and every configured check
// passed, 2 event-terminated run, 3 verification failure, 4 I/O error
// (mapped by the caller from io_error). check-warping: 0 iff the condition
// passed. slice: 0 iff the conservation drift is at most 1e-8.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wmcf/compare.hpp"
#include "wmcf/config.hpp"
#include "wmcf/errors.hpp"
#include "wmcf/flow.hpp"
#include "wmcf/format.hpp"
#include "wmcf/geometry.hpp"

namespace wmcf {

enum class log_level { error = 0, info = 1, debug = 2 };

inline log_level current_log_level() {
  const char* v = std::getenv("WMCF_LOG");
  if (!v) return log_level::error;
  std::string s(v);
  if (s == "debug") return log_level::debug;
  if (s == "info") return log_level::info;
  return log_level::error;
}

inline void log_line(log_level lv, const std::string& msg) {
  if (static_cast<int>(lv) <= static_cast<int>(current_log_level()))
    std::fprintf(stderr, "[wmcf] %s\n", msg.c_str());
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open " + path.string() + " for writing");
  os << body;
  if (!os) throw io_error("write failed for " + path.string());
}

inline void ensure_out_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw io_error("cannot create output directory " + out_dir.string());
}

inline profile build_initial(const run_config& rc, int grid_n) {
  if (!rc.initial.has_value())
    throw config_error("config: initial is required for this command");
  if (const initial_cosine_spec* c = std::get_if<initial_cosine_spec>(&*rc.initial))
    return initial_cosine(rc.space, c->c0, c->c1, c->mode, grid_n);
  const initial_constant_spec& k = std::get<initial_constant_spec>(*rc.initial);
  return make_profile(rc.space, std::vector<double>(grid_n + 1, k.z0));
}

}  // namespace detail

inline int cmd_simulate(const run_config& rc,
                        const std::filesystem::path& out_dir) {
  if (!rc.solver.has_value())
    throw config_error("config: solver (with t_end) is required for simulate");
  detail::ensure_out_dir(out_dir);
  profile p0 = detail::build_initial(rc, rc.solver->grid_n);
  log_line(log_level::info, "simulate: grid_n = " + std::to_string(rc.solver->grid_n) +
                                ", t_end = " + format_short(rc.solver->t_end));
  trajectory traj = run(p0, rc.warping, *rc.solver);
  log_line(log_level::info, "simulate: event = " + to_string(traj.event.kind) +
                                " at t = " + format_short(traj.event.t));

  {
    std::ostringstream ss;
    write_series_csv(ss, traj);
    detail::write_text_file(out_dir / "series.csv", ss.str());
  }
  for (const auto& [t, snap] : traj.snapshots) {
    std::ostringstream ss;
    write_profile_csv(ss, snap, rc.warping);
    detail::write_text_file(out_dir / ("profile_t" + format_short(t) + ".csv"),
                            ss.str());
    log_line(log_level::debug, "simulate: wrote snapshot at t = " + format_short(t));
  }

  bool verified = true;
  if (rc.scen.has_value()) {
    verification_report rep =
        verify_trajectory(traj, rc.warping, rc.space, *rc.scen, rc.theta_floor);
    std::ostringstream ss;
    write_report_json(ss, rep);
    detail::write_text_file(out_dir / "verification.json", ss.str());
    verified = rep.all_ok();
    log_line(log_level::info,
             std::string("simulate: verification ") + (verified ? "ok" : "FAILED"));
  }

  if (traj.event.kind != event_kind::reached_t_end) return 2;
  if (!verified) return 3;
  return 0;
}

inline int cmd_check_warping(const run_config& rc, std::ostream& report_to) {
  if (!rc.scen.has_value())
    throw config_error("config: check-warping requires a scenario");
  condition_report rep{};
  if (const scenario_a* sa = std::get_if<scenario_a>(&*rc.scen)) {
    rep = check_theorem_a(rc.warping, sa->a0, rc.check.num_samples);
  } else {
    const scenario_b& sb = std::get<scenario_b>(*rc.scen);
    double hi = rc.warping.domain().hi;
    double lo = rc.check.z_probe_lo.value_or(sb.a1 - 10.0);
    rep = check_theorem_b(rc.warping, sb.alpha, lo, hi, rc.check.num_samples);
  }
  report_to << "{\"condition\": \"" << rep.condition << "\", \"passed\": "
            << (rep.passed ? "true" : "false")
            << ", \"worst_margin\": " << format_short(rep.worst_margin)
            << ", \"worst_point\": " << format_short(rep.worst_point) << "}\n";
  return rep.passed ? 0 : 1;
}

inline int cmd_slice(const run_config& rc, const std::filesystem::path& out_dir,
                     std::ostream& info) {
  if (!rc.solver.has_value())
    throw config_error("config: solver (with t_end) is required for slice");
  if (!rc.initial.has_value())
    throw config_error("config: initial is required for slice");
  double z0 = 0.0;
  if (const initial_constant_spec* k =
          std::get_if<initial_constant_spec>(&*rc.initial)) {
    z0 = k->z0;
  } else {
    const initial_cosine_spec& c = std::get<initial_cosine_spec>(*rc.initial);
    if (c.c1 != 0.0)
      throw config_error("config: slice requires constant initial data");
    z0 = c.c0;
  }
  detail::ensure_out_dir(out_dir);
  slice_solution sol =
      solve_slice(rc.warping, rc.space.n, z0, rc.phibar0, rc.solver->t_end,
                  rc.rel_tol, rc.solver->output_every);

  double p0 = sol.states.front().phibar *
              rc.warping.evaluate(sol.states.front().z).r *
              rc.warping.evaluate(sol.states.front().z).r;
  double drift = 0.0;
  std::ostringstream ss;
  ss << "t,Z,phibar,conserved_product\n";
  for (const slice_state& s : sol.states) {
    double r = rc.warping.evaluate(s.z).r;
    double prod = s.phibar * r * r;
    drift = std::max(drift, std::abs(prod / p0 - 1.0));
    ss << format_short(s.t) << ',' << format_short(s.z) << ','
       << format_short(s.phibar) << ',' << format_short(prod) << '\n';
  }
  detail::write_text_file(out_dir / "slice.csv", ss.str());
  if (sol.exited_domain)
    info << "slice halted at the domain boundary at t = "
         << format_short(sol.states.back().t) << "\n";
  info << "max relative conservation drift = " << format_short(drift) << "\n";
  return drift <= 1e-8 ? 0 : 1;
}

}  // namespace wmcf
