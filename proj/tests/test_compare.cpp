#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "wmcf/compare.hpp"
#include "wmcf/flow.hpp"

using namespace wmcf;

namespace {

const symmetric_space s3 = make_space(space_kind::sphere, 3);
const symmetric_space cp4 = make_space(space_kind::complex_projective, 4);

double conserved(const warping_function& w, const slice_state& s) {
  double r = w.evaluate(s.z).r;
  return s.phibar * r * r;
}

double max_drift(const warping_function& w, const slice_solution& sol) {
  double p0 = conserved(w, sol.states.front());
  double d = 0.0;
  for (const slice_state& s : sol.states)
    d = std::max(d, std::abs(conserved(w, s) / p0 - 1.0));
  return d;
}

}  // namespace

TEST_CASE("cosh slice tracks its closed form") {
  warping_function w = warping_function::make_cosh(1.0);
  slice_solution sol = solve_slice(w, 3, 0.5, 1.0, 1.0);
  REQUIRE(sol.states.size() == 21);
  CHECK_FALSE(sol.exited_domain);
  CHECK(sol.states.front().t == 0.0);
  CHECK(sol.states.front().z == 0.5);
  CHECK(sol.states.back().t == 1.0);
  // closed form: sinh Z(t) = sinh z0 exp(-n t)
  for (const slice_state& s : sol.states) {
    double zt = std::asinh(std::sinh(0.5) * std::exp(-3.0 * s.t));
    CHECK(std::abs(s.z - zt) <= 1e-9);
  }
  CHECK(std::abs(sol.states.back().z - 0.025940898100630959) <= 1e-9);
  CHECK(max_drift(w, sol) <= 1e-8);
}

TEST_CASE("power slice tracks its closed form") {
  warping_function w = warping_function::make_power(0.0, 0.5);
  slice_solution sol = solve_slice(w, 4, -1.0, 1.0, 3.0);
  REQUIRE(sol.states.size() == 61);
  CHECK_FALSE(sol.exited_domain);
  // closed form: Z(t) = -sqrt(z0^2 + 2 n beta t)
  for (const slice_state& s : sol.states) {
    double zt = -std::sqrt(1.0 + 4.0 * s.t);
    CHECK(std::abs(s.z - zt) <= 1e-8);
  }
  CHECK(std::abs(sol.states.back().z + 3.60555127546398929) <= 1e-8);
  CHECK(max_drift(w, sol) <= 1e-8);
}

TEST_CASE("the conserved product drifts below 1e-8 over long horizons") {
  warping_function c = warping_function::make_cosh(1.0);
  CHECK(max_drift(c, solve_slice(c, 3, 0.5, 2.0, 10.0)) <= 1e-8);
  warping_function p = warping_function::make_power(0.0, 0.5);
  CHECK(max_drift(p, solve_slice(p, 4, -1.0, 1.0, 10.0)) <= 1e-8);
}

TEST_CASE("tightening the tolerance does not lose accuracy") {
  warping_function w = warping_function::make_cosh(1.0);
  const double exact = 0.025940898100630959;
  double prev = -1.0;
  for (double tol : {1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6}) {
    double err =
        std::abs(solve_slice(w, 3, 0.5, 1.0, 1.0, tol).states.back().z - exact);
    if (prev >= 0.0) CHECK(err <= 1.05 * prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("the equatorial slice is an exact fixed point") {
  warping_function w = warping_function::make_cosh(1.0);
  slice_solution sol = solve_slice(w, 3, 0.0, 1.0, 1.0);
  for (const slice_state& s : sol.states) {
    CHECK(s.z == 0.0);
    CHECK(s.phibar == 1.0);
  }
}

TEST_CASE("a positive cosh slice decays monotonically toward the equator") {
  warping_function w = warping_function::make_cosh(1.0);
  slice_solution sol = solve_slice(w, 3, 0.5, 1.0, 2.0);
  for (size_t k = 0; k + 1 < sol.states.size(); ++k) {
    CHECK(sol.states[k + 1].z < sol.states[k].z);
    CHECK(sol.states[k + 1].z > 0.0);
    CHECK(sol.states[k + 1].phibar > sol.states[k].phibar);  // r decreases
  }
}

TEST_CASE("a slice pushed into the boundary is truncated, not an error") {
  warping_function w = warping_function::make_tabulated(
      {-1.0, 1.0}, [](double z) {
        double r = std::exp(-z);
        return warp_eval{r, -r, r};
      });
  slice_solution sol = solve_slice(w, 2, 0.0, 1.0, 1.0);
  CHECK(sol.exited_domain);
  REQUIRE_FALSE(sol.states.empty());
  // Z = 2t reaches the boundary at t = 0.5; the last accepted state sits on
  // a sample at or just before that.
  CHECK(sol.states.back().t >= 0.45 - 1e-12);
  CHECK(sol.states.back().t <= 0.5 + 1e-12);
  CHECK(sol.states.back().z < 1.0);
  CHECK(sol.states.back().z > 0.85);
}

TEST_CASE("slice argument validation") {
  warping_function w = warping_function::make_cosh(1.0);
  CHECK_THROWS_AS(solve_slice(w, 1, 0.5, 1.0, 1.0), precondition_error);
  CHECK_THROWS_AS(solve_slice(w, 3, 0.5, 0.0, 1.0), precondition_error);
  CHECK_THROWS_AS(solve_slice(w, 3, 0.5, 1.0, 0.0), precondition_error);
  CHECK_THROWS_AS(solve_slice(w, 3, 0.5, 1.0, 1.0, 1e-15), precondition_error);
  CHECK_THROWS_AS(solve_slice(w, 3, 0.5, 1.0, 1.0, 1e-2), precondition_error);
  CHECK_THROWS_AS(solve_slice(w, 3, 0.5, 1.0, 1.0, 1e-10, 0.0),
                  precondition_error);
  CHECK_THROWS_AS(solve_slice(w, 3, 1.5, 1.0, 1.0), domain_exit_error);
}

TEST_CASE("scenario A gradient bound evaluates its formula") {
  double b = phi_bound_a(3, 0.04, std::cosh(0.5));
  CHECK(std::abs(b - 0.040519139894485288) <= 1e-12 * b);
  // denominator oracle, recomputed the same way
  double den = 3.0 - 8.0 * 0.04 * std::log(std::cosh(0.5));
  CHECK(std::abs(den - 2.96156335777335119) <= 1e-12 * den);
  CHECK(phi_bound_a(3, 0.0, 2.0) == 0.0);
  // monotone in both arguments
  CHECK(phi_bound_a(3, 0.01, 2.0) < phi_bound_a(3, 0.02, 2.0));
  CHECK(phi_bound_a(3, 0.04, 1.1) < phi_bound_a(3, 0.04, 2.0));
}

TEST_CASE("scenario A bound throws when its hypothesis fails") {
  double r0 = std::exp(1.0);
  CHECK_THROWS_AS(phi_bound_a(3, 1.0, r0), hypothesis_error);
  double phi_adm = 3.0 / (8.0 * std::log(r0));
  CHECK_THROWS_AS(phi_bound_a(3, phi_adm * (1.0 + 1e-12), r0), hypothesis_error);
  CHECK(phi_bound_a(3, phi_adm * (1.0 - 1e-9), r0) > 0.0);  // just admissible

  CHECK_THROWS_AS(phi_bound_a(1, 0.1, 2.0), precondition_error);
  CHECK_THROWS_AS(phi_bound_a(3, -0.1, 2.0), precondition_error);
  CHECK_THROWS_AS(phi_bound_a(3, 0.1, 1.0), precondition_error);
}

TEST_CASE("scenario B gradient cap evaluates its formula") {
  double b = gradient_bound_b(4, 2.0, 1.0);
  CHECK(std::abs(b - 0.89442719099991588) <= 1e-15 * b);
  CHECK(gradient_bound_b(4, 2.0, 2.0) == 2.0 * b);  // linear in r
  CHECK_THROWS_AS(gradient_bound_b(4, 1.0, 1.0), precondition_error);
  CHECK_THROWS_AS(gradient_bound_b(1, 2.0, 1.0), precondition_error);
  CHECK_THROWS_AS(gradient_bound_b(4, 2.0, 0.0), precondition_error);
}

namespace {

trajectory small_a_run() {
  warping_function w = warping_function::make_cosh(1.0);
  solver_config cfg;
  cfg.grid_n = 64;
  cfg.t_end = 0.5;
  return run(initial_cosine(s3, 0.0, 0.1, 1, 64), w, cfg);
}

}  // namespace

TEST_CASE("scenario A verification certifies a benign run") {
  warping_function w = warping_function::make_cosh(1.0);
  trajectory traj = small_a_run();
  REQUIRE(traj.event.kind == event_kind::reached_t_end);
  verification_report rep =
      verify_trajectory(traj, w, s3, scenario_a{0.3}, 0.9);
  CHECK(rep.comparison.ok);
  CHECK(rep.comparison.worst_margin > 0.0);
  CHECK(rep.bound.ok);
  CHECK(rep.bound.status == "certified");
  CHECK(rep.theta.ok);
  CHECK(rep.theta.min_theta > 0.99);
  CHECK(rep.all_ok());
  // The envelope seeded from the recorded initial extremes is tighter.
  CHECK(rep.comparison.tight_worst_margin <=
        rep.comparison.worst_margin + 1e-12);
  CHECK(rep.comparison.tight_worst_margin >= -1e-10);
}

TEST_CASE("scenario A verification reports a doctored record as violated") {
  warping_function w = warping_function::make_cosh(1.0);
  trajectory traj = small_a_run();
  traj.series[3].phi = 1.0;  // inconsistent with the recorded initial gradient
  verification_report rep =
      verify_trajectory(traj, w, s3, scenario_a{0.3}, 0.9);
  CHECK_FALSE(rep.bound.ok);
  CHECK(rep.bound.status == "violated");
  CHECK(rep.bound.worst_margin < 0.0);
  CHECK(std::abs(rep.bound.worst_t - traj.series[3].t) <= 1e-12);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("an inadmissible initial gradient is unverified, not violated") {
  warping_function w = warping_function::make_cosh(11.0);
  solver_config cfg;
  cfg.grid_n = 32;
  cfg.t_end = 0.2;
  trajectory traj = run(initial_cosine(s3, 0.0, 0.25, 1, 32), w, cfg);
  REQUIRE(traj.event.kind == event_kind::reached_t_end);
  verification_report rep =
      verify_trajectory(traj, w, s3, scenario_a{10.1}, 0.0);
  CHECK(rep.comparison.ok);
  CHECK_FALSE(rep.bound.ok);
  CHECK(rep.bound.status == "hypothesis-unverified");
  CHECK(rep.theta.ok);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("scenario B verification certifies a benign run") {
  warping_function w = warping_function::make_power(0.0, 0.5);
  solver_config cfg;
  cfg.grid_n = 64;
  cfg.t_end = 0.5;
  trajectory traj = run(initial_cosine(cp4, -0.8, 0.05, 1, 64), w, cfg);
  REQUIRE(traj.event.kind == event_kind::reached_t_end);
  verification_report rep =
      verify_trajectory(traj, w, cp4, scenario_b{2.0, -1.0}, 0.0);
  CHECK(rep.comparison.ok);
  CHECK(rep.bound.ok);
  CHECK(rep.bound.status == "certified");
  CHECK(rep.bound.worst_margin > 0.0);
  CHECK(rep.all_ok());
}

TEST_CASE("verification rejects structural mismatches") {
  warping_function w = warping_function::make_cosh(1.0);
  trajectory traj = small_a_run();

  CHECK_THROWS_AS(verify_trajectory(traj, w, cp4, scenario_a{0.3}, 0.0),
                  scenario_mismatch_error);
  CHECK_THROWS_AS(verify_trajectory(traj, warping_function::make_cosh(2.0), s3,
                                    scenario_a{0.3}, 0.0),
                  scenario_mismatch_error);
  CHECK_THROWS_AS(verify_trajectory(traj, w, s3, scenario_a{1.5}, 0.0),
                  scenario_mismatch_error);  // a0 outside the domain
  CHECK_THROWS_AS(verify_trajectory(traj, w, s3, scenario_a{-0.1}, 0.0),
                  scenario_mismatch_error);
  CHECK_THROWS_AS(verify_trajectory(traj, w, s3, scenario_b{1.0, -0.5}, 0.0),
                  scenario_mismatch_error);  // alpha must exceed 1
  CHECK_THROWS_AS(verify_trajectory(traj, w, s3, scenario_b{2.0, 0.5}, 0.0),
                  scenario_mismatch_error);  // a1 above the initial minimum

  trajectory empty = traj;
  empty.series.clear();
  CHECK_THROWS_AS(verify_trajectory(empty, w, s3, scenario_a{0.3}, 0.0),
                  precondition_error);
}

TEST_CASE("an unreachable tilt floor fails only the tilt block") {
  warping_function w = warping_function::make_cosh(1.0);
  trajectory traj = small_a_run();
  verification_report rep =
      verify_trajectory(traj, w, s3, scenario_a{0.3}, 0.9999);
  CHECK(rep.comparison.ok);
  CHECK(rep.bound.ok);
  CHECK_FALSE(rep.theta.ok);
  CHECK(rep.theta.min_theta < 0.9999);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("verification reports serialize to parseable json") {
  warping_function w = warping_function::make_cosh(1.0);
  trajectory traj = small_a_run();
  verification_report rep =
      verify_trajectory(traj, w, s3, scenario_a{0.3}, 0.9);
  std::ostringstream os;
  write_report_json(os, rep);
  nlohmann::json doc = nlohmann::json::parse(os.str());
  CHECK(doc["comparison"]["ok"].get<bool>());
  CHECK(doc["comparison"]["worst_margin"].is_number());
  CHECK(doc["comparison"]["tight_worst_margin"].is_number());
  CHECK(doc["bound"]["status"].get<std::string>() == "certified");
  CHECK(doc["theta"]["min_theta"].get<double>() > 0.99);
  CHECK(doc["theta"]["floor"].get<double>() == 0.9);

  // NaN fields in a default report serialize as null, keeping the JSON valid.
  verification_report blank;
  std::ostringstream os2;
  write_report_json(os2, blank);
  nlohmann::json doc2 = nlohmann::json::parse(os2.str());
  CHECK(doc2["comparison"]["worst_margin"].is_null());
  CHECK_FALSE(doc2["comparison"]["ok"].get<bool>());
}
