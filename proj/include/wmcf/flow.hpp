#pragma once

// Method-of-lines evolution of a graph profile under the reduced flow.
// Classic fourth order Runge-Kutta in time; the step obeys the parabolic
// bound dt = safety dx^2 min_i (r(u_i)^2 + mu_i), which shrinks exactly
// where the equation degenerates (small r) and is capped by the output
// cadence so recorded times are hit exactly. Abnormal ends are events on
// the trajectory, never exceptions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "wmcf/errors.hpp"
#include "wmcf/format.hpp"
#include "wmcf/geometry.hpp"
#include "wmcf/space.hpp"
#include "wmcf/warp.hpp"

namespace wmcf {

struct solver_config {
  int grid_n = 128;
  double t_end = 1.0;
  double safety = 0.2;
  double output_every = 0.05;
  double grad_blowup_threshold = 1e3;
  double domain_margin = 1e-9;

  void validate() const {
    if (grid_n < 8)
      throw precondition_error("solver_config: grid_n must be >= 8");
    if (!(t_end > 0.0))
      throw precondition_error("solver_config: t_end must be positive");
    if (!(safety > 0.0 && safety < 1.0))
      throw precondition_error("solver_config: safety must lie in (0, 1)");
    if (!(output_every > 0.0))
      throw precondition_error("solver_config: output_every must be positive");
    if (!(grad_blowup_threshold > 0.0))
      throw precondition_error(
          "solver_config: grad_blowup_threshold must be positive");
    if (!(domain_margin >= 0.0))
      throw precondition_error("solver_config: domain_margin must be nonnegative");
  }
};

enum class event_kind { reached_t_end, gradient_blowup, domain_exit, step_underflow };

inline std::string to_string(event_kind k) {
  switch (k) {
    case event_kind::reached_t_end: return "ReachedTEnd";
    case event_kind::gradient_blowup: return "GradientBlowup";
    case event_kind::domain_exit: return "DomainExit";
    case event_kind::step_underflow: return "StepUnderflow";
  }
  return "?";
}

struct flow_event {
  event_kind kind;
  double t;
};

struct series_sample {
  double t;
  double min_u;
  double max_u;
  double phi;        // max_i mu_i
  double min_theta;
};

struct trajectory {
  std::vector<std::pair<double, profile>> snapshots;  // at t = 0 and each mark
  std::vector<series_sample> series;                  // strictly increasing t
  flow_event event{event_kind::reached_t_end, 0.0};
  // Metadata for verification against a scenario.
  symmetric_space space{space_kind::sphere, 2, 1, 0, 1.0, std::numbers::pi};
  warp_family family = warp_family::cosh;
  double warp_a = 0.0;
  double warp_beta = 0.0;
};

// u_i = c0 + c1 cos(mode pi x_i / L); satisfies the discrete Neumann ends
// exactly by the ghost reflection, for any mode.
inline profile initial_cosine(const symmetric_space& s, double c0, double c1,
                              int mode, int grid_n) {
  if (grid_n < 8)
    throw precondition_error("initial_cosine: grid_n must be >= 8");
  if (mode < 0)
    throw precondition_error("initial_cosine: mode must be nonnegative");
  std::vector<double> u(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i)
    u[i] = c0 + c1 * std::cos(std::numbers::pi * mode * i / grid_n);
  return profile{s, grid_n, std::move(u)};
}

namespace detail {

struct flow_workspace {
  geom_core core;  // core of the current committed state
  geom_core ctmp;
  std::vector<double> k1, k2, k3, k4;
  profile stage;
};

inline double min_q(const geom_core& c) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < c.r.size(); ++i)
    m = std::min(m, c.r[i] * c.r[i] + c.mu[i]);
  return m;
}

// One RK4 step in place; requires ws.core filled for p, leaves ws.core stale.
inline void rk4_advance(profile& p, const warping_function& w, double dt,
                        flow_workspace& ws) {
  const int n = p.grid_n;
  rhs_from_core(p, ws.core, ws.k1);
  ws.stage.space = p.space;
  ws.stage.grid_n = n;
  ws.stage.u.resize(n + 1);
  auto stage_rhs = [&](const std::vector<double>& k, double frac,
                       std::vector<double>& kout) {
    double c = dt * frac;
    for (int i = 0; i <= n; ++i) ws.stage.u[i] = p.u[i] + c * k[i];
    fill_core(ws.stage, w, ws.ctmp);
    rhs_from_core(ws.stage, ws.ctmp, kout);
  };
  stage_rhs(ws.k1, 0.5, ws.k2);
  stage_rhs(ws.k2, 0.5, ws.k3);
  stage_rhs(ws.k3, 1.0, ws.k4);
  const double dt6 = dt / 6.0;
  for (int i = 0; i <= n; ++i) {
    p.u[i] += dt6 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    if (!std::isfinite(p.u[i]))
      throw nonfinite_error("step: state is not finite at node " +
                            std::to_string(i));
  }
}

}  // namespace detail

inline double stable_dt(const profile& p, const warping_function& w,
                        const solver_config& cfg) {
  if (!(cfg.safety > 0.0 && cfg.safety < 1.0))
    throw precondition_error("stable_dt: safety must lie in (0, 1)");
  detail::geom_core c;
  detail::fill_core(p, w, c);
  return cfg.safety * p.dx() * p.dx() * detail::min_q(c);
}

inline profile step(const profile& p, const warping_function& w, double dt) {
  if (!(dt > 0.0)) throw precondition_error("step: dt must be positive");
  profile q = p;
  detail::flow_workspace ws;
  detail::fill_core(q, w, ws.core);
  detail::rk4_advance(q, w, dt, ws);
  return q;
}

inline trajectory run(const profile& p0, const warping_function& w,
                      const solver_config& cfg) {
  cfg.validate();
  if (p0.grid_n != cfg.grid_n)
    throw precondition_error("run: profile grid_n " + std::to_string(p0.grid_n) +
                             " does not match solver_config grid_n " +
                             std::to_string(cfg.grid_n));

  trajectory traj;
  traj.space = p0.space;
  traj.family = w.family();
  traj.warp_a = w.param_a();
  traj.warp_beta = w.param_beta();

  profile p = p0;
  detail::flow_workspace ws;
  double t = 0.0;
  bool ended_by_event = false;

  auto append_row = [&](double tt) {
    if (!traj.series.empty() && traj.series.back().t == tt) return;
    series_sample s{tt, std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), 0.0,
                    std::numeric_limits<double>::infinity()};
    for (int i = 0; i <= p.grid_n; ++i) {
      s.min_u = std::min(s.min_u, p.u[i]);
      s.max_u = std::max(s.max_u, p.u[i]);
      s.phi = std::max(s.phi, ws.core.mu[i]);
      s.min_theta = std::min(s.min_theta, ws.core.r[i] / ws.core.w[i]);
    }
    traj.series.push_back(s);
  };
  auto margin_violated = [&]() {
    for (double ui : p.u)
      if (w.domain().gap(ui) < cfg.domain_margin) return true;
    return false;
  };
  auto max_mu = [&]() {
    double m = 0.0;
    for (double v : ws.core.mu) m = std::max(m, v);
    return m;
  };

  try {
    detail::fill_core(p, w, ws.core);
  } catch (const domain_exit_error&) {
    // Initial data is not even representable; no series entry is possible.
    traj.event = {event_kind::domain_exit, 0.0};
    return traj;
  }
  append_row(0.0);
  traj.snapshots.emplace_back(0.0, p);
  if (margin_violated()) {
    traj.event = {event_kind::domain_exit, 0.0};
    return traj;
  }
  if (max_mu() > cfg.grad_blowup_threshold) {
    traj.event = {event_kind::gradient_blowup, 0.0};
    return traj;
  }

  long k = 1;
  const double dx2 = p.dx() * p.dx();
  while (t < cfg.t_end) {
    double target = std::min(k * cfg.output_every, cfg.t_end);
    if (target <= t) {
      ++k;
      continue;
    }
    double dts = cfg.safety * dx2 * detail::min_q(ws.core);
    if (dts < 1e-14) {
      traj.event = {event_kind::step_underflow, t};
      append_row(t);
      ended_by_event = true;
      break;
    }
    double dt = std::min(dts, target - t);
    try {
      detail::rk4_advance(p, w, dt, ws);
    } catch (const domain_exit_error&) {
      traj.event = {event_kind::domain_exit, t};
      ended_by_event = true;
      break;
    } catch (const nonfinite_error&) {
      traj.event = {event_kind::gradient_blowup, t};
      ended_by_event = true;
      break;
    }
    t += dt;
    if (std::abs(target - t) < 1e-12 * std::max(1.0, target)) t = target;
    try {
      detail::fill_core(p, w, ws.core);
    } catch (const domain_exit_error&) {
      traj.event = {event_kind::domain_exit, t};
      ended_by_event = true;
      break;
    }
    if (margin_violated()) {
      traj.event = {event_kind::domain_exit, t};
      append_row(t);
      ended_by_event = true;
      break;
    }
    if (max_mu() > cfg.grad_blowup_threshold) {
      traj.event = {event_kind::gradient_blowup, t};
      append_row(t);
      ended_by_event = true;
      break;
    }
    if (t == target) {
      append_row(t);
      traj.snapshots.emplace_back(t, p);
      ++k;
    }
  }
  if (!ended_by_event) traj.event = {event_kind::reached_t_end, cfg.t_end};
  return traj;
}

// Series table; the event column is empty except on the final row.
inline void write_series_csv(std::ostream& os, const trajectory& traj) {
  os << "t,min_u,max_u,phi,min_theta,event\n";
  for (size_t i = 0; i < traj.series.size(); ++i) {
    const series_sample& s = traj.series[i];
    os << format_short(s.t) << ',' << format_short(s.min_u) << ','
       << format_short(s.max_u) << ',' << format_short(s.phi) << ','
       << format_short(s.min_theta) << ',';
    if (i + 1 == traj.series.size()) os << to_string(traj.event.kind);
    os << '\n';
  }
}

}  // namespace wmcf
