#pragma once

// JSON run configuration. Strict schema: unknown keys are rejected at every
// level, defaults fill omitted optional fields, and every validation error
// names the offending field.

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "wmcf/compare.hpp"
#include "wmcf/errors.hpp"
#include "wmcf/flow.hpp"
#include "wmcf/space.hpp"
#include "wmcf/warp.hpp"

namespace wmcf {

struct initial_cosine_spec {
  double c0 = 0.0;
  double c1 = 0.0;
  int mode = 1;
};
struct initial_constant_spec {
  double z0 = 0.0;
};
using initial_spec = std::variant<initial_cosine_spec, initial_constant_spec>;

struct check_config {
  int num_samples = 1001;
  std::optional<double> z_probe_lo;  // scenario B probe start; default a1 - 10
};

struct run_config {
  symmetric_space space{space_kind::sphere, 3, 2, 0, 1.0, std::numbers::pi};
  warping_function warping = warping_function::make_cosh(1.0);
  std::optional<initial_spec> initial;
  std::optional<solver_config> solver;
  std::optional<scenario> scen;
  double theta_floor = 0.0;
  double phibar0 = 1.0;     // slice initial value
  double rel_tol = 1e-10;   // slice ODE tolerance
  check_config check;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known)
      throw config_error("config: unknown key '" + it.key() + "' in " + where);
  }
}

inline const json& require(const json& obj, const std::string& where,
                           const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw config_error("config: " + where + "." + key + " is required");
  return *it;
}

inline double as_number(const json& v, const std::string& field) {
  if (!v.is_number())
    throw config_error("config: " + field + " must be a number");
  return v.get<double>();
}

inline int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer())
    throw config_error("config: " + field + " must be an integer");
  return v.get<int>();
}

inline std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string())
    throw config_error("config: " + field + " must be a string");
  return v.get<std::string>();
}

inline space_kind parse_kind(const std::string& s) {
  if (s == "sphere") return space_kind::sphere;
  if (s == "cp") return space_kind::complex_projective;
  if (s == "qp") return space_kind::quaternionic_projective;
  if (s == "op2") return space_kind::cayley_plane;
  throw config_error("config: space.kind must be one of "
                     "\"sphere\", \"cp\", \"qp\", \"op2\", got \"" + s + "\"");
}

}  // namespace detail

inline run_config parse_config(const std::string& text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: parse error: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config: document must be an object");
  detail::reject_unknown(doc, "$",
                         {"space", "warping", "initial", "solver", "scenario",
                          "theta_floor", "phibar0", "rel_tol", "check"});

  run_config rc;

  // space
  {
    const json& sp = detail::require(doc, "$", "space");
    if (!sp.is_object()) throw config_error("config: space must be an object");
    detail::reject_unknown(sp, "space", {"kind", "n", "lambda1"});
    space_kind kind =
        detail::parse_kind(detail::as_string(detail::require(sp, "space", "kind"),
                                             "space.kind"));
    int n = detail::as_int(detail::require(sp, "space", "n"), "space.n");
    double lambda1 = sp.contains("lambda1")
                         ? detail::as_number(sp["lambda1"], "space.lambda1")
                         : 1.0;
    try {
      rc.space = make_space(kind, n, lambda1);
    } catch (const error& e) {
      throw config_error(std::string("config: space: ") + e.what());
    }
  }

  // warping
  {
    const json& wp = detail::require(doc, "$", "warping");
    if (!wp.is_object()) throw config_error("config: warping must be an object");
    std::string fam =
        detail::as_string(detail::require(wp, "warping", "family"), "warping.family");
    try {
      if (fam == "cosh") {
        detail::reject_unknown(wp, "warping", {"family", "a"});
        rc.warping = warping_function::make_cosh(
            detail::as_number(detail::require(wp, "warping", "a"), "warping.a"));
      } else if (fam == "power") {
        detail::reject_unknown(wp, "warping", {"family", "a", "beta"});
        rc.warping = warping_function::make_power(
            detail::as_number(detail::require(wp, "warping", "a"), "warping.a"),
            detail::as_number(detail::require(wp, "warping", "beta"),
                              "warping.beta"));
      } else {
        throw config_error(
            "config: warping.family must be \"cosh\" or \"power\" (tabulated "
            "warpings are library-only), got \"" + fam + "\"");
      }
    } catch (const config_error&) {
      throw;
    } catch (const error& e) {
      throw config_error(std::string("config: warping: ") + e.what());
    }
  }

  // initial
  if (doc.contains("initial")) {
    const json& in = doc["initial"];
    if (!in.is_object()) throw config_error("config: initial must be an object");
    std::string type =
        detail::as_string(detail::require(in, "initial", "type"), "initial.type");
    if (type == "cosine") {
      detail::reject_unknown(in, "initial", {"type", "c0", "c1", "mode"});
      initial_cosine_spec cs;
      cs.c0 = detail::as_number(detail::require(in, "initial", "c0"), "initial.c0");
      cs.c1 = detail::as_number(detail::require(in, "initial", "c1"), "initial.c1");
      cs.mode = detail::as_int(detail::require(in, "initial", "mode"), "initial.mode");
      if (cs.mode < 0)
        throw config_error("config: initial.mode must be nonnegative");
      rc.initial = cs;
    } else if (type == "constant") {
      detail::reject_unknown(in, "initial", {"type", "z0"});
      initial_constant_spec ks;
      ks.z0 = detail::as_number(detail::require(in, "initial", "z0"), "initial.z0");
      rc.initial = ks;
    } else {
      throw config_error(
          "config: initial.type must be \"cosine\" or \"constant\", got \"" +
          type + "\"");
    }
  }

  // solver
  if (doc.contains("solver")) {
    const json& sv = doc["solver"];
    if (!sv.is_object()) throw config_error("config: solver must be an object");
    detail::reject_unknown(sv, "solver",
                           {"grid_n", "t_end", "safety", "output_every",
                            "grad_blowup_threshold", "domain_margin"});
    solver_config sc;
    sc.t_end = detail::as_number(detail::require(sv, "solver", "t_end"),
                                 "solver.t_end");
    if (sv.contains("grid_n"))
      sc.grid_n = detail::as_int(sv["grid_n"], "solver.grid_n");
    if (sv.contains("safety"))
      sc.safety = detail::as_number(sv["safety"], "solver.safety");
    if (sv.contains("output_every"))
      sc.output_every = detail::as_number(sv["output_every"], "solver.output_every");
    if (sv.contains("grad_blowup_threshold"))
      sc.grad_blowup_threshold =
          detail::as_number(sv["grad_blowup_threshold"],
                            "solver.grad_blowup_threshold");
    if (sv.contains("domain_margin"))
      sc.domain_margin = detail::as_number(sv["domain_margin"],
                                           "solver.domain_margin");
    try {
      sc.validate();
    } catch (const error& e) {
      throw config_error(std::string("config: solver: ") + e.what());
    }
    rc.solver = sc;
  }

  // scenario
  if (doc.contains("scenario")) {
    const json& sn = doc["scenario"];
    if (!sn.is_object()) throw config_error("config: scenario must be an object");
    std::string type =
        detail::as_string(detail::require(sn, "scenario", "type"), "scenario.type");
    if (type == "theorem_a") {
      detail::reject_unknown(sn, "scenario", {"type", "a0"});
      double a0 = detail::as_number(detail::require(sn, "scenario", "a0"),
                                    "scenario.a0");
      if (!(a0 > 0.0))
        throw config_error("config: scenario.a0 must be positive");
      rc.scen = scenario_a{a0};
    } else if (type == "theorem_b") {
      detail::reject_unknown(sn, "scenario", {"type", "alpha", "a1"});
      double alpha = detail::as_number(detail::require(sn, "scenario", "alpha"),
                                       "scenario.alpha");
      double a1 = detail::as_number(detail::require(sn, "scenario", "a1"),
                                    "scenario.a1");
      if (!(alpha > 1.0))
        throw config_error("config: scenario.alpha must be greater than 1");
      rc.scen = scenario_b{alpha, a1};
    } else {
      throw config_error(
          "config: scenario.type must be \"theorem_a\" or \"theorem_b\", got \"" +
          type + "\"");
    }
  }

  if (doc.contains("theta_floor")) {
    rc.theta_floor = detail::as_number(doc["theta_floor"], "theta_floor");
    if (!(rc.theta_floor >= 0.0 && rc.theta_floor < 1.0))
      throw config_error("config: theta_floor must lie in [0, 1)");
  }
  if (doc.contains("phibar0")) {
    rc.phibar0 = detail::as_number(doc["phibar0"], "phibar0");
    if (!(rc.phibar0 > 0.0))
      throw config_error("config: phibar0 must be positive");
  }
  if (doc.contains("rel_tol")) {
    rc.rel_tol = detail::as_number(doc["rel_tol"], "rel_tol");
    if (!(rc.rel_tol > 1e-14 && rc.rel_tol < 1e-3))
      throw config_error("config: rel_tol must lie in (1e-14, 1e-3)");
  }
  if (doc.contains("check")) {
    const json& ck = doc["check"];
    if (!ck.is_object()) throw config_error("config: check must be an object");
    detail::reject_unknown(ck, "check", {"num_samples", "z_probe_lo"});
    if (ck.contains("num_samples")) {
      rc.check.num_samples = detail::as_int(ck["num_samples"], "check.num_samples");
      if (rc.check.num_samples < 3)
        throw config_error("config: check.num_samples must be >= 3");
    }
    if (ck.contains("z_probe_lo"))
      rc.check.z_probe_lo = detail::as_number(ck["z_probe_lo"], "check.z_probe_lo");
  }

  return rc;
}

}  // namespace wmcf
