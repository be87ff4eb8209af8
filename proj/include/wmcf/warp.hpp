#pragma once

// Warping function families r(z) on an open interval, evaluated together with
// first and second derivatives, plus sampled checks of the convexity
// hypotheses behind the two long-time-existence scenarios.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "wmcf/errors.hpp"

namespace wmcf {

// Open interval; lo = -inf or hi = +inf are allowed.
struct interval {
  double lo;
  double hi;
  bool contains(double z) const { return z > lo && z < hi; }
  // Distance to the nearer endpoint; +inf for an unbounded side.
  double gap(double z) const { return std::min(z - lo, hi - z); }
};

enum class warp_family { cosh, power, tabulated };

inline std::string to_string(warp_family f) {
  switch (f) {
    case warp_family::cosh: return "cosh";
    case warp_family::power: return "power";
    case warp_family::tabulated: return "tabulated";
  }
  return "?";
}

struct warp_eval {
  double r;
  double r1;
  double r2;
};

class warping_function {
 public:
  // r = cosh z on (-half_width, half_width).
  static warping_function make_cosh(double half_width) {
    if (!(half_width > 0.0))
      throw precondition_error("make_cosh: half_width must be positive");
    warping_function w;
    w.family_ = warp_family::cosh;
    w.domain_ = {-half_width, half_width};
    w.a_ = half_width;
    return w;
  }

  // r = (a - z)^(-beta) on (-inf, a), beta > 0.
  static warping_function make_power(double a, double beta) {
    if (!(beta > 0.0))
      throw precondition_error("make_power: beta must be positive");
    warping_function w;
    w.family_ = warp_family::power;
    w.domain_ = {-std::numeric_limits<double>::infinity(), a};
    w.a_ = a;
    w.beta_ = beta;
    return w;
  }

  // Caller-supplied triple (r, r', r''); r must stay finite and positive.
  static warping_function make_tabulated(interval dom,
                                         std::function<warp_eval(double)> f) {
    if (!(dom.lo < dom.hi))
      throw precondition_error("make_tabulated: empty domain");
    if (!f) throw precondition_error("make_tabulated: null callable");
    warping_function w;
    w.family_ = warp_family::tabulated;
    w.domain_ = dom;
    w.table_ = std::move(f);
    return w;
  }

  warp_eval evaluate(double z) const {
    if (!domain_.contains(z))
      throw domain_exit_error("evaluate: z = " + std::to_string(z) +
                              " is outside the open warping domain (" +
                              std::to_string(domain_.lo) + ", " +
                              std::to_string(domain_.hi) + ")");
    switch (family_) {
      case warp_family::cosh:
        return {std::cosh(z), std::sinh(z), std::cosh(z)};
      case warp_family::power: {
        double s = a_ - z;
        double r = std::pow(s, -beta_);
        return {r, beta_ * r / s, beta_ * (beta_ + 1.0) * r / (s * s)};
      }
      case warp_family::tabulated: {
        warp_eval e = table_(z);
        if (!std::isfinite(e.r) || !std::isfinite(e.r1) || !std::isfinite(e.r2) ||
            !(e.r > 0.0))
          throw nonfinite_error("evaluate: tabulated warping returned a non-finite "
                                "or non-positive value at z = " +
                                std::to_string(z));
        return e;
      }
    }
    throw error("evaluate: unreachable");
  }

  warp_family family() const { return family_; }
  const interval& domain() const { return domain_; }
  double param_a() const { return a_; }
  double param_beta() const { return beta_; }

  // Family tag and parameters match; used for trajectory metadata checks.
  bool same_family(const warping_function& o) const {
    return family_ == o.family_ && a_ == o.a_ && beta_ == o.beta_ &&
           domain_.lo == o.domain_.lo && domain_.hi == o.domain_.hi;
  }

 private:
  warping_function() = default;
  warp_family family_ = warp_family::cosh;
  interval domain_{-1.0, 1.0};
  double a_ = 0.0;
  double beta_ = 0.0;
  std::function<warp_eval(double)> table_;
};

struct condition_report {
  bool passed;
  double worst_margin;  // raw minimum of the checked inequality's left side
  double worst_point;   // sample attaining worst_margin
  std::string condition;
};

namespace detail {

// Per-sample pass test for margin >= 0 conditions. The tolerance scales with
// the magnitude of the combined terms so that exact-equality cases classify
// correctly when the terms themselves are large.
inline bool margin_ok(double margin, double scale, double tol) {
  return margin >= -tol * (1.0 + scale);
}

}  // namespace detail

// Scenario A hypothesis on (-half_width, half_width): r(0) = 1, r'(0) = 0,
// r increasing away from 0, and r r'' - r'^2 >= 0 at midpoint samples.
// Samples exclude the endpoints by half a step.
inline condition_report check_theorem_a(const warping_function& w, double half_width,
                                        int num_samples, double tol = 1e-12) {
  if (num_samples < 3)
    throw precondition_error("check_theorem_a: num_samples must be >= 3");
  if (!(half_width > 0.0))
    throw precondition_error("check_theorem_a: half_width must be positive");
  if (w.domain().lo > -half_width || w.domain().hi < half_width)
    throw precondition_error(
        "check_theorem_a: (-half_width, half_width) is not contained in the "
        "warping domain");

  condition_report rep{true, std::numeric_limits<double>::infinity(), 0.0,
                       "theorem_a"};
  warp_eval c = w.evaluate(0.0);
  if (std::abs(c.r - 1.0) > tol || std::abs(c.r1) > tol) rep.passed = false;

  double h = 2.0 * half_width / num_samples;
  double zero_band = 1e-12 * half_width;  // midpoint grids of odd size hit z = 0
  for (int j = 0; j < num_samples; ++j) {
    double z = -half_width + (j + 0.5) * h;
    warp_eval e = w.evaluate(z);
    if (z > zero_band && !(e.r1 > -tol)) rep.passed = false;
    if (z < -zero_band && !(e.r1 < tol)) rep.passed = false;
    double margin = e.r * e.r2 - e.r1 * e.r1;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_point = z;
    }
    if (!detail::margin_ok(margin, std::abs(e.r * e.r2) + e.r1 * e.r1, tol))
      rep.passed = false;
  }
  return rep;
}

// Scenario B hypothesis on (z_probe_lo, z_probe_hi): r' > 0 and
// r r'' - (1 + alpha) r'^2 >= 0 at midpoint samples, for alpha > 1.
inline condition_report check_theorem_b(const warping_function& w, double alpha,
                                        double z_probe_lo, double z_probe_hi,
                                        int num_samples, double tol = 1e-12) {
  if (!(alpha > 1.0))
    throw precondition_error("check_theorem_b: alpha must be greater than 1");
  if (num_samples < 3)
    throw precondition_error("check_theorem_b: num_samples must be >= 3");
  if (!(z_probe_lo < z_probe_hi))
    throw precondition_error("check_theorem_b: empty probe window");
  if (w.domain().lo > z_probe_lo || w.domain().hi < z_probe_hi)
    throw precondition_error(
        "check_theorem_b: probe window is not contained in the warping domain");

  condition_report rep{true, std::numeric_limits<double>::infinity(), z_probe_lo,
                       "theorem_b"};
  double h = (z_probe_hi - z_probe_lo) / num_samples;
  for (int j = 0; j < num_samples; ++j) {
    double z = z_probe_lo + (j + 0.5) * h;
    warp_eval e = w.evaluate(z);
    if (!(e.r1 > -tol)) rep.passed = false;
    double margin = e.r * e.r2 - (1.0 + alpha) * e.r1 * e.r1;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_point = z;
    }
    if (!detail::margin_ok(margin,
                           std::abs(e.r * e.r2) + (1.0 + alpha) * e.r1 * e.r1, tol))
      rep.passed = false;
  }
  return rep;
}

}  // namespace wmcf
