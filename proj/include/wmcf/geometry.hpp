#pragma once

// Discrete graph profiles over the orbit coordinate x in [0, L] and their
// pointwise geometry: derivatives, slope, tilt factor, and mean curvature.
//
// Spatial discretization: uniform nodes x_i = i L / grid_n with second order
// central differences and ghost-node reflection u[-1] = u[1],
// u[grid_n+1] = u[grid_n-1], so both endpoint first derivatives vanish
// exactly (the invariance of the profile forces Neumann ends).
//
// The angular drift coefficient
//   B(x) = m_lambda lambda1 cot(lambda1 x) + 2 m_2lambda lambda1 cot(2 lambda1 x)
// is singular at the ends, but it always appears multiplied by u', and the
// product has a finite limit. At x = 0 the product u' B tends to
// (m_lambda + m_2lambda) u''(0); at x = L it tends to m_2lambda u''(L) when
// m_2lambda > 0 and to m_lambda u''(L) when m_2lambda = 0. Endpoint nodes use
// these closed-form limits instead of the cot expression; no shifted or
// regularized cot evaluation is involved. When m_2lambda = 0 the doubled-root
// term is skipped entirely so it contributes exactly zero at every node.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "wmcf/errors.hpp"
#include "wmcf/format.hpp"
#include "wmcf/space.hpp"
#include "wmcf/warp.hpp"

namespace wmcf {

struct profile {
  symmetric_space space;
  int grid_n;
  std::vector<double> u;  // nodal values, size grid_n + 1

  double dx() const { return space.L / grid_n; }
  double x(int i) const { return space.L * i / grid_n; }
};

inline profile make_profile(const symmetric_space& s, std::vector<double> u) {
  if (u.size() < 9)
    throw precondition_error("make_profile: grid_n must be at least 8, got " +
                             std::to_string(u.size() - 1));
  profile p{s, static_cast<int>(u.size()) - 1, std::move(u)};
  return p;
}

struct profile_derived {
  std::vector<double> du;     // central first derivative, zero at both ends
  std::vector<double> ddu;    // central second derivative
  std::vector<double> mu;     // du^2
  std::vector<double> r;      // r(u_i)
  std::vector<double> w;      // sqrt(r^2 + mu)
  std::vector<double> theta;  // r / w, the tilt factor in (0, 1]
  std::vector<double> H;      // mean curvature of the graph
};

namespace detail {

// Everything the flow right-hand side needs, reusable across calls.
struct geom_core {
  std::vector<double> du, ddu, mu, r, r1, w;
};

inline double drift_bracket(const symmetric_space& s, double x) {
  double b = s.m_lambda * s.lambda1 / std::tan(s.lambda1 * x);
  if (s.m_2lambda > 0)
    b += 2.0 * s.m_2lambda * s.lambda1 / std::tan(2.0 * s.lambda1 * x);
  return b;
}

// Coefficient c in the endpoint limit u' B -> c u''.
inline double endpoint_drift_coeff(const symmetric_space& s, bool left_end) {
  if (left_end) return s.m_lambda + s.m_2lambda;
  return s.m_2lambda > 0 ? s.m_2lambda : s.m_lambda;
}

inline void fill_core(const profile& p, const warping_function& w, geom_core& c) {
  const int n = p.grid_n;
  if (n < 8 || p.u.size() != static_cast<size_t>(n) + 1)
    throw precondition_error("profile: grid_n must be >= 8 with grid_n + 1 nodes");
  for (int i = 0; i <= n; ++i)
    if (!w.domain().contains(p.u[i]))
      throw domain_exit_error("profile leaves the warping domain at node " +
                              std::to_string(i) + ": u = " +
                              std::to_string(p.u[i]));
  c.du.resize(n + 1);
  c.ddu.resize(n + 1);
  c.mu.resize(n + 1);
  c.r.resize(n + 1);
  c.r1.resize(n + 1);
  c.w.resize(n + 1);
  const double dx = p.dx();
  const double inv2dx = 1.0 / (2.0 * dx);
  const double invdx2 = 1.0 / (dx * dx);
  for (int i = 0; i <= n; ++i) {
    double um = p.u[i == 0 ? 1 : i - 1];       // ghost reflection at i = 0
    double up = p.u[i == n ? n - 1 : i + 1];   // ghost reflection at i = n
    c.du[i] = (up - um) * inv2dx;
    c.ddu[i] = (up - 2.0 * p.u[i] + um) * invdx2;
    c.mu[i] = c.du[i] * c.du[i];
    warp_eval e = w.evaluate(p.u[i]);
    c.r[i] = e.r;
    c.r1[i] = e.r1;
    c.w[i] = std::sqrt(e.r * e.r + c.mu[i]);
  }
}

// u' B with the endpoint limits substituted.
inline double drift_product(const profile& p, const geom_core& c, int i) {
  if (i == 0) return endpoint_drift_coeff(p.space, true) * c.ddu[0];
  if (i == p.grid_n)
    return endpoint_drift_coeff(p.space, false) * c.ddu[p.grid_n];
  return c.du[i] * drift_bracket(p.space, p.x(i));
}

inline void curvature_from_core(const profile& p, const geom_core& c,
                                std::vector<double>& H) {
  const int n = p.grid_n;
  const double nd = p.space.n;
  H.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    double w3 = c.w[i] * c.w[i] * c.w[i];
    H[i] = (c.r1[i] * c.mu[i] - c.r[i] * c.ddu[i]) / w3 -
           drift_product(p, c, i) / (c.r[i] * c.w[i]) + nd * c.r1[i] / c.w[i];
  }
}

inline void rhs_from_core(const profile& p, const geom_core& c,
                          std::vector<double>& out) {
  const int n = p.grid_n;
  const double nd = p.space.n;
  out.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    double q = c.r[i] * c.r[i] + c.mu[i];
    out[i] = c.ddu[i] / q - (c.r1[i] / c.r[i]) * c.mu[i] / q +
             drift_product(p, c, i) / (c.r[i] * c.r[i]) - nd * c.r1[i] / c.r[i];
  }
}

inline void check_finite(const std::vector<double>& v, const char* what) {
  for (size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw nonfinite_error(std::string(what) + " is not finite at node " +
                            std::to_string(i));
}

}  // namespace detail

inline profile_derived derive(const profile& p, const warping_function& w) {
  detail::geom_core c;
  detail::fill_core(p, w, c);
  profile_derived d;
  d.du = c.du;
  d.ddu = c.ddu;
  d.mu = c.mu;
  d.r = c.r;
  d.w = c.w;
  d.theta.resize(p.grid_n + 1);
  for (int i = 0; i <= p.grid_n; ++i) d.theta[i] = c.r[i] / c.w[i];
  detail::curvature_from_core(p, c, d.H);
  return d;
}

inline std::vector<double> mean_curvature(const profile& p,
                                          const warping_function& w) {
  detail::geom_core c;
  detail::fill_core(p, w, c);
  std::vector<double> H;
  detail::curvature_from_core(p, c, H);
  detail::check_finite(H, "mean curvature");
  return H;
}

// Right-hand side of the reduced parabolic equation du/dt = ... whose
// stationary points are the minimal graphs; identically -(w/r) H.
inline std::vector<double> reduced_rhs(const profile& p,
                                       const warping_function& w) {
  detail::geom_core c;
  detail::fill_core(p, w, c);
  std::vector<double> rhs;
  detail::rhs_from_core(p, c, rhs);
  detail::check_finite(rhs, "reduced rhs");
  return rhs;
}

// Max over interior nodes of |rhs + (w/r) H|; a pure cross-check of the two
// formula routes, small compared to 1 + max|H| for any valid profile.
inline double rhs_curvature_consistency(const profile& p,
                                        const warping_function& w) {
  detail::geom_core c;
  detail::fill_core(p, w, c);
  std::vector<double> H, rhs;
  detail::curvature_from_core(p, c, H);
  detail::rhs_from_core(p, c, rhs);
  double worst = 0.0;
  for (int i = 1; i < p.grid_n; ++i)
    worst = std::max(worst, std::abs(rhs[i] + c.w[i] / c.r[i] * H[i]));
  return worst;
}

// Snapshot table, one row per node, 17 significant digits throughout.
inline void write_profile_csv(std::ostream& os, const profile& p,
                              const warping_function& w) {
  profile_derived d = derive(p, w);
  os << "x,u,du,ddu,mu,w,theta,H\n";
  for (int i = 0; i <= p.grid_n; ++i) {
    os << format_full(p.x(i)) << ',' << format_full(p.u[i]) << ','
       << format_full(d.du[i]) << ',' << format_full(d.ddu[i]) << ','
       << format_full(d.mu[i]) << ',' << format_full(d.w[i]) << ','
       << format_full(d.theta[i]) << ',' << format_full(d.H[i]) << '\n';
  }
}

}  // namespace wmcf
