#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wmcf/flow.hpp"
#include "wmcf/geometry.hpp"

using namespace wmcf;

namespace {

profile cosine_profile(const symmetric_space& s, double c0, double c1, int mode,
                       int grid_n) {
  return initial_cosine(s, c0, c1, mode, grid_n);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

TEST_CASE("constant profile geometry") {
  symmetric_space s = make_space(space_kind::sphere, 3);
  warping_function w = warping_function::make_cosh(1.0);
  profile p = make_profile(s, std::vector<double>(65, 0.3));
  profile_derived d = derive(p, w);
  double tanh3 = std::tanh(0.3);
  for (int i = 0; i <= 64; ++i) {
    CHECK(d.du[i] == 0.0);
    CHECK(d.ddu[i] == 0.0);
    CHECK(d.mu[i] == 0.0);
    CHECK(d.r[i] == std::cosh(0.3));
    CHECK(std::abs(d.theta[i] - 1.0) <= 1e-15);
    CHECK(std::abs(d.H[i] - 3.0 * tanh3) <= 1e-15 * 3.0 * tanh3);
  }
}

TEST_CASE("derived fields satisfy their defining identities") {
  symmetric_space s = make_space(space_kind::complex_projective, 4);
  warping_function w = warping_function::make_cosh(1.0);
  profile p = cosine_profile(s, 0.1, 0.2, 2, 48);
  profile_derived d = derive(p, w);
  for (int i = 0; i <= 48; ++i) {
    CHECK(d.mu[i] == d.du[i] * d.du[i]);
    CHECK(d.w[i] == std::sqrt(d.r[i] * d.r[i] + d.mu[i]));
    CHECK(d.theta[i] == d.r[i] / d.w[i]);
    CHECK(d.theta[i] > 0.0);
    CHECK(d.theta[i] <= 1.0 + 1e-15);
  }
  // Neumann ends are exact by ghost reflection.
  CHECK(d.du[0] == 0.0);
  CHECK(d.du[48] == 0.0);
}

TEST_CASE("central differences converge at second order") {
  symmetric_space s = make_space(space_kind::sphere, 3);
  const double c0 = 0.2, c1 = 0.1;
  const int mode = 3;
  const double k = mode * std::numbers::pi / s.L;
  auto errors = [&](int grid_n) {
    warping_function w = warping_function::make_cosh(2.0);
    profile p = cosine_profile(s, c0, c1, mode, grid_n);
    profile_derived d = derive(p, w);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i <= grid_n; ++i) {
      double x = p.x(i);
      e1 = std::max(e1, std::abs(d.du[i] + c1 * k * std::sin(k * x)));
      e2 = std::max(e2, std::abs(d.ddu[i] + c1 * k * k * std::cos(k * x)));
    }
    return std::pair{e1, e2};
  };
  auto [a1, a2] = errors(32);
  auto [b1, b2] = errors(64);
  auto [c1e, c2e] = errors(128);
  CHECK(a1 > 1e-6);  // coarse error is genuinely nonzero
  CHECK(std::log2(a1 / b1) >= 1.9);
  CHECK(std::log2(b1 / c1e) >= 1.9);
  CHECK(std::log2(a2 / b2) >= 1.9);
  CHECK(std::log2(b2 / c2e) >= 1.9);
}

TEST_CASE("endpoint values converge to the analytic limits") {
  // At the ends u' vanishes and the angular drift term has a finite limit
  // proportional to u''. The discrete endpoint error must shrink at second
  // order toward the analytic value; a wrong limit coefficient would leave an
  // O(1) discrepancy.
  warping_function w = warping_function::make_cosh(2.0);
  const double c0 = 0.1, c1 = 0.05;
  const int mode = 2;
  for (symmetric_space s : {make_space(space_kind::sphere, 3),
                            make_space(space_kind::complex_projective, 4)}) {
    const double k = mode * std::numbers::pi / s.L;
    auto endpoint_errors = [&](int grid_n) {
      profile p = cosine_profile(s, c0, c1, mode, grid_n);
      std::vector<double> rhs = reduced_rhs(p, w);
      double coeff_l = s.m_lambda + s.m_2lambda;
      double coeff_r = s.m_2lambda > 0 ? s.m_2lambda : s.m_lambda;
      auto exact = [&](double u, double ddu_exact, double coeff) {
        warp_eval e = w.evaluate(u);
        double q = e.r * e.r;  // u' = 0 at the ends
        return ddu_exact / q + coeff * ddu_exact / (e.r * e.r) -
               s.n * e.r1 / e.r;
      };
      double ddu0 = -c1 * k * k;                                  // cos(0) = 1
      double dduL = -c1 * k * k * std::cos(mode * std::numbers::pi);
      double u0 = c0 + c1;
      double uL = c0 + c1 * std::cos(mode * std::numbers::pi);
      return std::pair{std::abs(rhs.front() - exact(u0, ddu0, coeff_l)),
                       std::abs(rhs.back() - exact(uL, dduL, coeff_r))};
    };
    auto [l64, r64] = endpoint_errors(64);
    auto [l128, r128] = endpoint_errors(128);
    CAPTURE(to_string(s.kind));
    CHECK(l64 > 1e-9);
    CHECK(r64 > 1e-9);
    CHECK(l128 <= l64 / 3.0 + 1e-13);
    CHECK(r128 <= r64 / 3.0 + 1e-13);
  }
}

TEST_CASE("rhs and curvature routes agree") {
  std::mt19937_64 rng(20240818);
  std::uniform_real_distribution<double> dc0(-0.4, 0.4);
  std::uniform_real_distribution<double> dcm(-0.06, 0.06);
  warping_function w = warping_function::make_cosh(1.0);
  for (symmetric_space s : {make_space(space_kind::sphere, 3),
                            make_space(space_kind::complex_projective, 4),
                            make_space(space_kind::quaternionic_projective, 8),
                            make_space(space_kind::cayley_plane, 16)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const int grid_n = 64;
      std::vector<double> u(grid_n + 1, dc0(rng));
      for (int m = 1; m <= 4; ++m) {
        double cm = dcm(rng);
        for (int i = 0; i <= grid_n; ++i)
          u[i] += cm * std::cos(std::numbers::pi * m * i / grid_n);
      }
      profile p = make_profile(s, std::move(u));
      std::vector<double> H = mean_curvature(p, w);
      double hmax = 0.0;
      for (double h : H) hmax = std::max(hmax, std::abs(h));
      double worst = rhs_curvature_consistency(p, w);
      CAPTURE(to_string(s.kind), trial);
      CHECK(worst <= 1e-12 * (1.0 + hmax));
    }
  }
}

TEST_CASE("profiles outside the warping domain are rejected by node") {
  symmetric_space s = make_space(space_kind::sphere, 3);
  warping_function w = warping_function::make_cosh(1.0);
  std::vector<double> u(17, 0.0);
  u[3] = 1.5;
  profile p = make_profile(s, std::move(u));
  CHECK_THROWS_MATCHES(derive(p, w), domain_exit_error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("node 3")));
}

TEST_CASE("profiles need at least nine nodes") {
  symmetric_space s = make_space(space_kind::sphere, 3);
  CHECK_THROWS_AS(make_profile(s, std::vector<double>(8, 0.0)),
                  precondition_error);
  CHECK_NOTHROW(make_profile(s, std::vector<double>(9, 0.0)));
}

TEST_CASE("profile csv round-trips at full precision") {
  symmetric_space s = make_space(space_kind::sphere, 3);
  warping_function w = warping_function::make_cosh(1.0);
  profile p = cosine_profile(s, 0.07, 0.13, 1, 16);
  profile_derived d = derive(p, w);
  std::ostringstream os;
  write_profile_csv(os, p, w);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "x,u,du,ddu,mu,w,theta,H");
  for (int i = 0; i <= 16; ++i) {
    REQUIRE(std::getline(is, line));
    std::vector<std::string> f = split_csv(line);
    REQUIRE(f.size() == 8);
    CHECK(std::strtod(f[0].c_str(), nullptr) == p.x(i));
    CHECK(std::strtod(f[1].c_str(), nullptr) == p.u[i]);
    CHECK(std::strtod(f[2].c_str(), nullptr) == d.du[i]);
    CHECK(std::strtod(f[3].c_str(), nullptr) == d.ddu[i]);
    CHECK(std::strtod(f[7].c_str(), nullptr) == d.H[i]);
  }
  CHECK_FALSE(std::getline(is, line));
}
