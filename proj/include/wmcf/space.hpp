#pragma once

// Rank-one compact symmetric space data: orbit dimension, restricted root
// multiplicities, and the half-period L of the orbit coordinate.

#include <numbers>
#include <string>

#include "wmcf/errors.hpp"

namespace wmcf {

enum class space_kind {
  sphere,
  complex_projective,
  quaternionic_projective,
  cayley_plane,
};

inline std::string to_string(space_kind k) {
  switch (k) {
    case space_kind::sphere: return "sphere";
    case space_kind::complex_projective: return "cp";
    case space_kind::quaternionic_projective: return "qp";
    case space_kind::cayley_plane: return "op2";
  }
  return "?";
}

struct symmetric_space {
  space_kind kind;
  int n;           // dimension of the compact factor
  int m_lambda;    // multiplicity of the short restricted root
  int m_2lambda;   // multiplicity of the doubled root; 0 exactly for spheres
  double lambda1;  // scale of the short root
  double L;        // half-period: pi/lambda1 if m_2lambda = 0, else pi/(2 lambda1)
};

inline bool operator==(const symmetric_space& a, const symmetric_space& b) {
  return a.kind == b.kind && a.n == b.n && a.lambda1 == b.lambda1;
}

// Multiplicities per family; always n = 1 + m_lambda + m_2lambda.
inline symmetric_space make_space(space_kind kind, int n, double lambda1 = 1.0) {
  if (!(lambda1 > 0.0))
    throw precondition_error("make_space: lambda1 must be positive, got " +
                             std::to_string(lambda1));
  int ml = 0, m2l = 0;
  switch (kind) {
    case space_kind::sphere:
      if (n < 2)
        throw dimension_error("make_space: sphere requires n >= 2, got n = " +
                              std::to_string(n));
      ml = n - 1;
      m2l = 0;
      break;
    case space_kind::complex_projective:
      if (n < 4 || n % 2 != 0)
        throw dimension_error(
            "make_space: complex projective space requires even n >= 4, got n = " +
            std::to_string(n));
      ml = n - 2;
      m2l = 1;
      break;
    case space_kind::quaternionic_projective:
      if (n < 8 || n % 4 != 0)
        throw dimension_error(
            "make_space: quaternionic projective space requires n >= 8 divisible "
            "by 4, got n = " +
            std::to_string(n));
      ml = n - 4;
      m2l = 3;
      break;
    case space_kind::cayley_plane:
      if (n != 16)
        throw dimension_error("make_space: the Cayley plane requires n = 16, got n = " +
                              std::to_string(n));
      ml = 8;
      m2l = 7;
      break;
  }
  const double pi = std::numbers::pi;
  double L = (m2l == 0) ? pi / lambda1 : pi / (2.0 * lambda1);
  return symmetric_space{kind, n, ml, m2l, lambda1, L};
}

}  // namespace wmcf
