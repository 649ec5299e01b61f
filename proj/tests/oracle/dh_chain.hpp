#pragma once

// Reference transform chain built from plain arrays. It shares no code with
// the library so it can serve as an independent check of forward kinematics.

#include <array>
#include <cmath>
#include <numbers>

namespace forte::oracle {

using Mat4 = std::array<std::array<double, 4>, 4>;

struct Row {
  double theta_offset_deg, alpha_deg, a_mm, d_mm;
};

// Default geometry, lengths in millimetres.
inline constexpr std::array<Row, 6> kDefaultTable{{
    {0, 90, 0, 93.53312},
    {0, 0, 200, 0},
    {90, 90, 34, 0},
    {0, -90, 0, 173},
    {0, 90, 0, 0},
    {0, 0, 0, 91.33},
}};

// Table values placed verbatim on the common normals.
inline constexpr std::array<Row, 6> kLiteralTable{{
    {0, 90, 0, 93.53312},
    {0, 0, 200, 0},
    {0, 90, 34, 0},
    {0, -90, 173, 0},
    {0, 90, 23.88, 0},
    {0, 0, 67.45, 0},
}};

inline Mat4 identity() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 multiply(const Mat4& x, const Mat4& y) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += x[i][k] * y[k][j];
  return r;
}

// Distal link transform written out element by element.
inline Mat4 link(const Row& row, double q_deg) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double th = (q_deg + row.theta_offset_deg) * kDeg;
  const double al = row.alpha_deg * kDeg;
  const double ct = std::cos(th), st = std::sin(th), ca = std::cos(al), sa = std::sin(al);
  const double a = row.a_mm / 1000.0, d = row.d_mm / 1000.0;
  return {{{ct, -st * ca, st * sa, a * ct},
           {st, ct * ca, -ct * sa, a * st},
           {0.0, sa, ca, d},
           {0.0, 0.0, 0.0, 1.0}}};
}

// Base-to-frame-n transform for joint angles in degrees.
inline Mat4 chain(const std::array<Row, 6>& table, const std::array<double, 6>& q_deg, int n = 6) {
  Mat4 t = identity();
  for (int i = 0; i < n; ++i) t = multiply(t, link(table[i], q_deg[i]));
  return t;
}

}  // namespace forte::oracle
