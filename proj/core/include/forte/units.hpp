#pragma once

#include <numbers>
#include <string_view>

namespace forte {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kStandardGravity = 9.81;
inline constexpr double kMillimetresPerFoot = 304.8;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Parses "90 deg", "-1.5 rad", "30deg" or a bare number (radians).
// Throws forte::Error(kParse) on anything else.
double parse_angle(std::string_view text);

}  // namespace forte
