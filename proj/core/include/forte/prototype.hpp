#pragma once

#include <array>
#include <utility>

// Values measured on the physical prototype. They feed calibration and
// reporting only; nothing in the library derives them.
namespace forte::prototype {

// Heaviest payload lifted without missed steps, kg.
inline constexpr double kMeasuredPayload = 0.63;

// Repeatability from dial-indicator cycles: (step rate, std in m).
inline constexpr std::array<std::pair<double, double>, 2> kRepeatabilityAnchors{{
    {500.0, 0.286e-3},
    {2500.0, 0.587e-3},
}};
inline constexpr double kMeanDeviation = 0.467e-3;  // m, over all speeds
inline constexpr std::array<double, 5> kTestedRates{500.0, 1000.0, 1500.0, 2000.0, 2500.0};
inline constexpr int kCyclesPerSpeed = 10;

inline constexpr double kQuotedReach = 0.467;         // m
inline constexpr double kQuotedTheoreticalPayload = 0.96;  // kg
inline constexpr double kQuotedTotalMass = 3.5;       // kg

// Structural masses after topology optimisation, kg.
inline constexpr double kUpperArmMassBefore = 0.337;
inline constexpr double kUpperArmMass = 0.18075;
inline constexpr double kForearmMass = 0.069;
inline constexpr double kForearmMassEarlyQuote = 0.11;

// Finite-element factors of safety. Not recomputed here.
inline constexpr double kUpperArmSafetyFactor = 4.38;
inline constexpr double kForearmSafetyFactor = 1.57;

// Fabrication inputs for a batch.
inline constexpr double kFilamentPerArm = 1080.21;  // g of PLA
inline constexpr double kSpoolMass = 1000.0;        // g
inline constexpr int kBatchSize = 25;
inline constexpr std::array<double, 3> kCableLengths{1100.0, 700.0, 400.0};  // mm: J1, J2, J5
inline constexpr double kCableSpool = 55000.0;                                // mm

}  // namespace forte::prototype
