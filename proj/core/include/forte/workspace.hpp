#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "forte/arm_model.hpp"
#include "forte/kinematics.hpp"

namespace forte {

enum class SamplingMode {
  kGrid,    // inclusive linspace over each joint range, joint 6 fastest
  kHalton,  // scrambled Halton sequence, `samples` points
};

struct WorkspaceOptions {
  SamplingMode mode = SamplingMode::kGrid;
  std::array<int, kJointCount> steps{25, 25, 25, 5, 5, 5};
  std::size_t samples = 0;  // Halton only
  std::uint64_t seed = 0;   // Halton scramble
  std::size_t max_samples = 50'000'000;
  unsigned threads = 0;
};

struct WorkspaceCloud {
  std::vector<Eigen::Vector3d> points;
  SamplingMode mode = SamplingMode::kGrid;
  std::array<int, kJointCount> steps{};
  std::uint64_t seed = 0;
};

// Number of samples `options` would produce.
std::size_t sample_count(const WorkspaceOptions& options);

// Throws Error(kResource) when sample_count exceeds max_samples and
// Error(kValidation) for fewer than 2 grid steps on any joint.
WorkspaceCloud sample_workspace(const ArmDescription& arm, const WorkspaceOptions& options = {});

struct Reach {
  double euclidean = 0.0;   // max |p|
  double horizontal = 0.0;  // max sqrt(x^2 + y^2)
  Eigen::Vector3d farthest = Eigen::Vector3d::Zero();
  Eigen::Vector3d widest = Eigen::Vector3d::Zero();
};

// Throws Error(kEmptyInput) on an empty cloud.
Reach max_reach(const WorkspaceCloud& cloud);

// Angular extent about base z of the points whose horizontal radius is at
// least `band` times the cloud maximum: 360 minus the widest empty gap.
// band = 0 uses every point off the axis.
double azimuth_span_deg(const WorkspaceCloud& cloud, double band = 0.98);

// Lowest z in the cloud.
double min_height(const WorkspaceCloud& cloud);

// Colinear sum of every length past the base column: sum |a| + |d| over
// rows 2..6. An upper bound on reach from the shoulder.
double link_length_sum(const ArmDescription& arm);

void write_cloud_csv(const WorkspaceCloud& cloud, std::ostream& out);

}  // namespace forte
