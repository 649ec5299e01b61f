#include "forte/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "forte/parallel.hpp"
#include "forte/units.hpp"
#include "halton.hpp"

namespace forte {

std::size_t sample_count(const WorkspaceOptions& options) {
  if (options.mode == SamplingMode::kHalton) return options.samples;
  std::size_t total = 1;
  for (int s : options.steps) {
    if (s < 2) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(s)) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= static_cast<std::size_t>(s);
  }
  return total;
}

WorkspaceCloud sample_workspace(const ArmDescription& arm, const WorkspaceOptions& options) {
  if (options.mode == SamplingMode::kGrid) {
    for (int i = 0; i < kJointCount; ++i) {
      if (options.steps[i] < 2) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("joint {} needs at least 2 grid steps, got {}", i + 1, options.steps[i]));
      }
    }
  }
  const std::size_t n = sample_count(options);
  if (n > options.max_samples) {
    throw Error(ErrorCode::kResource,
                fmt::format("{} workspace samples requested, cap is {}", n, options.max_samples));
  }

  WorkspaceCloud cloud;
  cloud.mode = options.mode;
  cloud.steps = options.steps;
  cloud.seed = options.seed;
  cloud.points.resize(n);

  // Cranley-Patterson shift: one seeded offset per dimension keeps every
  // sample a pure function of its index.
  std::array<double, kJointCount> shift{};
  if (options.mode == SamplingMode::kHalton) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& s : shift) s = unit(rng);
  }

  parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
    JointVector q;
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (options.mode == SamplingMode::kGrid) {
        std::size_t rest = idx;
        for (int j = kJointCount - 1; j >= 0; --j) {
          const auto steps = static_cast<std::size_t>(options.steps[j]);
          const auto k = rest % steps;
          rest /= steps;
          const auto& lim = arm.limits[j];
          q[j] = k + 1 == steps ? lim.max : lim.min + lim.span() * static_cast<double>(k) / static_cast<double>(steps - 1);
        }
      } else {
        for (int j = 0; j < kJointCount; ++j) {
          double u = detail::radical_inverse(idx + 1, detail::kHaltonBases[j]) + shift[j];
          if (u >= 1.0) u -= 1.0;
          q[j] = arm.limits[j].min + u * arm.limits[j].span();
        }
      }
      cloud.points[idx] = forward_kinematics(arm, q).position;
    }
  });
  return cloud;
}

Reach max_reach(const WorkspaceCloud& cloud) {
  if (cloud.points.empty()) throw Error(ErrorCode::kEmptyInput, "workspace cloud is empty");
  Reach r;
  for (const auto& p : cloud.points) {
    const double e = p.norm();
    const double h = std::hypot(p.x(), p.y());
    if (e > r.euclidean) {
      r.euclidean = e;
      r.farthest = p;
    }
    if (h > r.horizontal) {
      r.horizontal = h;
      r.widest = p;
    }
  }
  return r;
}

double azimuth_span_deg(const WorkspaceCloud& cloud, double band) {
  const Reach reach = max_reach(cloud);
  const double floor_radius = band * reach.horizontal;
  std::vector<double> angles;
  for (const auto& p : cloud.points) {
    const double h = std::hypot(p.x(), p.y());
    if (h > 1e-12 && h >= floor_radius) angles.push_back(std::atan2(p.y(), p.x()));
  }
  if (angles.empty()) return 0.0;
  std::sort(angles.begin(), angles.end());
  double widest_gap = angles.front() + 2.0 * kPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) widest_gap = std::max(widest_gap, angles[i] - angles[i - 1]);
  return rad_to_deg(2.0 * kPi - widest_gap);
}

double min_height(const WorkspaceCloud& cloud) {
  if (cloud.points.empty()) throw Error(ErrorCode::kEmptyInput, "workspace cloud is empty");
  double z = std::numeric_limits<double>::infinity();
  for (const auto& p : cloud.points) z = std::min(z, p.z());
  return z;
}

double link_length_sum(const ArmDescription& arm) {
  double sum = 0.0;
  for (int i = 1; i < kJointCount; ++i) sum += std::abs(arm.dh[i].a) + std::abs(arm.dh[i].d);
  return sum;
}

void write_cloud_csv(const WorkspaceCloud& cloud, std::ostream& out) {
  out << "x_m,y_m,z_m\n";
  for (const auto& p : cloud.points) out << fmt::format("{:.9f},{:.9f},{:.9f}\n", p.x(), p.y(), p.z());
}

}  // namespace forte
