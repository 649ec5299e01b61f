#include <gtest/gtest.h>

#include <sstream>

#include "forte/kinematics.hpp"
#include "forte/units.hpp"
#include "forte/workspace.hpp"
#include "test_support.hpp"

namespace forte {
namespace {

using test::default_arm;

WorkspaceOptions grid(std::array<int, kJointCount> steps, unsigned threads = 1) {
  WorkspaceOptions o;
  o.steps = steps;
  o.threads = threads;
  return o;
}

TEST(Workspace, TwoStepsPerJointGivesSixtyFourPoints) {
  const auto cloud = sample_workspace(default_arm(), grid({2, 2, 2, 2, 2, 2}));
  EXPECT_EQ(cloud.points.size(), 64u);
  EXPECT_EQ(sample_count(grid({2, 2, 2, 2, 2, 2})), 64u);
}

TEST(Workspace, GridVisitsLimitsInOrder) {
  const auto cloud = sample_workspace(default_arm(), grid({2, 2, 2, 2, 2, 2}));
  const auto& l = default_arm().limits;
  JointVector first, second;
  for (int i = 0; i < kJointCount; ++i) first[i] = second[i] = l[i].min;
  second[5] = l[5].max;
  EXPECT_LT((cloud.points[0] - forward_kinematics(default_arm(), first).position).norm(), 1e-15);
  EXPECT_LT((cloud.points[1] - forward_kinematics(default_arm(), second).position).norm(), 1e-15);
}

TEST(Workspace, PointsAreForwardKinematicsOfInLimitSamples) {
  const auto cloud = sample_workspace(default_arm(), grid({3, 3, 3, 3, 3, 3}));
  const auto& l = default_arm().limits;
  std::size_t k = 0;
  JointVector q;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          for (int e = 0; e < 3; ++e)
            for (int f = 0; f < 3; ++f) {
              const int idx[] = {a, b, c, d, e, f};
              for (int i = 0; i < kJointCount; ++i) q[i] = l[i].min + idx[i] * 0.5 * l[i].span();
              ASSERT_TRUE(within_limits(default_arm(), q));
              ASSERT_LT((cloud.points[k++] - forward_kinematics(default_arm(), q).position).norm(), 1e-14);
            }
}

TEST(Workspace, DefaultGridAzimuthSpan) {
  const auto cloud = sample_workspace(default_arm(), grid({25, 25, 25, 5, 5, 5}, 0));
  const double step = 330.0 / 24.0;
  EXPECT_NEAR(azimuth_span_deg(cloud), 330.0, step);
}

TEST(Workspace, ReachesBelowBasePlane) {
  const auto cloud = sample_workspace(default_arm(), grid({25, 25, 25, 5, 5, 5}, 0));
  EXPECT_LT(min_height(cloud), 0.0);
}

TEST(Workspace, ThreadCountDoesNotChangeCloud) {
  const auto a = sample_workspace(default_arm(), grid({7, 9, 9, 3, 3, 3}, 1));
  const auto b = sample_workspace(default_arm(), grid({7, 9, 9, 3, 3, 3}, 3));
  const auto c = sample_workspace(default_arm(), grid({7, 9, 9, 3, 3, 3}, 8));
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.points, c.points);

  WorkspaceOptions h;
  h.mode = SamplingMode::kHalton;
  h.samples = 5000;
  h.seed = 99;
  h.threads = 1;
  const auto ha = sample_workspace(default_arm(), h);
  h.threads = 4;
  const auto hb = sample_workspace(default_arm(), h);
  EXPECT_EQ(ha.points, hb.points);
}

TEST(Workspace, HaltonSeedChangesSamples) {
  WorkspaceOptions h;
  h.mode = SamplingMode::kHalton;
  h.samples = 100;
  h.seed = 1;
  const auto a = sample_workspace(default_arm(), h);
  h.seed = 2;
  const auto b = sample_workspace(default_arm(), h);
  ASSERT_EQ(a.points.size(), 100u);
  EXPECT_NE(a.points, b.points);
}

TEST(Workspace, SampleCapRaisesResourceError) {
  WorkspaceOptions o = grid({100, 100, 100, 100, 100, 100});
  try {
    sample_workspace(default_arm(), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResource);
  }
}

TEST(Workspace, FewerThanTwoStepsRejected) {
  try {
    sample_workspace(default_arm(), grid({1, 2, 2, 2, 2, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
}

TEST(Workspace, ReachOfSinglePoints) {
  WorkspaceCloud origin;
  origin.points = {Eigen::Vector3d::Zero()};
  EXPECT_EQ(max_reach(origin).euclidean, 0.0);
  EXPECT_EQ(max_reach(origin).horizontal, 0.0);

  WorkspaceCloud home;
  home.points = {forward_kinematics(default_arm(), JointVector::Zero()).position};
  EXPECT_NEAR(max_reach(home).euclidean, std::hypot(0.46433, 0.12753312), 1e-12);
  EXPECT_NEAR(max_reach(home).horizontal, 0.46433, 1e-12);
}

TEST(Workspace, EmptyCloudHasNoReach) {
  try {
    max_reach(WorkspaceCloud{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Workspace, HorizontalReachNearAnalyticMaximum) {
  // Upper arm plus the elbow-to-wrist diagonal plus the hand, all horizontal.
  const double analytic = 0.200 + std::hypot(0.173, 0.034) + 0.09133;
  const auto cloud = sample_workspace(default_arm(), grid({3, 41, 41, 5, 5, 5}, 0));
  const double r = max_reach(cloud).horizontal;
  EXPECT_LE(r, analytic + 1e-12);
  EXPECT_GT(r, analytic - 0.003);
}

TEST(Workspace, LinkLengthSum) {
  EXPECT_NEAR(link_length_sum(test::literal_arm()), 0.49833, 1e-12);
  EXPECT_NEAR(link_length_sum(default_arm()), 0.49833, 1e-12);
}

TEST(Workspace, CsvExport) {
  WorkspaceCloud c;
  c.points = {{0.1, -0.2, 0.3}};
  std::ostringstream os;
  write_cloud_csv(c, os);
  EXPECT_EQ(os.str(), "x_m,y_m,z_m\n0.100000000,-0.200000000,0.300000000\n");
}

TEST(Workspace, AzimuthSpanOfKnownRing) {
  WorkspaceCloud c;
  for (int a = -150; a <= 150; a += 10) {
    c.points.emplace_back(std::cos(deg_to_rad(a)), std::sin(deg_to_rad(a)), 0.0);
  }
  EXPECT_NEAR(azimuth_span_deg(c), 300.0, 1e-9);
}

}  // namespace
}  // namespace forte
