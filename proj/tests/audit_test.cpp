// Copyright 2026 The inlane Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "inlane/audit.hpp"

#include "gtest/gtest.h"

namespace inlane {
namespace {

GuideLine line_with_kappa(double kappa) {
  return GuideLine({SpiralCurve({0, kappa, 0, 0, 0, 0}, 100),
                    SpiralCurve({100 * kappa, kappa, 0, 0, 0, 0}, 100)},
                   {0, 0});
}

std::vector<LongitudinalState> cruise(std::size_t n, double v) {
  std::vector<LongitudinalState> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({v * 0.1 * static_cast<double>(i), v, 0.0});
  }
  return pts;
}

class AuditTest : public ::testing::Test {
 protected:
  AuditTest() : line_(line_with_kappa(0.0)), pts_(cruise(21, 10.0)) {
    corridor_.dt = 0.1;
    corridor_.s_min.assign(21, 0.0);
    corridor_.s_max.assign(21, 300.0);
    in_.line = &line_;
    in_.corridor = &corridor_;
    in_.init = {0, 10, 0};
  }
  double residual(const std::string& name) {
    return audit_trajectory(pts_, in_).family(name).max_residual;
  }

  GuideLine line_;
  FreeRegionProfile corridor_;
  std::vector<LongitudinalState> pts_;
  AuditInputs in_;
};

TEST_F(AuditTest, ConstantSpeedIsClean) {
  const ConstraintAudit a = audit_trajectory(pts_, in_);
  EXPECT_EQ(a.families.size(), 8u);
  EXPECT_LE(a.max_residual(), 1e-12);
  EXPECT_FALSE(a.min_gap);
}

TEST_F(AuditTest, EachFamilyCatchesItsViolation) {
  pts_[0].v = 10.5;
  EXPECT_NEAR(residual("initial_state"), 0.5, 1e-12);
  pts_ = cruise(21, 31.0);
  in_.init = {0, 31, 0};
  EXPECT_NEAR(residual("speed"), 1.0, 1e-12);
  pts_ = cruise(21, 10.0);
  in_.init = {0, 10, 0};

  pts_[7].a = 2.5;
  const ConstraintAudit a = audit_trajectory(pts_, in_);
  EXPECT_NEAR(a.family("acceleration").max_residual, 0.5, 1e-12);
  EXPECT_EQ(a.family("acceleration").worst_index, 7u);
  // The jump into 2.5 m/s^2 over 0.1 s is a 25 m/s^3 jerk.
  EXPECT_NEAR(a.family("jerk").max_residual, 21.0, 1e-9);
  EXPECT_EQ(a.family("jerk").worst_index, 6u);
  EXPECT_GT(a.family("continuity").max_residual, 1e-3);
  pts_[7].a = 0.0;

  pts_[12].s -= 1.5;
  EXPECT_NEAR(residual("forward_motion"), 1.5 - 1.0, 1e-9);
  pts_[12].s += 1.5;

  corridor_.s_max[15] = 14.0;
  EXPECT_NEAR(residual("corridor"), 1.0, 1e-9);
}

TEST_F(AuditTest, CentripetalUsesLineCurvature) {
  line_ = line_with_kappa(0.03);
  // 10^2 * 0.03 = 3 m/s^2 against a 2 m/s^2 limit.
  EXPECT_NEAR(residual("centripetal"), 1.0, 1e-9);
}

TEST_F(AuditTest, MinGapIsSignedDistanceToBlockedIntervals) {
  // Ego reaches s = 10 at step 10. A block at [14, 30] leaves 4 m; a block
  // over [18, 19] at step 19 (ego at 19) overlaps by zero.
  std::vector<STObstacle> obs{{"a", {{10, 1.0, 14.0, 30.0}}}};
  in_.obstacles = &obs;
  ConstraintAudit a = audit_trajectory(pts_, in_);
  ASSERT_TRUE(a.min_gap);
  EXPECT_NEAR(*a.min_gap, 4.0, 1e-12);
  EXPECT_EQ(a.min_gap_index, 10u);

  obs.push_back({"b", {{19, 1.9, 17.0, 20.0}}});
  a = audit_trajectory(pts_, in_);
  EXPECT_NEAR(*a.min_gap, -1.0, 1e-12);
  EXPECT_EQ(a.min_gap_index, 19u);

  // Blocks behind the ego count too.
  obs = {{"c", {{20, 2.0, 0.0, 15.0}}}};
  a = audit_trajectory(pts_, in_);
  EXPECT_NEAR(*a.min_gap, 5.0, 1e-12);
}

TEST_F(AuditTest, RejectsMismatchedInputs) {
  corridor_.s_min.pop_back();
  corridor_.s_max.pop_back();
  EXPECT_THROW(audit_trajectory(pts_, in_), InvalidArgument);
  in_.line = nullptr;
  EXPECT_THROW(audit_trajectory(pts_, in_), InvalidArgument);
  EXPECT_THROW(audit_trajectory(pts_, in_).family("nope"), InvalidArgument);
}

}  // namespace
}  // namespace inlane
