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


#include "inlane/speed_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "inlane/pipeline.hpp"
#include "inlane/scenario_io.hpp"

namespace inlane {
namespace {

namespace L = trajectory_layout;

GuideLine constant_curvature(double kappa, double length = 150.0) {
  return GuideLine({SpiralCurve({0, kappa, 0, 0, 0, 0}, length / 2),
                    SpiralCurve({kappa * length / 2, kappa, 0, 0, 0, 0},
                                length / 2)},
                   {0, 0});
}

FreeRegionProfile open_corridor(const GuideLine& line, std::size_t n,
                                double dt = 0.1) {
  return select_free_region({}, {0, 15, 0}, dt, n, 5.0, 30.0,
                            line.extended_length());
}

TaskSpec cruise_task(double horizon = 18.0) {
  TaskSpec t;
  t.weights = weight_preset("comfortable");
  t.horizon = horizon;
  return t;
}

TEST(JerkBetween, Examples) {
  EXPECT_NEAR(jerk_between(2.0, 1.6, 0.1), -4.0, 1e-12);
  EXPECT_EQ(jerk_between(0.7, 0.7, 0.1), 0.0);
  EXPECT_NEAR(jerk_between(0.0, 0.4, 0.1), 4.0, 1e-12);
}

TEST(Propagate, Examples) {
  const auto a = propagate({0, 10, 0}, 0.0, 0.1);
  EXPECT_NEAR(a.s, 1.0, 1e-15);
  EXPECT_EQ(a.v, 10.0);
  EXPECT_EQ(a.a, 0.0);
  const auto b = propagate({0, 0, 0}, 6.0, 1.0);
  EXPECT_EQ(b.s, 1.0);
  EXPECT_EQ(b.v, 3.0);
  EXPECT_EQ(b.a, 6.0);
}

TEST(Propagate, ChainedStepsMatchClosedForm) {
  const LongitudinalState x0{3.0, 12.0, -0.5};
  const double j = 0.05, dt = 0.1;
  LongitudinalState x = x0;
  for (int i = 0; i < 180; ++i) x = propagate(x, j, dt);
  const double t = 18.0;
  EXPECT_NEAR(x.s, x0.s + x0.v * t + x0.a * t * t / 2 + j * t * t * t / 6, 1e-9);
  EXPECT_NEAR(x.v, x0.v + x0.a * t + j * t * t / 2, 1e-9);
  EXPECT_NEAR(x.a, x0.a + j * t, 1e-9);
}

TEST(BuildTrajectoryNlp, CountsForTwoPoints) {
  const GuideLine line = constant_curvature(0.0);
  const NlpProblem p = build_trajectory_nlp(line, open_corridor(line, 2), {0, 15, 0},
                                            cruise_task(0.1), {}, 0.1, 2);
  EXPECT_EQ(p.dimension, 6);
  EXPECT_EQ(p.num_equalities, 5);
  EXPECT_EQ(p.num_inequalities, 2 + 4);
}

TEST(BuildTrajectoryNlp, HardTerminalAddsRows) {
  const GuideLine line = constant_curvature(0.0);
  TaskSpec t = cruise_task(1.0);
  t.kind = TaskKind::kStop;
  t.s_task = 10;
  t.v_task = 0;
  t.a_task = 0;
  t.hard_terminal = true;
  const NlpProblem p = build_trajectory_nlp(line, open_corridor(line, 11),
                                            {0, 5, 0}, t, {}, 0.1, 11);
  EXPECT_EQ(p.num_equalities, 3 + 20 + 3);
}

TEST(BuildTrajectoryNlp, CentripetalBoundaryAtTenMetresPerSecond) {
  // kappa = 0.02 and v = 10 put v^2 kappa exactly on the 2 m/s^2 limit.
  const GuideLine line = constant_curvature(0.02);
  const NlpProblem p = build_trajectory_nlp(line, open_corridor(line, 2), {0, 10, 0},
                                            cruise_task(0.1), {}, 0.1, 2);
  Vector x(6);
  x << 0, 10, 0, 1, 10, 0;
  Vector g(p.num_inequalities);
  p.inequalities(x, g);
  // Rows: 2 jerk, then upper/lower centripetal per sample.
  EXPECT_NEAR(g[2], 0.0, 1e-12);
  EXPECT_NEAR(g[3], -4.0, 1e-12);
  EXPECT_NEAR(g[4], 0.0, 1e-12);
  x[4] = 10.1;
  p.inequalities(x, g);
  EXPECT_GT(g[4], 0.0);
}

TEST(SpeedCeiling, RadiusTenArc) {
  const GuideLine line = constant_curvature(0.1, 30.0);
  const auto cap = speed_ceiling(line, cruise_task(), {}, 0.5);
  EXPECT_NEAR(cap[10], std::sqrt(2.0 / 0.1), 1e-9);
  EXPECT_NEAR(cap[10], 4.47, 5e-3);
}

// Independent evaluation of the cost: squared acceleration, squared jerk,
// squared centripetal acceleration, squared speed error and soft terminal
// terms.
double reference_objective(const GuideLine& line, const TaskSpec& t,
                           const Vector& x, double dt) {
  const auto n = static_cast<std::size_t>(x.size() / 3);
  const CostWeights& w = t.weights;
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = x[L::s(i)], v = x[L::v(i)], a = x[L::a(i)];
    const double ac = v * v * point_at(line, s).kappa;
    f += w.accel * a * a + w.reference * (v - t.v_ref) * (v - t.v_ref);
    f += t.literal_centripetal ? w.centripetal * ac : w.centripetal * ac * ac;
    if (i + 1 < n) {
      const double j = (x[L::a(i + 1)] - a) / dt;
      f += w.jerk * j * j;
    }
  }
  const std::size_t e = n - 1;
  if (t.s_task) f += w.s_task * std::pow(x[L::s(e)] - *t.s_task, 2);
  if (t.v_task) f += w.v_task * std::pow(x[L::v(e)] - *t.v_task, 2);
  if (t.a_task) f += w.a_task * std::pow(x[L::a(e)] - *t.a_task, 2);
  return f;
}

Vector random_feasible(std::mt19937_64& rng, std::size_t n, double s_end) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(static_cast<Eigen::Index>(3 * n));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[L::s(i)] = s;
    x[L::v(i)] = 30.0 * u(rng);
    x[L::a(i)] = -4.0 + 6.0 * u(rng);
    s = std::min(s_end, s + 3.0 * u(rng));
  }
  x[L::s(0)] = 0;
  x[L::v(0)] = 15;
  x[L::a(0)] = 0;
  return x;
}

class UTurnNlp : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sc_ = new Scenario(load_scenario(INLANE_SCENARIO_DIR "/uturn_stop.scenario"));
    line_ = new GuideLine(smooth_guideline(sc_->raw_guide_line(), sc_->smoother).line);
  }
  static void TearDownTestSuite() {
    delete sc_;
    delete line_;
  }
  static Scenario* sc_;
  static GuideLine* line_;
};
Scenario* UTurnNlp::sc_ = nullptr;
GuideLine* UTurnNlp::line_ = nullptr;

TEST_F(UTurnNlp, ObjectiveMatchesIndependentEvaluation) {
  const std::size_t n = 40;
  std::mt19937_64 rng(9);
  for (bool literal : {false, true}) {
    TaskSpec t = sc_->task;
    t.literal_centripetal = literal;
    const NlpProblem p = build_trajectory_nlp(
        *line_, open_corridor(*line_, n), sc_->init, t, sc_->limits, 0.1, n);
    for (int k = 0; k < 5; ++k) {
      const Vector x = random_feasible(rng, n, 140.0);
      const double ref = reference_objective(*line_, t, x, 0.1);
      EXPECT_NEAR(p.objective(x), ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_F(UTurnNlp, LiteralCentripetalSwitchChangesOnlyThatTerm) {
  const std::size_t n = 20;
  std::mt19937_64 rng(4);
  const Vector x = random_feasible(rng, n, 140.0);
  TaskSpec t = sc_->task;
  const auto squared = build_trajectory_nlp(*line_, open_corridor(*line_, n),
                                            sc_->init, t, sc_->limits, 0.1, n);
  t.literal_centripetal = true;
  const auto literal = build_trajectory_nlp(*line_, open_corridor(*line_, n),
                                            sc_->init, t, sc_->limits, 0.1, n);
  double sq = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ac =
        x[L::v(i)] * x[L::v(i)] * point_at(*line_, x[L::s(i)]).kappa;
    sq += ac * ac;
    lin += ac;
  }
  const double wc = t.weights.centripetal;
  EXPECT_NEAR(squared.objective(x) - literal.objective(x), wc * (sq - lin),
              1e-9 * std::abs(squared.objective(x)));
}

TEST_F(UTurnNlp, GradientCheckAtRandomPointsAndWarmStart) {
  // With the preset terminal weights the objective reaches ~1e8 at random
  // points and central differences drown in rounding error, so the terminal
  // weights are brought down to the other terms' scale.
  const std::size_t n = 60;
  std::mt19937_64 rng(17);
  for (bool hard : {false, true}) {
    TaskSpec t = sc_->task;
    t.hard_terminal = hard;
    t.weights.s_task = t.weights.v_task = t.weights.a_task = 1.0;
    const FreeRegionProfile corridor = open_corridor(*line_, n);
    const NlpProblem p =
        build_trajectory_nlp(*line_, corridor, sc_->init, t, sc_->limits, 0.1, n);
    for (int k = 0; k < 5; ++k) {
      const auto check = check_gradient(p, random_feasible(rng, n, 140.0));
      EXPECT_LT(check.max_relative_error, 1e-5) << check.location;
    }
    const Vector x0 = warm_start(*line_, corridor, sc_->init, t, sc_->limits, 0.1, n);
    const auto check = check_gradient(p, x0);
    EXPECT_LT(check.max_relative_error, 1e-5) << check.location;
  }
}

TEST_F(UTurnNlp, WarmStartIsInsideBounds) {
  const std::size_t n = 181;
  const FreeRegionProfile corridor = open_corridor(*line_, n);
  const NlpProblem p = build_trajectory_nlp(*line_, corridor, sc_->init, sc_->task,
                                            sc_->limits, 0.1, n);
  const Vector x0 =
      warm_start(*line_, corridor, sc_->init, sc_->task, sc_->limits, 0.1, n);
  for (Eigen::Index j = 0; j < p.dimension; ++j) {
    EXPECT_GE(x0[j], p.lower[j]) << j;
    EXPECT_LE(x0[j], p.upper[j]) << j;
  }
}

TEST(Plan, CruiseOnStraightLineApproachesReference) {
  const GuideLine line = constant_curvature(0.0, 400.0);
  const std::size_t n = 181;
  const DynamicLimits lim;
  const Trajectory tr =
      plan(line, open_corridor(line, n), {0, 15, 0}, cruise_task(), lim, 0.1, n);
  ASSERT_EQ(tr.points.size(), n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    EXPECT_GE(tr.points[i + 1].v, tr.points[i].v - 1e-6) << i;
    EXPECT_LE(std::abs(tr.jerks[i]), 4.0 + 1e-6);
  }
  for (const auto& p : tr.points) EXPECT_LE(p.a, 2.0 + 1e-6);
  EXPECT_GT(tr.points.back().v, 19.0);
  EXPECT_LE(tr.points.back().v, 20.0 + 1e-6);
}

TEST(Plan, ContinuityHoldsBetweenConsecutivePoints) {
  const GuideLine line = constant_curvature(0.0, 400.0);
  const std::size_t n = 101;
  const Trajectory tr = plan(line, open_corridor(line, n), {0, 15, 0},
                             cruise_task(10.0), {}, 0.1, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto next = propagate(tr.points[i], tr.jerks[i], 0.1);
    EXPECT_NEAR(next.s, tr.points[i + 1].s, 1e-8);
    EXPECT_NEAR(next.v, tr.points[i + 1].v, 1e-8);
    EXPECT_NEAR(next.a, tr.points[i + 1].a, 1e-8);
  }
}

TEST(Plan, ZeroLengthStopStaysAtRest) {
  // Already stopped at the target behind the stop wall. With no reference
  // speed to chase the cost vanishes; with one, the vehicle still cannot move
  // and only the speed-error term remains.
  const GuideLine line = constant_curvature(0.0);
  const std::size_t n = 51;
  FreeRegionProfile corridor = open_corridor(line, n);
  for (auto& hi : corridor.s_max) hi = 50.0;
  for (double v_ref : {0.0, 20.0}) {
    TaskSpec t = cruise_task(5.0);
    t.kind = TaskKind::kStop;
    t.s_task = 50;
    t.v_task = 0;
    t.a_task = 0;
    t.v_ref = v_ref;
    const Trajectory tr = plan(line, corridor, {50, 0, 0}, t, {}, 0.1, n);
    for (const auto& p : tr.points) {
      EXPECT_NEAR(p.s, 50.0, 1e-6);
      EXPECT_NEAR(p.v, 0.0, 1e-5);
      EXPECT_NEAR(p.a, 0.0, 1e-5);
    }
    const double rest = t.weights.reference * v_ref * v_ref * n;
    EXPECT_NEAR(tr.report.objective, rest, 1e-6 + 1e-4 * rest) << v_ref;
  }
}

TEST(Plan, HardTerminalStopHitsTargetExactly) {
  const GuideLine line = constant_curvature(0.0);
  const std::size_t n = 121;
  TaskSpec t = cruise_task(12.0);
  t.kind = TaskKind::kStop;
  t.s_task = 100;
  t.v_task = 0;
  t.a_task = 0;
  t.hard_terminal = true;
  FreeRegionProfile corridor = open_corridor(line, n);
  for (auto& hi : corridor.s_max) hi = 100.0;
  const Trajectory tr = plan(line, corridor, {0, 15, 0}, t, {}, 0.1, n);
  EXPECT_NEAR(tr.points.back().s, 100.0, 1e-6);
  EXPECT_NEAR(tr.points.back().v, 0.0, 1e-6);
  EXPECT_NEAR(tr.points.back().a, 0.0, 1e-6);
}

TEST(Plan, InitialStateOutsideCorridorIsRejected) {
  const GuideLine line = constant_curvature(0.0);
  FreeRegionProfile corridor = open_corridor(line, 11);
  corridor.s_min[0] = 10.0;
  EXPECT_THROW(plan(line, corridor, {0, 15, 0}, cruise_task(1.0), {}, 0.1, 11),
               InfeasibleCorridor);
  EXPECT_THROW(plan(line, open_corridor(line, 11), {0, 31, 0}, cruise_task(1.0),
                    {}, 0.1, 11),
               InvalidArgument);
  EXPECT_THROW(plan(line, open_corridor(line, 11), {0, 15, 0}, cruise_task(1.0),
                    {}, 0.1, 12),
               InvalidArgument);
}

TEST(Plan, UTurnSlowsDownForTheCurve) {
  const Scenario sc = load_scenario(INLANE_SCENARIO_DIR "/uturn_cruise.scenario");
  const PlanRun run = run_plan(sc);
  const auto& pts = run.trajectory.points;
  const GuideLine& line = run.smooth.result.line;
  const double kmax = run.smooth.max_abs_kappa;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].v < pts[arg].v) arg = i;
  }
  EXPECT_LE(pts[arg].v, std::sqrt(sc.limits.ac_max / kmax) * (1 + 1e-3));
  EXPECT_GE(std::abs(kappa_at(line, pts[arg].s).kappa), 0.8 * kmax);
  // Braking happens before the slowest point.
  EXPECT_LT(pts[arg].v, pts[0].v - 5.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].v, -1e-9);
    if (i > 0) {
      EXPECT_GE(pts[i].s, pts[i - 1].s - 1e-9);
    }
  }
}

TEST(Plan, UTurnStopReachesTarget) {
  const Scenario sc = load_scenario(INLANE_SCENARIO_DIR "/uturn_stop.scenario");
  const PlanRun run = run_plan(sc);
  const auto& end = run.trajectory.points.back();
  EXPECT_NEAR(end.s, 130.0, 0.1);
  EXPECT_NEAR(end.v, 0.0, 0.01);
  EXPECT_NEAR(end.a, 0.0, 0.01);
}

TEST(WeightPreset, KnownNamesOnly) {
  EXPECT_NO_THROW(weight_preset("comfortable"));
  EXPECT_NO_THROW(weight_preset("sporty"));
  EXPECT_THROW(weight_preset("racing"), InvalidArgument);
  EXPECT_GT(weight_preset("comfortable").jerk, weight_preset("sporty").jerk);
}

TEST(TaskSpec, StopNeedsAllTargets) {
  TaskSpec t;
  t.kind = TaskKind::kStop;
  t.s_task = 10;
  EXPECT_THROW(t.validate(), InvalidArgument);
  t.v_task = 0;
  t.a_task = 0;
  EXPECT_NO_THROW(t.validate());
  t.v_task = 1;
  EXPECT_THROW(t.validate(), InvalidArgument);
}

}  // namespace
}  // namespace inlane
