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

#pragma once

// End-to-end runs over a scenario: smoothing, path-time graph, planning and
// audit. No I/O happens here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "inlane/audit.hpp"
#include "inlane/frenet.hpp"
#include "inlane/scenario_io.hpp"
#include "inlane/smoother.hpp"
#include "inlane/speed_optimizer.hpp"
#include "inlane/st_graph.hpp"

namespace inlane {

namespace pipeline_detail {
inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}
}  // namespace pipeline_detail

struct SmoothRun {
  RawGuideLine raw;
  SmoothingResult result;
  std::vector<double> knot_deviations;
  double max_abs_kappa = 0.0;
  double seconds = 0.0;
};

inline double max_abs_curvature(const GuideLine& line, double spacing = 0.1) {
  double k = 0.0;
  for (double s = 0.0; s <= line.total_length(); s += spacing) {
    k = std::max(k, std::abs(kappa_at(line, s).kappa));
  }
  return std::max(k, std::abs(kappa_at(line, line.total_length()).kappa));
}

inline SmoothRun run_smooth(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  RawGuideLine raw = sc.raw_guide_line();
  SmoothingResult result = smooth_guideline(raw, sc.smoother);
  const double seconds = pipeline_detail::seconds_since(start);
  std::vector<double> dev;
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    dev.push_back(distance(result.line.knot_positions()[i], raw.points[i]));
  }
  const double kmax = max_abs_curvature(result.line);
  return {std::move(raw), std::move(result), std::move(dev), kmax, seconds};
}

// Free region per time step. A stop task additionally caps s_max at the stop
// target.
inline FreeRegionProfile build_corridor(const Scenario& sc, const GuideLine& line,
                                        const std::vector<STObstacle>& st) {
  FreeRegionProfile c =
      select_free_region(st, sc.init, sc.dt, sc.steps(), sc.margin,
                         sc.limits.v_max, line.extended_length());
  if (sc.task.kind == TaskKind::kStop) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      c.s_max[i] = std::min(c.s_max[i], *sc.task.s_task);
      c.s_min[i] = std::min(c.s_min[i], c.s_max[i]);
    }
  }
  return c;
}

struct PlanRun {
  SmoothRun smooth;
  std::vector<STObstacle> st_obstacles;
  FreeRegionProfile corridor;
  Trajectory trajectory;
  ConstraintAudit audit;
  double corridor_seconds = 0.0;
  double plan_seconds = 0.0;
};

inline std::vector<STObstacle> project_obstacles(const Scenario& sc,
                                                 const GuideLine& line) {
  std::vector<STObstacle> st;
  for (const auto& pred : sc.predictions()) {
    st.push_back(project_obstacle(line, pred, sc.dt, sc.task.horizon,
                                  sc.st_config()));
  }
  return st;
}

inline PlanRun run_plan(const Scenario& sc) {
  PlanRun run{run_smooth(sc), {}, {}, {}, {}, 0.0, 0.0};
  const GuideLine& line = run.smooth.result.line;

  auto start = std::chrono::steady_clock::now();
  run.st_obstacles = project_obstacles(sc, line);
  run.corridor = build_corridor(sc, line, run.st_obstacles);
  run.corridor_seconds = pipeline_detail::seconds_since(start);

  start = std::chrono::steady_clock::now();
  run.trajectory = plan(line, run.corridor, sc.init, sc.task, sc.limits, sc.dt,
                        sc.steps());
  run.plan_seconds = pipeline_detail::seconds_since(start);

  AuditInputs in;
  in.line = &line;
  in.corridor = &run.corridor;
  in.obstacles = &run.st_obstacles;
  in.init = sc.init;
  in.limits = sc.limits;
  in.dt = sc.dt;
  run.audit = audit_trajectory(run.trajectory.points, in);
  return run;
}

// Speed ceiling implied by the centripetal limit at each sample.
inline double curvature_speed_limit(const GuideLine& line,
                                    const DynamicLimits& limits, double s) {
  const double k = std::abs(kappa_at(line, s).kappa);
  return k > 0.0 ? std::min(limits.v_max, std::sqrt(limits.ac_max / k))
                 : limits.v_max;
}

}  // namespace inlane
