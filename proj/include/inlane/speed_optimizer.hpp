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

// Time-discretized speed profile along a guide line.
//
// Each sample i at t = i * dt carries (s, v, a); jerk is piecewise constant
// between samples. Continuity between samples is linear in the variables,
// the only non-convexity is the curvature lookup kappa(s) in the centripetal
// terms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inlane/errors.hpp"
#include "inlane/frenet.hpp"
#include "inlane/guide_line.hpp"
#include "inlane/nlp.hpp"
#include "inlane/st_graph.hpp"

namespace inlane {

struct DynamicLimits {
  double v_max = 30.0;
  double a_min = -4.0;
  double a_max = 2.0;
  double jerk_min = -4.0;
  double jerk_max = 4.0;
  double ac_max = 2.0;  // |v^2 kappa|

  bool operator==(const DynamicLimits&) const = default;

  void validate() const {
    if (!(v_max > 0.0)) throw InvalidArgument("limits.v_max must be positive");
    if (!(a_min < 0.0 && a_max > 0.0)) {
      throw InvalidArgument("limits need a_min < 0 < a_max");
    }
    if (!(jerk_min < 0.0 && jerk_max > 0.0)) {
      throw InvalidArgument("limits need jerk_min < 0 < jerk_max");
    }
    if (!(ac_max > 0.0)) throw InvalidArgument("limits.ac_max must be positive");
  }
};

enum class TaskKind { kCruise, kStop, kFollow };

inline const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kCruise: return "cruise";
    case TaskKind::kStop: return "stop";
    case TaskKind::kFollow: return "follow";
  }
  return "?";
}

inline TaskKind parse_task_kind(const std::string& s) {
  if (s == "cruise") return TaskKind::kCruise;
  if (s == "stop") return TaskKind::kStop;
  if (s == "follow") return TaskKind::kFollow;
  throw InvalidArgument("unknown task kind '" + s + "'");
}

struct CostWeights {
  double accel = 1.0;
  double jerk = 1.0;
  double centripetal = 1.0;
  double reference = 1.0;
  double s_task = 0.0;
  double v_task = 0.0;
  double a_task = 0.0;

  bool operator==(const CostWeights&) const = default;
};

struct TaskSpec {
  TaskKind kind = TaskKind::kCruise;
  double v_ref = 20.0;
  std::optional<double> s_task;
  std::optional<double> v_task;
  std::optional<double> a_task;
  CostWeights weights;
  double horizon = 18.0;
  // Terminal targets become equality constraints instead of soft terms.
  bool hard_terminal = false;
  // Use sum(v^2 kappa) instead of sum((v^2 kappa)^2) for the centripetal term.
  bool literal_centripetal = false;

  bool operator==(const TaskSpec&) const = default;

  void validate() const {
    const CostWeights& w = weights;
    for (double x : {w.accel, w.jerk, w.centripetal, w.reference, w.s_task,
                     w.v_task, w.a_task}) {
      if (!(x >= 0.0)) throw InvalidArgument("task weights must be >= 0");
    }
    if (!(horizon > 0.0)) throw InvalidArgument("task.horizon must be positive");
    if (!(v_ref >= 0.0)) throw InvalidArgument("task.v_ref must be >= 0");
    if (kind == TaskKind::kStop) {
      if (!s_task || !v_task || !a_task) {
        throw InvalidArgument("stop task needs s_task, v_task and a_task");
      }
      if (*v_task != 0.0 || *a_task != 0.0) {
        throw InvalidArgument("stop task needs v_task = a_task = 0");
      }
    }
  }
};

// Named weight bundles. "sporty" tracks the reference speed hard and lets the
// acceleration ride its bounds; "comfortable" pays more for acceleration and
// jerk and brakes earlier.
inline CostWeights weight_preset(const std::string& name) {
  CostWeights w;
  if (name == "comfortable") {
    w.accel = 2.0;
    w.jerk = 5.0;
    w.centripetal = 1.0;
    w.reference = 0.1;
  } else if (name == "sporty") {
    w.accel = 0.1;
    w.jerk = 0.1;
    w.centripetal = 0.1;
    w.reference = 1.0;
  } else {
    throw InvalidArgument("unknown preset '" + name +
                          "' (expected comfortable or sporty)");
  }
  w.s_task = 1e4;
  w.v_task = 1e5;
  w.a_task = 1e5;
  return w;
}

inline double jerk_between(double a, double a_next, double dt) {
  return (a_next - a) / dt;
}

inline LongitudinalState propagate(const LongitudinalState& x, double jerk,
                                   double dt) {
  return {x.s + x.v * dt + 0.5 * x.a * dt * dt + jerk * dt * dt * dt / 6.0,
          x.v + x.a * dt + 0.5 * jerk * dt * dt, x.a + jerk * dt};
}

namespace trajectory_layout {
inline Eigen::Index s(std::size_t i) { return static_cast<Eigen::Index>(3 * i); }
inline Eigen::Index v(std::size_t i) { return static_cast<Eigen::Index>(3 * i + 1); }
inline Eigen::Index a(std::size_t i) { return static_cast<Eigen::Index>(3 * i + 2); }
}  // namespace trajectory_layout

inline std::size_t terminal_equality_count(const TaskSpec& task) {
  if (!task.hard_terminal) return 0;
  return static_cast<std::size_t>(task.s_task.has_value()) +
         static_cast<std::size_t>(task.v_task.has_value()) +
         static_cast<std::size_t>(task.a_task.has_value());
}

inline void check_planning_inputs(const FreeRegionProfile& corridor,
                                  const LongitudinalState& init,
                                  const TaskSpec& task,
                                  const DynamicLimits& limits, double dt,
                                  std::size_t n) {
  task.validate();
  limits.validate();
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (n < 2) throw InvalidArgument("trajectory needs at least 2 points");
  if (corridor.size() != n || corridor.s_max.size() != n) {
    throw InvalidArgument("corridor has " + std::to_string(corridor.size()) +
                          " entries, expected " + std::to_string(n));
  }
  if (!(init.v >= 0.0 && init.v <= limits.v_max)) {
    throw InvalidArgument("initial speed outside [0, v_max]");
  }
  if (!(init.a >= limits.a_min && init.a <= limits.a_max)) {
    throw InvalidArgument("initial acceleration outside [a_min, a_max]");
  }
  if (!corridor.contains(0, init.s)) {
    std::ostringstream msg;
    msg << "initial s = " << init.s << " outside corridor [" << corridor.s_min[0]
        << ", " << corridor.s_max[0] << "] at time step 0";
    throw InfeasibleCorridor(msg.str(), 0);
  }
}

// Equalities: 3 initial-state rows, then per interval the speed and position
// continuity rows, then optional hard terminal rows. Inequalities: per
// interval jerk upper/lower, then per sample centripetal upper/lower.
inline NlpProblem build_trajectory_nlp(const GuideLine& line,
                                       const FreeRegionProfile& corridor,
                                       const LongitudinalState& init,
                                       const TaskSpec& task,
                                       const DynamicLimits& limits, double dt,
                                       std::size_t n) {
  check_planning_inputs(corridor, init, task, limits, dt, n);
  namespace L = trajectory_layout;
  const auto path = std::make_shared<const GuideLine>(line);
  const std::size_t n_term = terminal_equality_count(task);
  const CostWeights w = task.weights;
  const bool soft_terminal = !task.hard_terminal;
  const std::size_t last = n - 1;

  NlpProblem p;
  p.dimension = static_cast<Eigen::Index>(3 * n);
  p.num_equalities = static_cast<Eigen::Index>(3 + 2 * (n - 1) + n_term);
  p.num_inequalities = static_cast<Eigen::Index>(2 * (n - 1) + 2 * n);

  p.objective = [=](const Vector& x) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[L::v(i)];
      const double a = x[L::a(i)];
      const double ac = v * v * kappa_at(*path, x[L::s(i)]).kappa;
      f += w.accel * a * a;
      f += task.literal_centripetal ? w.centripetal * ac
                                    : w.centripetal * ac * ac;
      f += w.reference * (v - task.v_ref) * (v - task.v_ref);
      if (i + 1 < n) {
        const double j = jerk_between(a, x[L::a(i + 1)], dt);
        f += w.jerk * j * j;
      }
    }
    if (soft_terminal) {
      if (task.s_task) f += w.s_task * std::pow(x[L::s(last)] - *task.s_task, 2);
      if (task.v_task) f += w.v_task * std::pow(x[L::v(last)] - *task.v_task, 2);
      if (task.a_task) f += w.a_task * std::pow(x[L::a(last)] - *task.a_task, 2);
    }
    return f;
  };

  p.gradient = [=](const Vector& x, Vector& g) {
    g.setZero(x.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[L::v(i)];
      const double a = x[L::a(i)];
      const CurvatureSample k = kappa_at(*path, x[L::s(i)]);
      const double ac = v * v * k.kappa;
      const double d_ac = task.literal_centripetal ? w.centripetal
                                                   : 2.0 * w.centripetal * ac;
      g[L::s(i)] += d_ac * v * v * k.dkappa;
      g[L::v(i)] += d_ac * 2.0 * v * k.kappa;
      g[L::a(i)] += 2.0 * w.accel * a;
      g[L::v(i)] += 2.0 * w.reference * (v - task.v_ref);
      if (i + 1 < n) {
        const double j = jerk_between(a, x[L::a(i + 1)], dt);
        g[L::a(i)] -= 2.0 * w.jerk * j / dt;
        g[L::a(i + 1)] += 2.0 * w.jerk * j / dt;
      }
    }
    if (soft_terminal) {
      if (task.s_task) g[L::s(last)] += 2.0 * w.s_task * (x[L::s(last)] - *task.s_task);
      if (task.v_task) g[L::v(last)] += 2.0 * w.v_task * (x[L::v(last)] - *task.v_task);
      if (task.a_task) g[L::a(last)] += 2.0 * w.a_task * (x[L::a(last)] - *task.a_task);
    }
  };

  const double dt2 = dt * dt;
  p.equalities = [=](const Vector& x, Vector& c) {
    c.resize(static_cast<Eigen::Index>(3 + 2 * (n - 1) + n_term));
    c[0] = x[L::s(0)] - init.s;
    c[1] = x[L::v(0)] - init.v;
    c[2] = x[L::a(0)] - init.a;
    Eigen::Index r = 3;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a0 = x[L::a(i)];
      const double a1 = x[L::a(i + 1)];
      c[r++] = x[L::v(i + 1)] - x[L::v(i)] - 0.5 * (a0 + a1) * dt;
      c[r++] = x[L::s(i + 1)] - x[L::s(i)] - x[L::v(i)] * dt -
               (a0 / 3.0 + a1 / 6.0) * dt2;
    }
    if (task.hard_terminal) {
      if (task.s_task) c[r++] = x[L::s(last)] - *task.s_task;
      if (task.v_task) c[r++] = x[L::v(last)] - *task.v_task;
      if (task.a_task) c[r++] = x[L::a(last)] - *task.a_task;
    }
  };

  p.equality_jacobian = [=](const Vector&, SparseJacobian& J) {
    J.clear();
    J.push_back({0, L::s(0), 1.0});
    J.push_back({1, L::v(0), 1.0});
    J.push_back({2, L::a(0), 1.0});
    Eigen::Index r = 3;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      J.push_back({r, L::v(i + 1), 1.0});
      J.push_back({r, L::v(i), -1.0});
      J.push_back({r, L::a(i), -0.5 * dt});
      J.push_back({r, L::a(i + 1), -0.5 * dt});
      ++r;
      J.push_back({r, L::s(i + 1), 1.0});
      J.push_back({r, L::s(i), -1.0});
      J.push_back({r, L::v(i), -dt});
      J.push_back({r, L::a(i), -dt2 / 3.0});
      J.push_back({r, L::a(i + 1), -dt2 / 6.0});
      ++r;
    }
    if (task.hard_terminal) {
      if (task.s_task) J.push_back({r++, L::s(last), 1.0});
      if (task.v_task) J.push_back({r++, L::v(last), 1.0});
      if (task.a_task) J.push_back({r++, L::a(last), 1.0});
    }
  };

  p.inequalities = [=](const Vector& x, Vector& g) {
    g.resize(static_cast<Eigen::Index>(2 * (n - 1) + 2 * n));
    Eigen::Index r = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double j = jerk_between(x[L::a(i)], x[L::a(i + 1)], dt);
      g[r++] = j - limits.jerk_max;
      g[r++] = limits.jerk_min - j;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[L::v(i)];
      const double ac = v * v * kappa_at(*path, x[L::s(i)]).kappa;
      g[r++] = ac - limits.ac_max;
      g[r++] = -limits.ac_max - ac;
    }
  };

  p.inequality_jacobian = [=](const Vector& x, SparseJacobian& J) {
    J.clear();
    Eigen::Index r = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      J.push_back({r, L::a(i), -1.0 / dt});
      J.push_back({r, L::a(i + 1), 1.0 / dt});
      ++r;
      J.push_back({r, L::a(i), 1.0 / dt});
      J.push_back({r, L::a(i + 1), -1.0 / dt});
      ++r;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[L::v(i)];
      const CurvatureSample k = kappa_at(*path, x[L::s(i)]);
      const double ds = v * v * k.dkappa;
      const double dv = 2.0 * v * k.kappa;
      J.push_back({r, L::s(i), ds});
      J.push_back({r, L::v(i), dv});
      ++r;
      J.push_back({r, L::s(i), -ds});
      J.push_back({r, L::v(i), -dv});
      ++r;
    }
  };

  p.lower.resize(p.dimension);
  p.upper.resize(p.dimension);
  for (std::size_t i = 0; i < n; ++i) {
    p.lower[L::s(i)] = corridor.s_min[i];
    p.upper[L::s(i)] = corridor.s_max[i];
    p.lower[L::v(i)] = 0.0;
    p.upper[L::v(i)] = limits.v_max;
    p.lower[L::a(i)] = limits.a_min;
    p.upper[L::a(i)] = limits.a_max;
  }
  // The initial triple is also pinned through its bounds so that it stays
  // exact at every iterate.
  p.lower[L::s(0)] = p.upper[L::s(0)] = init.s;
  p.lower[L::v(0)] = p.upper[L::v(0)] = init.v;
  p.lower[L::a(0)] = p.upper[L::a(0)] = init.a;
  return p;
}

// Speed ceiling along the line from the centripetal limit, the task's target
// and a comfortable braking look-ahead, sampled every `spacing` metres.
inline std::vector<double> speed_ceiling(const GuideLine& line,
                                         const TaskSpec& task,
                                         const DynamicLimits& limits,
                                         double spacing) {
  const double end = line.extended_length();
  const std::size_t m = static_cast<std::size_t>(std::ceil(end / spacing)) + 1;
  const double brake = 0.5 * -limits.a_min;
  std::vector<double> cap(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = std::min(end, static_cast<double>(k) * spacing);
    const double kappa = std::abs(kappa_at(line, s).kappa);
    double c = std::min(limits.v_max, task.v_ref);
    if (kappa > 1e-9) c = std::min(c, std::sqrt(limits.ac_max / kappa));
    if (task.kind == TaskKind::kStop && task.s_task) {
      c = std::min(c, std::sqrt(2.0 * brake * std::max(0.0, *task.s_task - s)));
    }
    cap[k] = c;
  }
  for (std::size_t k = m - 1; k-- > 0;) {
    cap[k] = std::min(cap[k],
                      std::sqrt(cap[k + 1] * cap[k + 1] + 2.0 * brake * spacing));
  }
  return cap;
}

// Kinematic seed: drive towards the speed ceiling with bounded acceleration
// and jerk, then clip positions into the corridor.
inline Vector warm_start(const GuideLine& line,
                         const FreeRegionProfile& corridor,
                         const LongitudinalState& init, const TaskSpec& task,
                         const DynamicLimits& limits, double dt,
                         std::size_t n) {
  namespace L = trajectory_layout;
  constexpr double kSpacing = 0.5;
  constexpr double kResponseTime = 1.0;
  const std::vector<double> cap = speed_ceiling(line, task, limits, kSpacing);
  auto ceiling_at = [&](double s) {
    const auto k = static_cast<std::size_t>(std::clamp(
        std::floor(s / kSpacing), 0.0, static_cast<double>(cap.size() - 1)));
    return cap[k];
  };
  Vector x(static_cast<Eigen::Index>(3 * n));
  LongitudinalState st = init;
  for (std::size_t i = 0; i < n; ++i) {
    x[L::s(i)] = std::clamp(st.s, corridor.s_min[i], corridor.s_max[i]);
    x[L::v(i)] = std::clamp(st.v, 0.0, limits.v_max);
    x[L::a(i)] = std::clamp(st.a, limits.a_min, limits.a_max);
    const double desired = std::clamp((ceiling_at(st.s) - st.v) / kResponseTime,
                                      limits.a_min, limits.a_max);
    const double jerk = std::clamp(jerk_between(st.a, desired, dt),
                                   limits.jerk_min, limits.jerk_max);
    st = propagate(st, jerk, dt);
    if (st.v < 0.0) st.v = st.a = 0.0;
  }
  x[L::s(0)] = init.s;
  x[L::v(0)] = init.v;
  x[L::a(0)] = init.a;
  return x;
}

inline SolverOptions default_trajectory_solver_options() {
  SolverOptions o;
  o.tol_feas = 1e-9;
  return o;
}

struct Trajectory {
  double dt = 0.1;
  std::vector<LongitudinalState> points;
  std::vector<double> jerks;  // jerks[i] acts on [t_i, t_{i+1}]
  std::vector<CartesianState> cartesian;
  SolveReport report;
  double initial_objective = 0.0;

  double duration() const {
    return dt * static_cast<double>(points.empty() ? 0 : points.size() - 1);
  }
};

inline Trajectory trajectory_from_variables(const GuideLine& line,
                                            const Vector& x, double dt) {
  namespace L = trajectory_layout;
  const auto n = static_cast<std::size_t>(x.size() / 3);
  Trajectory t;
  t.dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    t.points.push_back({x[L::s(i)], x[L::v(i)], x[L::a(i)]});
    t.cartesian.push_back(to_cartesian(line, t.points.back()));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.jerks.push_back(jerk_between(t.points[i].a, t.points[i + 1].a, dt));
  }
  return t;
}

inline Trajectory plan(const GuideLine& line, const FreeRegionProfile& corridor,
                       const LongitudinalState& init, const TaskSpec& task,
                       const DynamicLimits& limits, double dt, std::size_t n,
                       const SolverOptions& options =
                           default_trajectory_solver_options()) {
  const NlpProblem problem =
      build_trajectory_nlp(line, corridor, init, task, limits, dt, n);
  const Vector x0 = warm_start(line, corridor, init, task, limits, dt, n);
  SolveReport report = solve(problem, x0, options);
  if (!report.converged()) {
    std::ostringstream msg;
    msg << "trajectory optimization did not converge: " << to_string(report.status)
        << " after " << report.iterations << " iterations, max violation "
        << report.max_violation;
    if (!report.message.empty()) msg << " (" << report.message << ")";
    throw SolverError(msg.str(), std::move(report));
  }
  Trajectory out = trajectory_from_variables(line, report.x, dt);
  out.initial_objective = problem.objective(problem.lower.cwiseMax(
      problem.upper.cwiseMin(x0)));
  out.report = std::move(report);
  return out;
}

}  // namespace inlane
