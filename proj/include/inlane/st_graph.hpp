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

// Path-time obstacle graph.
//
// Predicted obstacle footprints are projected onto the guide line at every
// time step, giving the arc-length interval each obstacle blocks. A fixed
// heuristic then picks one free interval [s_min, s_max] per time step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inlane/errors.hpp"
#include "inlane/frenet.hpp"
#include "inlane/guide_line.hpp"

namespace inlane {

struct TimedPose {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  bool operator==(const TimedPose&) const = default;
};

struct ObstaclePrediction {
  std::string id;
  double length = 0.0;
  double width = 0.0;
  std::vector<TimedPose> trajectory;  // sorted by t

  void validate() const {
    if (!(length > 0.0) || !(width > 0.0)) {
      throw InvalidArgument("obstacle '" + id +
                            "' footprint length and width must be positive");
    }
    if (trajectory.empty()) {
      throw InvalidArgument("obstacle '" + id + "' has an empty trajectory");
    }
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
      if (!(trajectory[i].t > trajectory[i - 1].t)) {
        throw InvalidArgument("obstacle '" + id +
                              "' trajectory is not strictly sorted by time");
      }
    }
  }

  // Linear interpolation of the pose (heading interpolated along the shorter
  // arc). Empty outside the covered time span.
  std::optional<TimedPose> pose_at(double t) const {
    constexpr double kSlack = 1e-9;
    if (trajectory.empty() || t < trajectory.front().t - kSlack ||
        t > trajectory.back().t + kSlack) {
      return std::nullopt;
    }
    if (trajectory.size() == 1) return trajectory.front();
    auto it = std::lower_bound(
        trajectory.begin(), trajectory.end(), t,
        [](const TimedPose& p, double v) { return p.t < v; });
    if (it == trajectory.begin()) return trajectory.front();
    if (it == trajectory.end()) return trajectory.back();
    const TimedPose& b = *it;
    const TimedPose& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    const double dh = std::remainder(b.heading - a.heading, 2.0 * M_PI);
    return TimedPose{t, a.x + w * (b.x - a.x), a.y + w * (b.y - a.y),
                     a.heading + w * dh};
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct STSample {
  std::size_t index = 0;  // time step
  double t = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
};

// Blocked arc-length interval per time step; steps where the obstacle does not
// touch the lane are absent.
struct STObstacle {
  std::string id;
  std::vector<STSample> samples;  // sorted by index

  bool empty() const { return samples.empty(); }

  std::optional<Interval> at(std::size_t index) const {
    auto it = std::lower_bound(
        samples.begin(), samples.end(), index,
        [](const STSample& s, std::size_t i) { return s.index < i; });
    if (it == samples.end() || it->index != index) return std::nullopt;
    return Interval{it->s_lo, it->s_hi};
  }
};

struct STGraphConfig {
  double lateral_threshold = 1.75 + 1.0;  // half lane + half ego width
  double ego_length = 5.0;
  double margin = 5.0;

  void validate() const {
    if (!(lateral_threshold > 0.0)) {
      throw InvalidArgument("lateral_threshold must be positive");
    }
    if (!(ego_length >= 0.0)) throw InvalidArgument("ego_length must be >= 0");
    if (!(margin >= 0.0)) throw InvalidArgument("margin must be >= 0");
  }
};

inline std::size_t step_count(double dt, double horizon) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  return static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
}

// Projects an obstacle's footprint corners onto the line for t = i * dt,
// i in [0, round(horizon / dt)]. Corners farther than lateral_threshold from
// the line are ignored; the surviving corners' arc lengths, widened by half
// the ego length on both sides, form the blocked interval. Time steps not
// covered by the predicted trajectory are treated as non-blocking.
inline STObstacle project_obstacle(const GuideLine& line,
                                   const ObstaclePrediction& obs, double dt,
                                   double horizon,
                                   const STGraphConfig& config = {}) {
  obs.validate();
  config.validate();
  const std::size_t n = step_count(dt, horizon);
  STObstacle out{obs.id, {}};
  const double hl = 0.5 * obs.length;
  const double hw = 0.5 * obs.width;
  const double inflate = 0.5 * config.ego_length;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const auto pose = obs.pose_at(t);
    if (!pose) continue;
    const double c = std::cos(pose->heading);
    const double s = std::sin(pose->heading);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [fl, fw] : {std::pair{hl, hw}, std::pair{hl, -hw},
                                 std::pair{-hl, hw}, std::pair{-hl, -hw}}) {
      const double cx = pose->x + fl * c - fw * s;
      const double cy = pose->y + fl * s + fw * c;
      try {
        const double arc = project(line, cx, cy, config.lateral_threshold);
        lo = std::min(lo, arc);
        hi = std::max(hi, arc);
      } catch (const OutOfCorridor&) {
      }
    }
    if (lo <= hi) out.samples.push_back({i, t, lo - inflate, hi + inflate});
  }
  return out;
}

struct FreeRegionProfile {
  double dt = 0.1;
  std::vector<double> s_min;
  std::vector<double> s_max;

  std::size_t size() const { return s_min.size(); }
  bool contains(std::size_t i, double s) const {
    return s >= s_min[i] && s <= s_max[i];
  }
};

// Upper end of the reachable arc length at time step i when driving at the
// speed limit from s0.
inline double reachable_upper(double s0, double max_speed, double t,
                              double cap) {
  return std::min(cap, s0 + max_speed * t);
}

// Picks one free interval per time step.
//
// Gap selection follows a constant-velocity prediction s_hat(t) = s0 + v0 t
// clamped to [0, reachable]. The decision is made once per obstacle so that
// the corridor never jumps across an obstacle: the ego passes an obstacle only
// if s_hat lies above its blocked interval at every step where it blocks;
// otherwise (below, inside, or mixed) the ego yields. Passed obstacles raise
// s_min to s_hi + margin, yielded ones lower s_max to s_lo - margin. If the
// margins cross, the interval collapses onto the yield boundary, clamped into
// the raw gap. A step whose raw gap is empty is an infeasible corridor.
inline FreeRegionProfile select_free_region(
    const std::vector<STObstacle>& obstacles, const LongitudinalState& init,
    double dt, std::size_t n, double margin, double max_speed,
    double extended_length) {
  if (n < 1) throw InvalidArgument("free region needs at least one step");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(margin >= 0.0)) throw InvalidArgument("margin must be >= 0");
  if (!(max_speed > 0.0)) throw InvalidArgument("max_speed must be positive");

  auto predicted = [&](std::size_t i) {
    const double t = static_cast<double>(i) * dt;
    const double reach =
        reachable_upper(init.s, max_speed, t, extended_length);
    return std::clamp(init.s + init.v * t, 0.0, std::max(reach, 0.0));
  };

  // Deterministic order regardless of input order.
  std::vector<const STObstacle*> sorted;
  for (const auto& o : obstacles) sorted.push_back(&o);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const STObstacle* a, const STObstacle* b) {
                     return a->id < b->id;
                   });

  std::vector<bool> passed(sorted.size(), false);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& samples = sorted[k]->samples;
    passed[k] = !samples.empty() &&
                std::all_of(samples.begin(), samples.end(),
                            [&](const STSample& s) {
                              return s.index < n && predicted(s.index) > s.s_hi;
                            });
  }

  FreeRegionProfile out;
  out.dt = dt;
  out.s_min.assign(n, 0.0);
  out.s_max.assign(n, extended_length);
  for (std::size_t i = 0; i < n; ++i) {
    double floor = 0.0;           // raw lower edge (obstacle s_hi)
    double ceiling = extended_length;  // raw upper edge (obstacle s_lo)
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      const auto blocked = sorted[k]->at(i);
      if (!blocked) continue;
      if (passed[k]) {
        floor = std::max(floor, blocked->hi);
      } else {
        ceiling = std::min(ceiling, blocked->lo);
      }
    }
    if (ceiling <= 0.0 || ceiling < floor) {
      std::ostringstream msg;
      msg << "no free gap at time step " << i << " (t = "
          << static_cast<double>(i) * dt << " s)";
      throw InfeasibleCorridor(msg.str(), i);
    }
    double lo = floor > 0.0 ? floor + margin : 0.0;
    double hi = ceiling < extended_length ? ceiling - margin : ceiling;
    hi = std::max(hi, 0.0);
    if (lo > hi) {
      // Collapse onto the yield boundary, but never into a passed obstacle.
      hi = std::max(hi, floor);
      lo = hi;
    }
    out.s_min[i] = lo;
    out.s_max[i] = hi;
  }
  return out;
}

}  // namespace inlane
