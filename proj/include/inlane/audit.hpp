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

// Post-hoc constraint audit of a planned trajectory. Everything is recomputed
// from the raw (s, v, a) samples; nothing is read back from the optimizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "inlane/frenet.hpp"
#include "inlane/guide_line.hpp"
#include "inlane/speed_optimizer.hpp"
#include "inlane/st_graph.hpp"

namespace inlane {

struct AuditFamily {
  std::string name;
  double max_residual = 0.0;  // 0 when satisfied
  std::size_t worst_index = 0;
};

struct ConstraintAudit {
  std::vector<AuditFamily> families;
  // Smallest distance between the ego position and any blocked interval;
  // empty without obstacles.
  std::optional<double> min_gap;
  std::size_t min_gap_index = 0;

  const AuditFamily& family(const std::string& name) const {
    for (const auto& f : families) {
      if (f.name == name) return f;
    }
    throw InvalidArgument("no audit family '" + name + "'");
  }

  double max_residual() const {
    double r = 0.0;
    for (const auto& f : families) r = std::max(r, f.max_residual);
    return r;
  }
};

struct AuditInputs {
  const GuideLine* line = nullptr;
  const FreeRegionProfile* corridor = nullptr;
  const std::vector<STObstacle>* obstacles = nullptr;
  LongitudinalState init;
  DynamicLimits limits;
  double dt = 0.1;
};

inline ConstraintAudit audit_trajectory(
    const std::vector<LongitudinalState>& pts, const AuditInputs& in) {
  if (!in.line) throw InvalidArgument("audit needs a guide line");
  if (pts.size() < 2) throw InvalidArgument("audit needs at least 2 samples");
  const DynamicLimits& lim = in.limits;
  ConstraintAudit out;
  // Families are handed out by reference; keep the vector from reallocating.
  out.families.reserve(8);
  auto family = [&out](const char* name) -> AuditFamily& {
    out.families.push_back({name, 0.0, 0});
    return out.families.back();
  };
  auto record = [](AuditFamily& f, double residual, std::size_t i) {
    if (residual > f.max_residual) {
      f.max_residual = residual;
      f.worst_index = i;
    }
  };

  AuditFamily& init = family("initial_state");
  record(init,
         std::max({std::abs(pts[0].s - in.init.s), std::abs(pts[0].v - in.init.v),
                   std::abs(pts[0].a - in.init.a)}),
         0);

  AuditFamily& speed = family("speed");
  AuditFamily& accel = family("acceleration");
  AuditFamily& centripetal = family("centripetal");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    record(speed, std::max(-pts[i].v, pts[i].v - lim.v_max), i);
    record(accel, std::max(lim.a_min - pts[i].a, pts[i].a - lim.a_max), i);
    const double ac = pts[i].v * pts[i].v * kappa_at(*in.line, pts[i].s).kappa;
    record(centripetal, std::abs(ac) - lim.ac_max, i);
  }

  AuditFamily& jerk = family("jerk");
  AuditFamily& continuity = family("continuity");
  AuditFamily& forward = family("forward_motion");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double j = (pts[i + 1].a - pts[i].a) / in.dt;
    record(jerk, std::max(lim.jerk_min - j, j - lim.jerk_max), i);
    const double dt = in.dt;
    const double s = pts[i].s + pts[i].v * dt + 0.5 * pts[i].a * dt * dt +
                     j * dt * dt * dt / 6.0;
    const double v = pts[i].v + pts[i].a * dt + 0.5 * j * dt * dt;
    record(continuity,
           std::max(std::abs(s - pts[i + 1].s), std::abs(v - pts[i + 1].v)), i);
    record(forward, pts[i].s - pts[i + 1].s, i);
  }

  if (in.corridor) {
    AuditFamily& corridor = family("corridor");
    const FreeRegionProfile& c = *in.corridor;
    if (c.size() != pts.size()) {
      throw InvalidArgument("audit corridor length does not match trajectory");
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      record(corridor,
             std::max(c.s_min[i] - pts[i].s, pts[i].s - c.s_max[i]), i);
    }
  }

  if (in.obstacles) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& obs : *in.obstacles) {
      for (const auto& sample : obs.samples) {
        if (sample.index >= pts.size()) continue;
        const double s = pts[sample.index].s;
        // Distance to the nearer end of the blocked interval; negative when
        // the ego sits inside it.
        double d = s < sample.s_lo ? sample.s_lo - s
                   : s > sample.s_hi ? s - sample.s_hi
                                     : -std::min(s - sample.s_lo, sample.s_hi - s);
        if (d < gap) {
          gap = d;
          out.min_gap_index = sample.index;
        }
      }
    }
    if (std::isfinite(gap)) out.min_gap = gap;
  }
  return out;
}

}  // namespace inlane
