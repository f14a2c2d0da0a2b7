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

// Arc-length queries on a guide line and composition of longitudinal states
// into Cartesian states. Lateral offset is identically zero: the vehicle is
// assumed to stay on the guide line and the controller absorbs deviations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "inlane/errors.hpp"
#include "inlane/geometry.hpp"
#include "inlane/guide_line.hpp"

namespace inlane {

struct LongitudinalState {
  double s = 0.0;
  double v = 0.0;  // ds/dt
  double a = 0.0;  // d2s/dt2
  bool operator==(const LongitudinalState&) const = default;
};

struct CartesianState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
  double v = 0.0;
  double a = 0.0;            // tangential, equals d2s/dt2
  double centripetal = 0.0;  // v^2 * kappa
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
};

struct CurvatureSample {
  double kappa = 0.0;
  double dkappa = 0.0;
};

// Curvature and its arc-length derivative. s < 0 clamps to 0; past the end of
// the line the straight extension has zero curvature.
inline CurvatureSample kappa_at(const GuideLine& line, double s) {
  if (s > line.total_length()) return {};
  s = std::max(s, 0.0);
  const std::size_t i = line.piece_index(s);
  const auto& piece = line.pieces()[i];
  const double local =
      std::clamp(s - line.cumulative_lengths()[i], 0.0, piece.length());
  return {piece.kappa_unchecked(local), piece.dkappa_unchecked(local)};
}

inline Pose point_at(const GuideLine& line, double s) {
  s = std::max(s, 0.0);
  if (s >= line.total_length()) {
    const Point2 p = line.position_unclamped(s);
    return {p.x, p.y, line.end_theta(),
            s > line.total_length() ? 0.0 : kappa_at(line, s).kappa};
  }
  const std::size_t i = line.piece_index(s);
  const auto& piece = line.pieces()[i];
  const double local =
      std::clamp(s - line.cumulative_lengths()[i], 0.0, piece.length());
  const Point2 p = integrate_position(piece, local, line.knot_positions()[i]);
  return {p.x, p.y, piece.theta_unchecked(local), piece.kappa_unchecked(local)};
}

inline CartesianState to_cartesian(const GuideLine& line,
                                   const LongitudinalState& state) {
  const Pose pose = point_at(line, state.s);
  return {pose.x,  pose.y,  pose.theta,
          pose.kappa, state.v, state.a,
          state.v * state.v * pose.kappa};
}

inline constexpr double kDefaultProjectionCorridor = 10.0;

// Arc length of the closest point on the (extended) guide line: coarse scan
// over the 1 m sample table, then golden-section refinement to 1e-4 m in the
// bracket around the best sample.
inline double project(const GuideLine& line, double x, double y,
                      double max_lateral = kDefaultProjectionCorridor) {
  const auto& samples = line.samples();
  auto dist2 = [&](double s) {
    const Point2 p = line.position_unclamped(s);
    return (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
  };
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double dx = samples[k].p.x - x;
    const double dy = samples[k].p.y - y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  double lo = samples[best == 0 ? 0 : best - 1].s;
  double hi = samples[std::min(best + 1, samples.size() - 1)].s;

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = dist2(c);
  double fd = dist2(d);
  while (hi - lo > 1e-4) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = dist2(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = dist2(d);
    }
  }
  double s = 0.5 * (lo + hi);
  double d2 = dist2(s);
  // The bracket may end at a domain edge.
  for (double edge : {samples.front().s, samples.back().s}) {
    const double e2 = dist2(edge);
    if (e2 < d2 && std::abs(edge - s) <= 1e-3) {
      s = edge;
      d2 = e2;
    }
  }
  if (std::sqrt(d2) > max_lateral) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") is " << std::sqrt(d2)
        << " m from the guide line, beyond the " << max_lateral
        << " m corridor";
    throw OutOfCorridor(msg.str(), std::sqrt(d2));
  }
  return s;
}

// Distance from a point to the guide line position at arc length s.
inline double lateral_distance(const GuideLine& line, double x, double y,
                               double s) {
  const Point2 p = line.position_unclamped(std::max(s, 0.0));
  return std::hypot(p.x - x, p.y - y);
}

}  // namespace inlane
