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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "inlane/errors.hpp"
#include "inlane/geometry.hpp"

namespace inlane {

// Smoothed guide line: a chain of spiral pieces joined at knots.
//
// knot_positions[i] is the start of pieces[i]; knot 0 is the anchor and every
// later knot is obtained by integrating the preceding piece. Queries past the
// last knot continue along a straight extension of extension_length() meters.
class GuideLine {
 public:
  static constexpr double kDefaultExtension = 100.0;
  static constexpr double kSampleSpacing = 1.0;

  GuideLine(std::vector<SpiralCurve> pieces, Point2 anchor,
            double extension = kDefaultExtension)
      : pieces_(std::move(pieces)), extension_(extension) {
    if (pieces_.empty()) throw InvalidArgument("guide line needs a piece");
    if (!(extension >= 0.0)) {
      throw InvalidArgument("guide line extension must be non-negative");
    }
    knots_.reserve(pieces_.size() + 1);
    cumulative_.reserve(pieces_.size() + 1);
    knots_.push_back(anchor);
    cumulative_.push_back(0.0);
    for (const auto& piece : pieces_) {
      knots_.push_back(integrate_position(piece, piece.length(), knots_.back()));
      cumulative_.push_back(cumulative_.back() + piece.length());
    }
    end_theta_ = pieces_.back().theta_unchecked(pieces_.back().length());
    build_samples();
  }

  const std::vector<SpiralCurve>& pieces() const { return pieces_; }
  const std::vector<Point2>& knot_positions() const { return knots_; }
  const std::vector<double>& cumulative_lengths() const { return cumulative_; }
  double total_length() const { return cumulative_.back(); }
  double extension_length() const { return extension_; }
  double extended_length() const { return total_length() + extension_; }
  double end_theta() const { return end_theta_; }

  // Index of the piece containing s, s clamped to [0, total_length].
  std::size_t piece_index(double s) const {
    if (s <= 0.0) return 0;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, pieces_.size() - 1);
  }

  // Positions sampled every kSampleSpacing meters over [0, extended_length];
  // the last sample sits exactly at extended_length.
  struct Sample {
    double s;
    Point2 p;
  };
  const std::vector<Sample>& samples() const { return samples_; }

  Point2 position_unclamped(double s) const {
    if (s >= total_length()) {
      const double ds = s - total_length();
      return {knots_.back().x + ds * std::cos(end_theta_),
              knots_.back().y + ds * std::sin(end_theta_)};
    }
    const std::size_t i = piece_index(s);
    const double local = std::clamp(s - cumulative_[i], 0.0,
                                    pieces_[i].length());
    const Point2 d = pieces_[i].displacement_unchecked(local);
    return {knots_[i].x + d.x, knots_[i].y + d.y};
  }

 private:
  void build_samples() {
    const double end = extended_length();
    const auto count =
        static_cast<std::size_t>(std::floor(end / kSampleSpacing));
    samples_.reserve(count + 2);
    for (std::size_t k = 0; k <= count; ++k) {
      const double s = static_cast<double>(k) * kSampleSpacing;
      samples_.push_back({s, position_unclamped(s)});
    }
    if (samples_.back().s < end) {
      samples_.push_back({end, position_unclamped(end)});
    }
  }

  std::vector<SpiralCurve> pieces_;
  std::vector<Point2> knots_;
  std::vector<double> cumulative_;
  std::vector<Sample> samples_;
  double extension_;
  double end_theta_ = 0.0;
};

}  // namespace inlane
