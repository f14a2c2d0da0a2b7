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

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace inlane {

// Nodes and weights of an N-point Gauss-Legendre rule on [-1, 1].
//
// Roots are found by Newton iteration on the three-term Legendre recurrence,
// starting from the Chebyshev-like estimate cos(pi (i - 1/4) / (N + 1/2)).
// The table is computed once per N and is immutable afterwards.
template <std::size_t N>
struct GaussLegendre {
  static_assert(N >= 1, "Gauss-Legendre rule needs at least one node");

  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  static const GaussLegendre& rule() {
    static const GaussLegendre table = build();
    return table;
  }

  // Integral of f over [a, b].
  template <typename F>
  static double integrate(F&& f, double a, double b) {
    const auto& r = rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t q = 0; q < N; ++q) {
      sum += r.weights[q] * f(mid + half * r.nodes[q]);
    }
    return half * sum;
  }

 private:
  static GaussLegendre build() {
    GaussLegendre out;
    const std::size_t m = (N + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = 0.0;
        for (std::size_t j = 1; j <= N; ++j) {
          const double p2 = p1;
          p1 = p0;
          const double jd = static_cast<double>(j);
          p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
        }
        dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      // Ascending order: node i is negative, its mirror positive.
      out.nodes[i] = -z;
      out.nodes[N - 1 - i] = z;
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      out.weights[i] = w;
      out.weights[N - 1 - i] = w;
    }
    return out;
  }
};

}  // namespace inlane
