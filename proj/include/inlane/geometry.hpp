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
#include <sstream>
#include <string>

#include "inlane/errors.hpp"
#include "inlane/quadrature.hpp"

namespace inlane {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Heading, curvature and curvature rate at one end of a spiral piece.
struct SpiralBoundary {
  double theta = 0.0;
  double kappa = 0.0;
  double dkappa = 0.0;
};

// Position integration uses a fixed composite Gauss-Legendre rule: the
// interval [0, s] is split into kPositionQuadraturePanels equal panels with an
// 8-point rule on each. The panel count is independent of s so positions stay
// smooth functions of the piece length.
inline constexpr std::size_t kPositionQuadratureOrder = 8;
inline constexpr std::size_t kPositionQuadraturePanels = 4;

// Polynomial spiral theta(s) = sum_j c_j s^j on [0, length].
//
// Immutable after construction. Headings are never normalized: the caller owns
// angle unwrapping so that the representation stays differentiable.
class SpiralCurve {
 public:
  static constexpr std::size_t kDegree = 5;
  using Coefficients = std::array<double, kDegree + 1>;

  SpiralCurve(const Coefficients& coeffs, double length)
      : coeffs_(coeffs), length_(length) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      std::ostringstream msg;
      msg << "spiral length must be positive and finite, got " << length;
      throw InvalidArgument(msg.str());
    }
  }

  const Coefficients& coeffs() const { return coeffs_; }
  double length() const { return length_; }

  // Unchecked Horner evaluation; valid for any s (used by quadrature and
  // optimizer inner loops that already know s is admissible).
  double theta_unchecked(double s) const {
    double v = coeffs_[5];
    for (int j = 4; j >= 0; --j) v = v * s + coeffs_[j];
    return v;
  }
  double kappa_unchecked(double s) const {
    double v = 5.0 * coeffs_[5];
    for (int j = 4; j >= 1; --j) v = v * s + j * coeffs_[j];
    return v;
  }
  double dkappa_unchecked(double s) const {
    double v = 20.0 * coeffs_[5];
    for (int j = 4; j >= 2; --j) v = v * s + j * (j - 1) * coeffs_[j];
    return v;
  }
  double ddkappa_unchecked(double s) const {
    double v = 60.0 * coeffs_[5];
    for (int j = 4; j >= 3; --j) v = v * s + j * (j - 1) * (j - 2) * coeffs_[j];
    return v;
  }

  // Displacement (integral of (cos theta, sin theta) over [0, s]).
  template <std::size_t Order = kPositionQuadratureOrder,
            std::size_t Panels = kPositionQuadraturePanels>
  Point2 displacement_unchecked(double s) const {
    if (s == 0.0) return {};
    const auto& rule = GaussLegendre<Order>::rule();
    const double half = 0.5 * s / static_cast<double>(Panels);
    Point2 d;
    for (std::size_t p = 0; p < Panels; ++p) {
      const double mid = (2.0 * static_cast<double>(p) + 1.0) * half;
      for (std::size_t q = 0; q < Order; ++q) {
        const double th = theta_unchecked(mid + half * rule.nodes[q]);
        d.x += rule.weights[q] * std::cos(th);
        d.y += rule.weights[q] * std::sin(th);
      }
    }
    d.x *= half;
    d.y *= half;
    return d;
  }

  void check_range(double s) const {
    if (!(s >= 0.0 && s <= length_)) {
      std::ostringstream msg;
      msg << "arc length " << s << " outside spiral domain [0, " << length_
          << "]";
      throw RangeError(msg.str());
    }
  }

 private:
  Coefficients coeffs_;
  double length_;
};

inline double eval_theta(const SpiralCurve& curve, double s) {
  curve.check_range(s);
  return curve.theta_unchecked(s);
}

inline double eval_kappa(const SpiralCurve& curve, double s) {
  curve.check_range(s);
  return curve.kappa_unchecked(s);
}

inline double eval_dkappa(const SpiralCurve& curve, double s) {
  curve.check_range(s);
  return curve.dkappa_unchecked(s);
}

inline Point2 integrate_position(const SpiralCurve& curve, double s,
                                 const Point2& origin) {
  curve.check_range(s);
  const Point2 d = curve.displacement_unchecked(s);
  return {origin.x + d.x, origin.y + d.y};
}

// Quintic coefficients and their sensitivities to the seven fit inputs
// (theta0, kappa0, dkappa0, theta1, kappa1, dkappa1, length).
struct QuinticFit {
  SpiralCurve::Coefficients coeffs{};
  // jacobian[j][k] = d c_j / d input_k
  std::array<std::array<double, 7>, 6> jacobian{};
};

inline QuinticFit fit_quintic_coefficients(const SpiralBoundary& a,
                                           const SpiralBoundary& b,
                                           double length) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    std::ostringstream msg;
    msg << "spiral length must be positive and finite, got " << length;
    throw InvalidArgument(msg.str());
  }
  const double h = length;
  const double h2 = h * h;
  const double h3 = h2 * h;
  const double h4 = h3 * h;
  const double h5 = h4 * h;
  const double h6 = h5 * h;
  const double dth = b.theta - a.theta;

  QuinticFit fit;
  auto& c = fit.coeffs;
  auto& J = fit.jacobian;
  c[0] = a.theta;
  c[1] = a.kappa;
  c[2] = 0.5 * a.dkappa;
  c[3] = 10.0 * dth / h3 - (4.0 * b.kappa + 6.0 * a.kappa) / h2 -
         (1.5 * a.dkappa - 0.5 * b.dkappa) / h;
  c[4] = -15.0 * dth / h4 + (7.0 * b.kappa + 8.0 * a.kappa) / h3 +
         (1.5 * a.dkappa - b.dkappa) / h2;
  c[5] = 6.0 * dth / h5 - 3.0 * (b.kappa + a.kappa) / h4 -
         0.5 * (a.dkappa - b.dkappa) / h3;

  J[0] = {1, 0, 0, 0, 0, 0, 0};
  J[1] = {0, 1, 0, 0, 0, 0, 0};
  J[2] = {0, 0, 0.5, 0, 0, 0, 0};
  J[3] = {-10.0 / h3, -6.0 / h2, -1.5 / h, 10.0 / h3, -4.0 / h2, 0.5 / h,
          -30.0 * dth / h4 + 2.0 * (4.0 * b.kappa + 6.0 * a.kappa) / h3 +
              (1.5 * a.dkappa - 0.5 * b.dkappa) / h2};
  J[4] = {15.0 / h4, 8.0 / h3, 1.5 / h2, -15.0 / h4, 7.0 / h3, -1.0 / h2,
          60.0 * dth / h5 - 3.0 * (7.0 * b.kappa + 8.0 * a.kappa) / h4 -
              2.0 * (1.5 * a.dkappa - b.dkappa) / h3};
  J[5] = {-6.0 / h5, -3.0 / h4, -0.5 / h3, 6.0 / h5, -3.0 / h4, 0.5 / h3,
          -30.0 * dth / h6 + 12.0 * (b.kappa + a.kappa) / h5 +
              1.5 * (a.dkappa - b.dkappa) / h4};
  return fit;
}

// Closed-form quintic Hermite fit: the unique spiral matching heading,
// curvature and curvature rate at both ends of a piece of the given length.
inline SpiralCurve fit_quintic_spiral(const SpiralBoundary& start,
                                      const SpiralBoundary& end,
                                      double length) {
  return SpiralCurve(fit_quintic_coefficients(start, end, length).coeffs,
                     length);
}

inline SpiralCurve fit_quintic_spiral(double theta0, double kappa0,
                                      double dkappa0, double theta1,
                                      double kappa1, double dkappa1,
                                      double length) {
  return fit_quintic_spiral(SpiralBoundary{theta0, kappa0, dkappa0},
                            SpiralBoundary{theta1, kappa1, dkappa1}, length);
}

}  // namespace inlane
