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

// Guide-line smoothing.
//
// Decision variables are the heading, curvature and curvature rate at every
// knot plus the length of every piece:
//
//   x = [theta_0, kappa_0, dkappa_0, ..., theta_{n-1}, kappa_{n-1},
//        dkappa_{n-1}, ds_0, ..., ds_{n-2}]
//
// Adjacent pieces share the knot triple, so heading, curvature and curvature
// rate are continuous by construction. Knot 0 is pinned to the first input
// point; knot k >= 1 is reached by integrating pieces 0..k-1 and must stay
// within max_deviation of input point k.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "inlane/errors.hpp"
#include "inlane/geometry.hpp"
#include "inlane/guide_line.hpp"
#include "inlane/nlp.hpp"
#include "inlane/quadrature.hpp"

namespace inlane {

struct RawGuideLine {
  std::vector<Point2> points;
};

struct SmootherConfig {
  double max_deviation = 0.1;
  int internal_points = 8;
  double w_length = 1.0;
  double w_kappa = 100.0;
  double w_dkappa = 1000.0;
  // Bound on the curvature rate at the first and last knot.
  double terminal_dkappa_bound = 0.1;
  double min_length_ratio = 0.5;
  double max_length_ratio = 3.0;
  SolverOptions solver = default_solver_options();

  // Deviation rows depend on every preceding piece, so their penalty
  // curvature is dense; plain L-BFGS is faster here. Rows are squared
  // distances, so a violation of 1e-8 m^2 keeps knots within about 5e-8 m of
  // the budget.
  static SolverOptions default_solver_options() {
    SolverOptions o;
    o.precondition = false;
    o.tol_feas = 1e-8;
    return o;
  }

  bool operator==(const SmootherConfig&) const = default;

  void validate() const {
    auto fail = [](const std::string& m) { throw InvalidArgument(m); };
    if (!(max_deviation > 0.0)) fail("smoother.max_deviation must be > 0");
    if (internal_points < 2) fail("smoother.internal_points must be >= 2");
    if (w_length < 0 || w_kappa < 0 || w_dkappa < 0) {
      fail("smoother weights must be non-negative");
    }
    if (w_length == 0 && w_kappa == 0 && w_dkappa == 0) {
      fail("smoother weights must not all be zero");
    }
    if (!(terminal_dkappa_bound >= 0.0)) {
      fail("smoother.terminal_dkappa_bound must be >= 0");
    }
    if (!(min_length_ratio > 0.0 && min_length_ratio <= 1.0 &&
          max_length_ratio >= 1.0)) {
      fail("smoother length ratios must bracket 1");
    }
  }
};

namespace smoother_layout {
inline Eigen::Index theta(std::size_t knot) { return 3 * static_cast<Eigen::Index>(knot); }
inline Eigen::Index kappa(std::size_t knot) { return theta(knot) + 1; }
inline Eigen::Index dkappa(std::size_t knot) { return theta(knot) + 2; }
inline Eigen::Index length(std::size_t n_knots, std::size_t piece) {
  return 3 * static_cast<Eigen::Index>(n_knots) + static_cast<Eigen::Index>(piece);
}
inline Eigen::Index dimension(std::size_t n_knots) {
  return 4 * static_cast<Eigen::Index>(n_knots) - 1;
}
}  // namespace smoother_layout

inline void validate_raw(const RawGuideLine& raw) {
  if (raw.points.size() < 2) {
    throw InvalidArgument("raw guide line needs at least 2 points");
  }
  for (std::size_t i = 0; i + 1 < raw.points.size(); ++i) {
    if (!(distance(raw.points[i], raw.points[i + 1]) > 0.0)) {
      std::ostringstream msg;
      msg << "raw guide line points " << i << " and " << i + 1
          << " coincide";
      throw InvalidArgument(msg.str());
    }
  }
}

// Chord headings unwrapped so that consecutive values differ by less than pi.
inline std::vector<double> unwrapped_chord_headings(const RawGuideLine& raw) {
  std::vector<double> h;
  h.reserve(raw.points.size() - 1);
  for (std::size_t i = 0; i + 1 < raw.points.size(); ++i) {
    const double a = std::atan2(raw.points[i + 1].y - raw.points[i].y,
                                raw.points[i + 1].x - raw.points[i].x);
    if (h.empty()) {
      h.push_back(a);
    } else {
      h.push_back(h.back() + std::remainder(a - h.back(), 2.0 * std::numbers::pi));
    }
  }
  return h;
}

// Starting iterate: chord-derived headings (interior knots average the two
// adjacent chords), zero curvature and curvature rate, chord lengths.
inline Vector initial_guess(const RawGuideLine& raw) {
  validate_raw(raw);
  namespace L = smoother_layout;
  const std::size_t n = raw.points.size();
  const auto chord_heading = unwrapped_chord_headings(raw);
  Vector x = Vector::Zero(L::dimension(n));
  for (std::size_t i = 0; i < n; ++i) {
    double th;
    if (i == 0) {
      th = chord_heading.front();
    } else if (i == n - 1) {
      th = chord_heading.back();
    } else {
      th = 0.5 * (chord_heading[i - 1] + chord_heading[i]);
    }
    x[L::theta(i)] = th;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    x[L::length(n, i)] = distance(raw.points[i], raw.points[i + 1]);
  }
  return x;
}

namespace detail {

// Everything a single piece contributes, with derivatives with respect to its
// seven inputs (theta_i, kappa_i, dkappa_i, theta_{i+1}, kappa_{i+1},
// dkappa_{i+1}, ds_i).
struct PieceTerms {
  double cost = 0.0;
  std::array<double, 7> cost_grad{};
  Point2 displacement;
  std::array<double, 7> dx_grad{};
  std::array<double, 7> dy_grad{};
};

inline std::array<double, 7> piece_inputs(const Vector& x, std::size_t n,
                                          std::size_t i) {
  namespace L = smoother_layout;
  return {x[L::theta(i)],     x[L::kappa(i)],     x[L::dkappa(i)],
          x[L::theta(i + 1)], x[L::kappa(i + 1)], x[L::dkappa(i + 1)],
          x[L::length(n, i)]};
}

inline std::array<Eigen::Index, 7> piece_indices(std::size_t n,
                                                 std::size_t i) {
  namespace L = smoother_layout;
  return {L::theta(i),     L::kappa(i),     L::dkappa(i),     L::theta(i + 1),
          L::kappa(i + 1), L::dkappa(i + 1), L::length(n, i)};
}

inline PieceTerms piece_terms(const std::array<double, 7>& u,
                              const SmootherConfig& cfg, bool need_cost,
                              bool need_position) {
  PieceTerms out;
  const double h = u[6];
  const QuinticFit fit =
      fit_quintic_coefficients({u[0], u[1], u[2]}, {u[3], u[4], u[5]}, h);
  const auto& c = fit.coeffs;
  const SpiralCurve curve(c, h);

  // d(term)/d(c_j) accumulated here, plus the explicit d/dh part.
  std::array<double, 6> dcost_dc{};
  double dcost_dh = 0.0;
  std::array<double, 6> ddx_dc{}, ddy_dc{};
  double ddx_dh = 0.0, ddy_dh = 0.0;

  if (need_cost) {
    const int m = cfg.internal_points;
    const double inv_m = 1.0 / m;
    double sum = 0.0;
    double dsum_dh = 0.0;
    for (int k = 1; k <= m; ++k) {
      const double frac = k * inv_m;
      const double s = frac * h;
      const double kap = curve.kappa_unchecked(s);
      const double dk = curve.dkappa_unchecked(s);
      const double ddk = curve.ddkappa_unchecked(s);
      sum += cfg.w_kappa * kap * kap + cfg.w_dkappa * dk * dk;
      dsum_dh += frac * (2.0 * cfg.w_kappa * kap * dk +
                         2.0 * cfg.w_dkappa * dk * ddk);
      double sp = 1.0;  // s^(j-1)
      double sp2 = 1.0;  // s^(j-2)
      for (int j = 1; j <= 5; ++j) {
        double term = 2.0 * cfg.w_kappa * kap * j * sp;
        if (j >= 2) {
          term += 2.0 * cfg.w_dkappa * dk * j * (j - 1) * sp2;
          sp2 *= s;
        }
        dcost_dc[j] += term;
        sp *= s;
      }
    }
    out.cost = cfg.w_length * h + h * inv_m * sum;
    for (auto& v : dcost_dc) v *= h * inv_m;
    dcost_dh = cfg.w_length + inv_m * sum + h * inv_m * dsum_dh;
  }

  if (need_position) {
    // Same composite rule as SpiralCurve::displacement_unchecked.
    constexpr std::size_t order = kPositionQuadratureOrder;
    constexpr std::size_t panels = kPositionQuadraturePanels;
    const auto& rule = GaussLegendre<order>::rule();
    const double pw = 0.5 / static_cast<double>(panels);
    double sx = 0.0, sy = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      for (std::size_t q = 0; q < order; ++q) {
        const double tau =
            (2.0 * static_cast<double>(p) + 1.0 + rule.nodes[q]) * pw;
        const double w = rule.weights[q] * pw;
        const double s = tau * h;
        const double th = curve.theta_unchecked(s);
        const double co = std::cos(th), si = std::sin(th);
        sx += w * co;
        sy += w * si;
        double sj = 1.0;
        for (int j = 0; j <= 5; ++j) {
          ddx_dc[j] -= h * w * si * sj;
          ddy_dc[j] += h * w * co * sj;
          sj *= s;
        }
        const double kap = curve.kappa_unchecked(s);
        ddx_dh -= h * w * si * kap * tau;
        ddy_dh += h * w * co * kap * tau;
      }
    }
    out.displacement = {h * sx, h * sy};
    ddx_dh += sx;
    ddy_dh += sy;
  }

  for (int k = 0; k < 7; ++k) {
    double gc = 0.0, gx = 0.0, gy = 0.0;
    for (int j = 0; j < 6; ++j) {
      gc += dcost_dc[j] * fit.jacobian[j][k];
      gx += ddx_dc[j] * fit.jacobian[j][k];
      gy += ddy_dc[j] * fit.jacobian[j][k];
    }
    out.cost_grad[k] = gc;
    out.dx_grad[k] = gx;
    out.dy_grad[k] = gy;
  }
  out.cost_grad[6] += dcost_dh;
  out.dx_grad[6] += ddx_dh;
  out.dy_grad[6] += ddy_dh;
  return out;
}

}  // namespace detail

// Builds the smoothing problem. The returned evaluators hold copies of the
// inputs and may outlive the arguments.
inline NlpProblem build_smoother_nlp(const RawGuideLine& raw,
                                     const SmootherConfig& config) {
  validate_raw(raw);
  config.validate();
  namespace L = smoother_layout;
  const std::size_t n = raw.points.size();
  const std::size_t pieces = n - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  NlpProblem p;
  p.dimension = L::dimension(n);
  p.num_inequalities = static_cast<Eigen::Index>(pieces);
  p.lower = Vector::Constant(p.dimension, -inf);
  p.upper = Vector::Constant(p.dimension, inf);
  p.scaling = Vector::Ones(p.dimension);
  for (std::size_t i = 0; i < pieces; ++i) {
    const double chord = distance(raw.points[i], raw.points[i + 1]);
    p.lower[L::length(n, i)] = config.min_length_ratio * chord;
    p.upper[L::length(n, i)] = config.max_length_ratio * chord;
    p.scaling[L::length(n, i)] = chord;
  }
  for (std::size_t knot : {std::size_t{0}, n - 1}) {
    p.lower[L::dkappa(knot)] = -config.terminal_dkappa_bound;
    p.upper[L::dkappa(knot)] = config.terminal_dkappa_bound;
  }

  const auto points = raw.points;
  const auto cfg = config;

  p.objective = [n, pieces, cfg](const Vector& x) {
    double f = 0.0;
    for (std::size_t i = 0; i < pieces; ++i) {
      f += detail::piece_terms(detail::piece_inputs(x, n, i), cfg, true, false)
               .cost;
    }
    return f;
  };
  p.gradient = [n, pieces, cfg](const Vector& x, Vector& g) {
    g.setZero();
    for (std::size_t i = 0; i < pieces; ++i) {
      const auto t =
          detail::piece_terms(detail::piece_inputs(x, n, i), cfg, true, false);
      const auto idx = detail::piece_indices(n, i);
      for (int k = 0; k < 7; ++k) g[idx[k]] += t.cost_grad[k];
    }
  };
  const double r2 = config.max_deviation * config.max_deviation;
  // g_k = |P_{k+1} - Q_{k+1}|^2 - r^2 for k = 0..pieces-1.
  p.inequalities = [n, pieces, cfg, points, r2](const Vector& x, Vector& g) {
    Point2 pos = points.front();
    for (std::size_t i = 0; i < pieces; ++i) {
      const auto t =
          detail::piece_terms(detail::piece_inputs(x, n, i), cfg, false, true);
      pos.x += t.displacement.x;
      pos.y += t.displacement.y;
      const double ex = pos.x - points[i + 1].x;
      const double ey = pos.y - points[i + 1].y;
      g[static_cast<Eigen::Index>(i)] = ex * ex + ey * ey - r2;
    }
  };
  p.inequality_jacobian = [n, pieces, cfg, points](const Vector& x,
                                                   SparseJacobian& jac) {
    std::vector<detail::PieceTerms> terms;
    terms.reserve(pieces);
    Point2 pos = points.front();
    std::vector<Point2> err;
    err.reserve(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
      terms.push_back(detail::piece_terms(detail::piece_inputs(x, n, i), cfg,
                                          false, true));
      pos.x += terms.back().displacement.x;
      pos.y += terms.back().displacement.y;
      err.push_back({pos.x - points[i + 1].x, pos.y - points[i + 1].y});
    }
    for (std::size_t row = 0; row < pieces; ++row) {
      for (std::size_t i = 0; i <= row; ++i) {
        const auto idx = detail::piece_indices(n, i);
        for (int k = 0; k < 7; ++k) {
          const double v = 2.0 * (err[row].x * terms[i].dx_grad[k] +
                                  err[row].y * terms[i].dy_grad[k]);
          jac.push_back({static_cast<Eigen::Index>(row), idx[k], v});
        }
      }
    }
  };
  return p;
}

// Rebuilds the spiral chain described by a variable vector.
inline GuideLine guide_line_from_variables(const RawGuideLine& raw,
                                           const Vector& x) {
  namespace L = smoother_layout;
  const std::size_t n = raw.points.size();
  std::vector<SpiralCurve> pieces;
  pieces.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pieces.push_back(fit_quintic_spiral(
        {x[L::theta(i)], x[L::kappa(i)], x[L::dkappa(i)]},
        {x[L::theta(i + 1)], x[L::kappa(i + 1)], x[L::dkappa(i + 1)]},
        x[L::length(n, i)]));
  }
  return GuideLine(std::move(pieces), raw.points.front());
}

struct SmoothingResult {
  GuideLine line;
  SolveReport report;
  double initial_objective = 0.0;
  double max_deviation = 0.0;  // largest knot-to-input distance
};

inline double max_knot_deviation(const GuideLine& line,
                                 const RawGuideLine& raw) {
  double worst = 0.0;
  const auto& knots = line.knot_positions();
  for (std::size_t i = 0; i < raw.points.size() && i < knots.size(); ++i) {
    worst = std::max(worst, distance(knots[i], raw.points[i]));
  }
  return worst;
}

// Solves the smoothing problem from initial_guess(). Throws SolverError with
// the solver report (and its last iterate) when the engine does not converge.
inline SmoothingResult smooth_guideline(const RawGuideLine& raw,
                                        const SmootherConfig& config) {
  const NlpProblem problem = build_smoother_nlp(raw, config);
  const Vector x0 = initial_guess(raw);
  SolveReport report = solve(problem, x0, config.solver);
  if (!report.converged()) {
    std::ostringstream msg;
    msg << "guide-line smoothing failed: " << to_string(report.status)
        << " after " << report.iterations << " iterations (violation "
        << report.max_violation << ")";
    if (!report.message.empty()) msg << ": " << report.message;
    throw SolverError(msg.str(), std::move(report));
  }
  GuideLine line = guide_line_from_variables(raw, report.x);
  const double deviation = max_knot_deviation(line, raw);
  return SmoothingResult{std::move(line), std::move(report),
                         problem.objective(x0), deviation};
}

}  // namespace inlane
