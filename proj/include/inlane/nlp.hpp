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

// Smooth constrained minimization:
//
//   minimize f(x)  s.t.  c(x) = 0,  g(x) <= 0,  lower <= x <= upper
//
// Augmented-Lagrangian outer loop (equalities and inequalities handled with
// multiplier updates and a max(0, .)^2 penalty, no slack variables) around a
// bound-constrained projected L-BFGS inner solve. Only first derivatives are
// required. Evaluators must be pure functions of x.

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "inlane/errors.hpp"

namespace inlane {

using Vector = Eigen::VectorXd;

struct JacobianEntry {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double value = 0.0;
};

// Triplet list; duplicate (row, col) entries are summed.
using SparseJacobian = std::vector<JacobianEntry>;

struct NlpProblem {
  Eigen::Index dimension = 0;
  Eigen::Index num_equalities = 0;
  Eigen::Index num_inequalities = 0;

  std::function<double(const Vector&)> objective;
  std::function<void(const Vector&, Vector&)> gradient;
  std::function<void(const Vector&, Vector&)> equalities;
  std::function<void(const Vector&, SparseJacobian&)> equality_jacobian;
  // Inequalities are expressed as g(x) <= 0.
  std::function<void(const Vector&, Vector&)> inequalities;
  std::function<void(const Vector&, SparseJacobian&)> inequality_jacobian;

  Vector lower;
  Vector upper;

  // Optional typical magnitude of each variable. When set, the inner solve
  // works on x / scaling, which evens out the curvature seen by L-BFGS.
  Vector scaling;

  void validate() const {
    auto fail = [](const std::string& m) { throw InvalidArgument(m); };
    if (dimension <= 0) fail("problem dimension must be positive");
    if (!objective || !gradient) fail("objective and gradient are required");
    if (num_equalities > 0 && (!equalities || !equality_jacobian)) {
      fail("equality evaluators missing");
    }
    if (num_inequalities > 0 && (!inequalities || !inequality_jacobian)) {
      fail("inequality evaluators missing");
    }
    if (lower.size() != dimension || upper.size() != dimension) {
      fail("bound vectors do not match problem dimension");
    }
    if (scaling.size() != 0) {
      if (scaling.size() != dimension) fail("scaling does not match dimension");
      if (!(scaling.array() > 0.0).all()) fail("scaling must be positive");
    }
    for (Eigen::Index i = 0; i < dimension; ++i) {
      if (!(lower[i] <= upper[i])) {
        std::ostringstream msg;
        msg << "lower bound exceeds upper bound at variable " << i;
        fail(msg.str());
      }
    }
  }
};

enum class SolveStatus { kConverged, kMaxIterations, kInfeasible, kNumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max-iterations";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct SolverOptions {
  double tol_opt = 1e-6;   // scaled projected KKT stationarity
  double tol_feas = 1e-6;  // max constraint violation
  int max_outer_iterations = 60;
  int max_inner_iterations = 20000;  // per outer iteration
  int max_total_iterations = 200000;
  int lbfgs_memory = 20;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e8;
  // Penalty grows unless violation shrinks by at least this factor.
  double required_violation_reduction = 0.25;
  double initial_inner_tolerance = 1e-2;
  // At max_penalty, an outer iteration counts as stalled unless the
  // violation falls below stall_ratio times its previous value.
  double stall_ratio = 0.99;
  // Seed each L-BFGS step with the factored penalty curvature plus a
  // finite-difference diagonal of the objective Hessian instead of a scalar.
  bool precondition = true;

  bool operator==(const SolverOptions&) const = default;
};

struct OuterIterationRecord {
  double penalty = 0.0;
  double merit_start = 0.0;
  double merit_end = 0.0;
  double violation = 0.0;
  int inner_iterations = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kMaxIterations;
  int iterations = 0;  // total inner iterations
  int outer_iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double max_violation = std::numeric_limits<double>::infinity();
  double kkt_residual = std::numeric_limits<double>::infinity();
  Vector x;
  Vector equality_multipliers;
  Vector inequality_multipliers;
  std::vector<OuterIterationRecord> history;
  std::string message;

  bool converged() const { return status == SolveStatus::kConverged; }
};

// Raised by the planning phases when the engine does not converge; carries the
// full report including the last iterate.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

namespace detail {

struct NonFinite {
  std::string where;
};

inline void require_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << what << " component " << i << " is not finite";
      throw NonFinite{msg.str()};
    }
  }
}

inline void accumulate_transpose(const SparseJacobian& jac, const Vector& w,
                                 Vector& out) {
  for (const auto& e : jac) out[e.col] += e.value * w[e.row];
}

inline Vector project(const Vector& x, const Vector& lo, const Vector& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

inline double projected_gradient_norm(const Vector& x, const Vector& g,
                                      const Vector& lo, const Vector& hi) {
  return (project(x - g, lo, hi) - x).lpNorm<Eigen::Infinity>();
}

// Augmented Lagrangian of a problem at fixed multipliers and penalty,
// expressed in scaled coordinates z = x / scale.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const NlpProblem& p, const Vector& scale,
                      const Vector& lambda, const Vector& mu, double rho)
      : p_(p), scale_(scale), lambda_(lambda), mu_(mu), rho_(rho) {}

  double value(const Vector& z) const { return value_x(z.cwiseProduct(scale_)); }

  double value_and_gradient(const Vector& z, Vector& grad) const {
    const double phi = value_and_gradient_x(z.cwiseProduct(scale_), grad);
    grad.array() *= scale_.array();
    return phi;
  }

  // rho * (Je^T Je + sum over active inequalities of grad g grad g^T) in
  // scaled coordinates, restricted to free variables.
  void penalty_curvature(const Vector& z, const Vector& free_mask,
                         std::vector<Eigen::Triplet<double>>& out) const {
    const Vector x = z.cwiseProduct(scale_);
    auto add_rows = [&](const SparseJacobian& jac, const std::vector<bool>* active) {
      std::vector<JacobianEntry> sorted(jac.begin(), jac.end());
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const JacobianEntry& a, const JacobianEntry& b) {
                         return a.row < b.row;
                       });
      std::size_t begin = 0;
      while (begin < sorted.size()) {
        std::size_t end = begin;
        while (end < sorted.size() && sorted[end].row == sorted[begin].row) ++end;
        if (!active || (*active)[static_cast<std::size_t>(sorted[begin].row)]) {
          for (std::size_t a = begin; a < end; ++a) {
            const Eigen::Index ca = sorted[a].col;
            if (free_mask[ca] == 0.0) continue;
            const double va = sorted[a].value * scale_[ca];
            for (std::size_t b = begin; b < end; ++b) {
              const Eigen::Index cb = sorted[b].col;
              if (free_mask[cb] == 0.0) continue;
              out.emplace_back(ca, cb, rho_ * va * sorted[b].value * scale_[cb]);
            }
          }
        }
        begin = end;
      }
    };
    if (p_.num_equalities > 0) {
      jac_.clear();
      p_.equality_jacobian(x, jac_);
      add_rows(jac_, nullptr);
    }
    if (p_.num_inequalities > 0) {
      Vector g(p_.num_inequalities);
      p_.inequalities(x, g);
      std::vector<bool> active(static_cast<std::size_t>(g.size()));
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        active[static_cast<std::size_t>(i)] = mu_[i] + rho_ * g[i] > 0.0;
      }
      jac_.clear();
      p_.inequality_jacobian(x, jac_);
      add_rows(jac_, &active);
    }
  }

 private:
  double value_x(const Vector& x) const {
    double phi = p_.objective(x);
    if (!std::isfinite(phi)) throw NonFinite{"objective is not finite"};
    if (p_.num_equalities > 0) {
      Vector c(p_.num_equalities);
      p_.equalities(x, c);
      require_finite(c, "equality constraint");
      phi += lambda_.dot(c) + 0.5 * rho_ * c.squaredNorm();
    }
    if (p_.num_inequalities > 0) {
      Vector g(p_.num_inequalities);
      p_.inequalities(x, g);
      require_finite(g, "inequality constraint");
      const Vector shifted = (mu_ + rho_ * g).cwiseMax(0.0);
      phi += (shifted.squaredNorm() - mu_.squaredNorm()) / (2.0 * rho_);
    }
    return phi;
  }

  double value_and_gradient_x(const Vector& x, Vector& grad) const {
    double phi = p_.objective(x);
    if (!std::isfinite(phi)) throw NonFinite{"objective is not finite"};
    grad.setZero(p_.dimension);
    p_.gradient(x, grad);
    require_finite(grad, "objective gradient");
    if (p_.num_equalities > 0) {
      Vector c(p_.num_equalities);
      p_.equalities(x, c);
      require_finite(c, "equality constraint");
      phi += lambda_.dot(c) + 0.5 * rho_ * c.squaredNorm();
      jac_.clear();
      p_.equality_jacobian(x, jac_);
      accumulate_transpose(jac_, lambda_ + rho_ * c, grad);
    }
    if (p_.num_inequalities > 0) {
      Vector g(p_.num_inequalities);
      p_.inequalities(x, g);
      require_finite(g, "inequality constraint");
      const Vector shifted = (mu_ + rho_ * g).cwiseMax(0.0);
      phi += (shifted.squaredNorm() - mu_.squaredNorm()) / (2.0 * rho_);
      jac_.clear();
      p_.inequality_jacobian(x, jac_);
      accumulate_transpose(jac_, shifted, grad);
    }
    return phi;
  }

  const NlpProblem& p_;
  const Vector& scale_;
  const Vector& lambda_;
  const Vector& mu_;
  double rho_;
  mutable SparseJacobian jac_;
};

// Factored initial Hessian for the two-loop recursion. Pinned variables get
// an identity block and are masked out of the step anyway.
class Preconditioner {
 public:
  bool factor(const AugmentedLagrangian& fn, const Vector& z,
              const Vector& free_mask, const Vector& diag) {
    const Eigen::Index n = z.size();
    triplets_.clear();
    fn.penalty_curvature(z, free_mask, triplets_);
    for (Eigen::Index i = 0; i < n; ++i) {
      triplets_.emplace_back(i, i, free_mask[i] != 0.0 ? diag[i] : 1.0);
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(triplets_.begin(), triplets_.end());
    ldlt_.compute(m);
    ok_ = ldlt_.info() == Eigen::Success;
    return ok_;
  }
  bool ok() const { return ok_; }
  Vector apply(const Vector& q) const { return ldlt_.solve(q); }

 private:
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool ok_ = false;
};

struct InnerResult {
  int iterations = 0;
  bool converged = false;
};

// Projected L-BFGS on a box. Variables pinned at an active bound (gradient
// pushing outward) are frozen while the two-loop recursion builds the step;
// the step is then projected back onto the box and accepted by an Armijo
// backtracking search along the projection arc.
inline InnerResult minimize_on_box(const AugmentedLagrangian& fn, Vector& x,
                                   const Vector& lo, const Vector& hi,
                                   double tol, int max_iterations, int memory,
                                   int& budget,
                                   const Vector* hessian_diag = nullptr) {
  InnerResult out;
  const Eigen::Index n = x.size();
  Vector g(n);
  double phi = fn.value_and_gradient(x, g);

  std::deque<std::pair<Vector, Vector>> pairs;
  std::vector<double> alpha(static_cast<std::size_t>(memory));
  Vector free_mask(n);
  Vector d(n), xt(n), gt(n);
  int stalls = 0;
  Preconditioner pre;

  for (;;) {
    if (detail::projected_gradient_norm(x, g, lo, hi) <= tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= max_iterations || budget <= 0) return out;

    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = (x[i] <= lo[i] && g[i] > 0.0) ||
                          (x[i] >= hi[i] && g[i] < 0.0);
      free_mask[i] = pinned ? 0.0 : 1.0;
    }

    // Two-loop recursion on the free subspace.
    d = -g.cwiseProduct(free_mask);
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const auto& [s, y] = pairs[k];
      const double rho = 1.0 / y.dot(s);
      alpha[k] = rho * s.dot(d);
      d -= alpha[k] * y;
    }
    const bool use_pre =
        hessian_diag && pre.factor(fn, x, free_mask, *hessian_diag);
    if (use_pre) {
      d = pre.apply(d.cwiseProduct(free_mask));
    } else if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      d *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, y] = pairs[k];
      const double rho = 1.0 / y.dot(s);
      const double beta = rho * y.dot(d);
      d += (alpha[k] - beta) * s;
    }
    d = d.cwiseProduct(free_mask);

    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      pairs.clear();
      d = -g.cwiseProduct(free_mask);
      if (use_pre) d = pre.apply(d).cwiseProduct(free_mask);
      slope = g.dot(d);
    }

    double step = 1.0;
    if (pairs.empty() && !use_pre) {
      const double gmax = d.lpNorm<Eigen::Infinity>();
      if (gmax > 0.0) step = std::min(1.0, 1.0 / gmax);
    }

    bool accepted = false;
    double phit = phi;
    for (int ls = 0; ls < 60; ++ls) {
      xt = project(x + step * d, lo, hi);
      double trial = std::numeric_limits<double>::infinity();
      try {
        trial = fn.value(xt);
      } catch (const NonFinite&) {
        trial = std::numeric_limits<double>::infinity();
      }
      if (trial <= phi + 1e-4 * g.dot(xt - x)) {
        phit = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    --budget;

    if (!accepted) {
      if (!pairs.empty()) {
        pairs.clear();
        continue;
      }
      return out;  // no descent possible at working precision
    }

    phit = fn.value_and_gradient(xt, gt);
    Vector s = xt - x;
    Vector y = gt - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
      if (static_cast<int>(pairs.size()) == memory) pairs.pop_front();
      pairs.emplace_back(std::move(s), std::move(y));
    }
    const double decrease = phi - phit;
    x.swap(xt);
    g.swap(gt);
    phi = phit;

    if (decrease <= 1e-15 * std::max(1.0, std::abs(phi))) {
      if (++stalls >= 5) return out;
    } else {
      stalls = 0;
    }
  }
}

// Forward-difference diagonal of the objective Hessian in scaled
// coordinates, floored to keep the preconditioner positive definite.
inline Vector objective_hessian_diagonal(const NlpProblem& p, const Vector& x,
                                         const Vector& scale) {
  const Eigen::Index n = p.dimension;
  Vector g0 = Vector::Zero(n), g1 = Vector::Zero(n);
  p.gradient(x, g0);
  Vector d(n);
  Vector xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    g1.setZero();
    p.gradient(xp, g1);
    xp[i] = x[i];
    const double v = (g1[i] - g0[i]) / h * scale[i] * scale[i];
    d[i] = std::isfinite(v) ? v : 0.0;
  }
  const double floor = std::max(1e-8, 1e-6 * d.cwiseAbs().maxCoeff());
  return d.cwiseMax(floor);
}

}  // namespace detail

inline double max_violation(const NlpProblem& p, const Vector& x) {
  double v = 0.0;
  if (p.num_equalities > 0) {
    Vector c(p.num_equalities);
    p.equalities(x, c);
    v = std::max(v, c.lpNorm<Eigen::Infinity>());
  }
  if (p.num_inequalities > 0) {
    Vector g(p.num_inequalities);
    p.inequalities(x, g);
    v = std::max(v, g.maxCoeff());
  }
  return v;
}

inline SolveReport solve(const NlpProblem& problem, const Vector& x0,
                         const SolverOptions& options = {}) {
  problem.validate();
  if (x0.size() != problem.dimension) {
    throw InvalidArgument("initial point does not match problem dimension");
  }

  SolveReport report;
  report.x = detail::project(x0, problem.lower, problem.upper);
  const Vector scale = problem.scaling.size() == problem.dimension
                           ? problem.scaling
                           : Vector::Ones(problem.dimension);
  const Vector z_lower = problem.lower.cwiseQuotient(scale);
  const Vector z_upper = problem.upper.cwiseQuotient(scale);
  Vector lambda = Vector::Zero(problem.num_equalities);
  Vector mu = Vector::Zero(problem.num_inequalities);
  double rho = options.initial_penalty;
  int budget = options.max_total_iterations;

  try {
    Vector grad_f(problem.dimension);
    auto objective_gradient = [&](const Vector& x) {
      grad_f.setZero();
      problem.gradient(x, grad_f);
      detail::require_finite(grad_f, "objective gradient");
      return grad_f;
    };
    {
      const double f0 = problem.objective(report.x);
      if (!std::isfinite(f0)) throw detail::NonFinite{"objective is not finite"};
    }
    // Stationarity is measured in scaled coordinates relative to the initial
    // objective gradient.
    const double gradient_scale = std::max(
        1.0, objective_gradient(report.x)
                 .cwiseProduct(scale)
                 .lpNorm<Eigen::Infinity>());
    double inner_tol = options.initial_inner_tolerance * gradient_scale;
    const double final_inner_tol = 0.1 * options.tol_opt * gradient_scale;
    double previous_violation = max_violation(problem, report.x);
    int stalled_at_max_penalty = 0;

    Vector c(problem.num_equalities);
    Vector g(problem.num_inequalities);
    SparseJacobian jac;

    Vector hessian_diag;
    for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
      if (options.precondition) {
        hessian_diag = detail::objective_hessian_diagonal(problem, report.x, scale);
      }
      detail::AugmentedLagrangian merit(problem, scale, lambda, mu, rho);
      OuterIterationRecord rec;
      rec.penalty = rho;
      Vector z = report.x.cwiseQuotient(scale);
      rec.merit_start = merit.value(z);
      const auto inner = detail::minimize_on_box(
          merit, z, z_lower, z_upper, std::max(inner_tol, final_inner_tol),
          options.max_inner_iterations, options.lbfgs_memory, budget,
          options.precondition ? &hessian_diag : nullptr);
      rec.merit_end = merit.value(z);
      // Bounds hold exactly in x even if z * scale rounds across them.
      report.x = detail::project(z.cwiseProduct(scale), problem.lower,
                                 problem.upper);
      rec.inner_iterations = inner.iterations;
      report.iterations += inner.iterations;
      report.outer_iterations = outer + 1;

      // First-order multiplier updates.
      double violation = 0.0;
      if (problem.num_equalities > 0) {
        problem.equalities(report.x, c);
        lambda += rho * c;
        violation = std::max(violation, c.lpNorm<Eigen::Infinity>());
      }
      if (problem.num_inequalities > 0) {
        problem.inequalities(report.x, g);
        mu = (mu + rho * g).cwiseMax(0.0);
        violation = std::max(violation, g.maxCoeff());
      }
      rec.violation = violation;
      report.history.push_back(rec);

      Vector grad_l = objective_gradient(report.x);
      if (problem.num_equalities > 0) {
        jac.clear();
        problem.equality_jacobian(report.x, jac);
        detail::accumulate_transpose(jac, lambda, grad_l);
      }
      if (problem.num_inequalities > 0) {
        jac.clear();
        problem.inequality_jacobian(report.x, jac);
        detail::accumulate_transpose(jac, mu, grad_l);
      }
      grad_l.array() *= scale.array();
      report.kkt_residual =
          detail::projected_gradient_norm(report.x.cwiseQuotient(scale), grad_l,
                                          z_lower, z_upper) /
          gradient_scale;
      report.max_violation = violation;

      if (violation <= options.tol_feas &&
          report.kkt_residual <= options.tol_opt) {
        report.status = SolveStatus::kConverged;
        break;
      }
      if (budget <= 0) {
        report.status = SolveStatus::kMaxIterations;
        report.message = "iteration budget exhausted";
        break;
      }

      if (violation > options.tol_feas &&
          violation > options.required_violation_reduction * previous_violation) {
        // At the penalty cap only the multiplier updates remain; they may
        // converge slowly, so give up only once the violation stops falling.
        if (rho >= options.max_penalty &&
            violation > options.stall_ratio * previous_violation) {
          if (++stalled_at_max_penalty >= 5) {
            report.status = SolveStatus::kInfeasible;
            report.message =
                "constraint violation stalled at maximum penalty";
            break;
          }
        }
        rho = std::min(rho * options.penalty_growth, options.max_penalty);
      } else {
        stalled_at_max_penalty = 0;
      }
      previous_violation = violation;
      inner_tol = std::max(final_inner_tol, 0.1 * inner_tol);
    }
    if (report.status != SolveStatus::kConverged && report.message.empty()) {
      report.status = SolveStatus::kMaxIterations;
      report.message = "outer iteration limit reached";
    }
    report.objective = problem.objective(report.x);
  } catch (const detail::NonFinite& e) {
    report.status = SolveStatus::kNumericalFailure;
    report.message = e.where;
  }
  report.equality_multipliers = lambda;
  report.inequality_multipliers = mu;
  return report;
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::string location;  // e.g. "objective[4]" or "inequality[2][7]"
};

// Central finite differences of the objective and every constraint row,
// compared entrywise against the analytic derivatives. The error of an entry
// is |analytic - fd| / max(1, |analytic|, |fd|). Variables fixed by their
// bounds (lower == upper) admit no feasible perturbation and are skipped.
inline GradientCheck check_gradient(const NlpProblem& p, const Vector& x,
                                    double step = 1e-5) {
  p.validate();
  GradientCheck out;
  const Eigen::Index n = p.dimension;
  auto relative = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };
  auto note = [&out](double err, const std::string& where) {
    if (err > out.max_relative_error) {
      out.max_relative_error = err;
      out.location = where;
    }
  };

  Vector grad = Vector::Zero(n);
  p.gradient(x, grad);

  auto dense = [n](const SparseJacobian& jac, Eigen::Index rows) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, n);
    for (const auto& e : jac) m(e.row, e.col) += e.value;
    return m;
  };
  Eigen::MatrixXd je, ji;
  if (p.num_equalities > 0) {
    SparseJacobian jac;
    p.equality_jacobian(x, jac);
    je = dense(jac, p.num_equalities);
  }
  if (p.num_inequalities > 0) {
    SparseJacobian jac;
    p.inequality_jacobian(x, jac);
    ji = dense(jac, p.num_inequalities);
  }

  Vector xp = x, xm = x;
  Vector cp(p.num_equalities), cm(p.num_equalities);
  Vector gp(p.num_inequalities), gm(p.num_inequalities);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (p.lower[j] == p.upper[j]) continue;
    const double h = step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const double width = xp[j] - xm[j];  // exact representable step
    const double fd = (p.objective(xp) - p.objective(xm)) / width;
    note(relative(grad[j], fd), "objective[" + std::to_string(j) + "]");
    if (p.num_equalities > 0) {
      p.equalities(xp, cp);
      p.equalities(xm, cm);
      for (Eigen::Index r = 0; r < p.num_equalities; ++r) {
        note(relative(je(r, j), (cp[r] - cm[r]) / width),
             "equality[" + std::to_string(r) + "][" + std::to_string(j) + "]");
      }
    }
    if (p.num_inequalities > 0) {
      p.inequalities(xp, gp);
      p.inequalities(xm, gm);
      for (Eigen::Index r = 0; r < p.num_inequalities; ++r) {
        note(relative(ji(r, j), (gp[r] - gm[r]) / width),
             "inequality[" + std::to_string(r) + "][" + std::to_string(j) +
                 "]");
      }
    }
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return out;
}

}  // namespace inlane
