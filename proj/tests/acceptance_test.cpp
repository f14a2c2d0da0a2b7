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


// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>

#include "inlane/pipeline.hpp"
#include "inlane/scenario_io.hpp"
#include "json.hpp"
#include "qp_oracle.hpp"

namespace {

using namespace inlane;
namespace fs = std::filesystem;

constexpr double kDeviationBudget = 0.1 + 1e-6;
constexpr double kJointTol = 1e-12;
constexpr double kArcKappaLo = 0.08;
constexpr double kArcKappaHi = 0.12;
constexpr double kSmoothSeconds = 5.0;
constexpr double kAuditTol = 1e-6;
constexpr double kContinuityTol = 1e-8;
constexpr double kStopS = 0.1, kStopV = 0.01, kStopA = 0.01;
constexpr double kFollowGap = 5.0 - 1e-3;
constexpr double kFollowSpeedTol = 0.5;
constexpr double kCurveSlack = 1e-3;
constexpr double kBoundTouch = 1e-3;
constexpr double kGradientTol = 1e-5;
constexpr double kQpTol = 1e-5;
constexpr double kPipelineSeconds = 10.0;

const std::string kDir = INLANE_SCENARIO_DIR;

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %d %s: %s (%s)\n", id, pass ? "PASS" : "FAIL", title,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class F>
void guarded(int id, const char* title, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Central half of the analytic arc of the generated U-turn.
std::pair<double, double> arc_region(const Scenario& sc) {
  const double arc = sc.uturn->radius * sc.uturn->sweep_deg * std::numbers::pi / 180.0;
  const double lead = 0.5 * (sc.uturn->length - arc);
  return {lead + arc / 4, lead + 3 * arc / 4};
}

void smoothing_fidelity(const Scenario& sc) {
  const auto t0 = std::chrono::steady_clock::now();
  const RawGuideLine raw = sc.raw_guide_line();
  const SmoothingResult r = smooth_guideline(raw, sc.smoother);
  const double secs = seconds_since(t0);
  const GuideLine& line = r.line;

  double dev = 0.0;
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    dev = std::max(dev, distance(line.knot_positions()[i], raw.points[i]));
  }
  double jump = 0.0;
  const auto& pieces = line.pieces();
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double h = pieces[i].length();
    jump = std::max({jump,
                     std::abs(pieces[i].theta_unchecked(h) - pieces[i + 1].theta_unchecked(0)),
                     std::abs(pieces[i].kappa_unchecked(h) - pieces[i + 1].kappa_unchecked(0)),
                     std::abs(pieces[i].dkappa_unchecked(h) - pieces[i + 1].dkappa_unchecked(0))});
  }
  const auto [lo, hi] = arc_region(sc);
  double kmin = 1e9, kmax = 0.0;
  for (double s = lo; s <= hi; s += 0.05) {
    const double k = std::abs(kappa_at(line, s).kappa);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  const bool pass = raw.points.size() == 17 && dev <= kDeviationBudget &&
                    jump <= kJointTol && kmin >= kArcKappaLo &&
                    kmax <= kArcKappaHi && secs < kSmoothSeconds;
  std::ostringstream d;
  d << raw.points.size() << " knots, max deviation " << dev << " m, max joint jump "
    << jump << ", arc |kappa| in [" << kmin << ", " << kmax << "], " << secs << " s";
  report(1, "guide-line smoothing fidelity", pass, d.str());
}

double max_audit_residual(const PlanRun& run, std::string& worst) {
  double r = 0.0;
  for (const auto& f : run.audit.families) {
    if (f.max_residual >= r) {
      r = f.max_residual;
      worst = f.name;
    }
  }
  return r;
}

double distance_travelled(const PlanRun& run) {
  return run.trajectory.points.back().s - run.trajectory.points.front().s;
}

std::pair<double, double> accel_range(const PlanRun& run) {
  double lo = 1e9, hi = -1e9;
  for (const auto& p : run.trajectory.points) {
    lo = std::min(lo, p.a);
    hi = std::max(hi, p.a);
  }
  return {lo, hi};
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  const Scenario cruise = load_scenario(kDir + "/uturn_cruise.scenario");
  const Scenario stop = load_scenario(kDir + "/uturn_stop.scenario");
  const Scenario follow = load_scenario(kDir + "/follow.scenario");

  guarded(1, "guide-line smoothing fidelity", [&] { smoothing_fidelity(cruise); });

  std::optional<PlanRun> cruise_run, stop_run, follow_run;
  double cruise_seconds = 0.0;
  guarded(2, "constraint feasibility", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    cruise_run = run_plan(cruise);
    cruise_seconds = seconds_since(t0);
    stop_run = run_plan(stop);
    follow_run = run_plan(follow);
    std::ostringstream d;
    bool pass = true;
    for (const auto& [name, run] :
         {std::pair{"cruise", &*cruise_run}, std::pair{"stop", &*stop_run},
          std::pair{"follow", &*follow_run}}) {
      std::string worst;
      const double r = max_audit_residual(*run, worst);
      pass = pass && r <= kAuditTol && run->audit.families.size() == 8;
      d << name << " " << r << " (" << worst << ") ";
    }
    report(2, "constraint feasibility", pass, "max residual per fixture: " + d.str());
  });

  guarded(3, "continuity oracle", [&] {
    if (!cruise_run) throw std::runtime_error("cruise plan unavailable");
    const auto& pts = cruise_run->trajectory.points;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double j = jerk_between(pts[i].a, pts[i + 1].a, cruise.dt);
      const LongitudinalState next = propagate(pts[i], j, cruise.dt);
      worst = std::max({worst, std::abs(next.s - pts[i + 1].s),
                        std::abs(next.v - pts[i + 1].v),
                        std::abs(next.a - pts[i + 1].a)});
    }
    std::ostringstream d;
    d << pts.size() << " points, max propagation error " << worst;
    report(3, "continuity oracle", pts.size() == 181 && worst <= kContinuityTol,
           d.str());
  });

  guarded(4, "stop task", [&] {
    if (!stop_run) throw std::runtime_error("stop plan unavailable");
    const auto& pts = stop_run->trajectory.points;
    const auto& e = pts.back();
    bool monotone = true;
    for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].s >= pts[i - 1].s;
    const bool pass = std::abs(e.s - 130.0) <= kStopS && std::abs(e.v) <= kStopV &&
                      std::abs(e.a) <= kStopA && monotone;
    std::ostringstream d;
    d << "final (" << e.s << ", " << e.v << ", " << e.a << "), s non-decreasing "
      << (monotone ? "yes" : "no");
    report(4, "stop task", pass, d.str());
  });

  guarded(5, "follow task", [&] {
    if (!follow_run) throw std::runtime_error("follow plan unavailable");
    const auto& a = follow_run->audit;
    const double v_end = follow_run->trajectory.points.back().v;
    const bool pass = a.min_gap && *a.min_gap >= kFollowGap &&
                      std::abs(v_end - 3.0) <= kFollowSpeedTol &&
                      follow.task.horizon == 10.0;
    std::ostringstream d;
    d << "min gap " << (a.min_gap ? *a.min_gap : -1.0) << " m, final speed " << v_end
      << " m/s over " << follow.task.horizon << " s";
    report(5, "follow task", pass, d.str());
  });

  guarded(6, "curve slowdown and preset contrast", [&] {
    if (!cruise_run) throw std::runtime_error("cruise plan unavailable");
    const GuideLine& line = cruise_run->smooth.result.line;
    const double kmax = cruise_run->smooth.max_abs_kappa;
    const double ac = cruise.limits.ac_max;
    const auto [lo, hi] = arc_region(cruise);
    const auto& pts = cruise_run->trajectory.points;
    double v_arc_min = 1e9;
    std::size_t arc_last = 0;
    bool local_ok = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].s < lo || pts[i].s > hi) continue;
      v_arc_min = std::min(v_arc_min, pts[i].v);
      arc_last = i;
      const double k = std::abs(kappa_at(line, pts[i].s).kappa);
      local_ok = local_ok && pts[i].v <= std::sqrt(ac / k) * (1 + kCurveSlack);
    }
    const double bound = std::sqrt(ac / kmax) * (1 + kCurveSlack);
    bool recovers = arc_last > 0 && arc_last + 1 < pts.size();
    for (std::size_t i = arc_last + 1; recovers && i < pts.size(); ++i) {
      recovers = pts[i].v >= pts[i - 1].v - 1e-9 && pts[i].v <= cruise.task.v_ref + 1e-6;
    }
    const double v_end = pts.back().v;
    recovers = recovers && v_end > v_arc_min + 5.0;

    Scenario sporty = cruise;
    sporty.preset = "sporty";
    sporty.resolve_weights();
    const PlanRun sporty_run = run_plan(sporty);
    const double d_comf = distance_travelled(*cruise_run);
    const double d_sport = distance_travelled(sporty_run);
    const auto [c_lo, c_hi] = accel_range(*cruise_run);
    const auto [s_lo, s_hi] = accel_range(sporty_run);
    const DynamicLimits& lim = cruise.limits;
    const bool sporty_touches =
        s_hi >= lim.a_max - kBoundTouch || s_lo <= lim.a_min + kBoundTouch;
    const bool comfortable_interior =
        c_hi < lim.a_max - kBoundTouch && c_lo > lim.a_min + kBoundTouch;

    const bool pass = v_arc_min <= bound && local_ok && recovers &&
                      d_sport > d_comf && sporty_touches && comfortable_interior;
    std::ostringstream d;
    d << "arc min speed " << v_arc_min << " <= " << bound << " (kappa_max " << kmax
      << "), local ceiling " << (local_ok ? "held" : "violated") << ", speed after arc "
      << (recovers ? "rises" : "does not rise") << " to " << v_end
      << "; distance sporty " << d_sport << " m vs comfortable " << d_comf
      << " m; accel sporty [" << s_lo << ", " << s_hi << "], comfortable [" << c_lo
      << ", " << c_hi << "]";
    report(6, "curve slowdown and preset contrast", pass, d.str());
  });

  guarded(7, "derivative correctness", [&] {
    const RawGuideLine raw = cruise.raw_guide_line();
    const GradientCheck gs =
        check_gradient(build_smoother_nlp(raw, cruise.smoother), initial_guess(raw));
    std::ostringstream d;
    d << "smoother " << gs.max_relative_error << " at " << gs.location;
    bool pass = gs.max_relative_error < kGradientTol;
    for (const Scenario* sc : {&cruise, &stop, &follow}) {
      const GuideLine line = smooth_guideline(sc->raw_guide_line(), sc->smoother).line;
      const auto st = project_obstacles(*sc, line);
      const FreeRegionProfile corridor = build_corridor(*sc, line, st);
      const NlpProblem p = build_trajectory_nlp(line, corridor, sc->init, sc->task,
                                                sc->limits, sc->dt, sc->steps());
      const Vector x0 = warm_start(line, corridor, sc->init, sc->task, sc->limits,
                                   sc->dt, sc->steps());
      const GradientCheck gt = check_gradient(p, x0);
      pass = pass && gt.max_relative_error < kGradientTol;
      d << "; " << sc->name << " trajectory " << gt.max_relative_error;
    }
    report(7, "derivative correctness", pass, d.str());
  });

  guarded(8, "solver sanity", [&] {
    double worst = 0.0;
    int ok = 0;
    for (unsigned seed = 1; seed <= 20; ++seed) {
      const QpOracleResult r = solve_random_qp(seed, 10, 5);
      if (r.converged && r.oracle_found && r.max_abs_error <= kQpTol) ++ok;
      worst = std::max(worst, r.max_abs_error);
    }
    std::ostringstream d;
    d << ok << "/20 seeds match, worst error " << worst;
    report(8, "solver sanity", ok == 20, d.str());
  });

  guarded(9, "desk-scale runtime", [&] {
    const fs::path out = fs::temp_directory_path() /
                         ("inlane_accept_bench_" + std::to_string(::getpid()));
    fs::remove_all(out);
    const int code = run_command(std::string("'") + INLANE_CLI +
                                 "' bench --repetitions 3 --scenario " + kDir +
                                 "/uturn_cruise.scenario --out '" + out.string() +
                                 "' >/dev/null");
    double median = -1.0, smooth = -1.0, plan = -1.0;
    if (code == 0) {
      const auto j = nlohmann::json::parse(read_text_file((out / "bench.json").string()));
      median = j["seconds"]["total"]["median"].get<double>();
      smooth = j["seconds"]["smooth"]["median"].get<double>();
      plan = j["seconds"]["plan"]["median"].get<double>();
    }
    fs::remove_all(out);
    const bool pass = cruise_seconds > 0.0 && cruise_seconds < kPipelineSeconds &&
                      code == 0 && median < kPipelineSeconds;
    std::ostringstream d;
    d << "in-process pipeline " << cruise_seconds << " s; bench medians smooth "
      << smooth << " s, plan " << plan << " s, total " << median << " s";
    report(9, "desk-scale runtime", pass, d.str());
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
