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


// Command-line front end.
//
//   inlane smooth --scenario FILE --out DIR
//   inlane plan   --scenario FILE --out DIR [--preset NAME]
//   inlane bench  --scenario FILE --out DIR [--repetitions N]
//
// Shared options: --override key=value (repeatable), --seed N.
// Log level comes from INLANE_LOG (trace, debug, info, warn, error, off).
//
// Exit codes: 0 success, 1 input error, 2 solver failure, 3 infeasible
// corridor.

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "inlane/pipeline.hpp"

namespace {

using inlane::Scenario;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kInputError = 1, kSolverFailure = 2, kInfeasible = 3 };

constexpr double kAuditTolerance = 1e-6;

struct CommonOptions {
  std::string scenario;
  std::string out;
  std::string preset;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

using Artifacts = std::vector<std::pair<std::string, std::string>>;

// Everything is rendered in memory first. If any write fails, the files and
// directories created by this call are removed again.
void commit(const std::string& out_dir, const Artifacts& files) {
  std::error_code ec;
  std::vector<fs::path> created;  // innermost first
  for (fs::path p = fs::absolute(out_dir, ec); !p.empty() && !fs::exists(p, ec);
       p = p.parent_path()) {
    created.push_back(p);
    if (p == p.parent_path()) break;
  }
  fs::create_directories(out_dir, ec);
  if (ec) {
    for (const auto& p : created) fs::remove(p, ec);
    throw inlane::IoError("cannot create output directory '" + out_dir +
                          "': " + ec.message());
  }
  std::vector<fs::path> written;
  try {
    for (const auto& [name, text] : files) {
      const fs::path p = fs::path(out_dir) / name;
      inlane::write_text_file(p.string(), text);
      written.push_back(p);
    }
  } catch (...) {
    for (const auto& p : written) fs::remove(p, ec);
    for (const auto& p : created) fs::remove(p, ec);
    throw;
  }
}

Scenario load(const CommonOptions& o) {
  Scenario sc = inlane::load_scenario(o.scenario, o.overrides);
  if (o.seed) sc.seed = *o.seed;
  if (!o.preset.empty()) {
    sc.preset = o.preset;
    sc.resolve_weights();
  }
  sc.validate();
  return sc;
}

json weights_json(const inlane::CostWeights& w) {
  return {{"accel", w.accel},         {"jerk", w.jerk},
          {"centripetal", w.centripetal}, {"reference", w.reference},
          {"s_task", w.s_task},       {"v_task", w.v_task},
          {"a_task", w.a_task}};
}

json manifest(const std::string& command, const CommonOptions& o,
              const Scenario& sc) {
  return {{"subcommand", command},
          {"scenario", o.scenario},
          {"out", o.out},
          {"preset", sc.preset},
          {"overrides", o.overrides},
          {"seed", sc.seed},
          {"weights", weights_json(sc.task.weights)},
          {"scenario_format_version", inlane::kScenarioFormatVersion}};
}

json report_json(const inlane::SolveReport& r) {
  return {{"status", inlane::to_string(r.status)},
          {"iterations", r.iterations},
          {"outer_iterations", r.outer_iterations},
          {"objective", r.objective},
          {"max_violation", r.max_violation},
          {"kkt_residual", r.kkt_residual},
          {"message", r.message}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void add_smooth_artifacts(const inlane::SmoothRun& run, const Scenario& sc,
                          Artifacts& files) {
  const auto& line = run.result.line;
  files.emplace_back("guide_line.csv",
                     inlane::format_csv(inlane::guide_line_table(line)));
  inlane::CsvTable knots{{"index", "x_in", "y_in", "x_knot", "y_knot", "deviation"},
                         {}};
  for (std::size_t i = 0; i < run.raw.points.size(); ++i) {
    const auto& in = run.raw.points[i];
    const auto& k = line.knot_positions()[i];
    knots.rows.push_back({static_cast<double>(i), in.x, in.y, k.x, k.y,
                          run.knot_deviations[i]});
  }
  files.emplace_back("knot_deviations.csv", inlane::format_csv(knots));
  json j = report_json(run.result.report);
  j["initial_objective"] = run.result.initial_objective;
  j["seconds"] = run.seconds;
  j["knots"] = run.raw.points.size();
  j["max_knot_deviation"] = run.result.max_deviation;
  j["deviation_budget"] = sc.smoother.max_deviation;
  j["max_abs_kappa"] = run.max_abs_kappa;
  j["total_length"] = line.total_length();
  files.emplace_back("smooth_report.json", dump(j));
}

int cmd_smooth(const CommonOptions& o) {
  const Scenario sc = load(o);
  spdlog::info("smoothing {} guide points", sc.raw_guide_line().points.size());
  const inlane::SmoothRun run = inlane::run_smooth(sc);
  Artifacts files;
  add_smooth_artifacts(run, sc, files);
  files.emplace_back("manifest.json", dump(manifest("smooth", o, sc)));
  commit(o.out, files);
  std::cout << "smooth: " << inlane::to_string(run.result.report.status)
            << ", max knot deviation " << run.result.max_deviation
            << " m, max |kappa| " << run.max_abs_kappa << " 1/m, length "
            << run.result.line.total_length() << " m, " << run.seconds
            << " s\n";
  return kOk;
}

json audit_json(const inlane::ConstraintAudit& a, double dt) {
  json families = json::object();
  for (const auto& f : a.families) {
    families[f.name] = {{"max_residual", f.max_residual},
                        {"worst_index", f.worst_index},
                        {"worst_t", dt * static_cast<double>(f.worst_index)}};
  }
  json j = {{"tolerance", kAuditTolerance},
            {"max_residual", a.max_residual()},
            {"pass", a.max_residual() <= kAuditTolerance},
            {"families", families}};
  if (a.min_gap) {
    j["min_gap"] = *a.min_gap;
    j["min_gap_t"] = dt * static_cast<double>(a.min_gap_index);
  } else {
    j["min_gap"] = nullptr;
  }
  return j;
}

int cmd_plan(const CommonOptions& o) {
  const Scenario sc = load(o);
  spdlog::info("planning {} samples at dt = {} s, preset {}", sc.steps(), sc.dt,
               sc.preset);
  const inlane::PlanRun run = inlane::run_plan(sc);
  const auto& line = run.smooth.result.line;
  const auto& traj = run.trajectory;

  Artifacts files;
  add_smooth_artifacts(run.smooth, sc, files);
  files.emplace_back("trajectory.csv",
                     inlane::format_csv(inlane::trajectory_table(traj)));
  inlane::CsvTable st{{"t", "s", "s_min", "s_max"}, {}};
  inlane::CsvTable vt{{"t", "v", "v_min", "v_max"}, {}};
  inlane::CsvTable at{{"t", "a", "a_min", "a_max"}, {}};
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const double t = traj.dt * static_cast<double>(i);
    const auto& p = traj.points[i];
    st.rows.push_back({t, p.s, run.corridor.s_min[i], run.corridor.s_max[i]});
    vt.rows.push_back(
        {t, p.v, 0.0, inlane::curvature_speed_limit(line, sc.limits, p.s)});
    at.rows.push_back({t, p.a, sc.limits.a_min, sc.limits.a_max});
  }
  files.emplace_back("plot_st.csv", inlane::format_csv(st));
  files.emplace_back("plot_vt.csv", inlane::format_csv(vt));
  files.emplace_back("plot_at.csv", inlane::format_csv(at));
  files.emplace_back("audit.json", dump(audit_json(run.audit, traj.dt)));

  const auto& last = traj.points.back();
  json plan = report_json(traj.report);
  plan["initial_objective"] = traj.initial_objective;
  plan["samples"] = traj.points.size();
  plan["dt"] = traj.dt;
  plan["task"] = inlane::to_string(sc.task.kind);
  plan["final_state"] = {{"s", last.s}, {"v", last.v}, {"a", last.a}};
  plan["distance"] = last.s - traj.points.front().s;
  plan["seconds"] = {{"smooth", run.smooth.seconds},
                     {"corridor", run.corridor_seconds},
                     {"plan", run.plan_seconds}};
  files.emplace_back("plan_report.json", dump(plan));
  files.emplace_back("manifest.json", dump(manifest("plan", o, sc)));
  files.emplace_back("scenario.resolved", inlane::format_scenario(sc));
  commit(o.out, files);

  std::cout << "plan: " << inlane::to_string(traj.report.status) << ", "
            << traj.points.size() << " samples, final (s, v, a) = (" << last.s
            << ", " << last.v << ", " << last.a << "), audit max residual "
            << run.audit.max_residual();
  if (run.audit.min_gap) std::cout << ", min gap " << *run.audit.min_gap << " m";
  std::cout << ", " << run.smooth.seconds + run.corridor_seconds + run.plan_seconds
            << " s\n";
  if (run.audit.max_residual() > kAuditTolerance) {
    spdlog::warn("audit residual {} exceeds {}", run.audit.max_residual(),
                 kAuditTolerance);
  }
  return kOk;
}

json summary(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const double median = n % 2 ? samples[n / 2]
                              : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  return {{"median", median},
          {"min", samples.front()},
          {"max", samples.back()},
          {"samples", samples}};
}

json machine_info() {
  json m;
  utsname u{};
  if (uname(&u) == 0) {
    m["system"] = u.sysname;
    m["release"] = u.release;
    m["arch"] = u.machine;
  }
  std::ifstream cpu("/proc/cpuinfo");
  for (std::string line; std::getline(cpu, line);) {
    if (line.rfind("model name", 0) == 0) {
      m["cpu"] = line.substr(line.find(':') + 2);
      break;
    }
  }
  m["hardware_threads"] = std::thread::hardware_concurrency();
  m["compiler"] = __VERSION__;
  return m;
}

int cmd_bench(const CommonOptions& o, int repetitions) {
  if (repetitions < 1) throw inlane::InvalidArgument("--repetitions must be >= 1");
  const Scenario sc = load(o);
  std::vector<double> smooth, corridor, plan, total;
  for (int r = 0; r < repetitions; ++r) {
    const inlane::PlanRun run = inlane::run_plan(sc);
    smooth.push_back(run.smooth.seconds);
    corridor.push_back(run.corridor_seconds);
    plan.push_back(run.plan_seconds);
    total.push_back(run.smooth.seconds + run.corridor_seconds + run.plan_seconds);
    spdlog::info("repetition {}: smooth {:.3f} s, plan {:.3f} s", r + 1,
                 run.smooth.seconds, run.plan_seconds);
  }
  json j = {{"repetitions", repetitions},
            {"samples_per_trajectory", sc.steps()},
            {"seconds",
             {{"smooth", summary(smooth)},
              {"corridor", summary(corridor)},
              {"plan", summary(plan)},
              {"total", summary(total)}}},
            {"machine", machine_info()}};
  Artifacts files{{"bench.json", dump(j)},
                  {"manifest.json", dump(manifest("bench", o, sc))}};
  commit(o.out, files);
  auto line = [&](const char* name, const json& s) {
    std::cout << "  " << name << ": median " << s["median"].get<double>()
              << " s, min " << s["min"].get<double>() << " s, max "
              << s["max"].get<double>() << " s\n";
  };
  std::cout << "bench: " << repetitions << " repetitions\n";
  line("smooth", j["seconds"]["smooth"]);
  line("corridor", j["seconds"]["corridor"]);
  line("plan", j["seconds"]["plan"]);
  line("total", j["seconds"]["total"]);
  return kOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("inlane");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("INLANE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->add_option("--preset", o.preset, "weight preset (comfortable, sporty)");
  cmd->add_option("--override", o.overrides, "extra scenario line key=value")
      ->take_all();
  cmd->add_option("--seed", o.seed, "seed for the guide-line perturbation");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Guide-line smoothing and speed planning"};
  app.require_subcommand(1);
  CommonOptions opts;
  int repetitions = 5;
  auto* smooth = app.add_subcommand("smooth", "smooth the guide line only");
  add_common(smooth, opts);
  auto* plan = app.add_subcommand("plan", "smooth, build the corridor and plan");
  add_common(plan, opts);
  auto* bench = app.add_subcommand("bench", "time repeated plan runs");
  add_common(bench, opts);
  bench->add_option("--repetitions", repetitions, "number of runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*smooth) return cmd_smooth(opts);
    if (*plan) return cmd_plan(opts);
    return cmd_bench(opts, repetitions);
  } catch (const inlane::InfeasibleCorridor& e) {
    spdlog::error("infeasible corridor at time step {}: {}", e.time_index(),
                  e.what());
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const inlane::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const inlane::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const inlane::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const inlane::OutOfCorridor& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
