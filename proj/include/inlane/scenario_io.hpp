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

// Scenario files, the U-turn generator and CSV output.
//
// A scenario is a line-oriented text file of `key = value` pairs with dotted
// keys, `#` comments and blank lines. The first key must be
// `format_version = 1`; unknown keys are rejected. See docs/scenario_format.md
// for the full key list.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "inlane/errors.hpp"
#include "inlane/geometry.hpp"
#include "inlane/guide_line.hpp"
#include "inlane/smoother.hpp"
#include "inlane/speed_optimizer.hpp"
#include "inlane/st_graph.hpp"

namespace inlane {

inline constexpr int kScenarioFormatVersion = 1;

// Uniform double in [0, 1) from the top 53 bits; std::uniform_real_distribution
// is not pinned down across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Straight lead-in, circular arc of the given radius and sweep, straight
// lead-out, with the straights of equal length so the whole path measures
// total_length. Points are equally spaced in arc length, then each is moved
// to a uniformly random position inside a disc of noise_radius.
inline std::vector<Point2> generate_uturn(double radius, double sweep_deg,
                                          int n_points, double noise_radius,
                                          std::uint64_t seed,
                                          double total_length = 150.0) {
  if (!(radius > 0.0)) throw InvalidArgument("uturn radius must be positive");
  if (n_points < 3) throw InvalidArgument("uturn needs at least 3 points");
  if (!(noise_radius >= 0.0)) throw InvalidArgument("uturn noise must be >= 0");
  const double sweep = sweep_deg * M_PI / 180.0;
  const double arc = radius * sweep;
  if (!(sweep > 0.0) || !(arc < total_length)) {
    throw InvalidArgument("uturn arc must be positive and shorter than the path");
  }
  const double lead = 0.5 * (total_length - arc);
  const Point2 arc_end{lead + radius * std::sin(sweep),
                       radius * (1.0 - std::cos(sweep))};
  std::mt19937_64 rng(seed);
  std::vector<Point2> pts;
  for (int k = 0; k < n_points; ++k) {
    const double u = total_length * k / (n_points - 1);
    Point2 p;
    if (u <= lead) {
      p = {u, 0.0};
    } else if (u <= lead + arc) {
      const double phi = (u - lead) / radius;
      p = {lead + radius * std::sin(phi), radius * (1.0 - std::cos(phi))};
    } else {
      const double d = u - lead - arc;
      p = {arc_end.x + d * std::cos(sweep), arc_end.y + d * std::sin(sweep)};
    }
    const double r = noise_radius * std::sqrt(unit_uniform(rng));
    const double a = 2.0 * M_PI * unit_uniform(rng);
    pts.push_back({p.x + r * std::cos(a), p.y + r * std::sin(a)});
  }
  return pts;
}

struct UTurnSpec {
  double radius = 10.0;
  double sweep_deg = 108.0;
  int points = 17;
  double length = 150.0;
  double noise = 0.05;
  bool operator==(const UTurnSpec&) const = default;
};

// Straight-line constant-speed motion from (x, y) along heading.
struct ConstantVelocity {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  bool operator==(const ConstantVelocity&) const = default;
};

struct ObstacleSpec {
  std::string id;
  double length = 5.0;
  double width = 2.0;
  std::vector<TimedPose> poses;
  std::optional<ConstantVelocity> motion;

  bool operator==(const ObstacleSpec&) const = default;

  // Explicit poses win; a motion is sampled every dt over [0, horizon].
  ObstaclePrediction prediction(double horizon, double dt) const {
    ObstaclePrediction p{id, length, width, poses};
    if (p.trajectory.empty() && motion) {
      const std::size_t n = step_count(dt, horizon);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double d = motion->speed * t;
        p.trajectory.push_back({t, motion->x + d * std::cos(motion->heading),
                                motion->y + d * std::sin(motion->heading),
                                motion->heading});
      }
    }
    return p;
  }
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 42;
  std::vector<Point2> points;
  std::optional<UTurnSpec> uturn;
  SmootherConfig smoother;
  LongitudinalState init{0.0, 15.0, 0.0};
  TaskSpec task;
  std::string preset = "comfortable";
  // Weight keys set explicitly; applied on top of the preset.
  std::map<std::string, double> weight_overrides;
  DynamicLimits limits;
  double dt = 0.1;
  double margin = 5.0;
  double lateral_threshold = 2.75;
  double ego_length = 5.0;
  std::vector<ObstacleSpec> obstacles;

  bool operator==(const Scenario&) const = default;

  std::size_t steps() const { return step_count(dt, task.horizon); }

  RawGuideLine raw_guide_line() const {
    if (uturn) {
      return {generate_uturn(uturn->radius, uturn->sweep_deg, uturn->points,
                             uturn->noise, seed, uturn->length)};
    }
    return {points};
  }

  STGraphConfig st_config() const { return {lateral_threshold, ego_length, margin}; }

  std::vector<ObstaclePrediction> predictions() const {
    std::vector<ObstaclePrediction> out;
    for (const auto& o : obstacles) out.push_back(o.prediction(task.horizon, dt));
    return out;
  }

  // Recomputes task.weights from the preset and explicit overrides.
  void resolve_weights();

  void validate() const;
};

namespace scenario_detail {

[[noreturn]] inline void field_error(const std::string& field,
                                     const std::string& what) {
  throw InvalidArgument(field + ": " + what);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& field, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    field_error(field, "expected a finite number, got '" + text + "'");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& field,
                                      const std::string& text,
                                      std::size_t count) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(field, trim(item)));
  if (out.size() != count) {
    field_error(field, "expected " + std::to_string(count) +
                           " comma-separated numbers, got '" + text + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& field, const std::string& text) {
  Int v{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    field_error(field, "expected an integer, got '" + text + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  field_error(field, "expected true or false, got '" + text + "'");
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(Scenario&, const std::string& key,
                                  const std::string& value)>;

inline Setter number(double Scenario::*member) {
  return [member](Scenario& s, const std::string& k, const std::string& v) {
    s.*member = parse_double(k, v);
  };
}

template <typename F>
Setter number_at(F&& access) {
  return [access](Scenario& s, const std::string& k, const std::string& v) {
    access(s) = parse_double(k, v);
  };
}

inline const std::map<std::string, double CostWeights::*>& weight_fields() {
  static const std::map<std::string, double CostWeights::*> fields{
      {"accel", &CostWeights::accel},
      {"jerk", &CostWeights::jerk},
      {"centripetal", &CostWeights::centripetal},
      {"reference", &CostWeights::reference},
      {"s_task", &CostWeights::s_task},
      {"v_task", &CostWeights::v_task},
      {"a_task", &CostWeights::a_task}};
  return fields;
}

inline UTurnSpec& uturn(Scenario& s) {
  if (!s.uturn) s.uturn = UTurnSpec{};
  return *s.uturn;
}

inline const std::map<std::string, Setter>& scalar_keys() {
  static const std::map<std::string, Setter> keys = [] {
    std::map<std::string, Setter> m;
    m["name"] = [](Scenario& s, const std::string&, const std::string& v) { s.name = v; };
    m["seed"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.seed = parse_int<std::uint64_t>(k, v);
    };
    m["guide.uturn.radius"] = number_at([](Scenario& s) -> double& { return uturn(s).radius; });
    m["guide.uturn.sweep_deg"] = number_at([](Scenario& s) -> double& { return uturn(s).sweep_deg; });
    m["guide.uturn.length"] = number_at([](Scenario& s) -> double& { return uturn(s).length; });
    m["guide.uturn.noise"] = number_at([](Scenario& s) -> double& { return uturn(s).noise; });
    m["guide.uturn.points"] = [](Scenario& s, const std::string& k, const std::string& v) {
      uturn(s).points = parse_int<int>(k, v);
    };
    m["smoother.max_deviation"] = number_at([](Scenario& s) -> double& { return s.smoother.max_deviation; });
    m["smoother.internal_points"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.smoother.internal_points = parse_int<int>(k, v);
    };
    m["smoother.w_length"] = number_at([](Scenario& s) -> double& { return s.smoother.w_length; });
    m["smoother.w_kappa"] = number_at([](Scenario& s) -> double& { return s.smoother.w_kappa; });
    m["smoother.w_dkappa"] = number_at([](Scenario& s) -> double& { return s.smoother.w_dkappa; });
    m["smoother.terminal_dkappa_bound"] = number_at([](Scenario& s) -> double& { return s.smoother.terminal_dkappa_bound; });
    m["smoother.min_length_ratio"] = number_at([](Scenario& s) -> double& { return s.smoother.min_length_ratio; });
    m["smoother.max_length_ratio"] = number_at([](Scenario& s) -> double& { return s.smoother.max_length_ratio; });
    m["init.s"] = number_at([](Scenario& s) -> double& { return s.init.s; });
    m["init.v"] = number_at([](Scenario& s) -> double& { return s.init.v; });
    m["init.a"] = number_at([](Scenario& s) -> double& { return s.init.a; });
    m["task.kind"] = [](Scenario& s, const std::string& k, const std::string& v) {
      try {
        s.task.kind = parse_task_kind(v);
      } catch (const InvalidArgument& e) {
        field_error(k, e.what());
      }
    };
    m["task.v_ref"] = number_at([](Scenario& s) -> double& { return s.task.v_ref; });
    m["task.horizon"] = number_at([](Scenario& s) -> double& { return s.task.horizon; });
    for (const char* t : {"s_task", "v_task", "a_task"}) {
      const std::string name = t;
      m["task." + name] = [name](Scenario& s, const std::string& k, const std::string& v) {
        const double x = parse_double(k, v);
        if (name == "s_task") s.task.s_task = x;
        if (name == "v_task") s.task.v_task = x;
        if (name == "a_task") s.task.a_task = x;
      };
    }
    m["task.preset"] = [](Scenario& s, const std::string& k, const std::string& v) {
      try {
        weight_preset(v);
      } catch (const InvalidArgument& e) {
        field_error(k, e.what());
      }
      s.preset = v;
    };
    for (const auto& [field, member] : weight_fields()) {
      const std::string f = field;
      m["task.weights." + f] = [f](Scenario& s, const std::string& k, const std::string& v) {
        s.weight_overrides[f] = parse_double(k, v);
      };
    }
    m["task.hard_terminal"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.task.hard_terminal = parse_bool(k, v);
    };
    m["task.literal_centripetal"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.task.literal_centripetal = parse_bool(k, v);
    };
    m["limits.v_max"] = number_at([](Scenario& s) -> double& { return s.limits.v_max; });
    m["limits.a_min"] = number_at([](Scenario& s) -> double& { return s.limits.a_min; });
    m["limits.a_max"] = number_at([](Scenario& s) -> double& { return s.limits.a_max; });
    m["limits.jerk_min"] = number_at([](Scenario& s) -> double& { return s.limits.jerk_min; });
    m["limits.jerk_max"] = number_at([](Scenario& s) -> double& { return s.limits.jerk_max; });
    m["limits.ac_max"] = number_at([](Scenario& s) -> double& { return s.limits.ac_max; });
    m["dt"] = number(&Scenario::dt);
    m["corridor.margin"] = number(&Scenario::margin);
    m["corridor.lateral_threshold"] = number(&Scenario::lateral_threshold);
    m["ego.length"] = number(&Scenario::ego_length);
    return m;
  }();
  return keys;
}

inline ObstacleSpec& obstacle(Scenario& s, const std::string& id) {
  for (auto& o : s.obstacles) {
    if (o.id == id) return o;
  }
  s.obstacles.push_back(ObstacleSpec{id, 5.0, 2.0, {}, std::nullopt});
  return s.obstacles.back();
}

// Applies one assignment. Scalar keys may appear once per file; `replace`
// lets overrides reassign them. Repeated keys (guide.point, obstacle poses)
// append.
inline void apply(Scenario& s, const std::string& key, const std::string& value,
                  std::set<std::string>& seen, bool replace) {
  if (key == "format_version") {
    field_error(key, "may only appear on the first line");
  }
  if (key == "guide.point") {
    const auto v = parse_list(key, value, 2);
    s.points.push_back({v[0], v[1]});
    return;
  }
  if (key.rfind("obstacle.", 0) == 0) {
    const auto dot = key.rfind('.');
    const std::string id = key.substr(9, dot - 9);
    const std::string field = key.substr(dot + 1);
    if (id.empty() || dot <= 9 ||
        id.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                             "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
            std::string::npos) {
      field_error(key, "obstacle keys look like obstacle.<id>.<field>");
    }
    ObstacleSpec& o = obstacle(s, id);
    if (field == "pose") {
      const auto v = parse_list(key, value, 4);
      o.poses.push_back({v[0], v[1], v[2], v[3]});
      return;
    }
    if (!replace && !seen.insert(key).second) field_error(key, "duplicate key");
    if (field == "length") {
      o.length = parse_double(key, value);
    } else if (field == "width") {
      o.width = parse_double(key, value);
    } else if (field == "motion") {
      const auto v = parse_list(key, value, 4);
      o.motion = ConstantVelocity{v[0], v[1], v[2], v[3]};
    } else {
      field_error(key, "unknown key");
    }
    return;
  }
  const auto& keys = scalar_keys();
  const auto it = keys.find(key);
  if (it == keys.end()) field_error(key, "unknown key");
  if (!replace && !seen.insert(key).second) field_error(key, "duplicate key");
  it->second(s, key, value);
}

inline std::pair<std::string, std::string> split_assignment(
    const std::string& line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw InvalidArgument(where + ": expected 'key = value', got '" + line + "'");
  }
  std::string key = trim(std::string_view(line).substr(0, eq));
  std::string value = trim(std::string_view(line).substr(eq + 1));
  if (key.empty()) throw InvalidArgument(where + ": empty key");
  return {key, value};
}

}  // namespace scenario_detail

inline void Scenario::resolve_weights() {
  task.weights = weight_preset(preset);
  for (const auto& [field, value] : weight_overrides) {
    task.weights.*(scenario_detail::weight_fields().at(field)) = value;
  }
}

inline void Scenario::validate() const {
  using scenario_detail::field_error;
  if (uturn && !points.empty()) {
    field_error("guide", "give either guide.point lines or guide.uturn.* keys");
  }
  if (!uturn && points.size() < 2) {
    field_error("guide", "need at least 2 guide.point lines or a guide.uturn");
  }
  if (uturn) {
    if (!(uturn->radius > 0.0)) field_error("guide.uturn.radius", "must be positive");
    if (uturn->points < 3) field_error("guide.uturn.points", "must be >= 3");
    if (!(uturn->noise >= 0.0)) field_error("guide.uturn.noise", "must be >= 0");
    if (!(uturn->length > 0.0)) field_error("guide.uturn.length", "must be positive");
  }
  if (!(dt > 0.0)) field_error("dt", "must be positive");
  if (!(margin >= 0.0)) field_error("corridor.margin", "must be >= 0");
  if (!(lateral_threshold > 0.0)) {
    field_error("corridor.lateral_threshold", "must be positive");
  }
  if (!(ego_length > 0.0)) field_error("ego.length", "must be positive");
  smoother.validate();
  task.validate();
  limits.validate();
  for (const auto& o : obstacles) {
    const std::string base = "obstacle." + o.id;
    if (!(o.length > 0.0)) field_error(base + ".length", "must be positive");
    if (!(o.width > 0.0)) field_error(base + ".width", "must be positive");
    if (o.poses.empty() && !o.motion) {
      field_error(base, "needs pose lines or a motion");
    }
    if (!o.poses.empty() && o.motion) {
      field_error(base, "give either pose lines or a motion, not both");
    }
    for (std::size_t i = 1; i < o.poses.size(); ++i) {
      if (!(o.poses[i].t > o.poses[i - 1].t)) {
        field_error(base + ".pose", "times must be strictly increasing");
      }
    }
  }
}

// `overrides` are extra `key=value` assignments applied after the file;
// they may reassign scalar keys.
inline Scenario parse_scenario(const std::string& text,
                               const std::string& origin = "<scenario>",
                               const std::vector<std::string>& overrides = {}) {
  using namespace scenario_detail;
  Scenario s;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool versioned = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto [key, value] = split_assignment(line, where);
    if (!versioned) {
      if (key != "format_version") {
        throw InvalidArgument(where + ": format_version: must be the first key");
      }
      const int version = [&] {
        try {
          return parse_int<int>(key, value);
        } catch (const InvalidArgument& e) {
          throw InvalidArgument(where + ": " + e.what());
        }
      }();
      if (version != kScenarioFormatVersion) {
        throw InvalidArgument(where + ": format_version: unsupported version " +
                              std::to_string(version) + " (expected " +
                              std::to_string(kScenarioFormatVersion) + ")");
      }
      versioned = true;
      continue;
    }
    try {
      apply(s, key, value, seen, false);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where + ": " + e.what());
    }
  }
  if (!versioned) {
    throw InvalidArgument(origin + ": format_version: missing");
  }
  for (const auto& o : overrides) {
    const auto [key, value] = split_assignment(o, "override '" + o + "'");
    try {
      apply(s, key, value, seen, true);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("override: " + std::string(e.what()));
    }
  }
  try {
    s.resolve_weights();
    s.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(origin + ": " + e.what());
  }
  return s;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline Scenario load_scenario(const std::string& path,
                              const std::vector<std::string>& overrides = {}) {
  return parse_scenario(read_text_file(path), path, overrides);
}

// Canonical text form; parse_scenario(format_scenario(s)) == s.
inline std::string format_scenario(const Scenario& s) {
  using scenario_detail::format_double;
  std::ostringstream o;
  auto kv = [&o](const std::string& k, const std::string& v) {
    o << k << " = " << v << "\n";
  };
  auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };
  auto boolean = [&](const std::string& k, bool v) { kv(k, v ? "true" : "false"); };
  kv("format_version", std::to_string(kScenarioFormatVersion));
  if (!s.name.empty()) kv("name", s.name);
  kv("seed", std::to_string(s.seed));
  o << "\n";
  for (const auto& p : s.points) {
    kv("guide.point", format_double(p.x) + ", " + format_double(p.y));
  }
  if (s.uturn) {
    num("guide.uturn.radius", s.uturn->radius);
    num("guide.uturn.sweep_deg", s.uturn->sweep_deg);
    kv("guide.uturn.points", std::to_string(s.uturn->points));
    num("guide.uturn.length", s.uturn->length);
    num("guide.uturn.noise", s.uturn->noise);
  }
  o << "\n";
  const SmootherConfig& c = s.smoother;
  num("smoother.max_deviation", c.max_deviation);
  kv("smoother.internal_points", std::to_string(c.internal_points));
  num("smoother.w_length", c.w_length);
  num("smoother.w_kappa", c.w_kappa);
  num("smoother.w_dkappa", c.w_dkappa);
  num("smoother.terminal_dkappa_bound", c.terminal_dkappa_bound);
  num("smoother.min_length_ratio", c.min_length_ratio);
  num("smoother.max_length_ratio", c.max_length_ratio);
  o << "\n";
  num("init.s", s.init.s);
  num("init.v", s.init.v);
  num("init.a", s.init.a);
  o << "\n";
  kv("task.kind", to_string(s.task.kind));
  num("task.v_ref", s.task.v_ref);
  if (s.task.s_task) num("task.s_task", *s.task.s_task);
  if (s.task.v_task) num("task.v_task", *s.task.v_task);
  if (s.task.a_task) num("task.a_task", *s.task.a_task);
  num("task.horizon", s.task.horizon);
  kv("task.preset", s.preset);
  for (const auto& [field, value] : s.weight_overrides) {
    num("task.weights." + field, value);
  }
  boolean("task.hard_terminal", s.task.hard_terminal);
  boolean("task.literal_centripetal", s.task.literal_centripetal);
  o << "\n";
  num("limits.v_max", s.limits.v_max);
  num("limits.a_min", s.limits.a_min);
  num("limits.a_max", s.limits.a_max);
  num("limits.jerk_min", s.limits.jerk_min);
  num("limits.jerk_max", s.limits.jerk_max);
  num("limits.ac_max", s.limits.ac_max);
  o << "\n";
  num("dt", s.dt);
  num("corridor.margin", s.margin);
  num("corridor.lateral_threshold", s.lateral_threshold);
  num("ego.length", s.ego_length);
  for (const auto& ob : s.obstacles) {
    o << "\n";
    const std::string base = "obstacle." + ob.id;
    num(base + ".length", ob.length);
    num(base + ".width", ob.width);
    if (ob.motion) {
      kv(base + ".motion",
         format_double(ob.motion->x) + ", " + format_double(ob.motion->y) + ", " +
             format_double(ob.motion->heading) + ", " +
             format_double(ob.motion->speed));
    }
    for (const auto& p : ob.poses) {
      kv(base + ".pose", format_double(p.t) + ", " + format_double(p.x) + ", " +
                             format_double(p.y) + ", " + format_double(p.heading));
    }
  }
  return o.str();
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  write_text_file(path, format_scenario(s));
}

// ---------------------------------------------------------------------------
// CSV output

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  char buf[40];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      // Normalise -0 so that output does not depend on the sign of zero.
      std::snprintf(buf, sizeof buf, "%.9g", row[i] == 0.0 ? 0.0 : row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (t.header.empty()) {
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      row.push_back(scenario_detail::parse_double(
          origin + ":" + std::to_string(line_no), cell));
    }
    if (row.size() != t.header.size()) {
      throw InvalidArgument(origin + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(t.header.size()) +
                            " columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// One row per sample: t,s,v,a,jerk,x,y,theta,kappa,a_c. The jerk column holds
// the jerk acting over the following interval (0 on the last row).
inline CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t{{"t", "s", "v", "a", "jerk", "x", "y", "theta", "kappa", "a_c"}, {}};
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const auto& p = traj.points[i];
    const auto& c = traj.cartesian[i];
    const double jerk = i < traj.jerks.size() ? traj.jerks[i] : 0.0;
    t.rows.push_back({traj.dt * static_cast<double>(i), p.s, p.v, p.a, jerk, c.x,
                      c.y, c.theta, c.kappa, c.centripetal});
  }
  return t;
}

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  write_text_file(path, format_csv(trajectory_table(traj)));
}

inline CsvTable guide_line_table(const GuideLine& line, double spacing = 0.5) {
  if (!(spacing > 0.0)) throw InvalidArgument("sample spacing must be positive");
  CsvTable t{{"s", "x", "y", "theta", "kappa", "dkappa"}, {}};
  const double total = line.total_length();
  const auto n = static_cast<std::size_t>(std::floor(total / spacing));
  auto row = [&](double s) {
    const Pose p = point_at(line, s);
    t.rows.push_back({s, p.x, p.y, p.theta, p.kappa, kappa_at(line, s).dkappa});
  };
  for (std::size_t i = 0; i <= n; ++i) row(static_cast<double>(i) * spacing);
  if (total - static_cast<double>(n) * spacing > 1e-9) row(total);
  return t;
}

inline void write_guide_line_csv(const GuideLine& line, const std::string& path,
                                 double spacing = 0.5) {
  write_text_file(path, format_csv(guide_line_table(line, spacing)));
}

}  // namespace inlane
