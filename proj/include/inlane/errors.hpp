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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace inlane {

// Bad argument to a constructor or operation (non-positive length, duplicate
// waypoints, inconsistent dimensions, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query outside the domain of a curve or table.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A point handed to projection lies too far from the guide line.
class OutOfCorridor : public std::runtime_error {
 public:
  OutOfCorridor(const std::string& what, double distance)
      : std::runtime_error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No free gap exists at some time step of the path-time graph.
class InfeasibleCorridor : public std::runtime_error {
 public:
  InfeasibleCorridor(const std::string& what, std::size_t time_index)
      : std::runtime_error(what), time_index_(time_index) {}
  std::size_t time_index() const { return time_index_; }

 private:
  std::size_t time_index_;
};

}  // namespace inlane
