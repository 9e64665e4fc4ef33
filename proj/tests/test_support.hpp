// Copyright 2026 The dressing-sim Authors
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

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "dressing/geometry.hpp"

namespace test_support {

using dressing::JointAngles;
using dressing::LimbLengths;

/// Random joint angles away from both the straight-arm and the shoulder
/// gimbal singularities.
inline JointAngles random_valid_angles(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JointAngles q;
  q.alpha = dressing::kPi * u(rng);
  q.beta = 1.3 * u(rng);
  q.phi = 0.1 + (dressing::kPi - 0.2) * (0.5 * (u(rng) + 1.0));
  q.gamma = dressing::kPi * u(rng);
  return q;
}

inline LimbLengths test_arm() { return LimbLengths{0.253, 0.264}; }

/// Directory for generated test fixtures; honors DRESSING_FIXTURE_DIR.
inline std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("DRESSING_FIXTURE_DIR")) {
    std::filesystem::create_directories(env);
    return env;
  }
  const auto dir =
      std::filesystem::temp_directory_path() / "dressing_fixtures";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test_support
