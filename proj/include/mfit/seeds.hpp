// Copyright 2025 The mfit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace mfit {

// Stage identifiers used when splitting the master seed.
enum class Stage : std::uint64_t {
  Generate = 1,
  Noise = 2,
  Pca = 3,
  OracleBatch = 4,
  FindPoints = 5,
  Atlas = 6,
  Evaluate = 7,
};

// One splitmix64 step.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for item `index` of `stage`:
//   splitmix64(splitmix64(master ^ splitmix64(stage)) + index).
// Distinct (stage, index) pairs give statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stage stage, std::uint64_t index = 0) {
  const std::uint64_t s = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stage)));
  return splitmix64(s + index);
}

}  // namespace mfit
