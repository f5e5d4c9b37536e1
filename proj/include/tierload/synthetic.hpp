// Copyright 2026 The tierload Authors. All Rights Reserved.
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

#include <cstdint>

#include "tierload/graph.hpp"

namespace tierload {

struct DegreeModel {
  enum class Kind { kUniform, kPowerLaw };
  Kind kind = Kind::kUniform;
  double exponent = 0.0;  // only read for kPowerLaw; must be > 1

  static DegreeModel uniform() { return {}; }
  static DegreeModel powerlaw(double exponent) { return {Kind::kPowerLaw, exponent}; }
};

// Seeded synthetic directed graph, returned as in-neighbor CSC.
//
// Produces min(num_nodes * avg_degree, num_nodes * (num_nodes - 1)) distinct
// edges without self loops. Uniform: every node is equally likely as edge
// source and destination. Power law with exponent a: node popularity follows
// rank^(-1/(a-1)), so the in-degree distribution has tail exponent a; the
// same law (under an independent node permutation) picks edge sources, so
// some nodes appear in many neighbor lists. The result is a pure function of
// the arguments. Throws ParameterError on num_nodes == 0 or exponent <= 1.
GraphCsc generate_synthetic(std::uint64_t num_nodes, std::uint64_t avg_degree,
                            DegreeModel model, std::uint64_t seed);

}  // namespace tierload
