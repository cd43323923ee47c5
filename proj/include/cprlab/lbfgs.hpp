// Copyright 2026 The cprlab Authors
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

#include <functional>
#include <vector>

#include "cprlab/quantum_core.hpp"

namespace cprlab {

// Limited-memory BFGS with a strong-Wolfe line search (Nocedal & Wright,
// Algorithms 3.5/3.6 and 7.4). With `bound > 0` every coordinate is confined to
// [-bound, bound]: iterates are projected onto the box, directions are zeroed
// on active faces and the line search falls back to projected backtracking.
struct LbfgsOptions {
  int history = 20;
  int max_iterations = 500;
  double f_target = 0.0;            // stop once f <= f_target
  double gradient_tolerance = 1e-12;  // stop once max |g_i| (projected) <= this
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
  double bound = 0.0;  // <= 0 disables the box
  double initial_step = 1.0;  // length of the first trial step along steepest descent
};

enum class LbfgsStatus { TargetReached, GradientTolerance, MaxIterations, LineSearchFailed };

const char* to_string(LbfgsStatus status);

struct LbfgsResult {
  RealVector x;
  double f = 0.0;
  RealVector gradient;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  std::vector<double> best_trace;  // best f after each iteration, starting with f(x0)
};

// Returns f(x) and writes the gradient into `grad` (already sized like x).
using Objective = std::function<double(const RealVector& x, RealVector& grad)>;

LbfgsResult minimize_lbfgs(const Objective& objective, RealVector x0, const LbfgsOptions& options);

}  // namespace cprlab
