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


#include <cmath>

#include <gtest/gtest.h>

#include "cprlab/lbfgs.hpp"

namespace cprlab {
namespace {

double rosenbrock(const RealVector& x, RealVector& g) {
  double f = 0.0;
  g.setZero();
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    f += 100.0 * a * a + b * b;
    g(i) += -400.0 * x(i) * a - 2.0 * b;
    g(i + 1) += 200.0 * a;
  }
  return f;
}

TEST(Lbfgs, RosenbrockTwoDimensional) {
  RealVector x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opt;
  opt.gradient_tolerance = 1e-10;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_NEAR(r.x(0), 1.0, 1e-7);
  EXPECT_NEAR(r.x(1), 1.0, 1e-7);
  EXPECT_LT(r.iterations, 100);
}

TEST(Lbfgs, RosenbrockTenDimensional) {
  RealVector x0 = RealVector::Constant(10, -1.0);
  LbfgsOptions opt;
  opt.gradient_tolerance = 1e-9;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_LT((r.x - RealVector::Ones(10)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NE(r.status, LbfgsStatus::MaxIterations);
}

TEST(Lbfgs, BestTraceIsMonotone) {
  RealVector x0(2);
  x0 << -1.2, 1.0;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, {});
  ASSERT_GE(r.best_trace.size(), 2u);
  for (std::size_t i = 1; i < r.best_trace.size(); ++i) EXPECT_LE(r.best_trace[i], r.best_trace[i - 1]);
  EXPECT_EQ(static_cast<int>(r.best_trace.size()), r.iterations + 1);
}

TEST(Lbfgs, StopsAtTarget) {
  RealVector x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opt;
  opt.f_target = 1e-2;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_EQ(r.status, LbfgsStatus::TargetReached);
  EXPECT_LE(r.f, 1e-2);
}

TEST(Lbfgs, IterationBudget) {
  RealVector x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opt;
  opt.max_iterations = 3;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_EQ(r.status, LbfgsStatus::MaxIterations);
  EXPECT_EQ(r.iterations, 3);
}

TEST(Lbfgs, BoxConstrainedQuadratic) {
  RealVector c(4);
  c << 2.0, -0.3, -5.0, 0.7;
  auto quad = [&](const RealVector& x, RealVector& g) {
    g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  LbfgsOptions opt;
  opt.bound = 1.0;
  const LbfgsResult r = minimize_lbfgs(quad, RealVector::Zero(4), opt);
  RealVector expected(4);
  expected << 1.0, -0.3, -1.0, 0.7;
  EXPECT_LT((r.x - expected).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(r.x.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Lbfgs, StartingAtMinimumStopsImmediately) {
  auto quad = [](const RealVector& x, RealVector& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  LbfgsOptions opt;
  opt.f_target = -1.0;
  const LbfgsResult r = minimize_lbfgs(quad, RealVector::Zero(3), opt);
  EXPECT_EQ(r.status, LbfgsStatus::GradientTolerance);
  EXPECT_EQ(r.iterations, 0);
}

}  // namespace
}  // namespace cprlab
