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

#include "cprlab/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cprlab/errors.hpp"
#include <limits>

namespace cprlab {
namespace {

struct Point {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative g . d
};

// Minimizer of the cubic matching f and slope at a and b, kept inside the
// central 80% of the bracket; bisection if the cubic is degenerate.
double cubic_step(const Point& a, const Point& b) {
  const double lo = std::min(a.alpha, b.alpha);
  const double hi = std::max(a.alpha, b.alpha);
  const double width = hi - lo;
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  double step = 0.5 * (lo + hi);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom != 0.0) {
      const double candidate = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
      if (std::isfinite(candidate)) step = candidate;
    }
  }
  return std::clamp(step, lo + 0.1 * width, hi - 0.1 * width);
}

class Problem {
 public:
  Problem(const Objective& objective, const LbfgsOptions& options) : objective_(objective), options_(options) {}

  double eval(const RealVector& x, RealVector& grad) {
    ++evaluations_;
    return objective_(x, grad);
  }

  RealVector project(RealVector x) const {
    if (options_.bound > 0.0) x = x.cwiseMax(-options_.bound).cwiseMin(options_.bound);
    return x;
  }

  // Gradient with components that point out of an active face removed.
  RealVector projected_gradient(const RealVector& x, const RealVector& g) const {
    if (options_.bound <= 0.0) return g;
    RealVector pg = g;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if ((x(i) >= options_.bound && g(i) < 0.0) || (x(i) <= -options_.bound && g(i) > 0.0)) pg(i) = 0.0;
    }
    return pg;
  }

  int evaluations() const { return evaluations_; }

 private:
  const Objective& objective_;
  const LbfgsOptions& options_;
  int evaluations_ = 0;
};

struct LineSearchOutcome {
  bool ok = false;
  RealVector x;
  RealVector g;
  double f = 0.0;
};

LineSearchOutcome strong_wolfe(Problem& problem, const LbfgsOptions& opt, const RealVector& x0, double f0,
                               const RealVector& g0, const RealVector& d, double alpha_init) {
  const double slope0 = g0.dot(d);
  LineSearchOutcome best{false, x0, g0, f0};

  RealVector x(x0.size()), g(x0.size());
  auto trial = [&](double alpha) {
    x = x0 + alpha * d;
    const double f = problem.eval(x, g);
    if (f < best.f) best = {true, x, g, f};
    return Point{alpha, f, g.dot(d)};
  };
  auto accept = [&](double f) { return LineSearchOutcome{true, x, g, f}; };

  Point prev{0.0, f0, slope0};
  double alpha = alpha_init;
  for (int i = 0; i < opt.max_line_search; ++i) {
    const Point cur = trial(alpha);
    if (!std::isfinite(cur.f)) {
      alpha = 0.5 * (prev.alpha + alpha);
      continue;
    }

    Point lo, hi;
    bool bracketed = false;
    if (cur.f > f0 + opt.c1 * cur.alpha * slope0 || (i > 0 && cur.f >= prev.f)) {
      lo = prev;
      hi = cur;
      bracketed = true;
    } else if (std::abs(cur.slope) <= -opt.c2 * slope0) {
      return accept(cur.f);
    } else if (cur.slope >= 0.0) {
      lo = cur;
      hi = prev;
      bracketed = true;
    }

    if (bracketed) {
      for (int j = i; j < opt.max_line_search; ++j) {
        if (std::abs(hi.alpha - lo.alpha) <= 1e-14 * std::max(1.0, lo.alpha)) break;
        const Point mid = trial(cubic_step(lo, hi));
        if (!std::isfinite(mid.f) || mid.f > f0 + opt.c1 * mid.alpha * slope0 || mid.f >= lo.f) {
          hi = mid;
        } else {
          if (std::abs(mid.slope) <= -opt.c2 * slope0) return accept(mid.f);
          if (mid.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
          lo = mid;
        }
      }
      break;
    }
    prev = cur;
    alpha *= 2.0;
  }
  // No Wolfe point, but any strict decrease keeps the run monotone.
  return best;
}

LineSearchOutcome projected_backtracking(Problem& problem, const LbfgsOptions& opt, const RealVector& x0,
                                         double f0, const RealVector& g0, const RealVector& d,
                                         double alpha_init) {
  RealVector g(x0.size());
  double alpha = alpha_init;
  for (int i = 0; i < opt.max_line_search; ++i) {
    const RealVector x = problem.project(x0 + alpha * d);
    const double f = problem.eval(x, g);
    if (std::isfinite(f) && f <= f0 + opt.c1 * g0.dot(x - x0) && f < f0) return {true, x, g, f};
    alpha *= 0.5;
  }
  return {false, x0, g0, f0};
}

}  // namespace

const char* to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::TargetReached: return "target_reached";
    case LbfgsStatus::GradientTolerance: return "gradient_tolerance";
    case LbfgsStatus::MaxIterations: return "max_iterations";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

LbfgsResult minimize_lbfgs(const Objective& objective, RealVector x0, const LbfgsOptions& options) {
  const Eigen::Index n = x0.size();
  if (!(options.initial_step > 0.0)) throw ValidationError("initial_step must be positive");
  Problem problem(objective, options);
  const bool boxed = options.bound > 0.0;

  LbfgsResult res;
  res.x = problem.project(std::move(x0));
  res.gradient.resize(n);
  res.f = problem.eval(res.x, res.gradient);
  res.best_trace.push_back(res.f);

  std::deque<RealVector> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> coef;

  for (;;) {
    const RealVector pg = problem.projected_gradient(res.x, res.gradient);
    if (res.f <= options.f_target) {
      res.status = LbfgsStatus::TargetReached;
      break;
    }
    if (pg.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      res.status = LbfgsStatus::GradientTolerance;
      break;
    }
    if (res.iterations >= options.max_iterations) {
      res.status = LbfgsStatus::MaxIterations;
      break;
    }

    // Two-loop recursion.
    RealVector d = pg;
    const std::size_t m = s_hist.size();
    coef.assign(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      coef[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= coef[i] * y_hist[i];
    }
    if (m > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (coef[i] - beta) * s_hist[i];
    }
    d = -d;
    if (boxed) d = -problem.projected_gradient(res.x, -d);

    if (d.dot(res.gradient) >= 0.0) {
      // Curvature memory produced an ascent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -pg;
    }
    const double alpha0 = m == 0 ? std::min(1.0, options.initial_step / std::max(pg.norm(), 1e-300)) : 1.0;

    LineSearchOutcome step = boxed ? projected_backtracking(problem, options, res.x, res.f, res.gradient, d, alpha0)
                                   : strong_wolfe(problem, options, res.x, res.f, res.gradient, d, alpha0);
    if (!step.ok && m > 0) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      const RealVector sd = -pg;
      const double a0 = std::min(1.0, options.initial_step / std::max(pg.norm(), 1e-300));
      step = boxed ? projected_backtracking(problem, options, res.x, res.f, res.gradient, sd, a0)
                   : strong_wolfe(problem, options, res.x, res.f, res.gradient, sd, a0);
    }
    if (!step.ok) {
      res.status = LbfgsStatus::LineSearchFailed;
      break;
    }

    RealVector s = step.x - res.x;
    RealVector y = step.g - res.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm()) && sy > 0.0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    res.x = std::move(step.x);
    res.gradient = std::move(step.g);
    res.f = step.f;
    ++res.iterations;
    res.best_trace.push_back(std::min(res.f, res.best_trace.back()));
  }
  res.evaluations = problem.evaluations();
  return res;
}

}  // namespace cprlab
