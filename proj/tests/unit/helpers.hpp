#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "proxflow/problems.hpp"

namespace testutil {

using proxflow::Mat;
using proxflow::Vec;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline proxflow::Objective zero_quad(const Mat& q, const Vec& b) {
  proxflow::ProblemSpec s;
  s.name = "zero_quad";
  s.Q = q;
  s.b = b;
  return proxflow::make_problem(s);
}

inline proxflow::Objective lasso(const Mat& m, const Vec& y, double mu) {
  proxflow::ProblemSpec s;
  s.name = "lasso";
  s.M = m;
  s.y = y;
  s.mu = mu;
  return proxflow::make_problem(s);
}

inline proxflow::Objective box_quad(const Mat& q, const Vec& b, const Vec& lo, const Vec& hi) {
  proxflow::ProblemSpec s;
  s.name = "box_quad";
  s.Q = q;
  s.b = b;
  s.lower = lo;
  s.upper = hi;
  return proxflow::make_problem(s);
}

inline proxflow::Objective cos_quad(int dim, double mu = 0.0) {
  proxflow::ProblemSpec s;
  s.name = "cos_quad";
  s.dim = dim;
  s.mu = mu;
  return proxflow::make_problem(s);
}

// Root of fn on [lo, hi] by bisection; fn(lo) and fn(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& fn, double lo, double hi) {
  double flo = fn(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Positive root of x = 2 sin x.
inline double cos_quad_critical_point() {
  return bisect([](double x) { return x - 2.0 * std::sin(x); }, 1.0, 3.0);
}

// Minimizer of phi over a uniform grid on [lo, hi] with the given step.
inline double grid_argmin(const std::function<double(double)>& phi, double lo, double hi, double step) {
  double best = lo, best_val = phi(lo);
  const auto n = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 1; i <= n; ++i) {
    const double y = lo + static_cast<double>(i) * step;
    const double v = phi(y);
    if (v < best_val) {
      best_val = v;
      best = y;
    }
  }
  return best;
}

inline Vec random_vec(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace testutil
