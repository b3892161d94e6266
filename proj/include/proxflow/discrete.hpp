#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "proxflow/problems.hpp"

namespace proxflow {

// Explicit discretization of the second-order flow with step h_k and
// damping gamma_k:
//   (x+ - 2x + x-)/h^2 + gamma (x+ - x)/h + x = prox_{lambda f}(x - lambda grad g(x))
// solved for x+.
Vec inertial_step_general(const Objective& obj, double lambda, double gamma_k, double h_k, const Vec& xk,
                          const Vec& xkm1);

// The h = 1 case written as a relaxed inertial proximal-gradient step:
//   x+ = (1 - 1/(1+gamma)) x + 1/(1+gamma) prox(...) + 1/(1+gamma) (x - x-)
Vec inertial_step_unit(const Objective& obj, double lambda, double gamma_k, const Vec& xk, const Vec& xkm1);

using GammaSchedule = std::function<double(std::size_t k)>;

GammaSchedule constant_gamma(double gamma);

// gamma_k = gamma_inf + (gamma_0 - gamma_inf) / k for k >= 1.
GammaSchedule decaying_gamma(double gamma_0, double gamma_inf);

// Iterates x_0, x_1, ... The difference x_1 - x_0 acts as the initial
// momentum. residuals[k-1] and objective_values[k] belong to xs[k].
struct IterateHistory {
  std::vector<Vec> xs;
  std::vector<double> residuals;
  std::vector<double> objective_values;
  bool converged = false;
  std::size_t iterations = 0;  // index of the last iterate
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& msg, std::size_t index) : NumericalError(msg), index(index) {}
  std::size_t index;
};

// Runs the unit-step recursion until the prox-gradient residual of the
// current iterate is <= tol or max_iter iterations. Throws DivergenceError
// when |x_k| exceeds 1e12 or becomes non-finite.
IterateHistory run_inertial(const Objective& obj, double lambda, const GammaSchedule& gamma_schedule,
                            const Vec& x0, const Vec& x1, std::size_t max_iter, double tol);

}  // namespace proxflow
