#include "proxflow/discrete.hpp"

#include <cmath>

namespace proxflow {
namespace {

constexpr double kDivergenceNorm = 1e12;

void check_step_inputs(const Objective& obj, double lambda, double gamma_k, const Vec& xk, const Vec& xkm1) {
  detail::require_positive(lambda, "lambda");
  detail::require_positive(gamma_k, "gamma_k");
  detail::require(xk.size() == obj.dim() && xkm1.size() == obj.dim(), "inertial step: dimension mismatch");
}

}  // namespace

Vec inertial_step_general(const Objective& obj, double lambda, double gamma_k, double h_k, const Vec& xk,
                          const Vec& xkm1) {
  check_step_inputs(obj, lambda, gamma_k, xk, xkm1);
  detail::require_positive(h_k, "h_k");
  const double denom = 1.0 + gamma_k * h_k;
  const Vec target = prox_grad_map(obj, lambda, xk);
  return xk + (xk - xkm1) / denom + (h_k * h_k / denom) * (target - xk);
}

Vec inertial_step_unit(const Objective& obj, double lambda, double gamma_k, const Vec& xk, const Vec& xkm1) {
  check_step_inputs(obj, lambda, gamma_k, xk, xkm1);
  const double w = 1.0 / (1.0 + gamma_k);
  const Vec target = prox_grad_map(obj, lambda, xk);
  return (1.0 - w) * xk + w * target + w * (xk - xkm1);
}

GammaSchedule constant_gamma(double gamma) {
  detail::require_positive(gamma, "gamma");
  return [gamma](std::size_t) { return gamma; };
}

GammaSchedule decaying_gamma(double gamma_0, double gamma_inf) {
  detail::require_positive(gamma_0, "gamma_0");
  detail::require_positive(gamma_inf, "gamma_inf");
  return [gamma_0, gamma_inf](std::size_t k) {
    return gamma_inf + (gamma_0 - gamma_inf) / static_cast<double>(k == 0 ? 1 : k);
  };
}

IterateHistory run_inertial(const Objective& obj, double lambda, const GammaSchedule& gamma_schedule,
                            const Vec& x0, const Vec& x1, std::size_t max_iter, double tol) {
  detail::require_positive(lambda, "lambda");
  detail::require_nonnegative(tol, "tol");
  detail::require(max_iter >= 1, "max_iter must be positive");
  detail::require(x0.size() == obj.dim() && x1.size() == obj.dim(), "run_inertial: dimension mismatch");
  detail::require(x0.allFinite() && x1.allFinite(), "run_inertial: initial points must be finite");
  detail::require(static_cast<bool>(gamma_schedule), "run_inertial: empty gamma schedule");

  IterateHistory hist;
  hist.xs = {x0, x1};
  hist.objective_values = {obj.value(x0), obj.value(x1)};
  hist.residuals = {prox_grad_residual(obj, lambda, x1)};
  hist.iterations = 1;

  while (hist.residuals.back() > tol && hist.iterations < max_iter) {
    const std::size_t k = hist.iterations;
    Vec next = inertial_step_unit(obj, lambda, gamma_schedule(k), hist.xs[k], hist.xs[k - 1]);
    if (!next.allFinite() || next.norm() > kDivergenceNorm)
      throw DivergenceError("iterate " + std::to_string(k + 1) + " diverged (|x| > 1e12)", k + 1);
    hist.residuals.push_back(prox_grad_residual(obj, lambda, next));
    hist.objective_values.push_back(obj.value(next));
    hist.xs.push_back(std::move(next));
    ++hist.iterations;
  }
  hist.converged = hist.residuals.back() <= tol;
  return hist;
}

}  // namespace proxflow
