#include "proxflow/params.hpp"

#include <algorithm>
#include <cmath>

#include "proxflow/core.hpp"

namespace proxflow {
namespace {

void check_inputs(double gamma, double lambda, double beta) {
  detail::require_positive(gamma, "gamma");
  detail::require_positive(lambda, "lambda");
  detail::require_nonnegative(beta, "beta");
}

}  // namespace

double lipschitz_l1(double gamma, double lambda_beta) {
  detail::require_positive(gamma, "gamma");
  detail::require_nonnegative(lambda_beta, "lambda*beta");
  const double shifted = 1.0 + lambda_beta;
  return std::sqrt(std::max((gamma + 1.0) * (gamma + 1.0), (gamma + 2.0) * (shifted * shifted + 1.0)));
}

double lipschitz_l2(double gamma, double lambda_beta) {
  detail::require_positive(gamma, "gamma");
  detail::require_nonnegative(lambda_beta, "lambda*beta");
  const double shifted = 2.0 + lambda_beta;
  return std::sqrt(std::max((gamma + 1.0) * (gamma + 1.0) + gamma * lambda_beta,
                            shifted * shifted + gamma * shifted));
}

SystemParams derive_params(double gamma, double lambda, double beta) {
  check_inputs(gamma, lambda, beta);
  SystemParams sp;
  sp.gamma = gamma;
  sp.lambda = lambda;
  sp.beta = beta;

  const double lb = lambda * beta;
  sp.L1 = lipschitz_l1(gamma, lb);
  sp.L2 = lipschitz_l2(gamma, lb);
  sp.L = std::min(sp.L1, sp.L2);

  const double l2 = sp.L * sp.L;
  const double g2 = gamma * gamma;
  sp.A = -0.5 * gamma / lambda + 0.5 * beta * (l2 + 2.0 * g2 + 1.0);
  sp.B = -0.5 * gamma / (lambda * l2) + 0.5 * beta * (l2 + g2 + 1.0);
  sp.C = -((2.0 * l2 + 1.0) / ((l2 + 1.0) * (l2 + 1.0))) * g2 + 3.0 * beta * gamma * lambda - 1.0;

  sp.c = l2 / (l2 + 1.0);
  sp.a_const = gamma / (2.0 * (l2 + 1.0) * l2 * lambda);
  sp.b_const = l2 * gamma / (2.0 * (l2 + 1.0) * lambda);

  sp.s = beta + 1.0 / lambda;
  sp.p = (beta * lambda * gamma + (3.0 - 2.0 * sp.c) * gamma - sp.C) / lambda;

  sp.rho_feasible = sp.A < 0.0 && sp.B < 0.0 && sp.C < 0.0;
  sp.corollary_feasible = corollary_check(gamma, lambda, beta);
  if (sp.rho_feasible) sp.envelope = rate_envelope_constants(sp);
  return sp;
}

bool corollary_check(double gamma, double lambda, double beta) {
  check_inputs(gamma, lambda, beta);
  if (gamma > std::sqrt(3.0)) return false;
  const double shifted = 2.0 + lambda * beta;
  const double l2 = shifted * shifted + gamma * shifted;
  return -gamma / (lambda * l2) + beta * (l2 + gamma * gamma + 1.0) < 0.0;
}

std::vector<GridPoint> feasible_region(double beta, std::span<const double> gamma_grid,
                                       std::span<const double> lambda_grid) {
  detail::require(!gamma_grid.empty() && !lambda_grid.empty(), "feasible_region: grids must be nonempty");
  std::vector<GridPoint> out;
  for (double g : gamma_grid) {
    for (double l : lambda_grid) {
      SystemParams sp = derive_params(g, l, beta);
      if (sp.rho_feasible) out.push_back({g, l, std::move(sp)});
    }
  }
  return out;
}

double envelope_function(const SystemParams& sp, double r) {
  return (sp.A + sp.B * r * r) / (sp.p + (sp.s + sp.p) * r + sp.s * r * r);
}

EnvelopeConstants rate_envelope_constants(const SystemParams& sp) {
  if (!(sp.A < 0.0 && sp.B < 0.0))
    throw InvalidArgument("rate envelope requires A < 0 and B < 0 (infeasible parameters)");
  detail::require(sp.s > 0.0 && sp.p > 0.0, "rate envelope requires s > 0 and p > 0");
  const double s = sp.s;
  const double p = sp.p;
  const double k = s * sp.A - p * sp.B;
  const double disc = k * k + (s + p) * (s + p) * sp.A * sp.B;
  EnvelopeConstants env;
  env.r0 = (k - std::sqrt(disc)) / ((s + p) * sp.B);
  env.m = std::max(sp.B / s, envelope_function(sp, env.r0));
  return env;
}

}  // namespace proxflow
