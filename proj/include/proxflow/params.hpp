#pragma once

#include <optional>
#include <span>
#include <vector>

namespace proxflow {

// Constants (m, r0) of the rational envelope
//   g(r) = (A + B r^2) / (p + (s + p) r + s r^2),
// with m = max(B/s, g(r0)) and r0 the maximizer of g on [0, inf).
struct EnvelopeConstants {
  double m = 0.0;
  double r0 = 0.0;
};

// Damping gamma, step lambda, gradient Lipschitz constant beta, and every
// constant derived from them for the Lyapunov analysis.
struct SystemParams {
  double gamma = 0.0;
  double lambda = 0.0;
  double beta = 0.0;

  double L1 = 0.0;  // Lipschitz constant of the first-order field, first form
  double L2 = 0.0;  // second form
  double L = 0.0;   // min(L1, L2)

  // Dissipation coefficients; the conditions set is A < 0, B < 0, C < 0.
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;

  // c in (0,1) and the pair a, b with a * b = gamma^2 (1-c)^2 / (4 lambda^2).
  double c = 0.0;
  double a_const = 0.0;
  double b_const = 0.0;

  // Subgradient bound coefficients: |w| <= s |x''| + p |x'|.
  double s = 0.0;
  double p = 0.0;

  bool rho_feasible = false;
  bool corollary_feasible = false;

  // Present only when rho_feasible.
  std::optional<EnvelopeConstants> envelope;
};

double lipschitz_l1(double gamma, double lambda_beta);
double lipschitz_l2(double gamma, double lambda_beta);

SystemParams derive_params(double gamma, double lambda, double beta);

// Sufficient condition for the conditions set when gamma <= sqrt(3).
bool corollary_check(double gamma, double lambda, double beta);

struct GridPoint {
  double gamma;
  double lambda;
  SystemParams params;
};

// Every (gamma, lambda) of the grid product with rho_feasible, gamma-major.
std::vector<GridPoint> feasible_region(double beta, std::span<const double> gamma_grid,
                                       std::span<const double> lambda_grid);

// The rational envelope g(r) above, evaluated at r >= 0.
double envelope_function(const SystemParams& params, double r);

// Throws InvalidArgument when params are not feasible.
EnvelopeConstants rate_envelope_constants(const SystemParams& params);

}  // namespace proxflow
