#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "proxflow/dynamics.hpp"

namespace proxflow {

// sigma(t) = integral_t^inf (|x'(s)| + |x''(s)|) ds, truncated at the last
// sample. approximate is set when the integrand at the last sample is
// above 1e-8 of its initial value.
struct SigmaTrace {
  std::vector<double> times;
  std::vector<double> sigma;
  bool approximate = false;
};

SigmaTrace sigma_estimate(const Trajectory& traj);

// Finite-horizon forms of the two dominance bounds, with T the last sample:
//   |x(t) - xbar| <= |x(T) - xbar| + sigma(t)
//   |x'(t)|       <= |x'(T)|       + sigma(t)
// checked up to the trapezoid truncation tolerance.
struct SigmaDominance {
  std::vector<std::size_t> position_violations;
  std::vector<std::size_t> velocity_violations;
  bool ok() const { return position_violations.empty() && velocity_violations.empty(); }
};

SigmaDominance check_sigma_dominance(const Trajectory& traj, const SigmaTrace& sigma, const Vec& x_limit);

struct ExponentialFit {
  double a1 = 0.0;
  double a2 = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

struct PolynomialFit {
  double a3 = 0.0;
  double a4 = 0.0;
  double q = 0.0;  // decay exponent (1 - theta) / (2 theta - 1)
  double theta = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

// Least squares on (t, log|x(t) - x_limit|) over t0 <= t <= t1, skipping
// distances <= 1e-14. a2 = -slope, a1 = exp(intercept). Throws with fewer
// than 5 usable samples.
ExponentialFit fit_exponential(const Trajectory& traj, const Vec& x_limit, double t0,
                               double t1 = std::numeric_limits<double>::infinity());

// Least squares on (log t, log|x(t) - x_limit|); slope -q gives
// theta = (1 + q) / (1 + 2q). a3 comes from the intercept, a4 = a3 * t0.
// Throws when q <= 0 or with fewer than 5 usable samples.
PolynomialFit fit_polynomial(const Trajectory& traj, const Vec& x_limit, double t0,
                             double t1 = std::numeric_limits<double>::infinity());

double theta_from_decay_exponent(double q);
double decay_exponent_from_theta(double theta);

enum class Regime { finite_time, exponential, polynomial, undetermined };

std::string to_string(Regime regime);

struct RateReport {
  Regime regime = Regime::undetermined;
  std::optional<double> theta;
  std::optional<double> a1;
  std::optional<double> a2;
  std::optional<double> a3;
  std::optional<double> a4;
  // r^2 of each candidate; -inf when the fit was rejected.
  double r2_exponential = -std::numeric_limits<double>::infinity();
  double r2_polynomial = -std::numeric_limits<double>::infinity();
  double t0 = 0.0;  // fit window start
  double t1 = 0.0;  // fit window end
  Vec x_limit;
};

struct ClassifyOptions {
  std::optional<double> t0;  // default: first time |x'|+|x''| <= 1e-2 of its initial value
  // The trajectory counts as converged when |x'|+|x''| at the last sample
  // is at or below this.
  double converged_tol = 1e-6;
};

// x_limit defaults to the last sample, in which case the fit window ends at
// 90% of the final time.
RateReport classify_rate(const Trajectory& traj, const std::optional<Vec>& x_limit = std::nullopt,
                         const ClassifyOptions& options = {});

struct SigmaOdeSample {
  double t = 0.0;
  double rate = 0.0;   // central-difference sigma'
  double bound = 0.0;  // -alpha sigma^(theta/(1-theta))
  double tolerance = 0.0;
  bool ok = false;
};

struct SigmaOdeReport {
  std::vector<SigmaOdeSample> samples;
  std::vector<std::size_t> violations;  // indices into samples
};

// Checks sigma' <= -alpha sigma^(theta/(1-theta)) at interior samples.
// The default per-sample tolerance is |sigma_{i+1} - 2 sigma_i + sigma_{i-1}| / dt.
SigmaOdeReport sigma_ode_check(const SigmaTrace& sigma, double theta, double alpha,
                               std::optional<double> tolerance = std::nullopt);

// alpha = M^(theta/(1-theta)) / (K N) with M = -m/K and N = max(s, p),
// for a user-supplied Lojasiewicz constant K. Requires feasible params.
double sigma_ode_alpha(const SystemParams& params, double K, double theta);

}  // namespace proxflow
