#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "proxflow/core.hpp"
#include "proxflow/params.hpp"
#include "proxflow/problems.hpp"

namespace proxflow {

// Point of the first-order reformulation X = (x, x').
struct State {
  Vec u;  // position
  Vec v;  // velocity
};

// Sampled solution of x'' + gamma x' + x = prox_{lambda f}(x - lambda grad g(x)).
// accs holds the acceleration evaluated from the system identity at each
// sample, not a difference quotient.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> xs;
  std::vector<Vec> vs;
  std::vector<Vec> accs;
  SystemParams params;
  double step = 0.0;
  int sample_every = 1;
  std::string method = "rk4";

  std::size_t size() const { return times.size(); }
  int dim() const { return xs.empty() ? 0 : static_cast<int>(xs.front().size()); }
};

// Integration failed part-way (non-finite state).
class IntegrationAbort : public NumericalError {
 public:
  IntegrationAbort(const std::string& msg, std::size_t step_index, double time)
      : NumericalError(msg), step_index(step_index), time(time) {}
  std::size_t step_index;
  double time;
};

// prox_{lambda f}(u - lambda grad g(u)) - gamma v - u
Vec acceleration(const Objective& obj, const SystemParams& params, const Vec& u, const Vec& v);

// F(u, v) = (v, acceleration(u, v)). The returned State carries (du, dv).
State vector_field(const Objective& obj, const SystemParams& params, const State& state);

// Sample stride that keeps a trace at or below 1e5 samples.
int default_sample_every(double t_end, double h);

// Classical fixed-step RK4 on the first-order system. Requires h <= 1/L1
// and t_end >= h. sample_every = 0 selects default_sample_every. Samples are
// taken every sample_every steps and at the last step.
Trajectory integrate(const Objective& obj, const SystemParams& params, const Vec& u0, const Vec& v0,
                     double t_end, double h, int sample_every = 0);

struct ThirdDerivativeSample {
  double t = 0.0;
  double lhs = 0.0;     // |x'''|^2 from central differences of accs
  double rhs_l1 = 0.0;  // L1^2 |x'|^2 + (L1^2 - 1) |x''|^2
  double rhs_l2 = 0.0;  // same with L2
  bool ok_l1 = false;   // lhs <= rhs_l1 + tolerance
  bool ok_l2 = false;
};

struct ThirdDerivativeReport {
  std::vector<ThirdDerivativeSample> samples;  // interior samples only
  double tolerance = 0.0;

  bool all_ok() const;
  std::size_t violations() const;
};

// Checks |x'''|^2 <= L^2 |x'|^2 + (L^2 - 1) |x''|^2 for both Lipschitz
// constants. Default tolerance is 10 dt^2 max|x''| with dt the sample
// spacing.
ThirdDerivativeReport third_derivative_check(const Trajectory& traj, const SystemParams& params,
                                             std::optional<double> tolerance = std::nullopt);

}  // namespace proxflow
