#include "proxflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace proxflow {

Vec acceleration(const Objective& obj, const SystemParams& params, const Vec& u, const Vec& v) {
  return prox_grad_map(obj, params.lambda, u) - params.gamma * v - u;
}

State vector_field(const Objective& obj, const SystemParams& params, const State& state) {
  detail::require(state.u.size() == obj.dim() && state.v.size() == obj.dim(),
                  "vector_field: state dimension does not match objective");
  return {state.v, acceleration(obj, params, state.u, state.v)};
}

int default_sample_every(double t_end, double h) {
  const double steps = std::floor(t_end / h * (1.0 + 1e-12));
  constexpr double kMaxSamples = 1e5;
  return std::max(1, static_cast<int>(std::ceil(steps / kMaxSamples)));
}

Trajectory integrate(const Objective& obj, const SystemParams& params, const Vec& u0, const Vec& v0,
                     double t_end, double h, int sample_every) {
  detail::require_positive(h, "h");
  detail::require_positive(t_end, "t_end");
  detail::require(u0.size() == obj.dim() && v0.size() == obj.dim(),
                  "integrate: initial state dimension does not match objective");
  detail::require(u0.allFinite() && v0.allFinite(), "integrate: initial state must be finite");
  detail::require(t_end >= h, "integrate: t_end must be at least one step");
  if (h > 1.0 / params.L1) {
    std::ostringstream msg;
    msg << "step guard violated: h = " << h << " exceeds 1/L1 = " << 1.0 / params.L1;
    throw InvalidArgument(msg.str());
  }
  detail::require(sample_every >= 0, "integrate: sample_every must be positive");
  if (sample_every == 0) sample_every = default_sample_every(t_end, h);

  const auto steps = static_cast<std::size_t>(std::floor(t_end / h * (1.0 + 1e-12)));
  const auto every = static_cast<std::size_t>(sample_every);

  Trajectory traj;
  traj.params = params;
  traj.step = h;
  traj.sample_every = sample_every;
  const std::size_t expected = steps / every + 2;
  traj.times.reserve(expected);
  traj.xs.reserve(expected);
  traj.vs.reserve(expected);
  traj.accs.reserve(expected);

  auto record = [&](std::size_t k, const Vec& u, const Vec& v) {
    traj.times.push_back(static_cast<double>(k) * h);
    traj.xs.push_back(u);
    traj.vs.push_back(v);
    traj.accs.push_back(acceleration(obj, params, u, v));
  };

  Vec u = u0;
  Vec v = v0;
  record(0, u, v);
  const double half = 0.5 * h;
  for (std::size_t k = 1; k <= steps; ++k) {
    const Vec a1 = acceleration(obj, params, u, v);
    const Vec u2 = u + half * v;
    const Vec v2 = v + half * a1;
    const Vec a2 = acceleration(obj, params, u2, v2);
    const Vec u3 = u + half * v2;
    const Vec v3 = v + half * a2;
    const Vec a3 = acceleration(obj, params, u3, v3);
    const Vec u4 = u + h * v3;
    const Vec v4 = v + h * a3;
    const Vec a4 = acceleration(obj, params, u4, v4);
    u += (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    if (!u.allFinite() || !v.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite state at step " << k << " (t = " << static_cast<double>(k) * h << ")";
      throw IntegrationAbort(msg.str(), k, static_cast<double>(k) * h);
    }
    if (k % every == 0 || k == steps) record(k, u, v);
  }
  return traj;
}

bool ThirdDerivativeReport::all_ok() const { return violations() == 0; }

std::size_t ThirdDerivativeReport::violations() const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const auto& s) {
    return !(s.ok_l1 && s.ok_l2);
  }));
}

ThirdDerivativeReport third_derivative_check(const Trajectory& traj, const SystemParams& params,
                                             std::optional<double> tolerance) {
  const std::size_t n = traj.size();
  detail::require(n >= 3, "third_derivative_check needs at least 3 samples");

  ThirdDerivativeReport report;
  if (tolerance) {
    report.tolerance = *tolerance;
  } else {
    double dt = 0.0;
    double max_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) dt = std::max(dt, traj.times[i] - traj.times[i - 1]);
      max_acc = std::max(max_acc, traj.accs[i].norm());
    }
    report.tolerance = 10.0 * dt * dt * max_acc;
  }

  const double l1sq = params.L1 * params.L1;
  const double l2sq = params.L2 * params.L2;
  report.samples.reserve(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec jerk = (traj.accs[i + 1] - traj.accs[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
    const double vsq = traj.vs[i].squaredNorm();
    const double asq = traj.accs[i].squaredNorm();
    ThirdDerivativeSample s;
    s.t = traj.times[i];
    s.lhs = jerk.squaredNorm();
    s.rhs_l1 = l1sq * vsq + (l1sq - 1.0) * asq;
    s.rhs_l2 = l2sq * vsq + (l2sq - 1.0) * asq;
    s.ok_l1 = s.lhs <= s.rhs_l1 + report.tolerance;
    s.ok_l2 = s.lhs <= s.rhs_l2 + report.tolerance;
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace proxflow
