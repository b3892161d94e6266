#include "proxflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace proxflow {
namespace {

void check_dims(const Objective& obj, const Vec& a, const Vec& b, const Vec& c) {
  detail::require(a.size() == obj.dim() && b.size() == obj.dim() && c.size() == obj.dim(),
                  "dimension mismatch with objective");
}

// z rebuilt as acc + gamma v + x can leave dom f by roundoff; such
// excursions are mapped back with the prox, genuine ones are rejected.
double fg_checked(const Objective& obj, double lambda, const Vec& z) {
  const double value = obj.value(z);
  if (value != kInfinity) return value;
  const Vec back = obj.f->prox(lambda, z);
  const double fb = obj.value(back);
  if (fb == kInfinity || (back - z).norm() > 1e-12 * (1.0 + z.norm()))
    throw DomainError("x'' + gamma x' + x lies outside dom f");
  return fb;
}

}  // namespace

double energy_at(const Objective& obj, const SystemParams& params, const Vec& x, const Vec& v, const Vec& acc) {
  check_dims(obj, x, v, acc);
  const double fg = fg_checked(obj, params.lambda, acc + params.gamma * v + x);
  const double inv2l = 0.5 / params.lambda;
  return fg + inv2l * (acc + params.c * params.gamma * v).squaredNorm() - params.C * inv2l * v.squaredNorm();
}

double energy_expanded(const Objective& obj, const SystemParams& params, const Vec& x, const Vec& v,
                       const Vec& acc) {
  check_dims(obj, x, v, acc);
  const double fg = fg_checked(obj, params.lambda, acc + params.gamma * v + x);
  const double lam = params.lambda;
  const double cg = params.c * params.gamma;
  return acc.squaredNorm() / (2.0 * lam) + (cg * cg - params.C) / (2.0 * lam) * v.squaredNorm() +
         cg / lam * acc.dot(v) + fg;
}

double h_value(const Objective& obj, const SystemParams& params, const Vec& u, const Vec& v, const Vec& w) {
  check_dims(obj, u, v, w);
  const double fg = obj.value(u);
  if (fg == kInfinity) return kInfinity;
  const double inv2l = 0.5 / params.lambda;
  return fg + inv2l * (u - v).squaredNorm() - params.C * inv2l * w.squaredNorm();
}

double w_bound(const SystemParams& params, const Vec& v, const Vec& acc, double a) {
  detail::require_nonnegative(a, "a");
  const double lam = params.lambda;
  const double gam = params.gamma;
  return (params.beta + 1.0 / lam) * acc.norm() +
         (params.beta * lam * gam + (2.0 * a + 1.0) * gam - params.C) / lam * v.norm();
}

double HSubgradient::norm() const {
  return std::sqrt(du.squaredNorm() + dv.squaredNorm() + dw.squaredNorm());
}

HSubgradient subgradient_element(const Objective& obj, const SystemParams& params, const Vec& x, const Vec& v,
                                 const Vec& acc, double a) {
  check_dims(obj, x, v, acc);
  const double lam = params.lambda;
  const double gam = params.gamma;
  const Vec z = acc + gam * v + x;
  HSubgradient w;
  w.du = obj.g->gradient(z) - obj.g->gradient(x) - (a * gam / lam) * v;
  w.dv = -(acc + (1.0 - a) * gam * v) / lam;
  w.dw = -(params.C / lam) * v;
  return w;
}

double h_criticality_distance(const Objective& obj, const SystemParams& params, const Vec& u, const Vec& v,
                              const Vec& w) {
  check_dims(obj, u, v, w);
  const Vec diff = (u - v) / params.lambda;
  const double first = obj.f->subdifferential_distance(u, obj.g->gradient(u) + diff);
  if (first == kInfinity) return kInfinity;
  const double third = std::abs(params.C) / params.lambda * w.norm();
  return std::sqrt(first * first + diff.squaredNorm() + third * third);
}

EnergyTrace monitor(const Objective& obj, const SystemParams& params, const Trajectory& traj) {
  detail::require(traj.size() > 0, "monitor: empty trajectory");
  const double lam = params.lambda;
  const double gam = params.gamma;
  const double a = 1.0 - params.c;

  EnergyTrace trace;
  const std::size_t n = traj.size();
  trace.times = traj.times;
  trace.energy.reserve(n);
  trace.fg_shifted.reserve(n);
  trace.h_value.reserve(n);
  trace.w_bound.reserve(n);
  trace.residual.reserve(n);
  trace.dissipation.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec& x = traj.xs[i];
    const Vec& v = traj.vs[i];
    const Vec z = prox_grad_map(obj, lam, x);
    const Vec acc = z - gam * v - x;
    const double fg = obj.value(z);
    const double e = fg + (acc + params.c * gam * v).squaredNorm() / (2.0 * lam) -
                     params.C * v.squaredNorm() / (2.0 * lam);
    trace.energy.push_back(e);
    trace.fg_shifted.push_back(fg);
    trace.h_value.push_back(h_value(obj, params, z, a * gam * v + x, v));
    trace.w_bound.push_back(w_bound(params, v, acc, a));
    trace.residual.push_back((x - z).norm() / lam);
    trace.dissipation.push_back(params.A * v.squaredNorm() + params.B * acc.squaredNorm());
  }
  return trace;
}

std::vector<MonotoneViolation> check_monotone(const EnergyTrace& trace, double tol) {
  detail::require(trace.size() > 0, "check_monotone: empty trace");
  detail::require_nonnegative(tol, "tol");
  std::vector<MonotoneViolation> out;
  const std::size_t n = trace.size();

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double delta = trace.energy[i + 1] - trace.energy[i];
    if (delta > tol) out.push_back({i + 1, delta, MonotoneViolation::Kind::step});
  }

  // With D_j = E_j - integral_0^{t_j} dissipation, the pairwise bound is
  // D_j - max_{i<j} D_i <= tol.
  double integral = 0.0;
  double best = trace.energy[0];
  for (std::size_t j = 1; j < n; ++j) {
    const double dt = trace.times[j] - trace.times[j - 1];
    integral += 0.5 * dt * (trace.dissipation[j] + trace.dissipation[j - 1]);
    const double d = trace.energy[j] - integral;
    if (d - best > tol) out.push_back({j, d - best, MonotoneViolation::Kind::integrated});
    best = std::max(best, d);
  }
  return out;
}

std::vector<std::size_t> check_dissipation_rate(const EnergyTrace& trace, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const double dt = trace.times[i + 1] - trace.times[i];
    const double rate = (trace.energy[i + 1] - trace.energy[i]) / dt;
    const double mid = 0.5 * (trace.dissipation[i] + trace.dissipation[i + 1]);
    if (rate > mid + tol) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> check_w_bound(const Objective& obj, const SystemParams& params, const Trajectory& traj,
                                       double a) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec& x = traj.xs[i];
    const Vec& v = traj.vs[i];
    const Vec acc = acceleration(obj, params, x, v);
    const double actual = subgradient_element(obj, params, x, v, acc, a).norm();
    const double bound = w_bound(params, v, acc, a);
    if (actual > bound * (1.0 + 1e-12) + 1e-300) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> check_envelope(const SystemParams& params, const Trajectory& traj) {
  const EnvelopeConstants env = params.envelope ? *params.envelope : rate_envelope_constants(params);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double nv = traj.vs[i].norm();
    const double na = traj.accs[i].norm();
    const double lhs = params.A * nv * nv + params.B * na * na;
    const double rhs = env.m * (params.s * na + params.p * nv) * (nv + na);
    if (lhs > rhs + 1e-12 * std::abs(rhs)) out.push_back(i);
  }
  return out;
}

}  // namespace proxflow
