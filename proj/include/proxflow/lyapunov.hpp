#pragma once

#include <cstddef>
#include <vector>

#include "proxflow/dynamics.hpp"

namespace proxflow {

// A point handed to the energy lies outside dom f.
class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Lyapunov energy of a state (x, x', x''):
///   E = (f+g)(x'' + gamma x' + x) + |x'' + c gamma x'|^2 / (2 lambda) - C |x'|^2 / (2 lambda).
/// Along feasible trajectories dE/dt <= A|x'|^2 + B|x''|^2 <= 0.
/// Throws DomainError if x'' + gamma x' + x is outside dom f.
double energy_at(const Objective& obj, const SystemParams& params, const Vec& x, const Vec& v, const Vec& acc);

/// Same quantity assembled from the expanded quadratic form
///   |x''|^2/(2 lambda) + (c^2 gamma^2 - C)/(2 lambda) |x'|^2 + (c gamma / lambda) <x'', x'> + (f+g)(z).
double energy_expanded(const Objective& obj, const SystemParams& params, const Vec& x, const Vec& v,
                       const Vec& acc);

/// H(u, v, w) = (f+g)(u) + |u - v|^2 / (2 lambda) - C |w|^2 / (2 lambda).
/// Returns kInfinity when u is outside dom f.
double h_value(const Objective& obj, const SystemParams& params, const Vec& u, const Vec& v, const Vec& w);

/// (beta + 1/lambda) |x''| + ((beta lambda gamma + (2a + 1) gamma - C) / lambda) |x'|
double w_bound(const SystemParams& params, const Vec& v, const Vec& acc, double a);

/// Explicit element of the subdifferential of H at
/// (x'' + gamma x' + x, a gamma x' + x, x').
struct HSubgradient {
  Vec du;
  Vec dv;
  Vec dw;
  double norm() const;
};

HSubgradient subgradient_element(const Objective& obj, const SystemParams& params, const Vec& x, const Vec& v,
                                 const Vec& acc, double a);

/// dist(0, dH(u, v, w)) from the product form
///   dH = (d(f+g)(u) + (u - v)/lambda) x {-(u - v)/lambda} x {-C w / lambda}.
double h_criticality_distance(const Objective& obj, const SystemParams& params, const Vec& u, const Vec& v,
                              const Vec& w);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;       // E(t)
  std::vector<double> fg_shifted;   // (f+g)(x'' + gamma x' + x)
  std::vector<double> h_value;      // H at (z, (1-c) gamma x' + x, x')
  std::vector<double> w_bound;      // subgradient bound with a = 1 - c
  std::vector<double> residual;     // prox-gradient residual at x(t)
  std::vector<double> dissipation;  // A |x'|^2 + B |x''|^2

  std::size_t size() const { return times.size(); }
};

// Accelerations are recomputed from the system identity rather than read
// from traj.accs. Parameters are used verbatim, feasible or not.
EnergyTrace monitor(const Objective& obj, const SystemParams& params, const Trajectory& traj);

struct MonotoneViolation {
  enum class Kind { step, integrated };
  std::size_t index = 0;  // sample index j where the excess is detected
  double delta = 0.0;     // excess over zero (step) or over the dissipation integral
  Kind kind = Kind::step;
};

// Reports E[i+1] - E[i] > tol, and any pair i < j with
//   E(t_j) - E(t_i) > trapz(dissipation, t_i, t_j) + tol.
std::vector<MonotoneViolation> check_monotone(const EnergyTrace& trace, double tol);

// Samples i where (E[i+1] - E[i]) / dt exceeds the averaged dissipation
// over [t_i, t_{i+1}] by more than tol.
std::vector<std::size_t> check_dissipation_rate(const EnergyTrace& trace, double tol);

// Samples where the subgradient element exceeds w_bound (relative slack 1e-12).
std::vector<std::size_t> check_w_bound(const Objective& obj, const SystemParams& params, const Trajectory& traj,
                                       double a);

// Samples where A|x'|^2 + B|x''|^2 > m (s|x''| + p|x'|)(|x'| + |x''|)
// (relative slack 1e-12). Requires feasible params.
std::vector<std::size_t> check_envelope(const SystemParams& params, const Trajectory& traj);

}  // namespace proxflow
