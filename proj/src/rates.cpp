#include "proxflow/rates.hpp"

#include <algorithm>
#include <cmath>

namespace proxflow {
namespace {

constexpr double kMinDistance = 1e-14;
constexpr double kMinRSquared = 0.9;
constexpr double kFiniteTimeFloor = 1e-12;
constexpr std::size_t kMinFitSamples = 5;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  detail::require(sxx > 0.0, "fit needs at least two distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 0.0;  // constant data carries no decay information
  } else {
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssr += r * r;
    }
    fit.r_squared = 1.0 - ssr / syy;
  }
  return fit;
}

std::vector<double> distances(const Trajectory& traj, const Vec& x_limit) {
  detail::require(x_limit.size() == traj.dim(), "x_limit dimension does not match trajectory");
  std::vector<double> d(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) d[i] = (traj.xs[i] - x_limit).norm();
  return d;
}

// (t, log d) pairs on the window with d above the resolution floor.
void window_samples(const Trajectory& traj, const std::vector<double>& d, double t0, double t1, bool log_time,
                    std::vector<double>& xs, std::vector<double>& ys) {
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t < t0 || t > t1 || d[i] <= kMinDistance) continue;
    if (log_time && t <= 0.0) continue;
    xs.push_back(log_time ? std::log(t) : t);
    ys.push_back(std::log(d[i]));
  }
  if (xs.size() < kMinFitSamples)
    throw InvalidArgument("rate fit needs at least 5 usable samples in the window, got " +
                          std::to_string(xs.size()));
}

double speed(const Trajectory& traj, std::size_t i) { return traj.vs[i].norm() + traj.accs[i].norm(); }

}  // namespace

SigmaTrace sigma_estimate(const Trajectory& traj) {
  const std::size_t n = traj.size();
  detail::require(n >= 2, "sigma_estimate needs at least 2 samples");
  SigmaTrace out;
  out.times = traj.times;
  out.sigma.assign(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double dt = traj.times[i + 1] - traj.times[i];
    out.sigma[i] = out.sigma[i + 1] + 0.5 * dt * (speed(traj, i) + speed(traj, i + 1));
  }
  out.approximate = speed(traj, n - 1) > 1e-8 * speed(traj, 0);
  return out;
}

SigmaDominance check_sigma_dominance(const Trajectory& traj, const SigmaTrace& sigma, const Vec& x_limit) {
  const std::size_t n = traj.size();
  detail::require(sigma.sigma.size() == n, "sigma trace does not match trajectory");
  const std::vector<double> d = distances(traj, x_limit);

  // Trapezoid error per panel is at most K dt^2 / 4 with K a Lipschitz
  // constant of |x'| + |x''|; |d/dt (x', x'')| <= L1 |(x', x'')| bounds it.
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double vn = traj.vs[i].norm();
    const double an = traj.accs[i].norm();
    lip = std::max(lip, an + traj.params.L1 * std::hypot(vn, an));
  }
  lip *= 2.0;

  SigmaDominance out;
  const double end_distance = d[n - 1];
  const double end_speed = traj.vs[n - 1].norm();
  double tail_tol = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n) {
      const double dt = traj.times[i + 1] - traj.times[i];
      tail_tol += 0.25 * lip * dt * dt;
    }
    const double slack = tail_tol + 1e-14 * (1.0 + sigma.sigma[0]);
    if (d[i] > end_distance + sigma.sigma[i] + slack) out.position_violations.push_back(i);
    if (traj.vs[i].norm() > end_speed + sigma.sigma[i] + slack) out.velocity_violations.push_back(i);
  }
  std::reverse(out.position_violations.begin(), out.position_violations.end());
  std::reverse(out.velocity_violations.begin(), out.velocity_violations.end());
  return out;
}

ExponentialFit fit_exponential(const Trajectory& traj, const Vec& x_limit, double t0, double t1) {
  const std::vector<double> d = distances(traj, x_limit);
  std::vector<double> xs, ys;
  window_samples(traj, d, t0, t1, false, xs, ys);
  const LineFit line = least_squares_line(xs, ys);
  return {std::exp(line.intercept), -line.slope, line.r_squared, xs.size()};
}

double theta_from_decay_exponent(double q) { return (1.0 + q) / (1.0 + 2.0 * q); }

double decay_exponent_from_theta(double theta) { return (1.0 - theta) / (2.0 * theta - 1.0); }

PolynomialFit fit_polynomial(const Trajectory& traj, const Vec& x_limit, double t0, double t1) {
  const std::vector<double> d = distances(traj, x_limit);
  std::vector<double> xs, ys;
  window_samples(traj, d, t0, t1, true, xs, ys);
  const LineFit line = least_squares_line(xs, ys);
  const double q = -line.slope;
  if (!(q > 0.0)) throw InvalidArgument("polynomial fit rejected: distance is not decaying");
  PolynomialFit fit;
  fit.q = q;
  fit.theta = theta_from_decay_exponent(q);
  fit.a3 = std::exp(-line.intercept / q);
  fit.a4 = fit.a3 * t0;
  fit.r_squared = line.r_squared;
  fit.samples = xs.size();
  return fit;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::finite_time: return "finite_time";
    case Regime::exponential: return "exponential";
    case Regime::polynomial: return "polynomial";
    case Regime::undetermined: return "undetermined";
  }
  return "undetermined";
}

RateReport classify_rate(const Trajectory& traj, const std::optional<Vec>& x_limit, const ClassifyOptions& options) {
  const std::size_t n = traj.size();
  detail::require(n >= 2, "classify_rate needs at least 2 samples");
  const double final_speed = speed(traj, n - 1);
  if (!(final_speed <= options.converged_tol))
    throw InvalidArgument("trajectory has not converged: |x'|+|x''| at the last sample is " +
                          std::to_string(final_speed));

  RateReport report;
  report.x_limit = x_limit ? *x_limit : traj.xs.back();
  const double t_end = traj.times.back();
  report.t1 = x_limit ? t_end : 0.9 * t_end;

  if (options.t0) {
    report.t0 = *options.t0;
  } else {
    const double threshold = 1e-2 * speed(traj, 0);
    report.t0 = traj.times.front();
    for (std::size_t i = 0; i < n; ++i) {
      if (speed(traj, i) <= threshold) {
        report.t0 = traj.times[i];
        break;
      }
    }
  }

  const std::vector<double> d = distances(traj, report.x_limit);
  const double scale = *std::max_element(d.begin(), d.end());
  if (scale == 0.0) {
    report.regime = Regime::finite_time;
    return report;
  }

  // Earliest sample after which the distance stays below resolution.
  const double floor = kFiniteTimeFloor * scale;
  std::size_t hit = n;
  while (hit > 0 && d[hit - 1] <= floor) --hit;
  // Against the last sample the distance always vanishes at the end, so an
  // automatic limit only counts arrivals inside the fit window.
  const bool arrived = hit < n - 1 && (x_limit || traj.times[hit] <= report.t1);
  if (arrived) {
    // Distances drop below resolution strictly before the end. Call it
    // finite time unless an exponential trend fitted before the drop
    // already predicts values near the floor.
    const double t_hit = traj.times[hit];
    bool finite = true;
    try {
      const ExponentialFit pre = fit_exponential(traj, report.x_limit, report.t0, std::nextafter(t_hit, -1.0));
      finite = pre.a2 <= 0.0 || pre.a1 * std::exp(-pre.a2 * t_hit) > 1e3 * floor;
    } catch (const InvalidArgument&) {
      finite = true;
    }
    if (finite) {
      report.regime = Regime::finite_time;
      return report;
    }
    report.t1 = std::min(report.t1, t_hit);
  }

  std::optional<ExponentialFit> exp_fit;
  std::optional<PolynomialFit> poly_fit;
  try {
    exp_fit = fit_exponential(traj, report.x_limit, report.t0, report.t1);
    if (exp_fit->a2 > 0.0) report.r2_exponential = exp_fit->r_squared;
  } catch (const InvalidArgument&) {
  }
  try {
    poly_fit = fit_polynomial(traj, report.x_limit, report.t0, report.t1);
    report.r2_polynomial = poly_fit->r_squared;
  } catch (const InvalidArgument&) {
  }

  const double best = std::max(report.r2_exponential, report.r2_polynomial);
  if (!(best >= kMinRSquared)) {
    report.regime = Regime::undetermined;
  } else if (report.r2_exponential >= report.r2_polynomial) {
    report.regime = Regime::exponential;
    report.theta = 0.5;
    report.a1 = exp_fit->a1;
    report.a2 = exp_fit->a2;
  } else {
    report.regime = Regime::polynomial;
    report.theta = poly_fit->theta;
    report.a3 = poly_fit->a3;
    report.a4 = poly_fit->a4;
  }
  return report;
}

SigmaOdeReport sigma_ode_check(const SigmaTrace& sigma, double theta, double alpha, std::optional<double> tolerance) {
  detail::require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
  detail::require_positive(alpha, "alpha");
  const std::size_t n = sigma.sigma.size();
  detail::require(n >= 3, "sigma_ode_check needs at least 3 samples");
  const double power = theta / (1.0 - theta);

  SigmaOdeReport report;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s = sigma.sigma[i];
    detail::require(s > 0.0, "sigma must be strictly positive on the checked window");
    const double span = sigma.times[i + 1] - sigma.times[i - 1];
    SigmaOdeSample sample;
    sample.t = sigma.times[i];
    sample.rate = (sigma.sigma[i + 1] - sigma.sigma[i - 1]) / span;
    sample.bound = -alpha * std::pow(s, power);
    sample.tolerance = tolerance ? *tolerance
                                 : std::abs(sigma.sigma[i + 1] - 2.0 * sigma.sigma[i] + sigma.sigma[i - 1]) /
                                       (0.5 * span);
    sample.ok = sample.rate <= sample.bound + sample.tolerance;
    if (!sample.ok) report.violations.push_back(report.samples.size());
    report.samples.push_back(sample);
  }
  return report;
}

double sigma_ode_alpha(const SystemParams& params, double K, double theta) {
  detail::require_positive(K, "K");
  detail::require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
  const EnvelopeConstants env = params.envelope ? *params.envelope : rate_envelope_constants(params);
  const double M = -env.m / K;
  const double N = std::max(params.s, params.p);
  return std::pow(M, theta / (1.0 - theta)) / (K * N);
}

}  // namespace proxflow
