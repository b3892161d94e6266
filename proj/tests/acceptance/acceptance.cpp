// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "proxflow/discrete.hpp"
#include "proxflow/dynamics.hpp"
#include "proxflow/lyapunov.hpp"
#include "proxflow/params.hpp"
#include "proxflow/problems.hpp"
#include "proxflow/rates.hpp"

using namespace proxflow;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Recorder {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      if (!failed_.empty()) failed_ += "; ";
      failed_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  Outcome done() {
    out_.detail = out_.pass ? notes_ : failed_ + (notes_.empty() ? "" : " [" + notes_ + "]");
    return out_;
  }

 private:
  Outcome out_;
  std::string failed_, notes_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ProblemSpec zero_quad_spec() {
  ProblemSpec s;
  s.name = "zero_quad";
  s.Q = Mat::Identity(2, 2);
  s.b = vec({1.0, -1.0});
  return s;
}

ProblemSpec lasso_spec() {
  ProblemSpec s;
  s.name = "lasso";
  s.M = Mat::Ones(1, 1);
  s.y = vec({1.0});
  s.mu = 0.5;
  return s;
}

ProblemSpec box_spec() {
  ProblemSpec s;
  s.name = "box_quad";
  s.Q = Mat::Identity(2, 2);
  s.b = vec({2.0, -0.3});
  s.lower = vec({-1.0, -1.0});
  s.upper = vec({1.0, 1.0});
  return s;
}

ProblemSpec cos_spec() {
  ProblemSpec s;
  s.name = "cos_quad";
  s.dim = 1;
  return s;
}

double bisect(const std::function<double(double)>& fn, double lo, double hi) {
  const double flo = fn(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((fn(mid) < 0) == (flo < 0)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double cos_critical() {
  return bisect([](double x) { return x - 2.0 * std::sin(x); }, 1.0, 3.0);
}

double grid_argmin(const std::function<double(double)>& phi, double lo, double hi, double step) {
  double best = lo, best_val = phi(lo);
  const auto n = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 1; i <= n; ++i) {
    const double y = lo + static_cast<double>(i) * step;
    const double v = phi(y);
    if (v < best_val) {
      best_val = v;
      best = y;
    }
  }
  return best;
}

struct Run {
  std::string name;
  Objective obj;
  SystemParams params;
  Trajectory traj;
};

// Feasible runs on every coercive catalog problem, t_end = 100, h = 1e-3.
const std::vector<Run>& feasible_runs() {
  static const std::vector<Run> runs = [] {
    std::vector<Run> out;
    auto add = [&](const std::string& name, const ProblemSpec& spec, double g, double l, const Vec& u0) {
      const Objective obj = make_problem(spec);
      const SystemParams p = derive_params(g, l, obj.beta());
      if (!p.rho_feasible) throw std::runtime_error(name + " parameters are not feasible");
      out.push_back({name, obj, p, integrate(obj, p, u0, Vec::Zero(u0.size()), 100.0, 1e-3)});
    };
    add("zero_quad", zero_quad_spec(), 0.1695, 0.007185, vec({0.0, 0.0}));
    add("lasso", lasso_spec(), 0.1695, 0.007185, vec({0.0}));
    add("box_quad", box_spec(), 0.1695, 0.007185, vec({0.0, 0.0}));
    add("cos_quad", cos_spec(), 0.0947, 0.001386, vec({3.0}));
    add("cos_quad(1,0.005)", cos_spec(), 1.0, 0.005, vec({3.0}));
    return out;
  }();
  return runs;
}

Outcome criterion1() {
  Recorder r;
  r.expect(std::abs(lipschitz_l1(2.0, 0.1) - 3.0) <= 1e-12, "L1(2, 0.1)");
  r.expect(std::abs(lipschitz_l2(2.0, 0.1) - std::sqrt(9.2)) <= 1e-12, "L2(2, 0.1)");
  r.expect(std::abs(lipschitz_l1(2.0, 1.0) - std::sqrt(20.0)) <= 1e-12, "L1(2, 1)");
  r.expect(std::abs(lipschitz_l2(2.0, 1.0) - std::sqrt(15.0)) <= 1e-12, "L2(2, 1)");
  return r.done();
}

Outcome criterion2() {
  Recorder r;
  std::vector<double> gammas, lambdas;
  for (int i = 1; i <= 50; ++i) gammas.push_back(0.05 * i);
  for (int i = 0; i < 50; ++i) lambdas.push_back(std::pow(10.0, -4.0 + 4.0 * i / 49.0));
  const std::size_t zero = feasible_region(0.0, gammas, lambdas).size();
  r.expect(zero == 2500, "beta = 0 feasible at " + std::to_string(zero) + "/2500");
  int c_bad = 0, cor_bad = 0;
  for (double beta : {0.0, 1.0, 3.0})
    for (double g : gammas)
      for (double l : lambdas) {
        const SystemParams p = derive_params(g, l, beta);
        if (g * l * beta <= 1.0 / 3.0 && !(p.C < 0.0)) ++c_bad;
        if (corollary_check(g, l, beta) && !p.rho_feasible) ++cor_bad;
      }
  r.expect(c_bad == 0, std::to_string(c_bad) + " points with C >= 0");
  r.expect(cor_bad == 0, std::to_string(cor_bad) + " corollary counterexamples");
  return r.done();
}

Outcome criterion3() {
  Recorder r;
  for (const Run& run : feasible_runs()) {
    const EnergyTrace e = monitor(run.obj, run.params, run.traj);
    const double tol = 1e-6 * (1.0 + std::abs(e.energy.front()));
    std::size_t steps = 0;
    for (const auto& v : check_monotone(e, tol))
      if (v.kind == MonotoneViolation::Kind::step) ++steps;
    r.expect(steps == 0, run.name + ": " + std::to_string(steps) + " increases");
  }
  return r.done();
}

Outcome criterion4() {
  Recorder r;
  for (const Run& run : feasible_runs()) {
    const double v = run.traj.vs.back().norm(), a = run.traj.accs.back().norm();
    r.expect(v <= 1e-4 && a <= 1e-4, run.name + " |x'| = " + fmt(v) + ", |x''| = " + fmt(a));
  }
  return r.done();
}

Outcome criterion5() {
  Recorder r;
  const double xs = cos_critical();
  struct Case {
    std::string name;
    ProblemSpec spec;
    double g, l;
    Vec u0;
  };
  const std::vector<Case> cases{{"zero_quad", zero_quad_spec(), 0.1695, 0.007185, vec({0.0, 0.0})},
                                {"lasso", lasso_spec(), 0.1695, 0.007185, vec({0.0})},
                                {"box_quad", box_spec(), 0.1695, 0.007185, vec({0.0, 0.0})},
                                {"cos_quad", cos_spec(), 0.0947, 0.001386, vec({3.0})}};
  for (const Case& c : cases) {
    const Objective obj = make_problem(c.spec);
    const SystemParams p = derive_params(c.g, c.l, obj.beta());
    const Trajectory t = integrate(obj, p, c.u0, Vec::Zero(c.u0.size()), 600.0, 1e-2);
    const Vec& x = t.xs.back();
    const double res = prox_grad_residual(obj, p.lambda, x);
    r.expect(res <= 1e-6, c.name + " residual " + fmt(res));
    if (c.name == "lasso") r.expect(std::abs(x[0] - 0.5) <= 1e-5, "lasso limit " + fmt(x[0]));
    if (c.name == "cos_quad") r.expect(std::abs(x[0] - xs) <= 1e-3, "cos_quad limit " + fmt(x[0]));
  }
  r.note("t_end = 600, h = 1e-2");
  return r.done();
}

Outcome criterion6() {
  Recorder r;
  {
    ProblemSpec s;
    s.name = "zero_quad";
    s.Q = Mat::Identity(1, 1);
    s.b = Vec::Zero(1);
    const Objective obj = make_problem(s);
    const SystemParams p = derive_params(1.0, 0.25, obj.beta());
    for (auto [u0, v0] : {std::pair{1.0, 0.0}, std::pair{-2.0, 1.5}}) {
      const Trajectory t = integrate(obj, p, vec({u0}), vec({v0}), 5.0, 1e-3);
      double err = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double s_ = t.times[i];
        err = std::max(err, std::abs(t.xs[i][0] - (u0 + (v0 + 0.5 * u0) * s_) * std::exp(-0.5 * s_)));
      }
      r.expect(err <= 1e-6, "critically damped error " + fmt(err));
    }
  }
  {
    ProblemSpec s;
    s.name = "zero_quad";
    Mat q = Mat::Zero(2, 2);
    q.diagonal() << 25.0, 4.0;
    s.Q = q;
    s.b = vec({1.0, 2.0});
    const Objective obj = make_problem(s);
    const SystemParams p = derive_params(0.5, 1.0, obj.beta());
    auto final_x = [&](double h) { return integrate(obj, p, vec({1.0, -1.0}), vec({0.5, 0.0}), 2.0, h).xs.back(); };
    const Vec ref = final_x(1e-4);
    const double e1 = (final_x(1e-2) - ref).norm(), e2 = (final_x(5e-3) - ref).norm(), e3 = (final_x(2.5e-3) - ref).norm();
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    r.expect(o1 >= 3.5 && o2 >= 3.5, "observed orders " + fmt(o1) + ", " + fmt(o2));
    r.note("orders " + fmt(o1) + ", " + fmt(o2));
  }
  return r.done();
}

Outcome criterion7() {
  Recorder r;
  for (const Run& run : feasible_runs()) {
    const auto third = third_derivative_check(run.traj, run.params);
    r.expect(third.violations() == 0, run.name + " third derivative: " + std::to_string(third.violations()));
    const auto w = check_w_bound(run.obj, run.params, run.traj, 1.0 - run.params.c);
    r.expect(w.empty(), run.name + " subgradient bound: " + std::to_string(w.size()));
    const auto env = check_envelope(run.params, run.traj);
    r.expect(env.empty(), run.name + " envelope: " + std::to_string(env.size()));
    const SigmaTrace sigma = sigma_estimate(run.traj);
    const SigmaDominance dom = check_sigma_dominance(run.traj, sigma, run.traj.xs.back());
    r.expect(dom.ok(), run.name + " sigma dominance: " + std::to_string(dom.position_violations.size()) + "/" +
                           std::to_string(dom.velocity_violations.size()));
  }
  return r.done();
}

Trajectory scalar_trajectory(const std::vector<double>& times, const std::function<double(double)>& d,
                             const std::function<double(double)>& dd, const std::function<double(double)>& ddd) {
  Trajectory t;
  for (double s : times) {
    t.times.push_back(s);
    t.xs.push_back(vec({d(s)}));
    t.vs.push_back(vec({dd(s)}));
    t.accs.push_back(vec({ddd(s)}));
  }
  return t;
}

Outcome criterion8() {
  Recorder r;
  {
    std::vector<double> times;
    for (int i = 0; i <= 1000; ++i) times.push_back(0.01 * i);
    const Trajectory t = scalar_trajectory(
        times, [](double s) { return 3 * std::exp(-2 * s); }, [](double s) { return -6 * std::exp(-2 * s); },
        [](double s) { return 12 * std::exp(-2 * s); });
    const ExponentialFit f = fit_exponential(t, vec({0.0}), 0.0);
    r.expect(std::abs(f.a1 - 3.0) <= 1e-10 && std::abs(f.a2 - 2.0) <= 1e-10,
             "synthetic exponential a1 = " + fmt(f.a1) + ", a2 = " + fmt(f.a2));
  }
  double worst_theta = 0.0;
  for (double theta : {0.55, 0.6, 2.0 / 3.0, 0.75, 0.9}) {
    const double q = (1.0 - theta) / (2.0 * theta - 1.0);
    std::vector<double> times{0.0};
    for (int i = 0; i < 4000; ++i) times.push_back(1e-3 * std::pow(1e11, i / 3999.0));
    const Trajectory t = scalar_trajectory(
        times, [=](double s) { return std::pow(s + 1, -q); }, [=](double s) { return -q * std::pow(s + 1, -q - 1); },
        [=](double s) { return q * (q + 1) * std::pow(s + 1, -q - 2); });
    const RateReport rep = classify_rate(t, vec({0.0}));
    const bool ok = rep.regime == Regime::polynomial && rep.theta && std::abs(*rep.theta - theta) <= 0.01;
    r.expect(ok, "theta " + fmt(theta) + " recovered as " + to_string(rep.regime) +
                     (rep.theta ? " " + fmt(*rep.theta) : std::string()));
    if (rep.theta) worst_theta = std::max(worst_theta, std::abs(*rep.theta - theta));
  }
  r.note("worst theta error " + fmt(worst_theta));
  {
    // x'' + x' + 0.16 (x - b) = 0 decays at the slow root 0.2
    const Objective obj = make_problem(zero_quad_spec());
    const SystemParams p = derive_params(1.0, 0.16, obj.beta());
    const Trajectory t = integrate(obj, p, vec({0.0, 0.0}), vec({0.0, 0.0}), 100.0, 1e-3);
    const RateReport rep = classify_rate(t, vec({1.0, -1.0}));
    const bool ok = rep.regime == Regime::exponential && rep.a2 && std::abs(*rep.a2 - 0.2) <= 0.02;
    r.expect(ok, "zero_quad " + to_string(rep.regime) + (rep.a2 ? " a2 = " + fmt(*rep.a2) : std::string()));
    if (rep.a2) r.note("zero_quad a2 " + fmt(*rep.a2));
  }
  return r.done();
}

Outcome criterion9() {
  Recorder r;
  const double xs = cos_critical();
  const Objective cq = make_problem(cos_spec());
  const Objective l = make_problem(lasso_spec());
  const Objective box = make_problem(box_spec());
  const Objective zq = make_problem(zero_quad_spec());
  struct Fixed {
    std::string name;
    const Objective* obj;
    Vec x;
  };
  for (const Fixed& f : {Fixed{"cos_quad", &cq, vec({xs})}, Fixed{"lasso", &l, vec({0.5})},
                         Fixed{"box_quad", &box, vec({1.0, -0.3})}, Fixed{"zero_quad", &zq, vec({1.0, -1.0})}}) {
    const double d1 = (inertial_step_unit(*f.obj, 0.1, 2.0, f.x, f.x) - f.x).norm();
    const double d2 = (inertial_step_general(*f.obj, 0.1, 2.0, 0.3, f.x, f.x) - f.x).norm();
    // the bisection root is itself rounded, so cos_quad is exact up to its last bits
    const double tol = f.name == "cos_quad" ? 1e-15 : 0.0;
    r.expect(d1 <= tol && d2 <= tol, f.name + " fixed point moved by " + fmt(std::max(d1, d2)));
  }
  const IterateHistory h = run_inertial(l, 0.5, constant_gamma(2.0), vec({0.0}), vec({0.0}), 500, 1e-8);
  r.expect(h.converged && h.residuals.back() <= 1e-8, "lasso residual " + fmt(h.residuals.back()));
  r.note("lasso in " + std::to_string(h.iterations) + " iterations");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(0.05, 3.0), u(-2.0, 2.0);
  ProblemSpec ls = lasso_spec();
  ls.M = Mat::Identity(2, 2);
  ls.y = vec({1.0, -1.0});
  ls.mu = 0.4;
  const std::vector<Objective> objs{make_problem(ls), box, zq, make_problem([] {
                                      ProblemSpec s = cos_spec();
                                      s.dim = 2;
                                      s.mu = 0.2;
                                      return s;
                                    }())};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Objective& obj = objs[i % objs.size()];
    const double lam = pos(rng), gam = pos(rng);
    const Vec xk = vec({u(rng), u(rng)}), xkm1 = vec({u(rng), u(rng)});
    const Vec a = inertial_step_general(obj, lam, gam, 1.0, xk, xkm1);
    const Vec b = inertial_step_unit(obj, lam, gam, xk, xkm1);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  r.expect(worst <= 1e-14, "unit vs general step " + fmt(worst));
  r.note("unit vs general " + fmt(worst));
  return r.done();
}

Outcome criterion10() {
  Recorder r;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0), lam_d(0.1, 2.0), mu_d(0.1, 1.0);
  double worst_l1 = 0.0, worst_box = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lam = lam_d(rng), mu = mu_d(rng);
    ProblemSpec ls = lasso_spec();
    ls.mu = mu;
    const Objective l = make_problem(ls);
    const Vec x = vec({u(rng)});
    const double p = l.f->prox(lam, x)[0];
    const double g =
        grid_argmin([&](double y) { return mu * std::abs(y) + (y - x[0]) * (y - x[0]) / (2 * lam); }, -4, 4, 1e-4);
    worst_l1 = std::max(worst_l1, std::abs(p - g));

    const Objective b = make_problem(box_spec());
    const Vec z = vec({u(rng), u(rng)});
    const Vec pb = b.f->prox(lam, z);
    for (int k = 0; k < 2; ++k) {
      const double gb = grid_argmin([&](double y) { return (y - z[k]) * (y - z[k]); }, -1.0, 1.0, 1e-4);
      worst_box = std::max(worst_box, std::abs(pb[k] - gb));
    }
  }
  r.expect(worst_l1 <= 2e-4, "l1 prox off by " + fmt(worst_l1));
  r.expect(worst_box <= 2e-4, "box prox off by " + fmt(worst_box));
  r.note("worst " + fmt(std::max(worst_l1, worst_box)));
  return r.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"Lipschitz constants", criterion1},      {"feasibility logic", criterion2},
      {"Lyapunov decrease", criterion3},    {"vanishing derivatives", criterion4},
      {"critical-point convergence", criterion5}, {"integrator accuracy", criterion6},
      {"bound suite", criterion7},          {"rate regime recovery", criterion8},
      {"discrete algorithm", criterion9},   {"prox oracle equivalence", criterion10}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %zu %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
