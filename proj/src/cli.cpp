#include "proxflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace proxflow::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

double required_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw InvalidArgument(std::string("config needs a numeric '") + key + "'");
  return j[key].get<double>();
}

Vec parse_vector_text(const std::string& text, const std::string& what) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream ss(cleaned);
  std::vector<double> values;
  std::string token;
  while (ss >> token) {
    char* end = nullptr;
    const double x = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') throw InvalidArgument("cannot parse " + what + ": '" + text + "'");
    values.push_back(x);
  }
  if (values.empty()) throw InvalidArgument(what + " is empty");
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || fs::path(name).is_absolute()) return name;
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory '" + dir + "': " + ec.message());
}

std::string infeasible_warning(const SystemParams& p) {
  std::ostringstream ss;
  ss << "parameters outside the conditions set (A = " << io::format_double(p.A)
     << ", B = " << io::format_double(p.B) << ", C = " << io::format_double(p.C)
     << "); energy decrease is not guaranteed";
  return ss.str();
}

// Problem given as a JSON file path or an inline JSON object.
ProblemSpec load_problem(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  json j;
  if (first != std::string::npos && arg[first] == '{') {
    try {
      j = json::parse(arg);
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("invalid inline problem JSON: ") + e.what());
    }
  } else {
    j = io::read_json_file(arg);
  }
  if (j.contains("problem") && j["problem"].is_object()) j = j["problem"];
  return io::problem_spec_from_json(j);
}

std::vector<double> grid(const std::vector<double>& explicit_values, const std::vector<double>& range,
                         const char* name) {
  if (!explicit_values.empty()) return explicit_values;
  if (range.size() != 3) throw InvalidArgument(std::string("sweep needs --") + name + "s or --" + name + "-range");
  const double lo = range[0], hi = range[1];
  const double count = range[2];
  if (!(count >= 1.0) || count != std::floor(count)) throw InvalidArgument(std::string(name) + " grid count must be a positive integer");
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

void print_params_text(std::ostream& out, const SystemParams& p) {
  auto line = [&](const char* k, double v) { out << k << " = " << io::format_double(v) << '\n'; };
  line("gamma", p.gamma);
  line("lambda", p.lambda);
  line("beta", p.beta);
  line("L1", p.L1);
  line("L2", p.L2);
  line("L", p.L);
  line("A", p.A);
  line("B", p.B);
  line("C", p.C);
  line("c", p.c);
  line("a", p.a_const);
  line("b", p.b_const);
  line("s", p.s);
  line("p", p.p);
  if (p.envelope) {
    line("m", p.envelope->m);
    line("r0", p.envelope->r0);
  } else {
    out << "m = n/a\nr0 = n/a\n";
  }
  out << "rho_feasible = " << (p.rho_feasible ? "true" : "false") << '\n';
  out << "corollary_feasible = " << (p.corollary_feasible ? "true" : "false") << '\n';
}

void print_report_text(std::ostream& out, const RateReport& r) {
  out << "regime = " << to_string(r.regime) << '\n';
  if (r.theta) out << "theta = " << io::format_double(*r.theta) << '\n';
  if (r.a1) out << "a1 = " << io::format_double(*r.a1) << "\na2 = " << io::format_double(*r.a2) << '\n';
  if (r.a3) out << "a3 = " << io::format_double(*r.a3) << "\na4 = " << io::format_double(*r.a4) << '\n';
  out << "r2_exponential = " << io::format_double(r.r2_exponential) << '\n';
  out << "r2_polynomial = " << io::format_double(r.r2_polynomial) << '\n';
  out << "window = [" << io::format_double(r.t0) << ", " << io::format_double(r.t1) << "]\n";
}

struct Globals {
  std::string config;
  std::string out_dir;
  bool json = false;
};

int cmd_run(const Globals& g, std::ostream& out, std::ostream& err) {
  if (g.config.empty()) throw InvalidArgument("run needs --config FILE");
  const ExperimentConfig config = config_from_json(io::read_json_file(g.config));
  const RunResult result = run_experiment(config);
  if (!result.warning.empty()) err << "warning: " << result.warning << '\n';
  write_run_outputs(config, result, g.out_dir);
  if (g.json) {
    out << result.summary.dump(2) << '\n';
  } else {
    out << "final_residual = " << io::format_double(result.summary["final_residual"].get<double>()) << '\n';
    out << "final_velocity_norm = " << io::format_double(result.summary["final_velocity_norm"].get<double>()) << '\n';
    out << "energy_monotone = " << (result.energy_monotone ? "true" : "false") << '\n';
    if (result.rate_report) print_report_text(out, *result.rate_report);
    else out << "rate_report = n/a (" << result.rate_note << ")\n";
  }
  return kOk;
}

struct SweepPoint {
  std::size_t gi = 0, li = 0;
  GridPoint point;
  int status = -1;
  std::string message;
};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  if (!j.contains("problem")) throw InvalidArgument("config needs a 'problem'");
  ExperimentConfig c;
  c.problem = io::problem_spec_from_json(j["problem"]);
  c.gamma = required_number(j, "gamma");
  c.lambda = required_number(j, "lambda");
  c.t_end = required_number(j, "t_end");
  c.h = required_number(j, "h");
  detail::require_positive(c.gamma, "gamma");
  detail::require_positive(c.lambda, "lambda");
  detail::require_positive(c.t_end, "t_end");
  detail::require_positive(c.h, "h");
  if (j.contains("u0")) c.u0 = io::vec_from_json(j["u0"], "u0");
  if (j.contains("v0")) c.v0 = io::vec_from_json(j["v0"], "v0");
  if (j.contains("sample_every")) {
    if (!j["sample_every"].is_number_integer() || j["sample_every"].get<long long>() < 1)
      throw InvalidArgument("'sample_every' must be a positive integer");
    c.sample_every = j["sample_every"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InvalidArgument("'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) throw InvalidArgument("'outputs' must be an array");
    c.outputs.clear();
    for (const auto& o : j["outputs"]) {
      if (!o.is_string()) throw InvalidArgument("'outputs' entries must be strings");
      const auto name = o.get<std::string>();
      if (name != "trajectory" && name != "energy" && name != "rates" && name != "summary")
        throw InvalidArgument("unknown output '" + name + "'");
      c.outputs.insert(name);
    }
  }
  return c;
}

Vec initial_position(const ExperimentConfig& config, int dim) {
  if (config.u0) return *config.u0;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec u(dim);
  for (int i = 0; i < dim; ++i) u[i] = dist(rng);
  return u;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const Objective obj = make_problem(config.problem);
  const int n = obj.dim();
  const SystemParams params = derive_params(config.gamma, config.lambda, obj.beta());
  const Vec u0 = initial_position(config, n);
  const Vec v0 = config.v0 ? *config.v0 : Vec::Zero(n);
  detail::require(u0.size() == n && v0.size() == n, "u0 and v0 must match the problem dimension");

  RunResult r;
  if (!params.rho_feasible) r.warning = infeasible_warning(params);
  r.trajectory = integrate(obj, params, u0, v0, config.t_end, config.h, config.sample_every);
  r.energy = monitor(obj, params, r.trajectory);

  const double e0 = r.energy.energy.front();
  const double tol = 1e-6 * (1.0 + std::abs(e0));
  const auto violations = check_monotone(r.energy, tol);
  r.energy_monotone = std::none_of(violations.begin(), violations.end(),
                                   [](const MonotoneViolation& v) { return v.kind == MonotoneViolation::Kind::step; });
  const bool dissipation_consistent = violations.empty();

  if (config.outputs.count("rates")) {
    try {
      r.rate_report = classify_rate(r.trajectory);
    } catch (const InvalidArgument& e) {
      r.rate_note = e.what();
    }
  } else {
    r.rate_note = "not requested";
  }

  const Vec& x_end = r.trajectory.xs.back();
  json s;
  s["params"] = io::params_to_json(params);
  s["final_time"] = r.trajectory.times.back();
  s["final_residual"] = prox_grad_residual(obj, params.lambda, x_end);
  s["final_velocity_norm"] = r.trajectory.vs.back().norm();
  s["final_acceleration_norm"] = r.trajectory.accs.back().norm();
  s["final_x"] = io::vec_to_json(x_end);
  s["energy_monotone"] = r.energy_monotone;
  s["dissipation_consistent"] = dissipation_consistent;
  s["energy_tolerance"] = tol;
  s["rate_report"] = r.rate_report ? io::rate_report_to_json(*r.rate_report) : json(nullptr);
  if (!r.rate_report) s["rate_note"] = r.rate_note;
  s["warning"] = r.warning.empty() ? json(nullptr) : json(r.warning);
  s["u0"] = io::vec_to_json(u0);
  s["h"] = config.h;
  s["sample_every"] = r.trajectory.sample_every;
  r.summary = std::move(s);
  return r;
}

void write_run_outputs(const ExperimentConfig& config, const RunResult& result, const std::string& out_dir) {
  ensure_dir(out_dir);
  if (config.outputs.count("trajectory")) {
    std::ostringstream ss;
    io::write_trajectory_csv(ss, result.trajectory);
    io::write_text_file(join_path(out_dir, "trajectory.csv"), ss.str());
  }
  if (config.outputs.count("energy")) {
    std::ostringstream ss;
    io::write_energy_csv(ss, result.energy);
    io::write_text_file(join_path(out_dir, "energy.csv"), ss.str());
  }
  if (config.outputs.count("rates") && result.rate_report)
    io::write_text_file(join_path(out_dir, "rates.json"), io::rate_report_to_json(*result.rate_report).dump(2) + "\n");
  // the summary is always written
  io::write_text_file(join_path(out_dir, "summary.json"), result.summary.dump(2) + "\n");
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and analyze the proximal-gradient second-order flow", "proxflow"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--out-dir", g.out_dir, "directory for output files");
  app.add_flag("--json", g.json, "print JSON");

  auto* run = app.add_subcommand("run", "integrate a config, monitor energy, classify rate");

  auto* check = app.add_subcommand("check-params", "derive constants and feasibility for (gamma, lambda, beta)");
  std::optional<double> cp_gamma, cp_lambda, cp_beta;
  check->add_option("--gamma", cp_gamma);
  check->add_option("--lambda", cp_lambda);
  check->add_option("--beta", cp_beta);

  auto* disc = app.add_subcommand("discrete", "run the inertial proximal-gradient recursion");
  std::string d_problem, d_out;
  double d_lambda = 0.0, d_gamma = 0.0, d_tol = 1e-8;
  std::optional<double> d_gamma_inf;
  std::vector<double> d_x0, d_x1;
  std::size_t d_max_iter = 10000;
  disc->add_option("--problem", d_problem, "problem JSON file or inline JSON")->required();
  disc->add_option("--lambda", d_lambda)->required();
  disc->add_option("--gamma", d_gamma, "gamma (gamma_0 when --gamma-inf is set)")->required();
  disc->add_option("--gamma-inf", d_gamma_inf, "use gamma_k = gamma_inf + (gamma - gamma_inf)/k");
  disc->add_option("--x0", d_x0)->required()->expected(1, -1);
  disc->add_option("--x1", d_x1)->expected(1, -1);
  disc->add_option("--max-iter", d_max_iter);
  disc->add_option("--tol", d_tol);
  disc->add_option("--out", d_out, "history CSV");

  auto* rates = app.add_subcommand("rates", "classify the decay regime of a trajectory CSV");
  std::string r_traj, r_xlimit = "auto", r_t0 = "auto";
  double r_conv = 1e-6;
  rates->add_option("--traj", r_traj)->required();
  rates->add_option("--x-limit", r_xlimit, "auto or a comma separated vector");
  rates->add_option("--t0", r_t0, "auto or a time");
  rates->add_option("--converged-tol", r_conv);

  auto* sweep = app.add_subcommand("sweep", "feasibility over a (gamma, lambda) grid, optionally running each point");
  std::optional<double> s_beta;
  std::vector<double> s_gammas, s_lambdas, s_grange, s_lrange;
  bool s_run = false;
  unsigned s_jobs = 1;
  sweep->add_option("--beta", s_beta);
  sweep->add_option("--gammas", s_gammas)->expected(1, -1);
  sweep->add_option("--lambdas", s_lambdas)->expected(1, -1);
  sweep->add_option("--gamma-range", s_grange, "MIN MAX COUNT")->expected(3);
  sweep->add_option("--lambda-range", s_lrange, "MIN MAX COUNT")->expected(3);
  sweep->add_flag("--run", s_run, "run the --config experiment at every feasible point");
  sweep->add_option("--jobs", s_jobs, "concurrent runs")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (run->parsed()) return cmd_run(g, out, err);

    if (check->parsed()) {
      std::optional<ExperimentConfig> config;
      if (!g.config.empty()) config = config_from_json(io::read_json_file(g.config));
      const double gamma = cp_gamma ? *cp_gamma : config ? config->gamma : -1.0;
      const double lambda = cp_lambda ? *cp_lambda : config ? config->lambda : -1.0;
      double beta = -1.0;
      if (cp_beta) beta = *cp_beta;
      else if (config) beta = make_problem(config->problem).beta();
      if (gamma < 0.0 || lambda < 0.0 || beta < 0.0)
        throw InvalidArgument("check-params needs --gamma, --lambda and --beta (or --config)");
      const SystemParams p = derive_params(gamma, lambda, beta);
      if (g.json) out << io::params_to_json(p).dump(2) << '\n';
      else print_params_text(out, p);
      if (!p.rho_feasible) err << "warning: " << infeasible_warning(p) << '\n';
      return kOk;
    }

    if (disc->parsed()) {
      const Objective obj = make_problem(load_problem(d_problem));
      const Vec x0 = to_vec(d_x0);
      const Vec x1 = d_x1.empty() ? x0 : to_vec(d_x1);
      const GammaSchedule schedule = d_gamma_inf ? decaying_gamma(d_gamma, *d_gamma_inf) : constant_gamma(d_gamma);
      const IterateHistory hist = run_inertial(obj, d_lambda, schedule, x0, x1, d_max_iter, d_tol);
      if (!d_out.empty()) {
        const std::string path = join_path(g.out_dir, d_out);
        if (auto parent = fs::path(path).parent_path(); !parent.empty()) ensure_dir(parent.string());
        std::ostringstream ss;
        io::write_history_csv(ss, hist);
        io::write_text_file(path, ss.str());
      }
      if (g.json) {
        json j;
        j["converged"] = hist.converged;
        j["iterations"] = hist.iterations;
        j["final_residual"] = hist.residuals.back();
        j["final_objective"] = hist.objective_values.back();
        j["x"] = io::vec_to_json(hist.xs.back());
        out << j.dump(2) << '\n';
      } else {
        out << "converged = " << (hist.converged ? "true" : "false") << '\n';
        out << "iterations = " << hist.iterations << '\n';
        out << "final_residual = " << io::format_double(hist.residuals.back()) << '\n';
        out << "final_objective = " << io::format_double(hist.objective_values.back()) << '\n';
      }
      if (!hist.converged) err << "warning: tolerance not reached within --max-iter\n";
      return kOk;
    }

    if (rates->parsed()) {
      std::ifstream in(r_traj);
      if (!in) throw InvalidArgument("cannot open '" + r_traj + "'");
      const Trajectory traj = io::read_trajectory_csv(in);
      std::optional<Vec> x_limit;
      if (r_xlimit != "auto") x_limit = parse_vector_text(r_xlimit, "--x-limit");
      ClassifyOptions options;
      options.converged_tol = r_conv;
      if (r_t0 != "auto") options.t0 = parse_vector_text(r_t0, "--t0")[0];
      const RateReport report = classify_rate(traj, x_limit, options);
      if (g.json) out << io::rate_report_to_json(report).dump(2) << '\n';
      else print_report_text(out, report);
      return kOk;
    }

    if (sweep->parsed()) {
      std::optional<ExperimentConfig> config;
      if (!g.config.empty()) config = config_from_json(io::read_json_file(g.config));
      if (s_run && !config) throw InvalidArgument("sweep --run needs --config");
      double beta = -1.0;
      if (s_beta) beta = *s_beta;
      else if (config) beta = make_problem(config->problem).beta();
      if (beta < 0.0) throw InvalidArgument("sweep needs --beta or --config");
      const auto gammas = grid(s_gammas, s_grange, "gamma");
      const auto lambdas = grid(s_lambdas, s_lrange, "lambda");

      std::vector<SweepPoint> points;
      for (std::size_t i = 0; i < gammas.size(); ++i)
        for (std::size_t k = 0; k < lambdas.size(); ++k)
          points.push_back({i, k, {gammas[i], lambdas[k], derive_params(gammas[i], lambdas[k], beta)}, -1, {}});

      if (s_run) {
        std::vector<SweepPoint*> todo;
        for (auto& p : points)
          if (p.point.params.rho_feasible) todo.push_back(&p);
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
          for (std::size_t idx; (idx = next.fetch_add(1)) < todo.size();) {
            SweepPoint& p = *todo[idx];
            ExperimentConfig c = *config;
            c.gamma = p.point.gamma;
            c.lambda = p.point.lambda;
            const std::string dir =
                join_path(g.out_dir, "point_g" + std::to_string(p.gi) + "_l" + std::to_string(p.li));
            try {
              write_run_outputs(c, run_experiment(c), dir);
              p.status = kOk;
            } catch (const InvalidArgument& e) {
              p.status = kInvalidInput;
              p.message = e.what();
            } catch (const NumericalError& e) {
              p.status = kNumericalAbort;
              p.message = e.what();
            }
          }
        };
        const unsigned jobs = std::max(1u, std::min<unsigned>(s_jobs, static_cast<unsigned>(todo.size())));
        std::vector<std::thread> threads;
        for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
        worker();
        for (auto& t : threads) t.join();
      }

      std::ostringstream csv;
      csv << "gamma,lambda,beta,A,B,C,rho_feasible,corollary_feasible" << (s_run ? ",run_status,run_dir" : "") << '\n';
      std::size_t feasible = 0;
      for (const auto& p : points) {
        const auto& sp = p.point.params;
        feasible += sp.rho_feasible ? 1 : 0;
        csv << io::format_double(p.point.gamma) << ',' << io::format_double(p.point.lambda) << ','
            << io::format_double(beta) << ',' << io::format_double(sp.A) << ',' << io::format_double(sp.B) << ','
            << io::format_double(sp.C) << ',' << (sp.rho_feasible ? 1 : 0) << ',' << (sp.corollary_feasible ? 1 : 0);
        if (s_run) {
          csv << ',' << p.status << ',';
          if (sp.rho_feasible) csv << "point_g" << p.gi << "_l" << p.li;
        }
        csv << '\n';
      }
      ensure_dir(g.out_dir);
      io::write_text_file(join_path(g.out_dir, "sweep.csv"), csv.str());

      int failures = 0;
      for (const auto& p : points)
        if (p.status > 0) {
          ++failures;
          err << "point (" << io::format_double(p.point.gamma) << ", " << io::format_double(p.point.lambda)
              << "): " << p.message << '\n';
        }
      if (g.json) {
        json j;
        j["beta"] = beta;
        j["points"] = points.size();
        j["feasible"] = feasible;
        j["run_failures"] = failures;
        out << j.dump(2) << '\n';
      } else {
        out << "points = " << points.size() << "\nfeasible = " << feasible << '\n';
        if (s_run) out << "run_failures = " << failures << '\n';
      }
      return kOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  }
  return kInvalidInput;
}

}  // namespace proxflow::cli
