#include "proxflow/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace proxflow::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double(const std::string& cell, std::size_t row) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw InvalidArgument("CSV row " + std::to_string(row) + ": cannot parse '" + cell + "' as a number");
  return x;
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV is empty");
  header = split(trim_cr(line), ',');
  std::vector<std::vector<double>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw InvalidArgument("CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(header.size()));
    std::vector<double> values;
    values.reserve(cells.size());
    for (const auto& c : cells) values.push_back(parse_double(c, row));
    rows.push_back(std::move(values));
  }
  return rows;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json optional_or_null(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Vec vec_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidArgument("'" + field + "' must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument("'" + field + "' must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Mat mat_from_json(const json& j, const std::string& field, int rows) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("'" + field + "' must be a non-empty matrix");
  if (j[0].is_array()) {
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = static_cast<Eigen::Index>(j[0].size());
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      const Vec row = vec_from_json(j[static_cast<std::size_t>(i)], field);
      if (row.size() != c) throw InvalidArgument("'" + field + "' has ragged rows");
      m.row(i) = row.transpose();
    }
    return m;
  }
  const Vec flat = vec_from_json(j, field);
  Eigen::Index r = rows;
  if (r <= 0) {
    r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    if (r * r != flat.size()) throw InvalidArgument("flat '" + field + "' is not square; give nested rows");
  }
  if (flat.size() % r != 0) throw InvalidArgument("flat '" + field + "' does not split into rows");
  const Eigen::Index c = flat.size() / r;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = flat[i * c + k];
  return m;
}

ProblemSpec problem_spec_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("problem spec must be a JSON object");
  if (!j.contains("name") || !j["name"].is_string()) throw InvalidArgument("problem spec needs a string 'name'");
  ProblemSpec spec;
  spec.name = j["name"].get<std::string>();
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer()) throw InvalidArgument("'dim' must be an integer");
    spec.dim = j["dim"].get<int>();
  }
  if (j.contains("mu")) {
    if (!j["mu"].is_number()) throw InvalidArgument("'mu' must be a number");
    spec.mu = j["mu"].get<double>();
  }
  if (j.contains("b")) spec.b = vec_from_json(j["b"], "b");
  if (j.contains("y")) spec.y = vec_from_json(j["y"], "y");
  if (j.contains("lower")) spec.lower = vec_from_json(j["lower"], "lower");
  if (j.contains("upper")) spec.upper = vec_from_json(j["upper"], "upper");
  if (j.contains("Q")) spec.Q = mat_from_json(j["Q"], "Q", spec.dim > 0 ? spec.dim : -1);
  if (j.contains("M")) {
    int rows = -1;
    if (spec.y) rows = static_cast<int>(spec.y->size());
    spec.M = mat_from_json(j["M"], "M", rows);
  }
  if (spec.dim == 0) {
    if (spec.Q) spec.dim = static_cast<int>(spec.Q->cols());
    else if (spec.M) spec.dim = static_cast<int>(spec.M->cols());
  }
  return spec;
}

json problem_spec_to_json(const ProblemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  auto mat = [](const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i).transpose()));
    return rows;
  };
  if (spec.Q) j["Q"] = mat(*spec.Q);
  if (spec.M) j["M"] = mat(*spec.M);
  if (spec.b) j["b"] = vec_to_json(*spec.b);
  if (spec.y) j["y"] = vec_to_json(*spec.y);
  if (spec.lower) j["lower"] = vec_to_json(*spec.lower);
  if (spec.upper) j["upper"] = vec_to_json(*spec.upper);
  if (spec.mu != 0.0) j["mu"] = spec.mu;
  return j;
}

json params_to_json(const SystemParams& p) {
  json j;
  j["gamma"] = p.gamma;
  j["lambda"] = p.lambda;
  j["beta"] = p.beta;
  j["L1"] = p.L1;
  j["L2"] = p.L2;
  j["L"] = p.L;
  j["A"] = p.A;
  j["B"] = p.B;
  j["C"] = p.C;
  j["c"] = p.c;
  j["a"] = p.a_const;
  j["b"] = p.b_const;
  j["s"] = p.s;
  j["p"] = p.p;
  j["m"] = p.envelope ? json(p.envelope->m) : json(nullptr);
  j["r0"] = p.envelope ? json(p.envelope->r0) : json(nullptr);
  j["rho_feasible"] = p.rho_feasible;
  j["corollary_feasible"] = p.corollary_feasible;
  return j;
}

json rate_report_to_json(const RateReport& r) {
  json j;
  j["regime"] = to_string(r.regime);
  j["theta"] = optional_or_null(r.theta);
  j["a1"] = optional_or_null(r.a1);
  j["a2"] = optional_or_null(r.a2);
  j["a3"] = optional_or_null(r.a3);
  j["a4"] = optional_or_null(r.a4);
  j["fit_quality"] = {{"exponential", finite_or_null(r.r2_exponential)},
                      {"polynomial", finite_or_null(r.r2_polynomial)}};
  j["t0"] = r.t0;
  j["t1"] = r.t1;
  j["x_limit"] = vec_to_json(r.x_limit);
  if (r.regime == Regime::polynomial) j["a4_convention"] = "a4 = a3 * t0";
  return j;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.dim();
  out << 't';
  for (const char* prefix : {"x_", "v_", "a_"})
    for (int i = 0; i < n; ++i) out << ',' << prefix << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (const auto* series : {&traj.xs, &traj.vs, &traj.accs})
      for (int i = 0; i < n; ++i) out << ',' << format_double((*series)[k][i]);
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = read_rows(in, header);
  if (header.empty() || header[0] != "t" || (header.size() - 1) % 3 != 0)
    throw InvalidArgument("trajectory CSV header must be t,x_0..,v_0..,a_0..");
  const auto n = static_cast<Eigen::Index>((header.size() - 1) / 3);
  if (n == 0) throw InvalidArgument("trajectory CSV has no state columns");
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = std::to_string(i);
    if (header[1 + i] != "x_" + idx || header[1 + n + i] != "v_" + idx || header[1 + 2 * n + i] != "a_" + idx)
      throw InvalidArgument("trajectory CSV header must be t,x_0..,v_0..,a_0..");
  }
  Trajectory traj;
  for (const auto& row : rows) {
    traj.times.push_back(row[0]);
    Vec x(n), v(n), a(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = row[1 + i];
      v[i] = row[1 + n + i];
      a[i] = row[1 + 2 * n + i];
    }
    traj.xs.push_back(std::move(x));
    traj.vs.push_back(std::move(v));
    traj.accs.push_back(std::move(a));
  }
  if (traj.size() >= 2) traj.step = traj.times[1] - traj.times[0];
  return traj;
}

void write_energy_csv(std::ostream& out, const EnergyTrace& trace) {
  out << "t,energy,fg_shifted,h_value,w_bound,residual,dissipation\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << format_double(trace.times[k]) << ',' << format_double(trace.energy[k]) << ','
        << format_double(trace.fg_shifted[k]) << ',' << format_double(trace.h_value[k]) << ','
        << format_double(trace.w_bound[k]) << ',' << format_double(trace.residual[k]) << ','
        << format_double(trace.dissipation[k]) << '\n';
  }
}

EnergyTrace read_energy_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = read_rows(in, header);
  const std::vector<std::string> expected{"t", "energy", "fg_shifted", "h_value", "w_bound", "residual", "dissipation"};
  if (header != expected) throw InvalidArgument("energy CSV header mismatch");
  EnergyTrace trace;
  for (const auto& row : rows) {
    trace.times.push_back(row[0]);
    trace.energy.push_back(row[1]);
    trace.fg_shifted.push_back(row[2]);
    trace.h_value.push_back(row[3]);
    trace.w_bound.push_back(row[4]);
    trace.residual.push_back(row[5]);
    trace.dissipation.push_back(row[6]);
  }
  return trace;
}

void write_history_csv(std::ostream& out, const IterateHistory& hist) {
  const Eigen::Index n = hist.xs.empty() ? 0 : hist.xs.front().size();
  out << 'k';
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  out << ",residual,objective\n";
  for (std::size_t k = 0; k < hist.xs.size(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(hist.xs[k][i]);
    // x_0 has no recorded residual
    out << ',' << (k == 0 ? std::string("nan") : format_double(hist.residuals[k - 1]));
    out << ',' << format_double(hist.objective_values[k]) << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("invalid JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

}  // namespace proxflow::io
