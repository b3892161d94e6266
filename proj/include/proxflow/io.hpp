#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "proxflow/discrete.hpp"
#include "proxflow/lyapunov.hpp"
#include "proxflow/rates.hpp"

namespace proxflow::io {

using nlohmann::json;

// Floats are written with 17 significant digits so binary64 values
// survive a text round trip.
std::string format_double(double x);

Vec vec_from_json(const json& j, const std::string& field);
json vec_to_json(const Vec& v);

// Accepts nested rows [[..],[..]] or a flat row-major list (square, or
// with `rows` given).
Mat mat_from_json(const json& j, const std::string& field, int rows = -1);

ProblemSpec problem_spec_from_json(const json& j);
json problem_spec_to_json(const ProblemSpec& spec);

json params_to_json(const SystemParams& params);
json rate_report_to_json(const RateReport& report);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

void write_energy_csv(std::ostream& out, const EnergyTrace& trace);
EnergyTrace read_energy_csv(std::istream& in);

void write_history_csv(std::ostream& out, const IterateHistory& hist);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace proxflow::io
