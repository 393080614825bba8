#pragma once

#include <string>
#include <vector>

#include "netmin/approx.hpp"
#include "netmin/mc.hpp"
#include "netmin/robust.hpp"
#include "netmin/scenario.hpp"

namespace netmin::io {

// Scenario JSON, field names fixed: n, N, bandwidth_hz, p_max_w, noise_w,
// demand_bps, mu_db, sigma_db, positions (optional). Matrices are row-major
// with users as rows.
std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

std::string result_to_json(const SolveResult& res);
SolveResult result_from_json(const std::string& text);

std::string approx_to_json(const PiecewiseApprox& pw);
PiecewiseApprox approx_from_json(const std::string& text);

std::string box_to_json(const UncertaintyBox& box);
UncertaintyBox box_from_json(const std::string& text);

// user_id, violation_pct, outside_box_pct rows plus an `overall` summary row.
std::string report_to_csv(const mc::ViolationReport& rep);
std::string report_to_json(const mc::ViolationReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Run manifest (flags + seed + version) written next to every output file.
void write_manifest(const std::string& output_path,
                    const std::vector<std::string>& argv);

}  // namespace netmin::io
