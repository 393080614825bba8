#include "netmin/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace netmin::io {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) return {};
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols)
      throw std::invalid_argument("ragged matrix in JSON");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["n"] = sc.num_users;
  j["N"] = sc.num_bs;
  j["bandwidth_hz"] = vector_to_json(sc.bandwidth_hz);
  j["p_max_w"] = vector_to_json(sc.p_max_w);
  j["noise_w"] = sc.noise_w;
  j["demand_bps"] = vector_to_json(sc.demand_bps);
  j["mu_db"] = matrix_to_json(sc.mu_db);
  j["sigma_db"] = matrix_to_json(sc.sigma_db);
  if (sc.user_pos && sc.bs_pos) {
    j["positions"] = {{"users", matrix_to_json(*sc.user_pos)},
                      {"bs", matrix_to_json(*sc.bs_pos)}};
  }
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario sc;
  sc.num_users = j.at("n").get<int>();
  sc.num_bs = j.at("N").get<int>();
  sc.bandwidth_hz = vector_from_json(j.at("bandwidth_hz"));
  sc.p_max_w = vector_from_json(j.at("p_max_w"));
  sc.noise_w = j.at("noise_w").get<double>();
  sc.demand_bps = vector_from_json(j.at("demand_bps"));
  sc.mu_db = matrix_from_json(j.at("mu_db"));
  sc.sigma_db = matrix_from_json(j.at("sigma_db"));
  if (j.contains("positions")) {
    sc.user_pos = matrix_from_json(j.at("positions").at("users"));
    sc.bs_pos = matrix_from_json(j.at("positions").at("bs"));
  }
  sc.validate();
  return sc;
}

std::string result_to_json(const SolveResult& res) {
  json j;
  j["P"] = vector_to_json(res.power_w);
  j["x"] = matrix_to_json(res.alloc);
  json assoc = json::array();
  for (Eigen::Index i = 0; i < res.assoc.serving.size(); ++i)
    assoc.push_back(res.assoc.serving(i));
  j["assoc"] = std::move(assoc);
  j["objective"] = res.objective_w;
  j["status"] = to_string(res.diag.status);
  j["diagnostics"] = {{"newton_iters", res.diag.newton_iters},
                      {"outer_stages", res.diag.outer_stages},
                      {"duality_measure", res.diag.duality_measure},
                      {"barrier_t", res.diag.barrier_t},
                      {"kkt_stationarity", res.diag.kkt_stationarity},
                      {"kkt_complementarity", res.diag.kkt_complementarity},
                      {"message", res.diag.message}};
  return j.dump(2) + "\n";
}

SolveResult result_from_json(const std::string& text) {
  const json j = json::parse(text);
  SolveResult res;
  res.power_w = vector_from_json(j.at("P"));
  res.alloc = matrix_from_json(j.at("x"));
  res.assoc.serving.resize(j.at("assoc").size());
  for (std::size_t i = 0; i < j.at("assoc").size(); ++i)
    res.assoc.serving(static_cast<int>(i)) = j.at("assoc").at(i).get<int>();
  res.objective_w = j.at("objective").get<double>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "optimal") res.diag.status = SolveStatus::optimal;
  else if (status == "infeasible") res.diag.status = SolveStatus::infeasible;
  else if (status == "iteration_limit")
    res.diag.status = SolveStatus::iteration_limit;
  else res.diag.status = SolveStatus::numerical_failure;
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    res.diag.newton_iters = d.value("newton_iters", 0);
    res.diag.outer_stages = d.value("outer_stages", 0);
    res.diag.duality_measure = d.value("duality_measure", 0.0);
    res.diag.barrier_t = d.value("barrier_t", 0.0);
    res.diag.kkt_stationarity = d.value("kkt_stationarity", 0.0);
    res.diag.kkt_complementarity = d.value("kkt_complementarity", 0.0);
    res.diag.message = d.value("message", std::string{});
  }
  return res;
}

std::string approx_to_json(const PiecewiseApprox& pw) {
  json j;
  j["a"] = pw.a;
  j["b"] = pw.b;
  j["s_min"] = pw.s_min;
  j["s_max"] = pw.s_max;
  return j.dump(2) + "\n";
}

PiecewiseApprox approx_from_json(const std::string& text) {
  const json j = json::parse(text);
  PiecewiseApprox pw;
  pw.a = j.at("a").get<std::vector<double>>();
  pw.b = j.at("b").get<std::vector<double>>();
  pw.s_min = j.at("s_min").get<double>();
  pw.s_max = j.at("s_max").get<double>();
  if (pw.a.size() != pw.b.size() || pw.a.empty())
    throw std::invalid_argument("approx JSON: a and b must match and be nonempty");
  return pw;
}

std::string box_to_json(const UncertaintyBox& box) {
  json j;
  j["rho_lo"] = matrix_to_json(box.rho_lo);
  j["rho_hi"] = matrix_to_json(box.rho_hi);
  j["policy"] = to_string(box.policy);
  j["target_probability"] = box.target_probability;
  return j.dump(2) + "\n";
}

UncertaintyBox box_from_json(const std::string& text) {
  const json j = json::parse(text);
  UncertaintyBox box;
  box.rho_lo = matrix_from_json(j.at("rho_lo"));
  box.rho_hi = matrix_from_json(j.at("rho_hi"));
  box.policy = box_policy_from_string(j.at("policy").get<std::string>());
  box.target_probability = j.at("target_probability").get<double>();
  return box;
}

std::string report_to_csv(const mc::ViolationReport& rep) {
  std::ostringstream out;
  out << "user_id,violation_pct,outside_box_pct\n";
  out << std::setprecision(10);
  const bool has_box = rep.user_outside_frac.size() > 0;
  for (Eigen::Index i = 0; i < rep.user_violation_frac.size(); ++i) {
    out << i << ',' << 100.0 * rep.user_violation_frac(i) << ',';
    if (has_box) out << 100.0 * rep.user_outside_frac(i);
    out << '\n';
  }
  out << "overall," << 100.0 * rep.overall_violation_frac << ',';
  if (has_box)
    out << 100.0 * rep.user_outside_frac.mean();
  out << '\n';
  return out.str();
}

std::string report_to_json(const mc::ViolationReport& rep) {
  json j;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  j["dist"] = rep.dist.str();
  j["overall_violation_frac"] = rep.overall_violation_frac;
  j["user_violation_frac"] = vector_to_json(rep.user_violation_frac);
  if (rep.user_outside_frac.size() > 0)
    j["user_outside_frac"] = vector_to_json(rep.user_outside_frac);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_manifest(const std::string& output_path,
                    const std::vector<std::string>& argv) {
  json j;
  j["argv"] = argv;
  j["version"] = "netmin 1.0";
  write_file(output_path + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace netmin::io
