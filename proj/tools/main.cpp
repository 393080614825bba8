// netmin: minimize OFDMA base-station transmit power under throughput
// demands with log-normally distributed channel gains.
//
// Subcommands: gen, fit, solve, validate, sweep, bnb. All outputs are flat
// files; every output gets a <name>.manifest.json echoing the invocation.
#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "netmin/assoc.hpp"
#include "netmin/io.hpp"
#include "netmin/mc.hpp"
#include "netmin/robust.hpp"

namespace {

using namespace netmin;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::vector<std::string> collect_argv(int argc, char** argv) {
  return {argv, argv + argc};
}

PiecewiseApprox approx_from_flag(const std::string& flag) {
  if (flag == "paper-m5") return paper_m5_preset();
  if (flag.rfind("fit:", 0) == 0) {
    int m = 0;
    double lo = 0, hi = 0;
    if (std::sscanf(flag.c_str(), "fit:%d,%lf,%lf", &m, &lo, &hi) != 3)
      throw CLI::ValidationError("--approx",
                                 "expected fit:<m>,<smin>,<smax>");
    return fit_piecewise(m, lo, hi);
  }
  // otherwise a path to a previously fitted JSON file
  return io::approx_from_json(io::read_file(flag));
}

Association assoc_from_flag(const std::string& flag, const Scenario& sc) {
  if (flag == "greedy") return greedy_assoc(sc);
  if (flag.rfind("fixed:", 0) == 0) {
    const SolveResult res =
        io::result_from_json(io::read_file(flag.substr(6)));
    if (res.assoc.serving.size() != sc.num_users)
      throw CLI::ValidationError("--assoc", "fixed association length != n");
    return res.assoc;
  }
  throw CLI::ValidationError("--assoc", "unsupported mode here: " + flag);
}

struct SolveFlags {
  std::string scenario_path;
  std::string out = "result.json";
  std::string box_out;
  std::string mode = "robust";
  std::string approx = "paper-m5";
  std::string assoc = "greedy";
  std::string box_policy = "one-sided";
  double alpha = 0.0993;
  double sigma_scale = 1.0;
  std::int64_t enumerate_limit = 4096;
};

int run_solve(const SolveFlags& f, const std::vector<std::string>& argv) {
  const Scenario sc = io::scenario_from_json(io::read_file(f.scenario_path));
  const PiecewiseApprox pw = approx_from_flag(f.approx);

  std::optional<UncertaintyBox> box;
  if (f.mode == "robust") {
    box = build_box(sc.num_users, sc.num_bs, f.alpha,
                    box_policy_from_string(f.box_policy));
  } else if (f.mode != "deterministic") {
    throw CLI::ValidationError("--mode", "must be deterministic or robust");
  }

  SolveResult result;
  if (f.assoc == "enumerate" || f.assoc == "bnb") {
    AssocProblem prob;
    prob.scenario = sc;
    prob.pw = pw;
    prob.box = box;
    prob.sigma_scale = f.sigma_scale;
    if (f.assoc == "enumerate") {
      const EnumerateResult best = enumerate_assoc(prob, f.enumerate_limit);
      result = best.result;
      result.diag.status = best.status;
    } else {
      const BnbResult bnb = branch_and_bound(prob, BnbOptions{});
      result = bnb.result;
      result.diag.status = bnb.status;
      std::printf("bnb nodes=%lld gap=%.3e certified=%d\n",
                  static_cast<long long>(bnb.nodes), bnb.gap,
                  bnb.certified ? 1 : 0);
    }
  } else {
    const Association assoc = assoc_from_flag(f.assoc, sc);
    const gp::LogConvexProgram prog =
        box ? build_robust(sc, pw, *box, assoc, f.sigma_scale)
            : build_migp(sc, pw, assoc);
    const gp::SolveOutput out = gp::solve(prog);
    result = extract_result(prog, out, sc, assoc);
  }

  io::write_file(f.out, io::result_to_json(result));
  io::write_manifest(f.out, argv);
  if (box && !f.box_out.empty()) {
    io::write_file(f.box_out, io::box_to_json(*box));
    io::write_manifest(f.box_out, argv);
  }

  std::printf("status=%s objective_w=%.10g\n",
              to_string(result.diag.status).c_str(), result.objective_w);
  if (result.diag.status == SolveStatus::optimal) return kExitOk;
  if (result.diag.status == SolveStatus::infeasible) return kExitInfeasible;
  return kExitError;
}

struct SweepFlags {
  std::string scenario_path;
  std::string out = "sweep.csv";
  std::string approx = "paper-m5";
  std::string box_policy = "one-sided";
  std::vector<double> sigma_grid;
  std::vector<double> prob_grid;
  double alpha = 0.1;
  double sigma_scale = 1.0;
  int workers = 1;
};

int run_sweep(const SweepFlags& f, const std::vector<std::string>& argv) {
  const Scenario sc = io::scenario_from_json(io::read_file(f.scenario_path));
  const PiecewiseApprox pw = approx_from_flag(f.approx);
  const Association assoc = greedy_assoc(sc);
  const BoxPolicy policy = box_policy_from_string(f.box_policy);

  struct Point {
    std::string kind;
    double value = 0.0;
    double alpha = 0.0;
    double sigma_scale = 1.0;
  };
  std::vector<Point> grid;
  for (double s : f.sigma_grid) grid.push_back({"sigma", s, f.alpha, s});
  for (double pr : f.prob_grid)
    grid.push_back({"probability", pr, 1.0 - pr, f.sigma_scale});
  if (grid.empty())
    throw CLI::ValidationError("sweep", "need --sigma-grid or --prob-grid");

  struct Row {
    Point point;
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0;
  };
  std::vector<Row> rows(grid.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= grid.size()) return;
      const Point& pt = grid[k];
      gp::LogConvexProgram prog;
      if (pt.sigma_scale == 0.0) {
        prog = build_migp(sc, pw, assoc);
      } else {
        const UncertaintyBox box =
            build_box(sc.num_users, sc.num_bs, pt.alpha, policy);
        prog = build_robust(sc, pw, box, assoc, pt.sigma_scale);
      }
      const gp::SolveOutput out = gp::solve(prog);
      rows[k] = {pt, out.diag.status, out.objective};
    }
  };
  const int nw = std::max(1, std::min<int>(f.workers, (int)grid.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::string csv = "sweep,value,objective_w,status\n";
  bool any_solved = false;
  char line[160];
  for (const Row& row : rows) {
    const bool ok = row.status == SolveStatus::optimal;
    any_solved = any_solved || ok;
    std::snprintf(line, sizeof line, "%s,%.10g,%.10g,%s\n",
                  row.point.kind.c_str(), row.point.value,
                  ok ? row.objective : 0.0, to_string(row.status).c_str());
    csv += line;
  }
  io::write_file(f.out, csv);
  io::write_manifest(f.out, argv);
  std::printf("%zu points -> %s\n", rows.size(), f.out.c_str());
  return any_solved ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDMA power minimization under uncertain channel gains"};
  app.require_subcommand(1);
  const std::vector<std::string> full_argv = collect_argv(argc, argv);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a synthetic scenario");
  SyntheticConfig gen_cfg;
  std::string gen_out = "scenario.json";
  gen->add_option("--n", gen_cfg.num_users, "user count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--bs", gen_cfg.num_bs, "base station count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--area", gen_cfg.area_m, "square side (m)");
  gen->add_option("--pathloss-exp", gen_cfg.pathloss_exponent, "exponent");
  gen->add_option("--ref-loss-db", gen_cfg.ref_loss_db, "loss at 1 m");
  gen->add_option("--sigma-db", gen_cfg.sigma_db, "shadowing std (dB)");
  gen->add_option("--demand-min", gen_cfg.demand_min_bps, "bits/s");
  gen->add_option("--demand-max", gen_cfg.demand_max_bps, "bits/s");
  gen->add_option("--bandwidth", gen_cfg.bandwidth_hz, "per-BS Hz");
  gen->add_option("--pmax", gen_cfg.p_max_w, "per-BS power cap (W)");
  gen->add_option("--noise", gen_cfg.noise_w, "noise power (W)");
  gen->add_option("--seed", gen_cfg.seed, "RNG seed");
  gen->add_option("--out", gen_out, "output path");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "fit or export a rate approximation");
  std::string fit_spec = "fit:5,0.01,100";
  std::string fit_out = "approx.json";
  fit->add_option("--approx", fit_spec, "paper-m5 or fit:<m>,<smin>,<smax>");
  fit->add_option("--out", fit_out, "output path");

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  SolveFlags sf;
  solve_cmd->add_option("--scenario", sf.scenario_path, "scenario JSON")
      ->required();
  solve_cmd->add_option("--out", sf.out, "result JSON path");
  solve_cmd->add_option("--box-out", sf.box_out, "write the box JSON here");
  solve_cmd->add_option("--mode", sf.mode, "deterministic|robust");
  solve_cmd->add_option("--approx", sf.approx,
                        "paper-m5 | fit:<m>,<smin>,<smax> | path");
  solve_cmd->add_option("--assoc", sf.assoc,
                        "fixed:<file>|greedy|enumerate|bnb");
  solve_cmd->add_option("--alpha", sf.alpha, "violation budget");
  solve_cmd->add_option("--sigma-scale", sf.sigma_scale, "sigma multiplier");
  solve_cmd->add_option("--box-policy", sf.box_policy,
                        "one-sided|two-sided");
  solve_cmd->add_option("--enumerate-limit", sf.enumerate_limit,
                        "assignment cap for --assoc enumerate");

  // ---- validate ----
  auto* val = app.add_subcommand("validate", "Monte Carlo check a result");
  std::string val_scenario, val_result, val_box, val_out = "report.csv";
  std::string val_json_out, val_dist = "lognormal";
  std::int64_t val_samples = 100000;
  std::uint64_t val_seed = 0;
  double val_sigma_scale = 1.0;
  std::vector<double> val_factors;
  val->add_option("--scenario", val_scenario, "scenario JSON")->required();
  val->add_option("--result", val_result, "result JSON")->required();
  val->add_option("--box", val_box, "box JSON for coverage columns");
  val->add_option("--dist", val_dist, "lognormal|uniform:<k>|student:<dof>");
  val->add_option("--samples", val_samples, "sample count");
  val->add_option("--seed", val_seed, "RNG seed");
  val->add_option("--sigma-scale", val_sigma_scale, "sigma multiplier");
  val->add_option("--out", val_out, "CSV path");
  val->add_option("--json", val_json_out, "JSON summary path");
  val->add_option("--demand-factors", val_factors,
                  "emit a stress table for these demand multipliers");

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "grid of solves");
  SweepFlags wf;
  sweep_cmd->add_option("--scenario", wf.scenario_path, "scenario JSON")
      ->required();
  sweep_cmd->add_option("--out", wf.out, "CSV path");
  sweep_cmd->add_option("--approx", wf.approx, "approximation flag");
  sweep_cmd->add_option("--sigma-grid", wf.sigma_grid,
                        "sigma multipliers to sweep");
  sweep_cmd->add_option("--prob-grid", wf.prob_grid,
                        "probability levels to sweep");
  sweep_cmd->add_option("--alpha", wf.alpha, "alpha for the sigma sweep");
  sweep_cmd->add_option("--sigma-scale", wf.sigma_scale,
                        "sigma for the probability sweep");
  sweep_cmd->add_option("--box-policy", wf.box_policy, "box policy");
  sweep_cmd->add_option("--workers", wf.workers, "concurrent solves");

  // ---- bnb ----
  auto* bnb_cmd = app.add_subcommand("bnb", "branch & bound association");
  SolveFlags bf;
  bf.assoc = "bnb";
  bnb_cmd->add_option("--scenario", bf.scenario_path, "scenario JSON")
      ->required();
  bnb_cmd->add_option("--out", bf.out, "result JSON path");
  bnb_cmd->add_option("--mode", bf.mode, "deterministic|robust");
  bnb_cmd->add_option("--approx", bf.approx, "approximation flag");
  bnb_cmd->add_option("--alpha", bf.alpha, "violation budget");
  bnb_cmd->add_option("--sigma-scale", bf.sigma_scale, "sigma multiplier");
  bnb_cmd->add_option("--box-policy", bf.box_policy, "box policy");

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      const Scenario sc = gen_synthetic(gen_cfg);
      io::write_file(gen_out, io::scenario_to_json(sc));
      io::write_manifest(gen_out, full_argv);
      std::printf("seed=%llu n=%d N=%d -> %s\n",
                  static_cast<unsigned long long>(gen_cfg.seed),
                  sc.num_users, sc.num_bs, gen_out.c_str());
      return kExitOk;
    }
    if (fit->parsed()) {
      const PiecewiseApprox pw = approx_from_flag(fit_spec);
      io::write_file(fit_out, io::approx_to_json(pw));
      io::write_manifest(fit_out, full_argv);
      const auto rep = verify_lower_bound(pw, pw.s_min, pw.s_max);
      std::printf("m=%d range=[%g, %g] certified=%d max_gap=%.3e\n",
                  pw.size(), pw.s_min, pw.s_max, rep.pass ? 1 : 0,
                  rep.max_gap);
      return kExitOk;
    }
    if (solve_cmd->parsed()) return run_solve(sf, full_argv);
    if (bnb_cmd->parsed()) return run_solve(bf, full_argv);
    if (sweep_cmd->parsed()) return run_sweep(wf, full_argv);

    if (val->parsed()) {
      const Scenario sc = io::scenario_from_json(io::read_file(val_scenario));
      const SolveResult res =
          io::result_from_json(io::read_file(val_result));
      if (res.alloc.rows() != sc.num_users || res.alloc.cols() != sc.num_bs)
        throw std::invalid_argument(
            "validate: result shape does not match the scenario");
      const mc::GainDistribution dist = mc::GainDistribution::parse(val_dist);
      std::optional<UncertaintyBox> box;
      if (!val_box.empty())
        box = io::box_from_json(io::read_file(val_box));

      const mc::ViolationReport rep =
          mc::validate(res, sc, dist, val_samples, val_seed, val_sigma_scale,
                       box ? &*box : nullptr);
      io::write_file(val_out, io::report_to_csv(rep));
      io::write_manifest(val_out, full_argv);
      if (!val_json_out.empty()) {
        io::write_file(val_json_out, io::report_to_json(rep));
        io::write_manifest(val_json_out, full_argv);
      }
      std::printf("violation=%.4f%%\n", 100.0 * rep.overall_violation_frac);

      if (!val_factors.empty()) {
        const auto rows =
            mc::demand_stress(res, sc, dist, val_factors, val_samples,
                              val_seed, val_sigma_scale);
        std::string csv = "factor,violation_pct\n";
        char line[64];
        for (const auto& row : rows) {
          std::snprintf(line, sizeof line, "%g,%.6f\n", row.factor,
                        100.0 * row.overall_violation_frac);
          csv += line;
        }
        const std::string stress_out = val_out + ".stress.csv";
        io::write_file(stress_out, csv);
        io::write_manifest(stress_out, full_argv);
      }
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
