#pragma once

#include <cstdint>

#include "netmin/assoc.hpp"
#include "netmin/robust.hpp"
#include "netmin/scenario.hpp"

namespace netmin::testing {

// Five-station scenario shaped like the evaluation setting: log-distance
// gains, unit sigma so sweeps scale it, demands comfortably inside capacity.
inline Scenario make_bench_scenario(std::uint64_t seed = 7,
                                    int num_users = 20) {
  SyntheticConfig cfg;
  cfg.num_users = num_users;
  cfg.num_bs = 5;
  cfg.area_m = 800.0;
  cfg.pathloss_exponent = 3.5;
  cfg.ref_loss_db = 40.0;
  cfg.sigma_db = 1.0;
  cfg.demand_min_bps = 8e4;
  cfg.demand_max_bps = 2.5e5;
  cfg.bandwidth_hz = 2e7;
  cfg.p_max_w = 1.0;
  cfg.noise_w = 1e-13;
  cfg.seed = seed;
  return gen_synthetic(cfg);
}

// Same shape with demands pushed near the interference-limited capacity:
// deterministic and mildly robust solves still work, sigma multipliers of 4
// and up at the 90% level do not.
inline Scenario make_tight_scenario(std::uint64_t seed = 7) {
  Scenario sc = make_bench_scenario(seed, 20);
  sc.demand_bps *= 2.4;
  return sc;
}

// Tiny random instance for exhaustive association checks.
inline Scenario make_small_scenario(std::uint64_t seed, int num_users,
                                    int num_bs) {
  SyntheticConfig cfg;
  cfg.num_users = num_users;
  cfg.num_bs = num_bs;
  cfg.area_m = 600.0;
  cfg.sigma_db = 1.0;
  cfg.demand_min_bps = 5e5;
  cfg.demand_max_bps = 3e6;
  cfg.seed = seed;
  return gen_synthetic(cfg);
}

}  // namespace netmin::testing
