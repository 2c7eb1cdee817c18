#pragma once

#include <cstdint>
#include <vector>

#include "freight/fluid.hpp"
#include "freight/mech.hpp"
#include "freight/network.hpp"
#include "freight/rng.hpp"

namespace freight {

/// Per-period carriers (with realized costs), demands, and the in-transit
/// pipeline. pipeline[k][r] counts loaded carriers on lane k that complete
/// transit after r+1 more period transitions.
struct MarketState {
  int period = 1;
  std::vector<std::vector<double>> costs;
  std::vector<int> demand;
  std::vector<std::vector<int>> pipeline;
};

struct LanePeriod {
  int available = 0;  // S
  int demand = 0;     // D
  int chose = 0;      // X, bids at or below the acceptance threshold
  int booked = 0;     // Y
  int left = 0;       // V
  int instant = 0;    // bookings made at the posted price
  double payment = 0.0;
  double penalty_cost = 0.0;
};

struct PeriodOutcome {
  std::vector<LanePeriod> lanes;
};

struct SimulationTrace {
  Mechanism mechanism = Mechanism::SP;
  std::uint64_t seed = 0;
  int periods = 0;
  int warmup = 0;
  std::vector<PeriodOutcome> outcomes;

  /// Post-warm-up per-period means over all lanes.
  double mean_cost() const;
  double mean_payment() const;
  double mean_penalty() const;
  double mean_booked() const;
  double mean_instant() const;
  double mean_available() const;
};

struct ReplicationSet {
  std::vector<SimulationTrace> traces;
};

MarketState init_state(const Network& net, const FluidSolution& fluid, double share,
                       const StreamRng& rng);

/// Advances one period: mechanism per lane, retention/repositioning of
/// completed transits, fresh arrivals, next demand. Mutates state in place.
PeriodOutcome step(MarketState& state, const Network& net, Mechanism mech,
                   const FluidSolution& prices, const StreamRng& rng);

SimulationTrace run(const Network& net, Mechanism mech, const FluidSolution& fluid, int periods,
                    int warmup, std::uint64_t seed, double share = 1.0);

ReplicationSet run_replications(const Network& net, Mechanism mech, const FluidSolution& fluid,
                                int periods, int warmup, int n_reps, std::uint64_t base_seed,
                                int parallel_threads = 1, double share = 1.0);

struct DominanceReport {
  bool pathwise_ok = true;          // coupled S_AUC >= S_AUC-P everywhere
  double max_exceedance = 0.0;      // uncoupled max over lanes, s of CDF_AUC(s) - CDF_AUC-P(s)
  double dkw_band = 0.0;
  int samples_per_arm = 0;
  std::vector<double> lane_exceedance;
};

/// Checks that AUC keeps (stochastically) more carriers around
/// than AUC-P: shared random streams give the pathwise coupling, independent
/// seeds give the empirical-CDF comparison.
DominanceReport coupled_dominance_check(const Network& net, const FluidSolution& fluid,
                                        int periods, int warmup, int n_reps,
                                        std::uint64_t seed);

}  // namespace freight
