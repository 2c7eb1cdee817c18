#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freight/io.hpp"
#include "freight/sim.hpp"
#include "test_support.hpp"

using namespace freight;
namespace ft = freight::testing;

namespace {

FluidSolution solved(const Network& net) {
  return solve_fa(net, FluidMode::CostMinFixedDemand);
}

Network no_retention_lane(double lambda, double demand) {
  Lane l;
  l.from = 0;
  l.to = 1;
  l.arrival_rate = lambda;
  l.penalty = 1.0;
  l.cost = CostDistribution::uniform(0.0, 1.0);
  l.demand = DemandSpec::fixed(demand);
  return Network(2, {l});
}

}  // namespace

TEST_CASE("init_state rounds carrier counts up") {
  Network net = no_retention_lane(3.2, 10.0);
  FluidSolution fl = solved(net);
  CHECK(fl.total_inflow[0] == doctest::Approx(3.2));
  StreamRng rng(1);
  MarketState st = init_state(net, fl, 1.0, rng);
  CHECK(static_cast<int>(st.costs[0].size()) == 4);
  MarketState tiny = init_state(net, fl, 0.01, rng);
  CHECK(static_cast<int>(tiny.costs[0].size()) == 1);
  CHECK(st.pipeline[0].size() == 1);
  CHECK_THROWS_AS(init_state(net, fl, 0.0, rng), std::invalid_argument);
}

TEST_CASE("no retention, unit travel time: supply is exactly the fresh arrivals") {
  Network net = no_retention_lane(6.0, 4.0);
  FluidSolution fl = solved(net);
  StreamRng rng(7);
  MarketState st = init_state(net, fl, 1.0, rng);
  for (int t = 0; t < 20; ++t) {
    step(st, net, Mechanism::SP, fl, rng);
    std::mt19937_64 eng = rng.engine(Stream::Arrivals, 0, st.period);
    std::poisson_distribution<int> pois(6.0);
    CHECK(static_cast<int>(st.costs[0].size()) == pois(eng));
  }
}

TEST_CASE("zero demand realizations produce empty periods") {
  // Demand is Poisson(d*); force d* to zero in the price vector only.
  Network net = no_retention_lane(6.0, 4.0);
  FluidSolution fl = solved(net);
  fl.demand[0] = 1e-12;
  SimulationTrace tr = run(net, Mechanism::AUC, fl, 50, 0, 3);
  for (const PeriodOutcome& po : tr.outcomes) {
    CHECK(po.lanes[0].booked == 0);
    CHECK(po.lanes[0].payment == doctest::Approx(0.0));
  }
}

TEST_CASE("posted-price bookings have a binomial mean when demand never binds") {
  Network net = no_retention_lane(1000.0, 10000.0);
  FluidSolution fl = solved(net);
  fl.posted_price[0] = 0.5;  // pin the acceptance threshold
  SimulationTrace tr = run(net, Mechanism::SP, fl, 300, 100, 11);
  double mean_y = tr.mean_booked();
  CHECK(std::abs(mean_y - 500.0) <= 3.0 * std::sqrt(1000.0 * 0.25 / 200.0) + 3.0);
}

TEST_CASE("same seed gives byte-identical traces") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  SimulationTrace a = run(net, Mechanism::HYB, fl, 100, 20, 99);
  SimulationTrace b = run(net, Mechanism::HYB, fl, 100, 20, 99);
  CHECK(trace_csv(net, a) == trace_csv(net, b));
  SimulationTrace c = run(net, Mechanism::HYB, fl, 100, 20, 100);
  CHECK(trace_csv(net, a) != trace_csv(net, c));
}

TEST_CASE("degenerate aggregation window is rejected") {
  Network net = no_retention_lane(6.0, 4.0);
  FluidSolution fl = solved(net);
  CHECK_THROWS_AS(run(net, Mechanism::SP, fl, 200, 200, 1), std::invalid_argument);
  CHECK_THROWS_AS(run(net, Mechanism::SP, fl, 100, -1, 1), std::invalid_argument);
}

TEST_CASE("SP and AUC-P book identical sequences under a shared seed") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  SimulationTrace sp = run(net, Mechanism::SP, fl, 300, 50, 4242);
  SimulationTrace aucp = run(net, Mechanism::AUC_P, fl, 300, 50, 4242);
  for (int t = 0; t < 300; ++t)
    for (int k = 0; k < net.lane_count(); ++k) {
      CHECK(sp.outcomes[t].lanes[k].booked == aucp.outcomes[t].lanes[k].booked);
      CHECK(sp.outcomes[t].lanes[k].available == aucp.outcomes[t].lanes[k].available);
    }
}

TEST_CASE("conservation: booked plus leaving equals available") {
  Network net = ft::synthetic5();
  FluidSolution fl = solved(net);
  for (Mechanism m : {Mechanism::SP, Mechanism::AUC, Mechanism::AUC_P, Mechanism::HYB}) {
    SimulationTrace tr = run(net, m, fl, 150, 30, 5);
    for (const PeriodOutcome& po : tr.outcomes)
      for (const LanePeriod& lp : po.lanes) {
        CHECK(lp.booked + lp.left == lp.available);
        CHECK(lp.booked <= std::min(lp.available, lp.demand));
        CHECK(lp.penalty_cost >= 0.0);
      }
  }
}

TEST_CASE("replication sets") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);

  SUBCASE("one replication matches a direct run") {
    ReplicationSet set = run_replications(net, Mechanism::AUC, fl, 80, 20, 1, 31);
    SimulationTrace direct = run(net, Mechanism::AUC, fl, 80, 20, 31);
    CHECK(set.traces.size() == 1);
    CHECK(set.traces[0].mean_cost() == doctest::Approx(direct.mean_cost()));
  }
  SUBCASE("parallel equals sequential") {
    ReplicationSet seq = run_replications(net, Mechanism::HYB, fl, 80, 20, 8, 7, 1);
    ReplicationSet par = run_replications(net, Mechanism::HYB, fl, 80, 20, 8, 7, 4);
    REQUIRE(seq.traces.size() == par.traces.size());
    for (size_t r = 0; r < seq.traces.size(); ++r)
      CHECK(trace_csv(net, seq.traces[r]) == trace_csv(net, par.traces[r]));
  }
}

TEST_CASE("stationarity proxy: windowed carrier counts settle") {
  Network net = ft::synthetic5();
  FluidSolution fl = solved(net);
  SimulationTrace tr = run(net, Mechanism::SP, fl, 700, 200, 13);
  std::vector<double> windows;
  for (int start = 200; start + 100 <= 700; start += 100) {
    double total = 0.0;
    for (int t = start; t < start + 100; ++t)
      for (const LanePeriod& lp : tr.outcomes[t].lanes) total += lp.available;
    windows.push_back(total / 100.0);
  }
  double lo = *std::min_element(windows.begin(), windows.end());
  double hi = *std::max_element(windows.begin(), windows.end());
  CHECK((hi - lo) / hi < 0.2);
}

TEST_CASE("coupled dominance: AUC retains at least as many carriers as AUC-P") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  for (int k = 0; k < net.lane_count(); ++k)
    REQUIRE(fl.reserve_price[k] > fl.posted_price[k]);
  DominanceReport rep = coupled_dominance_check(net, fl, 400, 100, 4, 2024);
  CHECK(rep.pathwise_ok);
  CHECK(rep.samples_per_arm == 4 * 300);
  CHECK(rep.max_exceedance <= rep.dkw_band);
}
