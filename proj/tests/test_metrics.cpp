#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freight/metrics.hpp"
#include "test_support.hpp"

using namespace freight;
namespace ft = freight::testing;

namespace {

FluidSolution solved(const Network& net) {
  return solve_fa(net, FluidMode::CostMinFixedDemand);
}

}  // namespace

TEST_CASE("fluid benchmark cost on the single-lane example") {
  Lane l;
  l.from = 0;
  l.to = 1;
  l.arrival_rate = 20.0;
  l.penalty = 1.0;
  l.cost = CostDistribution::uniform(0.0, 1.0);
  l.demand = DemandSpec::fixed(10.0);
  Network net(2, {l});
  FluidSolution fl = solved(net);
  CHECK(kappa_fa(net, fl) == doctest::Approx(5.0).epsilon(1e-6));

  FluidSolution scaled = solve_fa(scale_instance(net, 2.0), FluidMode::CostMinFixedDemand);
  CHECK(kappa_fa(scale_instance(net, 2.0), scaled) == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("zero-penalty benchmark cost is zero") {
  Lane l;
  l.from = 0;
  l.to = 1;
  l.arrival_rate = 20.0;
  l.penalty = 0.0;
  l.cost = CostDistribution::uniform(0.2, 1.0);
  l.demand = DemandSpec::fixed(10.0);
  Network net(2, {l});
  FluidSolution fl = solved(net);
  CHECK(kappa_fa(net, fl) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("report: ratios, decomposition, and SP ratio endpoints") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  std::vector<ReplicationSet> runs;
  for (Mechanism m : {Mechanism::SP, Mechanism::AUC, Mechanism::HYB})
    runs.push_back(run_replications(net, m, fl, 300, 60, 5, 17));
  MetricReport rep = report(runs, fl, net);

  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.kappa_fa == doctest::Approx(kappa_fa(net, fl)));
  for (const MechanismMetrics& row : rep.rows) {
    CHECK(row.replications == 5);
    CHECK(row.cost_ratio ==
          doctest::Approx(row.payment_ratio + row.penalty_ratio).epsilon(1e-12));
    CHECK(row.cost_gap_ratio == doctest::Approx(row.cost_ratio - 1.0).epsilon(1e-12));
    CHECK(row.kappa_se > 0.0);
    CHECK(row.sp_ratio >= 0.0);
    CHECK(row.sp_ratio <= 1.0);
    // Shipper prices are defined on this instance, so profit is reported.
    CHECK(std::isfinite(row.profit));
  }
  CHECK(rep.rows[0].sp_ratio == doctest::Approx(1.0));
  CHECK(rep.rows[1].sp_ratio == doctest::Approx(0.0));
  CHECK(rep.rows[2].sp_ratio >= rep.rows[1].sp_ratio);
  CHECK(rep.rows[2].sp_ratio <= rep.rows[0].sp_ratio);

  std::string csv = report_csv(rep);
  CHECK(csv.find("mechanism,") == 0);
  CHECK(csv.find("SP,") != std::string::npos);
  CHECK(csv.find("AUC,") != std::string::npos);
}

TEST_CASE("per-replication decomposition identity") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  ReplicationSet set = run_replications(net, Mechanism::HYB, fl, 200, 40, 4, 3);
  for (const SimulationTrace& tr : set.traces)
    CHECK(tr.mean_cost() ==
          doctest::Approx(tr.mean_payment() + tr.mean_penalty()).epsilon(1e-12));
}

TEST_CASE("report rejects mismatched windows") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  std::vector<ReplicationSet> runs;
  runs.push_back(run_replications(net, Mechanism::SP, fl, 100, 20, 2, 1));
  runs.push_back(run_replications(net, Mechanism::AUC, fl, 120, 20, 2, 1));
  CHECK_THROWS_AS(report(runs, fl, net), std::invalid_argument);
}

TEST_CASE("simulated cost stays above the fluid benchmark") {
  Network net = ft::three_node();
  FluidSolution fl = solved(net);
  double bench = kappa_fa(net, fl);
  for (Mechanism m : {Mechanism::SP, Mechanism::AUC, Mechanism::HYB}) {
    ReplicationSet set = run_replications(net, m, fl, 400, 100, 8, 23);
    MetricReport rep = report({set}, fl, net);
    CHECK(rep.rows[0].kappa_hat >= bench - 3.0 * rep.rows[0].kappa_se);
  }
}
