#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "freight/io.hpp"
#include "test_support.hpp"

using namespace freight;
using nlohmann::json;
namespace ft = freight::testing;

TEST_CASE("network JSON round trip") {
  Network net = ft::synthetic5();
  Network back = network_from_json(network_to_json(net));
  REQUIRE(back.lane_count() == net.lane_count());
  for (int k = 0; k < net.lane_count(); ++k) {
    CHECK(back.lane(k).from == net.lane(k).from);
    CHECK(back.lane(k).to == net.lane(k).to);
    CHECK(back.lane(k).arrival_rate == doctest::Approx(net.lane(k).arrival_rate));
    CHECK(back.lane(k).stay_prob == doctest::Approx(net.lane(k).stay_prob));
    CHECK(back.lane(k).penalty == doctest::Approx(net.lane(k).penalty));
    CHECK(back.lane(k).travel_time == net.lane(k).travel_time);
    CHECK(back.lane(k).cost.lower() == doctest::Approx(net.lane(k).cost.lower()));
    CHECK(back.lane(k).cost.upper() == doctest::Approx(net.lane(k).cost.upper()));
    CHECK(back.lane(k).demand.rate == doctest::Approx(net.lane(k).demand.rate));
    CHECK(back.lane(k).demand.shipper_rate ==
          doctest::Approx(net.lane(k).demand.shipper_rate));
  }
}

TEST_CASE("linear demand curves survive the round trip") {
  Lane l;
  l.from = 0;
  l.to = 1;
  l.arrival_rate = 5.0;
  l.demand = DemandSpec::linear(10.0, 2.0);
  Network net(2, {l});
  Network back = network_from_json(network_to_json(net));
  CHECK(back.lane(0).demand.kind == DemandSpec::Kind::LinearCurve);
  CHECK(back.lane(0).demand.intercept == doctest::Approx(10.0));
  CHECK(back.lane(0).demand.slope == doctest::Approx(2.0));
}

TEST_CASE("config parsing") {
  json cfg{{"version", 1},
           {"network", {{"inline", network_to_json(ft::three_node())}}},
           {"mechanisms", {"SP", "AUC-P"}},
           {"fluid", {{"mode", "cost_min"}, {"tolerance", 1e-7}}},
           {"periods", 500},
           {"warmup", 100},
           {"replications", 4},
           {"seed", 9},
           {"thetas", {1.0, 4.0}}};

  SUBCASE("valid config resolves") {
    RunConfig rc = config_from_json(cfg);
    CHECK(rc.network.lane_count() == 4);
    REQUIRE(rc.mechanisms.size() == 2);
    CHECK(rc.mechanisms[1] == Mechanism::AUC_P);
    CHECK(rc.solver.tolerance == doctest::Approx(1e-7));
    CHECK(rc.periods == 500);
    CHECK(rc.warmup == 100);
    CHECK(rc.replications == 4);
    CHECK(rc.seed == 9);
    CHECK(rc.thetas == std::vector<double>{1.0, 4.0});
  }
  SUBCASE("unknown keys are named") {
    json bad = cfg;
    bad["warmupp"] = 3;
    CHECK_THROWS_WITH_AS(config_from_json(bad), doctest::Contains("warmupp"),
                         std::runtime_error);
  }
  SUBCASE("unknown lane keys are named") {
    json bad = cfg;
    bad["network"]["inline"]["lanes"][0]["lamda"] = 2.0;
    CHECK_THROWS_WITH_AS(config_from_json(bad), doctest::Contains("lamda"), std::runtime_error);
  }
  SUBCASE("bad version") {
    json bad = cfg;
    bad["version"] = 2;
    CHECK_THROWS_AS(config_from_json(bad), std::runtime_error);
  }
  SUBCASE("bad window") {
    json bad = cfg;
    bad["warmup"] = 500;
    CHECK_THROWS_AS(config_from_json(bad), std::runtime_error);
  }
  SUBCASE("bad mode") {
    json bad = cfg;
    bad["fluid"]["mode"] = "equilibrium";
    CHECK_THROWS_AS(config_from_json(bad), std::runtime_error);
  }
}

TEST_CASE("config defaults") {
  json cfg{{"version", 1}, {"network", {{"inline", network_to_json(ft::three_node())}}}};
  RunConfig rc = config_from_json(cfg);
  CHECK(rc.periods == 1000);
  CHECK(rc.warmup == 200);
  CHECK(rc.replications == 30);
  CHECK(rc.mechanisms.size() == 3);
  CHECK(rc.thetas == std::vector<double>{1.0});
}

TEST_CASE("config with a lane csv source") {
  std::string csv_path = std::string(std::tmpnam(nullptr)) + ".csv";
  {
    std::ofstream out(csv_path);
    out << "origin,destination,annual_tons,average_miles,origin_rate,destination_rate\n"
        << "A,B,36500000,500,3.0,3.0\n"
        << "B,A,29200000,700,2.8,2.9\n";
  }
  json cfg{{"version", 1},
           {"network", {{"lane_csv", csv_path}, {"share", 0.001}}}};
  RunConfig rc = config_from_json(cfg);
  CHECK(rc.network.lane_count() == 2);
  CHECK(rc.network.lane(0).demand.rate == doctest::Approx(36500000.0 / 365.0 / 20.0 * 0.001));
  std::remove(csv_path.c_str());
}

TEST_CASE("fluid solution JSON") {
  Network net = ft::three_node();
  FluidSolution fl = solve_fa(net, FluidMode::CostMinFixedDemand);
  json j = fluid_to_json(net, fl);
  CHECK(j.contains("objective"));
  CHECK(j["kkt_residual"].get<double>() <= 1e-6);
  REQUIRE(j["lanes"].size() == 4);
  json lane = j["lanes"]["0->1"];
  CHECK(lane["posted_price"].get<double>() == doctest::Approx(fl.posted_price[0]));
  CHECK(lane["reserve_price"].get<double>() == doctest::Approx(fl.reserve_price[0]));
}

TEST_CASE("trace CSV header and shape") {
  Network net = ft::three_node();
  FluidSolution fl = solve_fa(net, FluidMode::CostMinFixedDemand);
  SimulationTrace tr = run(net, Mechanism::SP, fl, 3, 0, 1);
  std::string csv = trace_csv(net, tr);
  CHECK(csv.rfind("period,lane,S,D,X,Y,V,P,penalty,instant_bookings\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * net.lane_count());
}
