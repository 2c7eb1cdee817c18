#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "freight/calib.hpp"
#include "freight/fluid.hpp"
#include "freight/metrics.hpp"
#include "freight/sim.hpp"

namespace freight {

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

/// A fully resolved experiment configuration. Loaded from a single versioned
/// JSON document; unknown keys are rejected.
struct RunConfig {
  explicit RunConfig(Network n) : network(std::move(n)) {}

  Network network;
  std::vector<Mechanism> mechanisms;
  FluidMode mode = FluidMode::CostMinFixedDemand;
  SolverOptions solver;
  int periods = 1000;
  int warmup = 200;
  int replications = 30;
  std::uint64_t seed = 1;
  std::vector<double> thetas = {1.0};
  double share = 1.0;
  std::string output_dir = "out";
};

RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

nlohmann::json fluid_to_json(const Network& net, const FluidSolution& sol);
nlohmann::json metric_report_to_json(const MetricReport& rep);

/// Per-period trace dump: period,lane,S,D,X,Y,V,P,penalty,instant_bookings.
std::string trace_csv(const Network& net, const SimulationTrace& trace);

}  // namespace freight
