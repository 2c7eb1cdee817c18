#pragma once

#include <string>
#include <vector>

#include "freight/network.hpp"

namespace freight {

/// One row of the lane-level freight input table.
struct LaneRecord {
  std::string origin;
  std::string destination;
  double annual_tons = 0.0;
  double average_miles = 0.0;
  double origin_rate = 0.0;       // money per mile
  double destination_rate = 0.0;  // money per mile
};

struct CalibOptions {
  double container_volume = 20.0;  // tons per load
  double miles_per_period = 500.0;
  double min_demand = 0.2;         // lanes below this daily rate are dropped
  double penalty_multiple = 2.0;   // b = multiple * p
  double stay_prob = 0.2;          // q_i, split across out-lanes by demand
  double choice_prob = 0.5;        // assumed x for the lambda back-solve
  double service_level = 0.9;      // ybar = service_level * d
  double lambda_floor = 1e-3;
};

/// Parses `origin,destination,annual_tons,average_miles,origin_rate,
/// destination_rate`. Malformed rows raise std::runtime_error naming the line.
std::vector<LaneRecord> load_lane_csv(const std::string& path);

/// Builds a calibrated Network: demand from annual volumes and market share,
/// travel times from miles, uniform cost laws around the blended rate, and
/// exogenous arrivals back-solved from flow balance. Appends a warning per
/// lane whose back-solved arrival rate had to be clamped.
Network calibrate(const std::vector<LaneRecord>& records, double share,
                  const CalibOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

}  // namespace freight
