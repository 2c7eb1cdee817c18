#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "freight/cost_distribution.hpp"

namespace freight {

/// Shipper demand on one lane: either a fixed daily rate (optionally with a
/// frozen shipper price for profit accounting) or a linear demand curve
/// d(r) = max(0, intercept - slope * r).
struct DemandSpec {
  enum class Kind { FixedRate, LinearCurve };
  Kind kind = Kind::FixedRate;
  double rate = 0.0;                                    // FixedRate
  double shipper_rate = std::nan("");                   // optional, FixedRate
  double intercept = 0.0;                               // LinearCurve
  double slope = 0.0;                                   // LinearCurve

  static DemandSpec fixed(double d, double r = std::nan("")) {
    DemandSpec s;
    s.kind = Kind::FixedRate;
    s.rate = d;
    s.shipper_rate = r;
    return s;
  }
  static DemandSpec linear(double intercept, double slope) {
    DemandSpec s;
    s.kind = Kind::LinearCurve;
    s.intercept = intercept;
    s.slope = slope;
    return s;
  }

  double at(double r) const {
    if (kind == Kind::FixedRate) return rate;
    return std::max(0.0, intercept - slope * r);
  }
  /// Inverse demand for the linear curve.
  double price_for(double d) const { return (intercept - d) / slope; }
};

struct Lane {
  int from = 0;
  int to = 0;
  double arrival_rate = 0.0;  // lambda, exogenous carriers/period
  double stay_prob = 0.0;     // q_ij: finishing at `from`, take this lane next
  double penalty = 0.0;       // b, money per unmatched load
  int travel_time = 1;        // tau, periods
  CostDistribution cost = CostDistribution::uniform(0.0, 1.0);
  DemandSpec demand;
};

/// The lane graph with all per-lane stochastic and economic parameters.
/// Immutable after construction; safe for shared reads.
class Network {
 public:
  Network(int nodes, std::vector<Lane> lanes);

  int node_count() const { return nodes_; }
  int lane_count() const { return static_cast<int>(lanes_.size()); }
  const Lane& lane(int k) const { return lanes_[k]; }
  const std::vector<Lane>& lanes() const { return lanes_; }

  /// Lane indices leaving / entering a node.
  const std::vector<int>& out_lanes(int node) const { return out_[node]; }
  const std::vector<int>& in_lanes(int node) const { return in_[node]; }

  /// Node names used by calibrated networks; empty otherwise.
  const std::vector<std::string>& node_names() const { return names_; }
  void set_node_names(std::vector<std::string> names);

 private:
  void validate() const;

  int nodes_;
  std::vector<Lane> lanes_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<std::string> names_;
};

}  // namespace freight
