#pragma once

#include <string>
#include <vector>

#include "freight/fluid.hpp"
#include "freight/sim.hpp"

namespace freight {

struct MechanismMetrics {
  Mechanism mechanism = Mechanism::SP;
  int replications = 0;
  double kappa_hat = 0.0;  // mean post-warm-up cost per period
  double kappa_se = 0.0;   // between-replication standard error
  double cost_gap_ratio = 0.0;
  double cost_ratio = 0.0;
  double payment_ratio = 0.0;
  double penalty_ratio = 0.0;
  double sp_ratio = 0.0;
  double profit = 0.0;  // NaN when no shipper prices are defined
  double profit_se = 0.0;
};

struct MetricReport {
  double kappa_fa = 0.0;
  double gamma_fa = 0.0;
  std::vector<MechanismMetrics> rows;
};

/// Fluid benchmark cost: sum over lanes of p* ybar* + b (d* - ybar*).
double kappa_fa(const Network& net, const FluidSolution& fluid);

/// Frozen-price per-period fluid revenue (NaN if any lane lacks a price).
double fluid_revenue(const Network& net, const FluidSolution& fluid);

/// Aggregates one replication set per mechanism into the comparison ratios.
/// All sets must share periods/warmup; throws std::invalid_argument otherwise.
MetricReport report(const std::vector<ReplicationSet>& runs, const FluidSolution& fluid,
                    const Network& net);

std::string report_csv(const MetricReport& rep);

}  // namespace freight
