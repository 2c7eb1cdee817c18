#pragma once

#include <Eigen/Dense>

#include "freight/network.hpp"

namespace freight {

enum class FluidMode { ProfitMax, CostMinFixedDemand };

struct SolverOptions {
  double tolerance = 1e-6;
  int max_iters = 100000;
};

/// Optimal fluid variables and the derived operating prices. Vectors are
/// indexed by lane.
struct FluidSolution {
  Eigen::VectorXd demand;        // d*
  Eigen::VectorXd loaded_flow;   // ybar*
  Eigen::VectorXd total_inflow;  // lambdabar*
  Eigen::VectorXd choice_prob;   // x* = ybar*/lambdabar*
  Eigen::VectorXd posted_price;  // p* = F^{-1}(x*)
  Eigen::VectorXd reserve_price; // xi* = max{psi^{-1}(b), p*}
  Eigen::VectorXd shipper_price; // r*, NaN where no price is defined
  double objective = 0.0;        // per-period profit at the optimum
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Total carrier inflow implied by a loaded-flow vector via flow balance:
/// lambdabar_ij = lambda_ij + q_ij * sum_{k in delta-(i)} ybar_ki.
Eigen::VectorXd total_inflow(const Network& net, const Eigen::VectorXd& loaded_flow);

/// Solves the convex fluid program by projected gradient with backtracking
/// line search. Throws std::runtime_error (carrying the best residual) if the
/// KKT residual does not reach opts.tolerance within opts.max_iters.
FluidSolution solve_fa(const Network& net, FluidMode mode, const SolverOptions& opts = {});

/// Max of primal-feasibility violation and a projected-gradient stationarity
/// measure; ~0 at an exact optimum.
double kkt_residual(const Network& net, FluidMode mode, const FluidSolution& sol);

/// Populates x*, p*, xi* (and r* in profit-max mode) from d*, ybar*.
FluidSolution& derive_prices(const Network& net, FluidMode mode, FluidSolution& sol);

/// Copy of the network with demand (or demand-curve intercepts) and exogenous
/// arrival rates multiplied by theta.
Network scale_instance(const Network& net, double theta);

/// Fluid profit objective at a feasible point (d, ybar); shipper revenue
/// counts only lanes that define a price.
double fluid_objective(const Network& net, FluidMode mode,
                       const Eigen::VectorXd& demand, const Eigen::VectorXd& loaded_flow);

}  // namespace freight
