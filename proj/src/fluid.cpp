#include "freight/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freight {

namespace {

constexpr double kInteriorMargin = 1e-9;  // keep ybar/lambdabar off 1

struct Gradient {
  Eigen::VectorXd wrt_demand;
  Eigen::VectorXd wrt_flow;
};

Gradient objective_gradient(const Network& net, FluidMode mode,
                            const Eigen::VectorXd& d, const Eigen::VectorXd& y) {
  const int m = net.lane_count();
  Eigen::VectorXd lam = total_inflow(net, y);
  Gradient g{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
  Eigen::VectorXd x(m), qslope(m);
  for (int k = 0; k < m; ++k) {
    x[k] = y[k] / lam[k];
    qslope[k] = net.lane(k).cost.quantile_slope(std::clamp(x[k], 0.0, 1.0));
  }
  for (int k = 0; k < m; ++k) {
    const Lane& l = net.lane(k);
    double xk = std::clamp(x[k], 0.0, 1.0);
    // Direct payment term d(Q(x) ybar)/d ybar plus penalty relief.
    double gk = -(l.cost.quantile(xk) + qslope[k] * xk) + l.penalty;
    // Downstream coupling: loading this lane raises inflow on lanes out of
    // its destination, which lowers their payment rate.
    for (int mlane : net.out_lanes(l.to)) {
      double xm = std::clamp(x[mlane], 0.0, 1.0);
      gk += net.lane(mlane).stay_prob * qslope[mlane] * xm * xm;
    }
    g.wrt_flow[k] = gk;
    if (mode == FluidMode::ProfitMax) {
      const DemandSpec& ds = l.demand;
      g.wrt_demand[k] = (ds.intercept - 2.0 * d[k]) / ds.slope - l.penalty;
    }
  }
  return g;
}

/// Feasible-point map: clips to the box/coupling constraints and then caps
/// ybar below (1 - margin) * lambdabar by fixed-point passes.
void project(const Network& net, FluidMode mode, Eigen::VectorXd& d, Eigen::VectorXd& y) {
  const int m = net.lane_count();
  for (int k = 0; k < m; ++k) {
    if (mode == FluidMode::ProfitMax) {
      if (d[k] < 0.0) d[k] = 0.0;
      if (y[k] > d[k]) {
        double v = 0.5 * (y[k] + d[k]);
        d[k] = std::max(v, 0.0);
      }
    }
    y[k] = std::clamp(y[k], 0.0, d[k]);
  }
  for (int pass = 0; pass < 200; ++pass) {
    Eigen::VectorXd lam = total_inflow(net, y);
    bool changed = false;
    for (int k = 0; k < m; ++k) {
      double cap = (1.0 - kInteriorMargin) * lam[k];
      if (y[k] > cap) {
        y[k] = cap;
        changed = true;
      }
    }
    if (!changed) break;
  }
}

double stationarity_residual(const Network& net, FluidMode mode,
                             const Eigen::VectorXd& d, const Eigen::VectorXd& y) {
  const int m = net.lane_count();
  Eigen::VectorXd lam = total_inflow(net, y);
  Gradient g = objective_gradient(net, mode, d, y);
  double scale = std::max(1.0, std::max(d.lpNorm<Eigen::Infinity>(), y.lpNorm<Eigen::Infinity>()));
  double act = 1e-7 * scale;
  double res = 0.0;
  for (int k = 0; k < m; ++k) {
    double upper = std::min(d[k], lam[k]);
    bool at_lower = y[k] <= act;
    bool at_upper = y[k] >= upper - act;
    double gy = g.wrt_flow[k];
    double ry;
    if (at_lower && at_upper)
      ry = 0.0;
    else if (at_lower)
      ry = std::max(0.0, gy);
    else if (at_upper)
      ry = std::max(0.0, -gy);
    else
      ry = std::abs(gy);
    // When the demand cap binds in profit-max mode, a joint move of (d, ybar)
    // is still feasible; measure stationarity along it instead.
    if (mode == FluidMode::ProfitMax) {
      double gd = g.wrt_demand[k];
      bool coupled = std::abs(d[k] - y[k]) <= act;
      double rd;
      if (coupled) {
        rd = std::max(0.0, gd);  // raising d alone
        double joint = gd + gy;
        if (y[k] > act) rd = std::max(rd, std::max(0.0, -joint));
        if (y[k] < lam[k] - act) rd = std::max(rd, std::max(0.0, joint));
        if (at_upper) ry = std::min(ry, rd);
      } else {
        rd = (d[k] <= act) ? std::max(0.0, gd) : std::abs(gd);
      }
      res = std::max(res, rd);
    }
    res = std::max(res, ry);
  }
  return res;
}

double primal_violation(const Network& net, const Eigen::VectorXd& d, const Eigen::VectorXd& y) {
  Eigen::VectorXd lam = total_inflow(net, y);
  double v = 0.0;
  for (int k = 0; k < net.lane_count(); ++k) {
    v = std::max(v, -y[k]);
    v = std::max(v, y[k] - d[k]);
    v = std::max(v, y[k] - lam[k]);
    v = std::max(v, -d[k]);
  }
  return std::max(v, 0.0);
}

}  // namespace

Eigen::VectorXd total_inflow(const Network& net, const Eigen::VectorXd& y) {
  const int m = net.lane_count();
  Eigen::VectorXd lam(m);
  for (int k = 0; k < m; ++k) {
    const Lane& l = net.lane(k);
    double recirculated = 0.0;
    for (int in : net.in_lanes(l.from)) recirculated += y[in];
    lam[k] = l.arrival_rate + l.stay_prob * recirculated;
  }
  return lam;
}

double fluid_objective(const Network& net, FluidMode mode,
                       const Eigen::VectorXd& d, const Eigen::VectorXd& y) {
  Eigen::VectorXd lam = total_inflow(net, y);
  double obj = 0.0;
  for (int k = 0; k < net.lane_count(); ++k) {
    const Lane& l = net.lane(k);
    double x = std::clamp(y[k] / lam[k], 0.0, 1.0);
    double revenue = 0.0;
    if (mode == FluidMode::ProfitMax) {
      revenue = l.demand.price_for(d[k]) * d[k];
    } else if (std::isfinite(l.demand.shipper_rate)) {
      revenue = l.demand.shipper_rate * d[k];
    }
    obj += revenue - l.cost.quantile(x) * y[k] - l.penalty * (d[k] - y[k]);
  }
  return obj;
}

FluidSolution solve_fa(const Network& net, FluidMode mode, const SolverOptions& opts) {
  const int m = net.lane_count();
  for (int k = 0; k < m; ++k) {
    const DemandSpec& ds = net.lane(k).demand;
    if (mode == FluidMode::ProfitMax && ds.kind != DemandSpec::Kind::LinearCurve)
      throw std::invalid_argument("solve_fa: profit-max mode needs linear demand curves");
    if (mode == FluidMode::CostMinFixedDemand && ds.kind != DemandSpec::Kind::FixedRate)
      throw std::invalid_argument("solve_fa: cost-min mode needs fixed demand rates");
  }

  Eigen::VectorXd d(m), y = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    const DemandSpec& ds = net.lane(k).demand;
    d[k] = (mode == FluidMode::ProfitMax) ? 0.5 * ds.intercept : ds.rate;
  }
  project(net, mode, d, y);

  double step = 1.0;
  double obj = fluid_objective(net, mode, d, y);
  int iter = 0;
  double res = stationarity_residual(net, mode, d, y);
  for (; iter < opts.max_iters && res > opts.tolerance; ++iter) {
    Gradient g = objective_gradient(net, mode, d, y);
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      Eigen::VectorXd dn = d, yn = y;
      if (mode == FluidMode::ProfitMax) dn += step * g.wrt_demand;
      yn += step * g.wrt_flow;
      project(net, mode, dn, yn);
      double predicted = g.wrt_flow.dot(yn - y);
      if (mode == FluidMode::ProfitMax) predicted += g.wrt_demand.dot(dn - d);
      double obj_n = fluid_objective(net, mode, dn, yn);
      if (obj_n >= obj + 1e-4 * predicted - 1e-15 * std::abs(obj)) {
        d = dn;
        y = yn;
        obj = obj_n;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) step *= 1.6;
    res = stationarity_residual(net, mode, d, y);
    if (!accepted && res > opts.tolerance) break;  // step collapsed
  }

  FluidSolution sol;
  sol.demand = d;
  sol.loaded_flow = y;
  sol.total_inflow = total_inflow(net, y);
  sol.iterations = iter;
  derive_prices(net, mode, sol);
  sol.objective = obj;
  sol.kkt_residual = std::max(res, primal_violation(net, d, y));
  if (sol.kkt_residual > opts.tolerance) {
    throw std::runtime_error("solve_fa: no convergence, best residual " +
                             std::to_string(sol.kkt_residual) + " after " +
                             std::to_string(iter) + " iterations");
  }
  return sol;
}

double kkt_residual(const Network& net, FluidMode mode, const FluidSolution& sol) {
  double viol = primal_violation(net, sol.demand, sol.loaded_flow);
  double stat = stationarity_residual(net, mode, sol.demand, sol.loaded_flow);
  return std::max(viol, stat);
}

FluidSolution& derive_prices(const Network& net, FluidMode mode, FluidSolution& sol) {
  const int m = net.lane_count();
  sol.choice_prob.resize(m);
  sol.posted_price.resize(m);
  sol.reserve_price.resize(m);
  sol.shipper_price.resize(m);
  for (int k = 0; k < m; ++k) {
    const Lane& l = net.lane(k);
    if (!(sol.total_inflow[k] > 0.0))
      throw std::runtime_error("derive_prices: degenerate lane with zero inflow");
    double x = std::clamp(sol.loaded_flow[k] / sol.total_inflow[k], 0.0, 1.0);
    sol.choice_prob[k] = x;
    sol.posted_price[k] = l.cost.quantile(x);
    double psi_inv = (l.penalty >= l.cost.virtual_cost(l.cost.lower()))
                         ? l.cost.inverse_virtual_cost(l.penalty)
                         : l.cost.lower();
    sol.reserve_price[k] = std::max(psi_inv, sol.posted_price[k]);
    if (mode == FluidMode::ProfitMax)
      sol.shipper_price[k] = l.demand.price_for(sol.demand[k]);
    else
      sol.shipper_price[k] = l.demand.shipper_rate;
  }
  return sol;
}

Network scale_instance(const Network& net, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("scale_instance: theta must be positive");
  std::vector<Lane> lanes = net.lanes();
  for (Lane& l : lanes) {
    l.arrival_rate *= theta;
    if (l.demand.kind == DemandSpec::Kind::FixedRate) {
      l.demand.rate *= theta;
    } else {
      // Scale intercept and slope together so the demand rate at any given
      // price is multiplied by theta.
      l.demand.intercept *= theta;
      l.demand.slope *= theta;
    }
  }
  Network scaled(net.node_count(), std::move(lanes));
  if (!net.node_names().empty()) scaled.set_node_names(net.node_names());
  return scaled;
}

}  // namespace freight
