#include "freight/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace freight {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Between-replication mean and standard error of a per-trace statistic.
template <typename F>
MeanSe across_reps(const ReplicationSet& set, F&& stat) {
  const int n = static_cast<int>(set.traces.size());
  double sum = 0.0, sumsq = 0.0;
  for (const SimulationTrace& tr : set.traces) {
    double v = stat(tr);
    sum += v;
    sumsq += v * v;
  }
  MeanSe out;
  out.mean = sum / n;
  if (n > 1) {
    double var = std::max(0.0, (sumsq - n * out.mean * out.mean) / (n - 1));
    out.se = std::sqrt(var / n);
  }
  return out;
}

}  // namespace

double kappa_fa(const Network& net, const FluidSolution& fluid) {
  double total = 0.0;
  for (int k = 0; k < net.lane_count(); ++k) {
    total += fluid.posted_price[k] * fluid.loaded_flow[k] +
             net.lane(k).penalty * (fluid.demand[k] - fluid.loaded_flow[k]);
  }
  return total;
}

double fluid_revenue(const Network& net, const FluidSolution& fluid) {
  double total = 0.0;
  for (int k = 0; k < net.lane_count(); ++k) {
    double r = fluid.shipper_price[k];
    if (!std::isfinite(r)) return std::nan("");
    total += r * fluid.demand[k];
  }
  return total;
}

MetricReport report(const std::vector<ReplicationSet>& runs, const FluidSolution& fluid,
                    const Network& net) {
  MetricReport rep;
  rep.kappa_fa = kappa_fa(net, fluid);
  rep.gamma_fa = fluid.objective;
  const double revenue = fluid_revenue(net, fluid);

  int periods = -1, warmup = -1;
  for (const ReplicationSet& set : runs) {
    if (set.traces.empty()) throw std::invalid_argument("report: empty replication set");
    for (const SimulationTrace& tr : set.traces) {
      if (periods < 0) {
        periods = tr.periods;
        warmup = tr.warmup;
      } else if (tr.periods != periods || tr.warmup != warmup) {
        throw std::invalid_argument("report: traces disagree on periods/warmup");
      }
    }
  }

  for (const ReplicationSet& set : runs) {
    MechanismMetrics row;
    row.mechanism = set.traces.front().mechanism;
    row.replications = static_cast<int>(set.traces.size());
    MeanSe cost = across_reps(set, [](const SimulationTrace& t) { return t.mean_cost(); });
    MeanSe pay = across_reps(set, [](const SimulationTrace& t) { return t.mean_payment(); });
    MeanSe pen = across_reps(set, [](const SimulationTrace& t) { return t.mean_penalty(); });
    double booked = 0.0, instant = 0.0;
    for (const SimulationTrace& tr : set.traces) {
      booked += tr.mean_booked();
      instant += tr.mean_instant();
    }
    row.kappa_hat = cost.mean;
    row.kappa_se = cost.se;
    row.cost_gap_ratio = (cost.mean - rep.kappa_fa) / rep.kappa_fa;
    row.cost_ratio = cost.mean / rep.kappa_fa;
    row.payment_ratio = pay.mean / rep.kappa_fa;
    row.penalty_ratio = pen.mean / rep.kappa_fa;
    row.sp_ratio = booked > 0.0 ? instant / booked : 0.0;
    if (std::isfinite(revenue)) {
      row.profit = revenue - cost.mean;
      row.profit_se = cost.se;
    } else {
      row.profit = std::nan("");
      row.profit_se = std::nan("");
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string report_csv(const MetricReport& rep) {
  std::ostringstream os;
  os << "mechanism,replications,kappa_hat,kappa_se,cost_gap_ratio,cost_ratio,"
        "payment_ratio,penalty_ratio,sp_ratio,profit,kappa_fa\n";
  os.precision(10);
  for (const MechanismMetrics& r : rep.rows) {
    os << mechanism_name(r.mechanism) << ',' << r.replications << ',' << r.kappa_hat << ','
       << r.kappa_se << ',' << r.cost_gap_ratio << ',' << r.cost_ratio << ',' << r.payment_ratio
       << ',' << r.penalty_ratio << ',' << r.sp_ratio << ',' << r.profit << ',' << rep.kappa_fa
       << '\n';
  }
  return os.str();
}

}  // namespace freight
