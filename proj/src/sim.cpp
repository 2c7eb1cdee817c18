#include "freight/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace freight {

namespace {

double window_mean(const SimulationTrace& tr, double (*pick)(const LanePeriod&)) {
  if (tr.periods <= tr.warmup) return 0.0;
  double total = 0.0;
  for (int t = tr.warmup; t < tr.periods; ++t)
    for (const LanePeriod& lp : tr.outcomes[t].lanes) total += pick(lp);
  return total / (tr.periods - tr.warmup);
}

void sample_costs(std::vector<double>& costs, int count, const Lane& lane,
                  const StreamRng& rng, int lane_idx, int period) {
  costs.resize(count);
  std::mt19937_64 eng = rng.engine(Stream::Costs, lane_idx, period);
  for (double& c : costs) c = lane.cost.sample(eng);
}

int sample_demand(const FluidSolution& fluid, int lane_idx, int period, const StreamRng& rng) {
  std::mt19937_64 eng = rng.engine(Stream::Demand, lane_idx, period);
  std::poisson_distribution<int> pois(fluid.demand[lane_idx]);
  return pois(eng);
}

}  // namespace

double SimulationTrace::mean_cost() const { return mean_payment() + mean_penalty(); }
double SimulationTrace::mean_payment() const {
  return window_mean(*this, +[](const LanePeriod& lp) { return lp.payment; });
}
double SimulationTrace::mean_penalty() const {
  return window_mean(*this, +[](const LanePeriod& lp) { return lp.penalty_cost; });
}
double SimulationTrace::mean_booked() const {
  return window_mean(*this, +[](const LanePeriod& lp) { return static_cast<double>(lp.booked); });
}
double SimulationTrace::mean_instant() const {
  return window_mean(*this, +[](const LanePeriod& lp) { return static_cast<double>(lp.instant); });
}
double SimulationTrace::mean_available() const {
  return window_mean(*this,
                     +[](const LanePeriod& lp) { return static_cast<double>(lp.available); });
}

MarketState init_state(const Network& net, const FluidSolution& fluid, double share,
                       const StreamRng& rng) {
  if (!(share > 0.0 && share <= 1.0))
    throw std::invalid_argument("init_state: share must be in (0,1]");
  const int m = net.lane_count();
  MarketState st;
  st.period = 1;
  st.costs.resize(m);
  st.demand.resize(m);
  st.pipeline.resize(m);
  for (int k = 0; k < m; ++k) {
    int carriers = static_cast<int>(std::ceil(fluid.total_inflow[k] * share));
    sample_costs(st.costs[k], carriers, net.lane(k), rng, k, 1);
    st.demand[k] = sample_demand(fluid, k, 1, rng);
    st.pipeline[k].assign(net.lane(k).travel_time, 0);
  }
  return st;
}

PeriodOutcome step(MarketState& state, const Network& net, Mechanism mech,
                   const FluidSolution& prices, const StreamRng& rng) {
  const int m = net.lane_count();
  const int t = state.period;
  PeriodOutcome out;
  out.lanes.resize(m);

  // (a)+(b): run the mechanism on every lane.
  for (int k = 0; k < m; ++k) {
    LanePeriod& lp = out.lanes[k];
    const Lane& lane = net.lane(k);
    lp.available = static_cast<int>(state.costs[k].size());
    lp.demand = state.demand[k];

    LaneAuctionInput input;
    input.bids = state.costs[k];
    input.demand = lp.demand;
    input.posted_price = prices.posted_price[k];
    input.reserve =
        (mech == Mechanism::AUC || mech == Mechanism::HYB) ? prices.reserve_price[k]
                                                           : prices.posted_price[k];

    std::vector<int> order(input.bids.size());
    std::iota(order.begin(), order.end(), 0);
    {
      std::mt19937_64 order_rng = rng.engine(Stream::ArrivalOrder, k, t);
      std::shuffle(order.begin(), order.end(), order_rng);
    }
    std::mt19937_64 tie_rng = rng.engine(Stream::Shuffle, k, t);

    LaneOutcome lo;
    switch (mech) {
      case Mechanism::SP: lo = sp_allocate(input, order); break;
      case Mechanism::AUC:
      case Mechanism::AUC_P: lo = auc_allocate(input, tie_rng); break;
      case Mechanism::HYB: lo = hyb_allocate(input, order, tie_rng); break;
    }

    double threshold = (mech == Mechanism::SP) ? input.posted_price : input.reserve;
    for (double b : input.bids)
      if (b <= threshold) ++lp.chose;
    lp.booked = lo.booked();
    lp.left = lp.available - lp.booked;
    lp.instant = static_cast<int>(lo.instant_bookings.size());
    lp.payment = lo.total_payment();
    lp.penalty_cost = lane.penalty * (lp.demand - lp.booked);

    // (c): loaded carriers enter the transit pipeline.
    state.pipeline[k][lane.travel_time - 1] += lp.booked;
  }

  // (c) continued: retention/repositioning of carriers completing transit.
  std::vector<int> retained(m, 0);
  for (int k = 0; k < m; ++k) {
    int completing = state.pipeline[k].front();
    state.pipeline[k].erase(state.pipeline[k].begin());
    state.pipeline[k].push_back(0);
    if (completing == 0) continue;
    const int at_node = net.lane(k).to;
    std::mt19937_64 eng = rng.engine(Stream::Retention, k, t);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // One categorical draw per carrier keeps prefix couplings exact.
    for (int c = 0; c < completing; ++c) {
      double uu = u(eng);
      double cum = 0.0;
      for (int next : net.out_lanes(at_node)) {
        cum += net.lane(next).stay_prob;
        if (uu < cum) {
          ++retained[next];
          break;
        }
      }
    }
  }

  // (d)+(e): next-period carriers and demand.
  for (int k = 0; k < m; ++k) {
    std::mt19937_64 eng = rng.engine(Stream::Arrivals, k, t + 1);
    std::poisson_distribution<int> pois(net.lane(k).arrival_rate);
    int carriers = retained[k] + pois(eng);
    sample_costs(state.costs[k], carriers, net.lane(k), rng, k, t + 1);
    state.demand[k] = sample_demand(prices, k, t + 1, rng);
  }
  state.period = t + 1;
  return out;
}

SimulationTrace run(const Network& net, Mechanism mech, const FluidSolution& fluid, int periods,
                    int warmup, std::uint64_t seed, double share) {
  if (periods <= warmup || warmup < 0)
    throw std::invalid_argument("run: need periods > warmup >= 0");
  StreamRng rng(seed);
  MarketState state = init_state(net, fluid, share, rng);
  SimulationTrace tr;
  tr.mechanism = mech;
  tr.seed = seed;
  tr.periods = periods;
  tr.warmup = warmup;
  tr.outcomes.reserve(periods);
  for (int t = 0; t < periods; ++t) tr.outcomes.push_back(step(state, net, mech, fluid, rng));
  return tr;
}

ReplicationSet run_replications(const Network& net, Mechanism mech, const FluidSolution& fluid,
                                int periods, int warmup, int n_reps, std::uint64_t base_seed,
                                int parallel_threads, double share) {
  if (n_reps < 1) throw std::invalid_argument("run_replications: n_reps must be >= 1");
  ReplicationSet set;
  set.traces.resize(n_reps);
  if (parallel_threads <= 1) {
    for (int r = 0; r < n_reps; ++r)
      set.traces[r] = run(net, mech, fluid, periods, warmup, base_seed + r, share);
    return set;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next.fetch_add(1); r < n_reps; r = next.fetch_add(1))
      set.traces[r] = run(net, mech, fluid, periods, warmup, base_seed + r, share);
  };
  std::vector<std::future<void>> futures;
  for (int i = 0; i < parallel_threads; ++i)
    futures.push_back(std::async(std::launch::async, worker));
  for (auto& f : futures) f.get();
  return set;
}

DominanceReport coupled_dominance_check(const Network& net, const FluidSolution& fluid,
                                        int periods, int warmup, int n_reps,
                                        std::uint64_t seed) {
  const int m = net.lane_count();
  DominanceReport rep;

  // Pathwise part: identical streams realize the proof's coupling, with the
  // extra AUC carriers consuming the extra prefix draws.
  for (int r = 0; r < n_reps; ++r) {
    SimulationTrace auc = run(net, Mechanism::AUC, fluid, periods, warmup, seed + r);
    SimulationTrace aucp = run(net, Mechanism::AUC_P, fluid, periods, warmup, seed + r);
    for (int t = 0; t < periods && rep.pathwise_ok; ++t)
      for (int k = 0; k < m; ++k)
        if (auc.outcomes[t].lanes[k].available < aucp.outcomes[t].lanes[k].available) {
          rep.pathwise_ok = false;
          break;
        }
  }

  // Empirical-CDF part on independent seeds.
  std::vector<std::vector<int>> s_auc(m), s_aucp(m);
  for (int r = 0; r < n_reps; ++r) {
    SimulationTrace auc = run(net, Mechanism::AUC, fluid, periods, warmup, seed + 104729 + r);
    SimulationTrace aucp = run(net, Mechanism::AUC_P, fluid, periods, warmup, seed + 224737 + r);
    for (int t = warmup; t < periods; ++t)
      for (int k = 0; k < m; ++k) {
        s_auc[k].push_back(auc.outcomes[t].lanes[k].available);
        s_aucp[k].push_back(aucp.outcomes[t].lanes[k].available);
      }
  }
  rep.samples_per_arm = static_cast<int>(s_auc.empty() ? 0 : s_auc[0].size());
  rep.lane_exceedance.resize(m, 0.0);
  for (int k = 0; k < m; ++k) {
    std::sort(s_auc[k].begin(), s_auc[k].end());
    std::sort(s_aucp[k].begin(), s_aucp[k].end());
    const double n = static_cast<double>(rep.samples_per_arm);
    int max_s = std::max(s_auc[k].back(), s_aucp[k].back());
    double worst = 0.0;
    for (int s = 0; s <= max_s; ++s) {
      double cdf_auc =
          (std::upper_bound(s_auc[k].begin(), s_auc[k].end(), s) - s_auc[k].begin()) / n;
      double cdf_aucp =
          (std::upper_bound(s_aucp[k].begin(), s_aucp[k].end(), s) - s_aucp[k].begin()) / n;
      worst = std::max(worst, cdf_auc - cdf_aucp);
    }
    rep.lane_exceedance[k] = worst;
    rep.max_exceedance = std::max(rep.max_exceedance, worst);
  }
  rep.dkw_band = 2.0 * std::sqrt(std::log(2.0 / 0.01) / (2.0 * rep.samples_per_arm));
  return rep;
}

}  // namespace freight
