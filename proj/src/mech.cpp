#include "freight/mech.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace freight {

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::SP: return "SP";
    case Mechanism::AUC: return "AUC";
    case Mechanism::AUC_P: return "AUC-P";
    case Mechanism::HYB: return "HYB";
  }
  return "?";
}

Mechanism mechanism_from_name(const std::string& name) {
  if (name == "SP") return Mechanism::SP;
  if (name == "AUC") return Mechanism::AUC;
  if (name == "AUC-P" || name == "AUCP") return Mechanism::AUC_P;
  if (name == "HYB") return Mechanism::HYB;
  throw std::invalid_argument("unknown mechanism: " + name);
}

LaneOutcome sp_allocate(const LaneAuctionInput& input, const std::vector<int>& arrival_order) {
  LaneOutcome out;
  out.payment_per_winner = input.posted_price;
  int remaining = input.demand;
  for (int idx : arrival_order) {
    if (remaining == 0) break;
    if (input.bids[idx] <= input.posted_price) {
      out.winners.push_back(idx);
      --remaining;
    }
  }
  if (out.winners.empty()) out.payment_per_winner = 0.0;
  out.instant_bookings = out.winners;
  return out;
}

LaneOutcome auc_allocate(const LaneAuctionInput& input, std::mt19937_64& rng) {
  const int n = static_cast<int>(input.bids.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return input.bids[a] < input.bids[b]; });

  int eligible = 0;
  for (double b : input.bids)
    if (b <= input.reserve) ++eligible;
  int k = std::min(input.demand, eligible);

  LaneOutcome out;
  out.winners.assign(order.begin(), order.begin() + k);
  if (k > 0) {
    // Uniform payment: the (D+1)-th lowest bid capped at the reserve; a dummy
    // marginal bidder stands in when fewer than D+1 bids exist.
    double marginal = (n > input.demand) ? input.bids[order[input.demand]] : input.reserve;
    out.payment_per_winner = std::min(marginal, input.reserve);
  }
  return out;
}

LaneOutcome hyb_allocate(const LaneAuctionInput& input, const std::vector<int>& arrival_order,
                         std::mt19937_64& rng) {
  if (input.reserve < input.posted_price)
    throw std::invalid_argument("hyb_allocate: reserve below posted price");
  int instant_supply = 0;
  for (double b : input.bids)
    if (b <= input.posted_price) ++instant_supply;
  if (instant_supply > input.demand) return sp_allocate(input, arrival_order);
  LaneOutcome out = auc_allocate(input, rng);
  for (int w : out.winners)
    if (input.bids[w] <= input.posted_price) out.instant_bookings.push_back(w);
  return out;
}

AllocFn mechanism_fn(Mechanism m) {
  switch (m) {
    case Mechanism::SP:
      return [](const LaneAuctionInput& in, const std::vector<int>& order, std::mt19937_64&) {
        return sp_allocate(in, order);
      };
    case Mechanism::AUC:
      return [](const LaneAuctionInput& in, const std::vector<int>&, std::mt19937_64& rng) {
        return auc_allocate(in, rng);
      };
    case Mechanism::AUC_P:
      return [](const LaneAuctionInput& in, const std::vector<int>&, std::mt19937_64& rng) {
        LaneAuctionInput capped = in;
        capped.reserve = in.posted_price;
        return auc_allocate(capped, rng);
      };
    case Mechanism::HYB:
      return [](const LaneAuctionInput& in, const std::vector<int>& order, std::mt19937_64& rng) {
        return hyb_allocate(in, order, rng);
      };
  }
  throw std::logic_error("mechanism_fn: unreachable");
}

IcReport verify_ic(const AllocFn& mech, int trials, std::mt19937_64& rng,
                   int deviations_per_trial) {
  if (trials < 1) throw std::invalid_argument("verify_ic: trials must be >= 1");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  IcReport report;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + static_cast<int>(u01(rng) * 8.0);
    LaneAuctionInput input;
    input.bids.resize(n);
    for (double& b : input.bids) b = 1.5 * u01(rng);
    input.demand = static_cast<int>(u01(rng) * 6.0);
    input.posted_price = 0.2 + 0.6 * u01(rng);
    input.reserve = input.posted_price + 0.5 * u01(rng);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int focal = static_cast<int>(u01(rng) * n) % n;
    const double true_cost = input.bids[focal];
    const std::uint64_t tie_seed = rng();

    auto payoff = [&](double bid) {
      LaneAuctionInput in = input;
      in.bids[focal] = bid;
      std::mt19937_64 tie_rng(tie_seed);
      LaneOutcome out = mech(in, order, tie_rng);
      bool won = std::find(out.winners.begin(), out.winners.end(), focal) != out.winners.end();
      return won ? out.payment_per_winner - true_cost : 0.0;
    };

    double truthful = payoff(true_cost);
    if (truthful < -1e-12) ++report.ir_violations;
    for (int dev = 0; dev < deviations_per_trial; ++dev) {
      double alt = 1.5 * u01(rng);
      report.max_regret = std::max(report.max_regret, payoff(alt) - truthful);
    }
  }
  return report;
}

}  // namespace freight
