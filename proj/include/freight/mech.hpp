#pragma once

#include <functional>
#include <random>
#include <vector>

namespace freight {

enum class Mechanism { SP, AUC, AUC_P, HYB };

const char* mechanism_name(Mechanism m);
Mechanism mechanism_from_name(const std::string& name);

/// One lane-period's worth of market input: the reported carrier costs, the
/// integer demand, and the operating prices.
struct LaneAuctionInput {
  std::vector<double> bids;
  int demand = 0;
  double reserve = 0.0;       // xi (AUC) or p* (AUC-P)
  double posted_price = 0.0;  // p*
};

struct LaneOutcome {
  std::vector<int> winners;           // indices into bids
  double payment_per_winner = 0.0;
  std::vector<int> instant_bookings;  // winners booked at the posted price
  int booked() const { return static_cast<int>(winners.size()); }
  double total_payment() const { return payment_per_winner * booked(); }
};

/// Posted price: scanning carriers in arrival order, each carrier with bid
/// <= p* books one load while loads remain.
LaneOutcome sp_allocate(const LaneAuctionInput& input, const std::vector<int>& arrival_order);

/// Uniform price auction with reserve: the lowest min(D, #{bids <= xi}) bids
/// win and every winner is paid min(C^[D+1], xi), with C^[D+1] read as the
/// reserve when fewer than D+1 bids exist. Ties are broken by a shuffle drawn
/// from rng before the stable sort.
LaneOutcome auc_allocate(const LaneAuctionInput& input, std::mt19937_64& rng);

/// Hybrid: posted-price branch when more than D carriers bid at or below p*,
/// otherwise the uniform price auction with reserve xi >= p*. Throws
/// std::invalid_argument when xi < p*.
LaneOutcome hyb_allocate(const LaneAuctionInput& input, const std::vector<int>& arrival_order,
                         std::mt19937_64& rng);

/// Allocation function signature used by the incentive-compatibility checker.
using AllocFn =
    std::function<LaneOutcome(const LaneAuctionInput&, const std::vector<int>& arrival_order,
                              std::mt19937_64& tie_rng)>;

AllocFn mechanism_fn(Mechanism m);

struct IcReport {
  double max_regret = 0.0;  // best payoff improvement any deviation found
  int ir_violations = 0;    // trials where the truthful payoff was negative
};

/// Randomized incentive-compatibility / individual-rationality verifier:
/// draws random lane inputs, picks a focal carrier and compares the truthful
/// payoff against random deviation bids with everyone else truthful.
IcReport verify_ic(const AllocFn& mech, int trials, std::mt19937_64& rng,
                   int deviations_per_trial = 50);

}  // namespace freight
