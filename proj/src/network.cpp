#include "freight/network.hpp"

#include <stdexcept>
#include <utility>

namespace freight {

Network::Network(int nodes, std::vector<Lane> lanes)
    : nodes_(nodes), lanes_(std::move(lanes)), out_(nodes), in_(nodes) {
  if (nodes_ < 1) throw std::invalid_argument("network: need at least one node");
  for (int k = 0; k < lane_count(); ++k) {
    const Lane& l = lanes_[k];
    if (l.from < 0 || l.from >= nodes_ || l.to < 0 || l.to >= nodes_)
      throw std::invalid_argument("network: lane endpoint out of range");
    out_[l.from].push_back(k);
    in_[l.to].push_back(k);
  }
  validate();
}

void Network::validate() const {
  for (const Lane& l : lanes_) {
    if (!(l.arrival_rate > 0.0))
      throw std::invalid_argument("network: lane arrival rate must be positive");
    if (l.stay_prob < 0.0 || l.stay_prob >= 1.0)
      throw std::invalid_argument("network: stay probability must be in [0,1)");
    if (l.penalty < 0.0)
      throw std::invalid_argument("network: penalty must be nonnegative");
    if (l.travel_time < 1)
      throw std::invalid_argument("network: travel time must be >= 1");
    if (l.demand.kind == DemandSpec::Kind::FixedRate) {
      if (!(l.demand.rate > 0.0))
        throw std::invalid_argument("network: fixed demand rate must be positive");
    } else {
      if (!(l.demand.intercept > 0.0) || !(l.demand.slope > 0.0))
        throw std::invalid_argument("network: linear demand needs positive intercept and slope");
    }
  }
  // The leave probability at every node must stay positive.
  for (int j = 0; j < nodes_; ++j) {
    double q_total = 0.0;
    for (int k : out_[j]) q_total += lanes_[k].stay_prob;
    if (q_total >= 1.0)
      throw std::invalid_argument("network: stay probabilities out of a node must sum below 1");
  }
}

void Network::set_node_names(std::vector<std::string> names) {
  if (static_cast<int>(names.size()) != nodes_)
    throw std::invalid_argument("network: one name per node required");
  names_ = std::move(names);
}

}  // namespace freight
