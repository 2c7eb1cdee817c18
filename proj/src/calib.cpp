#include "freight/calib.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace freight {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_positive(const std::string& s, const std::string& what, int line_no) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("lane csv line " + std::to_string(line_no) + ": non-numeric " + what);
  }
  if (pos != s.size() || !std::isfinite(v) || v <= 0.0)
    throw std::runtime_error("lane csv line " + std::to_string(line_no) + ": " + what +
                             " must be a positive number");
  return v;
}

}  // namespace

std::vector<LaneRecord> load_lane_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("lane csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("lane csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected =
      "origin,destination,annual_tons,average_miles,origin_rate,destination_rate";
  if (line != expected)
    throw std::runtime_error("lane csv: header mismatch, expected '" + expected + "'");

  std::vector<LaneRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6)
      throw std::runtime_error("lane csv line " + std::to_string(line_no) +
                               ": expected 6 fields, got " + std::to_string(f.size()));
    LaneRecord r;
    r.origin = f[0];
    r.destination = f[1];
    r.annual_tons = parse_positive(f[2], "annual_tons", line_no);
    r.average_miles = parse_positive(f[3], "average_miles", line_no);
    r.origin_rate = parse_positive(f[4], "origin_rate", line_no);
    r.destination_rate = parse_positive(f[5], "destination_rate", line_no);
    records.push_back(r);
  }
  return records;
}

Network calibrate(const std::vector<LaneRecord>& records, double share, const CalibOptions& opts,
                  std::vector<std::string>* warnings) {
  if (!(share > 0.0 && share <= 1.0))
    throw std::invalid_argument("calibrate: share must be in (0,1]");

  struct Raw {
    std::string origin, destination;
    double demand, miles, rate;
  };
  std::vector<Raw> kept;
  for (const LaneRecord& r : records) {
    double d = (r.annual_tons / 365.0) / opts.container_volume * share;
    if (d < opts.min_demand) continue;
    double rate = 0.5 * (r.origin_rate + r.destination_rate);
    Raw raw;
    raw.origin = r.origin;
    raw.destination = r.destination;
    raw.demand = d;
    raw.miles = r.average_miles;
    // Blended shipping cost: 10% of demand at the doubled penalty rate.
    raw.rate = rate * r.average_miles /
               (2.0 * (1.0 - opts.service_level) + opts.service_level);
    kept.push_back(raw);
  }
  if (kept.empty()) throw std::runtime_error("calibrate: no lanes above the demand cutoff");

  std::map<std::string, int> node_ids;
  std::vector<std::string> names;
  auto node_id = [&](const std::string& name) {
    auto it = node_ids.find(name);
    if (it != node_ids.end()) return it->second;
    int id = static_cast<int>(names.size());
    node_ids[name] = id;
    names.push_back(name);
    return id;
  };

  const int m = static_cast<int>(kept.size());
  std::vector<Lane> lanes(m);
  std::vector<double> out_demand;  // per node, total demand leaving it
  for (const Raw& r : kept) {
    int from = node_id(r.origin);
    (void)node_id(r.destination);
    if (static_cast<int>(out_demand.size()) < static_cast<int>(names.size()))
      out_demand.resize(names.size(), 0.0);
    out_demand[from] += r.demand;
  }
  out_demand.resize(names.size(), 0.0);

  for (int k = 0; k < m; ++k) {
    const Raw& r = kept[k];
    Lane& l = lanes[k];
    l.from = node_id(r.origin);
    l.to = node_id(r.destination);
    l.travel_time = static_cast<int>(std::ceil(r.miles / opts.miles_per_period));
    l.cost = CostDistribution::uniform(0.5 * r.rate, 1.5 * r.rate);
    l.penalty = opts.penalty_multiple * r.rate;
    l.demand = DemandSpec::fixed(r.demand);
    l.stay_prob = opts.stay_prob * r.demand / out_demand[l.from];
  }

  // Back out exogenous arrivals from flow balance with ybar = service * d and
  // lambdabar = ybar / x.
  std::vector<double> ybar(m), lambdabar(m);
  for (int k = 0; k < m; ++k) {
    ybar[k] = opts.service_level * kept[k].demand;
    lambdabar[k] = ybar[k] / opts.choice_prob;
  }
  std::vector<double> inbound(names.size(), 0.0);
  for (int k = 0; k < m; ++k) inbound[lanes[k].to] += ybar[k];
  for (int k = 0; k < m; ++k) {
    double lambda = lambdabar[k] - lanes[k].stay_prob * inbound[lanes[k].from];
    if (lambda <= 0.0) {
      if (warnings)
        warnings->push_back("lane " + kept[k].origin + "->" + kept[k].destination +
                            ": back-solved arrival rate " + std::to_string(lambda) +
                            " clamped to floor");
      lambda = opts.lambda_floor;
    }
    lanes[k].arrival_rate = lambda;
  }

  Network net(static_cast<int>(names.size()), std::move(lanes));
  net.set_node_names(std::move(names));
  return net;
}

}  // namespace freight
