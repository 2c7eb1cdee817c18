#include "freight/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace freight {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        ok = true;
        break;
      }
    if (!ok) throw std::runtime_error("config: unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    throw std::runtime_error("config: missing key '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error("config: bad value for '" + std::string(key) + "' in " + where);
  }
}

std::string lane_key(const Network& net, int k) {
  const Lane& l = net.lane(k);
  std::ostringstream os;
  if (!net.node_names().empty())
    os << net.node_names()[l.from] << "->" << net.node_names()[l.to];
  else
    os << l.from << "->" << l.to;
  return os.str();
}

}  // namespace

json network_to_json(const Network& net) {
  json lanes = json::array();
  for (const Lane& l : net.lanes()) {
    json jl{{"from", l.from},
            {"to", l.to},
            {"lambda", l.arrival_rate},
            {"stay_prob", l.stay_prob},
            {"penalty", l.penalty},
            {"travel_time", l.travel_time},
            {"cost", {{"uniform", {l.cost.lower(), l.cost.upper()}}}}};
    if (l.demand.kind == DemandSpec::Kind::FixedRate) {
      jl["demand"] = {{"rate", l.demand.rate}};
      if (std::isfinite(l.demand.shipper_rate))
        jl["demand"]["shipper_rate"] = l.demand.shipper_rate;
    } else {
      jl["demand"] = {{"intercept", l.demand.intercept}, {"slope", l.demand.slope}};
    }
    lanes.push_back(jl);
  }
  json out{{"nodes", net.node_count()}, {"lanes", lanes}};
  if (!net.node_names().empty()) out["node_names"] = net.node_names();
  return out;
}

Network network_from_json(const json& j) {
  check_keys(j, {"nodes", "lanes", "node_names"}, "network");
  int nodes = require<int>(j, "nodes", "network");
  std::vector<Lane> lanes;
  for (const json& jl : require<json>(j, "lanes", "network")) {
    check_keys(jl, {"from", "to", "lambda", "stay_prob", "penalty", "travel_time", "cost",
                    "demand"},
               "lane");
    Lane l;
    l.from = require<int>(jl, "from", "lane");
    l.to = require<int>(jl, "to", "lane");
    l.arrival_rate = require<double>(jl, "lambda", "lane");
    if (jl.contains("stay_prob")) l.stay_prob = jl.at("stay_prob").get<double>();
    if (jl.contains("penalty")) l.penalty = jl.at("penalty").get<double>();
    if (jl.contains("travel_time")) l.travel_time = jl.at("travel_time").get<int>();
    const json& jc = require<json>(jl, "cost", "lane");
    check_keys(jc, {"uniform"}, "lane.cost");
    auto bounds = require<std::vector<double>>(jc, "uniform", "lane.cost");
    if (bounds.size() != 2) throw std::runtime_error("config: lane.cost.uniform needs [lower,upper]");
    l.cost = CostDistribution::uniform(bounds[0], bounds[1]);
    const json& jd = require<json>(jl, "demand", "lane");
    check_keys(jd, {"rate", "shipper_rate", "intercept", "slope"}, "lane.demand");
    if (jd.contains("rate")) {
      double r = jd.contains("shipper_rate") ? jd.at("shipper_rate").get<double>() : std::nan("");
      l.demand = DemandSpec::fixed(jd.at("rate").get<double>(), r);
    } else {
      l.demand = DemandSpec::linear(require<double>(jd, "intercept", "lane.demand"),
                                    require<double>(jd, "slope", "lane.demand"));
    }
    lanes.push_back(l);
  }
  Network net(nodes, std::move(lanes));
  if (j.contains("node_names"))
    net.set_node_names(j.at("node_names").get<std::vector<std::string>>());
  return net;
}

RunConfig config_from_json(const json& j, const std::string& base_dir) {
  check_keys(j, {"version", "network", "mechanisms", "fluid", "periods", "warmup", "replications",
                 "seed", "thetas", "share", "output_dir"},
             "config");
  if (require<int>(j, "version", "config") != 1)
    throw std::runtime_error("config: unsupported version");

  const json& jn = require<json>(j, "network", "config");
  check_keys(jn, {"inline", "lane_csv", "share", "calib"}, "config.network");
  double calib_share = jn.contains("share") ? jn.at("share").get<double>() : 1.0;
  Network net = [&]() {
    if (jn.contains("inline")) return network_from_json(jn.at("inline"));
    if (!jn.contains("lane_csv"))
      throw std::runtime_error("config: network needs 'inline' or 'lane_csv'");
    std::filesystem::path csv = jn.at("lane_csv").get<std::string>();
    if (csv.is_relative()) csv = std::filesystem::path(base_dir) / csv;
    CalibOptions opts;
    if (jn.contains("calib")) {
      const json& jc = jn.at("calib");
      check_keys(jc, {"container_volume", "miles_per_period", "min_demand", "penalty_multiple",
                      "stay_prob", "choice_prob", "service_level", "lambda_floor"},
                 "config.network.calib");
      if (jc.contains("container_volume")) opts.container_volume = jc.at("container_volume");
      if (jc.contains("miles_per_period")) opts.miles_per_period = jc.at("miles_per_period");
      if (jc.contains("min_demand")) opts.min_demand = jc.at("min_demand");
      if (jc.contains("penalty_multiple")) opts.penalty_multiple = jc.at("penalty_multiple");
      if (jc.contains("stay_prob")) opts.stay_prob = jc.at("stay_prob");
      if (jc.contains("choice_prob")) opts.choice_prob = jc.at("choice_prob");
      if (jc.contains("service_level")) opts.service_level = jc.at("service_level");
      if (jc.contains("lambda_floor")) opts.lambda_floor = jc.at("lambda_floor");
    }
    return calibrate(load_lane_csv(csv.string()), calib_share, opts);
  }();

  RunConfig cfg(std::move(net));
  if (j.contains("mechanisms")) {
    for (const std::string& name : j.at("mechanisms").get<std::vector<std::string>>())
      cfg.mechanisms.push_back(mechanism_from_name(name));
  } else {
    cfg.mechanisms = {Mechanism::SP, Mechanism::AUC, Mechanism::HYB};
  }
  if (cfg.mechanisms.empty()) throw std::runtime_error("config: mechanism list is empty");

  if (j.contains("fluid")) {
    const json& jf = j.at("fluid");
    check_keys(jf, {"mode", "tolerance", "max_iters"}, "config.fluid");
    if (jf.contains("mode")) {
      std::string mode = jf.at("mode");
      if (mode == "cost_min")
        cfg.mode = FluidMode::CostMinFixedDemand;
      else if (mode == "profit_max")
        cfg.mode = FluidMode::ProfitMax;
      else
        throw std::runtime_error("config: fluid.mode must be cost_min or profit_max");
    }
    if (jf.contains("tolerance")) cfg.solver.tolerance = jf.at("tolerance");
    if (jf.contains("max_iters")) cfg.solver.max_iters = jf.at("max_iters");
  }

  if (j.contains("periods")) cfg.periods = j.at("periods").get<int>();
  if (j.contains("warmup")) cfg.warmup = j.at("warmup").get<int>();
  if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("thetas")) cfg.thetas = j.at("thetas").get<std::vector<double>>();
  if (j.contains("share")) cfg.share = j.at("share").get<double>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

  if (cfg.periods <= cfg.warmup || cfg.warmup < 0)
    throw std::runtime_error("config: need periods > warmup >= 0");
  if (cfg.replications < 1) throw std::runtime_error("config: replications must be >= 1");
  if (cfg.thetas.empty()) throw std::runtime_error("config: theta list is empty");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: parse error in " + path + ": " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

json fluid_to_json(const Network& net, const FluidSolution& sol) {
  json lanes = json::object();
  for (int k = 0; k < net.lane_count(); ++k) {
    json jl{{"demand", sol.demand[k]},
            {"loaded_flow", sol.loaded_flow[k]},
            {"total_inflow", sol.total_inflow[k]},
            {"choice_prob", sol.choice_prob[k]},
            {"posted_price", sol.posted_price[k]},
            {"reserve_price", sol.reserve_price[k]}};
    if (std::isfinite(sol.shipper_price[k])) jl["shipper_price"] = sol.shipper_price[k];
    lanes[lane_key(net, k)] = jl;
  }
  return json{{"objective", sol.objective},
              {"kkt_residual", sol.kkt_residual},
              {"iterations", sol.iterations},
              {"lanes", lanes}};
}

json metric_report_to_json(const MetricReport& rep) {
  json rows = json::array();
  for (const MechanismMetrics& r : rep.rows) {
    json jr{{"mechanism", mechanism_name(r.mechanism)},
            {"replications", r.replications},
            {"kappa_hat", r.kappa_hat},
            {"kappa_se", r.kappa_se},
            {"cost_gap_ratio", r.cost_gap_ratio},
            {"cost_ratio", r.cost_ratio},
            {"payment_ratio", r.payment_ratio},
            {"penalty_ratio", r.penalty_ratio},
            {"sp_ratio", r.sp_ratio}};
    if (std::isfinite(r.profit)) {
      jr["profit"] = r.profit;
      jr["profit_se"] = r.profit_se;
    }
    rows.push_back(jr);
  }
  return json{{"kappa_fa", rep.kappa_fa}, {"gamma_fa", rep.gamma_fa}, {"mechanisms", rows}};
}

std::string trace_csv(const Network& net, const SimulationTrace& trace) {
  std::ostringstream os;
  os << "period,lane,S,D,X,Y,V,P,penalty,instant_bookings\n";
  os.precision(10);
  for (int t = 0; t < trace.periods; ++t) {
    for (int k = 0; k < net.lane_count(); ++k) {
      const LanePeriod& lp = trace.outcomes[t].lanes[k];
      os << (t + 1) << ',' << lane_key(net, k) << ',' << lp.available << ',' << lp.demand << ','
         << lp.chose << ',' << lp.booked << ',' << lp.left << ',' << lp.payment << ','
         << lp.penalty_cost << ',' << lp.instant << '\n';
    }
  }
  return os.str();
}

}  // namespace freight
