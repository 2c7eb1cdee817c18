// Command-line front end: configuration in, tables and JSON out.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>

#include "freight/io.hpp"

using namespace freight;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int parallel = 1;
};

void add_common(CLI::App* cmd, CliOverrides& ov, bool config_required = true) {
  auto* c = cmd->add_option("--config", ov.config_path, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", [&ov](const CLI::results_t& r) {
    ov.seed = std::stoull(r[0]);
    return true;
  }, "override the config's base seed");
  cmd->add_option("--out", [&ov](const CLI::results_t& r) {
    ov.out_dir = r[0];
    return true;
  }, "override the config's output directory");
  cmd->add_option("--parallel", ov.parallel, "replication worker threads")
      ->check(CLI::PositiveNumber);
}

RunConfig resolve(const CliOverrides& ov) {
  RunConfig cfg = load_config(ov.config_path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.output_dir = *ov.out_dir;
  return cfg;
}

fs::path ensure_out(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  std::cerr << "wrote " << path.string() << "\n";
}

std::string theta_tag(double theta) {
  std::string s = std::to_string(theta);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  for (char& c : s)
    if (c == '.') c = '_';
  return s;
}

int cmd_solve_fluid(const CliOverrides& ov) {
  RunConfig cfg = resolve(ov);
  fs::path dir = ensure_out(cfg);
  for (double theta : cfg.thetas) {
    Network net = scale_instance(cfg.network, theta);
    FluidSolution sol = solve_fa(net, cfg.mode, cfg.solver);
    json j = fluid_to_json(net, sol);
    j["theta"] = theta;
    std::string name = cfg.thetas.size() == 1 ? "fluid.json"
                                              : "fluid_theta" + theta_tag(theta) + ".json";
    write_file(dir / name, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_simulate(const CliOverrides& ov, bool dump_traces) {
  RunConfig cfg = resolve(ov);
  fs::path dir = ensure_out(cfg);
  FluidSolution fl = solve_fa(cfg.network, cfg.mode, cfg.solver);
  std::vector<ReplicationSet> sets;
  for (Mechanism m : cfg.mechanisms) {
    sets.push_back(run_replications(cfg.network, m, fl, cfg.periods, cfg.warmup,
                                    cfg.replications, cfg.seed, ov.parallel, cfg.share));
    if (dump_traces)
      write_file(dir / (std::string("trace_") + mechanism_name(m) + ".csv"),
                 trace_csv(cfg.network, sets.back().traces.front()));
  }
  MetricReport rep = report(sets, fl, cfg.network);
  write_file(dir / "simulate.json", metric_report_to_json(rep).dump(2) + "\n");
  write_file(dir / "simulate.csv", report_csv(rep));
  return 0;
}

int cmd_compare(const CliOverrides& ov) {
  RunConfig cfg = resolve(ov);
  fs::path dir = ensure_out(cfg);
  std::ostringstream csv;
  json out = json::array();
  bool first = true;
  for (double theta : cfg.thetas) {
    Network net = scale_instance(cfg.network, theta);
    FluidSolution fl = solve_fa(net, cfg.mode, cfg.solver);
    std::vector<ReplicationSet> sets;
    for (Mechanism m : cfg.mechanisms)
      sets.push_back(run_replications(net, m, fl, cfg.periods, cfg.warmup, cfg.replications,
                                      cfg.seed, ov.parallel, cfg.share));
    MetricReport rep = report(sets, fl, net);
    std::istringstream rows(report_csv(rep));
    std::string line;
    std::getline(rows, line);
    if (first) csv << "theta," << line << "\n";
    first = false;
    while (std::getline(rows, line)) csv << theta << ',' << line << "\n";
    json j = metric_report_to_json(rep);
    j["theta"] = theta;
    out.push_back(std::move(j));
  }
  write_file(dir / "compare.csv", csv.str());
  write_file(dir / "compare.json", out.dump(2) + "\n");
  return 0;
}

int cmd_calibrate(const CliOverrides& ov) {
  RunConfig cfg = resolve(ov);
  fs::path dir = ensure_out(cfg);
  write_file(dir / "network.json", network_to_json(cfg.network).dump(2) + "\n");
  return 0;
}

int cmd_ic_check(const CliOverrides& ov, int trials) {
  std::uint64_t seed = ov.seed.value_or(1);
  json out;
  bool ok = true;
  for (Mechanism m : {Mechanism::AUC, Mechanism::AUC_P, Mechanism::HYB}) {
    std::mt19937_64 rng(seed);
    IcReport rep = verify_ic(mechanism_fn(m), trials, rng);
    out[mechanism_name(m)] = {{"max_regret", rep.max_regret},
                              {"ir_violations", rep.ir_violations}};
    ok = ok && rep.max_regret <= 1e-9 && rep.ir_violations == 0;
  }
  out["trials"] = trials;
  out["pass"] = ok;
  std::cout << out.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_dominance_check(const CliOverrides& ov) {
  RunConfig cfg = resolve(ov);
  FluidSolution fl = solve_fa(cfg.network, cfg.mode, cfg.solver);
  DominanceReport rep = coupled_dominance_check(cfg.network, fl, cfg.periods, cfg.warmup,
                                                cfg.replications, cfg.seed);
  bool ok = rep.pathwise_ok && rep.max_exceedance <= rep.dkw_band;
  json out{{"pathwise_ok", rep.pathwise_ok},
           {"max_cdf_exceedance", rep.max_exceedance},
           {"dkw_band", rep.dkw_band},
           {"samples_per_arm", rep.samples_per_arm},
           {"lane_exceedance", rep.lane_exceedance},
           {"pass", ok}};
  std::cout << out.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_scaling_gap(const CliOverrides& ov) {
  RunConfig cfg = resolve(ov);
  fs::path dir = ensure_out(cfg);
  std::ostringstream csv;
  csv.precision(10);
  csv << "theta,gap,gap_se,kappa_sp,kappa_auc\n";
  std::vector<double> lx, ly;
  for (double theta : cfg.thetas) {
    Network net = scale_instance(cfg.network, theta);
    FluidSolution fl = solve_fa(net, cfg.mode, cfg.solver);
    // Paired seeds: shared streams cancel the penalty terms pathwise, leaving
    // a low-variance estimate of the payment gap.
    double sum = 0.0, sumsq = 0.0, sp_sum = 0.0, auc_sum = 0.0;
    for (int r = 0; r < cfg.replications; ++r) {
      std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
      SimulationTrace sp = run(net, Mechanism::SP, fl, cfg.periods, cfg.warmup, seed, cfg.share);
      SimulationTrace auc =
          run(net, Mechanism::AUC, fl, cfg.periods, cfg.warmup, seed, cfg.share);
      double g = sp.mean_cost() - auc.mean_cost();
      sum += g;
      sumsq += g * g;
      sp_sum += sp.mean_cost();
      auc_sum += auc.mean_cost();
    }
    int n = cfg.replications;
    double gap = sum / n;
    double se = n > 1 ? std::sqrt(std::max(0.0, (sumsq - n * gap * gap) / (n - 1)) / n) : 0.0;
    csv << theta << ',' << gap << ',' << se << ',' << sp_sum / n << ',' << auc_sum / n << "\n";
    if (gap > 0.0) {
      lx.push_back(std::log(theta));
      ly.push_back(std::log(gap));
    }
  }
  write_file(dir / "scaling_gap.csv", csv.str());
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    std::cout << "log-log slope " << sxy / sxx << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carrier-side freight marketplace mechanisms: fluid solver and simulator"};
  app.require_subcommand(1);

  CliOverrides ov;
  bool dump_traces = false;
  int ic_trials = 10000;

  auto* solve = app.add_subcommand("solve-fluid", "solve the fluid program per theta");
  add_common(solve, ov);
  auto* sim = app.add_subcommand("simulate", "run replications and report metrics");
  add_common(sim, ov);
  sim->add_flag("--trace", dump_traces, "dump one per-period trace CSV per mechanism");
  auto* cmp = app.add_subcommand("compare", "mechanism comparison table across thetas");
  add_common(cmp, ov);
  auto* cal = app.add_subcommand("calibrate", "emit the calibrated network as JSON");
  add_common(cal, ov);
  auto* ic = app.add_subcommand("ic-check", "randomized incentive-compatibility audit");
  add_common(ic, ov, false);
  ic->add_option("--trials", ic_trials, "instances per mechanism")->check(CLI::PositiveNumber);
  auto* dom = app.add_subcommand("dominance-check", "coupled AUC vs AUC-P supply comparison");
  add_common(dom, ov);
  auto* gap = app.add_subcommand("scaling-gap", "SP-AUC cost gap across the theta sweep");
  add_common(gap, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve_fluid(ov);
    if (sim->parsed()) return cmd_simulate(ov, dump_traces);
    if (cmp->parsed()) return cmd_compare(ov);
    if (cal->parsed()) return cmd_calibrate(ov);
    if (ic->parsed()) return cmd_ic_check(ov, ic_trials);
    if (dom->parsed()) return cmd_dominance_check(ov);
    if (gap->parsed()) return cmd_scaling_gap(ov);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
