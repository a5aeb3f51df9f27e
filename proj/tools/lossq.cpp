// lossq: admission thresholds and prices for a loss system whose occupancy
// customers either observe or do not observe.
//
//   lossq sweep    --rho-min 0.5 --rho-max 20 --rho-step 0.5 --reward 15 --cost 1,0
//   lossq example
//   lossq validate --rho-min 2 --reward 10 --cost 1 --threshold 3 --service exponential,deterministic

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lossq/sweep.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> seed;
  std::optional<std::string> mode;
  bool simulate = false;
  std::optional<std::string> rho_min, rho_max, rho_step, mu, reward, cost;
  std::optional<std::string> threshold, join_prob, replications, horizon, service;
};

void add_spec_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value file; flags override its entries");
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--seed", o.seed, "master seed (u64)");
  cmd->add_option("--mode", o.mode, "obs, unobs or both");
  cmd->add_flag("--simulate", o.simulate, "also run the simulator against the analytic values");
  cmd->add_option("--rho-min", o.rho_min, "first offered load");
  cmd->add_option("--rho-max", o.rho_max, "last offered load (inclusive)");
  cmd->add_option("--rho-step", o.rho_step, "grid step");
  cmd->add_option("--mu", o.mu, "service rate");
  cmd->add_option("--reward", o.reward, "service reward R");
  cmd->add_option("--cost", o.cost, "cost coefficients C1,C2,...");
  cmd->add_option("--threshold", o.threshold, "observable threshold to simulate (default n_s)");
  cmd->add_option("--join-prob", o.join_prob, "unobservable joining probability to simulate (default q~)");
  cmd->add_option("--replications", o.replications, "independent replications per run");
  cmd->add_option("--horizon", o.horizon, "simulated time per replication, in mean service times");
  cmd->add_option("--service", o.service, "service laws: exponential,deterministic,uniform,lognormal");
}

lossq::SweepSpec build_spec(const Overrides& o) {
  lossq::SweepSpec spec = o.config.empty() ? lossq::SweepSpec{} : lossq::load_config(o.config);
  const auto set = [&](const char* key, const std::optional<std::string>& value) {
    if (value) lossq::apply_setting(spec, key, *value, "command line");
  };
  set("out", o.out);
  set("seed", o.seed);
  set("mode", o.mode);
  set("rho-min", o.rho_min);
  set("rho-max", o.rho_max);
  set("rho-step", o.rho_step);
  set("mu", o.mu);
  set("reward", o.reward);
  set("cost", o.cost);
  set("threshold", o.threshold);
  set("join-prob", o.join_prob);
  set("replications", o.replications);
  set("horizon", o.horizon);
  set("service", o.service);
  if (o.simulate) spec.simulate = true;
  spec.validate();
  return spec;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix + ".csv";
  return path.substr(0, dot) + suffix + path.substr(dot);
}

// Writes through `fn` to `path`, or to stdout when path is empty.
template <class Fn>
void emit(const std::string& path, Fn fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(file);
  if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

int run_validate(const lossq::SweepSpec& spec, const std::string& csv_path) {
  const lossq::ValidationReport report = lossq::run_validation(spec);
  emit(csv_path, [&](std::ostream& os) { lossq::write_validation_csv(os, report); });
  if (!csv_path.empty()) lossq::write_validation_summary(std::cout, report);
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Admission thresholds and prices for a loss system with strategic customers"};
  app.require_subcommand(1);

  Overrides sweep_opts;
  Overrides validate_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "analytic thresholds and values over a rho grid (CSV)");
  add_spec_options(sweep, sweep_opts);
  CLI::App* example = app.add_subcommand("example", "worked example next to its published values");
  CLI::App* validate = app.add_subcommand("validate", "simulator vs analytic values; exit 1 if any |z| > 4");
  add_spec_options(validate, validate_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*example) {
      lossq::write_example_report(std::cout);
      return 0;
    }
    if (*sweep) {
      const lossq::SweepSpec spec = build_spec(sweep_opts);
      const auto rows = lossq::run_sweep(spec);
      const int degree = static_cast<int>(spec.cost.size());
      emit(spec.out, [&](std::ostream& os) { lossq::write_sweep_csv(os, rows, degree); });
      if (!spec.out.empty()) {
        std::cout << "wrote " << rows.size() << " rows to " << spec.out << '\n';
      }
      if (spec.simulate) {
        return run_validate(spec, spec.out.empty() ? std::string{} : sibling_path(spec.out, "_validation"));
      }
      return 0;
    }
    const lossq::SweepSpec spec = build_spec(validate_opts);
    return run_validate(spec, spec.out);
  } catch (const std::exception& e) {
    std::cerr << "lossq: " << e.what() << '\n';
    return 2;
  }
}
