#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lossq/params.hpp"
#include "lossq/sim.hpp"

namespace lossq {

/// Invalid sweep configuration; the message names the source line and field.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Mode { observable, unobservable, both };

Mode parse_mode(std::string_view text);
std::string_view to_string(Mode mode) noexcept;

struct SweepSpec {
  std::optional<double> rho_min;
  std::optional<double> rho_max;
  std::optional<double> rho_step;
  double mu = 1.0;
  std::optional<double> reward;
  std::vector<double> cost;  // C_1 .. C_d
  Mode mode = Mode::both;
  bool simulate = false;
  std::string out;  // empty: stdout
  std::uint64_t seed = 1;

  // Simulation controls (validate / --simulate).
  std::optional<Threshold> threshold;  // default: n_s at each grid point
  std::optional<double> join_prob;     // default: q~ at each grid point
  int replications = 20;
  double horizon = 1e5;  // in mean service times
  std::vector<sim::ServiceKind> services{sim::ServiceKind::exponential};

  /// Throws SpecError naming the first offending field.
  void validate() const;

  /// rho_min + k * rho_step for k = 0, 1, ... while <= rho_max.
  std::vector<double> grid() const;
};

/// Applies one `key = value` setting. `where` prefixes error messages.
void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value,
                   std::string_view where);

/// Reads a key-value file: one `key = value` per line, `#` starts a comment.
/// Keys match the long CLI flag names (rho-min, cost, ...).
SweepSpec parse_config(std::istream& in, std::string_view source_name);
SweepSpec load_config(const std::string& path);

std::vector<double> parse_number_list(std::string_view text, std::string_view where);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

struct SweepRow {
  double rho = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double reward = 0.0;
  std::vector<double> cost;
  bool has_observable = false;
  Threshold n_e = 0, n_s = 0, n_m = 0;
  double welfare_ne = 0.0, welfare_ns = 0.0, welfare_nm = 0.0;
  double revenue_ns = 0.0, revenue_nm = 0.0;
  double price_o = 0.0;
  bool has_unobservable = false;
  double q_e = 0.0, q_opt = 0.0, price_u = 0.0, revenue_q_opt = 0.0;
};

SweepRow evaluate_point(double rho, double mu, double reward, const std::vector<double>& cost,
                        Mode mode);

/// One row per grid point, in grid order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::vector<std::string> sweep_header(int cost_degree);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int cost_degree);

// Worked example: Lambda = 20 per minute, mean sojourn 60 minutes, R = 400,
// cost 0.01 N^2.

struct ExampleLine {
  std::string quantity;
  std::string reference;  // as published
  double reference_value = 0.0;
  double computed = 0.0;
  bool matches = false;
  std::string note;
};

std::vector<ExampleLine> example_comparison();
void write_example_report(std::ostream& out);

/// Largest |z| tolerated by run_validation.
inline constexpr double kMaxAbsZ = 4.0;

struct ValidationRow {
  double rho = 0.0;
  std::string regime;  // "observable" or "unobservable"
  sim::ServiceKind service = sim::ServiceKind::exponential;
  Threshold threshold = 0;  // observable rows
  double join_prob = 0.0;   // unobservable rows
  double tv_occupancy = 0.0;
  double tv_pasta = 0.0;
  sim::Estimate mean_occupancy;
  double mean_occupancy_exact = 0.0;
  double z_mean_occupancy = 0.0;
  sim::Estimate welfare;
  double welfare_exact = 0.0;
  double z_welfare = 0.0;
  sim::Estimate revenue;
  double revenue_exact = 0.0;
  double z_revenue = 0.0;

  double max_abs_z() const;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  int replications = 0;
  double horizon = 0.0;
  bool passed() const;
};

ValidationReport run_validation(const SweepSpec& spec);
void write_validation_csv(std::ostream& out, const ValidationReport& report);
void write_validation_summary(std::ostream& out, const ValidationReport& report);

}  // namespace lossq
