#include "lossq/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "lossq/erlang.hpp"
#include "lossq/observable.hpp"
#include "lossq/unobservable.hpp"

namespace lossq {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view where, std::string_view field, const std::string& what) {
  std::string msg;
  if (!where.empty()) msg.append(where).append(": ");
  msg.append("field '").append(field).append("': ").append(what);
  throw SpecError(msg);
}

double parse_double(std::string_view text, std::string_view where, std::string_view field) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(where, field, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

template <class Int>
Int parse_integer(std::string_view text, std::string_view where, std::string_view field) {
  text = trim(text);
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(where, field, "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view where, std::string_view field) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(where, field, "expected true or false, got '" + std::string(text) + "'");
}

std::string normalize_key(std::string_view key) {
  std::string out(trim(key));
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

double z_score(double estimate, double exact, double std_error) {
  const double diff = estimate - exact;
  if (std_error > 0.0) return diff / std_error;
  return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

template <class Fn>
auto parallel_map(std::size_t count, Fn fn) {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(count);
  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < count; begin += workers) {
    const std::size_t end = std::min(count, begin + workers);
    std::vector<std::future<T>> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
  }
  return out;
}

}  // namespace

Mode parse_mode(std::string_view text) {
  text = trim(text);
  if (text == "obs") return Mode::observable;
  if (text == "unobs") return Mode::unobservable;
  if (text == "both") return Mode::both;
  throw SpecError("field 'mode': expected obs, unobs or both, got '" + std::string(text) + "'");
}

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::observable: return "obs";
    case Mode::unobservable: return "unobs";
    case Mode::both: return "both";
  }
  return "both";
}

std::vector<double> parse_number_list(std::string_view text, std::string_view where) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_double(item, where, "cost"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void apply_setting(SweepSpec& spec, std::string_view raw_key, std::string_view value,
                   std::string_view where) {
  const std::string key = normalize_key(raw_key);
  value = trim(value);
  if (key == "rho-min") {
    spec.rho_min = parse_double(value, where, key);
  } else if (key == "rho-max") {
    spec.rho_max = parse_double(value, where, key);
  } else if (key == "rho-step") {
    spec.rho_step = parse_double(value, where, key);
  } else if (key == "mu") {
    spec.mu = parse_double(value, where, key);
  } else if (key == "reward") {
    spec.reward = parse_double(value, where, key);
  } else if (key == "cost") {
    spec.cost = parse_number_list(value, where);
  } else if (key == "mode") {
    try {
      spec.mode = parse_mode(value);
    } catch (const SpecError&) {
      fail(where, key, "expected obs, unobs or both, got '" + std::string(value) + "'");
    }
  } else if (key == "simulate") {
    spec.simulate = parse_bool(value, where, key);
  } else if (key == "out") {
    spec.out = std::string(value);
  } else if (key == "seed") {
    spec.seed = parse_integer<std::uint64_t>(value, where, key);
  } else if (key == "threshold") {
    spec.threshold = parse_integer<Threshold>(value, where, key);
  } else if (key == "join-prob") {
    spec.join_prob = parse_double(value, where, key);
  } else if (key == "replications") {
    spec.replications = parse_integer<int>(value, where, key);
  } else if (key == "horizon") {
    spec.horizon = parse_double(value, where, key);
  } else if (key == "service") {
    spec.services.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = value.find(',', start);
      const auto item = trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
      try {
        spec.services.push_back(sim::parse_service_kind(item));
      } catch (const std::invalid_argument& e) {
        fail(where, key, e.what());
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  } else {
    fail(where, key, "unknown key");
  }
}

SweepSpec parse_config(std::istream& in, std::string_view source_name) {
  SweepSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw SpecError(where + ": expected 'key = value'");
    apply_setting(spec, view.substr(0, eq), view.substr(eq + 1), where);
  }
  return spec;
}

SweepSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void SweepSpec::validate() const {
  if (!rho_min) fail("", "rho-min", "missing");
  if (!(*rho_min > 0.0) || !std::isfinite(*rho_min)) fail("", "rho-min", "must be positive");
  if (rho_max && !(*rho_max >= *rho_min)) fail("", "rho-max", "grid is empty: rho-max < rho-min");
  if (rho_step && (!(*rho_step > 0.0) || !std::isfinite(*rho_step))) fail("", "rho-step", "must be positive");
  if (rho_max && *rho_max > *rho_min && !rho_step) fail("", "rho-step", "missing");
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("", "mu", "must be positive");
  if (!reward) fail("", "reward", "missing");
  if (!(*reward > 0.0) || !std::isfinite(*reward)) fail("", "reward", "must be positive");
  if (cost.empty()) fail("", "cost", "missing");
  try {
    CostPolynomial check(cost);
  } catch (const std::exception& e) {
    fail("", "cost", e.what());
  }
  if (threshold && *threshold < 0) fail("", "threshold", "must be nonnegative");
  if (join_prob && !(*join_prob >= 0.0 && *join_prob <= 1.0)) fail("", "join-prob", "must lie in [0, 1]");
  if (replications < 1) fail("", "replications", "must be at least 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("", "horizon", "must be positive");
  if (services.empty()) fail("", "service", "needs at least one distribution");
}

std::vector<double> SweepSpec::grid() const {
  validate();
  std::vector<double> out;
  const double lo = *rho_min;
  if (!rho_max || !rho_step) {
    out.push_back(lo);
    return out;
  }
  const double step = *rho_step;
  const double slack = 1e-9 * step;
  for (std::int64_t k = 0;; ++k) {
    const double rho = lo + static_cast<double>(k) * step;
    if (rho > *rho_max + slack) break;
    out.push_back(rho);
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

SweepRow evaluate_point(double rho, double mu, double reward, const std::vector<double>& coeffs,
                        Mode mode) {
  const SystemParams params = SystemParams::from_load(rho, mu, reward);
  const CostPolynomial cost(coeffs);
  SweepRow row;
  row.rho = rho;
  row.lambda = params.lambda();
  row.mu = mu;
  row.reward = reward;
  row.cost = coeffs;
  if (mode != Mode::unobservable) {
    const ObservableAnalysis obs = analyze_observable(params, cost);
    row.has_observable = true;
    row.n_e = obs.n_e;
    row.n_s = obs.n_s;
    row.n_m = obs.n_m;
    const auto at = [](const std::vector<double>& curve, Threshold n) {
      return curve[static_cast<std::size_t>(n)];
    };
    row.welfare_ne = at(obs.welfare_curve, obs.n_e);
    row.welfare_ns = at(obs.welfare_curve, obs.n_s);
    row.welfare_nm = at(obs.welfare_curve, obs.n_m);
    row.revenue_ns = at(obs.revenue_curve, obs.n_s);
    row.revenue_nm = at(obs.revenue_curve, obs.n_m);
    row.price_o = obs.price_o;
  }
  if (mode != Mode::observable) {
    const UnobservableAnalysis un = analyze_unobservable(params, cost);
    row.has_unobservable = true;
    row.q_e = un.q_e;
    row.q_opt = un.q_opt;
    row.price_u = un.price_u;
    row.revenue_q_opt = un.revenue_opt;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const std::vector<double> grid = spec.grid();
  return parallel_map(grid.size(), [&](std::size_t i) {
    return evaluate_point(grid[i], spec.mu, *spec.reward, spec.cost, spec.mode);
  });
}

std::vector<std::string> sweep_header(int cost_degree) {
  std::vector<std::string> header{"rho", "lambda", "mu", "R"};
  for (int i = 1; i <= cost_degree; ++i) header.push_back("C" + std::to_string(i));
  for (const char* name : {"n_e", "n_s", "n_m", "S^r(n_e)", "S^r(n_s)", "S^r(n_m)", "S^r_m(n_s)",
                           "S^r_m(n_m)", "P_o", "q_e", "q_opt", "P_u", "S_q_opt"}) {
    header.emplace_back(name);
  }
  return header;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int cost_degree) {
  const auto header = sweep_header(cost_degree);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const SweepRow& row : rows) {
    out << format_number(row.rho) << ',' << format_number(row.lambda) << ',' << format_number(row.mu)
        << ',' << format_number(row.reward);
    for (int i = 0; i < cost_degree; ++i) {
      out << ',' << (static_cast<std::size_t>(i) < row.cost.size() ? format_number(row.cost[i]) : "0");
    }
    if (row.has_observable) {
      out << ',' << row.n_e << ',' << row.n_s << ',' << row.n_m << ',' << format_number(row.welfare_ne)
          << ',' << format_number(row.welfare_ns) << ',' << format_number(row.welfare_nm) << ','
          << format_number(row.revenue_ns) << ',' << format_number(row.revenue_nm) << ','
          << format_number(row.price_o);
    } else {
      out << ",,,,,,,,,";
    }
    if (row.has_unobservable) {
      out << ',' << format_number(row.q_e) << ',' << format_number(row.q_opt) << ','
          << format_number(row.price_u) << ',' << format_number(row.revenue_q_opt);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

std::vector<ExampleLine> example_comparison() {
  const SystemParams params = SystemParams::from_load(1200.0, 1.0 / 60.0, 400.0);
  const CostPolynomial cost = CostPolynomial::quadratic(0.0, 0.01);
  const ObservableAnalysis obs = analyze_observable(params, cost);
  const UnobservableAnalysis un = analyze_unobservable(params, cost);
  const auto welfare = [&](Threshold n) { return obs.welfare_curve[static_cast<std::size_t>(n)]; };
  const double nm = static_cast<double>(obs.n_m);
  const double price_at_nm = params.reward() - cost(nm);

  std::vector<ExampleLine> lines;
  auto add = [&](std::string quantity, std::string reference, double reference_value, double computed,
                 double tolerance, std::string note = {}) {
    const bool ok = std::abs(computed - reference_value) <= tolerance;
    lines.push_back({std::move(quantity), std::move(reference), reference_value, computed, ok, std::move(note)});
  };
  add("rho", "1200", 1200.0, params.rho(), 1e-9);
  add("n_e", "201", 201.0, static_cast<double>(obs.n_e), 0.0);
  add("n_s", "116", 116.0, static_cast<double>(obs.n_s), 0.0);
  add("n_m", "116", 116.0, nm, 0.0);
  add("q_e", "1/6", 1.0 / 6.0, un.q_e, 1e-12);
  add("q~", "sqrt(3)/18", std::sqrt(3.0) / 18.0, un.q_opt, 1e-12);
  add("S^r(n_s)", "517.64", 517.64, welfare(obs.n_s), 0.01);
  add("S^r(n_e)", "2.66", 2.66, welfare(obs.n_e), 0.01);
  add("P~_o = R - cost(n_m - 1)", "265.44", 265.44, obs.price_o, 0.01,
      "threshold convention: published value uses cost(n_m)");
  add("P~_o with cost(n_m)", "265.44", 265.44, price_at_nm, 0.01, "alternate convention");
  add("S^r_m(n_m) = mu E(L) (R - cost(n_m - 1))", "512.71", 512.71,
      obs.revenue_curve[static_cast<std::size_t>(obs.n_m)], 0.01,
      "threshold convention: published value uses cost(n_m)");
  add("S^r_m(n_m) with cost(n_m)", "512.71", 512.71,
      params.mu() * expected_occupancy(params.rho(), obs.n_m) * price_at_nm, 0.01, "alternate convention");
  add("P~_u", "266.67", 266.67, un.price_u, 0.01);
  add("S(q_e)", "0", 0.0, un.revenue_at(un.q_e), 0.01);
  add("S(q~)", "513.20", 513.20, un.revenue_opt, 0.01);
  return lines;
}

void write_example_report(std::ostream& out) {
  out << "Worked example: Lambda = 20/min, mean sojourn 60 min (rho = 1200), R = 400, cost = 0.01 N^2\n\n";
  out << std::left << std::setw(44) << "quantity" << std::setw(12) << "published" << std::setw(12)
      << "computed" << std::setw(26) << "full precision"
      << "status\n";
  for (const ExampleLine& line : example_comparison()) {
    std::ostringstream two_dp;
    two_dp << std::fixed << std::setprecision(2) << line.computed;
    out << std::left << std::setw(44) << line.quantity << std::setw(12) << line.reference << std::setw(12)
        << two_dp.str() << std::setw(26) << format_number(line.computed)
        << (line.matches ? "match" : "MISMATCH");
    if (!line.note.empty()) out << " (" << line.note << ")";
    out << '\n';
  }
}

double ValidationRow::max_abs_z() const {
  return std::max({std::abs(z_mean_occupancy), std::abs(z_welfare), std::abs(z_revenue)});
}

bool ValidationReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.max_abs_z() <= kMaxAbsZ; });
}

ValidationReport run_validation(const SweepSpec& spec) {
  const std::vector<double> grid = spec.grid();
  const CostPolynomial cost(spec.cost);
  ValidationReport report;
  report.replications = spec.replications;
  report.horizon = spec.horizon;
  sim::SplitMix64 seeds(spec.seed);

  for (double rho : grid) {
    const SystemParams params = SystemParams::from_load(rho, spec.mu, *spec.reward);
    const double horizon = spec.horizon / spec.mu;
    for (sim::ServiceKind kind : spec.services) {
      const sim::ServiceDistribution service = sim::ServiceDistribution::of_kind(kind, spec.mu);
      if (spec.mode != Mode::unobservable) {
        const Threshold n = spec.threshold.value_or(socially_optimal_threshold(params, cost));
        sim::SimConfig config{params, cost, service, n, std::nullopt, horizon, std::nullopt, seeds.next(),
                              spec.replications};
        const sim::SimResult res = sim::simulate_observable(config);
        const OccupancyDistribution exact = occupancy_distribution(rho, n);

        ValidationRow row;
        row.rho = rho;
        row.regime = "observable";
        row.service = kind;
        row.threshold = n;
        row.tv_occupancy = sim::total_variation(res.occupancy_pmf, exact.probs);
        row.tv_pasta = sim::total_variation(res.occupancy_pmf, res.arrival_pmf);
        row.mean_occupancy = res.mean_occupancy;
        row.mean_occupancy_exact = exact.mean;
        row.welfare = res.welfare;
        row.welfare_exact = social_welfare(params, cost, n);
        row.revenue = res.revenue;
        row.revenue_exact = n >= 1 ? revenue(params, cost, n) : 0.0;
        report.rows.push_back(row);
      }
      if (spec.mode != Mode::observable) {
        const double q = spec.join_prob.value_or(optimal_join_prob(params, cost).join_prob);
        sim::SimConfig config{params, cost, service, std::nullopt, q, horizon, std::nullopt, seeds.next(),
                              spec.replications};
        const sim::SimResult res = sim::simulate_unobservable(config);
        const double load = rho * q;

        ValidationRow row;
        row.rho = rho;
        row.regime = "unobservable";
        row.service = kind;
        row.join_prob = q;
        // M/G/infinity occupancy is Poisson(rho q); truncation at the
        // safety bound is invisible at double precision.
        if (load > 0.0) {
          row.tv_occupancy = sim::total_variation(
              res.occupancy_pmf, occupancy_distribution(load, sim::unobservable_safety_bound(rho)).probs);
        } else {
          row.tv_occupancy = sim::total_variation(res.occupancy_pmf, {1.0});
        }
        row.tv_pasta = sim::total_variation(res.occupancy_pmf, res.arrival_pmf);
        row.mean_occupancy = res.mean_occupancy;
        row.mean_occupancy_exact = load;
        row.welfare = res.welfare;
        row.welfare_exact = revenue_unobservable(params, cost, q);
        row.revenue = res.revenue;
        row.revenue_exact = row.welfare_exact;
        report.rows.push_back(row);
      }
    }
  }
  for (ValidationRow& row : report.rows) {
    row.z_mean_occupancy = z_score(row.mean_occupancy.mean, row.mean_occupancy_exact, row.mean_occupancy.std_error);
    row.z_welfare = z_score(row.welfare.mean, row.welfare_exact, row.welfare.std_error);
    row.z_revenue = z_score(row.revenue.mean, row.revenue_exact, row.revenue.std_error);
  }
  return report;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  out << "rho,regime,service,threshold,join_prob,replications,horizon,tv_occupancy,tv_pasta,"
         "mean_occupancy_sim,mean_occupancy_se,mean_occupancy_exact,z_mean_occupancy,"
         "welfare_sim,welfare_se,welfare_exact,z_welfare,"
         "revenue_sim,revenue_se,revenue_exact,z_revenue\n";
  for (const ValidationRow& r : report.rows) {
    const bool obs = r.regime == "observable";
    out << format_number(r.rho) << ',' << r.regime << ',' << sim::to_string(r.service) << ','
        << (obs ? std::to_string(r.threshold) : "") << ',' << (obs ? "" : format_number(r.join_prob)) << ','
        << report.replications << ',' << format_number(report.horizon) << ',' << format_number(r.tv_occupancy)
        << ',' << format_number(r.tv_pasta) << ',' << format_number(r.mean_occupancy.mean) << ','
        << format_number(r.mean_occupancy.std_error) << ',' << format_number(r.mean_occupancy_exact) << ','
        << format_number(r.z_mean_occupancy) << ',' << format_number(r.welfare.mean) << ','
        << format_number(r.welfare.std_error) << ',' << format_number(r.welfare_exact) << ','
        << format_number(r.z_welfare) << ',' << format_number(r.revenue.mean) << ','
        << format_number(r.revenue.std_error) << ',' << format_number(r.revenue_exact) << ','
        << format_number(r.z_revenue) << '\n';
  }
}

void write_validation_summary(std::ostream& out, const ValidationReport& report) {
  out << "simulation vs analytic: " << report.rows.size() << " runs, " << report.replications
      << " replications x " << format_number(report.horizon) << " mean service times\n";
  for (const ValidationRow& r : report.rows) {
    out << "  rho=" << format_number(r.rho) << ' ' << r.regime << ' ' << sim::to_string(r.service);
    if (r.regime == "observable") {
      out << " n=" << r.threshold;
    } else {
      out << " q=" << format_number(r.join_prob);
    }
    out << std::fixed << std::setprecision(4) << "  TV=" << r.tv_occupancy << " TV(arrivals)=" << r.tv_pasta
        << std::setprecision(2) << "  z(L)=" << r.z_mean_occupancy << " z(welfare)=" << r.z_welfare
        << " z(revenue)=" << r.z_revenue << (r.max_abs_z() <= kMaxAbsZ ? "  ok" : "  FAIL") << '\n'
        << std::defaultfloat;
  }
  out << (report.passed() ? "all z-scores within 4\n" : "some z-scores exceed 4\n");
}

}  // namespace lossq
