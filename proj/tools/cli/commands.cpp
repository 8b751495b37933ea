#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "ouedge/config_io.hpp"
#include "ouedge/edgeworth.hpp"
#include "ouedge/errors.hpp"
#include "ouedge/harness.hpp"
#include "ouedge/levy_sim.hpp"
#include "ouedge/report_io.hpp"

namespace ouedge::cli {

namespace {

namespace fs = std::filesystem;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::ofstream open_output(const CliOptions& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  const auto path = fs::path(opts.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return f;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt::format("{}", row[i]);
    os << '\n';
  }
}

void write_table(std::ostream& os, const Table& t) {
  for (const auto& c : t.columns) os << fmt::format("{:>16}", c);
  os << '\n';
  for (const auto& row : t.rows) {
    for (double v : row) os << fmt::format("{:>16.8g}", v);
    os << '\n';
  }
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

// Writes `t` as <stem>.csv / <stem>.json, or prints it for the table format.
void emit(const CliOptions& opts, std::ostream& out, const std::string& stem, const Table& t, json extra = {}) {
  switch (opts.format) {
    case Format::Csv: {
      auto f = open_output(opts, stem + ".csv");
      write_csv(f, t);
      break;
    }
    case Format::Json: {
      json doc = extra.is_object() ? extra : json::object();
      doc["columns"] = t.columns;
      doc["rows"] = table_json(t);
      auto f = open_output(opts, stem + ".json");
      f << doc.dump(2) << '\n';
      break;
    }
    case Format::Table:
      write_table(out, t);
      break;
  }
}

double first_horizon(const json& cfg, const char* section) {
  if (cfg.contains(section) && cfg[section].contains("T")) return cfg[section]["T"].get<double>();
  if (cfg.contains("T_grid")) return cfg["T_grid"][0].get<double>();
  return 10.0;
}

std::vector<int> orders_or(const json& cfg, const char* section, std::vector<int> fallback) {
  if (cfg.contains(section) && cfg[section].contains("orders")) return cfg[section]["orders"].get<std::vector<int>>();
  return fallback;
}

CumulantVector stationary_for(const ExperimentConfig& exp, int r_max) {
  return stationary_cumulants(driver_cumulants(exp.driver, std::max(r_max, 2)), exp.params.lam());
}

void require_nondegenerate(const ExperimentConfig& exp, const CumulantVector& kappaF, double T) {
  if (exp.params.degenerate())
    throw DegenerateModelError("beta + rho*lambda = 0: the limiting variance vanishes");
  const double sigma = chi(2, exp.params, kappaF, T);
  if (!(sigma > 0.0)) throw DegenerateModelError(fmt::format("Sigma_T = {} is not positive at T = {}", sigma, T));
}

TestFunction function_from_json(const json& f) {
  const auto kind = f["kind"].get<std::string>();
  if (kind == "indicator_le") return IndicatorLE{f["a"].get<double>()};
  if (kind == "interval") return IndicatorInterval{f["a"].get<double>(), f["b"].get<double>()};
  if (kind == "polynomial") return Polynomial{f["coeffs"].get<std::vector<double>>()};
  return Tabulated{f["x"].get<std::vector<double>>(), f["y"].get<std::vector<double>>()};
}

int cmd_cumulants(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out) {
  const int r_max = cfg.contains("r_max") ? cfg["r_max"].get<int>()
                                          : *std::max_element(exp.p_orders.begin(), exp.p_orders.end());
  const auto kappaF = stationary_for(exp, r_max);
  Table t{{"T", "r", "chi", "scaled_chi", "limit"}, {}};
  for (double T : exp.T_grid)
    for (int r = 2; r <= r_max; ++r)
      t.rows.push_back({T, static_cast<double>(r), chi(r, exp.params, kappaF, T),
                        std::pow(T, 0.5 * (r - 2)) * chi(r, exp.params, kappaF, T),
                        chi_limit(r, exp.params, kappaF)});
  std::vector<double> kf(kappaF.values().begin(), kappaF.values().end());
  emit(opts, out, "cumulants", t, {{"degenerate", exp.params.degenerate()}, {"kappa_F", kf}});
  return kSuccess;
}

int cmd_density(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out,
                std::ostream& err) {
  const double T = first_horizon(cfg, "density");
  const auto orders = orders_or(cfg, "density", {2, 3, 4});
  const int p_max = *std::max_element(orders.begin(), orders.end());
  const auto kappaF = stationary_for(exp, p_max);
  require_nondegenerate(exp, kappaF, T);

  const json d = cfg.contains("density") ? cfg["density"] : json::object();
  const double lo = d.value("y_min", -10.0);
  const double hi = d.value("y_max", 10.0);
  const int n = d.value("n_points", 401);

  std::vector<ExpansionCoefficients> ecs;
  Table t{{"y"}, {}};
  json negative = json::object();
  for (int p : orders) {
    ecs.push_back(expansion_coefficients(p, chi_table(p, exp.params, kappaF, T)));
    t.columns.push_back(fmt::format("g_{}", p));
    const auto neg = negative_density_report(ecs.back());
    negative[fmt::format("g_{}", p)] = {{"negative", neg.negative}, {"min_value", neg.min_value},
                                        {"location", neg.location}};
    if (neg.negative)
      err << fmt::format("note: g_{} is negative (min {:.3g} at y = {:.4g}); Psi_p is a signed measure\n", p,
                         neg.min_value, neg.location);
  }
  for (int i = 0; i < n; ++i) {
    const double y = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    std::vector<double> row{y};
    for (const auto& ec : ecs) row.push_back(density(y, ec));
    t.rows.push_back(std::move(row));
  }
  emit(opts, out, "density", t, {{"T", T}, {"negative_density", negative}});
  return kSuccess;
}

int cmd_expect(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out) {
  if (!cfg.contains("expect")) throw ConfigError("expect: missing 'expect' section");
  const double T = first_horizon(cfg, "expect");
  const auto orders = orders_or(cfg, "expect", exp.p_orders);
  const int p_max = *std::max_element(orders.begin(), orders.end());
  const auto kappaF = stationary_for(exp, p_max);
  require_nondegenerate(exp, kappaF, T);
  const auto f = function_from_json(cfg["expect"]["function"]);
  Table t{{"T", "p", "psi"}, {}};
  for (int p : orders) {
    const auto ec = expansion_coefficients(p, chi_table(p, exp.params, kappaF, T));
    double value = 0.0;
    try {
      value = psi_expect(f, ec);
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("expect.function: {}", e.what()));
    }
    t.rows.push_back({T, static_cast<double>(p), value});
  }
  emit(opts, out, "expect", t);
  return kSuccess;
}

int cmd_simulate(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out) {
  const json s = cfg.contains("simulate") ? cfg["simulate"] : json::object();
  const double T = first_horizon(cfg, "simulate");
  const int n_steps = s.value("n_steps", 100);
  const int n_paths = s.value("n_paths", 1);
  const std::size_t n_samples = s.value("n_samples", std::size_t{0});

  Table summary{{"path", "H_T", "X_0", "X_T", "Y_T"}, {}};
  for (int i = 0; i < n_paths; ++i) {
    RngStream rng(exp.seed, static_cast<std::uint64_t>(i));
    const auto path = sample_path(exp.params, exp.driver, T, n_steps, rng);
    auto f = open_output(opts, fmt::format("path_{:03d}.csv", i));
    write_path_csv(f, path);
    summary.rows.push_back({static_cast<double>(i), path.H_T, path.X.front(), path.X.back(), path.Y.back()});
  }
  if (n_samples > 0) {
    const auto draws = sample_normalized(exp.params, exp.driver, T, n_samples, horizon_seed(exp.seed, 0), exp.workers);
    auto f = open_output(opts, "samples.csv");
    f << "normalized_H_T\n";
    for (double v : draws) f << fmt::format("{}\n", v);
  }
  emit(opts, out, "simulate", summary, {{"T", T}, {"n_steps", n_steps}, {"degenerate", exp.params.degenerate()}});
  return kSuccess;
}

int cmd_validate(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out,
                 std::ostream& err) {
  const int p_max = *std::max_element(exp.p_orders.begin(), exp.p_orders.end());
  const auto kappaF = stationary_for(exp, std::max(p_max, 4));
  for (double T : exp.T_grid) require_nondegenerate(exp, kappaF, T);

  const auto report = run_validation(exp, config_hash(cfg));
  {
    auto f = open_output(opts, "validation.csv");
    write_validation_csv(f, report);
  }
  {
    auto f = open_output(opts, "kstats.csv");
    write_kstats_csv(f, report);
  }
  {
    auto f = open_output(opts, "report.json");
    f << report_to_json(report).dump(2) << '\n';
  }
  if (opts.format == Format::Table) {
    Table t{{"T", "a", "p", "empirical", "se", "psi_p", "gap"}, {}};
    for (const auto& c : report.cells)
      for (const auto& e : c.psi) t.rows.push_back({c.T, c.a, static_cast<double>(e.p), c.empirical, c.se, e.psi, e.gap});
    write_table(out, t);
  }
  for (const auto& c : report.checks)
    err << fmt::format("[{}] {}: {}\n", c.passed ? "ok" : "FAIL", c.name, c.detail);
  if (opts.strict && !report.all_checks_passed()) return kStrictFailure;
  return kSuccess;
}

int cmd_theta_hat(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out,
                  std::ostream& err) {
  const json s = cfg.contains("theta_hat") ? cfg["theta_hat"] : json::object();
  const double T = s.value("T", 50.0);
  const std::size_t n = s.value("n_samples", exp.n_samples);
  const auto kappaF = stationary_for(exp, 3);
  require_nondegenerate(exp, kappaF, T);
  const auto r = theta_hat_demo(exp.params, exp.driver, T, n, exp.seed, exp.workers, exp.n_boot);
  const bool bias_ok = std::abs(r.bias) <= 4.0 * r.bias_se;
  const bool var_ok = std::abs(r.scaled_variance - r.chi2) <= 4.0 * r.scaled_variance_se;
  err << fmt::format("[{}] bias {:.4g} (se {:.3g})\n", bias_ok ? "ok" : "FAIL", r.bias, r.bias_se);
  err << fmt::format("[{}] Var(sqrt(T)(theta_hat-theta0)) {:.6g} vs chi_2 {:.6g} (se {:.3g})\n",
                     var_ok ? "ok" : "FAIL", r.scaled_variance, r.chi2, r.scaled_variance_se);

  Table t{{"T", "n", "theta0", "mean_theta_hat", "bias", "bias_se", "scaled_variance", "scaled_variance_se",
           "chi2", "ks_normal", "ks_edgeworth3"},
          {{r.T, static_cast<double>(r.n), r.theta0, r.mean_theta_hat, r.bias, r.bias_se, r.scaled_variance,
            r.scaled_variance_se, r.chi2, r.ks_normal, r.ks_edgeworth3}}};
  emit(opts, out, "theta_hat", t, {{"result", theta_hat_to_json(r)}});
  if (opts.strict && !(bias_ok && var_ok)) return kStrictFailure;
  return kSuccess;
}

int cmd_converge(const CliOptions& opts, const json& cfg, const ExperimentConfig& exp, std::ostream& out,
                 std::ostream& err) {
  const json c = cfg.contains("converge") ? cfg["converge"] : json::object();
  const auto grid = c.value("T_grid", std::vector<double>{10.0, 100.0, 1000.0, 10000.0});
  const auto orders = c.value("orders", std::vector<int>{2, 3, 4});
  const auto kappaF = stationary_for(exp, *std::max_element(orders.begin(), orders.end()));
  const auto study = convergence_study(exp.params, kappaF, grid, orders);
  Table t{{"r", "T", "scaled_chi", "limit", "gap"}, {}};
  for (const auto& row : study.rows) t.rows.push_back({static_cast<double>(row.r), row.T, row.scaled, row.limit, row.gap});
  emit(opts, out, "convergence", t, convergence_to_json(study));
  bool ok = true;
  for (const auto& s : study.slopes) {
    if (!s.slope) {
      err << fmt::format("r={}: gap is exactly zero on the grid\n", s.r);
      continue;
    }
    const bool pass = *s.slope <= -0.8;
    ok = ok && pass;
    err << fmt::format("[{}] r={}: log-log slope {:.4f}\n", pass ? "ok" : "FAIL", s.r, *s.slope);
  }
  if (opts.strict && !ok) return kStrictFailure;
  return kSuccess;
}

}  // namespace

int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  json cfg;
  std::optional<ExperimentConfig> exp;
  try {
    if (opts.config_path.empty()) throw ConfigError("--config is required");
    cfg = load_config_file(opts.config_path);
    for (const auto& o : opts.overrides) apply_override(cfg, o);
    if (opts.seed) cfg["seed"] = *opts.seed;
    if (opts.workers) cfg["workers"] = *opts.workers;
    exp = experiment_from_json(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const auto& sub = opts.subcommand;
    if (sub == "cumulants") return cmd_cumulants(opts, cfg, *exp, out);
    if (sub == "density") return cmd_density(opts, cfg, *exp, out, err);
    if (sub == "expect") return cmd_expect(opts, cfg, *exp, out);
    if (sub == "simulate") return cmd_simulate(opts, cfg, *exp, out);
    if (sub == "validate") return cmd_validate(opts, cfg, *exp, out, err);
    if (sub == "theta-hat") return cmd_theta_hat(opts, cfg, *exp, out, err);
    if (sub == "converge") return cmd_converge(opts, cfg, *exp, out, err);
    err << "unknown subcommand '" << sub << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DegenerateModelError& e) {
    err << "degenerate model: " << e.what() << '\n';
    return kDegenerate;
  }
}

}  // namespace ouedge::cli
