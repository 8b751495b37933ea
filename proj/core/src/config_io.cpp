#include "ouedge/config_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "ouedge/errors.hpp"

namespace ouedge {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(fmt::format("{}: {}", path.empty() ? "<root>" : path, msg));
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path, fmt::format("missing required key '{}'", key));
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected a finite number");
  return d;
}

double positive(const json& v, const std::string& path) {
  const double d = number(v, path);
  if (!(d > 0.0)) fail(path, "must be positive");
  return d;
}

long long integer(const json& v, const std::string& path, long long lo, long long hi) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  if (v.is_number_unsigned() && v.get<unsigned long long>() > static_cast<unsigned long long>(hi))
    fail(path, fmt::format("must be at most {}", hi));
  const auto i = v.get<long long>();
  if (i < lo || i > hi) fail(path, fmt::format("must be in [{}, {}]", lo, hi));
  return i;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) fail(path, fmt::format("unknown key '{}'", key));
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void positive_array(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array");
  for (std::size_t i = 0; i < v.size(); ++i) positive(v[i], fmt::format("{}[{}]", path, i));
}

void order_array(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array");
  for (std::size_t i = 0; i < v.size(); ++i) integer(v[i], fmt::format("{}[{}]", path, i), 2, kMaxOrder);
}

void validate_model(const json& m) {
  only_keys(m, "model", {"lambda", "gamma", "beta", "rho"});
  positive(require(m, "model", "lambda"), "model.lambda");
  number(require(m, "model", "gamma"), "model.gamma");
  if (number(require(m, "model", "beta"), "model.beta") == 0.0) fail("model.beta", "must be nonzero");
  number(require(m, "model", "rho"), "model.rho");
}

void validate_driver(const json& d) {
  if (!d.is_object()) fail("driver", "expected an object");
  const auto& type = require(d, "driver", "type");
  if (!type.is_string()) fail("driver.type", "expected a string");
  const auto t = type.get<std::string>();
  if (t == "gaussian") {
    only_keys(d, "driver", {"type", "b", "C"});
    number(require(d, "driver", "b"), "driver.b");
    positive(require(d, "driver", "C"), "driver.C");
  } else if (t == "compound_poisson_exp") {
    only_keys(d, "driver", {"type", "b", "c", "alpha"});
    number(require(d, "driver", "b"), "driver.b");
    positive(require(d, "driver", "c"), "driver.c");
    positive(require(d, "driver", "alpha"), "driver.alpha");
  } else if (t == "mixed") {
    only_keys(d, "driver", {"type", "b", "C", "c", "alpha"});
    number(require(d, "driver", "b"), "driver.b");
    if (number(require(d, "driver", "C"), "driver.C") < 0.0) fail("driver.C", "must be nonnegative");
    positive(require(d, "driver", "c"), "driver.c");
    positive(require(d, "driver", "alpha"), "driver.alpha");
  } else {
    fail("driver.type", "must be one of gaussian, compound_poisson_exp, mixed");
  }
}

void validate_function(const json& f, const std::string& path) {
  if (!f.is_object()) fail(path, "expected an object");
  const auto& kind = require(f, path, "kind");
  if (!kind.is_string()) fail(join(path, "kind"), "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "indicator_le") {
    only_keys(f, path, {"kind", "a"});
    number(require(f, path, "a"), join(path, "a"));
  } else if (k == "interval") {
    only_keys(f, path, {"kind", "a", "b"});
    const double a = number(require(f, path, "a"), join(path, "a"));
    const double b = number(require(f, path, "b"), join(path, "b"));
    if (b < a) fail(path, "interval needs a <= b");
  } else if (k == "polynomial") {
    only_keys(f, path, {"kind", "coeffs"});
    const auto& c = require(f, path, "coeffs");
    if (!c.is_array() || c.empty()) fail(join(path, "coeffs"), "expected a nonempty array");
    for (std::size_t i = 0; i < c.size(); ++i) number(c[i], fmt::format("{}.coeffs[{}]", path, i));
  } else if (k == "tabulated") {
    only_keys(f, path, {"kind", "x", "y"});
    const auto& x = require(f, path, "x");
    const auto& y = require(f, path, "y");
    if (!x.is_array() || x.empty()) fail(join(path, "x"), "expected a nonempty array");
    if (!y.is_array() || y.size() != x.size()) fail(join(path, "y"), "expected an array matching x");
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = number(x[i], fmt::format("{}.x[{}]", path, i));
      number(y[i], fmt::format("{}.y[{}]", path, i));
      if (i > 0 && !(xi > x[i - 1].get<double>())) fail(join(path, "x"), "must be strictly increasing");
    }
  } else {
    fail(join(path, "kind"), "must be one of indicator_le, interval, polynomial, tabulated");
  }
}

}  // namespace

void validate_config(const json& cfg) {
  only_keys(cfg, "", {"model", "driver", "T_grid", "p_orders", "n_samples", "seed", "test_points", "workers",
                      "bootstrap", "r_max", "diagnostics", "density", "expect", "simulate", "theta_hat",
                      "converge"});
  validate_model(require(cfg, "", "model"));
  validate_driver(require(cfg, "", "driver"));
  if (cfg.contains("T_grid")) positive_array(cfg["T_grid"], "T_grid");
  if (cfg.contains("p_orders")) order_array(cfg["p_orders"], "p_orders");
  if (cfg.contains("n_samples")) integer(cfg["n_samples"], "n_samples", 100, 1'000'000'000);
  if (cfg.contains("seed")) {
    const auto& s = cfg["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      fail("seed", "expected a nonnegative integer");
  }
  if (cfg.contains("test_points")) {
    const auto& t = cfg["test_points"];
    if (!t.is_array()) fail("test_points", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) number(t[i], fmt::format("test_points[{}]", i));
  }
  if (cfg.contains("workers")) integer(cfg["workers"], "workers", 0, 4096);
  if (cfg.contains("bootstrap")) integer(cfg["bootstrap"], "bootstrap", 2, 100000);
  if (cfg.contains("r_max")) integer(cfg["r_max"], "r_max", 2, kMaxOrder);
  if (cfg.contains("diagnostics")) {
    only_keys(cfg["diagnostics"], "diagnostics", {"chi_perturbation"});
    if (cfg["diagnostics"].contains("chi_perturbation"))
      number(cfg["diagnostics"]["chi_perturbation"], "diagnostics.chi_perturbation");
  }
  if (cfg.contains("density")) {
    const auto& d = cfg["density"];
    only_keys(d, "density", {"T", "y_min", "y_max", "n_points", "orders"});
    if (d.contains("T")) positive(d["T"], "density.T");
    double lo = -10.0, hi = 10.0;
    if (d.contains("y_min")) lo = number(d["y_min"], "density.y_min");
    if (d.contains("y_max")) hi = number(d["y_max"], "density.y_max");
    if (hi < lo) fail("density", "y_max must be >= y_min");
    if (d.contains("n_points")) integer(d["n_points"], "density.n_points", 1, 10'000'000);
    if (d.contains("orders")) order_array(d["orders"], "density.orders");
  }
  if (cfg.contains("expect")) {
    const auto& e = cfg["expect"];
    only_keys(e, "expect", {"T", "function", "orders"});
    if (e.contains("T")) positive(e["T"], "expect.T");
    validate_function(require(e, "expect", "function"), "expect.function");
    if (e.contains("orders")) order_array(e["orders"], "expect.orders");
  }
  if (cfg.contains("simulate")) {
    const auto& s = cfg["simulate"];
    only_keys(s, "simulate", {"T", "n_steps", "n_paths", "n_samples"});
    if (s.contains("T")) positive(s["T"], "simulate.T");
    if (s.contains("n_steps")) integer(s["n_steps"], "simulate.n_steps", 1, 100'000'000);
    if (s.contains("n_paths")) integer(s["n_paths"], "simulate.n_paths", 0, 100000);
    if (s.contains("n_samples")) integer(s["n_samples"], "simulate.n_samples", 0, 1'000'000'000);
  }
  if (cfg.contains("theta_hat")) {
    const auto& t = cfg["theta_hat"];
    only_keys(t, "theta_hat", {"T", "n_samples"});
    if (t.contains("T")) positive(t["T"], "theta_hat.T");
    if (t.contains("n_samples")) integer(t["n_samples"], "theta_hat.n_samples", 100, 1'000'000'000);
  }
  if (cfg.contains("converge")) {
    const auto& c = cfg["converge"];
    only_keys(c, "converge", {"T_grid", "orders"});
    if (c.contains("T_grid")) {
      positive_array(c["T_grid"], "converge.T_grid");
      if (c["T_grid"].size() < 3) fail("converge.T_grid", "needs at least three horizons");
    }
    if (c.contains("orders")) order_array(c["orders"], "converge.orders");
  }
}

ModelParams params_from_json(const json& model) {
  validate_model(model);
  return ModelParams(model["lambda"].get<double>(), model["gamma"].get<double>(), model["beta"].get<double>(),
                     model["rho"].get<double>());
}

DriverSpec driver_from_json(const json& d) {
  validate_driver(d);
  const auto t = d["type"].get<std::string>();
  if (t == "gaussian") return GaussianDriver{d["b"].get<double>(), d["C"].get<double>()};
  if (t == "compound_poisson_exp")
    return CompoundPoissonExpDriver{d["b"].get<double>(), d["c"].get<double>(), d["alpha"].get<double>()};
  return MixedDriver{d["b"].get<double>(), d["C"].get<double>(), d["c"].get<double>(), d["alpha"].get<double>()};
}

json driver_to_json(const DriverSpec& d) {
  struct Visitor {
    json operator()(const GaussianDriver& g) const { return {{"type", "gaussian"}, {"b", g.b}, {"C", g.C}}; }
    json operator()(const CompoundPoissonExpDriver& g) const {
      return {{"type", "compound_poisson_exp"}, {"b", g.b}, {"c", g.c}, {"alpha", g.alpha}};
    }
    json operator()(const MixedDriver& g) const {
      return {{"type", "mixed"}, {"b", g.b}, {"C", g.C}, {"c", g.c}, {"alpha", g.alpha}};
    }
  };
  return std::visit(Visitor{}, d);
}

ExperimentConfig experiment_from_json(const json& cfg) {
  validate_config(cfg);
  ExperimentConfig out{params_from_json(cfg["model"]), driver_from_json(cfg["driver"]), {10.0}, {2, 3, 4}, 10000, 1,
                       {-1.0, 0.0, 1.0}};
  if (cfg.contains("T_grid")) out.T_grid = cfg["T_grid"].get<std::vector<double>>();
  if (cfg.contains("p_orders")) out.p_orders = cfg["p_orders"].get<std::vector<int>>();
  if (cfg.contains("n_samples")) out.n_samples = cfg["n_samples"].get<std::size_t>();
  if (cfg.contains("seed")) out.seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.contains("test_points")) out.test_points = cfg["test_points"].get<std::vector<double>>();
  if (cfg.contains("workers")) out.workers = cfg["workers"].get<unsigned>();
  if (cfg.contains("bootstrap")) out.n_boot = cfg["bootstrap"].get<int>();
  if (cfg.contains("diagnostics") && cfg["diagnostics"].contains("chi_perturbation"))
    out.chi_perturbation = cfg["diagnostics"]["chi_perturbation"].get<double>();
  try {
    validate(out);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

void apply_override(json& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError(fmt::format("override '{}' is not of the form key=value", assignment));
  // a[1].b and a.1.b address the same element
  std::string key;
  for (char ch : assignment.substr(0, eq)) {
    if (ch == '[') key += '.';
    else if (ch != ']') key += ch;
  }
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(fmt::format("override key '{}' has an empty segment", key));
    json* next = nullptr;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("override key '{}': '{}' is not an array index", key, part));
      }
      if (idx >= node->size()) throw ConfigError(fmt::format("override key '{}': index out of range", key));
      next = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError(fmt::format("override key '{}' descends into a scalar", key));
      next = &(*node)[part];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

std::string config_hash(const json& cfg) {
  json copy = cfg;
  if (copy.is_object()) copy.erase("workers");
  const std::string text = copy.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  json cfg = json::parse(in, nullptr, false);
  if (cfg.is_discarded()) throw ConfigError(fmt::format("config file '{}' is not valid JSON", path));
  return cfg;
}

}  // namespace ouedge
