#include "divctl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, key + ": " + msg);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) fail(key, "expected a number, got '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    fail(key, "expected a non-negative integer, got '" + s + "'");
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), nullptr, 10);
  if (errno == ERANGE) fail(key, "integer out of range");
  return v;
}

int to_int(const std::string& key, const std::string& s) {
  const std::uint64_t v = to_u64(key, s);
  if (v > 1000000000ULL) fail(key, "integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
  std::string t = trim(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(key, "expected a boolean, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::map<std::string, std::string> to_pairs(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["model.p"] = num(c.model.p);
  m["model.sigma_p"] = num(c.model.sigma_p);
  m["model.lambda"] = num(c.model.lambda);
  m["model.r"] = num(c.model.r);
  m["model.sigma_R"] = num(c.model.sigma_R);
  m["model.rho"] = num(c.model.rho);
  const auto& jv = c.model.jump.variant();
  if (const auto* e = std::get_if<ExponentialJumps>(&jv)) {
    m["model.jump.kind"] = "exponential";
    m["model.jump.rate"] = num(e->rate);
  } else if (const auto* h = std::get_if<HyperExponentialJumps>(&jv)) {
    m["model.jump.kind"] = "hyperexponential";
    m["model.jump.weights"] = list(h->weights);
    m["model.jump.rates"] = list(h->rates);
  } else if (const auto* er = std::get_if<ErlangJumps>(&jv)) {
    m["model.jump.kind"] = "erlang";
    m["model.jump.shape"] = std::to_string(er->shape);
    m["model.jump.rate"] = num(er->rate);
  } else {
    fail("model.jump.kind", "general jump laws cannot be written to a config");
  }
  m["costs.delta"] = num(c.costs.delta);
  m["costs.alpha"] = num(c.costs.alpha);
  m["costs.beta"] = num(c.costs.beta);
  m["problem"] = c.problem;
  m["sim.dt"] = num(c.sim.dt);
  m["sim.horizon"] = num(c.sim.horizon);
  m["sim.n_paths"] = std::to_string(c.sim.n_paths);
  m["sim.seed"] = std::to_string(c.sim.seed);
  m["sim.antithetic"] = c.sim.antithetic ? "true" : "false";
  m["sim.discount_cutoff"] = num(c.sim.discount_cutoff);
  m["sim.threads"] = std::to_string(c.sim.threads);
  m["sim.aggregate"] = c.sim.aggregate ? "true" : "false";
  m["sim.barrier"] = c.sim_barrier ? num(*c.sim_barrier) : "";
  m["sim.inject"] = c.sim_inject ? (*c.sim_inject ? "true" : "false") : "auto";
  m["sim.x0"] = list(c.sim_x0);
  m["output.format"] = c.format;
  m["output.grid.min"] = num(c.grid.min);
  m["output.grid.max"] = num(c.grid.max);
  m["output.grid.points"] = std::to_string(c.grid.points);
  m["output.prefix"] = c.prefix;
  m["output.paths"] = c.write_paths ? "true" : "false";
  m["sweep.param"] = c.sweep_param;
  m["sweep.values"] = list(c.sweep_values);
  m["sweep.x0"] = num(c.sweep_x0);
  return m;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model.p",          "model.sigma_p",      "model.lambda",       "model.jump.kind",    "model.jump.rate",
      "model.jump.shape", "model.jump.weights", "model.jump.rates",   "model.r",            "model.sigma_R",
      "model.rho",        "costs.delta",        "costs.alpha",        "costs.beta",         "problem",
      "sim.dt",           "sim.horizon",        "sim.n_paths",        "sim.seed",           "sim.antithetic",
      "sim.discount_cutoff", "sim.threads",     "sim.aggregate",      "sim.barrier",        "sim.inject",
      "sim.x0",           "output.format",      "output.grid.min",    "output.grid.max",    "output.grid.points",
      "output.prefix",    "output.paths",       "sweep.param",        "sweep.values",       "sweep.x0",
  };
  return keys;
}

std::string env_name(std::string_view key) {
  std::string out = "DIVCTL_";
  for (char ch : key) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

std::map<std::string, std::string> parse_pairs(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno), "expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) fail("line " + std::to_string(lineno), "empty key");
    if (!out.emplace(key, value).second) fail(key, "duplicate key");
  }
  return out;
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  for (const auto& key : config_keys())
    if (const char* v = std::getenv(env_name(key).c_str())) out[key] = v;
  return out;
}

RunConfig build_config(const std::map<std::string, std::string>& pairs) {
  const auto& keys = config_keys();
  for (const auto& [k, v] : pairs)
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(k, "unknown key");

  std::set<std::string> used;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = pairs.find(key);
    if (it == pairs.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };

  RunConfig c;
  if (auto v = get("model.p")) c.model.p = to_double("model.p", *v);
  if (auto v = get("model.sigma_p")) c.model.sigma_p = to_double("model.sigma_p", *v);
  if (auto v = get("model.lambda")) c.model.lambda = to_double("model.lambda", *v);
  if (auto v = get("model.r")) c.model.r = to_double("model.r", *v);
  if (auto v = get("model.sigma_R")) c.model.sigma_R = to_double("model.sigma_R", *v);
  if (auto v = get("model.rho")) c.model.rho = to_double("model.rho", *v);

  const std::string kind = get("model.jump.kind") ? *get("model.jump.kind") : "exponential";
  if (kind == "exponential") {
    const double rate = get("model.jump.rate") ? to_double("model.jump.rate", *get("model.jump.rate")) : 1.0;
    c.model.jump = JumpLaw::exponential(rate);
  } else if (kind == "erlang") {
    const double rate = get("model.jump.rate") ? to_double("model.jump.rate", *get("model.jump.rate")) : 1.0;
    const int shape = get("model.jump.shape") ? to_int("model.jump.shape", *get("model.jump.shape")) : 2;
    c.model.jump = JumpLaw::erlang(shape, rate);
  } else if (kind == "hyperexponential") {
    if (!get("model.jump.weights") || !get("model.jump.rates"))
      fail("model.jump.kind", "hyperexponential needs model.jump.weights and model.jump.rates");
    c.model.jump = JumpLaw::hyper_exponential(to_list("model.jump.weights", *get("model.jump.weights")),
                                              to_list("model.jump.rates", *get("model.jump.rates")));
  } else {
    fail("model.jump.kind", "unknown jump kind '" + kind + "' (exponential, hyperexponential, erlang)");
  }
  for (const char* k : {"model.jump.rate", "model.jump.shape", "model.jump.weights", "model.jump.rates"})
    if (pairs.count(k) && !used.count(k)) fail(k, "not used by jump kind " + kind);

  if (auto v = get("costs.delta")) c.costs.delta = to_double("costs.delta", *v);
  if (auto v = get("costs.alpha")) c.costs.alpha = to_double("costs.alpha", *v);
  if (auto v = get("costs.beta")) c.costs.beta = to_double("costs.beta", *v);
  if (auto v = get("problem")) c.problem = *v;
  if (c.problem != "dividends" && c.problem != "injections" && c.problem != "combined")
    fail("problem", "unknown problem '" + c.problem + "' (dividends, injections, combined)");

  if (auto v = get("sim.dt")) c.sim.dt = to_double("sim.dt", *v);
  if (auto v = get("sim.horizon")) c.sim.horizon = to_double("sim.horizon", *v);
  if (auto v = get("sim.n_paths")) c.sim.n_paths = to_u64("sim.n_paths", *v);
  if (auto v = get("sim.seed")) c.sim.seed = to_u64("sim.seed", *v);
  if (auto v = get("sim.antithetic")) c.sim.antithetic = to_bool("sim.antithetic", *v);
  if (auto v = get("sim.discount_cutoff")) c.sim.discount_cutoff = to_double("sim.discount_cutoff", *v);
  if (auto v = get("sim.threads")) c.sim.threads = to_int("sim.threads", *v);
  if (auto v = get("sim.aggregate")) c.sim.aggregate = to_bool("sim.aggregate", *v);
  if (auto v = get("sim.barrier"); v && !v->empty()) c.sim_barrier = to_double("sim.barrier", *v);
  if (auto v = get("sim.inject"); v && *v != "auto") c.sim_inject = to_bool("sim.inject", *v);
  if (auto v = get("sim.x0")) c.sim_x0 = to_list("sim.x0", *v);

  if (auto v = get("output.format")) c.format = *v;
  if (c.format != "csv" && c.format != "json") fail("output.format", "expected csv or json");
  if (auto v = get("output.grid.min")) c.grid.min = to_double("output.grid.min", *v);
  if (auto v = get("output.grid.max")) c.grid.max = to_double("output.grid.max", *v);
  if (auto v = get("output.grid.points")) c.grid.points = to_int("output.grid.points", *v);
  if (c.grid.points < 1) fail("output.grid.points", "must be >= 1");
  if (c.grid.min < 0.0) fail("output.grid.min", "must be >= 0");
  if (auto v = get("output.prefix")) c.prefix = *v;
  if (auto v = get("output.paths")) c.write_paths = to_bool("output.paths", *v);
  if (auto v = get("sweep.param")) c.sweep_param = *v;
  if (auto v = get("sweep.values")) c.sweep_values = to_list("sweep.values", *v);
  if (auto v = get("sweep.x0")) c.sweep_x0 = to_double("sweep.x0", *v);

  for (const auto& d : validate(c.model, c.costs))
    if (d.severity == Severity::Error) fail(d.field, d.message);
  try {
    c.sim.check();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what() + std::string_view(e.what()).find(": ") + 2);
  }
  if (c.sim_barrier && *c.sim_barrier < 0.0) fail("sim.barrier", "must be >= 0");
  for (double x : c.sim_x0)
    if (x < 0.0) fail("sim.x0", "starting points must be >= 0");
  return c;
}

RunConfig load_config(const std::string& path, bool use_environment) {
  std::map<std::string, std::string> pairs;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) fail("--config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    pairs = parse_pairs(ss.str());
  }
  if (use_environment)
    for (const auto& [k, v] : environment_overrides()) pairs[k] = v;
  return build_config(pairs);
}

std::string dump_config(const RunConfig& config) {
  const auto pairs = to_pairs(config);
  std::string out;
  for (const auto& key : config_keys()) {
    auto it = pairs.find(key);
    if (it != pairs.end()) out += key + " = " + it->second + "\n";
  }
  return out;
}

RunConfig with_value(const RunConfig& config, const std::string& key, const std::string& value) {
  auto pairs = to_pairs(config);
  pairs[key] = value;
  return build_config(pairs);
}

}  // namespace divctl
